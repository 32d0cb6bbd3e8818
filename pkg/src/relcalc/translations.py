"""Translations between FO=, the calculus of relations and FO3.

* :func:`fo_to_cor` / :func:`fo_to_cor_equation` -- FO= formulas to CoR via
  the k-tuple axioms :func:`gamma_k` and the term translation :func:`t_k`.
* :func:`schroder_tarski` -- a quantifier-free CoR formula to one term.
* :func:`standard_translation` -- CoR terms to FO3= formulas.
* :func:`tseitin`, :func:`sigma2_normalize`, :func:`godel_reduce` -- bounded
  alternation normal form and the reduction into the Gödel class.
* :func:`fo_to_fo3`, :func:`eliminate_equality`, :func:`arity_reduce` --
  the direct FO= to FO3 pipeline and its helpers.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import cor
from . import fo
from .cor import BOT, I, TOP, Comp, Conv, Dot, Equation, Id, Inter, QAnd, QNot, RelVar
from .errors import TranslationError
from .fo import And, Atom, Eq, Exists, Forall, Iff, Implies, NAtom, Not, Or
from .structures import U_NAME, e_name, pi_name, q_name, reserved_names

# --- k-tuple axioms -----------------------------------------------------------


def _pi(i: int) -> RelVar:
    return RelVar(pi_name(i))


def _q(i: int) -> RelVar:
    return RelVar(q_name(i))


def _e(lo: int, hi: int, k: int) -> cor.Term:
    """``E_[lo,hi]``; the empty ranges ``E_[1,0]`` and ``E_[k+1,k]`` denote top."""
    if lo > hi or hi < 1 or lo > k:
        return TOP
    return RelVar(e_name(lo, hi))


def _unique(items: Iterable) -> list:
    return list(dict.fromkeys(items))


def gamma_k(k: int, sigma_used: Iterable[str]) -> list[Equation]:
    """The equations (1)-(11) axiomatizing k-tuple structures, in order,
    without duplicates."""
    if k < 1:
        raise TranslationError("k must be at least 1")
    U = RelVar(U_NAME)
    out: list[Equation] = [Equation(U, cor.intersect_all([_pi(j) for j in range(1, k + 1)]))]
    for i in range(1, k + 1):
        pp = Dot(_pi(i), Conv(_pi(i)))
        out.append(Equation(_e(1, i, k), Inter(_e(1, i - 1, k), pp)))
        out.append(Equation(_e(i, k, k), Inter(_e(i + 1, k, k), pp)))
        out.append(Equation(_q(i), Inter(_e(1, i - 1, k), _e(i + 1, k, k))))
    out.append(cor.leq(U, I))
    for i in range(1, k + 1):
        out.append(cor.leq(Dot(Conv(_pi(i)), _pi(i)), I))
        out.append(cor.leq(I, cor.dots(_pi(i), U, Conv(_pi(i)))))
        out.append(cor.leq(Dot(TOP, U), Dot(_q(i), _pi(i))))
    out.append(Equation(I, _e(1, k, k)))
    out.append(Equation(cor.dots(TOP, U, TOP), TOP))
    for a in sorted(set(sigma_used)):
        out.append(cor.leq(RelVar(a), cor.dots(U, TOP, U)))
    return _unique(out)


@dataclass(frozen=True)
class TranslationUnit:
    k: int
    var_index: dict = field(hash=False)
    sigma_used: frozenset = frozenset()

    @classmethod
    def of(cls, f: fo.Formula, min_k: int = 1) -> "TranslationUnit":
        """Index the variables of ``f`` as x_1..x_k by first occurrence."""
        order = fo.vars_in_order(f)
        k = max(min_k, len(order))
        sigma = fo.predicates_of(f)
        clash = sigma & reserved_names(k)
        if clash:
            raise TranslationError(f"predicate names {sorted(clash)} are reserved for the {k}-tuple encoding")
        return cls(k, {v: i + 1 for i, v in enumerate(order)}, frozenset(sigma))

    def index(self, var: str) -> int:
        try:
            return self.var_index[var]
        except KeyError:
            raise TranslationError(f"variable {var!r} has no index in the translation unit") from None


def _binary_only(f: fo.Formula) -> None:
    if isinstance(f, NAtom):
        raise TranslationError(f"atom {f.pred}/{len(f.args)} is not binary; apply arity_reduce first")


def t_k(f: fo.Formula, unit: TranslationUnit, guard_negation: bool = True) -> cor.Term:
    """The term T^(k)(f); on k-tuple structures it denotes the diagonal of
    the encoded satisfying assignments.

    Negation is complement relative to the identity, ``T(ψ)⁻ ∩ I``.  The
    bare complement ``T(ψ)⁻`` (``guard_negation=False``) also contains every
    off-diagonal pair, and a later ``Q_i ; _ ; Q_i^T`` then reads those
    pairs as witnesses, so ``exists x. !(x = x)`` would hold on any
    structure with two elements.
    """
    if isinstance(f, Atom):
        i, j = unit.index(f.left), unit.index(f.right)
        return Inter(cor.dots(_pi(i), RelVar(f.pred), Conv(_pi(j))), I)
    if isinstance(f, Eq):
        i, j = unit.index(f.left), unit.index(f.right)
        return Inter(Dot(_pi(i), Conv(_pi(j))), I)
    if isinstance(f, Not):
        sub = Comp(t_k(f.sub, unit, guard_negation))
        return Inter(sub, I) if guard_negation else sub
    if isinstance(f, And):
        return Inter(t_k(f.left, unit, guard_negation), t_k(f.right, unit, guard_negation))
    if isinstance(f, Exists):
        i = unit.index(f.var)
        return Inter(cor.dots(_q(i), t_k(f.sub, unit, guard_negation), Conv(_q(i))), I)
    _binary_only(f)
    raise TypeError(f)


def fo_to_cor(f: fo.Formula) -> cor.QfFormula:
    """``(⋀ Γ^(k)) → I ≤ T^(k)(f)``: valid (finitely valid) iff ``f`` is."""
    unit = TranslationUnit.of(f)
    return cor.q_implies(cor.q_conjoin(gamma_k(unit.k, unit.sigma_used)), cor.leq(I, t_k(f, unit)))


def fo_to_cor_equation(f: fo.Formula) -> Equation:
    return Equation(schroder_tarski(fo_to_cor(f)), TOP)


def schroder_tarski(f: cor.QfFormula) -> cor.Term:
    """A term ``t`` with ``f ↔ t = top`` on every structure."""
    if isinstance(f, Equation):
        t, s = f.left, f.right
        return cor.union(Inter(t, s), Inter(Comp(t), Comp(s)))
    if isinstance(f, QNot):
        return cor.dots(TOP, Comp(schroder_tarski(f.sub)), TOP)
    if isinstance(f, QAnd):
        return Inter(schroder_tarski(f.left), schroder_tarski(f.right))
    raise TypeError(f)


# --- standard translation -------------------------------------------------------


def standard_translation(t: cor.Term, x: str = "x1", y: str = "x2", z: str = "x3") -> fo.Formula:
    """ST[x,y](t): an FO3= formula with free variables ``x``, ``y`` defining
    the relation denoted by ``t``."""
    pool = (x, y, z)

    def st(t: cor.Term, u: str, v: str) -> fo.Formula:
        if isinstance(t, RelVar):
            return Atom(t.name, u, v)
        if isinstance(t, Id):
            return Eq(u, v)
        if isinstance(t, Comp):
            return Not(st(t.sub, u, v))
        if isinstance(t, Inter):
            return And(st(t.left, u, v), st(t.right, u, v))
        if isinstance(t, Dot):
            w = next(p for p in pool if p not in (u, v))
            return Exists(w, And(st(t.left, u, w), st(t.right, w, v)))
        if isinstance(t, Conv):
            return st(t.sub, v, u)
        raise TypeError(t)

    return st(t, x, y)


def standard_translation_qf(f: cor.QfFormula, x: str = "x1", y: str = "x2", z: str = "x3") -> fo.Formula:
    """Sentence equivalent to a quantifier-free CoR formula: each equation
    ``t = s`` becomes ``∀x∀y (ST(t) ↔ ST(s))``."""
    if isinstance(f, Equation):
        body = Iff(standard_translation(f.left, x, y, z), standard_translation(f.right, x, y, z))
        return Forall(x, Forall(y, body))
    if isinstance(f, QNot):
        return Not(standard_translation_qf(f.sub, x, y, z))
    if isinstance(f, QAnd):
        return And(standard_translation_qf(f.left, x, y, z), standard_translation_qf(f.right, x, y, z))
    raise TypeError(f)


# --- Tseitin translation -------------------------------------------------------


@dataclass
class TseitinEnv:
    """Fresh names for the distinct subterms of ``term``.

    ``gamma`` holds one defining equation per name, children before parents;
    ``root`` names the whole term.
    """

    term: cor.Term
    name_of: dict
    gamma: list
    root: str
    atomic_constants: bool = False

    def definition(self, name: str) -> Equation:
        return self._by_name[name]

    def __post_init__(self):
        self._by_name = {eq.left.name: eq for eq in self.gamma}

    @property
    def names(self) -> list[str]:
        return [eq.left.name for eq in self.gamma]


def _is_constant(t: cor.Term) -> bool:
    return t == TOP or t == BOT


def fresh_name(key: str, used: set[str], prefix: str = "t_") -> str:
    digest = hashlib.sha1(key.encode("utf-8")).hexdigest()
    for width in range(10, len(digest) + 1):
        name = prefix + digest[:width]
        if name not in used:
            return name
    n = 1
    while f"{prefix}{digest}_{n}" in used:
        n += 1
    return f"{prefix}{digest}_{n}"


def tseitin(t: cor.Term, atomic_constants: bool = False) -> TseitinEnv:
    """One fresh variable per distinct subterm with its defining equation:
    ``a_b = b``, ``a_I = I``, ``a_{s⁻} = a_s⁻``, ``a_{s⌣} = a_s⌣``,
    ``a_{s∩u} = a_s ∩ a_u`` and ``a_{s·u} = a_s · a_u``.

    With ``atomic_constants`` the patterns ``top`` and ``bot`` are leaves
    (``a_top = top``) instead of being unfolded through ``id``.
    """
    used = set(cor.relvars_of(t))
    name_of: dict = {}
    gamma: list[Equation] = []

    def visit(s: cor.Term) -> str:
        # iterative post-order keeps very deep terms off the Python stack
        stack = [(s, False)]
        while stack:
            cur, ready = stack.pop()
            if cur in name_of:
                continue
            leaf = isinstance(cur, (RelVar, Id)) or (atomic_constants and _is_constant(cur))
            if not ready and not leaf:
                stack.append((cur, True))
                for child in _children(cur):
                    stack.append((child, False))
                continue
            name = fresh_name(cor.print_cor(cur), used)
            used.add(name)
            a = RelVar(name)
            if leaf:
                rhs = cur
            elif isinstance(cur, Comp):
                rhs = Comp(RelVar(name_of[cur.sub]))
            elif isinstance(cur, Conv):
                rhs = Conv(RelVar(name_of[cur.sub]))
            elif isinstance(cur, Inter):
                rhs = Inter(RelVar(name_of[cur.left]), RelVar(name_of[cur.right]))
            else:
                rhs = Dot(RelVar(name_of[cur.left]), RelVar(name_of[cur.right]))
            name_of[cur] = name
            gamma.append(Equation(a, rhs))
        return name_of[s]

    root = visit(t)
    return TseitinEnv(t, name_of, gamma, root, atomic_constants)


def _children(t: cor.Term) -> list[cor.Term]:
    if isinstance(t, (Comp, Conv)):
        return [t.sub]
    if isinstance(t, (Inter, Dot)):
        return [t.right, t.left]
    return []


# --- Σ2 normal form -------------------------------------------------------------


@dataclass
class Sigma2Result:
    """Output of :func:`sigma2_normalize` with its intermediate stages.

    ``display`` lists, per defining equation, the two violation terms in
    the complemented form; ``gamma`` is the same set after complemented
    variables were replaced by fresh ones (plus their axioms).
    """

    equation: Equation
    env: TseitinEnv
    complement_of: dict
    display: list
    gamma: list


def _reject_conv_id(f: cor.QfFormula) -> None:
    bad = cor.find_conv_or_id(f, allow_constants=True)
    if bad is not None:
        kind = "converse" if isinstance(bad, Conv) else "identity"
        raise TranslationError(f"{kind} occurrence {cor.print_cor(bad)!r} is not allowed here")


def _as_top_term(f: cor.QfFormula) -> cor.Term:
    if isinstance(f, Equation) and f.right == TOP:
        return f.left
    return schroder_tarski(f)


def _violations(a: RelVar, rhs: cor.Term) -> list[cor.Term]:
    """Two terms whose union is empty iff ``a = rhs``."""
    if isinstance(rhs, Dot):
        return [Inter(a, cor.dagger(Comp(rhs.left), Comp(rhs.right))), Inter(Comp(a), rhs)]
    if isinstance(rhs, Comp):
        return [Inter(a, rhs.sub), Inter(Comp(a), rhs)]
    if isinstance(rhs, Inter):
        return [Inter(a, Comp(rhs)), Inter(Comp(a), rhs)]
    return [Inter(a, Comp(rhs)), Inter(Comp(a), rhs)]


def sigma2_pipeline(f: cor.QfFormula) -> Sigma2Result:
    _reject_conv_id(f)
    t = _as_top_term(f)
    env = tseitin(t, atomic_constants=True)
    used = set(cor.relvars_of(t)) | set(env.names)
    complement_of: dict[str, str] = {}
    gamma: list[cor.Term] = []
    display: list[cor.Term] = []

    def bar(name: str) -> RelVar:
        if name not in complement_of:
            cname = name + "_n"
            n = 1
            while cname in used:
                cname = f"{name}_n{n}"
                n += 1
            used.add(cname)
            complement_of[name] = cname
            gamma.append(Inter(RelVar(cname), RelVar(name)))
            gamma.append(Inter(Comp(RelVar(cname)), Comp(RelVar(name))))
        return RelVar(complement_of[name])

    for eq in env.gamma:
        a, rhs = eq.left, eq.right
        display.extend(_violations(a, rhs))
        if isinstance(rhs, Dot):
            s, u = rhs.left.name, rhs.right.name
            gamma.append(Inter(a, cor.dagger(bar(s), bar(u))))
            gamma.append(Inter(bar(a.name), rhs))
        elif isinstance(rhs, Comp):
            gamma.append(Inter(a, rhs.sub))
            gamma.append(Inter(Comp(a), Comp(rhs.sub)))
        elif isinstance(rhs, Inter):
            s, u = rhs.left.name, rhs.right.name
            gamma.append(Inter(a, bar(s)))
            gamma.append(Inter(a, bar(u)))
            gamma.append(Inter(bar(a.name), rhs))
        elif rhs == TOP:
            gamma.append(Inter(Comp(a), Comp(a)))
        elif rhs == BOT:
            gamma.append(Inter(a, a))
        elif isinstance(rhs, RelVar):
            gamma.append(Inter(bar(a.name), rhs))
            gamma.append(Inter(Comp(bar(a.name)), Comp(rhs)))
        else:
            raise TranslationError(f"unexpected defining equation {cor.print_cor(eq)!r}")

    gamma = _unique(gamma)
    lhs = cor.union(cor.dots(TOP, cor.union_all(gamma), TOP), RelVar(env.root))
    return Sigma2Result(Equation(lhs, TOP), env, complement_of, display, gamma)


def sigma2_normalize(f: cor.QfFormula) -> Equation:
    """An equation ``(top ; (⋃Γ) ; top) | a = top`` equivalent for validity
    and finite validity, with every member of Γ one of the five templates."""
    return sigma2_pipeline(f).equation


# --- Gödel class ------------------------------------------------------------------


def _rename_universals(f: fo.Formula, fresh, negated: bool = False) -> fo.Formula:
    """Rename every binder that acts universally (an ∃ under an odd number
    of negations) to a fresh name from ``fresh``."""
    if isinstance(f, Not):
        return Not(_rename_universals(f.sub, fresh, not negated))
    if isinstance(f, And):
        return And(_rename_universals(f.left, fresh, negated), _rename_universals(f.right, fresh, negated))
    if isinstance(f, Exists):
        body = _rename_universals(f.sub, fresh, negated)
        if not negated:
            return Exists(f.var, body)
        w = next(fresh)
        return Exists(w, fo.rename_free(body, {f.var: w}))
    return f


def godel_reduce(f: cor.QfFormula) -> fo.Formula:
    """A prenex ∃³∀* sentence without equality, valid (finitely valid) iff
    ``f`` is; its negation lies in the Gödel class [∀³∃*, (0, ω), (0)]."""
    res = sigma2_pipeline(f)
    counter = iter(range(1, 1 << 62))
    fresh = (f"w_{i}" for i in counter)
    disjuncts = [_rename_universals(standard_translation(g, "x", "y", "z"), fresh) for g in res.gamma]
    body = fo._balanced(disjuncts, Or)
    w1, w2 = next(fresh), next(fresh)
    sentence = Or(Exists("x", Exists("y", body)), Forall(w1, Forall(w2, Atom(res.env.root, w1, w2))))
    ws = sorted((v for v in fo.vars_of(sentence) if v.startswith("w_")), key=lambda v: int(v[2:]))
    return fo.prenex(sentence, ["x", "y", "z", *ws])


def negate(f: fo.Formula) -> fo.Formula:
    return f.sub if isinstance(f, Not) else Not(f)


# --- direct FO= to FO3 ------------------------------------------------------------

X1, X2, X3 = "x1", "x2", "x3"
FO3_VARS = (X1, X2, X3)


def _fo3_true() -> fo.Formula:
    return Exists(X3, Eq(X3, X3))


def _e_atom(lo: int, hi: int, k: int, u: str, v: str) -> fo.Formula:
    if lo > hi or hi < 1 or lo > k:
        return _fo3_true()
    return Atom(e_name(lo, hi), u, v)


def gamma_fo3(k: int, sigma_used: Iterable[str]) -> list[fo.Formula]:
    """The primed axioms (1')-(11') over the variables x1, x2, x3."""
    if k < 1:
        raise TranslationError("k must be at least 1")
    x, y, z = FO3_VARS
    U = U_NAME

    def pi(i, u, v):
        return Atom(pi_name(i), u, v)

    def same(i):
        return Exists(z, And(pi(i, x, z), pi(i, y, z)))

    out = [Forall(x, Forall(y, Iff(Atom(U, x, y), fo._balanced([pi(j, x, y) for j in range(1, k + 1)], And))))]
    for i in range(1, k + 1):
        out.append(Forall(x, Forall(y, Iff(_e_atom(1, i, k, x, y), And(_e_atom(1, i - 1, k, x, y), same(i))))))
        out.append(Forall(x, Forall(y, Iff(_e_atom(i, k, k, x, y), And(_e_atom(i + 1, k, k, x, y), same(i))))))
        out.append(
            Forall(x, Forall(y, Iff(Atom(q_name(i), x, y), And(_e_atom(1, i - 1, k, x, y), _e_atom(i + 1, k, k, x, y)))))
        )
    out.append(Forall(x, Forall(y, Implies(Atom(U, x, y), Eq(x, y)))))
    for i in range(1, k + 1):
        out.append(Forall(x, Forall(y, Forall(z, Implies(And(pi(i, x, y), pi(i, x, z)), Eq(y, z))))))
        out.append(Forall(x, Exists(y, And(pi(i, x, y), Atom(U, y, y)))))
        out.append(Forall(x, Forall(y, Implies(Atom(U, y, y), Exists(z, And(Atom(q_name(i), x, z), pi(i, z, y)))))))
    out.append(Forall(x, Forall(y, Iff(Eq(x, y), _e_atom(1, k, k, x, y)))))
    out.append(Exists(x, Atom(U, x, x)))
    for a in sorted(set(sigma_used)):
        out.append(Forall(x, Forall(y, Implies(Atom(a, x, y), And(Atom(U, x, x), Atom(U, y, y))))))
    return _unique(out)


def _pivots(z: str) -> tuple[str, str]:
    if z not in FO3_VARS:
        raise TranslationError(f"pivot {z!r} must be one of {FO3_VARS}")
    rest = [v for v in FO3_VARS if v != z]
    return rest[0], rest[1]


def t_z_k(f: fo.Formula, unit: TranslationUnit, z: str = X1) -> fo.Formula:
    """T_z^(k)(f): an FO3 formula in the single free variable ``z`` that
    holds of a tuple vertex iff its coordinates satisfy ``f``."""
    z1, z2 = _pivots(z)
    if isinstance(f, Atom):
        i, j = unit.index(f.left), unit.index(f.right)
        body = And(And(Atom(pi_name(i), z, z1), Atom(f.pred, z1, z2)), Atom(pi_name(j), z, z2))
        return Exists(z1, Exists(z2, body))
    if isinstance(f, Eq):
        i, j = unit.index(f.left), unit.index(f.right)
        return Exists(z1, And(Atom(pi_name(i), z, z1), Atom(pi_name(j), z, z1)))
    if isinstance(f, Not):
        return Not(t_z_k(f.sub, unit, z))
    if isinstance(f, And):
        return And(t_z_k(f.left, unit, z), t_z_k(f.right, unit, z))
    if isinstance(f, Exists):
        i = unit.index(f.var)
        return Exists(z1, And(Atom(q_name(i), z, z1), t_z_k(f.sub, unit, z1)))
    _binary_only(f)
    raise TypeError(f)


def fo_to_fo3(f: fo.Formula) -> fo.Formula:
    """``(⋀ Γ'^(k)) → T_x1^(k)(f)`` with k = max(3, |V(f)|)."""
    unit = TranslationUnit.of(f, min_k=3)
    return Implies(fo.conjoin(gamma_fo3(unit.k, unit.sigma_used)), t_z_k(f, unit, X1))


# --- equality and arity elimination -------------------------------------------------


def _fresh_symbol(base: str, used: set[str]) -> str:
    name, n = base, 1
    while name in used:
        name = f"{base}_{n}"
        n += 1
    return name


def _fresh_vars(existing: Iterable[str], count: int) -> list[str]:
    existing = sorted(set(existing))
    out = list(existing[:count])
    candidates = ["x", "y", "z"] + [f"v{i}" for i in range(1, count + 4)]
    for c in candidates:
        if len(out) == count:
            break
        if c not in out and c not in existing:
            out.append(c)
    return out


def _replace_eq(f: fo.Formula, e: str) -> fo.Formula:
    if isinstance(f, Eq):
        return Atom(e, f.left, f.right)
    if isinstance(f, Not):
        return Not(_replace_eq(f.sub, e))
    if isinstance(f, And):
        return And(_replace_eq(f.left, e), _replace_eq(f.right, e))
    if isinstance(f, Exists):
        return Exists(f.var, _replace_eq(f.sub, e))
    return f


def equality_axioms(e: str, preds: Iterable[str], variables: Sequence[str]) -> list[fo.Formula]:
    """``e`` is an equivalence and a congruence for each of ``preds``,
    written with the three given variable names."""
    x, y, z = variables
    E = lambda u, v: Atom(e, u, v)  # noqa: E731
    out = [
        Forall(x, E(x, x)),
        Forall(x, Forall(y, Implies(E(x, y), E(y, x)))),
        Forall(x, Forall(y, Forall(z, Implies(And(E(x, y), E(y, z)), E(x, z))))),
    ]
    for a in sorted(set(preds)):
        out.append(Forall(x, Forall(y, Forall(z, Implies(E(x, y), Iff(Atom(a, x, z), Atom(a, y, z)))))))
        out.append(Forall(x, Forall(y, Forall(z, Implies(E(y, z), Iff(Atom(a, x, y), Atom(a, x, z)))))))
    return out


@dataclass(frozen=True)
class EqualityElimination:
    formula: fo.Formula
    e_name: str
    axioms: tuple


def eliminate_equality_full(f: fo.Formula, mode: str = "validity", e_name_hint: str = "E") -> EqualityElimination:
    if mode not in ("validity", "satisfiability"):
        raise ValueError(f"unknown mode {mode!r}")
    variables = fo.vars_of(f)
    if len(variables) > 3:
        raise TranslationError(f"equality elimination needs at most 3 variables, found {len(variables)}")
    preds = fo.predicates_of(f)
    e = _fresh_symbol(e_name_hint, set(preds))
    axioms = equality_axioms(e, preds, _fresh_vars(variables, 3))
    body = _replace_eq(f, e)
    ax = fo._balanced(axioms, And)
    out = Implies(ax, body) if mode == "validity" else And(ax, body)
    return EqualityElimination(out, e, tuple(axioms))


def eliminate_equality(f: fo.Formula, mode: str = "validity") -> fo.Formula:
    """Equality-free FO3 formula: ``axioms → f[E/=]`` (validity form) or
    ``axioms ∧ f[E/=]`` (satisfiability form), E a fresh predicate."""
    return eliminate_equality_full(f, mode).formula


def arity_reduce(f: fo.Formula) -> fo.Formula:
    """Replace each non-binary atom ``a(x1..xn)`` by
    ``∃z (p1(z,x1) ∧ ... ∧ pn(z,xn) ∧ a'(z,z))``."""
    preds = set(fo.predicates_of(f))
    variables = fo.vars_of(f)
    z = _fresh_symbol("z", set(variables))
    nary = {}

    def collect(g):
        if isinstance(g, NAtom):
            if not g.args:
                raise TranslationError(f"nullary atom {g.pred!r} is not supported")
            nary[g.pred] = max(nary.get(g.pred, 0), len(g.args))
        elif isinstance(g, Not):
            collect(g.sub)
        elif isinstance(g, And):
            collect(g.left)
            collect(g.right)
        elif isinstance(g, Exists):
            collect(g.sub)

    collect(f)
    used = set(preds)
    renamed = {}
    for a in sorted(nary):
        name = a + "'"
        while name in used:
            name += "'"
        used.add(name)
        renamed[a] = name
    base = "p"
    width = max(nary.values(), default=0)
    while any(f"{base}{j}" in used for j in range(1, width + 1)):
        base += "p"

    def go(g):
        if isinstance(g, NAtom):
            out = Atom(f"{base}1", z, g.args[0])
            for j, arg in enumerate(g.args[1:], start=2):
                out = And(out, Atom(f"{base}{j}", z, arg))
            return Exists(z, And(out, Atom(renamed[g.pred], z, z)))
        if isinstance(g, Not):
            return Not(go(g.sub))
        if isinstance(g, And):
            return And(go(g.left), go(g.right))
        if isinstance(g, Exists):
            return Exists(g.var, go(g.sub))
        return g

    return go(f)
