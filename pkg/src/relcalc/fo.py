"""First-order logic with equality over binary predicates.

The AST has five core constructors (:class:`Atom`, :class:`Eq`, :class:`Not`,
:class:`And`, :class:`Exists`).  Disjunction, implication, biconditional,
universal quantification, ``true`` and ``false`` are abbreviations and are
expanded by the parser.  :class:`NAtom` is an extension node used only by the
arity-reduction front end.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import ParseError, TranslationError

#: reserved bound variable of ``true``; never a user variable
TRUE_VAR = "_t"

_VAR_RE = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class Atom:
    pred: str
    left: str
    right: str


@dataclass(frozen=True)
class NAtom:
    """Predicate atom of arbitrary arity (input of ``arity_reduce`` only)."""

    pred: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq:
    left: str
    right: str


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    sub: "Formula"


Formula = Union[Atom, NAtom, Eq, Not, And, Exists]


# --- abbreviations -------------------------------------------------------


def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Or(Not(left), right)


def Iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))


def Forall(var: str, sub: Formula) -> Formula:
    return Not(Exists(var, Not(sub)))


def true(var: str = TRUE_VAR) -> Formula:
    return Exists(var, Eq(var, var))


def false(var: str = TRUE_VAR) -> Formula:
    return Not(true(var))


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Conjunction of a finite set, ordered by printed form.

    The fold is balanced so that very large conjunctions stay shallow.
    An empty set yields ``true``.
    """
    items = sorted(set(formulas), key=print_fo)
    if not items:
        return true()
    return _balanced(items, And)


def _balanced(items, op):
    if len(items) == 1:
        return items[0]
    mid = len(items) // 2
    return op(_balanced(items[:mid], op), _balanced(items[mid:], op))


# --- measures and variable analysis --------------------------------------


def iter_nodes(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal, left before right.

    Iterative, so that long quantifier prefixes cannot exhaust the stack.
    """
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        if isinstance(g, (Not, Exists)):
            stack.append(g.sub)
        elif isinstance(g, And):
            stack.append(g.right)
            stack.append(g.left)
        elif not isinstance(g, (Atom, NAtom, Eq)):
            raise TypeError(g)


def size_fo(f: Formula) -> int:
    total = 0
    for g in iter_nodes(f):
        if isinstance(g, (Atom, Eq)):
            total += 3
        elif isinstance(g, NAtom):
            total += 1 + len(g.args)
        elif isinstance(g, Exists):
            total += 2
        else:
            total += 1
    return total


def vars_of(f: Formula) -> frozenset[str]:
    return frozenset(_iter_vars(f))


def _iter_vars(f: Formula) -> Iterator[str]:
    for g in iter_nodes(f):
        if isinstance(g, (Atom, Eq)):
            yield g.left
            yield g.right
        elif isinstance(g, NAtom):
            yield from g.args
        elif isinstance(g, Exists):
            yield g.var


def vars_in_order(f: Formula) -> list[str]:
    """Variables of ``f`` by first occurrence (binders count where they appear)."""
    return list(dict.fromkeys(_iter_vars(f)))


def free_vars_of(f: Formula) -> frozenset[str]:
    out: set[str] = set()
    stack: list[tuple[Formula, frozenset]] = [(f, frozenset())]
    while stack:
        g, bound = stack.pop()
        if isinstance(g, (Atom, Eq)):
            out.update(v for v in (g.left, g.right) if v not in bound)
        elif isinstance(g, NAtom):
            out.update(v for v in g.args if v not in bound)
        elif isinstance(g, Not):
            stack.append((g.sub, bound))
        elif isinstance(g, And):
            stack.append((g.left, bound))
            stack.append((g.right, bound))
        elif isinstance(g, Exists):
            stack.append((g.sub, bound | {g.var}))
        else:
            raise TypeError(g)
    return frozenset(out)


def predicates_of(f: Formula) -> frozenset[str]:
    return frozenset(g.pred for g in iter_nodes(f) if isinstance(g, (Atom, NAtom)))


def uses_equality(f: Formula) -> bool:
    return any(isinstance(g, Eq) for g in iter_nodes(f))


def is_fok(f: Formula, k: int) -> bool:
    return len(vars_of(f)) <= k


def rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free occurrences; the caller guarantees no capture."""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return Atom(f.pred, mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, NAtom):
        return NAtom(f.pred, tuple(mapping.get(a, a) for a in f.args))
    if isinstance(f, Eq):
        return Eq(mapping.get(f.left, f.left), mapping.get(f.right, f.right))
    if isinstance(f, Not):
        return Not(rename_free(f.sub, mapping))
    if isinstance(f, And):
        return And(rename_free(f.left, mapping), rename_free(f.right, mapping))
    if isinstance(f, Exists):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return Exists(f.var, rename_free(f.sub, inner))
    raise TypeError(f)


# --- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|[!&|().,=])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    """,
    re.VERBOSE,
)

_KEYWORDS = {"exists", "forall", "true", "false"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str, line_col) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", *line_col(pos))
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


def _line_col_of(text: str):
    def line_col(pos: int) -> tuple[int, int]:
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        return line, col

    return line_col


class _FoParser:
    def __init__(self, text: str, nary: bool):
        self.line_col = _line_col_of(text)
        self.tokens = tokenize(text, self.line_col)
        self.i = 0
        self.nary = nary

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(msg, *self.line_col(tok.pos))

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            if tok.kind == "eof":
                raise self.error(f"expected {text!r} but input ended")
            raise self.error(f"expected {text!r}, found {tok.text!r}")
        return self.advance()

    def var(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected a variable, found {tok.text or 'end of input'!r}")
        if tok.text in _KEYWORDS:
            raise self.error(f"keyword {tok.text!r} used as a variable")
        if not (_VAR_RE.match(tok.text) or tok.text == TRUE_VAR):
            raise self.error(f"malformed variable name {tok.text!r}")
        return self.advance().text

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok.kind != "eof":
            if tok.text == ")":
                raise self.error("unbalanced parentheses: unexpected ')'")
            raise self.error(f"unexpected token {tok.text!r}")
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.peek().text == "<->":
            self.advance()
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disj()
        if self.peek().text == "->":
            self.advance()
            return Implies(f, self.implies())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek().text == "|":
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek().text == "&":
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.text == "!":
            self.advance()
            return Not(self.unary())
        if tok.kind == "ident" and tok.text in ("exists", "forall"):
            # read a whole run of quantifiers before the shared body
            binders = []
            while self.peek().kind == "ident" and self.peek().text in ("exists", "forall"):
                kind = self.advance().text
                binders.append((kind, self.var()))
                self.expect(".")
            body = self.iff()
            for kind, v in reversed(binders):
                body = Exists(v, body) if kind == "exists" else Forall(v, body)
            return body
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok.text == "(":
            self.advance()
            f = self.iff()
            if self.peek().text != ")":
                raise self.error("unbalanced parentheses: missing ')'", tok)
            self.advance()
            return f
        if tok.kind == "ident" and tok.text == "true":
            self.advance()
            return true()
        if tok.kind == "ident" and tok.text == "false":
            self.advance()
            return false()
        if tok.kind != "ident":
            raise self.error(f"unexpected token {tok.text or 'end of input'!r}")
        if self.tokens[self.i + 1].text == "(":
            return self.atom()
        left = self.var()
        self.expect("=")
        return Eq(left, self.var())

    def atom(self) -> Formula:
        name_tok = self.advance()
        if name_tok.text in _KEYWORDS:
            raise self.error(f"keyword {name_tok.text!r} used as a predicate", name_tok)
        open_tok = self.expect("(")
        args = [self.var()]
        while self.peek().text == ",":
            self.advance()
            args.append(self.var())
        if self.peek().text != ")":
            raise self.error("unbalanced parentheses: missing ')'", open_tok)
        self.advance()
        if len(args) == 2:
            return Atom(name_tok.text, args[0], args[1])
        if not self.nary:
            raise self.error(
                f"predicate {name_tok.text!r} applied to {len(args)} arguments; only binary atoms are allowed",
                name_tok,
            )
        return NAtom(name_tok.text, tuple(args))


def parse_fo(text: str, nary: bool = False) -> Formula:
    """Parse the FO text grammar into a core AST.

    With ``nary=True`` atoms of any positive arity are accepted; non-binary
    ones become :class:`NAtom`.
    """
    return _FoParser(text, nary).parse()


# --- printing ----------------------------------------------------------------

# binding strength for the printer; quantifiers bind loosest
_PREC_IFF, _PREC_IMP, _PREC_OR, _PREC_AND, _PREC_NOT = 1, 2, 3, 4, 5


def _match_true(f: Formula) -> bool:
    return (
        isinstance(f, Exists)
        and f.var == TRUE_VAR
        and isinstance(f.sub, Eq)
        and f.sub.left == TRUE_VAR
        and f.sub.right == TRUE_VAR
    )


def _match_or(f: Formula):
    if isinstance(f, Not) and isinstance(f.sub, And):
        a, b = f.sub.left, f.sub.right
        if isinstance(a, Not) and isinstance(b, Not):
            return a.sub, b.sub
    return None


def _match_forall(f: Formula):
    if isinstance(f, Not) and isinstance(f.sub, Exists) and isinstance(f.sub.sub, Not):
        return f.sub.var, f.sub.sub.sub
    return None


def print_fo(f: Formula) -> str:
    """Concrete syntax; ``parse_fo(print_fo(f)) == f`` for every AST."""
    text, _, _ = _pr(f)
    return text


def _pr(f: Formula) -> tuple[str, int, bool]:
    """Return (text, precedence, open) where open means a quantifier scope
    reaches the right end of the text."""
    if isinstance(f, Atom):
        return f"{f.pred}({f.left},{f.right})", 9, False
    if isinstance(f, NAtom):
        return f"{f.pred}({','.join(f.args)})", 9, False
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}", 9, False
    if _match_true(f):
        return "true", 9, False
    if isinstance(f, Not) and _match_true(f.sub):
        return "false", 9, False
    if _match_forall(f) is not None or isinstance(f, Exists):
        prefix = []
        while True:
            fa = _match_forall(f)
            if fa is not None:
                prefix.append(f"forall {fa[0]}. ")
                f = fa[1]
            elif isinstance(f, Exists) and not _match_true(f):
                prefix.append(f"exists {f.var}. ")
                f = f.sub
            else:
                break
        body, _, _ = _pr(f)
        return "".join(prefix) + body, 0, True
    disj = _match_or(f)
    if disj is not None:
        left, _ = _operand(disj[0], _PREC_OR + 1)
        right, is_open = _operand(disj[1], _PREC_OR, last=True)
        return f"{left} | {right}", _PREC_OR, is_open
    if isinstance(f, Not):
        inner, is_open = _operand(f.sub, _PREC_NOT, last=True)
        return f"!{inner}", _PREC_NOT, is_open
    if isinstance(f, And):
        left, _ = _operand(f.left, _PREC_AND)
        right, is_open = _operand(f.right, _PREC_AND + 1, last=True)
        return f"{left} & {right}", _PREC_AND, is_open
    raise TypeError(f)


def _operand(f: Formula, min_prec: int, last: bool = False) -> tuple[str, bool]:
    """Operand text plus whether a quantifier scope stays open at its end."""
    text, prec, is_open = _pr(f)
    if prec == 0:
        # a quantifier may only extend to the end in final position
        return (text, True) if last else (f"({text})", False)
    if prec < min_prec or (is_open and not last):
        return f"({text})", False
    return text, is_open


# --- prenex normal form ------------------------------------------------------


@dataclass(frozen=True)
class _Lit:
    atom: Formula  # Atom, NAtom or Eq
    positive: bool


@dataclass(frozen=True)
class _Junction:
    kind: str  # "and" | "or"
    children: tuple


@dataclass(frozen=True)
class _Quant:
    kind: str  # "E" | "A"
    var: str
    body: object


def _rename_apart(f: Formula, used: set[str], scope: dict[str, str], bases: dict[str, str]) -> Formula:
    if isinstance(f, (Atom, NAtom, Eq)):
        return rename_free(f, scope)
    if isinstance(f, Not):
        return Not(_rename_apart(f.sub, used, scope, bases))
    if isinstance(f, And):
        return And(_rename_apart(f.left, used, scope, bases), _rename_apart(f.right, used, scope, bases))
    if isinstance(f, Exists):
        new = f.var
        n = 0
        while new in used:
            n += 1
            new = f"{f.var}_{n}"
        used.add(new)
        bases[new] = f.var
        return Exists(new, _rename_apart(f.sub, used, {**scope, f.var: new}, bases))
    raise TypeError(f)


def _nnf(f: Formula, positive: bool = True):
    if isinstance(f, (Atom, NAtom, Eq)):
        return _Lit(f, positive)
    if isinstance(f, Not):
        return _nnf(f.sub, not positive)
    if isinstance(f, And):
        kind = "and" if positive else "or"
        parts = []
        for child in (_nnf(f.left, positive), _nnf(f.right, positive)):
            if isinstance(child, _Junction) and child.kind == kind:
                parts.extend(child.children)
            else:
                parts.append(child)
        return _Junction(kind, tuple(parts))
    if isinstance(f, Exists):
        return _Quant("E" if positive else "A", f.var, _nnf(f.sub, positive))
    raise TypeError(f)


def _rename_nnf(node, old: str, new: str):
    if isinstance(node, _Lit):
        return _Lit(rename_free(node.atom, {old: new}), node.positive)
    if isinstance(node, _Junction):
        return _Junction(node.kind, tuple(_rename_nnf(c, old, new) for c in node.children))
    if isinstance(node, _Quant):
        return _Quant(node.kind, node.var, _rename_nnf(node.body, old, new))
    raise TypeError(node)


def _pull(node, rank: dict[str, int], bases: dict[str, str]):
    """Return (prefix, matrix) with prefix a list of (kind, var)."""
    if isinstance(node, _Lit):
        return [], node
    if isinstance(node, _Quant):
        prefix, matrix = _pull(node.body, rank, bases)
        return [(node.kind, node.var)] + prefix, matrix
    mergeable = "E" if node.kind == "or" else "A"
    pulled = [_pull(c, rank, bases) for c in node.children]
    prefixes = [p for p, _ in pulled]
    matrices = [m for _, m in pulled]
    heads = [0] * len(pulled)
    out = []

    def entry(idx):
        kind, var = prefixes[idx][heads[idx]]
        return (rank[bases[var]], 0 if kind == "E" else 1, idx)

    heap = [entry(i) for i in range(len(pulled)) if prefixes[i]]
    heapq.heapify(heap)

    def advance(idx):
        heads[idx] += 1
        if heads[idx] < len(prefixes[idx]):
            heapq.heappush(heap, entry(idx))

    while heap:
        r, flag, best = heapq.heappop(heap)
        kind, var = prefixes[best][heads[best]]
        out.append((kind, var))
        advance(best)
        if kind != mergeable:
            continue
        # distribution law: same-variable quantifiers of the dual kind merge;
        # they share the rank and kind of ``best`` so they sit on top of the heap
        while heap and heap[0][:2] == (r, flag):
            _, _, j = heapq.heappop(heap)
            v2 = prefixes[j][heads[j]][1]
            matrices[j] = _rename_nnf(matrices[j], v2, var)
            advance(j)
    flat = []
    for m in matrices:
        if isinstance(m, _Junction) and m.kind == node.kind:
            flat.extend(m.children)
        else:
            flat.append(m)
    return out, _Junction(node.kind, tuple(flat))


def _from_nnf(node) -> Formula:
    if isinstance(node, _Lit):
        return node.atom if node.positive else Not(node.atom)
    if isinstance(node, _Junction):
        parts = [_from_nnf(c) for c in node.children]
        return _balanced(parts, And if node.kind == "and" else Or)
    raise TypeError(node)


def prenex(f: Formula, var_order: Sequence[str]) -> Formula:
    """Prenex normal form with quantifiers pulled in ``var_order`` order.

    Bound variables are renamed apart first (suffixes ``_1``, ``_2``, ...);
    renamed copies inherit the position of the original name in
    ``var_order``.  Whenever same-named existentials meet under a disjunction
    (or universals under a conjunction) they are merged into one quantifier.
    """
    if free_vars_of(f):
        raise TranslationError(f"prenex expects a sentence; free variables {sorted(free_vars_of(f))}")
    bases: dict[str, str] = {}
    renamed = _rename_apart(f, set(), {}, bases)
    rank = {v: i for i, v in enumerate(var_order)}
    missing = sorted({b for b in bases.values() if b not in rank})
    if missing:
        raise TranslationError(f"var_order is missing quantified variables {missing}")
    prefix, matrix = _pull(_nnf(renamed), rank, bases)
    out = _from_nnf(matrix)
    for kind, var in reversed(prefix):
        out = Exists(var, out) if kind == "E" else Forall(var, out)
    return out


# --- prefix classes ------------------------------------------------------------


@dataclass(frozen=True)
class PrefixClass:
    quantifier_prefix: tuple[tuple[str, str], ...]
    max_predicate_arity: int
    uses_equality: bool
    uses_functions: bool = False

    @property
    def pattern(self) -> str:
        """Run-length prefix pattern such as ``∀³∃²``."""
        sup = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
        runs: list[list] = []
        for q, _ in self.quantifier_prefix:
            if runs and runs[-1][0] == q:
                runs[-1][1] += 1
            else:
                runs.append([q, 1])
        return "".join(q + (str(n).translate(sup) if n > 1 else "") for q, n in runs)


def _contains_exists(f: Formula) -> bool:
    return any(isinstance(g, Exists) for g in iter_nodes(f))


def _max_arity(f: Formula) -> int:
    arities = [2 if isinstance(g, Atom) else len(g.args) for g in iter_nodes(f) if isinstance(g, (Atom, NAtom))]
    return max(arities, default=0)


def classify_prefix(f: Formula) -> PrefixClass:
    """Read off the quantifier prefix of a prenex formula.

    ``¬∃x`` is read as ``∀x¬`` and double negations are transparent.
    Raises :class:`TranslationError` when a quantifier remains in the matrix.
    """
    prefix = []
    node, negated = f, False
    while True:
        if isinstance(node, Not):
            node, negated = node.sub, not negated
        elif isinstance(node, Exists):
            prefix.append(("∀" if negated else "∃", node.var))
            node = node.sub
        else:
            break
    if _contains_exists(node):
        raise TranslationError("formula is not in prenex form")
    return PrefixClass(tuple(prefix), _max_arity(f), uses_equality(f))


def in_godel_class(pc: PrefixClass, form: str = "forall") -> bool:
    """Membership in [∀³∃*, (0, ω), (0)] (``form="forall"``) or its dual
    [∃³∀*, (0, ω), (0)] (``form="exists"``).

    Prefixes with fewer than three leading quantifiers are accepted: vacuous
    quantifiers can always pad them.
    """
    lead, tail = ("∀", "∃") if form == "forall" else ("∃", "∀")
    qs = [q for q, _ in pc.quantifier_prefix]
    n_lead = 0
    while n_lead < len(qs) and qs[n_lead] == lead:
        n_lead += 1
    if n_lead > 3 or any(q != tail for q in qs[n_lead:]):
        return False
    return pc.max_predicate_arity <= 2 and not pc.uses_equality and not pc.uses_functions
