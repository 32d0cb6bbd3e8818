"""Terms and quantifier-free formulas of the calculus of relations.

Core term constructors: relation variables, identity, complement,
intersection, composition and converse.  Union, dagger, top, bottom and
inequations are derived and expanded at construction time; the printer
re-sugars them when the core pattern matches exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

from .errors import ParseError


@dataclass(frozen=True)
class RelVar:
    name: str


@dataclass(frozen=True)
class Id:
    pass


@dataclass(frozen=True)
class Comp:
    sub: "Term"


@dataclass(frozen=True)
class Inter:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Dot:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Conv:
    sub: "Term"


Term = Union[RelVar, Id, Comp, Inter, Dot, Conv]


@dataclass(frozen=True)
class Equation:
    left: Term
    right: Term


@dataclass(frozen=True)
class QNot:
    sub: "QfFormula"


@dataclass(frozen=True)
class QAnd:
    left: "QfFormula"
    right: "QfFormula"


QfFormula = Union[Equation, QNot, QAnd]

I = Id()


def union(t: Term, s: Term) -> Term:
    return Comp(Inter(Comp(t), Comp(s)))


def dagger(t: Term, s: Term) -> Term:
    return Comp(Dot(Comp(t), Comp(s)))


TOP: Term = union(I, Comp(I))
BOT: Term = Comp(TOP)


def leq(t: Term, s: Term) -> Equation:
    return Equation(union(t, s), s)


def q_or(p: QfFormula, q: QfFormula) -> QfFormula:
    return QNot(QAnd(QNot(p), QNot(q)))


def q_implies(p: QfFormula, q: QfFormula) -> QfFormula:
    return q_or(QNot(p), q)


def dots(*terms: Term) -> Term:
    """Left-associated composition ``t1 · t2 · ... · tn``."""
    out = terms[0]
    for t in terms[1:]:
        out = Dot(out, t)
    return out


def intersect_all(terms: Sequence[Term]) -> Term:
    """Balanced intersection in the given order (``TOP`` when empty)."""
    if not terms:
        return TOP
    if len(terms) == 1:
        return terms[0]
    mid = len(terms) // 2
    return Inter(intersect_all(terms[:mid]), intersect_all(terms[mid:]))


def union_all(terms: Sequence[Term]) -> Term:
    """Balanced union in the given order (``BOT`` when empty)."""
    if not terms:
        return BOT
    if len(terms) == 1:
        return terms[0]
    mid = len(terms) // 2
    return union(union_all(terms[:mid]), union_all(terms[mid:]))


def q_conjoin(formulas: Iterable[QfFormula]) -> QfFormula:
    """Conjunction of a finite set ordered by printed form (balanced fold)."""
    items = sorted(set(formulas), key=print_cor)
    if not items:
        return Equation(I, I)

    def fold(xs):
        if len(xs) == 1:
            return xs[0]
        mid = len(xs) // 2
        return QAnd(fold(xs[:mid]), fold(xs[mid:]))

    return fold(items)


# --- pattern views -------------------------------------------------------------


def match_union(t: Term):
    if isinstance(t, Comp) and isinstance(t.sub, Inter):
        a, b = t.sub.left, t.sub.right
        if isinstance(a, Comp) and isinstance(b, Comp):
            return a.sub, b.sub
    return None


def match_dagger(t: Term):
    if isinstance(t, Comp) and isinstance(t.sub, Dot):
        a, b = t.sub.left, t.sub.right
        if isinstance(a, Comp) and isinstance(b, Comp):
            return a.sub, b.sub
    return None


def match_leq(e: Equation):
    u = match_union(e.left)
    if u is not None and u[1] == e.right:
        return u[0], e.right
    return None


# --- measures ----------------------------------------------------------------


def size_term(t: Term) -> int:
    if isinstance(t, (RelVar, Id)):
        return 1
    if isinstance(t, (Comp, Conv)):
        return 1 + size_term(t.sub)
    if isinstance(t, (Inter, Dot)):
        return 1 + size_term(t.left) + size_term(t.right)
    raise TypeError(t)


def size_qf(f: QfFormula) -> int:
    if isinstance(f, Equation):
        return 1 + size_term(f.left) + size_term(f.right)
    if isinstance(f, QNot):
        return 1 + size_qf(f.sub)
    if isinstance(f, QAnd):
        return 1 + size_qf(f.left) + size_qf(f.right)
    raise TypeError(f)


def relvars_of(x: Term | QfFormula) -> frozenset[str]:
    return frozenset(_iter_relvars(x))


def _iter_relvars(x) -> Iterator[str]:
    if isinstance(x, RelVar):
        yield x.name
    elif isinstance(x, Id):
        return
    elif isinstance(x, (Comp, Conv, QNot)):
        yield from _iter_relvars(x.sub)
    elif isinstance(x, (Inter, Dot, Equation, QAnd)):
        yield from _iter_relvars(x.left)
        yield from _iter_relvars(x.right)
    else:
        raise TypeError(x)


def subterms(t: Term) -> Iterator[Term]:
    """Post-order traversal (children before parents), with repeats."""
    if isinstance(t, (Comp, Conv)):
        yield from subterms(t.sub)
    elif isinstance(t, (Inter, Dot)):
        yield from subterms(t.left)
        yield from subterms(t.right)
    yield t


def find_conv_or_id(x: Term | QfFormula, allow_constants: bool = True):
    """First converse or identity occurrence, skipping ``top``/``bot``
    patterns when ``allow_constants``; ``None`` if there is none."""
    if isinstance(x, Equation):
        return find_conv_or_id(x.left, allow_constants) or find_conv_or_id(x.right, allow_constants)
    if isinstance(x, QNot):
        return find_conv_or_id(x.sub, allow_constants)
    if isinstance(x, QAnd):
        return find_conv_or_id(x.left, allow_constants) or find_conv_or_id(x.right, allow_constants)
    if allow_constants and (x == TOP or x == BOT):
        return None
    if isinstance(x, (Id, Conv)):
        return x
    if isinstance(x, Comp):
        return find_conv_or_id(x.sub, allow_constants)
    if isinstance(x, (Inter, Dot)):
        return find_conv_or_id(x.left, allow_constants) or find_conv_or_id(x.right, allow_constants)
    return None


# --- parsing -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op>/\\|<=|\^c|\^T|[;#&|()=!])
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_CONSTANTS = {"id": I, "top": TOP, "bot": BOT}


class _CorParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN_RE.match(text, pos)
            if m is None:
                raise self._error_at(f"unexpected character {text[pos]!r}", pos)
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), pos))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0

    def _error_at(self, msg: str, pos: int) -> ParseError:
        line = self.text.count("\n", 0, pos) + 1
        col = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        return ParseError(msg, line, col)

    def error(self, msg: str) -> ParseError:
        return self._error_at(msg, self.tokens[self.i][2])

    def peek(self) -> str:
        return self.tokens[self.i][1]

    def advance(self) -> str:
        tok = self.tokens[self.i][1]
        self.i += 1
        return tok

    def at_eof(self) -> bool:
        return self.tokens[self.i][0] == "eof"

    def finish(self):
        if not self.at_eof():
            if self.peek() == ")":
                raise self.error("unbalanced parentheses: unexpected ')'")
            raise self.error(f"unexpected token {self.peek()!r}")

    # formulas
    def formula(self) -> QfFormula:
        f = self.formula_unary()
        while self.peek() == "/\\":
            self.advance()
            f = QAnd(f, self.formula_unary())
        return f

    def formula_unary(self) -> QfFormula:
        if self.peek() == "!":
            self.advance()
            return QNot(self.formula_unary())
        start = self.i
        try:
            left = self.term()
            op = self.peek()
            if op in ("=", "<="):
                self.advance()
                right = self.term()
                return Equation(left, right) if op == "=" else leq(left, right)
            raise self.error(f"expected '=' or '<=', found {op or 'end of input'!r}")
        except ParseError as term_error:
            self.i = start
            if self.peek() != "(":
                raise term_error
            self.advance()
            f = self.formula()
            if self.peek() != ")":
                raise self.error("unbalanced parentheses: missing ')'")
            self.advance()
            return f

    # terms
    def term(self) -> Term:
        t = self.term_inter()
        while self.peek() == "|":
            self.advance()
            t = union(t, self.term_inter())
        return t

    def term_inter(self) -> Term:
        t = self.term_dot()
        while self.peek() == "&":
            self.advance()
            t = Inter(t, self.term_dot())
        return t

    def term_dot(self) -> Term:
        t = self.term_postfix()
        while self.peek() in (";", "#"):
            op = self.advance()
            rhs = self.term_postfix()
            t = Dot(t, rhs) if op == ";" else dagger(t, rhs)
        return t

    def term_postfix(self) -> Term:
        t = self.term_atom()
        while self.peek() in ("^c", "^T"):
            t = Comp(t) if self.advance() == "^c" else Conv(t)
        return t

    def term_atom(self) -> Term:
        kind, text, _ = self.tokens[self.i]
        if text == "(":
            self.advance()
            t = self.term()
            if self.peek() != ")":
                raise self.error("unbalanced parentheses: missing ')'")
            self.advance()
            return t
        if kind == "ident":
            self.advance()
            return _CONSTANTS.get(text) or RelVar(text)
        raise self.error(f"unexpected token {text or 'end of input'!r}")


def parse_term(text: str) -> Term:
    p = _CorParser(text)
    t = p.term()
    p.finish()
    return t


def parse_qf(text: str) -> QfFormula:
    p = _CorParser(text)
    f = p.formula()
    p.finish()
    return f


def parse_cor(text: str) -> Term | QfFormula:
    """Parse a term, or a quantifier-free formula if the text has ``=``/``<=``."""
    p = _CorParser(text)
    if any(tok[1] in ("=", "<=") for tok in p.tokens):
        return parse_qf(text)
    return parse_term(text)


# --- printing ----------------------------------------------------------------

_P_UNION, _P_INTER, _P_DOT, _P_POST, _P_ATOM = 1, 2, 3, 4, 5


def _pt(t: Term) -> tuple[str, int]:
    if isinstance(t, RelVar):
        return t.name, _P_ATOM
    if isinstance(t, Id):
        return "id", _P_ATOM
    if t == TOP:
        return "top", _P_ATOM
    if t == BOT:
        return "bot", _P_ATOM
    # a complemented constant reads better as ``(top & top)^c`` than as a
    # union of two unfolded bottoms
    plain = isinstance(t, Comp) and isinstance(t.sub, (Inter, Dot)) and not _has_constant_operand(t.sub)
    u = match_union(t) if plain else None
    if u is not None:
        return f"{_wrap(u[0], _P_UNION)} | {_wrap(u[1], _P_INTER)}", _P_UNION
    d = match_dagger(t) if plain else None
    if d is not None:
        return f"{_wrap(d[0], _P_DOT)} # {_wrap(d[1], _P_POST)}", _P_DOT
    if isinstance(t, Comp):
        return f"{_wrap(t.sub, _P_POST)}^c", _P_POST
    if isinstance(t, Conv):
        return f"{_wrap(t.sub, _P_POST)}^T", _P_POST
    if isinstance(t, Inter):
        return f"{_wrap(t.left, _P_INTER)} & {_wrap(t.right, _P_DOT)}", _P_INTER
    if isinstance(t, Dot):
        return f"{_wrap(t.left, _P_DOT)} ; {_wrap(t.right, _P_POST)}", _P_DOT
    raise TypeError(t)


def _has_constant_operand(t: Term) -> bool:
    return any(x == TOP or x == BOT for x in (t.left, t.right))


def _wrap(t: Term, min_prec: int) -> str:
    text, prec = _pt(t)
    return f"({text})" if prec < min_prec else text


def _pf(f: QfFormula, operand: bool = False) -> str:
    if isinstance(f, Equation):
        m = match_leq(f)
        if m is not None:
            return f"{_pt(m[0])[0]} <= {_pt(m[1])[0]}"
        return f"{_pt(f.left)[0]} = {_pt(f.right)[0]}"
    if isinstance(f, QNot):
        return f"!{_pf(f.sub, operand=True)}"
    if isinstance(f, QAnd):
        text = f"{_pf(f.left)} /\\ {_pf(f.right, operand=True)}"
        return f"({text})" if operand else text
    raise TypeError(f)


def print_cor(x: Term | QfFormula) -> str:
    if isinstance(x, (Equation, QNot, QAnd)):
        return _pf(x)
    return _pt(x)[0]


# --- Σ2 normal form shape ------------------------------------------------------


@dataclass(frozen=True)
class Sigma2Shape:
    gamma: frozenset
    residual: str


@dataclass(frozen=True)
class Sigma2Rejection:
    reason: str
    subterm: object = None

    def __bool__(self) -> bool:
        return False


def _is_var(t: Term) -> bool:
    return isinstance(t, RelVar)


def template_of(t: Term) -> str | None:
    """Name of the normal-form template ``t`` matches, if any."""
    if not isinstance(t, Inter):
        return None
    b, rest = t.left, t.right
    if _is_var(b) and _is_var(rest):
        return "b&c"
    if isinstance(b, Comp) and isinstance(rest, Comp) and _is_var(b.sub) and _is_var(rest.sub):
        return "b^c&c^c"
    if not _is_var(b):
        return None
    d = match_dagger(rest)
    if d is not None and _is_var(d[0]) and _is_var(d[1]):
        return "b&(c#d)"
    if isinstance(rest, Dot) and _is_var(rest.left) and _is_var(rest.right):
        return "b&(c;d)"
    if isinstance(rest, Inter) and _is_var(rest.left) and _is_var(rest.right):
        return "b&(c&d)"
    return None


def _split_union(t: Term) -> list[Term]:
    out, stack = [], [t]
    while stack:
        cur = stack.pop()
        u = match_union(cur)
        if u is not None and cur not in (TOP, BOT):
            stack.append(u[1])
            stack.append(u[0])
        else:
            out.append(cur)
    return out


def check_sigma2(f: QfFormula) -> Sigma2Shape | Sigma2Rejection:
    """Accept exactly ``(top ; (U Γ) ; top) | a = top`` with every member of Γ
    matching one of the five templates."""
    if not isinstance(f, Equation):
        return Sigma2Rejection("not a single equation", f)
    if f.right != TOP:
        return Sigma2Rejection("right-hand side is not top", f.right)
    u = match_union(f.left)
    if u is None:
        return Sigma2Rejection("left-hand side is not a union", f.left)
    skeleton, residual = u
    if not _is_var(residual):
        return Sigma2Rejection("residual is not a relation variable", residual)
    inner = None
    if isinstance(skeleton, Dot) and skeleton.right == TOP:
        if isinstance(skeleton.left, Dot) and skeleton.left.left == TOP:
            inner = skeleton.left.right
    elif isinstance(skeleton, Dot) and skeleton.left == TOP:
        if isinstance(skeleton.right, Dot) and skeleton.right.right == TOP:
            inner = skeleton.right.left
    if inner is None:
        return Sigma2Rejection("missing top ; _ ; top skeleton", skeleton)
    members = _split_union(inner)
    for m in members:
        if template_of(m) is None:
            return Sigma2Rejection("member matches no template", m)
    return Sigma2Shape(frozenset(members), residual.name)
