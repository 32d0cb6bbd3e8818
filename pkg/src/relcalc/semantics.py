"""Finite-model semantics for FO formulas and CoR terms.

Relations are boolean ``n x n`` arrays.  Every evaluator also accepts
relation arrays with leading batch dimensions, which lets the validity
checkers sweep thousands of structures per numpy call.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from . import cor
from . import fo
from .errors import BudgetExceeded, EvaluationError
from .structures import Structure, batch_matrices, count_structures, enumeration_budget

Relation = frozenset  # of (int, int) pairs


class Assignment(Mapping):
    """Immutable, hashable finite map from variables to universe elements."""

    __slots__ = ("_items", "_map")

    def __init__(self, bindings: Mapping[str, int] | Iterable[tuple[str, int]] = ()):
        items = dict(bindings)
        self._items = tuple(sorted(items.items()))
        self._map = dict(self._items)

    def __getitem__(self, var: str) -> int:
        return self._map[var]

    def __iter__(self):
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, Assignment):
            return self._items == other._items
        return NotImplemented

    def update(self, var: str, value: int) -> "Assignment":
        """``f[v/x]``: replace exactly one binding."""
        if var not in self._map:
            raise KeyError(var)
        return Assignment({**self._map, var: value})

    def __repr__(self):
        return "{" + ", ".join(f"{k}↦{v}" for k, v in self._items) + "}"


def _env_of(m: Structure, names: Iterable[str], missing_as_empty: bool) -> dict[str, np.ndarray]:
    env = {}
    for name in names:
        if name in m.relations:
            env[name] = m.matrix(name)
        elif missing_as_empty:
            env[name] = np.zeros((m.universe_size, m.universe_size), dtype=bool)
        else:
            raise EvaluationError(f"relation symbol {name!r} is not interpreted by the structure")
    return env


def _lookup(env: Mapping[str, np.ndarray], name: str) -> np.ndarray:
    try:
        return env[name]
    except KeyError:
        raise EvaluationError(f"relation symbol {name!r} is not interpreted by the structure") from None


# --- CoR -----------------------------------------------------------------------


def compose(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.matmul(x.astype(np.float32), y.astype(np.float32)) > 0.5


def term_array(t: cor.Term, env: Mapping[str, np.ndarray], n: int) -> np.ndarray:
    """Evaluate ``t``; arrays in ``env`` may carry leading batch dimensions."""
    if isinstance(t, cor.RelVar):
        return _lookup(env, t.name)
    if isinstance(t, cor.Id):
        return np.eye(n, dtype=bool)
    if isinstance(t, cor.Comp):
        return ~term_array(t.sub, env, n)
    if isinstance(t, cor.Inter):
        return term_array(t.left, env, n) & term_array(t.right, env, n)
    if isinstance(t, cor.Dot):
        return compose(term_array(t.left, env, n), term_array(t.right, env, n))
    if isinstance(t, cor.Conv):
        return np.swapaxes(term_array(t.sub, env, n), -1, -2)
    raise TypeError(t)


def qf_array(f: cor.QfFormula, env: Mapping[str, np.ndarray], n: int) -> np.ndarray:
    """Truth value(s) of a quantifier-free formula (batch-shaped)."""
    if isinstance(f, cor.Equation):
        left = term_array(f.left, env, n)
        right = term_array(f.right, env, n)
        return np.all(left == right, axis=(-2, -1))
    if isinstance(f, cor.QNot):
        return ~qf_array(f.sub, env, n)
    if isinstance(f, cor.QAnd):
        return qf_array(f.left, env, n) & qf_array(f.right, env, n)
    raise TypeError(f)


def term_matrix(m: Structure, t: cor.Term, missing_as_empty: bool = False) -> np.ndarray:
    env = _env_of(m, cor.relvars_of(t), missing_as_empty)
    return np.broadcast_to(term_array(t, env, m.universe_size), (m.universe_size,) * 2)


def eval_term(m: Structure, t: cor.Term, missing_as_empty: bool = False) -> Relation:
    """⟦t⟧ on ``m`` as a set of pairs."""
    mat = term_matrix(m, t, missing_as_empty)
    return frozenset(map(tuple, np.argwhere(mat).tolist()))


def holds_qf(m: Structure, f: cor.QfFormula, missing_as_empty: bool = False) -> bool:
    env = _env_of(m, cor.relvars_of(f), missing_as_empty)
    return bool(qf_array(f, env, m.universe_size))


# --- FO ------------------------------------------------------------------------


def _fo_array(f: fo.Formula, env: Mapping[str, np.ndarray], n: int, axes: Mapping[str, int]) -> np.ndarray:
    width = len(axes)

    def index(var: str) -> np.ndarray:
        shape = [1] * width
        shape[axes[var]] = n
        return np.arange(n).reshape(shape)

    if isinstance(f, fo.Atom):
        rel = _lookup(env, f.pred)
        return rel[..., index(f.left), index(f.right)]
    if isinstance(f, fo.Eq):
        return index(f.left) == index(f.right)
    if isinstance(f, fo.Not):
        return ~_fo_array(f.sub, env, n, axes)
    if isinstance(f, fo.And):
        return _fo_array(f.left, env, n, axes) & _fo_array(f.right, env, n, axes)
    if isinstance(f, fo.Exists):
        sub = _fo_array(f.sub, env, n, axes)
        axis = axes[f.var] - width
        if sub.ndim < width or sub.shape[axis] == 1:
            return sub
        return np.any(sub, axis=axis, keepdims=True)
    if isinstance(f, fo.NAtom):
        raise EvaluationError(f"non-binary atom {f.pred!r} has no binary-relation semantics")
    raise TypeError(f)


def fo_array(f: fo.Formula, env: Mapping[str, np.ndarray], n: int, variables: Sequence[str]) -> np.ndarray:
    """⟦f⟧ as a boolean array with one axis per entry of ``variables``
    (which must include every variable of ``f``), after any batch axes."""
    axes = {v: i for i, v in enumerate(variables)}
    out = _fo_array(f, env, n, axes)
    if out.ndim < len(variables):
        out = out.reshape((1,) * (len(variables) - out.ndim) + out.shape)
    return out


def eval_fo(m: Structure, f: fo.Formula, x_set: Iterable[str], missing_as_empty: bool = False) -> set[Assignment]:
    """⟦f⟧ restricted to ``x_set``: the total assignments on ``x_set`` that
    extend to satisfying assignments."""
    x_list = sorted(set(x_set))
    free = fo.free_vars_of(f)
    if not free <= set(x_list):
        raise EvaluationError(f"free variables {sorted(free - set(x_list))} are missing from the assignment domain")
    extra = sorted(fo.vars_of(f) - set(x_list))
    env = _env_of(m, fo.predicates_of(f), missing_as_empty)
    n = m.universe_size
    arr = fo_array(f, env, n, x_list + extra)
    # bound-only variables do not affect the value; read them at element 0
    arr = arr[(Ellipsis,) + (0,) * len(extra)] if extra else arr
    arr = np.broadcast_to(arr, (n,) * len(x_list))
    return {Assignment(zip(x_list, map(int, idx))) for idx in np.argwhere(arr)} if x_list else (
        {Assignment()} if bool(arr) else set()
    )


def holds_fo(m: Structure, f: fo.Formula, missing_as_empty: bool = False) -> bool:
    """``m ⊨ f``: every assignment satisfies ``f`` (free variables read universally)."""
    env = _env_of(m, fo.predicates_of(f), missing_as_empty)
    return bool(np.all(fo_array(f, env, m.universe_size, sorted(fo.vars_of(f)))))


# --- bounded validity ------------------------------------------------------------


@dataclass(frozen=True)
class ValidUpTo:
    """No counterexample among structures of size 1..bound."""

    bound: int
    checked: int

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Counterexample:
    structure: Structure
    index: int

    def __bool__(self) -> bool:
        return False


Checkable = Union[fo.Formula, cor.QfFormula]


def _symbols(f: Checkable) -> frozenset[str]:
    if isinstance(f, (cor.Equation, cor.QNot, cor.QAnd)):
        return cor.relvars_of(f)
    return fo.predicates_of(f)


def batch_holds(f: Checkable, env: Mapping[str, np.ndarray], n: int) -> np.ndarray:
    """Truth of ``f`` on a batch of structures given as batched matrices."""
    if isinstance(f, (cor.Equation, cor.QNot, cor.QAnd)):
        return qf_array(f, env, n)
    variables = sorted(fo.vars_of(f))
    arr = fo_array(f, env, n, variables)
    if not variables:
        return arr
    return np.all(arr, axis=tuple(range(-len(variables), 0)))


def check_valid_upto(
    f: Checkable, signature: Iterable[str], max_size: int, budget: int | None = None, chunk: int = 4096
) -> ValidUpTo | Counterexample:
    """Search all structures of size 1..max_size over ``signature`` for one
    refuting ``f``; the lowest-index counterexample of the smallest size wins."""
    names = sorted(set(signature) | _symbols(f))
    budget = enumeration_budget() if budget is None else budget
    total = sum(count_structures(names, n) for n in range(1, max_size + 1))
    if total > budget:
        raise BudgetExceeded(f"{total} structures exceed the enumeration budget {budget}")
    for n in range(1, max_size + 1):
        count = count_structures(names, n)
        for start in range(0, count, chunk):
            idx = np.arange(start, min(start + chunk, count), dtype=np.uint64)
            env = batch_matrices(names, n, idx)
            ok = np.broadcast_to(batch_holds(f, env, n), idx.shape)
            if not ok.all():
                bad = int(idx[int(np.argmin(ok))])
                rels = {name: frozenset(map(tuple, np.argwhere(env[name][bad - start]).tolist())) for name in names}
                return Counterexample(Structure(n, rels), bad)
    return ValidUpTo(max_size, total)


def all_matrices(n: int) -> np.ndarray:
    """Every ``n x n`` boolean matrix, in bitmask order."""
    cells = n * n
    codes = np.arange(2**cells, dtype=np.uint64)
    bits = (codes[:, None] >> np.arange(cells, dtype=np.uint64)[None, :]) & np.uint64(1)
    return bits.astype(bool).reshape(-1, n, n)


def models_of(
    equations: Sequence[cor.QfFormula], order: Sequence[str], size: int
) -> Iterator[Structure]:
    """Every structure of ``size`` over ``order`` satisfying all ``equations``.

    Relations are assigned in ``order``; each formula is checked as soon as
    its last symbol is assigned, so a failing partial assignment prunes all
    of its completions at once.
    """
    pos = {name: i for i, name in enumerate(order)}
    by_level: list[list] = [[] for _ in range(len(order) + 1)]
    for eq in equations:
        syms = cor.relvars_of(eq)
        missing = syms - pos.keys()
        if missing:
            raise EvaluationError(f"symbols {sorted(missing)} are not in the enumeration order")
        level = max((pos[s] for s in syms), default=-1) + 1
        by_level[level].append(eq)
    if any(not bool(qf_array(eq, {}, size)) for eq in by_level[0]):
        return
    candidates = all_matrices(size)
    env: dict[str, np.ndarray] = {}

    def search(level: int) -> Iterator[Structure]:
        if level == len(order):
            yield Structure.from_matrices(size, dict(env))
            return
        name = order[level]
        env[name] = candidates
        ok = np.ones(len(candidates), dtype=bool)
        for eq in by_level[level + 1]:
            ok &= np.broadcast_to(qf_array(eq, env, size), ok.shape)
        for c in np.flatnonzero(ok):
            env[name] = candidates[c]
            yield from search(level + 1)
        del env[name]

    yield from search(0)


def check_implication_valid_upto(
    antecedents: Sequence[cor.QfFormula], consequent: cor.QfFormula, order: Sequence[str], max_size: int
) -> ValidUpTo | Counterexample:
    """Bounded validity of ``(⋀ antecedents) → consequent`` over ``order``.

    Structures falsifying an antecedent satisfy the implication and are
    skipped wholesale by :func:`models_of`.
    """
    checked = 0
    for n in range(1, max_size + 1):
        for model in models_of(antecedents, order, n):
            checked += 1
            if not holds_qf(model, consequent):
                return Counterexample(model, -1)
    return ValidUpTo(max_size, checked)


def full_assignments(variables: Sequence[str], n: int) -> Iterator[Assignment]:
    for values in product(range(n), repeat=len(variables)):
        yield Assignment(zip(variables, values))
