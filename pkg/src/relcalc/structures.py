"""Finite structures over binary relations and the k-tuple construction."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import BudgetExceeded, RelcalcError

Pair = tuple[int, int]

DEFAULT_VERTEX_BOUND = 10**6
DEFAULT_ISO_BOUND = 8
DEFAULT_BUDGET = 2**24


def enumeration_budget() -> int:
    """Structure-count budget; ``RELCALC_BUDGET`` overrides the default."""
    raw = os.environ.get("RELCALC_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


@dataclass(frozen=True, eq=False)
class Structure:
    """A structure with universe ``{0, ..., universe_size - 1}``."""

    universe_size: int
    relations: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        n = self.universe_size
        if n < 1:
            raise RelcalcError("the universe of a structure must be non-empty")
        rels = {}
        for name, pairs in self.relations.items():
            frozen = frozenset((int(s), int(t)) for s, t in pairs)
            for s, t in frozen:
                if not (0 <= s < n and 0 <= t < n):
                    raise RelcalcError(f"pair ({s}, {t}) of {name!r} lies outside a universe of size {n}")
            rels[name] = frozen
        object.__setattr__(self, "relations", rels)

    @classmethod
    def from_matrices(cls, n: int, matrices: Mapping[str, np.ndarray]) -> "Structure":
        rels = {name: frozenset(map(tuple, np.argwhere(m).tolist())) for name, m in matrices.items()}
        s = cls(n, rels)
        s.__dict__["_matrices"] = {name: np.asarray(m, dtype=bool) for name, m in matrices.items()}
        return s

    @cached_property
    def _matrices(self) -> dict[str, np.ndarray]:
        return {}

    def matrix(self, name: str) -> np.ndarray:
        cache = self._matrices
        if name not in cache:
            m = np.zeros((self.universe_size, self.universe_size), dtype=bool)
            pairs = self.relations[name]
            if pairs:
                idx = np.array(sorted(pairs))
                m[idx[:, 0], idx[:, 1]] = True
            m.setflags(write=False)
            cache[name] = m
        return cache[name]

    @property
    def signature(self) -> frozenset[str]:
        return frozenset(self.relations)

    def with_relations(self, extra: Mapping[str, Iterable[Pair]]) -> "Structure":
        return Structure(self.universe_size, {**self.relations, **extra})

    def restrict(self, names: Iterable[str]) -> "Structure":
        names = set(names)
        return Structure(self.universe_size, {k: v for k, v in self.relations.items() if k in names})

    def __eq__(self, other):
        if not isinstance(other, Structure):
            return NotImplemented
        return self.universe_size == other.universe_size and self.relations == other.relations

    def __hash__(self):
        return hash((self.universe_size, frozenset(self.relations.items())))

    def __repr__(self):
        rels = ", ".join(f"{k}={sorted(v)}" for k, v in sorted(self.relations.items()))
        return f"Structure(n={self.universe_size}, {rels})"

    # JSON: {"universe": n, "relations": {"a": [[s, t], ...]}}
    def to_json_obj(self) -> dict:
        return {
            "universe": self.universe_size,
            "relations": {k: [list(p) for p in sorted(v)] for k, v in sorted(self.relations.items())},
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_obj(), indent=indent)

    @classmethod
    def from_json_obj(cls, obj: Mapping) -> "Structure":
        try:
            n = int(obj["universe"])
            rels = {name: [tuple(p) for p in pairs] for name, pairs in obj.get("relations", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            raise RelcalcError(f"malformed structure JSON: {exc}") from exc
        for name, pairs in rels.items():
            if any(len(p) != 2 for p in pairs):
                raise RelcalcError(f"relation {name!r} has a pair that is not [source, target]")
        return cls(n, rels)

    @classmethod
    def from_json(cls, text: str) -> "Structure":
        return cls.from_json_obj(json.loads(text))


def load_structure(path) -> Structure:
    with open(path, encoding="utf-8") as fh:
        return Structure.from_json(fh.read())


# --- tuple encoding ----------------------------------------------------------


def encode_tuple(components: Iterable[int], n: int) -> int:
    """Big-endian base-``n`` index of a tuple over ``{0..n-1}``."""
    code = 0
    for v in components:
        code = code * n + v
    return code


def decode_tuple(code: int, n: int, k: int) -> tuple[int, ...]:
    digits = []
    for _ in range(k):
        code, r = divmod(code, n)
        digits.append(r)
    return tuple(reversed(digits))


# --- k-tuple structures --------------------------------------------------------


def pi_name(i: int) -> str:
    return f"pi{i}"


def q_name(i: int) -> str:
    return f"Q{i}"


def e_name(i: int, j: int) -> str:
    """Name of E_[i,j], the relation "equal on coordinates i..j"."""
    return f"E{i}_{j}"


U_NAME = "U"


def ktuple_signature(k: int, sigma_used: Iterable[str]) -> list[str]:
    names = list(sorted(set(sigma_used)))
    names.append(U_NAME)
    for i in range(1, k + 1):
        names += [pi_name(i), q_name(i), e_name(1, i), e_name(i, k)]
    return list(dict.fromkeys(names))


def reserved_names(k: int) -> set[str]:
    return set(ktuple_signature(k, ()))


def k_tuple_structure(
    m: Structure, k: int, sigma_used: Iterable[str], vertex_bound: int = DEFAULT_VERTEX_BOUND
) -> Structure:
    """The k-tuple structure of ``m`` over ``sigma_used`` plus U, pi_i, Q_i,
    E_[1,i] and E_[i,k]; tuples are encoded with :func:`encode_tuple`."""
    if k < 1:
        raise RelcalcError("k must be at least 1")
    sigma_used = sorted(set(sigma_used))
    missing = [a for a in sigma_used if a not in m.relations]
    if missing:
        raise RelcalcError(f"relations {missing} are not interpreted by the structure")
    clash = set(sigma_used) & reserved_names(k)
    if clash:
        raise RelcalcError(f"relation names {sorted(clash)} are reserved in the {k}-tuple signature")
    n = m.universe_size
    size = n**k
    if size > vertex_bound:
        raise BudgetExceeded(f"{n}^{k} = {size} vertices exceeds the bound {vertex_bound}")

    coords = np.array(list(product(range(n), repeat=k)), dtype=np.int64).reshape(size, k)
    diag = np.array([encode_tuple([v] * k, n) for v in range(n)], dtype=np.int64)
    mats: dict[str, np.ndarray] = {}

    for a in sigma_used:
        mat = np.zeros((size, size), dtype=bool)
        pairs = np.array(sorted(m.relations[a]), dtype=np.int64).reshape(-1, 2)
        mat[diag[pairs[:, 0]], diag[pairs[:, 1]]] = True
        mats[a] = mat

    u = np.zeros((size, size), dtype=bool)
    u[diag, diag] = True
    mats[U_NAME] = u

    # same[j][x, y]: tuples x and y agree on coordinate j
    same = [coords[:, j][:, None] == coords[:, j][None, :] for j in range(k)]
    full = np.ones((size, size), dtype=bool)

    def agree(lo: int, hi: int) -> np.ndarray:
        out = full.copy()
        for j in range(lo - 1, hi):
            out &= same[j]
        return out

    for i in range(1, k + 1):
        p = np.zeros((size, size), dtype=bool)
        p[np.arange(size), diag[coords[:, i - 1]]] = True
        mats[pi_name(i)] = p
        mats[q_name(i)] = agree(1, i - 1) & agree(i + 1, k)
        mats[e_name(1, i)] = agree(1, i)
        mats[e_name(i, k)] = agree(i, k)
    return Structure.from_matrices(size, mats)


# --- isomorphism ---------------------------------------------------------------


def is_isomorphic(m1: Structure, m2: Structure, names: Iterable[str], bound: int = DEFAULT_ISO_BOUND) -> bool:
    """Brute-force isomorphism test over the named relations.

    Elements are mapped one at a time; a partial map is abandoned as soon as
    a relation disagrees on the already-mapped elements.
    """
    n = m1.universe_size
    if n != m2.universe_size:
        return False
    if n > bound:
        raise BudgetExceeded(f"isomorphism search on {n} elements exceeds the bound {bound}")
    names = sorted(set(names))
    a = [m1.matrix(x) if x in m1.relations else np.zeros((n, n), bool) for x in names]
    b = [m2.matrix(x) if x in m2.relations else np.zeros((n, n), bool) for x in names]
    if any(x.sum() != y.sum() for x, y in zip(a, b)):
        return False
    a_l = [x.tolist() for x in a]
    b_l = [y.tolist() for y in b]
    image = [-1] * n
    used = [False] * n

    def consistent(v: int) -> bool:
        fv = image[v]
        for u in range(v + 1):
            fu = image[u]
            for x, y in zip(a_l, b_l):
                if x[v][u] != y[fv][fu] or x[u][v] != y[fu][fv]:
                    return False
        return True

    def extend(v: int) -> bool:
        if v == n:
            return True
        for w in range(n):
            if not used[w]:
                image[v] = w
                used[w] = True
                if consistent(v) and extend(v + 1):
                    return True
                used[w] = False
        image[v] = -1
        return False

    return extend(0)


# --- enumeration ---------------------------------------------------------------


def count_structures(signature: Iterable[str], size: int) -> int:
    return 2 ** (len(set(signature)) * size * size)


def structure_from_index(signature: Iterable[str], size: int, index: int) -> Structure:
    """Decode a bitmask: relation j (sorted) owns bits j*n^2 .. (j+1)*n^2 - 1,
    pair (s, t) is bit s*n + t."""
    names = sorted(set(signature))
    cells = size * size
    rels = {}
    for j, name in enumerate(names):
        bits = (index >> (j * cells)) & ((1 << cells) - 1)
        rels[name] = frozenset(divmod(c, size) for c in range(cells) if bits >> c & 1)
    return Structure(size, rels)


def batch_matrices(signature: Iterable[str], size: int, indices: np.ndarray) -> dict[str, np.ndarray]:
    """Relation matrices of shape ``(len(indices), size, size)`` for a batch of
    structure indices (same encoding as :func:`structure_from_index`)."""
    names = sorted(set(signature))
    cells = size * size
    idx = np.asarray(indices, dtype=np.uint64)
    out = {}
    for j, name in enumerate(names):
        shifts = np.arange(j * cells, (j + 1) * cells, dtype=np.uint64)
        bits = (idx[:, None] >> shifts[None, :]) & np.uint64(1)
        out[name] = bits.astype(bool).reshape(len(idx), size, size)
    return out


def enumerate_structures(signature: Iterable[str], size: int, budget: int | None = None) -> Iterator[Structure]:
    """Every structure of the given size over ``signature``, each exactly once,
    in bitmask order."""
    total = count_structures(signature, size)
    budget = enumeration_budget() if budget is None else budget
    if total > budget:
        raise BudgetExceeded(f"{total} structures exceed the enumeration budget {budget}")
    names = sorted(set(signature))
    for index in range(total):
        yield structure_from_index(names, size, index)


# --- k-TUPLE membership --------------------------------------------------------


def _function_of(mat: np.ndarray) -> np.ndarray | None:
    """Image array of a total functional relation, else ``None``."""
    if not (mat.sum(axis=1) == 1).all():
        return None
    return mat.argmax(axis=1)


def is_k_tuple(m: Structure, k: int, sigma_used: Iterable[str]) -> bool:
    """Whether ``m`` is isomorphic to the k-tuple structure of some base.

    The base is read off ``m`` itself: its universe is the set of U-loops and
    the candidate isomorphism sends ``v`` to the tuple of its pi-images.
    """
    sigma_used = sorted(set(sigma_used))
    names = ktuple_signature(k, sigma_used)
    if any(x not in m.relations for x in names):
        return False
    n = m.universe_size
    base_elems = [v for v in range(n) if (v, v) in m.relations[U_NAME]]
    r = len(base_elems)
    if r == 0 or r**k != n:
        return False
    images = []
    for i in range(1, k + 1):
        img = _function_of(m.matrix(pi_name(i)))
        if img is None or any(int(w) not in base_elems for w in img):
            return False
        images.append(img)
    base_index = {v: j for j, v in enumerate(base_elems)}
    for a in sigma_used:
        if any(s not in base_index or t not in base_index for s, t in m.relations[a]):
            return False
    base = Structure(r, {a: {(base_index[s], base_index[t]) for s, t in m.relations[a]} for a in sigma_used})
    candidate = k_tuple_structure(base, k, sigma_used)
    f = [encode_tuple([base_index[int(img[v])] for img in images], r) for v in range(n)]
    if len(set(f)) != n:
        return False
    for name in names:
        mapped = {(f[s], f[t]) for s, t in m.relations[name]}
        if mapped != candidate.relations[name]:
            return False
    return True


def is_k_tuple_bruteforce(m: Structure, k: int, sigma_used: Iterable[str], bound: int = DEFAULT_ISO_BOUND) -> bool:
    """Reference check: try every base structure of the right size."""
    sigma_used = sorted(set(sigma_used))
    n = m.universe_size
    r = round(n ** (1 / k))
    candidates = [c for c in (r - 1, r, r + 1) if c >= 1 and c**k == n]
    if not candidates:
        return False
    r = candidates[0]
    names = ktuple_signature(k, sigma_used)
    for base in enumerate_structures(sigma_used, r):
        if is_isomorphic(m, k_tuple_structure(base, k, sigma_used), names, bound):
            return True
    return False
