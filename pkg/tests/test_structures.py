import numpy as np
import pytest

from relcalc import structures as st
from relcalc.errors import BudgetExceeded, RelcalcError
from relcalc.structures import Structure


def code(label: str) -> int:
    return st.encode_tuple([int(ch) for ch in label], 2)


def pairs(*labels: str) -> frozenset:
    return frozenset((code(s), code(t)) for s, t in (x.split(",") for x in labels))


# Expected two-tuple relations for fig1.json, written with tuple labels.
FIG1_K2 = {
    "a": pairs("00,11"),
    "b": pairs("11,00"),
    "U": pairs("00,00", "11,11"),
    "pi1": pairs("00,00", "01,00", "10,11", "11,11"),
    "pi2": pairs("00,00", "01,11", "10,00", "11,11"),
    "Q1": pairs("00,00", "00,10", "01,01", "01,11", "10,00", "10,10", "11,01", "11,11"),
    "Q2": pairs("00,00", "00,01", "01,00", "01,01", "10,10", "10,11", "11,10", "11,11"),
}


def test_fig1_two_tuple_structure(fig1):
    mk = st.k_tuple_structure(fig1, 2, ["a", "b"])
    assert mk.universe_size == 4
    for name, want in FIG1_K2.items():
        assert mk.relations[name] == want, name
    assert mk.relations["E1_1"] == FIG1_K2["Q2"]
    assert mk.relations["E2_2"] == FIG1_K2["Q1"]
    assert mk.relations["E1_2"] == frozenset((v, v) for v in range(4))


def test_k1_structure_is_degenerate(fig1):
    mk = st.k_tuple_structure(fig1, 1, ["a", "b"])
    ident = frozenset((v, v) for v in range(2))
    assert mk.universe_size == 2
    assert mk.relations["pi1"] == ident
    assert mk.relations["U"] == ident
    assert mk.relations["E1_1"] == ident
    assert mk.relations["Q1"] == frozenset((s, t) for s in range(2) for t in range(2))
    assert mk.relations["a"] == fig1.relations["a"]


def test_tuple_encoding_round_trip():
    for n in (1, 2, 3):
        for k in (1, 2, 3):
            for c in range(n**k):
                assert st.encode_tuple(st.decode_tuple(c, n, k), n) == c
    assert st.decode_tuple(code("01"), 2, 2) == (0, 1)


def test_reserved_names_rejected():
    m = Structure(2, {"U": {(0, 0)}})
    with pytest.raises(RelcalcError):
        st.k_tuple_structure(m, 2, ["U"])


def test_vertex_bound():
    with pytest.raises(BudgetExceeded):
        st.k_tuple_structure(Structure(3, {"a": set()}), 4, ["a"], vertex_bound=50)


def test_isomorphism():
    m = Structure(2, {"a": {(0, 1)}})
    assert st.is_isomorphic(m, m, ["a"])
    assert st.is_isomorphic(m, Structure(2, {"a": {(1, 0)}}), ["a"])
    assert not st.is_isomorphic(m, Structure(2, {"a": {(0, 1), (1, 0)}}), ["a"])


@pytest.mark.parametrize("sig, n, count", [(["a"], 1, 2), (["a"], 2, 16), (["a", "b"], 2, 256)])
def test_count_structures(sig, n, count):
    assert st.count_structures(sig, n) == count
    assert len(set(st.enumerate_structures(sig, n))) == count


def test_structure_from_index_matches_batch():
    idx = np.arange(256, dtype=np.uint64)
    batch = st.batch_matrices(["a", "b"], 2, idx)
    for i in (0, 7, 100, 255):
        m = st.structure_from_index(["a", "b"], 2, i)
        assert np.array_equal(m.matrix("a"), batch["a"][i])
        assert np.array_equal(m.matrix("b"), batch["b"][i])


def test_is_k_tuple(fig1):
    mk = st.k_tuple_structure(fig1, 2, ["a", "b"])
    assert st.is_k_tuple(mk, 2, ["a", "b"])
    q1 = set(mk.relations["Q1"])
    q1.remove((code("00"), code("10")))
    broken = mk.with_relations({"Q1": q1})
    assert not st.is_k_tuple(broken, 2, ["a", "b"])
    assert not st.is_k_tuple_bruteforce(broken, 2, ["a", "b"])


def test_size_three_is_no_square():
    m = st.k_tuple_structure(Structure(3, {"a": {(0, 2)}}), 1, ["a"])
    assert not st.is_k_tuple(m, 2, ["a"])


def test_is_k_tuple_agrees_with_bruteforce():
    rng = np.random.default_rng(3)
    for _ in range(30):
        n = int(rng.integers(1, 3))
        m = Structure(n, {"a": {(s, t) for s in range(n) for t in range(n) if rng.random() < 0.5}})
        mk = st.k_tuple_structure(m, 2, ["a"])
        rels = {k: set(v) for k, v in mk.relations.items()}
        if rng.random() < 0.5:
            name = str(rng.choice(sorted(rels)))
            s, t = (int(x) for x in rng.integers(0, mk.universe_size, 2))
            rels[name] ^= {(s, t)}
        cand = Structure(mk.universe_size, rels)
        assert st.is_k_tuple(cand, 2, ["a"]) == st.is_k_tuple_bruteforce(cand, 2, ["a"])


def test_json_round_trip(fig1):
    assert Structure.from_json(fig1.to_json()) == fig1
    with pytest.raises(RelcalcError):
        Structure.from_json('{"relations": {}}')
