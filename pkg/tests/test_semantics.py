import numpy as np
import pytest

from relcalc import cor, fo
from relcalc import semantics as sem
from relcalc.structures import Structure


def brute_compose(r, s):
    return {(x, z) for x, y in r for y2, z in s if y == y2}


def test_fo_atoms_on_fig1(fig1):
    got = sem.eval_fo(fig1, fo.parse_fo("a(x,y)"), {"x", "y"})
    assert got == {sem.Assignment({"x": 0, "y": 1})}
    got = sem.eval_fo(fig1, fo.parse_fo("exists y. a(x,y)"), {"x"})
    assert got == {sem.Assignment({"x": 0})}


def test_reflexive_equality_everywhere():
    m = Structure(3, {})
    assert len(sem.eval_fo(m, fo.Eq("x", "x"), {"x"})) == 3
    assert sem.holds_fo(m, fo.parse_fo("forall x. x = x"))
    assert not sem.holds_fo(m, fo.parse_fo("false"))


def test_fo_sentences_on_fig1(fig1):
    assert not sem.holds_fo(fig1, fo.parse_fo("forall x. exists y. a(x,y)"))
    assert sem.holds_fo(fig1, fo.parse_fo("exists x. exists y. a(x,y) & b(y,x)"))


def test_terms_on_fig1(fig1):
    assert sem.eval_term(fig1, cor.parse_term("a")) == {(0, 1)}
    assert sem.eval_term(fig1, cor.parse_term("a ; b")) == {(0, 0)}
    assert sem.eval_term(fig1, cor.parse_term("id^c & id")) == frozenset()
    assert sem.eval_term(fig1, cor.parse_term("a^T")) == {(1, 0)}


def test_equations_on_fig1(fig1):
    assert sem.holds_qf(fig1, cor.parse_qf("id = id"))
    assert sem.holds_qf(fig1, cor.parse_qf("a <= top"))
    assert not sem.holds_qf(fig1, cor.parse_qf("a = b"))
    assert sem.holds_qf(fig1, cor.parse_qf("!(a = b)"))


def test_composition_matches_set_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 5))
        r = {(s, t) for s in range(n) for t in range(n) if rng.random() < 0.4}
        s_ = {(s, t) for s in range(n) for t in range(n) if rng.random() < 0.4}
        m = Structure(n, {"r": r, "s": s_})
        assert sem.eval_term(m, cor.parse_term("r ; s")) == brute_compose(r, s_)
        dag = {(x, z) for x in range(n) for z in range(n) if all((x, y) in r or (y, z) in s_ for y in range(n))}
        assert sem.eval_term(m, cor.parse_term("r # s")) == dag


def test_missing_relation_is_an_error(fig1):
    with pytest.raises(Exception):
        sem.eval_term(fig1, cor.parse_term("c"))
    assert sem.eval_term(fig1, cor.parse_term("c"), missing_as_empty=True) == frozenset()


def test_check_valid_upto():
    assert sem.check_valid_upto(fo.parse_fo("forall x. x = x"), ["a"], 2)
    res = sem.check_valid_upto(fo.parse_fo("forall x. a(x,x)"), ["a"], 1)
    assert not res
    assert res.structure == Structure(1, {"a": set()})
    assert sem.check_valid_upto(cor.parse_qf("top = top"), [], 3)


def test_check_valid_finds_smallest_counterexample():
    res = sem.check_valid_upto(fo.parse_fo("exists x. exists y. !(x = y)"), [], 3)
    assert not res and res.structure.universe_size == 1
    res = sem.check_valid_upto(cor.parse_qf("a ; a <= a"), [], 3)
    assert not res and res.structure.universe_size == 2


def test_batch_agrees_with_single():
    f = fo.parse_fo("forall x. exists y. a(x,y) & !b(y,x)")
    res = sem.check_valid_upto(f, ["a", "b"], 2)
    assert not res
    assert not sem.holds_fo(res.structure, f)


def test_models_of():
    eqs = [cor.parse_qf("c = a ; b")]
    models = list(sem.models_of(eqs, ["a", "b", "c"], 2))
    # c is determined by a and b
    assert len(models) == 256
    for m in models[:20]:
        assert sem.holds_qf(m, eqs[0])
