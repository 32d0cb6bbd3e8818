import itertools

import pytest

from relcalc import cor, fo, harness
from relcalc import semantics as sem
from relcalc import structures as st
from relcalc import translations as tr
from relcalc.cor import TOP, Comp, Dot, Equation, Inter, RelVar
from relcalc.errors import TranslationError
from relcalc.structures import Structure


def all_structures(names, n):
    return st.enumerate_structures(sorted(names), n)


# --- Γ^(k) and T^(k) ---------------------------------------------------------------


def test_gamma_k1():
    got = [cor.print_cor(e) for e in tr.gamma_k(1, ["a"])]
    assert got == [
        "U = pi1",
        "E1_1 = top & pi1 ; pi1^T",
        "Q1 = top & top",
        "U <= id",
        "pi1^T ; pi1 <= id",
        "id <= pi1 ; U ; pi1^T",
        "top ; U <= Q1 ; pi1",
        "id = E1_1",
        "top ; U ; top = top",
        "a <= U ; top ; U",
    ]


def unit_for(f, k):
    return tr.TranslationUnit.of(f, min_k=k)


def test_t_k_atom():
    f = fo.parse_fo("a(x1,x2)")
    assert tr.t_k(f, unit_for(f, 2)) == cor.parse_term("(pi1 ; a ; pi2^T) & id")


def test_t_k_negation_forms():
    f = fo.parse_fo("!a(x1,x1)")
    unit = unit_for(f, 1)
    assert tr.t_k(f, unit, guard_negation=False) == cor.parse_term("((pi1 ; a ; pi1^T) & id)^c")
    assert tr.t_k(f, unit) == cor.parse_term("((pi1 ; a ; pi1^T) & id)^c & id")


def test_t_k_equality_on_fig1(fig1):
    f = fo.parse_fo("x1 = x2")
    unit = unit_for(f, 2)
    t = tr.t_k(f, unit)
    assert t == cor.parse_term("(pi1 ; pi2^T) & id")
    mk = st.k_tuple_structure(fig1, 2, unit.sigma_used)
    code = lambda s: st.encode_tuple([int(c) for c in s], 2)  # noqa: E731
    assert sem.eval_term(mk, t) == {(code("00"), code("00")), (code("11"), code("11"))}


def test_translation_rejects_nary():
    with pytest.raises(TranslationError):
        tr.fo_to_cor(fo.parse_fo("p(x,y,z)", nary=True))


def test_valid_formula_translates_to_valid_equation(fig1):
    f = fo.parse_fo("forall x. x = x")
    g = tr.fo_to_cor(f)
    unit = tr.TranslationUnit.of(f)
    for n in (1, 2, 3):
        for m in all_structures([], n):
            assert sem.holds_qf(st.k_tuple_structure(m, unit.k, unit.sigma_used), g)
    eq = tr.fo_to_cor_equation(f)
    assert eq.right == TOP


def test_unsatisfiable_formula_is_refuted_on_every_ktuple_structure():
    f = fo.parse_fo("exists x. !(x = x)")
    unit = tr.TranslationUnit.of(f)
    for n in (1, 2, 3):
        m = Structure(n, {})
        assert not sem.holds_qf(st.k_tuple_structure(m, unit.k, unit.sigma_used), tr.fo_to_cor(f))


def test_unguarded_negation_is_unsound():
    """Complement over all pairs leaks off-diagonal witnesses."""
    f = fo.parse_fo("exists x. !(x = x)")
    unit = tr.TranslationUnit.of(f)
    mk = st.k_tuple_structure(Structure(2, {}), unit.k, unit.sigma_used)
    assert sem.eval_term(mk, tr.t_k(f, unit, guard_negation=False))
    assert not sem.eval_term(mk, tr.t_k(f, unit))


# --- Schröder-Tarski and the standard translation -----------------------------------------


def test_schroder_examples():
    a = RelVar("a")
    assert tr.schroder_tarski(Equation(a, TOP)) == cor.union(Inter(a, TOP), Inter(Comp(a), cor.BOT))
    neg = tr.schroder_tarski(cor.QNot(Equation(a, TOP)))
    assert neg == cor.dots(TOP, Comp(cor.union(Inter(a, TOP), Inter(Comp(a), cor.BOT))), TOP)


def test_schroder_exhaustive_small():
    f = cor.parse_qf("!(a ; b = b ; a) /\\ a <= b^T")
    t = tr.schroder_tarski(f)
    for n in (1, 2):
        for m in all_structures(["a", "b"], n):
            assert sem.holds_qf(m, f) == bool(sem.term_matrix(m, t).all())


def test_standard_translation_examples():
    assert tr.standard_translation(cor.parse_term("a ; b")) == fo.parse_fo("exists x3. a(x1,x3) & b(x3,x2)")
    assert tr.standard_translation(cor.I) == fo.Eq("x1", "x2")
    deep = tr.standard_translation(cor.parse_term("a ; (b ; (a ; b^T))^c"))
    assert fo.is_fok(deep, 3)


# --- Tseitin and the Σ₂ normal form -------------------------------------------------------


EXAMPLE = "((b ; c)^c ; d)^c"


def test_tseitin_single_variable():
    env = tr.tseitin(RelVar("b"))
    assert env.gamma == [Equation(RelVar(env.root), RelVar("b"))]


def test_tseitin_example_defining_equations():
    t = cor.parse_term(EXAMPLE)
    env = tr.tseitin(t)
    a = lambda s: RelVar(env.name_of[cor.parse_term(s)])  # noqa: E731
    want = {
        Equation(a("b ; c"), Dot(a("b"), a("c"))),
        Equation(a("(b ; c)^c"), Comp(a("b ; c"))),
        Equation(a("(b ; c)^c ; d"), Dot(a("(b ; c)^c"), a("d"))),
        Equation(a(EXAMPLE), Comp(a("(b ; c)^c ; d"))),
    }
    assert want <= set(env.gamma)
    assert len(env.gamma) == 7
    assert env.root == env.name_of[t]


def test_tseitin_names_are_fresh_and_stable():
    t = cor.parse_term("t_aaaa ; b")
    env = tr.tseitin(t)
    assert "t_aaaa" not in env.names
    assert env.names == tr.tseitin(t).names


def example_display_terms(env):
    a = lambda s: RelVar(env.name_of[cor.parse_term(s)])  # noqa: E731
    bc, nbc, nbcd, root = a("b ; c"), a("(b ; c)^c"), a("(b ; c)^c ; d"), a(EXAMPLE)
    return [
        Inter(bc, cor.dagger(Comp(a("b")), Comp(a("c")))),
        Inter(Comp(bc), Dot(a("b"), a("c"))),
        Inter(nbc, bc),
        Inter(Comp(nbc), Comp(bc)),
        Inter(nbcd, cor.dagger(Comp(nbc), Comp(a("d")))),
        Inter(Comp(nbcd), Dot(nbc, a("d"))),
        Inter(root, nbcd),
        Inter(Comp(root), Comp(nbcd)),
    ]


def test_sigma2_example_display():
    res = tr.sigma2_pipeline(Equation(cor.parse_term(EXAMPLE), TOP))
    for term in example_display_terms(res.env):
        assert term in res.display, cor.print_cor(term)
    assert cor.check_sigma2(res.equation)


def test_sigma2_single_variable():
    res = tr.sigma2_pipeline(cor.parse_qf("b = top"))
    shape = cor.check_sigma2(res.equation)
    assert shape and shape.residual == res.env.root


def test_sigma2_rejects_converse_and_identity():
    with pytest.raises(TranslationError):
        tr.sigma2_normalize(cor.parse_qf("a^T = top"))
    with pytest.raises(TranslationError):
        tr.sigma2_normalize(cor.parse_qf("a & id = a"))


def test_sigma2_preserves_validity_small():
    for text in ("a | a^c = top", "a ; b = top", "(a ; a)^c | a = top", "a # a^c = a"):
        f = cor.parse_qf(text)
        out = tr.sigma2_normalize(f)
        base = cor.relvars_of(f)
        res = tr.sigma2_pipeline(f)
        for n in (1, 2):
            for m in all_structures(base, n):
                w = harness.sigma2_witness(m, res)
                assert sem.holds_qf(w, out) == sem.holds_qf(m, f)


# --- Gödel class ---------------------------------------------------------------------


def test_godel_example_prefix():
    out = tr.godel_reduce(Equation(cor.parse_term(EXAMPLE), TOP))
    pc = fo.classify_prefix(out)
    assert pc.pattern == "∃³∀⁴"
    assert fo.in_godel_class(pc, "exists")
    neg = fo.classify_prefix(tr.negate(out))
    assert neg.pattern == "∀³∃⁴"
    assert fo.in_godel_class(neg)


def test_godel_agrees_on_small_models():
    f = cor.parse_qf("(a ; b)^c = top")
    out = tr.godel_reduce(f)
    res = tr.sigma2_pipeline(f)
    for n in (1, 2):
        for m in all_structures(["a", "b"], n):
            assert sem.holds_fo(harness.sigma2_witness(m, res), out) == sem.holds_qf(m, f)


# --- three-variable translation ---------------------------------------------------------


def test_t_z_atom_shape():
    f = fo.parse_fo("a(x1,x3) & x2 = x2")
    unit = tr.TranslationUnit.of(f, min_k=3)
    i, j = unit.index("x1"), unit.index("x3")
    got = tr.t_z_k(fo.parse_fo("a(x1,x3)"), unit, "x1")
    assert got == fo.parse_fo(f"exists x2. exists x3. pi{i}(x1,x2) & a(x2,x3) & pi{j}(x1,x3)")
    # pivots rotate with z
    got = tr.t_z_k(fo.parse_fo("a(x1,x3)"), unit, "x2")
    assert got == fo.parse_fo(f"exists x1. exists x3. pi{i}(x2,x1) & a(x1,x3) & pi{j}(x2,x3)")


def test_fo3_output_has_three_variables():
    f = fo.parse_fo("forall x. forall y. forall z. forall w. a(x,y) & a(z,w) -> a(x,w)")
    out = tr.fo_to_fo3(f)
    assert fo.is_fok(out, 3)
    assert not fo.is_fok(f, 3)


# --- equality and arity --------------------------------------------------------------------


def test_eliminate_equality_matrix():
    res = tr.eliminate_equality_full(fo.parse_fo("x = y & a(x,y)"))
    assert not fo.uses_equality(res.formula)
    assert fo.is_fok(res.formula, 3)
    assert fo.Atom(res.e_name, "x", "y") in set(fo.iter_nodes(res.formula))


def test_eliminate_equality_avoids_clash():
    res = tr.eliminate_equality_full(fo.parse_fo("E(x,y) & x = y"))
    assert res.e_name != "E"


def test_equality_elimination_preserves_validity():
    for text in ("forall x. x = x", "forall x. forall y. x = y -> (a(x,x) -> a(y,y))", "forall x. forall y. x = y"):
        f = fo.parse_fo(text)
        out = tr.eliminate_equality(f)
        assert bool(sem.check_valid_upto(f, ["a"], 2)) == bool(sem.check_valid_upto(out, ["a"], 2))


def test_arity_reduce_two_ternary_atoms():
    f = fo.parse_fo("a(x,y,x) & a(y,y,x)", nary=True)
    want = fo.parse_fo(
        "(exists z. p1(z,x) & p2(z,y) & p3(z,x) & a'(z,z)) & (exists z. p1(z,y) & p2(z,y) & p3(z,x) & a'(z,z))"
    )
    assert tr.arity_reduce(f) == want


def test_arity_reduce_binary_and_unary():
    assert tr.arity_reduce(fo.parse_fo("a(x,y)")) == fo.parse_fo("a(x,y)")
    assert tr.arity_reduce(fo.parse_fo("a(x)", nary=True)) == fo.parse_fo("exists z. p1(z,x) & a'(z,z)")


def test_arity_reduce_preserves_satisfaction():
    """Ternary r read off an event structure: event z carries r'(z,z) and
    p_j(z, v) for its j-th coordinate."""
    f = fo.parse_fo("exists x. exists y. r(x,y,x) & !r(y,x,x)", nary=True)
    out = tr.arity_reduce(f)
    n = 2
    for bits in itertools.product((0, 1), repeat=n**3):
        r = {t for t, b in zip(itertools.product(range(n), repeat=3), bits) if b}
        truth = any((x, y, x) in r and (y, x, x) not in r for x in range(n) for y in range(n))
        # one event per triple; events are distinct from base elements
        events = sorted(r)
        rels = {"r'": set(), "p1": set(), "p2": set(), "p3": set()}
        for i, ev in enumerate(events):
            z = n + i
            rels["r'"].add((z, z))
            for j, v in enumerate(ev, start=1):
                rels[f"p{j}"].add((z, v))
        m = Structure(n + len(events), rels)
        # x and y may also range over events, but an event is never a p_j target
        assert sem.holds_fo(m, out) == truth
