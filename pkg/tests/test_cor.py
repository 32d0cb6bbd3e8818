import pytest
from hypothesis import given, settings
from hypothesis import strategies as hs

from relcalc import cor
from relcalc.cor import BOT, I, TOP, Comp, Conv, Dot, Equation, Inter, QAnd, QNot, RelVar
from relcalc.errors import ParseError

leaves = hs.one_of(hs.builds(RelVar, hs.sampled_from(["a", "b", "c", "t_1f", "U", "pi1"])), hs.just(I))
terms = hs.recursive(
    leaves,
    lambda sub: hs.one_of(
        hs.builds(Comp, sub),
        hs.builds(Conv, sub),
        hs.builds(Inter, sub, sub),
        hs.builds(Dot, sub, sub),
    ),
    max_leaves=10,
)
qfs = hs.recursive(
    hs.builds(Equation, terms, terms),
    lambda sub: hs.one_of(hs.builds(QNot, sub), hs.builds(QAnd, sub, sub)),
    max_leaves=4,
)


def test_top_is_core_union():
    assert cor.parse_term("top") == Comp(Inter(Comp(I), Comp(Comp(I))))
    assert cor.parse_term("bot") == Comp(TOP)


def test_dot_and_leq():
    a, b = RelVar("a"), RelVar("b")
    assert cor.parse_term("a ; b") == Dot(a, b)
    assert cor.parse_qf("a <= b") == Equation(cor.union(a, b), b)


def test_sugar_precedence():
    t = cor.parse_term("a | b & c ; d^T")
    a, b, c, d = (RelVar(x) for x in "abcd")
    assert t == cor.union(a, Inter(b, Dot(c, Conv(d))))
    assert cor.parse_term("a # b") == cor.dagger(a, b)


@pytest.mark.parametrize(
    "x, size",
    [
        (RelVar("a"), 1),
        (Dot(RelVar("a"), Conv(RelVar("b"))), 4),
        (Equation(I, I), 3),
        (QNot(Equation(RelVar("a"), RelVar("a"))), 4),
    ],
)
def test_size(x, size):
    measure = cor.size_qf if isinstance(x, (Equation, QNot, QAnd)) else cor.size_term
    assert measure(x) == size


def test_parse_error():
    with pytest.raises(ParseError):
        cor.parse_qf("a ; = b")
    with pytest.raises(ParseError):
        cor.parse_term("a = b")


def test_constants_print_plainly():
    assert cor.print_cor(Comp(Inter(TOP, TOP))) == "(top & top)^c"
    assert cor.parse_term(cor.print_cor(Comp(Inter(TOP, BOT)))) == Comp(Inter(TOP, BOT))


@given(terms)
@settings(max_examples=300, deadline=None)
def test_term_round_trip(t):
    assert cor.parse_term(cor.print_cor(t)) == t


@given(qfs)
@settings(max_examples=150, deadline=None)
def test_formula_round_trip(f):
    assert cor.parse_qf(cor.print_cor(f)) == f


def test_sigma2_accepts_template_union():
    b, c, a = RelVar("b"), RelVar("c"), RelVar("a")
    inner = cor.union(Inter(b, c), Inter(Comp(b), Comp(c)))
    f = Equation(cor.union(cor.dots(TOP, inner, TOP), a), TOP)
    shape = cor.check_sigma2(f)
    assert shape
    assert shape.gamma == {Inter(b, c), Inter(Comp(b), Comp(c))}
    assert shape.residual == "a"


def test_sigma2_rejects():
    assert not cor.check_sigma2(cor.parse_qf("a ; b = top"))
    bad_member = Equation(cor.union(cor.dots(TOP, Inter(RelVar("b"), Comp(RelVar("c"))), TOP), RelVar("a")), TOP)
    assert not cor.check_sigma2(bad_member)


@pytest.mark.parametrize(
    "text, kind",
    [
        ("b & c", "b&c"),
        ("b^c & c^c", "b^c&c^c"),
        ("b & (c # d)", "b&(c#d)"),
        ("b & c ; d", "b&(c;d)"),
        ("b & (c & d)", "b&(c&d)"),
        ("b & c^T", None),
    ],
)
def test_templates(text, kind):
    assert cor.template_of(cor.parse_term(text)) == kind


def test_find_conv_or_id():
    assert cor.find_conv_or_id(cor.parse_term("a ; b^T")) == Conv(RelVar("b"))
    assert cor.find_conv_or_id(cor.parse_term("a & top")) is None
    assert cor.find_conv_or_id(cor.parse_term("a & top"), allow_constants=False) is not None
