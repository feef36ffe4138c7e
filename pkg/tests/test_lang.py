import pytest
from hypothesis import given, settings, strategies as st

from temprisk.errors import SpecSyntaxError, ValidationError
from temprisk.lang import (
    And, Always, BinOp, Call, Const, ConstraintSpec, Eventually, EventuallyPast, Neg, Not, Or,
    Pred, TrueF, Until, UntilPast, Var, AlwaysPast, desugar, format_constraint, format_expr,
    format_formula, formula_depth, parse_constraint, parse_formula, parse_predicate,
)


def test_predicate_precedence():
    e = parse_predicate("1 - abs(x[1] - x[2]) * 2")
    assert e == BinOp("-", Const(1.0), BinOp("*", Call("abs", (BinOp("-", Var(1), Var(2)),)), Const(2.0)))


def test_comparison_sugar():
    f = parse_formula("pred{x[1] >= 2} & pred{x[2] <= 3} & pred{x[1] >= 0}")
    assert f == And(And(Pred(BinOp("-", Var(1), Const(2.0))), Pred(BinOp("-", Const(3.0), Var(2)))),
                    Pred(Var(1)))


def test_temporal_operators_and_dt():
    f = parse_formula("F[0,1] G[0,0.5] pred{x[1]}", dt=0.1)
    assert f == Eventually(Always(Pred(Var(1)), 0, 5), 0, 10)
    assert format_formula(f, 0.1) == "F[0,1] G[0,0.5] pred{x[1]}"


def test_until_binds_tighter_than_and():
    f = parse_formula("pred{x[1]} U[0,2] pred{x[2]} & TRUE")
    assert f == And(Until(Pred(Var(1)), Pred(Var(2)), 0, 2), TrueF())


def test_let_bindings():
    f = parse_formula("let a = pred{x[1]}\nlet b = F[0,3] a\nG[0,2] b | a")
    a = Pred(Var(1))
    assert f == Or(Always(Eventually(a, 0, 3), 0, 2), a)


@pytest.mark.parametrize("text, where", [
    ("F[3,1] pred{x[1]}", (1, 2)),
    ("F[0,1] pred{x[1]", (1, 17)),
    ("pred{x[1]} & nope", (1, 14)),
])
def test_errors_carry_location(text, where):
    with pytest.raises((SpecSyntaxError, ValidationError)) as exc:
        parse_formula(text)
    if isinstance(exc.value, SpecSyntaxError):
        assert (exc.value.line, exc.value.column) == where


def test_negative_and_reversed_intervals():
    with pytest.raises(ValidationError):
        Eventually(TrueF(), -1, 2)
    with pytest.raises(ValidationError):
        Always(TrueF(), 3, 2)
    with pytest.raises((SpecSyntaxError, ValidationError)):
        parse_formula("G[2,1] TRUE")


def test_function_arity():
    with pytest.raises(SpecSyntaxError):
        parse_predicate("min(x[1])")
    with pytest.raises(SpecSyntaxError):
        parse_predicate("abs(x[1], x[2])")
    assert parse_predicate("norm2(x[1], x[2], x[3])") == Call("norm2", (Var(1), Var(2), Var(3)))


def test_desugar_core_only():
    f = parse_formula("G[0,2] (pred{x[1]} | H[1,2] pred{x[2]}) & P[0,1] TRUE")
    core = desugar(f)

    def walk(g):
        assert isinstance(g, (TrueF, Pred, Not, And, Until, UntilPast)), g
        for child in ("arg", "left", "right"):
            if hasattr(g, child):
                walk(getattr(g, child))

    walk(core)


def test_constraint_file():
    c = parse_constraint("# comment\non [145,155]: 1 - abs(x[1] - x[2])\ndefault: 2\n")
    assert c.default == 2.0
    assert c.pieces[0][:2] == (145, 155)
    assert parse_constraint(format_constraint(c)) == c


def test_constraint_overlap_rejected():
    with pytest.raises(ValidationError):
        parse_constraint("on [0,10]: x[1]\non [10,12]: x[2]\n")
    with pytest.raises(ValidationError):
        ConstraintSpec((), float("inf"))


# --- round-trip over generated ASTs ----------------------------------------

consts = st.floats(-50, 50, allow_nan=False).map(lambda v: Const(round(v, 3)))
exprs = st.recursive(
    st.one_of(consts, st.integers(1, 3).map(Var)),
    lambda sub: st.one_of(
        sub.map(Neg),
        st.tuples(st.sampled_from("+-*/"), sub, sub).map(lambda t: BinOp(*t)),
        sub.map(lambda e: Call("abs", (e,))),
        st.lists(sub, min_size=2, max_size=3).flatmap(
            lambda args: st.sampled_from(["min", "max", "norm2"]).map(lambda fn: Call(fn, tuple(args)))),
    ),
    max_leaves=6,
)
intervals = st.tuples(st.integers(0, 5), st.integers(0, 5)).map(lambda t: (min(t), max(t)))
formulas = st.recursive(
    st.one_of(st.just(TrueF()), exprs.map(Pred)),
    lambda sub: st.one_of(
        sub.map(Not),
        st.tuples(sub, sub).map(lambda t: And(*t)),
        st.tuples(sub, sub).map(lambda t: Or(*t)),
        st.tuples(sub, sub, intervals).map(lambda t: Until(t[0], t[1], *t[2])),
        st.tuples(sub, sub, intervals).map(lambda t: UntilPast(t[0], t[1], *t[2])),
        st.tuples(st.sampled_from([Eventually, Always, EventuallyPast, AlwaysPast]), sub, intervals)
        .map(lambda t: t[0](t[1], *t[2])),
    ),
    max_leaves=6,
)


@given(exprs)
@settings(max_examples=200)
def test_expr_round_trip(e):
    assert parse_predicate(format_expr(e)) == e


@given(formulas, st.sampled_from([1.0, 0.1, 0.25]))
@settings(max_examples=200)
def test_formula_round_trip(f, dt):
    text = format_formula(f, dt)
    assert parse_formula(text, dt) == f
    assert format_formula(parse_formula(text, dt), dt) == text


def test_depth():
    assert formula_depth(parse_formula("F[0,1] (pred{x[1]} & !TRUE)")) == 4
