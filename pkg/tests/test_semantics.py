import random

import numpy as np
import pytest

import oracles
from temprisk.errors import SpecificationError, ValidationError
from temprisk.lang import ConstraintSpec, parse_constraint, parse_formula
from temprisk.scenarios import example1_signal
from temprisk.semantics import beta_c, beta_phi, beta_phi_trace, spatial_robustness
from temprisk.signal import Signal, shift_async


def test_example1_satisfied():
    s, c = example1_signal()
    assert beta_c(s, c) == 1
    assert spatial_robustness(s, c) > 0


def test_default_only_constraint():
    s = Signal([[0.0, 1.0]])
    assert beta_c(s, ConstraintSpec((), 0.0)) == 1
    with pytest.raises(SpecificationError):
        beta_c(s, ConstraintSpec((), -1.0))


def test_index_out_of_range():
    s = Signal([[0.0, 1.0]])
    with pytest.raises(ValidationError):
        beta_c(s, parse_constraint("on [0,1]: x[2]"))
    with pytest.raises(ValidationError):
        beta_phi(s, parse_formula("pred{x[3]}"))


def test_boundary_zero_is_satisfied():
    s = Signal([[0.0, 0.0, 0.0]])
    assert beta_c(s, parse_constraint("on [0,2]: x[1]")) == 1
    assert beta_phi(s, parse_formula("pred{x[1]}")) == 1
    assert beta_phi(s, parse_formula("pred{0 - 1e-12 + x[1]}")) == -1


def test_true_and_until_endpoint():
    s = Signal([[0, 0, 1, 1]])
    assert beta_phi(s, parse_formula("TRUE")) == 1
    # left must hold up to and including the witness time
    assert beta_phi(s, parse_formula("pred{x[1] - 1} U[2,2] pred{x[1] - 1}")) == -1
    assert beta_phi(s, parse_formula("pred{x[1] <= 0} U[0,2] pred{x[1] - 1}")) == -1
    assert beta_phi(s, parse_formula("TRUE U[2,2] pred{x[1] - 1}")) == 1


def test_past_operators():
    s = Signal([[1, 0, 0, 0, 0]])
    f = parse_formula("P[3,4] pred{x[1] - 1}")
    assert list(beta_phi_trace(s, f, range(0, 5))) == [1, 1, 1, 1, 1]
    g = parse_formula("P[1,2] pred{x[1] - 1}")
    assert list(beta_phi_trace(s, g, range(0, 5))) == [1, 1, 1, -1, -1]


def test_random_formulas_match_literal_semantics():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 3)
        rows = oracles.smooth_rows(rng, n, 60)
        s = Signal(rows)
        text = _random_formula_text(rng, n, 3)
        f = parse_formula(text)
        t = rng.randint(0, 59)
        assert beta_phi(s, f, t) == oracles.beta_phi(f, oracles.PlainSignal(rows), t), text


def test_shifted_constraint_matches_literal():
    rng = random.Random(5)
    for _ in range(30):
        rows = oracles.smooth_rows(rng, 2, 80)
        c = ConstraintSpec(((30, 50, oracles.random_predicate(rng, 2)),), 1.0)
        k = [rng.randint(-10, 10), rng.randint(-10, 10)]
        got = beta_c(shift_async(Signal(rows), k), c)
        assert got == oracles.beta_c(oracles.PlainSignal(rows).shifted(k), c)


def _random_formula_text(rng, n, depth):
    if depth <= 1 or rng.random() < 0.25:
        i = rng.randint(1, n)
        return f"pred{{x[{i}] - {rng.uniform(-1, 1):.2f}}}"
    op = rng.choice(["!", "&", "|", "U", "S", "F", "G", "P", "H"])
    a = rng.randint(0, 4)
    b = a + rng.randint(0, 4)
    if op == "!":
        return f"!({_random_formula_text(rng, n, depth - 1)})"
    if op in "&|":
        return f"({_random_formula_text(rng, n, depth - 1)}) {op} ({_random_formula_text(rng, n, depth - 1)})"
    if op in "US":
        return (f"({_random_formula_text(rng, n, depth - 1)}) {op}[{a},{b}] "
                f"({_random_formula_text(rng, n, depth - 1)})")
    return f"{op}[{a},{b}] ({_random_formula_text(rng, n, depth - 1)})"
