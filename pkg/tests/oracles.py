"""Independent reference implementations used by the test suite.

Everything here is deliberately naive pure Python: no numpy in the semantic
paths, no shared code with the package beyond the AST dataclasses. Signals
are plain ``(t_min, rows)`` pairs where ``rows[i]`` is the list of samples
of component ``i``; values outside the window repeat the nearest endpoint.
"""

from __future__ import annotations

import itertools
import math
import random

from temprisk.lang import (
    And, BinOp, Call, Const, ConstraintSpec, Neg, Not, Pred, TrueF, Until, UntilPast, Var, desugar,
)


# ---------------------------------------------------------------------------
# Plain signals


class PlainSignal:
    def __init__(self, rows, t_min=0, shifts=None):
        self.rows = [list(map(float, r)) for r in rows]
        self.t_min = t_min
        self.shifts = list(shifts) if shifts is not None else [0] * len(self.rows)

    @property
    def n(self):
        return len(self.rows)

    def at(self, t):
        out = []
        for row, k in zip(self.rows, self.shifts):
            j = t + k - self.t_min
            j = 0 if j < 0 else (len(row) - 1 if j >= len(row) else j)
            out.append(row[j])
        return out

    def shifted(self, shifts):
        return PlainSignal(self.rows, self.t_min, [a + b for a, b in zip(self.shifts, shifts)])


def plain(s) -> PlainSignal:
    """Copy a package Signal (with zero offsets) into a PlainSignal."""
    return PlainSignal([list(map(float, r)) for r in s.values], s.t_min)


# ---------------------------------------------------------------------------
# Expressions and constraints


def eval_expr(e, x):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return x[e.index - 1]
    if isinstance(e, Neg):
        return -eval_expr(e.arg, x)
    if isinstance(e, BinOp):
        a, b = eval_expr(e.left, x), eval_expr(e.right, x)
        return {"+": a + b, "-": a - b, "*": a * b}[e.op] if e.op != "/" else a / b
    if isinstance(e, Call):
        args = [eval_expr(a, x) for a in e.args]
        if e.fn == "abs":
            return abs(args[0])
        if e.fn == "min":
            return min(args)
        if e.fn == "max":
            return max(args)
        if e.fn == "norm2":
            return math.sqrt(sum(a * a for a in args))
    raise TypeError(e)


def beta_c(x: PlainSignal, c: ConstraintSpec) -> int:
    worst = c.default
    for a, b, e in c.pieces:
        for t in range(a, b + 1):
            worst = min(worst, eval_expr(e, x.at(t)))
    return 1 if worst >= 0 else -1


# ---------------------------------------------------------------------------
# STL over the core grammar (TRUE, pred, !, &, U, S), read off the
# inductive definition one operator at a time


def sat(f, x: PlainSignal, t: int) -> bool:
    if isinstance(f, TrueF):
        return True
    if isinstance(f, Pred):
        return eval_expr(f.expr, x.at(t)) >= 0
    if isinstance(f, Not):
        return not sat(f.arg, x, t)
    if isinstance(f, And):
        return sat(f.left, x, t) and sat(f.right, x, t)
    if isinstance(f, Until):
        for t2 in range(t + f.lo, t + f.hi + 1):
            if sat(f.right, x, t2) and all(sat(f.left, x, t1) for t1 in range(t, t2 + 1)):
                return True
        return False
    if isinstance(f, UntilPast):
        for t2 in range(t - f.hi, t - f.lo + 1):
            if sat(f.right, x, t2) and all(sat(f.left, x, t1) for t1 in range(t2, t + 1)):
                return True
        return False
    raise TypeError(f"not a core formula: {f!r}")


def beta_phi(f, x: PlainSignal, t: int) -> int:
    return 1 if sat(desugar(f), x, t) else -1


# ---------------------------------------------------------------------------
# Temporal robustness straight from the sup definitions


def eta_literal(x: PlainSignal, check, r: int) -> int:
    """Signed sup tau <= r with every kappa in [-tau, tau] keeping the sign."""
    b = check(x)
    best = 0
    for tau in range(r + 1):
        if all(check(x.shifted([k] * x.n)) == b for k in range(-tau, tau + 1)):
            best = tau
        else:
            break
    return b * best


def theta_literal(x: PlainSignal, check, r: int, groups) -> int:
    b = check(x)
    best = 0
    for tau in range(r + 1):
        ok = True
        for g in itertools.product(range(-tau, tau + 1), repeat=len(groups)):
            shifts = [0] * x.n
            for gi, members in zip(g, groups):
                for j in members:
                    shifts[j] = gi
            if check(x.shifted(shifts)) != b:
                ok = False
                break
        if not ok:
            break
        best = tau
    return b * best


# ---------------------------------------------------------------------------
# Random instances


def smooth_rows(rng: random.Random, n: int, length: int):
    rows = []
    for _ in range(n):
        terms = [(rng.uniform(0.5, 2.0), rng.uniform(0.02, 0.15), rng.uniform(0, 2 * math.pi))
                 for _ in range(rng.randint(1, 3))]
        rows.append([sum(a * math.sin(w * t + ph) for a, w, ph in terms) for t in range(length)])
    return rows


def random_predicate(rng: random.Random, n: int):
    i = rng.randint(1, n)
    c = round(rng.uniform(-1.0, 1.0), 2)
    if n > 1 and rng.random() < 0.4:
        j = rng.choice([k for k in range(1, n + 1) if k != i])
        return BinOp("-", Const(abs(c) + 0.5), Call("abs", (BinOp("-", Var(i), Var(j)),)))
    if rng.random() < 0.5:
        return BinOp("-", Var(i), Const(c))
    return BinOp("-", Const(c), Var(i))
