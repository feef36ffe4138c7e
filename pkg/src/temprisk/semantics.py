"""Boolean satisfaction of constraint specs and STL formulas.

Every evaluator has a batched form taking an ``(B, n)`` array of extra
per-component shifts, so a robustness scan evaluates a whole shell of shifted
signals in one numpy pass.
"""

from __future__ import annotations

import numpy as np

from .errors import SpecificationError, ValidationError
from .lang import (
    Always, AlwaysPast, And, ConstraintSpec, Eventually, EventuallyPast, Formula,
    Not, Or, Pred, TrueF, Until, UntilPast, eval_expr, formula_max_index,
)
from .signal import Signal

SAT = 1
VIOL = -1


def _check_constraint(s: Signal, c: ConstraintSpec):
    if c.default < 0:
        raise SpecificationError("constraint violated everywhere by default (default value < 0)")
    if c.max_index() > s.n:
        raise ValidationError(f"constraint references x[{c.max_index()}] but signal has {s.n} components")


def _zero_offsets(s: Signal):
    return np.zeros((1, s.n), dtype=np.int64)


def constraint_min_batch(s: Signal, c: ConstraintSpec, offsets) -> np.ndarray:
    """``inf_t c(x(t), t)`` for each shifted copy; shape ``(B,)``."""
    _check_constraint(s, c)
    offsets = np.asarray(offsets, dtype=np.int64)
    out = np.full(offsets.shape[0], float(c.default))
    for a, b, expr in c.pieces:
        comps = s.window_batch(np.arange(a, b + 1), offsets)
        vals = np.broadcast_to(eval_expr(expr, comps.transpose(1, 0, 2)), (offsets.shape[0], b - a + 1))
        out = np.minimum(out, vals.min(axis=1))
    return out


def spatial_robustness(s: Signal, c: ConstraintSpec) -> float:
    """Infimum over all integer times of ``c(x(t), t)``."""
    return float(constraint_min_batch(s, c, _zero_offsets(s))[0])


def beta_c_batch(s: Signal, c: ConstraintSpec, offsets) -> np.ndarray:
    return np.where(constraint_min_batch(s, c, offsets) >= 0, SAT, VIOL)


def beta_c(s: Signal, c: ConstraintSpec) -> int:
    """+1 iff ``c(x(t), t) >= 0`` at every integer time."""
    return int(beta_c_batch(s, c, _zero_offsets(s))[0])


# ---------------------------------------------------------------------------
# STL


def _sat(f: Formula, s: Signal, offsets: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Boolean satisfaction at every time in ``[lo, hi]``; shape ``(B, hi-lo+1)``."""
    B = offsets.shape[0]
    L = hi - lo + 1
    if isinstance(f, TrueF):
        return np.ones((B, L), dtype=bool)
    if isinstance(f, Pred):
        comps = s.window_batch(np.arange(lo, hi + 1), offsets)
        vals = eval_expr(f.expr, comps.transpose(1, 0, 2))
        return np.broadcast_to(np.asarray(vals) >= 0, (B, L)).copy()
    if isinstance(f, Not):
        return ~_sat(f.arg, s, offsets, lo, hi)
    if isinstance(f, And):
        return _sat(f.left, s, offsets, lo, hi) & _sat(f.right, s, offsets, lo, hi)
    if isinstance(f, Or):
        return _sat(f.left, s, offsets, lo, hi) | _sat(f.right, s, offsets, lo, hi)
    if isinstance(f, (Eventually, Always)):
        a, b = f.lo, f.hi
        inner = _sat(f.arg, s, offsets, lo + a, hi + b)
        if isinstance(f, Eventually):
            out = np.zeros((B, L), dtype=bool)
            for k in range(b - a + 1):
                out |= inner[:, k:k + L]
        else:
            out = np.ones((B, L), dtype=bool)
            for k in range(b - a + 1):
                out &= inner[:, k:k + L]
        return out
    if isinstance(f, (EventuallyPast, AlwaysPast)):
        a, b = f.lo, f.hi
        inner = _sat(f.arg, s, offsets, lo - b, hi - a)
        if isinstance(f, EventuallyPast):
            out = np.zeros((B, L), dtype=bool)
            for k in range(b - a + 1):
                out |= inner[:, k:k + L]
        else:
            out = np.ones((B, L), dtype=bool)
            for k in range(b - a + 1):
                out &= inner[:, k:k + L]
        return out
    if isinstance(f, Until):
        a, b = f.lo, f.hi
        right = _sat(f.right, s, offsets, lo + a, hi + b)
        left = _sat(f.left, s, offsets, lo, hi + b)
        out = np.zeros((B, L), dtype=bool)
        held = left[:, 0:L].copy()
        for k in range(b + 1):
            if k:
                held &= left[:, k:k + L]
            if k >= a:
                out |= right[:, k - a:k - a + L] & held
        return out
    if isinstance(f, UntilPast):
        a, b = f.lo, f.hi
        right = _sat(f.right, s, offsets, lo - b, hi - a)
        left = _sat(f.left, s, offsets, lo - b, hi)
        out = np.zeros((B, L), dtype=bool)
        held = left[:, b:b + L].copy()
        for k in range(b + 1):
            if k:
                held &= left[:, b - k:b - k + L]
            if k >= a:
                # right covers [lo-b, hi-a]; time t-k sits at column (t-lo) + (b-k)
                out |= right[:, b - k:b - k + L] & held
        return out
    raise TypeError(f"not a formula: {f!r}")


def _check_formula(s: Signal, f: Formula):
    k = formula_max_index(f)
    if k > s.n:
        raise ValidationError(f"formula references x[{k}] but signal has {s.n} components")


def beta_phi_batch(s: Signal, f: Formula, t: int, offsets) -> np.ndarray:
    _check_formula(s, f)
    offsets = np.asarray(offsets, dtype=np.int64)
    sat = _sat(f, s, offsets, int(t), int(t))[:, 0]
    return np.where(sat, SAT, VIOL)


def beta_phi(s: Signal, f: Formula, t: int = 0) -> int:
    """+1 iff ``s`` satisfies ``f`` at time ``t``."""
    return int(beta_phi_batch(s, f, t, _zero_offsets(s))[0])


def beta_phi_trace(s: Signal, f: Formula, times) -> np.ndarray:
    """Satisfaction signs at each time in a contiguous range."""
    times = np.asarray(times, dtype=np.int64)
    _check_formula(s, f)
    sat = _sat(f, s, _zero_offsets(s), int(times[0]), int(times[-1]))[0]
    return np.where(sat, SAT, VIOL)
