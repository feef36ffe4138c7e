"""Synchronous and asynchronous temporal robustness.

Both quantities are computed by searching for the smallest shift that flips
the verdict of a checker. ``eta`` tries ``+k`` and ``-k`` for ``k = 1..r``;
``theta`` walks Chebyshev shells ``||g||_inf = tau`` in group-shift space, so
it stops as soon as a flip is found instead of enumerating the whole cube.
A value that never flips within ``r`` is reported as saturated at ``r``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import ResourceError, ValidationError
from .lang import ConstraintSpec, Formula
from .semantics import beta_c_batch, beta_phi_batch
from .signal import GroupPartition, Signal, shift_async

BRUTEFORCE_GUARD = 1_000_000
_BATCH = 8192


@dataclass(frozen=True)
class RobustnessValue:
    sign: int
    magnitude: int
    saturated: bool
    checker_calls: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValidationError(f"sign must be -1 or +1, got {self.sign}")
        if self.magnitude < 0:
            raise ValidationError("magnitude must be nonnegative")

    @property
    def signed(self) -> int:
        return self.sign * self.magnitude

    def to_dict(self) -> dict:
        return {"sign": self.sign, "magnitude": self.magnitude, "saturated": self.saturated,
                "signed": self.signed, "checker_calls": self.checker_calls}


# ---------------------------------------------------------------------------
# Checkers


class Checker:
    """Sign evaluator ``Signal -> {-1, +1}``.

    Subclasses override :meth:`signs`, which evaluates many per-component
    shifted copies of one signal at once.
    """

    def __call__(self, s: Signal) -> int:
        return int(self.signs(s, np.zeros((1, s.n), dtype=np.int64))[0])

    def signs(self, s: Signal, offsets) -> np.ndarray:
        raise NotImplementedError


class ConstraintChecker(Checker):
    def __init__(self, spec: ConstraintSpec):
        self.spec = spec

    def signs(self, s, offsets):
        return beta_c_batch(s, self.spec, offsets)

    def __repr__(self):
        return f"ConstraintChecker({self.spec!r})"


class FormulaChecker(Checker):
    def __init__(self, formula: Formula, t: int = 0):
        self.formula = formula
        self.t = int(t)

    def signs(self, s, offsets):
        return beta_phi_batch(s, self.formula, self.t, offsets)

    def __repr__(self):
        return f"FormulaChecker({self.formula!r}, t={self.t})"


class FunctionChecker(Checker):
    """Adapter for an arbitrary ``Signal -> int`` callable (no batching)."""

    def __init__(self, fn: Callable[[Signal], int]):
        self.fn = fn

    def __call__(self, s):
        return int(self.fn(s))

    def signs(self, s, offsets):
        offsets = np.asarray(offsets, dtype=np.int64)
        return np.array([int(self.fn(shift_async(s, row))) for row in offsets], dtype=np.int64)


def as_checker(k) -> Checker:
    if isinstance(k, Checker):
        return k
    if isinstance(k, ConstraintSpec):
        return ConstraintChecker(k)
    if callable(k):
        return FunctionChecker(k)
    raise TypeError(f"cannot use {k!r} as a checker")


# ---------------------------------------------------------------------------
# Group-shift evaluation


class GroupShiftEvaluator:
    """Checker signs for group-shifted copies of one signal.

    With ``memo=True`` results are cached by group-shift vector for the
    lifetime of this object; Monte Carlo runs whose realizations are pure
    shifts of one nominal signal share a single evaluator.
    """

    _LATTICE_LIMIT = 20_000_000

    def __init__(self, s: Signal, checker, partition: GroupPartition, memo: bool = False):
        if partition.n != s.n:
            raise ValidationError(f"partition covers {partition.n} components, signal has {s.n}")
        self.signal = s
        self.checker = as_checker(checker)
        self.partition = partition
        self.calls = 0
        self.memo = memo
        self._radius = -1
        self._lattice = None
        self._dict = {}

    @property
    def m(self) -> int:
        return self.partition.m

    def _raw(self, g: np.ndarray) -> np.ndarray:
        out = np.empty(len(g), dtype=np.int8)
        for start in range(0, len(g), _BATCH):
            chunk = g[start:start + _BATCH]
            out[start:start + len(chunk)] = self.checker.signs(self.signal, self.partition.expand(chunk))
        self.calls += len(g)
        return out

    def _grow(self, radius: int) -> bool:
        if (2 * radius + 1) ** self.m > self._LATTICE_LIMIT:
            return False
        new = np.zeros((2 * radius + 1,) * self.m, dtype=np.int8)
        if self._lattice is not None:
            r0 = self._radius
            inner = tuple(slice(radius - r0, radius + r0 + 1) for _ in range(self.m))
            new[inner] = self._lattice
        self._lattice = new
        self._radius = radius
        return True

    def __call__(self, g) -> np.ndarray:
        g = np.asarray(g, dtype=np.int64).reshape(-1, self.m)
        if not self.memo:
            return self._raw(g)
        need = int(np.abs(g).max()) if len(g) else 0
        if need > self._radius:
            if not self._grow(max(need, 2 * self._radius + 1)) and not self._grow(need):
                return self._dict_lookup(g)
        idx = tuple((g + self._radius).T)
        vals = self._lattice[idx]
        unknown = vals == 0
        if unknown.any():
            fresh = self._raw(g[unknown])
            vals[unknown] = fresh
            self._lattice[tuple((g[unknown] + self._radius).T)] = fresh
        return vals.astype(np.int64)

    def _dict_lookup(self, g):
        out = np.empty(len(g), dtype=np.int64)
        missing = []
        for i, row in enumerate(map(tuple, g)):
            v = self._dict.get(row)
            if v is None:
                missing.append(i)
            else:
                out[i] = v
        if missing:
            fresh = self._raw(g[missing])
            for i, v in zip(missing, fresh):
                self._dict[tuple(g[i])] = int(v)
                out[i] = v
        return out


@lru_cache(maxsize=1024)
def shell(m: int, tau: int) -> np.ndarray:
    """All integer vectors of length ``m`` with ``max |g_i| == tau`` (read-only).

    Each vector is produced once: grouped by the first coordinate that
    reaches ``|tau|``.
    """
    if tau == 0:
        out = np.zeros((1, m), dtype=np.int64)
        out.setflags(write=False)
        return out
    parts = []
    inner = np.arange(-tau + 1, tau)
    full = np.arange(-tau, tau + 1)
    for j in range(m):
        axes = [inner] * j + [np.array([-tau, tau])] + [full] * (m - j - 1)
        grid = np.meshgrid(*axes, indexing="ij")
        parts.append(np.stack([a.ravel() for a in grid], axis=1))
    out = np.concatenate(parts).astype(np.int64)
    out.setflags(write=False)
    return out


def scan_eta(evaluate: GroupShiftEvaluator, center, r: int) -> RobustnessValue:
    """Synchronous robustness of the signal shifted by group vector ``center``."""
    if r < 0:
        raise ValidationError("r must be nonnegative")
    center = np.asarray(center, dtype=np.int64).reshape(1, -1)
    before = evaluate.calls
    b = int(evaluate(center)[0])
    ones = np.ones((1, center.shape[1]), dtype=np.int64)
    for k in range(1, r + 1):
        probe = np.concatenate([center + k * ones, center - k * ones])
        if np.any(evaluate(probe) != b):
            return RobustnessValue(b, k - 1, False, evaluate.calls - before)
    return RobustnessValue(b, r, True, evaluate.calls - before)


def scan_theta(evaluate: GroupShiftEvaluator, center, r: int) -> RobustnessValue:
    """Asynchronous robustness by shell scan around group vector ``center``."""
    if r < 0:
        raise ValidationError("r must be nonnegative")
    center = np.asarray(center, dtype=np.int64).reshape(1, -1)
    m = center.shape[1]
    before = evaluate.calls
    b = int(evaluate(center)[0])
    for tau in range(1, r + 1):
        if np.any(evaluate(center + shell(m, tau)) != b):
            return RobustnessValue(b, tau - 1, False, evaluate.calls - before)
    return RobustnessValue(b, r, True, evaluate.calls - before)


# ---------------------------------------------------------------------------
# Public API


def eta(s: Signal, k, r: int) -> RobustnessValue:
    """Synchronous temporal robustness, saturating at ``r``."""
    ev = GroupShiftEvaluator(s, k, GroupPartition.single(s.n))
    return scan_eta(ev, [0], r)


def theta(s: Signal, k, r: int, partition: GroupPartition | None = None) -> RobustnessValue:
    """Asynchronous temporal robustness over ``partition`` (default: per component)."""
    p = partition if partition is not None else GroupPartition.per_component(s.n)
    ev = GroupShiftEvaluator(s, k, p)
    return scan_theta(ev, np.zeros(p.m, dtype=np.int64), r)


def theta_bruteforce(s: Signal, k, r: int, partition: GroupPartition | None = None) -> RobustnessValue:
    """Asynchronous robustness by enumerating every group shift in ``[-r, r]^m``."""
    if r < 0:
        raise ValidationError("r must be nonnegative")
    p = partition if partition is not None else GroupPartition.per_component(s.n)
    total = (2 * r + 1) ** p.m
    if total > BRUTEFORCE_GUARD:
        raise ResourceError(f"brute force needs {total} evaluations (guard {BRUTEFORCE_GUARD})")
    checker = as_checker(k)
    b = checker(s)
    axes = np.meshgrid(*([np.arange(-r, r + 1)] * p.m), indexing="ij")
    g = np.stack([a.ravel() for a in axes], axis=1).astype(np.int64)
    signs = np.concatenate([checker.signs(s, p.expand(g[i:i + _BATCH])) for i in range(0, len(g), _BATCH)])
    flips = np.abs(g[signs != b]).max(axis=1) if np.any(signs != b) else np.array([], dtype=np.int64)
    calls = total + 1
    if flips.size == 0:
        return RobustnessValue(b, r, True, calls)
    return RobustnessValue(b, int(flips.min()) - 1, False, calls)


def eta_stl(s: Signal, formula: Formula, t: int, r: int) -> RobustnessValue:
    return eta(s, FormulaChecker(formula, t), r)


def theta_stl(s: Signal, formula: Formula, t: int, r: int,
              partition: GroupPartition | None = None) -> RobustnessValue:
    return theta(s, FormulaChecker(formula, t), r, partition)
