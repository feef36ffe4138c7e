"""Discrete-time multivariate signals on the integers.

A :class:`Signal` stores a finite window of samples and extends it to every
integer time by holding the first and last column. Time shifts never copy or
re-sample the stored data: each component carries an integer offset, so that
``sample(shift_sync(s, k), t) == sample(s, t + k)`` holds for every ``t``,
including times outside the stored window, and shifts compose exactly.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import ShapeError, ValidationError


class Signal:
    """Finite-window signal with endpoint-hold extension.

    Parameters
    ----------
    values : array_like, shape (n, L)
        One row per component, one column per integer step.
    t_min : int
        Time index of the first stored column.
    dt : float
        Seconds per step. Metadata only; all arithmetic is in steps.
    offsets : array_like of int, shape (n,), optional
        Per-component time offsets applied on sampling. Normally left at zero
        and produced by the shift functions.
    """

    __slots__ = ("_data", "_t_min", "_dt", "_offsets")

    def __init__(self, values, t_min: int = 0, dt: float = 1.0, offsets=None):
        data = np.array(values, dtype=float, copy=True)
        if data.ndim == 1:
            data = data[None, :]
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ShapeError(f"signal values must be a non-empty n x L matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise ValidationError("signal values must be finite")
        if not dt > 0:
            raise ValidationError(f"dt must be positive, got {dt}")
        data.setflags(write=False)
        if offsets is None:
            off = np.zeros(data.shape[0], dtype=np.int64)
        else:
            off = np.asarray(offsets, dtype=np.int64).copy()
            if off.shape != (data.shape[0],):
                raise ShapeError(f"offsets must have length {data.shape[0]}, got {off.shape}")
        off.setflags(write=False)
        self._data = data
        self._t_min = int(t_min)
        self._dt = float(dt)
        self._offsets = off

    @property
    def n(self) -> int:
        return self._data.shape[0]

    @property
    def t_min(self) -> int:
        return self._t_min

    @property
    def t_max(self) -> int:
        return self._t_min + self._data.shape[1] - 1

    @property
    def length(self) -> int:
        return self._data.shape[1]

    @property
    def dt(self) -> float:
        return self._dt

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    @property
    def base(self) -> np.ndarray:
        """The stored (unshifted) sample matrix."""
        return self._data

    @property
    def values(self) -> np.ndarray:
        """Samples over ``[t_min, t_max]`` with all shifts applied (read-only)."""
        out = self.window(np.arange(self.t_min, self.t_max + 1))
        out.setflags(write=False)
        return out

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.t_min, self.t_max + 1)

    def _index(self, times, offsets):
        # times: (..., T); offsets broadcast against a component axis
        idx = np.asarray(times, dtype=np.int64) + offsets - self._t_min
        return np.clip(idx, 0, self._data.shape[1] - 1)

    def sample(self, t: int) -> np.ndarray:
        """Value vector at integer time ``t`` (length ``n``)."""
        idx = self._index(int(t), self._offsets)
        return self._data[np.arange(self.n), idx]

    def window(self, times) -> np.ndarray:
        """Samples at the given times, shape ``(n, len(times))``."""
        times = np.asarray(times, dtype=np.int64)
        idx = self._index(times[None, :], self._offsets[:, None])
        return np.take_along_axis(self._data, idx, axis=1)

    def window_batch(self, times, extra_offsets) -> np.ndarray:
        """Samples of many shifted copies at once.

        ``extra_offsets`` has shape ``(B, n)``; row ``b`` is an additional
        per-component shift on top of this signal's own offsets. Returns an
        array of shape ``(B, n, len(times))``.
        """
        times = np.asarray(times, dtype=np.int64)
        extra = np.asarray(extra_offsets, dtype=np.int64)
        if extra.ndim != 2 or extra.shape[1] != self.n:
            raise ShapeError(f"extra offsets must have shape (B, {self.n}), got {extra.shape}")
        off = (extra + self._offsets[None, :])[:, :, None]
        idx = self._index(times[None, None, :], off)
        rows = np.arange(self.n)[None, :, None]
        return self._data[rows, idx]

    def with_offsets(self, offsets) -> "Signal":
        """Same stored data, offsets replaced (not added)."""
        out = object.__new__(Signal)
        off = np.asarray(offsets, dtype=np.int64).copy()
        if off.shape != (self.n,):
            raise ShapeError(f"offsets must have length {self.n}, got {off.shape}")
        off.setflags(write=False)
        out._data = self._data
        out._t_min = self._t_min
        out._dt = self._dt
        out._offsets = off
        return out

    def materialize(self) -> "Signal":
        """Signal whose stored window holds the shifted samples, offsets zero."""
        return Signal(self.values, t_min=self.t_min, dt=self.dt)

    def __repr__(self) -> str:
        return (f"Signal(n={self.n}, t=[{self.t_min},{self.t_max}], dt={self.dt}, "
                f"offsets={self._offsets.tolist()})")


class GroupPartition:
    """Disjoint, covering groups of 0-based component indices."""

    __slots__ = ("groups", "n", "_member")

    def __init__(self, groups: Iterable[Iterable[int]], n: int | None = None):
        gs = tuple(tuple(int(i) for i in g) for g in groups)
        flat = [i for g in gs for i in g]
        if n is None:
            n = max(flat) + 1 if flat else 0
        if not gs or any(len(g) == 0 for g in gs):
            raise ValidationError("groups must be nonempty")
        if len(set(flat)) != len(flat):
            raise ValidationError("groups must be disjoint")
        if sorted(flat) != list(range(n)):
            raise ValidationError(f"groups must cover components 0..{n - 1} exactly")
        member = np.empty(n, dtype=np.int64)
        for j, g in enumerate(gs):
            member[list(g)] = j
        member.setflags(write=False)
        self.groups = gs
        self.n = n
        self._member = member

    @classmethod
    def single(cls, n: int) -> "GroupPartition":
        return cls([range(n)], n)

    @classmethod
    def per_component(cls, n: int) -> "GroupPartition":
        return cls([[i] for i in range(n)], n)

    @classmethod
    def parse(cls, text: str, n: int) -> "GroupPartition":
        """Parse the CLI form ``"1,2;3,4"`` (1-based indices)."""
        try:
            groups = [[int(tok) - 1 for tok in part.split(",") if tok.strip()]
                      for part in text.split(";") if part.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad group list {text!r}") from exc
        return cls(groups, n)

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def member(self) -> np.ndarray:
        """Group index of every component."""
        return self._member

    def expand(self, group_shifts) -> np.ndarray:
        """Map per-group shifts ``(..., m)`` to per-component shifts ``(..., n)``."""
        g = np.asarray(group_shifts, dtype=np.int64)
        if g.shape[-1] != self.m:
            raise ShapeError(f"expected {self.m} group shifts, got {g.shape[-1]}")
        return g[..., self._member]

    def format(self) -> str:
        return ";".join(",".join(str(i + 1) for i in g) for g in self.groups)

    def __eq__(self, other):
        return isinstance(other, GroupPartition) and self.groups == other.groups and self.n == other.n

    def __hash__(self):
        return hash((self.groups, self.n))

    def __repr__(self):
        return f"GroupPartition({[list(g) for g in self.groups]})"


def sample(s: Signal, t: int) -> np.ndarray:
    return s.sample(t)


def shift_sync(s: Signal, k: int) -> Signal:
    """Shift every component by ``k`` steps: result(t) = s(t + k)."""
    return s.with_offsets(s.offsets + int(k))


def shift_async(s: Signal, shifts: Sequence[int]) -> Signal:
    """Shift component ``i`` by ``shifts[i]`` steps."""
    k = np.asarray(shifts, dtype=np.int64)
    if k.shape != (s.n,):
        raise ShapeError(f"shift vector has length {k.size}, signal has {s.n} components")
    return s.with_offsets(s.offsets + k)


def shift_grouped(s: Signal, partition: GroupPartition, group_shifts: Sequence[int]) -> Signal:
    """Shift every component of group ``j`` by ``group_shifts[j]``."""
    if partition.n != s.n:
        raise ValidationError(f"partition covers {partition.n} components, signal has {s.n}")
    return shift_async(s, partition.expand(group_shifts))


def sample_equal(a: Signal, b: Signal, times) -> bool:
    """True if both signals agree exactly at every probe time."""
    if a.n != b.n:
        return False
    return bool(np.array_equal(a.window(times), b.window(times)))
