"""Risk measures over empirical cost samples.

Costs follow the convention ``Z = -robustness``: lower is better, and a
negative risk certifies robust satisfaction at the chosen level.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientSamplesError, ValidationError

_INT_TOL = 1e-9


class SampleSet:
    """Immutable ascending tuple of cost samples ``Z^1 <= ... <= Z^N``."""

    __slots__ = ("_z",)

    def __init__(self, samples):
        z = np.sort(np.asarray(samples, dtype=float).ravel())
        if z.size < 1:
            raise ValidationError("a sample set needs at least one sample")
        if not np.all(np.isfinite(z)):
            raise ValidationError("samples must be finite")
        z.setflags(write=False)
        self._z = z

    @property
    def samples(self) -> np.ndarray:
        return self._z

    @property
    def N(self) -> int:
        return self._z.size

    def order_stat(self, i: int) -> float:
        """1-based order statistic, clamped to ``[1, N]``."""
        return float(self._z[min(max(i, 1), self.N) - 1])

    def __len__(self):
        return self.N

    def __add__(self, c: float) -> "SampleSet":
        return SampleSet(self._z + c)

    def __repr__(self):
        return f"SampleSet(N={self.N}, min={self._z[0]}, max={self._z[-1]})"


def gamma(N: int, delta: float) -> float:
    return math.sqrt(math.log(2.0 / delta) / (2.0 * N))


def required_samples(beta: float, delta: float) -> int:
    """Smallest N with ``gamma(N, delta) <= min(beta, 1 - beta)``."""
    slack = min(beta, 1.0 - beta)
    n = math.ceil(math.log(2.0 / delta) / (2.0 * slack * slack))
    while gamma(n, delta) > slack:
        n += 1
    return n


def _ceil(x: float) -> int:
    r = round(x)
    return int(r) if abs(x - r) <= _INT_TOL * max(1.0, abs(x)) else math.ceil(x)


def _floor(x: float) -> int:
    r = round(x)
    return int(r) if abs(x - r) <= _INT_TOL * max(1.0, abs(x)) else math.floor(x)


def var_indices(N: int, beta: float, delta: float) -> tuple:
    """1-based order-statistic indices ``(lower, upper)`` bracketing VaR_beta."""
    if not (0 < beta < 1 and 0 < delta < 1):
        raise ValidationError(f"beta and delta must lie in (0, 1), got beta={beta}, delta={delta}")
    g = gamma(N, delta)
    if g > min(beta, 1.0 - beta):
        raise InsufficientSamplesError(N, beta, delta, required_samples(beta, delta))
    upper = min(max(_ceil(N * (beta + g)), 1), N)
    lower = min(max(_floor(N * (beta - g)), 1), N)
    return lower, upper


def var_bounds(z: SampleSet, beta: float, delta: float) -> tuple:
    """Order-statistic bounds ``(lower, upper)`` that contain VaR_beta w.p. >= 1 - delta."""
    lo, hi = var_indices(z.N, beta, delta)
    return z.order_stat(lo), z.order_stat(hi)


def var_exact(support, probs=None, beta: float = 0.95) -> float:
    """VaR_beta of a finite discrete distribution.

    ``support`` is either a mapping ``{value: probability}`` or a sequence of
    values paired with ``probs``.
    """
    if probs is None:
        items = dict(support)
        xs = np.array(list(items.keys()), dtype=float)
        ps = np.array(list(items.values()), dtype=float)
    else:
        xs = np.asarray(support, dtype=float)
        ps = np.asarray(probs, dtype=float)
    if xs.shape != ps.shape or xs.size == 0:
        raise ValidationError("support and probabilities must be nonempty and aligned")
    if np.any(ps < 0) or abs(ps.sum() - 1.0) > 1e-9:
        raise ValidationError(f"probabilities must be nonnegative and sum to 1 (sum={ps.sum()})")
    if not 0 < beta < 1:
        raise ValidationError(f"beta must lie in (0, 1), got {beta}")
    order = np.argsort(xs, kind="stable")
    xs, ps = xs[order], ps[order]
    cdf = np.cumsum(ps)
    hit = np.nonzero(cdf >= beta - 1e-12)[0]
    return float(xs[hit[0]] if hit.size else xs[-1])


def cvar_estimate(z: SampleSet, beta: float) -> float:
    """Empirical CVaR: min over sample points of ``a + E[(Z - a)^+] / (1 - beta)``."""
    if not 0 < beta < 1:
        raise ValidationError(f"beta must lie in (0, 1), got {beta}")
    x = z.samples
    N = x.size
    # sum_{i} max(x_i - x_j, 0) over sorted x: suffix sums minus count * x_j
    suffix = np.concatenate([np.cumsum(x[::-1])[::-1], [0.0]])
    above = suffix[1:] - x * (N - 1 - np.arange(N))
    # ties: x_i == x_j contribute zero either way
    obj = x + above / ((1.0 - beta) * N)
    return float(obj.min())


def expectation(z: SampleSet) -> float:
    return float(np.mean(z.samples))


def empirical_var(z: SampleSet, beta: float) -> float:
    """Plain empirical beta-quantile ``Z^ceil(N beta)``."""
    return z.order_stat(_ceil(z.N * beta))


@dataclass
class RiskReport:
    """Risk estimates of one cost sample set."""

    N: int
    expectation: float
    var: dict = field(default_factory=dict)  # (beta, delta) -> (lower, upper)
    cvar: dict = field(default_factory=dict)  # beta -> estimate
    violation_count: int = 0
    saturated_count: int = 0
    errors: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "N": self.N,
            "expectation": self.expectation,
            "var": [{"beta": b, "delta": d, "lower": lo, "upper": hi}
                    for (b, d), (lo, hi) in sorted(self.var.items())],
            "cvar": [{"beta": b, "estimate": v} for b, v in sorted(self.cvar.items())],
            "violation_count": self.violation_count,
            "saturated_count": self.saturated_count,
            "errors": list(self.errors),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RiskReport":
        return cls(
            N=d["N"],
            expectation=d["expectation"],
            var={(v["beta"], v["delta"]): (v["lower"], v["upper"]) for v in d["var"]},
            cvar={c["beta"]: c["estimate"] for c in d["cvar"]},
            violation_count=d["violation_count"],
            saturated_count=d.get("saturated_count", 0),
            errors=list(d.get("errors", [])),
        )

    def csv_row(self, label: str = "") -> dict:
        """One table row: upper/lower VaR per (beta, delta), CVaR per beta, E, #."""
        row = {"label": label}
        for (b, d), (lo, hi) in sorted(self.var.items()):
            row[f"VaR_upper_{b:g}"] = hi
            row[f"VaR_lower_{b:g}"] = lo
        for b, v in sorted(self.cvar.items()):
            row[f"CVaR_{b:g}"] = v
        row["E"] = self.expectation
        row["#"] = self.violation_count
        return row

    def to_csv(self, label: str = "") -> str:
        row = self.csv_row(label)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        w.writeheader()
        w.writerow(row)
        return buf.getvalue()


def risk_report(z: SampleSet, betas=(), delta: float | None = None, cvar_betas=None,
                violation_count: int = 0, saturated_count: int = 0, strict: bool = True) -> RiskReport:
    """Evaluate VaR bounds for each beta (at ``delta``), CVaR and expectation.

    With ``strict=False`` an infeasible (beta, delta) pair is recorded in
    ``errors`` instead of raised.
    """
    rep = RiskReport(N=z.N, expectation=expectation(z), violation_count=violation_count,
                     saturated_count=saturated_count)
    for b in betas:
        if delta is not None:
            try:
                rep.var[(b, delta)] = var_bounds(z, b, delta)
            except InsufficientSamplesError as exc:
                if strict:
                    raise
                rep.errors.append(str(exc))
    for b in (betas if cvar_betas is None else cvar_betas):
        rep.cvar[b] = cvar_estimate(z, b)
    return rep
