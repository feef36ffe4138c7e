"""Seeded stochastic process models and the Monte Carlo risk pipeline.

A realization is built from a deterministic base generator, optional Gaussian
noise on named generator parameters, and one random time shift per component
group. Realization ``i`` of a model with seed ``s`` draws from its own
PCG64 stream seeded by ``SeedSequence([s, i])``, so realizations are
reproducible individually and independent of evaluation order.

Draw order inside a stream: one Gaussian per noisy parameter (sorted by
name), then one shift per group (in group order). Gaussians use the
Box-Muller cosine branch on two uniforms; Poisson delays use CDF inversion on
one uniform. Both transforms are spelled out here so that samples do not
depend on numpy's internal sampler implementations.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GenerationError, ValidationError
from .risk import RiskReport, SampleSet, risk_report
from .robustness import (
    GroupShiftEvaluator, RobustnessValue, as_checker, scan_eta, scan_theta,
)
from .signal import GroupPartition, Signal, shift_grouped

log = logging.getLogger(__name__)

GENERATORS: dict = {}


def register_generator(name: str):
    """Register a base trajectory generator ``f(**params) -> Signal``."""
    def deco(fn):
        GENERATORS[name] = fn
        return fn
    return deco


def stream(seed: int, i: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed) & (2**64 - 1), int(i)])))


def gauss(rng: np.random.Generator) -> float:
    u1 = rng.random()
    u2 = rng.random()
    return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)


def poisson(rng: np.random.Generator, lam: float) -> int:
    u = rng.random()
    k = 0
    p = math.exp(-lam)
    cdf = p
    while u > cdf and p > 0:
        k += 1
        p *= lam / k
        cdf += p
    return k


@dataclass(frozen=True)
class ShiftDistribution:
    """Distribution of a group's time shift ``k`` (realization ``x(t + k)``).

    ``fixed``: always ``k``. ``uniform``: integer uniform on ``[-d, d]``.
    ``poisson``: a delay ``D ~ Poisson(lam)``, i.e. ``k = -D``.
    """

    kind: str = "fixed"
    k: int = 0
    d: int = 0
    lam: float = 1.0

    def __post_init__(self):
        if self.kind not in ("fixed", "uniform", "poisson"):
            raise ValidationError(f"unknown shift distribution {self.kind!r}")
        if self.d < 0:
            raise ValidationError("uniform shift bound d must be >= 0")
        if self.kind == "poisson" and not self.lam > 0:
            raise ValidationError("Poisson rate must be > 0")

    @classmethod
    def fixed(cls, k: int = 0):
        return cls("fixed", k=int(k))

    @classmethod
    def uniform(cls, d: int):
        return cls("uniform", d=int(d))

    @classmethod
    def poisson(cls, lam: float):
        return cls("poisson", lam=float(lam))

    def draw(self, rng: np.random.Generator) -> int:
        if self.kind == "fixed":
            return self.k
        if self.kind == "uniform":
            return int(rng.integers(-self.d, self.d + 1))
        return -poisson(rng, self.lam)

    @property
    def bound(self) -> int | None:
        """Largest possible ``|k|``, or None if unbounded."""
        if self.kind == "fixed":
            return abs(self.k)
        if self.kind == "uniform":
            return self.d
        return None

    def to_dict(self):
        if self.kind == "fixed":
            return {"kind": "fixed", "k": self.k}
        if self.kind == "uniform":
            return {"kind": "uniform", "d": self.d}
        return {"kind": "poisson", "lam": self.lam}

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


@dataclass
class ProcessModel:
    generator: str | Callable
    params: dict
    partition: GroupPartition
    shifts: list
    noise: dict = field(default_factory=dict)  # parameter name -> sigma
    seed: int = 0

    def __post_init__(self):
        if len(self.shifts) != self.partition.m:
            raise ValidationError(f"need one shift distribution per group ({self.partition.m}), got {len(self.shifts)}")
        for name, sigma in self.noise.items():
            if sigma < 0:
                raise ValidationError(f"noise sigma for {name!r} must be >= 0")

    @property
    def has_noise(self) -> bool:
        return any(sigma > 0 for sigma in self.noise.values())

    def base(self, params=None) -> Signal:
        fn = self.generator if callable(self.generator) else GENERATORS.get(self.generator)
        if fn is None:
            raise GenerationError(f"unknown generator {self.generator!r}")
        s = fn(**(self.params if params is None else params))
        if s.n != self.partition.n:
            raise GenerationError(f"generator produced {s.n} components, partition covers {self.partition.n}")
        return s

    def draw(self, i: int):
        """Noisy parameters and group shifts of realization ``i``."""
        rng = stream(self.seed, i)
        params = dict(self.params)
        for name in sorted(self.noise):
            if name not in params:
                raise GenerationError(f"noise on unknown parameter {name!r}")
            params[name] = params[name] + self.noise[name] * gauss(rng)
        g = np.array([dist.draw(rng) for dist in self.shifts], dtype=np.int64)
        return params, g

    def to_dict(self):
        if callable(self.generator):
            raise ValidationError("only registered generators can be serialized")
        return {
            "schema": 1,
            "generator": self.generator,
            "params": self.params,
            "groups": [list(g) for g in self.partition.groups],
            "n": self.partition.n,
            "shifts": [d.to_dict() for d in self.shifts],
            "noise": dict(self.noise),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            generator=d["generator"],
            params=dict(d.get("params", {})),
            partition=GroupPartition(d["groups"], d.get("n")),
            shifts=[ShiftDistribution.from_dict(x) for x in d["shifts"]],
            noise=dict(d.get("noise", {})),
            seed=int(d.get("seed", 0)),
        )


def realize(model: ProcessModel, i: int) -> Signal:
    """Realization ``i``: bitwise reproducible for a fixed (seed, i)."""
    params, g = model.draw(i)
    return shift_grouped(model.base(params), model.partition, g)


@dataclass
class McConfig:
    N: int
    r: int
    kind: str = "theta"  # "eta" | "theta"
    checker: object = None
    betas: tuple = (0.95,)
    delta: float | None = 0.01
    cvar_betas: tuple | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError("N must be >= 1")
        if self.r < 0:
            raise ValidationError("r must be >= 0")
        if self.kind not in ("eta", "theta"):
            raise ValidationError(f"kind must be 'eta' or 'theta', got {self.kind!r}")
        if self.checker is None:
            raise ValidationError("a checker is required")


@dataclass
class McResult:
    report: RiskReport
    samples: SampleSet
    signed: np.ndarray  # per realization, in index order
    signs: np.ndarray
    saturated: np.ndarray

    @property
    def costs(self) -> np.ndarray:
        return -self.signed.astype(float)


def _scan(kind, ev, center, r) -> RobustnessValue:
    return scan_eta(ev, center, r) if kind == "eta" else scan_theta(ev, center, r)


def _chunk(model: ProcessModel, kind: str, r: int, checker, indices):
    out = []
    for i in indices:
        params, g = model.draw(i)
        ev = GroupShiftEvaluator(model.base(params), checker, model.partition)
        v = _scan(kind, ev, g, r)
        out.append((v.signed, v.sign, v.saturated))
    return out


def worker_count() -> int:
    cap = os.environ.get("TEMPRISK_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            log.warning("ignoring non-integer TEMPRISK_THREADS=%r", cap)
    return n


def robustness_samples(model: ProcessModel, kind: str, r: int, checker, N: int, workers: int | None = None):
    """Signed robustness of realizations ``0..N-1`` (arrays in index order)."""
    checker = as_checker(checker)
    signed = np.empty(N, dtype=np.int64)
    signs = np.empty(N, dtype=np.int64)
    sat = np.empty(N, dtype=bool)
    if not model.has_noise:
        # every realization is a group shift of one nominal signal
        ev = GroupShiftEvaluator(model.base(), checker, model.partition, memo=True)
        for i in range(N):
            _, g = model.draw(i)
            v = _scan(kind, ev, g, r)
            signed[i], signs[i], sat[i] = v.signed, v.sign, v.saturated
        return signed, signs, sat
    workers = worker_count() if workers is None else workers
    if workers > 1 and N >= 64:
        bounds = np.linspace(0, N, workers * 4 + 1).astype(int)
        chunks = [range(a, b) for a, b in zip(bounds, bounds[1:]) if b > a]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk, [model] * len(chunks), [kind] * len(chunks),
                                  [r] * len(chunks), [checker] * len(chunks), chunks))
        rows = [row for part in parts for row in part]
    else:
        rows = _chunk(model, kind, r, checker, range(N))
    for i, (v, b, s) in enumerate(rows):
        signed[i], signs[i], sat[i] = v, b, s
    return signed, signs, sat


def mc_risk(model: ProcessModel, cfg: McConfig, workers: int | None = None, strict: bool = False) -> McResult:
    """Monte Carlo estimate of the temporal robustness risk.

    Costs are ``Z^i = -signed robustness``; saturated values enter as ``-r``
    (or ``+r``). Infeasible (beta, delta) pairs are listed in
    ``report.errors`` unless ``strict``.
    """
    signed, signs, sat = robustness_samples(model, cfg.kind, cfg.r, cfg.checker, cfg.N, workers)
    z = SampleSet(-signed.astype(float))
    rep = risk_report(z, cfg.betas, cfg.delta, cfg.cvar_betas,
                      violation_count=int(np.sum(signs == -1)),
                      saturated_count=int(np.sum(sat)), strict=strict)
    return McResult(rep, z, signed, signs, sat)
