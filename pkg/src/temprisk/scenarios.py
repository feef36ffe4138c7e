"""Built-in case-study generators: a three-car T-intersection and two
double-integrator robots on a servicing mission."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import GenerationError, ValidationError
from .lang import ConstraintSpec, Formula, eval_expr, parse_formula, parse_predicate
from .signal import GroupPartition, Signal
from .stochastic import ProcessModel, ShiftDistribution, register_generator


# ---------------------------------------------------------------------------
# T-intersection


@dataclass(frozen=True)
class TIntersectionConfig:
    """Three cars on straight lines at constant speed.

    Green drives in -y from ``green0``, red in -x from ``red0``, blue in +x
    from ``blue0``. State order: green (x, y), red (x, y), blue (x, y).
    """

    scenario: str = "S1"
    eps1: float = 10.0
    eps2: float = 15.0
    v_green: float = 15.0
    v_red: float = 12.0
    v_blue: float = 18.0
    green0: tuple = (-5.0, 300.0)
    red0: tuple = (300.0, 5.0)
    blue0: tuple = (-300.0, -5.0)
    horizon: float = 60.0
    dt: float = 0.1

    def __post_init__(self):
        if not self.dt > 0 or not self.horizon > 0:
            raise ValidationError("dt and horizon must be positive")

    @classmethod
    def preset(cls, scenario: str, **overrides) -> "TIntersectionConfig":
        scenario = scenario.upper()
        if scenario == "S1":
            base = cls("S1", v_red=12.0, v_blue=18.0)
        elif scenario == "S2":
            base = cls("S2", v_red=18.0, v_blue=12.0)
        else:
            raise ValidationError(f"unknown T-intersection scenario {scenario!r}")
        return replace(base, **overrides)

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.dt))


T_GROUPS = GroupPartition([[0, 1], [2, 3], [4, 5]], 6)


def t_intersection_constraint(cfg: TIntersectionConfig) -> ConstraintSpec:
    """Green may be near the intersection center only while clear of both cars.

    The body is active over the whole horizon. Outside it every car holds its
    endpoint state, so the default is the body's value at those two states.
    """
    e1, e2 = repr(float(cfg.eps1)), repr(float(cfg.eps2))
    body = parse_predicate(
        f"max(-({e1} - norm2(x[1], x[2])), "
        f"min(norm2(x[1] - x[3], x[2] - x[4]) - {e2}, norm2(x[1] - x[5], x[2] - x[6]) - {e2}))"
    )
    s = t_intersection_trajectory(cfg)
    ends = s.window([s.t_min, s.t_max])
    default = float(np.min(eval_expr(body, ends)))
    return ConstraintSpec(((0, cfg.steps, body),), default)


def t_intersection_trajectory(cfg: TIntersectionConfig) -> Signal:
    t = np.arange(cfg.steps + 1) * cfg.dt
    gx, gy = cfg.green0
    rx, ry = cfg.red0
    bx, by = cfg.blue0
    rows = [
        np.full_like(t, gx), gy - cfg.v_green * t,
        rx - cfg.v_red * t, np.full_like(t, ry),
        bx + cfg.v_blue * t, np.full_like(t, by),
    ]
    return Signal(np.vstack(rows), t_min=0, dt=cfg.dt)


def t_intersection_signal(cfg: TIntersectionConfig):
    """Nominal signal (n=6), its safety constraint, and the per-car partition."""
    return t_intersection_trajectory(cfg), t_intersection_constraint(cfg), T_GROUPS


@register_generator("tintersection")
def _tintersection_generator(scenario="S1", **params) -> Signal:
    return t_intersection_trajectory(TIntersectionConfig.preset(scenario, **params))


def t_intersection_model(scenario: str, d: int = 0, sigma: float = 0.0, start_times=None,
                         seed: int = 0) -> ProcessModel:
    """Random start times uniform on ``[-d, d]`` steps, optional speed noise.

    ``start_times`` (green, red, blue) fixes the start step of each car
    instead; starting at step ``t0`` is the shift ``-t0``.
    """
    if start_times is not None:
        shifts = [ShiftDistribution.fixed(-int(t0)) for t0 in start_times]
    else:
        shifts = [ShiftDistribution.uniform(d) for _ in range(3)]
    noise = {name: float(sigma) for name in ("v_green", "v_red", "v_blue")} if sigma else {}
    cfg = TIntersectionConfig.preset(scenario)
    params = {"scenario": cfg.scenario, "v_green": cfg.v_green, "v_red": cfg.v_red, "v_blue": cfg.v_blue}
    return ProcessModel("tintersection", params, T_GROUPS, shifts, noise, seed)


# ---------------------------------------------------------------------------
# Cooperative servicing


def _box(ix: int, iy: int, box) -> str:
    x0, x1, y0, y1 = (repr(float(v)) for v in box)
    return f"pred{{min(x[{ix}] - {x0}, {x1} - x[{ix}], x[{iy}] - {y0}, {y1} - x[{iy}])}}"


@dataclass(frozen=True)
class ServicingConfig:
    """Two planar double integrators tracking waypoint schedules.

    Robot ``i`` has state ``(px, py, vx, vy)``; the signal stacks robot 1
    then robot 2 (n=8). Regions are axis-aligned boxes ``(x0, x1, y0, y1)``.
    A schedule is a list of ``(time, x, y)`` knots; the reference position
    is linearly interpolated between knots and held after the last one.

    The default layout and schedules give robot 1 tight absolute deadlines
    (10 steps of delay, 7 of advance before the mission fails) and robot 2
    a wide absolute margin, limited mainly by arriving in B before robot 1
    leaves. The nominal run has eta = 7 and theta = 6 steps.
    """

    ts: float = 0.1
    horizon: float = 8.0
    region_a: tuple = (-0.5, 0.5, -0.5, 0.5)
    region_b: tuple = (0.0, 1.0, 1.5, 2.5)
    region_charge: tuple = (1.0, 2.5, -0.5, 0.5)
    start1: tuple = (0.0, 0.0)
    start2: tuple = (2.0, 0.0)
    # robot 1: A, charge, then wait in B; robot 2: charge, second A visit, then B
    schedule1: tuple = ((0.0, 0.0, 0.0), (0.55, 0.0, 0.0), (1.25, 1.6, 0.0), (2.0, 1.6, 0.0),
                        (2.8, 0.5, 2.0), (5.1, 0.5, 2.0), (5.7, 0.5, 3.5))
    schedule2: tuple = ((0.0, 2.0, 0.0), (2.4, 2.0, 0.0), (3.1, 0.0, 0.0), (3.5, 0.0, 0.0),
                        (4.2, 0.5, 2.0), (6.6, 0.5, 2.0))
    kp: float = 60.0
    kd: float = 15.0
    u_max: float = 60.0
    tolerance: float = 0.25

    def __post_init__(self):
        if not self.ts > 0 or not self.horizon > 0:
            raise ValidationError("ts and horizon must be positive")
        for name in ("region_a", "region_b", "region_charge"):
            x0, x1, y0, y1 = getattr(self, name)
            if not (x0 < x1 and y0 < y1):
                raise ValidationError(f"{name} must be a nonempty box")
        for sched in (self.schedule1, self.schedule2):
            times = [k[0] for k in sched]
            if not sched or times != sorted(times) or times[0] < 0:
                raise ValidationError("schedule knots must have nondecreasing, nonnegative times")
            if times[-1] > self.horizon:
                raise ValidationError("schedule extends beyond the horizon")

    @property
    def steps(self) -> int:
        return int(round(self.horizon / self.ts))

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        for key in ("region_a", "region_b", "region_charge", "start1", "start2"):
            if key in d:
                d[key] = tuple(d[key])
        for key in ("schedule1", "schedule2"):
            if key in d:
                d[key] = tuple(tuple(k) for k in d[key])
        return cls(**d)


SERVICING_GROUPS = GroupPartition([[0, 1, 2, 3], [4, 5, 6, 7]], 8)


def double_integrator(ts: float):
    """Zero-order-hold discretization of a planar double integrator."""
    A = np.eye(4)
    A[0, 2] = A[1, 3] = ts
    B = np.zeros((4, 2))
    B[0, 0] = B[1, 1] = 0.5 * ts * ts
    B[2, 0] = B[3, 1] = ts
    return A, B


def _reference(schedule, times):
    knots = np.array(schedule, dtype=float)
    px = np.interp(times, knots[:, 0], knots[:, 1])
    py = np.interp(times, knots[:, 0], knots[:, 2])
    return np.stack([px, py], axis=1)


def _track(cfg: ServicingConfig, start, schedule) -> np.ndarray:
    A, B = double_integrator(cfg.ts)
    K = cfg.steps
    times = np.arange(K + 2) * cfg.ts
    ref = _reference(schedule, times)
    vref = (ref[1:] - ref[:-1]) / cfg.ts
    x = np.array([start[0], start[1], 0.0, 0.0])
    out = np.empty((K + 1, 4))
    for k in range(K + 1):
        out[k] = x
        u = cfg.kp * (ref[k] - x[:2]) + cfg.kd * (vref[k] - x[2:])
        u = np.clip(u, -cfg.u_max, cfg.u_max)
        x = A @ x + B @ u
    err = np.linalg.norm(out[:, :2] - ref[:K + 1], axis=1)
    if err.max() > cfg.tolerance:
        k = int(err.argmax())
        raise GenerationError(f"schedule infeasible: tracking error {err.max():.3f} at step {k} "
                              f"exceeds tolerance {cfg.tolerance}")
    return out


def servicing_trajectory(cfg: ServicingConfig) -> Signal:
    r1 = _track(cfg, cfg.start1, cfg.schedule1)
    r2 = _track(cfg, cfg.start2, cfg.schedule2)
    return Signal(np.hstack([r1, r2]).T, t_min=0, dt=cfg.ts)


def servicing_formula(cfg: ServicingConfig) -> Formula:
    """The mission: two A visits in sequence, a joint B visit, charging."""
    text = "\n".join([
        f"let a1 = {_box(1, 2, cfg.region_a)}",
        f"let a2 = {_box(5, 6, cfg.region_a)}",
        f"let b1 = {_box(1, 2, cfg.region_b)}",
        f"let b2 = {_box(5, 6, cfg.region_b)}",
        f"let c1 = {_box(1, 2, cfg.region_charge)}",
        f"let c2 = {_box(5, 6, cfg.region_charge)}",
        "F[0,1]((a1 | a2) & F[1,5](a1 | a2))",
        "& F[1,6](b1 & b2)",
        "& F[0,2] G[0,0.5] c1 & F[0,2] G[0,0.5] c2",
    ])
    return parse_formula(text, cfg.ts)


def servicing_signal(cfg: ServicingConfig | None = None):
    """Nominal signal (n=8), mission formula, and the per-robot partition."""
    cfg = cfg or ServicingConfig()
    return servicing_trajectory(cfg), servicing_formula(cfg), SERVICING_GROUPS


@register_generator("servicing")
def _servicing_generator(**params) -> Signal:
    return servicing_trajectory(ServicingConfig.from_dict(params))


def servicing_model(lam1: float, lam2: float, seed: int = 0, cfg: ServicingConfig | None = None) -> ProcessModel:
    """Poisson-distributed start delays (in steps) for each robot."""
    cfg = cfg or ServicingConfig()
    return ProcessModel("servicing", cfg.to_dict(), SERVICING_GROUPS,
                        [ShiftDistribution.poisson(lam1), ShiftDistribution.poisson(lam2)], {}, seed)


# ---------------------------------------------------------------------------
# Example: two sinusoids required to stay close on a window


def example1_signal(a: float = 0.04, b: float = 1.05, eps: float = 1.0,
                    window=(0, 400), active=(145, 155)):
    """``x1 = sin(a pi t)``, ``x2 = -b sin(1.5 a pi t)``, eps-close on ``active``."""
    t = np.arange(window[0], window[1] + 1)
    s = Signal([np.sin(a * np.pi * t), -b * np.sin(1.5 * a * np.pi * t)], t_min=window[0])
    c = ConstraintSpec(((active[0], active[1], parse_predicate(f"{eps!r} - abs(x[1] - x[2])")),), 1.0)
    return s, c


@register_generator("example1")
def _example1_generator(a=0.04, b=1.05) -> Signal:
    return example1_signal(a, b)[0]


SCENARIOS = ("tintersection:S1", "tintersection:S2", "servicing", "example1")


def scenario_checker_spec(name: str):
    """(signal, checker spec, partition) for a named scenario; checker spec
    is a ConstraintSpec or a (formula, t) pair."""
    kind, _, variant = name.partition(":")
    if kind == "tintersection":
        s, c, p = t_intersection_signal(TIntersectionConfig.preset(variant or "S1"))
        return s, c, p
    if kind == "servicing":
        s, f, p = servicing_signal()
        return s, (f, 0), p
    if kind == "example1":
        s, c = example1_signal()
        return s, c, GroupPartition.per_component(2)
    raise ValidationError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
