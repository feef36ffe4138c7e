"""File formats: signals (CSV/JSON), spec files, reports, manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ValidationError
from .lang import (
    ConstraintSpec, format_constraint, format_formula, is_constraint_text,
    parse_constraint, parse_formula,
)
from .risk import SampleSet
from .signal import Signal

SCHEMA = 1


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


# ---------------------------------------------------------------------------
# Signals


def signal_to_csv(s: Signal) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t"] + [f"x{i + 1}" for i in range(s.n)])
    vals = s.values
    for j, t in enumerate(s.times):
        w.writerow([str(int(t))] + [_fmt(v) for v in vals[:, j]])
    return buf.getvalue()


def signal_from_csv(text: str, dt: float = 1.0) -> Signal:
    rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError("empty signal file")
    header = [h.strip() for h in rows[0]]
    n = len(header) - 1
    if n < 1 or header[0] != "t" or header[1:] != [f"x{i + 1}" for i in range(n)]:
        raise ValidationError(f"signal CSV header must be t,x1,...,xn; got {','.join(header)}")
    if len(rows) < 2:
        raise ValidationError("signal CSV has no samples")
    times, data = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != n + 1:
            raise ValidationError(f"line {lineno}: expected {n + 1} fields, got {len(row)}")
        try:
            times.append(int(row[0]))
            data.append([float(v) for v in row[1:]])
        except ValueError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
    t = np.array(times)
    if np.any(np.diff(t) != 1):
        raise ValidationError("signal CSV times must be consecutive increasing integers")
    return Signal(np.array(data).T, t_min=int(t[0]), dt=dt)


def signal_to_json(s: Signal) -> str:
    return json.dumps({"schema": SCHEMA, "dt": s.dt, "t_min": s.t_min,
                       "columns": s.values.T.tolist()}) + "\n"


def signal_from_json(text: str) -> Signal:
    d = json.loads(text)
    try:
        cols = np.array(d["columns"], dtype=float)
        if cols.ndim != 2:
            raise ValidationError("'columns' must be a list of equal-length sample vectors")
        return Signal(cols.T, t_min=int(d.get("t_min", 0)), dt=float(d.get("dt", 1.0)))
    except KeyError as exc:
        raise ValidationError(f"signal JSON is missing {exc}") from None


def read_signal(path, dt: float | None = None) -> Signal:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".json":
        s = signal_from_json(text)
        return s if dt is None else Signal(s.base, s.t_min, dt)
    return signal_from_csv(text, 1.0 if dt is None else dt)


def write_signal(s: Signal, path) -> None:
    path = Path(path)
    text = signal_to_json(s) if path.suffix.lower() == ".json" else signal_to_csv(s)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Spec files


def read_spec(path, dt: float = 1.0):
    """Return a ConstraintSpec or a Formula, depending on the file's content."""
    text = Path(path).read_text(encoding="utf-8")
    return parse_spec_text(text, dt)


def parse_spec_text(text: str, dt: float = 1.0):
    if is_constraint_text(text):
        return parse_constraint(text)
    return parse_formula(text, dt)


def format_spec(spec, dt: float = 1.0) -> str:
    if isinstance(spec, ConstraintSpec):
        return format_constraint(spec)
    return format_formula(spec, dt) + "\n"


# ---------------------------------------------------------------------------
# Samples, histograms, manifests


def samples_to_csv(z: SampleSet) -> str:
    return "cost\n" + "".join(_fmt(v) + "\n" for v in z.samples)


def samples_from_csv(text: str) -> SampleSet:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if lines and lines[0] == "cost":
        lines = lines[1:]
    return SampleSet([float(v) for v in lines])


def histogram(z: SampleSet) -> dict:
    """Counts per unit-width bin centred on each integer cost."""
    counts = Counter(int(np.floor(v + 0.5)) for v in z.samples)
    lo, hi = min(counts), max(counts)
    return {"schema": SCHEMA, "bin_width": 1, "N": z.N,
            "bins": [{"value": v, "count": counts.get(v, 0)} for v in range(lo, hi + 1)]}


def digest(config: dict) -> str:
    """SHA-256 of the canonical (key-sorted) JSON encoding of ``config``."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int | None = None
    version: str = __version__
    started: float = field(default_factory=time.time)
    elapsed: float = 0.0

    @property
    def config_digest(self) -> str:
        return digest(self.config)

    def finish(self) -> "RunManifest":
        self.elapsed = time.time() - self.started
        return self

    def to_dict(self) -> dict:
        return {"schema": SCHEMA, "command": self.command, "config": self.config,
                "config_digest": self.config_digest, "seed": self.seed, "version": self.version,
                "timing": {"started": self.started, "elapsed_s": self.elapsed}}
