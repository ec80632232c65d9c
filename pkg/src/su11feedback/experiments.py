"""Parameter sweeps, resource comparisons and named figure presets.

A sweep walks the grid ``scheme x r x eta x N x phi`` and emits one
:class:`SweepRow` per point, in that nested order, whatever the number of
worker processes.  Engine failures at a grid point are recorded in the
row's ``error`` column and the sweep carries on.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .gaussian import intensity
from .qfi import Method, qfi_noisy, qfi_pure, scaled_qfi
from .schemes import SchemeConfig, SchemeKind, build, estimate_period

__all__ = [
    "STANDARD_NR",
    "SCHEME_LABELS",
    "SweepSpec",
    "SweepRow",
    "FIELDNAMES",
    "PRESETS",
    "preset",
    "grid_points",
    "evaluate_point",
    "run_sweep",
    "compare_resources",
    "format_value",
    "write_csv",
    "rows_to_csv",
    "plot_script",
]

# standard interferometer with squeezing N*r: the resource-matched baseline
STANDARD_NR = "standard-nr"
SCHEME_LABELS = tuple(k.value for k in SchemeKind) + (STANDARD_NR,)
QFI_FORMULAS = ("auto", "pure", "noisy")
AUTO_PERIOD_LOOPS = 64


def _parse_loops(value) -> tuple[int, int]:
    if isinstance(value, str):
        a, sep, b = value.partition("..")
        lo, hi = (int(a), int(b)) if sep else (int(a), int(a))
    elif isinstance(value, int):
        lo = hi = value
    else:
        lo, hi = (int(v) for v in value)
    if lo < 1 or hi < lo:
        raise ValueError(f"invalid loop range {value!r}")
    return lo, hi


def _as_list(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


@dataclass
class SweepSpec:
    """Grid definition for :func:`run_sweep`.

    ``phi`` lists explicit phase values; when empty the phases are
    ``phi_steps`` evenly spaced points on ``[phi_min, phi_max]``.
    ``swap_interval`` is an integer or ``"auto"`` (estimated per ``r`` and
    ``phi`` from the sequential scheme).  ``qfi_formula`` selects the trace
    formula; ``"auto"`` uses the pure-state one when ``eta == 0``.
    """

    schemes: list[str] = field(default_factory=lambda: ["sequential"])
    r: list[float] = field(default_factory=lambda: [0.1])
    theta: float = 0.0
    phi: list[float] = field(default_factory=list)
    phi_min: float = 0.0
    phi_max: float = math.pi
    phi_steps: int = 100
    loops: tuple[int, int] = (1, 20)
    eta: list[float] = field(default_factory=lambda: [0.0])
    swap_interval: int | str = 4
    qfi_formula: str = "auto"
    out: str = "-"
    precision: int = 12

    def __post_init__(self):
        self.schemes = [str(s) for s in _as_list(self.schemes)]
        self.r = [float(v) for v in _as_list(self.r)]
        self.phi = [float(v) for v in _as_list(self.phi)] if self.phi else []
        self.eta = [float(v) for v in _as_list(self.eta)]
        self.loops = _parse_loops(self.loops)
        self.phi_steps = int(self.phi_steps)
        self.precision = int(self.precision)
        for s in self.schemes:
            if s not in SCHEME_LABELS:
                raise ValueError(f"unknown scheme {s!r}; choose from {', '.join(SCHEME_LABELS)}")
        if not (self.schemes and self.r and self.eta):
            raise ValueError("schemes, r and eta grids must be non-empty")
        if self.phi_steps < 1:
            raise ValueError("phi_steps must be at least 1")
        if not 6 <= self.precision <= 17:
            raise ValueError("precision must lie in [6, 17] significant digits")
        if any(not 0.0 <= e <= 1.0 for e in self.eta):
            raise ValueError("eta values must lie in [0, 1]")
        if self.qfi_formula not in QFI_FORMULAS:
            raise ValueError(f"qfi_formula must be one of {QFI_FORMULAS}")
        if self.swap_interval != "auto":
            k = int(self.swap_interval)
            if k < 1:
                raise ValueError("swap_interval must be a positive integer or 'auto'")
            self.swap_interval = k

    def phi_grid(self) -> list[float]:
        if self.phi:
            return sorted(self.phi)
        if self.phi_steps == 1:
            return [float(self.phi_min)]
        return [float(v) for v in np.linspace(self.phi_min, self.phi_max, self.phi_steps)]

    @classmethod
    def from_dict(cls, data: dict) -> "SweepSpec":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown sweep field(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "SweepSpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["loops"] = f"{self.loops[0]}..{self.loops[1]}"
        return d


@dataclass(frozen=True)
class SweepRow:
    scheme: str
    r: float
    theta: float
    phi: float
    N: int
    eta: float
    k: int | None
    intensity_1: float
    intensity_2: float
    intensity_total: float
    qfi: float
    qfi_scaled: float
    delta_phi: float
    method: str
    error: str = ""


FIELDNAMES = tuple(f.name for f in dataclasses.fields(SweepRow))


@dataclass(frozen=True)
class _Point:
    scheme: str
    r: float
    theta: float
    phi: float
    N: int
    eta: float
    k: int | str | None
    qfi_formula: str


def grid_points(spec: SweepSpec) -> list[_Point]:
    lo, hi = spec.loops
    points = []
    for scheme in spec.schemes:
        loops = [1] if scheme == SchemeKind.STANDARD.value else range(lo, hi + 1)
        k = spec.swap_interval if scheme == SchemeKind.SWAPPING.value else None
        for r in sorted(spec.r):
            for eta in sorted(spec.eta):
                for n in loops:
                    for phi in spec.phi_grid():
                        points.append(_Point(scheme, r, spec.theta, phi, n, eta, k, spec.qfi_formula))
    return points


def _config(p: _Point, k: int | None) -> SchemeConfig:
    if p.scheme == STANDARD_NR:
        return SchemeConfig(SchemeKind.STANDARD, r=p.N * p.r, theta1=p.theta, eta=p.eta)
    kind = SchemeKind(p.scheme)
    loops = 1 if kind is SchemeKind.STANDARD else p.N
    return SchemeConfig(kind, r=p.r, theta1=p.theta, theta2=p.theta, loops=loops,
                        swap_interval=k, eta=p.eta)


def evaluate_point(p: _Point) -> SweepRow:
    nan = math.nan
    k = p.k
    try:
        if k == "auto":
            seq = SchemeConfig(SchemeKind.SEQUENTIAL, r=p.r, theta1=p.theta, theta2=p.theta)
            k = estimate_period(seq, p.phi, AUTO_PERIOD_LOOPS)
        out = build(_config(p, k), p.phi)
        n = intensity(out.state)
        noisy = p.qfi_formula == "noisy" or (p.qfi_formula == "auto" and p.eta > 0)
        res = (qfi_noisy if noisy else qfi_pure)(out.state, out.dstate)
        return SweepRow(
            p.scheme, p.r, p.theta, p.phi, p.N, p.eta, k,
            float(n[0]), float(n[1]), float(n.sum()),
            res.H, scaled_qfi(res.H, p.N), res.delta_phi, res.method.value,
        )
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        k = None if k == "auto" else k
        return SweepRow(p.scheme, p.r, p.theta, p.phi, p.N, p.eta, k,
                        nan, nan, nan, nan, nan, nan, Method.ANALYTIC.value,
                        f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, jobs: int = 1) -> Iterator[SweepRow]:
    """Evaluate every grid point; rows come out in grid order for any ``jobs``."""
    points = grid_points(spec)
    if jobs <= 1 or len(points) < 2:
        yield from map(evaluate_point, points)
        return
    chunk = max(1, len(points) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(evaluate_point, points, chunksize=chunk)


def compare_resources(r: float, phi: float, n_max: int, theta: float = 0.0,
                      jobs: int = 1) -> list[SweepRow]:
    """Sequential, partial and standard ``S(N r)`` rows for ``N = 1..n_max``.

    Rows are grouped by ``N``; within a group the order is sequential,
    partial, standard-nr.  Standard rows report the base ``r``; their
    squeezing is ``N r``.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    spec = SweepSpec(
        schemes=[SchemeKind.SEQUENTIAL.value, SchemeKind.PARTIAL.value, STANDARD_NR],
        r=[r], theta=theta, phi=[phi], loops=(1, n_max),
    )
    rows = list(run_sweep(spec, jobs))
    order = {s: i for i, s in enumerate(spec.schemes)}
    return sorted(rows, key=lambda row: (row.N, order[row.scheme]))


def format_value(value, precision: int) -> str:
    """Shortest decimal that round-trips the value rounded to ``precision`` digits."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, int, np.integer)):
        return str(int(value))
    x = float(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(f"{x:.{precision}g}"))


def write_csv(rows: Iterable[SweepRow], stream, precision: int = 12) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(FIELDNAMES)
    for row in rows:
        writer.writerow([format_value(getattr(row, f), precision) for f in FIELDNAMES])


def rows_to_csv(rows: Iterable[SweepRow], precision: int = 12) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, precision)
    return buf.getvalue()


def plot_script(csv_path: str, x: str = "N", y: str = "qfi_scaled") -> str:
    """Companion gnuplot script plotting column ``y`` against ``x``."""
    col = {name: i + 1 for i, name in enumerate(FIELDNAMES)}
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        f"set xlabel '{x}'\n"
        f"set ylabel '{y}'\n"
        f"plot '{csv_path}' using {col[x]}:{col[y]} with linespoints\n"
    )


_PI = math.pi
_SEQ, _PAR, _SWAP = (SchemeKind.SEQUENTIAL.value, SchemeKind.PARTIAL.value,
                     SchemeKind.SWAPPING.value)

# Grids the figures do not state are reconstructions: r = 0.1 unless varied,
# 100-point phase grids on [0, pi], loop counts up to 20.
PRESETS: dict[str, dict] = {
    "fig4a": dict(schemes=[_SEQ], r=[0.05, 0.1, 0.15, 0.2], phi=[_PI / 4], loops="1..20"),
    "fig4b": dict(schemes=[_SEQ], r=[0.1], phi=[_PI / 8, _PI / 4, _PI / 2], loops="1..20"),
    "fig5a": dict(schemes=[_PAR], r=[0.05, 0.1, 0.15], phi=[_PI / 4], loops="1..10"),
    "fig5b": dict(schemes=[_PAR], r=[0.1], phi=[_PI / 8, _PI / 4, _PI / 2], loops="1..10"),
    "fig6a": dict(schemes=[_SEQ], r=[0.1], phi=[_PI / 4], loops="1..20",
                  eta=[round(0.1 * i, 1) for i in range(11)], qfi_formula="noisy"),
    "fig6b": dict(schemes=[_PAR], r=[0.1], phi=[_PI / 4], loops="1..20",
                  eta=[round(0.1 * i, 1) for i in range(11)], qfi_formula="noisy"),
    "fig7": dict(schemes=[_SEQ, _PAR, STANDARD_NR], r=[0.1], phi=[_PI / 4, _PI / 2],
                 loops="1..50"),
    "fig8": dict(schemes=[_SWAP], r=[0.1], phi_min=0.0, phi_max=_PI, phi_steps=100,
                 loops="1..20", swap_interval=4),
    "fig9": dict(schemes=[_SWAP], r=[0.1], phi_min=0.0, phi_max=_PI, phi_steps=100,
                 loops="1..20", swap_interval=4),
}
ALIASES = {"fig4": "fig4a", "fig5": "fig5a", "fig6": "fig6a"}


def preset(name: str) -> SweepSpec:
    key = ALIASES.get(name, name)
    if key not in PRESETS:
        raise KeyError(f"unknown figure preset {name!r}; choose from {', '.join(PRESETS)}")
    return SweepSpec.from_dict(dict(PRESETS[key]))
