"""Standard, sequential, partial and squeeze-swapping SU(1,1) interferometers.

Every builder returns the output covariance together with its analytic
derivative with respect to the unknown phase.  The circuits are propagated
loop by loop on the covariance matrix; each elementary gate touches only the
rows and columns of the modes it acts on, which keeps the partial scheme
(``N + 1`` modes) cheap at large ``N``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np

from .gaussian import (
    GaussianState,
    LossChannel,
    SqueezeParam,
    phase_block,
    phase_block_derivative,
    squeezer_block,
)

__all__ = [
    "SchemeKind",
    "SchemeConfig",
    "SchemeOutput",
    "PeriodNotResolvedError",
    "build",
    "build_standard",
    "build_sequential",
    "build_partial",
    "build_swapping",
    "finite_difference_dstate",
    "mode1_intensity_trace",
    "estimate_period",
    "first_local_maximum",
]

PLATEAU_TOL = 1e-12


class SchemeKind(str, enum.Enum):
    STANDARD = "standard"
    SEQUENTIAL = "sequential"
    PARTIAL = "partial"
    SWAPPING = "swapping"


class PeriodNotResolvedError(ValueError):
    """No local intensity maximum inside the scanned loop range."""


@dataclass(frozen=True)
class SchemeConfig:
    """Interferometer variant and its parameters.

    ``loops`` is the number of feedback loops N (the standard interferometer
    is a single pass, N = 1).  ``swap_interval`` is the swap period k of the
    swapping scheme.  ``eta`` is the photon loss applied to every mode at the
    end of each loop.
    """

    kind: SchemeKind
    r: float = 0.1
    theta1: float = 0.0
    theta2: float = 0.0
    loops: int = 1
    swap_interval: int | None = None
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if int(self.loops) != self.loops or self.loops < 1:
            raise ValueError(f"loop count must be a positive integer, got {self.loops!r}")
        if self.kind is SchemeKind.STANDARD and self.loops != 1:
            raise ValueError("the standard interferometer is a single pass (loops=1)")
        if self.kind is SchemeKind.SWAPPING:
            k = self.swap_interval
            if k is None or int(k) != k or k < 1:
                raise ValueError(f"swapping scheme needs a positive swap interval, got {k!r}")
        LossChannel(self.eta)
        if not np.isfinite(self.r):
            raise ValueError("squeezing amplitude must be finite")

    @property
    def mode_count(self) -> int:
        return self.loops + 1 if self.kind is SchemeKind.PARTIAL else 2

    def replace(self, **changes) -> "SchemeConfig":
        fields = dict(
            kind=self.kind, r=self.r, theta1=self.theta1, theta2=self.theta2,
            loops=self.loops, swap_interval=self.swap_interval, eta=self.eta,
        )
        fields.update(changes)
        return SchemeConfig(**fields)


@dataclass(frozen=True, eq=False)
class SchemeOutput:
    state: GaussianState
    dstate: np.ndarray
    mode_count: int

    def marginal(self, modes) -> tuple[GaussianState, np.ndarray]:
        """Reduced state and derivative on the listed modes (partial trace)."""
        idx = np.array([k for i in modes for k in (2 * i, 2 * i + 1)])
        cov = self.state.cov[np.ix_(idx, idx)]
        return GaussianState(len(modes), cov), self.dstate[np.ix_(idx, idx)]


class _Gate(NamedTuple):
    block: np.ndarray
    idx: np.ndarray
    dblock: np.ndarray | None


def _squeeze(g: SqueezeParam, i: int, j: int) -> _Gate:
    return _Gate(squeezer_block(g), np.array([2 * i, 2 * i + 1, 2 * j, 2 * j + 1]), None)


def _phase(phi: float, i: int) -> _Gate:
    return _Gate(phase_block(phi), np.array([2 * i, 2 * i + 1]), phase_block_derivative(phi))


def _loops(cfg: SchemeConfig, phi: float) -> Iterator[list[_Gate]]:
    """Gates of each loop in time order (first gate acts first)."""
    g1 = SqueezeParam(cfg.r, cfg.theta1)
    g2 = SqueezeParam(cfg.r, cfg.theta2)
    kind = cfg.kind
    if kind is SchemeKind.STANDARD:
        yield [_squeeze(g1, 0, 1), _phase(phi, 0), _squeeze(-g1, 0, 1)]
        return
    for n in range(cfg.loops):
        if kind is SchemeKind.PARTIAL:
            j = n + 1
            yield [_squeeze(g1, 0, j), _phase(phi, 0), _squeeze(g2, 0, j)]
            continue
        a, b = g1, g2
        if kind is SchemeKind.SWAPPING and (n // cfg.swap_interval) % 2:
            a, b = -g1, -g2
        yield [_squeeze(a, 0, 1), _phase(phi, 0), _squeeze(b, 0, 1)]


def _propagate(cov: np.ndarray, dcov: np.ndarray, gate: _Gate) -> None:
    """In place: cov -> B cov B^dag, dcov -> B dcov B^dag + dB cov B^dag + B cov dB^dag."""
    b, idx, db = gate
    bh = b.conj().T
    if db is not None:
        # dG cov G^dag is nonzero only on the gate rows; uses the pre-gate cov
        x = db @ cov[idx, :]
        x[:, idx] = x[:, idx] @ bh
        corr = np.zeros_like(cov)
        corr[idx, :] = x
        corr += corr.conj().T
    dcov[idx, :] = b @ dcov[idx, :]
    dcov[:, idx] = dcov[:, idx] @ bh
    cov[idx, :] = b @ cov[idx, :]
    cov[:, idx] = cov[:, idx] @ bh
    if db is not None:
        dcov += corr


def _run(cfg: SchemeConfig, phi: float, record=None, check: bool = True) -> SchemeOutput:
    m = cfg.mode_count
    cov = 0.5 * np.eye(2 * m, dtype=complex)
    dcov = np.zeros_like(cov)
    t = LossChannel(cfg.eta).t
    half = 0.5 * np.eye(2 * m)
    for gates in _loops(cfg, phi):
        for gate in gates:
            _propagate(cov, dcov, gate)
        if cfg.eta:
            cov = t * (cov - half) + half
            dcov = t * dcov
        cov = 0.5 * (cov + cov.conj().T)
        dcov = 0.5 * (dcov + dcov.conj().T)
        if record is not None:
            record(cov)
    return SchemeOutput(GaussianState(m, cov, check=check), dcov, m)


def _expect(cfg: SchemeConfig, kind: SchemeKind) -> None:
    if cfg.kind is not kind:
        raise ValueError(f"expected a {kind.value} configuration, got {cfg.kind.value}")


def build_standard(cfg: SchemeConfig, phi: float) -> SchemeOutput:
    """``S(-Gamma) U(phi) S(Gamma)`` acting on two vacuum modes."""
    _expect(cfg, SchemeKind.STANDARD)
    return _run(cfg, phi)


def build_sequential(cfg: SchemeConfig, phi: float) -> SchemeOutput:
    """Both modes fed back: ``[S(Gamma2) U(phi) S(Gamma1)]^N``."""
    _expect(cfg, SchemeKind.SEQUENTIAL)
    return _run(cfg, phi)


def build_partial(cfg: SchemeConfig, phi: float) -> SchemeOutput:
    """Only mode 1 fed back; loop ``j`` squeezes mode 1 with a fresh vacuum mode ``j``.

    The measured-and-reset partner of every loop is a new mode, so the output
    lives on ``N + 1`` modes with mode index 0 the fed-back mode.
    """
    _expect(cfg, SchemeKind.PARTIAL)
    return _run(cfg, phi)


def build_swapping(cfg: SchemeConfig, phi: float) -> SchemeOutput:
    """Sequential loops whose squeezers flip sign after every ``k`` loops.

    The first block of ``k`` loops uses ``+r``, the next ``-r``, and so on.
    """
    _expect(cfg, SchemeKind.SWAPPING)
    return _run(cfg, phi)


_BUILDERS = {
    SchemeKind.STANDARD: build_standard,
    SchemeKind.SEQUENTIAL: build_sequential,
    SchemeKind.PARTIAL: build_partial,
    SchemeKind.SWAPPING: build_swapping,
}


def build(cfg: SchemeConfig, phi: float) -> SchemeOutput:
    return _BUILDERS[cfg.kind](cfg, phi)


def finite_difference_dstate(cfg: SchemeConfig, phi: float, h: float = 1e-5) -> np.ndarray:
    """Central difference ``(cov(phi + h) - cov(phi - h)) / 2h``; a validator only."""
    hi = build(cfg, phi + h).state.cov
    lo = build(cfg, phi - h).state.cov
    return (hi - lo) / (2 * h)


def mode1_intensity_trace(cfg: SchemeConfig, phi: float, max_loops: int) -> np.ndarray:
    """Mode-1 photon number after each of loops ``1..max_loops`` in one pass."""
    trace = []
    # only one diagonal entry is read, so strongly squeezed late loops need no validation
    _run(cfg.replace(loops=max_loops), phi, record=lambda cov: trace.append(cov[0, 0].real - 0.5),
         check=False)
    return np.array(trace)


def first_local_maximum(values, tol: float = PLATEAU_TOL) -> int:
    """1-based position of the first strict local maximum of ``values``.

    The series is preceded by an implicit 0 (the vacuum before any loop).
    A plateau (entries equal within ``tol``) that is followed by a drop counts
    as a maximum located at its first entry.
    """
    values = list(values)
    prev = 0.0
    n = 0
    while n < len(values):
        v = values[n]
        if v > prev + tol:
            end = n
            while end + 1 < len(values) and abs(values[end + 1] - v) <= tol:
                end += 1
            if end + 1 < len(values) and values[end + 1] < v - tol:
                return n + 1
            n = end + 1
            prev = values[end]
            continue
        prev = v
        n += 1
    raise PeriodNotResolvedError(
        f"intensity has no local maximum within {len(values)} loops"
    )


def estimate_period(cfg: SchemeConfig, phi: float, max_loops: int = 64) -> int:
    """Recommended swap interval: loop count of the first intensity maximum.

    This is half the oscillation period of the sequential-scheme intensity.
    """
    _expect(cfg, SchemeKind.SEQUENTIAL)
    if max_loops < 2:
        raise ValueError("max_loops must be at least 2")
    return first_local_maximum(mode1_intensity_trace(cfg, phi, max_loops))
