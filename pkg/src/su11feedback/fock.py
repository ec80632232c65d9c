"""Truncated Fock-space simulator used to cross-check the Gaussian engine.

Pure states only.  Amplitudes are stored as a tensor with one axis of length
``cutoff + 1`` per mode.  Two-mode squeezers are built by exponentiating the
truncated generator (scipy's scaling-and-squaring ``expm``), so each gate is
exactly unitary on the truncated space; truncation error shows up as
population at the top Fock level, which is what ``leakage`` reports.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .gaussian import SqueezeParam
from .schemes import SchemeConfig, SchemeKind

__all__ = [
    "FockState",
    "FockQfi",
    "CutoffTooSmallError",
    "ResourceBudgetError",
    "DEFAULT_BUDGET",
    "cutoff_for",
    "fock_vacuum",
    "fock_squeeze",
    "fock_phase",
    "fock_intensity",
    "fock_scheme",
    "fock_qfi",
]

LEAKAGE_TOL = 1e-8
TAIL_TOL = 1e-12
MIN_CUTOFF = 8
DEFAULT_BUDGET = 4_000_000


class CutoffTooSmallError(RuntimeError):
    """Population reached the truncation edge."""


class ResourceBudgetError(MemoryError):
    """The requested Fock space exceeds the amplitude budget."""


@dataclass(frozen=True, eq=False)
class FockState:
    modes: int
    cutoff: int
    amplitudes: np.ndarray
    leakage: float = field(default=0.0)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def cutoff_for(total_r: float) -> int:
    """Smallest cutoff ``c`` with ``tanh(total_r)^(2(c+1)) < 1e-12`` (at least 8)."""
    lam = math.tanh(abs(total_r))
    if lam == 0.0:
        return MIN_CUTOFF
    c = math.ceil(math.log(TAIL_TOL) / (2 * math.log(lam))) - 1
    while lam ** (2 * (c + 1)) >= TAIL_TOL:
        c += 1
    return max(MIN_CUTOFF, c)


def fock_vacuum(m: int, cutoff: int, budget: int = DEFAULT_BUDGET) -> FockState:
    size = (cutoff + 1) ** m
    if size > budget:
        raise ResourceBudgetError(
            f"{m} modes at cutoff {cutoff} need {size} amplitudes (budget {budget})"
        )
    amps = np.zeros((cutoff + 1,) * m, dtype=complex)
    amps[(0,) * m] = 1.0
    return FockState(m, cutoff, amps)


def _edge_population(amps: np.ndarray, axes) -> float:
    prob = np.abs(amps) ** 2
    total = 0.0
    for ax in axes:
        total += float(np.take(prob, -1, axis=ax).sum())
    return total


@functools.lru_cache(maxsize=64)
def _squeeze_operator(r: float, theta: float, cutoff: int) -> np.ndarray:
    d = cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    ab = np.kron(a, a)
    gamma = r * np.exp(1j * theta)
    # conj(Gamma) a b - Gamma a^dag b^dag: maps a -> cosh r a - e^{i theta} sinh r b^dag,
    # the same convention as the Gaussian squeezer block
    gen = np.conj(gamma) * ab - gamma * ab.conj().T
    return scipy.linalg.expm(gen)


def fock_squeeze(g: SqueezeParam, s: FockState, i: int, j: int) -> FockState:
    if i == j:
        raise ValueError("two-mode squeezer needs two distinct modes")
    d = s.cutoff + 1
    op = _squeeze_operator(g.r, g.theta, s.cutoff)
    amps = np.moveaxis(s.amplitudes, (i, j), (0, 1))
    shape = amps.shape
    amps = (op @ amps.reshape(d * d, -1)).reshape(shape)
    amps = np.moveaxis(amps, (0, 1), (i, j))
    leak = _edge_population(amps, (i, j))
    if leak > LEAKAGE_TOL:
        raise CutoffTooSmallError(
            f"population {leak:.2e} at the cutoff {s.cutoff}; increase the cutoff"
        )
    return FockState(s.modes, s.cutoff, amps, max(s.leakage, leak))


def fock_phase(phi: float, s: FockState, i: int) -> FockState:
    """Multiply each amplitude by ``exp(i n phi)``, ``n`` the photon number of mode ``i``."""
    n = np.arange(s.cutoff + 1)
    shape = [1] * s.modes
    shape[i] = -1
    amps = s.amplitudes * np.exp(1j * phi * n).reshape(shape)
    return FockState(s.modes, s.cutoff, amps, s.leakage)


def fock_intensity(s: FockState) -> np.ndarray:
    prob = np.abs(s.amplitudes) ** 2
    prob = prob / prob.sum()
    n = np.arange(s.cutoff + 1)
    out = []
    for ax in range(s.modes):
        other = tuple(k for k in range(s.modes) if k != ax)
        out.append(float(prob.sum(axis=other) @ n))
    return np.array(out)


def _gate_sequence(cfg: SchemeConfig):
    """Gates in time order, independently spelled out from the Gaussian builders."""
    g1 = SqueezeParam(cfg.r, cfg.theta1)
    g2 = SqueezeParam(cfg.r, cfg.theta2)
    if cfg.kind is SchemeKind.STANDARD:
        return [("S", g1, 0, 1), ("U", 0), ("S", -g1, 0, 1)]
    seq = []
    for n in range(cfg.loops):
        if cfg.kind is SchemeKind.PARTIAL:
            seq += [("S", g1, 0, n + 1), ("U", 0), ("S", g2, 0, n + 1)]
        elif cfg.kind is SchemeKind.SWAPPING and (n // cfg.swap_interval) % 2:
            seq += [("S", -g1, 0, 1), ("U", 0), ("S", -g2, 0, 1)]
        else:
            seq += [("S", g1, 0, 1), ("U", 0), ("S", g2, 0, 1)]
    return seq


def fock_scheme(cfg: SchemeConfig, phi: float, cutoff: int | None = None,
                budget: int = DEFAULT_BUDGET) -> FockState:
    """State vector of a lossless scheme.

    The default cutoff assumes the worst case in which every squeezer adds
    its full amplitude, i.e. a total squeezing of ``2 N r``.
    """
    if cfg.eta:
        raise ValueError("the Fock oracle is pure-state only (eta must be 0)")
    seq = _gate_sequence(cfg)
    if cutoff is None:
        n_squeezers = sum(1 for gate in seq if gate[0] == "S")
        cutoff = cutoff_for(n_squeezers * cfg.r)
    s = fock_vacuum(cfg.mode_count, cutoff, budget)
    for gate in seq:
        if gate[0] == "S":
            s = fock_squeeze(gate[1], s, gate[2], gate[3])
        else:
            s = fock_phase(phi, s, gate[1])
    return s


@dataclass(frozen=True)
class FockQfi:
    H: float
    error: float
    leakage: float


def _fidelity_qfi(a: FockState, b: FockState, delta: float) -> float:
    ov = np.vdot(a.amplitudes.ravel(), b.amplitudes.ravel()) / (a.norm * b.norm)
    return 8.0 * (1.0 - abs(ov)) / delta**2


def fock_qfi(cfg: SchemeConfig, phi: float, delta: float = 1e-3,
             cutoff: int | None = None, budget: int = DEFAULT_BUDGET) -> FockQfi:
    """QFI from the overlap curvature ``8 (1 - |<psi(phi)|psi(phi+d)>|) / d^2``.

    The estimate at ``delta`` and ``delta/2`` is Richardson-extrapolated
    (the leading error is linear in ``delta``); ``error`` is the size of the
    extrapolation correction.
    """
    base = fock_scheme(cfg, phi, cutoff, budget)
    c = base.cutoff
    h1 = _fidelity_qfi(base, fock_scheme(cfg, phi + delta, c, budget), delta)
    h2 = _fidelity_qfi(base, fock_scheme(cfg, phi + delta / 2, c, budget), delta / 2)
    h = max(2 * h2 - h1, 0.0)
    return FockQfi(h, abs(h2 - h1), base.leakage)
