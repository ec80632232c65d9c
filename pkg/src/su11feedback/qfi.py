"""Quantum Fisher information of zero-mean Gaussian states and phase sensitivity.

Two trace formulas are provided.  For a pure state

    H = 1/4 Tr[(cov^-1 dcov)^2],

and for a lossy (thermalised) state the approximation

    H_th = 1/2 Tr[(cov^-1 dcov)^2].

They are kept exactly as written, so on a pure state ``qfi_noisy`` returns
twice ``qfi_pure``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .gaussian import SPECTRUM_NOISE, GaussianState, condition_number, symplectic_eigenvalues

__all__ = [
    "Method",
    "QfiResult",
    "NotPureError",
    "IllConditionedError",
    "qfi_pure",
    "qfi_noisy",
    "cramer_rao",
    "closed_form_standard",
    "closed_form_standard_nbar",
    "closed_form_sequential_two_pass",
    "closed_form_partial_one_pass",
    "scaled_qfi",
]

PURITY_TOL = 1e-6
IMAG_TOL = 1e-9
MAX_CONDITION = 1e12


class Method(str, enum.Enum):
    ANALYTIC = "analytic-derivative"
    FINITE_DIFFERENCE = "finite-difference"


class NotPureError(ValueError):
    """The state is mixed; the pure-state formula does not apply (use qfi_noisy)."""


class IllConditionedError(ArithmeticError):
    """Covariance too ill-conditioned to invert reliably."""


@dataclass(frozen=True)
class QfiResult:
    """QFI ``H`` and the Cramer-Rao bound ``delta_phi = (M H)^(-1/2)``.

    ``delta_phi`` is ``inf`` when ``H`` is zero.
    """

    H: float
    delta_phi: float
    M: int = 1
    method: Method = Method.ANALYTIC


def cramer_rao(H: float, M: int = 1) -> float:
    """Smallest phase standard deviation reachable with ``M`` repetitions."""
    if M < 1:
        raise ValueError("number of experiments M must be positive")
    if H <= 0:
        return math.inf
    return 1.0 / math.sqrt(M * H)


def _condition_guard(cov: np.ndarray) -> None:
    cond = condition_number(cov)
    if cond > MAX_CONDITION:
        raise IllConditionedError(
            f"covariance condition number {cond:.3g} exceeds {MAX_CONDITION:g}"
        )


def _trace_square(state: GaussianState, dstate: np.ndarray) -> float:
    cov = state.cov
    dstate = np.asarray(dstate)
    if dstate.shape != cov.shape:
        raise ValueError(f"derivative of shape {dstate.shape} does not match the state")
    _condition_guard(cov)
    x = scipy.linalg.cho_solve(scipy.linalg.cho_factor(cov), dstate)
    tr = np.sum(x * x.T)
    scale = max(1.0, abs(tr.real))
    if abs(tr.imag) > IMAG_TOL * scale:
        raise ArithmeticError(f"QFI trace has imaginary residue {tr.imag:.3g}")
    # Tr(X^2) >= 0 for Hermitian cov, dcov; clip round-off
    return max(float(tr.real), 0.0)


def qfi_pure(state: GaussianState, dstate, M: int = 1,
             method: Method = Method.ANALYTIC) -> QfiResult:
    _condition_guard(state.cov)
    nu = symplectic_eigenvalues(state)
    tol = PURITY_TOL + SPECTRUM_NOISE * condition_number(state.cov)
    if np.max(np.abs(nu - 0.5)) > tol:
        raise NotPureError(
            f"state is mixed (max symplectic eigenvalue {nu[-1]:.6g}); use qfi_noisy"
        )
    h = 0.25 * _trace_square(state, dstate)
    return QfiResult(h, cramer_rao(h, M), M, Method(method))


def qfi_noisy(state: GaussianState, dstate, M: int = 1,
              method: Method = Method.ANALYTIC) -> QfiResult:
    h = 0.5 * _trace_square(state, dstate)
    return QfiResult(h, cramer_rao(h, M), M, Method(method))


def closed_form_standard(r: float) -> float:
    """Phase-independent QFI of the standard SU(1,1) interferometer."""
    return math.sinh(2 * r) ** 2


def closed_form_standard_nbar(r: float) -> float:
    """Same value written through the probing photon number ``nbar = 2 sinh^2 r``."""
    nbar = 2 * math.sinh(r) ** 2
    return nbar * (nbar + 2)


def closed_form_sequential_two_pass(r: float, phi: float) -> float:
    """Published expression for the sequential scheme after two passes (N=2)."""
    c2, s2, c4 = math.cosh(2 * r), math.sinh(2 * r), math.cosh(4 * r)
    cp = math.cos(phi)
    return 4 * s2**2 * (c2**2 + c2**2 * s2**2 * cp**2 + cp * c4 * c2**2 + c4**2 / 4)


def closed_form_partial_one_pass(r: float, phi: float) -> float:
    """Published expression for the partial-feedback scheme after one loop (N=1)."""
    c1, c2, s2 = math.cosh(r), math.cosh(2 * r), math.sinh(2 * r)
    cp = math.cos(phi)
    return 4 * s2**2 * (
        0.5 * c2 * c1**2 * (cp + 1)
        + s2**2 * c1**4 * (8 * cp + 6 + 0.5 * math.cos(2 * phi)) / 16
    )


def scaled_qfi(H: float, N: int) -> float:
    """QFI divided by the quadratic loop scaling ``N^2``."""
    if N < 1:
        raise ValueError("loop count must be positive")
    return H / N**2
