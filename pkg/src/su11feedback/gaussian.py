"""Zero-mean Gaussian states in the complex (a, a^dagger) ordering.

A state of ``m`` modes is stored as a ``2m x 2m`` Hermitian covariance
matrix over the operator vector ``(a_1, a_1^dagger, a_2, a_2^dagger, ...)``,
normalised so that the vacuum is ``I/2``.  Linear optics and two-mode
squeezing act as Bogoliubov matrices ``W`` with ``cov -> W cov W^dagger``;
they preserve the metric ``K = diag(+1, -1, +1, -1, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GaussianState",
    "BogoliubovTransform",
    "SqueezeParam",
    "LossChannel",
    "InvalidStateError",
    "metric",
    "vacuum",
    "two_mode_squeezer",
    "phase_shifter",
    "phase_shifter_derivative",
    "apply",
    "apply_loss",
    "intensity",
    "symplectic_eigenvalues",
    "condition_number",
    "spectrum_tolerance",
]

HERMITIAN_TOL = 1e-12
METRIC_TOL = 1e-10
# states whose symplectic spectrum dips below 1/2 - SPECTRUM_TOL are rejected
SPECTRUM_TOL = 1e-6
SPECTRUM_NOISE = 1e-15


class InvalidStateError(ValueError):
    """Raised when a covariance matrix is not a physical Gaussian state."""


def metric(m: int) -> np.ndarray:
    """Return the conserved bilinear form ``diag(+1, -1)`` repeated ``m`` times."""
    return np.diag(np.tile([1.0, -1.0], m))


def _check_modes(m: int) -> None:
    if int(m) != m or m < 1:
        raise ValueError(f"mode count must be a positive integer, got {m!r}")


def _check_index(i: int, m: int) -> None:
    if not 0 <= i < m:
        raise IndexError(f"mode index {i} out of range for {m} modes")


def _hermitize(x: np.ndarray) -> np.ndarray:
    return 0.5 * (x + x.conj().T)


def condition_number(cov: np.ndarray) -> float:
    w = np.linalg.eigvalsh(_hermitize(cov))
    return float(w[-1] / w[0]) if w[0] > 0 else np.inf


def spectrum_tolerance(cov: np.ndarray) -> float:
    """Allowed dip of the symplectic spectrum below 1/2.

    Round-off in the spectrum grows like ``eps * cond(cov)``, so strongly
    squeezed states get a correspondingly looser floor.
    """
    return SPECTRUM_TOL + SPECTRUM_NOISE * condition_number(cov)


def _spectrum(cov: np.ndarray) -> np.ndarray:
    m = cov.shape[0] // 2
    try:
        chol = np.linalg.cholesky(_hermitize(cov))
    except np.linalg.LinAlgError:
        raise InvalidStateError("covariance matrix is not positive definite") from None
    # K.cov is similar to the Hermitian L^dag K L (cov = L L^dag); its
    # eigenvalues come in (+nu, -nu) pairs
    herm = chol.conj().T @ metric(m) @ chol
    ev = np.abs(np.linalg.eigvalsh(_hermitize(herm)))
    return np.sort(ev)[::2]


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Zero-displacement Gaussian state of ``modes`` bosonic modes.

    The constructor validates Hermiticity, the photon-number diagonal and the
    symplectic spectrum.  Pass ``check=False`` only for matrices already known
    to be valid (the validation costs one eigen-decomposition).
    """

    modes: int
    cov: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        _check_modes(self.modes)
        cov = np.array(self.cov, dtype=complex)
        if cov.shape != (2 * self.modes, 2 * self.modes):
            raise ValueError(
                f"covariance of shape {cov.shape} does not match {self.modes} modes"
            )
        cov.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        if self.check:
            self.validate()

    def validate(self) -> None:
        cov = self.cov
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.conj().T)) > HERMITIAN_TOL * scale:
            raise InvalidStateError("covariance matrix is not Hermitian")
        diag = np.diag(cov)
        if np.max(np.abs(diag.imag)) > HERMITIAN_TOL * scale:
            raise InvalidStateError("covariance diagonal is not real")
        if np.min(diag.real) < 0.5 - HERMITIAN_TOL * scale:
            raise InvalidStateError("negative photon number on the diagonal")
        nu = _spectrum(cov)
        if nu[0] < 0.5 - spectrum_tolerance(cov):
            raise InvalidStateError(
                f"symplectic eigenvalue {nu[0]:.12g} below the vacuum bound 1/2"
            )

    @property
    def dim(self) -> int:
        return 2 * self.modes


@dataclass(frozen=True, eq=False)
class BogoliubovTransform:
    """Complex ``2m x 2m`` matrix acting on ``(a_1, a_1^dagger, ...)``.

    Composition follows operator order: ``(w2 @ w1)`` applies ``w1`` first.
    """

    modes: int
    mat: np.ndarray
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        _check_modes(self.modes)
        mat = np.array(self.mat, dtype=complex)
        if mat.shape != (2 * self.modes, 2 * self.modes):
            raise ValueError(f"matrix of shape {mat.shape} does not match {self.modes} modes")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)
        if self.check:
            err = self.metric_error()
            scale = max(1.0, float(np.linalg.norm(mat, 2)) ** 2)
            if err > METRIC_TOL * scale:
                raise ValueError(f"matrix does not preserve the metric (error {err:.3g})")

    def metric_error(self) -> float:
        """Largest entry of ``|mat K mat^dagger - K|``."""
        k = metric(self.modes)
        return float(np.max(np.abs(self.mat @ k @ self.mat.conj().T - k)))

    def __matmul__(self, other: "BogoliubovTransform") -> "BogoliubovTransform":
        if not isinstance(other, BogoliubovTransform):
            return NotImplemented
        if other.modes != self.modes:
            raise ValueError("cannot compose transforms on different mode counts")
        return BogoliubovTransform(self.modes, self.mat @ other.mat)

    @classmethod
    def identity(cls, m: int) -> "BogoliubovTransform":
        return cls(m, np.eye(2 * m, dtype=complex), check=False)


@dataclass(frozen=True)
class SqueezeParam:
    """Two-mode squeezing parameter ``Gamma = r exp(i theta)``.

    A negative amplitude is folded into the phase, so ``SqueezeParam(-r, t)``
    equals ``SqueezeParam(r, t + pi)``.
    """

    r: float
    theta: float = 0.0

    def __post_init__(self):
        r, theta = float(self.r), float(self.theta)
        if not (np.isfinite(r) and np.isfinite(theta)):
            raise ValueError("squeezing parameters must be finite")
        if r < 0:
            r, theta = -r, theta + np.pi
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "theta", float(np.mod(theta, 2 * np.pi)))

    @property
    def gamma(self) -> complex:
        return self.r * np.exp(1j * self.theta)

    def __neg__(self) -> "SqueezeParam":
        return SqueezeParam(self.r, self.theta + np.pi)


@dataclass(frozen=True)
class LossChannel:
    """Uniform linear photon loss; ``eta`` is the fraction of photons lost."""

    eta: float

    def __post_init__(self):
        eta = float(self.eta)
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"loss eta must lie in [0, 1], got {eta}")
        object.__setattr__(self, "eta", eta)

    @property
    def t(self) -> float:
        return 1.0 - self.eta


def vacuum(m: int) -> GaussianState:
    _check_modes(m)
    return GaussianState(m, 0.5 * np.eye(2 * m, dtype=complex), check=False)


def squeezer_block(g: SqueezeParam) -> np.ndarray:
    """4x4 Bogoliubov block of ``S(Gamma)`` on the ordered pair of modes (i, j).

    Both off-diagonal 2x2 blocks equal ``C``; the generator is symmetric in the
    two modes, so mode ``j`` acquires the same ``-exp(i theta) sinh r``
    coupling to ``a_i^dagger`` that mode ``i`` acquires to ``a_j^dagger``.
    """
    ch, sh = np.cosh(g.r), np.sinh(g.r)
    e = np.exp(1j * g.theta)
    c = np.array([[0.0, -e * sh], [-np.conj(e) * sh, 0.0]])
    a = ch * np.eye(2)
    return np.block([[a, c], [c, a]])


def phase_block(phi: float) -> np.ndarray:
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def phase_block_derivative(phi: float) -> np.ndarray:
    return np.diag([1j * np.exp(1j * phi), -1j * np.exp(-1j * phi)])


def two_mode_squeezer(g: SqueezeParam, m: int, i: int = 0, j: int = 1) -> BogoliubovTransform:
    """Embed the two-mode squeezer ``S(Gamma)`` on modes ``(i, j)`` of ``m``."""
    _check_modes(m)
    _check_index(i, m)
    _check_index(j, m)
    if i == j:
        raise ValueError("two-mode squeezer needs two distinct modes")
    mat = np.eye(2 * m, dtype=complex)
    idx = np.array([2 * i, 2 * i + 1, 2 * j, 2 * j + 1])
    mat[np.ix_(idx, idx)] = squeezer_block(g)
    return BogoliubovTransform(m, mat)


def phase_shifter(phi: float, m: int, i: int = 0) -> BogoliubovTransform:
    _check_modes(m)
    _check_index(i, m)
    mat = np.eye(2 * m, dtype=complex)
    mat[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = phase_block(phi)
    return BogoliubovTransform(m, mat, check=False)


def phase_shifter_derivative(phi: float, m: int, i: int = 0) -> np.ndarray:
    """Analytic ``d/dphi`` of :func:`phase_shifter` (zero outside mode ``i``)."""
    _check_modes(m)
    _check_index(i, m)
    mat = np.zeros((2 * m, 2 * m), dtype=complex)
    mat[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = phase_block_derivative(phi)
    return mat


def apply(w: BogoliubovTransform, s: GaussianState) -> GaussianState:
    """Return the state ``w cov w^dagger`` (re-symmetrised)."""
    if w.modes != s.modes:
        raise ValueError(f"transform on {w.modes} modes applied to a {s.modes}-mode state")
    cov = _hermitize(w.mat @ s.cov @ w.mat.conj().T)
    return GaussianState(s.modes, cov)


def apply_loss(c: LossChannel, s: GaussianState) -> GaussianState:
    """Uniform loss on every mode: ``cov -> t (cov - I/2) + I/2``."""
    half = 0.5 * np.eye(s.dim)
    return GaussianState(s.modes, c.t * (s.cov - half) + half, check=False)


def intensity(s: GaussianState) -> np.ndarray:
    """Mean photon number of each mode."""
    return np.diag(s.cov).real[::2] - 0.5


def symplectic_eigenvalues(s: GaussianState) -> np.ndarray:
    """Symplectic spectrum, one value per mode, ascending.  Pure states give 1/2."""
    return _spectrum(s.cov)
