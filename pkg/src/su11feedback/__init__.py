"""Gaussian simulation of SU(1,1) interferometers with feedback loops.

The package models the standard interferometer, the sequential and partial
feedback schemes and the squeeze-swapping scheme on complex-ordered
covariance matrices, computes their quantum Fisher information, and
cross-checks the Gaussian engine against a truncated Fock-space simulator.
"""

from .experiments import (
    SweepRow,
    SweepSpec,
    compare_resources,
    preset,
    run_sweep,
)
from .fock import fock_qfi, fock_scheme
from .gaussian import (
    BogoliubovTransform,
    GaussianState,
    InvalidStateError,
    LossChannel,
    SqueezeParam,
    apply,
    apply_loss,
    intensity,
    phase_shifter,
    phase_shifter_derivative,
    symplectic_eigenvalues,
    two_mode_squeezer,
    vacuum,
)
from .qfi import (
    IllConditionedError,
    NotPureError,
    QfiResult,
    closed_form_partial_one_pass,
    closed_form_sequential_two_pass,
    closed_form_standard,
    cramer_rao,
    qfi_noisy,
    qfi_pure,
    scaled_qfi,
)
from .schemes import (
    PeriodNotResolvedError,
    SchemeConfig,
    SchemeKind,
    SchemeOutput,
    build,
    estimate_period,
)

__version__ = "0.1.0"

__all__ = [
    "BogoliubovTransform", "GaussianState", "InvalidStateError", "LossChannel", "SqueezeParam",
    "apply", "apply_loss", "intensity", "phase_shifter", "phase_shifter_derivative",
    "symplectic_eigenvalues", "two_mode_squeezer", "vacuum",
    "SchemeConfig", "SchemeKind", "SchemeOutput", "PeriodNotResolvedError", "build",
    "estimate_period",
    "QfiResult", "NotPureError", "IllConditionedError", "qfi_pure", "qfi_noisy", "cramer_rao",
    "closed_form_standard", "closed_form_sequential_two_pass", "closed_form_partial_one_pass",
    "scaled_qfi",
    "fock_scheme", "fock_qfi",
    "SweepSpec", "SweepRow", "run_sweep", "compare_resources", "preset",
]
