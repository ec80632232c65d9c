import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from su11feedback import gaussian as g
from su11feedback.gaussian import (
    BogoliubovTransform,
    GaussianState,
    InvalidStateError,
    LossChannel,
    SqueezeParam,
    apply,
    apply_loss,
    intensity,
    metric,
    phase_shifter,
    phase_shifter_derivative,
    symplectic_eigenvalues,
    two_mode_squeezer,
    vacuum,
)

# sinh(0.1)**2, evaluated to 12 digits
SINH2_01 = 0.0100333889

amplitudes = st.floats(min_value=0.0, max_value=2.0)
phases = st.floats(min_value=-10.0, max_value=10.0)


def tmsv(r, theta=0.0, m=2, i=0, j=1):
    return apply(two_mode_squeezer(SqueezeParam(r, theta), m, i, j), vacuum(m))


def test_vacuum():
    s = vacuum(3)
    assert s.modes == 3
    assert np.array_equal(s.cov, 0.5 * np.eye(6))
    assert np.allclose(symplectic_eigenvalues(s), 0.5)
    assert np.array_equal(intensity(s), np.zeros(3))


def test_vacuum_rejects_bad_mode_count():
    with pytest.raises(ValueError):
        vacuum(0)


def test_squeezer_zero_is_identity():
    w = two_mode_squeezer(SqueezeParam(0.0), 2)
    assert np.array_equal(w.mat, np.eye(4))


def test_squeezer_block_layout():
    r, theta = 0.3, 0.7
    s = g.squeezer_block(SqueezeParam(r, theta))
    c = np.array([[0, -np.exp(1j * theta) * np.sinh(r)],
                  [-np.exp(-1j * theta) * np.sinh(r), 0]])
    assert np.allclose(s[:2, :2], np.cosh(r) * np.eye(2))
    assert np.allclose(s[2:, 2:], np.cosh(r) * np.eye(2))
    assert np.allclose(s[:2, 2:], c)
    assert np.allclose(s[2:, :2], c)


def test_squeezer_bad_indices():
    with pytest.raises(ValueError):
        two_mode_squeezer(SqueezeParam(0.1), 2, 1, 1)
    with pytest.raises(IndexError):
        two_mode_squeezer(SqueezeParam(0.1), 2, 0, 2)


def test_tmsv_intensity():
    n = intensity(tmsv(0.1))
    assert np.allclose(n, [SINH2_01, SINH2_01], atol=1e-10)
    for r in (0.05, 0.5, 1.2):
        assert np.allclose(intensity(tmsv(r, 1.3)), np.sinh(r) ** 2, rtol=1e-12)


@settings(max_examples=60, deadline=None)
@given(r=amplitudes, theta=phases, pair=st.sampled_from([(0, 1), (1, 0), (0, 2), (2, 1)]))
def test_squeezer_preserves_metric(r, theta, pair):
    w = two_mode_squeezer(SqueezeParam(r, theta), 3, *pair)
    k = metric(3)
    scale = max(1.0, np.linalg.norm(w.mat, 2) ** 2)
    assert np.max(np.abs(w.mat @ k @ w.mat.conj().T - k)) <= 1e-10 * scale


@settings(max_examples=40, deadline=None)
@given(r1=amplitudes, t1=phases, r2=amplitudes, t2=phases, phi=phases)
def test_products_preserve_metric(r1, t1, r2, t2, phi):
    w = (two_mode_squeezer(SqueezeParam(r2, t2), 2) @ phase_shifter(phi, 2)
         @ two_mode_squeezer(SqueezeParam(r1, t1), 2))
    scale = max(1.0, np.linalg.norm(w.mat, 2) ** 2)
    assert w.metric_error() <= 1e-10 * scale


def test_non_metric_matrix_rejected():
    mat = np.eye(4, dtype=complex)
    mat[0, 2] = 0.5
    with pytest.raises(ValueError):
        BogoliubovTransform(2, mat)


def test_flipped_sign_breaks_metric():
    # transposed off-diagonal block: fine for real Gamma, broken for complex Gamma
    s = g.squeezer_block(SqueezeParam(0.4, 0.9))
    bad = s.copy()
    bad[2:, :2] = s[:2, 2:].T
    mat = np.asarray(bad, dtype=complex)
    k = metric(2)
    assert np.max(np.abs(mat @ k @ mat.conj().T - k)) > 1e-3


def test_phase_shifter_examples():
    assert np.array_equal(phase_shifter(0.0, 2).mat, np.eye(4))
    assert np.allclose(phase_shifter(np.pi, 1).mat, np.diag([-1, -1]))
    with pytest.raises(IndexError):
        phase_shifter(0.1, 2, 2)


def test_phase_leaves_intensity():
    s = tmsv(0.4, 0.3)
    for phi in (np.pi / 2, 1.0, -2.5):
        t = apply(phase_shifter(phi, 2, 0), s)
        assert np.allclose(intensity(t), intensity(s), atol=1e-14)


def test_phase_derivative_matches_difference():
    h = 1e-6
    for phi in (0.0, 0.4, 2.0):
        fd = (phase_shifter(phi + h, 3, 1).mat - phase_shifter(phi - h, 3, 1).mat) / (2 * h)
        assert np.allclose(phase_shifter_derivative(phi, 3, 1), fd, atol=1e-9, rtol=0)
    d0 = phase_shifter_derivative(0.0, 1)
    assert np.array_equal(d0, np.diag([1j, -1j]))


def test_phase_derivative_product_rule():
    # d/dphi [U(phi) U(phi)] = dU U + U dU, against the difference of U(phi)^2
    phi, h = 0.7, 1e-6
    u, du = phase_shifter(phi, 2).mat, phase_shifter_derivative(phi, 2)
    prod = lambda p: phase_shifter(p, 2).mat @ phase_shifter(p, 2).mat
    fd = (prod(phi + h) - prod(phi - h)) / (2 * h)
    assert np.allclose(du @ u + u @ du, fd, atol=1e-9)


def test_apply_identity_and_inverse_pair():
    s = tmsv(0.3, 0.2)
    assert np.allclose(apply(BogoliubovTransform.identity(2), s).cov, s.cov)
    w = two_mode_squeezer(SqueezeParam(-0.3, 0.2), 2)
    assert np.allclose(apply(w, s).cov, 0.5 * np.eye(4), atol=1e-12)


def test_squeezers_compose_additively():
    for r, theta in ((0.1, 0.0), (0.35, 1.1)):
        once = tmsv(2 * r, theta)
        w = two_mode_squeezer(SqueezeParam(r, theta), 2)
        twice = apply(w, apply(w, vacuum(2)))
        assert np.allclose(twice.cov, once.cov, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(r1=amplitudes, t1=phases, r2=amplitudes, phi=phases)
def test_composition_law(r1, t1, r2, phi):
    s = tmsv(0.2, 0.5)
    w1 = two_mode_squeezer(SqueezeParam(r1, t1), 2)
    w2 = phase_shifter(phi, 2, 1) @ two_mode_squeezer(SqueezeParam(r2), 2)
    a = apply(w2, apply(w1, s)).cov
    b = apply(w2 @ w1, s).cov
    assert np.allclose(a, b, atol=1e-10 * max(1.0, np.max(np.abs(a))))


def test_apply_dimension_mismatch():
    with pytest.raises(ValueError):
        apply(phase_shifter(0.1, 3), vacuum(2))


def test_loss_examples():
    s = tmsv(0.1)
    assert np.array_equal(apply_loss(LossChannel(0.0), s).cov, s.cov)
    assert np.allclose(apply_loss(LossChannel(1.0), s).cov, 0.5 * np.eye(4), atol=0)
    half = intensity(apply_loss(LossChannel(0.5), s))
    assert np.allclose(half, 0.00501669, atol=5e-9)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.0, 1.5), eta=st.floats(0.0, 1.0))
def test_loss_is_contraction(r, eta):
    s = tmsv(r, 0.4)
    out = apply_loss(LossChannel(eta), s)
    lhs = np.linalg.norm(out.cov - 0.5 * np.eye(4))
    rhs = (1 - eta) * np.linalg.norm(s.cov - 0.5 * np.eye(4))
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)
    assert np.all(intensity(out) >= 0)


def test_lossy_spectrum_bounds():
    r = 0.4
    s = tmsv(r)
    for eta in (0.1, 0.5, 0.9):
        nu = symplectic_eigenvalues(apply_loss(LossChannel(eta), s))
        assert np.all(nu > 0.5) and np.all(nu < np.cosh(2 * r) / 2)


def test_loss_channel_bounds():
    assert LossChannel(0.25).t == 0.75
    for bad in (-0.1, 1.1):
        with pytest.raises(ValueError):
            LossChannel(bad)


def test_squeeze_param_folding():
    p = SqueezeParam(-0.3, 0.5)
    assert p.r == 0.3
    assert p.theta == pytest.approx(0.5 + np.pi)
    assert SqueezeParam(0.2, 7.0).theta == pytest.approx(7.0 - 2 * np.pi)
    assert (-SqueezeParam(0.2, 0.0)).gamma == pytest.approx(-0.2)
    with pytest.raises(ValueError):
        SqueezeParam(np.inf)


def test_invalid_states_rejected():
    with pytest.raises(InvalidStateError):
        GaussianState(1, np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(InvalidStateError):
        GaussianState(1, np.diag([0.4, 0.4]))
    # positive diagonal but below the uncertainty bound
    with pytest.raises(InvalidStateError):
        GaussianState(1, np.array([[0.6, 0.5], [0.5, 0.6]]))
    with pytest.raises(ValueError):
        GaussianState(2, 0.5 * np.eye(2))


def test_state_is_read_only():
    s = tmsv(0.1)
    with pytest.raises(ValueError):
        s.cov[0, 0] = 3.0


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.0, 2.0), theta=phases, phi=phases)
def test_pure_spectrum(r, theta, phi):
    s = apply(phase_shifter(phi, 2), tmsv(r, theta))
    assert np.allclose(symplectic_eigenvalues(s), 0.5, atol=1e-9)
    assert np.max(np.abs(s.cov - s.cov.conj().T)) <= 1e-12
