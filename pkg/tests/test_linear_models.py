"""Covariance algebra tests for the linear quantizer approximations."""
import math

import numpy as np
import pytest

from quantlink.comms import rayleigh_channel
from quantlink.hermite import lambda_closed_form
from quantlink.linear_models import (
    aqnm_covariances,
    bussgang_covariances,
    c_rr,
    complex_arcsine,
    generalized_lambda_matrix,
    nondiag,
)
from quantlink.quantization import make_uniform_quantizer, optimal_step


def random_channel(k, n, seed):
    return rayleigh_channel(k, n, np.random.default_rng(seed))


def test_receive_covariance_identity_channel():
    assert np.allclose(c_rr(np.eye(2), 0.5), 1.5 * np.eye(2))


def test_receive_covariance_hermitian_and_trace():
    h = random_channel(8, 3, 0)
    c = c_rr(h, 0.3)
    assert np.allclose(c, c.conj().T, atol=1e-12)
    assert np.trace(c).real == pytest.approx(np.linalg.norm(h) ** 2 + 8 * 0.3)


def test_receive_covariance_validation():
    with pytest.raises(ValueError):
        c_rr(np.ones((2, 4)), 0.1)  # K < N
    with pytest.raises(ValueError):
        c_rr(np.eye(2), 0.0)


def test_aqnm_ideal_quantizer_limit():
    h = random_channel(6, 2, 1)
    c = c_rr(h, 0.2)
    cov = aqnm_covariances(c, 1e-12, 0.2)
    assert np.allclose(cov.c_yr, c, atol=1e-9)
    assert np.allclose(cov.c_ee, 0.2 * np.eye(6), atol=1e-9)


def test_aqnm_scalar_plugin():
    cov = aqnm_covariances(2.0 * np.eye(1), 0.5, 1.0)
    assert cov.c_ee[0, 0] == pytest.approx(0.75)


def test_aqnm_psd_on_random_inputs():
    rng = np.random.default_rng(2)
    for _ in range(5):
        h = rayleigh_channel(10, 3, rng)
        cov = aqnm_covariances(c_rr(h, 0.1), float(rng.uniform(0.05, 0.9)), 0.1)
        assert np.all(np.linalg.eigvalsh(cov.c_ee) >= -1e-10)
        assert np.allclose(cov.c_ee, cov.c_ee.conj().T, atol=1e-12)


def test_aqnm_rho_validation():
    with pytest.raises(ValueError):
        aqnm_covariances(np.eye(2), 1.5, 0.1)


def test_bussgang_identity_covariance_low_noise():
    n0 = 1e-9
    cov = bussgang_covariances(np.eye(3) * (1.0 + n0), n0)
    expected_diag = 1.0 - 2.0 / math.pi
    assert np.allclose(np.diag(cov.c_ee).real, expected_diag, atol=1e-6)
    off = cov.c_ee - np.diag(np.diag(cov.c_ee))
    assert np.max(np.abs(off)) < 1e-9


def test_bussgang_cross_covariance_diagonal():
    h = random_channel(6, 2, 3)
    c = c_rr(h, 0.2)
    cov = bussgang_covariances(c, 0.2)
    d = np.sqrt(np.diag(c).real)
    assert np.allclose(np.diag(cov.c_yr), math.sqrt(2.0 / math.pi) * d, atol=1e-12)


def test_bussgang_psd_and_hermitian():
    rng = np.random.default_rng(4)
    for _ in range(5):
        h = rayleigh_channel(12, 4, rng)
        cov = bussgang_covariances(c_rr(h, 0.15), 0.15)
        assert np.allclose(cov.c_ee, cov.c_ee.conj().T, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(cov.c_ee) >= -1e-9)


def test_bussgang_rejects_non_pd():
    bad = np.array([[1.0, 2.0], [2.0, 1.0]], dtype=complex)
    with pytest.raises(ValueError):
        bussgang_covariances(bad, 0.1)


def test_complex_arcsine_clips_rounding():
    m = np.array([[1.0 + 1e-15j]])
    out = complex_arcsine(m + 1e-15)
    assert np.isfinite(out).all()


def test_generalized_gain_matches_scalar_form_at_unit_variance():
    spec = make_uniform_quantizer(1, 2.0)
    lam = generalized_lambda_matrix(spec, np.eye(4))
    assert np.allclose(np.diag(lam), lambda_closed_form(spec), atol=1e-12)
    assert np.allclose(lam, np.diag(np.diag(lam)))


def test_generalized_gain_positive_for_symmetric_specs():
    rng = np.random.default_rng(5)
    h = rayleigh_channel(8, 3, rng)
    c = c_rr(h, 0.2)
    for bits in (1, 2, 3):
        lam = generalized_lambda_matrix(make_uniform_quantizer(bits, optimal_step(bits)), c)
        assert np.all(np.diag(lam).real > 0)


def test_generalized_gain_tends_to_identity():
    # fixed per-antenna variance 1/2, increasingly fine matched grids
    c = 0.5 * np.eye(3)
    errs = []
    for bits in (2, 3, 4, 5):
        spec = make_uniform_quantizer(bits, optimal_step(bits))
        lam = generalized_lambda_matrix(spec, c)
        errs.append(float(np.max(np.abs(np.diag(lam) - 1.0))))
    assert all(hi > lo for hi, lo in zip(errs, errs[1:]))
    assert errs[-1] < 0.05


def test_printed_gram_sign_gap_characterized_exactly():
    """The published additive-noise Gram and the expanded decorrelated one
    differ exactly by twice the rho-weighted off-diagonal channel Gram."""
    rng = np.random.default_rng(6)
    h = rayleigh_channel(10, 4, rng)
    n0, rho = 0.2, 0.3
    hh = h @ h.conj().T
    gram_printed = n0 * np.eye(10) + hh + rho * nondiag(hh)
    c = c_rr(h, n0)
    gram_expanded = (1.0 - rho) * (c + rho / (1.0 - rho) * np.diag(np.diag(c)))
    assert np.allclose(gram_printed - gram_expanded, 2.0 * rho * nondiag(hh), atol=1e-12)
