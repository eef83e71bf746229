"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import certlab


def test_validate_and_distances():
    rho = certlab.diagonal_density([0.5, 0.5])
    sigma = certlab.diagonal_density([0.45, 0.55])
    assert rho.dim == 2
    assert certlab.trace_distance(rho, sigma) == pytest.approx(0.05)
    assert certlab.fidelity(rho, rho) == pytest.approx(1.0)
    assert certlab.quantum_chi2(sigma, rho) == pytest.approx(0.01, rel=1e-9)


def test_validation_error():
    with pytest.raises(certlab.CertlabError):
        certlab.validate_density(np.diag([0.6, 0.5]).astype(complex))


def test_haar_is_unitary_and_deterministic():
    u1 = certlab.sample_haar(4, seed=7)
    u2 = certlab.sample_haar(4, seed=7)
    assert np.allclose(u1, u2)
    assert np.allclose(u1 @ u1.conj().T, np.eye(4), atol=1e-9)


def test_paninski_farness():
    rho = certlab.quantum_paninski(4, 0.5, seed=3)
    mixed = certlab.diagonal_density([0.25] * 4)
    assert 2 * certlab.trace_distance(rho, mixed) == pytest.approx(0.5, abs=1e-9)


def test_analyze_flat_state():
    eps = 1.0 / 24.0
    report = certlab.analyze([0.125] * 8, eps)
    assert report["lower_best"] == pytest.approx(8.0 / eps**2)
    assert report["upper"] == pytest.approx(8.0 / eps**2)
    assert "tuned-branch" in report["regime_flags"]


def test_schatten_half_quasinorm():
    m = np.diag([0.5, 0.25, 0.25]).astype(complex)
    assert certlab.schatten(m, 0.5) == pytest.approx((math.sqrt(0.5) + 1.0) ** 2)


def test_kernel_identity_value():
    # Corner family at lambda = (1/2, 1/2): one-copy divergence is eps^2 summed
    # over the sign pair.
    val = certlab.chi2_kernel_exact("two-by-two", [0.5, 0.5], 0.1, 1)
    assert val >= 0.0


def test_certify_equal_and_far():
    sigma = certlab.diagonal_density([0.25] * 4)
    equal = certlab.certify(sigma, sigma, eps=0.2, delta=0.05, seed=11)
    assert equal["verdict"] == "equal"
    rho = certlab.quantum_paninski(4, 0.4, seed=5)
    far = certlab.certify(rho, sigma, eps=0.2, delta=0.05, seed=11)
    assert far["verdict"] == "far"
    assert far["total_copies"] > 0
