"""Parameter containers: sampling, factorized/raw conversion, genericity guards."""

import numpy as np
import pytest

from openxxz.errors import SingularPoint
from openxxz.params import (BoundaryParams, GaugeFrame, ModelParams,
                            check_frame, sample_boundary, sample_frame,
                            sample_model)


def test_model_params_defaults_and_validation():
    m = ModelParams(q=1.3 + 0.1j, n_sites=3)
    assert m.inhomogeneities == (1.0 + 0.0j,) * 3
    with pytest.raises(ValueError):
        ModelParams(q=1.3, n_sites=2, inhomogeneities=(1.0,))
    # roots of unity are rejected: the scalar layer divides by q**k - 1
    with pytest.raises(SingularPoint):
        ModelParams(q=1.0, n_sites=1)
    with pytest.raises(SingularPoint):
        ModelParams(q=np.exp(2j * np.pi / 3), n_sites=2)


def test_sample_model_homogeneous_flag():
    rng = np.random.default_rng(0)
    m = sample_model(rng, n_sites=4, homogeneous=True)
    assert m.inhomogeneities == (1.0 + 0.0j,) * 4
    m2 = sample_model(np.random.default_rng(0), n_sites=4)
    assert any(abs(v - 1.0) > 1e-3 for v in m2.inhomogeneities)


def test_sample_boundary_is_generic():
    rng = np.random.default_rng(1)
    bp = sample_boundary(rng)
    for name in ("eps_plus", "eps_minus", "kappa", "kappa_tilde", "xi",
                 "xi_tilde", "nu_plus", "nu_minus", "tau", "tau_tilde",
                 "mu", "mu_tilde"):
        assert abs(getattr(bp, name)) > 1e-6
    assert not bp.triangular


def test_raw_factorized_round_trip():
    # raw -> recovered factorization -> raw must close exactly, even though
    # the recovery picks one branch of each reciprocal quadratic pair.
    rng = np.random.default_rng(2)
    bp = sample_boundary(rng)
    raw = dict(eps_plus=bp.eps_plus, eps_minus=bp.eps_minus, kappa=bp.kappa,
               kappa_tilde=bp.kappa_tilde, nu_plus=bp.nu_plus,
               nu_minus=bp.nu_minus, tau=bp.tau, tau_tilde=bp.tau_tilde)
    rec = BoundaryParams.from_raw(**raw)
    assert rec.branch.startswith("left:")
    again = BoundaryParams.from_factorized(
        xi=rec.xi, xi_tilde=rec.xi_tilde, kappa=rec.kappa,
        kappa_tilde=rec.kappa_tilde, mu=rec.mu, mu_tilde=rec.mu_tilde,
        tau=rec.tau, tau_tilde=rec.tau_tilde)
    for name in raw:
        assert abs(getattr(again, name) - raw[name]) < 1e-12


def test_triangular_branch():
    rng = np.random.default_rng(3)
    bp = sample_boundary(rng)
    tri = BoundaryParams.from_raw(
        eps_plus=bp.eps_plus, eps_minus=bp.eps_minus, kappa=bp.kappa,
        kappa_tilde=bp.kappa_tilde, nu_plus=bp.nu_plus, nu_minus=bp.nu_minus,
        tau=bp.tau, tau_tilde=0.0)
    assert tri.triangular
    assert tri.mu is None and tri.mu_tilde is None
    assert tri.branch.endswith("right:triangular")
    assert tri.tau_tilde == 0.0


def test_constructor_guards():
    rng = np.random.default_rng(4)
    bp = sample_boundary(rng)
    # the factorized builder needs concrete factorization parameters
    with pytest.raises(TypeError):
        BoundaryParams.from_factorized(
            xi=bp.xi, xi_tilde=bp.xi_tilde, kappa=bp.kappa,
            kappa_tilde=bp.kappa_tilde, mu=None, mu_tilde=None,
            tau=bp.tau, tau_tilde=bp.tau_tilde)
    # vanishing off-diagonal amplitudes are outside the generic regime
    with pytest.raises(SingularPoint):
        BoundaryParams.from_raw(
            eps_plus=bp.eps_plus, eps_minus=bp.eps_minus, kappa=0.0,
            kappa_tilde=bp.kappa_tilde, nu_plus=bp.nu_plus,
            nu_minus=bp.nu_minus, tau=bp.tau, tau_tilde=bp.tau_tilde)
    # the recovery scale i*kappa*kappa_tilde must clear the genericity floor
    with pytest.raises(SingularPoint):
        BoundaryParams.from_raw(
            eps_plus=bp.eps_plus, eps_minus=bp.eps_minus, kappa=1e-5,
            kappa_tilde=1e-5, nu_plus=bp.nu_plus, nu_minus=bp.nu_minus,
            tau=bp.tau, tau_tilde=bp.tau_tilde)
    # bare constructor: mu must be None exactly when the form is triangular
    with pytest.raises(ValueError):
        BoundaryParams(eps_plus=bp.eps_plus, eps_minus=bp.eps_minus,
                       kappa=bp.kappa, kappa_tilde=bp.kappa_tilde,
                       xi=bp.xi, xi_tilde=bp.xi_tilde, nu_plus=bp.nu_plus,
                       nu_minus=bp.nu_minus, tau=bp.tau, tau_tilde=0.0,
                       mu=bp.mu, mu_tilde=bp.mu_tilde)


def test_sample_frame_respects_origin_offset():
    rng = np.random.default_rng(5)
    q = 1.2 - 0.3j
    frame = sample_frame(rng, q, 3, m0=-2)
    assert frame.m0 == -2
    assert check_frame(frame, q, 3) is frame
    assert GaugeFrame(alpha=frame.alpha, beta=frame.beta).m0 == 0
