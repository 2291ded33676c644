"""Scalar layer: special values, structural identities, boundary scalars,
gauge factors and their zero loci."""

import cmath

import numpy as np
import pytest

import openxxz.scalars as S
from openxxz.errors import SingularPoint
from openxxz.maba import (alpha_diagonal, beta_creation, beta_diagonal,
                          sample_point)
from openxxz.params import (GaugeFrame, check_frame, gamma, gamma_unit,
                            sample_boundary, sample_frame, sample_model)

Q = 1.31 + 0.17j


def test_b_special_values():
    assert abs(S.b(1.0, Q)) == 0.0
    assert abs(S.b(Q, Q) - 1.0) < 1e-15
    assert abs(S.b(Q * Q, Q) - (Q + 1 / Q)) < 1e-14


def test_c_zero_and_antisymmetry():
    assert abs(S.c(1.0)) == 0.0
    rng = np.random.default_rng(0)
    for _ in range(10):
        u = complex(*rng.normal(size=2))
        assert abs(S.c(u) + S.c(1 / u)) < 1e-12 * max(1.0, abs(S.c(u)))


def test_phi_at_unit_argument():
    # phi(1) = b(q^2)/b(q) = q + 1/q
    assert abs(S.phi(1.0, Q) - (Q + 1 / Q)) < 1e-14


def test_w_reference_value():
    assert abs(S.w(1.0, 1.0, 2.0) - (-1.0)) < 1e-15


def test_structural_names_and_dispatch():
    names = S.structural_names()
    assert len(names) == 14
    assert len(set(names)) == 14
    u, v = 1.7 - 0.3j, 0.6 + 0.9j
    for name in names:
        direct = getattr(S, name)(u, v, Q)
        assert S.structural(name, u, v, Q) == direct
    with pytest.raises(KeyError):
        S.structural("no_such_function", u, v, Q)


def test_f_definition_invariant():
    # f(u, v) b(v/u) b(q u v) = b(q v/u) b(u v), checked pointwise.
    rng = np.random.default_rng(1)
    model = sample_model(rng, n_sites=2)
    q = model.q
    for _ in range(50):
        u = sample_point(rng, model)
        v = sample_point(rng, model, avoid=(u,))
        lhs = S.f(u, v, q) * S.b(v / u, q) * S.b(q * u * v, q)
        rhs = S.b(q * v / u, q) * S.b(u * v, q)
        assert S.rel_residual(lhs, rhs) < 1e-12


def test_structural_singular_at_coincident_points():
    with pytest.raises(SingularPoint):
        S.f(1.2 + 0.4j, 1.2 + 0.4j, Q)


def test_k_combination_identities_both_boundaries():
    # The two scalar combination identities behind every diagonal reduction,
    # for both boundary scalars: the pair (k(u), k(1/(qu))) at one point is a
    # fixed linear image of the pair at any other point.
    rng = np.random.default_rng(2)
    model = sample_model(rng, n_sites=2)
    q = model.q
    bp = sample_boundary(rng)
    for _ in range(25):
        u = sample_point(rng, model)
        v = sample_point(rng, model, avoid=(u,))
        for kf in (lambda x: S.k_minus(x, bp), lambda x: S.k_plus(x, bp)):
            lhs1 = S.g(u, v, q) * S.phi(u, q) * kf(u) + S.n(u, v, q) * kf(1 / (q * u))
            rhs1 = S.F(u, v, q) * S.phi(1 / (q * v), q) * S.phi(v, q) * kf(v)
            assert S.rel_residual(lhs1, rhs1) < 1e-11
            lhs2 = S.k(u, v, q) * kf(1 / (q * u)) + S.w(u, v, q) * S.phi(u, q) * kf(u)
            rhs2 = -S.F(u, v, q) * S.phi(v, q) * kf(1 / (q * v))
            assert S.rel_residual(lhs2, rhs2) < 1e-11


def test_boundary_scalar_unit_values():
    rng = np.random.default_rng(3)
    bp = sample_boundary(rng)
    assert abs(S.k_minus(1.0, bp) - (bp.nu_minus + bp.nu_plus)) < 1e-14
    assert abs(S.k_plus(1.0, bp) - (bp.eps_plus + bp.eps_minus)) < 1e-14


def test_twisted_scalar_zero_locus():
    # The factorized diagonal scalar vanishes exactly where either linear
    # factor does: u = i/mu and u = i*mu_tilde.
    rng = np.random.default_rng(4)
    bp = sample_boundary(rng)
    scale = abs(S.k_tilde_minus(1.5, bp))
    assert abs(S.k_tilde_minus(1j / bp.mu, bp)) < 1e-13 * scale
    assert abs(S.k_tilde_minus(1j * bp.mu_tilde, bp)) < 1e-13 * scale


def test_raw_twisted_difference_identity():
    # u k(u) - k_twisted(u) = i tau_tilde tau (mu_tilde/mu) c(u): the raw
    # diagonal scalar and its factorized-product form differ by a fixed
    # multiple of the antisymmetric combination.
    rng = np.random.default_rng(5)
    bp = sample_boundary(rng)
    for _ in range(10):
        u = complex(*rng.normal(size=2)) + 1.5
        lhs = u * S.k_minus(u, bp) - S.k_tilde_minus(u, bp)
        rhs = 1j * bp.tau_tilde * bp.tau * (bp.mu_tilde / bp.mu) * S.c(u)
        assert S.rel_residual(lhs, rhs) < 1e-13


def test_four_fold_relabeling_fixes_raw_diagonals():
    # Swapping the two factorization parameters or jointly inverting them
    # relabels the same boundary matrix: all raw coefficients are unchanged.
    # The factorized-product scalar itself is NOT swap-invariant (its
    # difference from u*k(u) picks up the reciprocal ratio), which pins that
    # the relabeling group acts on the factorization, not on the matrix.
    from openxxz.params import BoundaryParams

    rng = np.random.default_rng(6)
    bp = sample_boundary(rng)
    images = [
        dict(mu=bp.mu_tilde, mu_tilde=bp.mu, xi=bp.xi_tilde, xi_tilde=bp.xi),
        dict(mu=1 / bp.mu, mu_tilde=1 / bp.mu_tilde, xi=1 / bp.xi, xi_tilde=1 / bp.xi_tilde),
        dict(mu=1 / bp.mu_tilde, mu_tilde=1 / bp.mu, xi=1 / bp.xi_tilde, xi_tilde=1 / bp.xi),
    ]
    for fields in images:
        other = BoundaryParams.from_factorized(
            kappa=bp.kappa, kappa_tilde=bp.kappa_tilde,
            tau=bp.tau, tau_tilde=bp.tau_tilde, **fields)
        for name in ("nu_minus", "nu_plus", "eps_minus", "eps_plus"):
            assert abs(getattr(other, name) - getattr(bp, name)) < 1e-12
    swapped = BoundaryParams.from_factorized(
        kappa=bp.kappa, kappa_tilde=bp.kappa_tilde, tau=bp.tau,
        tau_tilde=bp.tau_tilde, mu=bp.mu_tilde, mu_tilde=bp.mu,
        xi=bp.xi, xi_tilde=bp.xi_tilde)
    u = 1.4 - 0.2j
    assert S.rel_residual(S.k_tilde_minus(u, bp), S.k_tilde_minus(u, swapped)) > 1e-3


def test_gauge_factor_zero_locus_and_unit_value():
    rng = np.random.default_rng(7)
    frame = sample_frame(rng, Q, 2)
    m = 1
    u0 = cmath.sqrt(frame.beta / frame.alpha) * Q**m
    scale = abs(gamma(1.7, m, frame, Q))
    assert abs(gamma(u0, m, frame, Q)) < 1e-13 * scale
    assert gamma_unit(m, frame, Q) == gamma(1.0, m, frame, Q)


def test_degenerate_frame_rejected():
    rng = np.random.default_rng(8)
    frame = sample_frame(rng, Q, 2)
    with pytest.raises(SingularPoint):
        check_frame(GaugeFrame(alpha=frame.beta * Q**2, beta=frame.beta, m0=0), Q, 2)
    # a generic frame passes through unchanged
    assert check_frame(frame, Q, 2) is frame


def test_dynamical_coefficient_zero_loci():
    # Each off-diagonal coefficient of the gauged boundary action vanishes on
    # an explicit one-parameter locus of gauge frames.
    rng = np.random.default_rng(9)
    bp = sample_boundary(rng)
    frame = sample_frame(rng, Q, 2)
    m = 2
    a0 = -1j * Q ** (m + 1) * bp.kappa_tilde * bp.xi / (bp.kappa * bp.xi_tilde)
    b0 = -1j * Q ** (-m - 1) * bp.kappa_tilde * bp.xi_tilde / (bp.kappa * bp.xi)
    bc = frame.alpha * (bp.xi_tilde / bp.xi) ** 2 * Q ** (-2 * m)
    scale = abs(S.zeta(m, frame, bp, Q)) + abs(S.delta(m, frame, bp, Q))
    assert abs(S.zeta(m, GaugeFrame(a0, frame.beta, 0), bp, Q)) < 1e-12 * scale
    assert abs(S.delta(m, GaugeFrame(frame.alpha, b0, 0), bp, Q)) < 1e-12 * scale
    assert abs(S.chi(m, GaugeFrame(frame.alpha, bc, 0), bp, Q)) < 1e-12 * scale
    # the closed-form diagonal/creation frame builders sit on those loci
    m0, M = 0, 1
    mM = m0 + 2 * M
    fr_a = GaugeFrame(alpha_diagonal(bp, Q, m0, M), frame.beta, m0)
    assert abs(S.zeta(mM, fr_a, bp, Q)) < 1e-12 * scale
    fr_b = GaugeFrame(frame.alpha, beta_diagonal(bp, Q, m0, M), m0)
    assert abs(S.delta(m0, fr_b, bp, Q)) < 1e-12 * scale
    fr_c = GaugeFrame(frame.alpha, beta_creation(bp, Q, m0, M), m0)
    assert abs(S.zeta_tilde(mM, fr_c, bp, Q)) < 1e-12 * scale


def test_dyn_coeff_dispatch():
    rng = np.random.default_rng(10)
    bp = sample_boundary(rng)
    frame = sample_frame(rng, Q, 2)
    for name, fn in (("zeta", S.zeta), ("zeta_tilde", S.zeta_tilde),
                     ("delta", S.delta), ("chi", S.chi), ("chi_hat", S.chi_hat),
                     ("chi_bar", S.chi_bar), ("chi_bar_hat", S.chi_bar_hat)):
        assert S.dyn_coeff(name, 1, frame, bp, Q) == fn(1, frame, bp, Q)


def test_rel_residual_normalization():
    assert S.rel_residual(0.0, 0.0) == 0.0
    assert S.rel_residual(2.0, 2.0) == 0.0
    # |lhs - rhs| / (1 + max|.|): large equal magnitudes stay O(1) apart only
    # if they actually differ
    assert 0.4 < S.rel_residual(1e6, 2e6) < 1.0
