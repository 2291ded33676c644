"""Boundary K-matrices: structure, reflection equations, quantum determinant,
Hamiltonian coupling extraction."""

import dataclasses

import numpy as np
import pytest

import openxxz.scalars as S
from openxxz.boundary import (check_dual_reflection, check_reflection,
                              hamiltonian_couplings, k_minus_matrix,
                              k_plus_matrix, q_det_minus, q_det_plus)
from openxxz.errors import SingularPoint
from openxxz.maba import sample_point
from openxxz.params import BoundaryParams, sample_boundary, sample_model


def test_lower_boundary_matrix_entries():
    rng = np.random.default_rng(0)
    bp = sample_boundary(rng)
    u = 1.5 - 0.3j
    K = k_minus_matrix(u, bp)
    assert K[0, 0] == S.k_minus(u, bp)
    assert K[1, 1] == S.k_minus(1 / u, bp)
    assert K[0, 1] == bp.tau**2 * S.c(u)
    assert K[1, 0] == bp.tau_tilde**2 * S.c(u)
    assert np.max(np.abs(k_minus_matrix(1.0, bp)
                         - (bp.nu_minus + bp.nu_plus) * np.eye(2))) < 1e-14


def test_upper_boundary_matrix_entries():
    rng = np.random.default_rng(1)
    bp = sample_boundary(rng)
    q = 1.27 + 0.21j
    u = 0.8 + 0.6j
    K = k_plus_matrix(u, bp, q)
    assert K[0, 0] == S.k_plus(q * u, bp)
    assert K[1, 1] == S.k_plus(1 / (q * u), bp)
    assert K[0, 1] == bp.kappa_tilde**2 * S.c(q * u)
    assert K[1, 0] == bp.kappa**2 * S.c(q * u)


def test_triangular_degeneration_scales_quadratically():
    rng = np.random.default_rng(2)
    bp = sample_boundary(rng)
    u = 1.9 + 0.2j

    def lower_left(tt):
        b2 = dataclasses.replace(bp, tau_tilde=tt, mu=None, mu_tilde=None) \
            if abs(tt) < 1e-6 else dataclasses.replace(bp, tau_tilde=tt)
        return k_minus_matrix(u, b2)[1, 0]

    assert lower_left(0.0) == 0.0
    ratio = lower_left(0.02) / lower_left(0.002)
    assert abs(ratio - 100.0) < 1e-9


def test_reflection_equations_hold_generically():
    rng = np.random.default_rng(3)
    model = sample_model(rng, n_sites=1)
    q = model.q
    bp = sample_boundary(rng)
    for _ in range(10):
        u1 = sample_point(rng, model)
        u2 = sample_point(rng, model, avoid=(u1,))
        assert check_reflection(u1, u2, bp, q) < 1e-13
        assert check_dual_reflection(u1, u2, bp, q) < 1e-13
    # coincident arguments are not singular for the quartic relation itself
    u = sample_point(rng, model)
    assert check_reflection(u, u, bp, q) < 1e-13
    assert check_dual_reflection(u, u, bp, q) < 1e-13


def test_reflection_holds_for_any_coefficients_qdet_does_not():
    # The lower K-matrix ansatz solves the reflection equation for EVERY
    # coefficient tuple (it is the general solution), so corrupting one raw
    # coefficient must leave the reflection residual at rounding level.  The
    # quantum-determinant factorization, by contrast, certifies that the raw
    # coefficients come from one consistent factorization, and breaks.
    rng = np.random.default_rng(4)
    model = sample_model(rng, n_sites=1)
    q = model.q
    bp = sample_boundary(rng)
    bad = dataclasses.replace(bp, nu_plus=1.01 * bp.nu_plus)
    u1 = sample_point(rng, model)
    u2 = sample_point(rng, model, avoid=(u1,))
    assert check_reflection(u1, u2, bad, q) < 1e-13
    tr, fac = q_det_minus(u1, bad, q)
    assert S.rel_residual(tr, fac) > 1e-3


def test_quantum_determinant_factorizations():
    rng = np.random.default_rng(5)
    model = sample_model(rng, n_sites=1)
    q = model.q
    bp = sample_boundary(rng)
    for _ in range(20):
        u = sample_point(rng, model)
        tr_m, fac_m = q_det_minus(u, bp, q)
        assert S.rel_residual(tr_m, fac_m) < 1e-12
        tr_p, fac_p = q_det_plus(u, bp, q)
        assert S.rel_residual(tr_p, fac_p) < 1e-12
    # the lower determinant vanishes identically at the self-inverse point
    tr1, fac1 = q_det_minus(1.0, bp, q)
    assert abs(tr1) < 1e-13 and abs(fac1) < 1e-13


def test_hamiltonian_couplings():
    rng = np.random.default_rng(6)
    bp = sample_boundary(rng)
    q = 1.31 + 0.09j
    co = hamiltonian_couplings(bp, q)
    assert abs(co.delta - (q + 1 / q) / 2) < 1e-14
    qq = q - 1 / q
    assert abs(co.eps - qq / 2 * (bp.eps_plus - bp.eps_minus)
               / (bp.eps_plus + bp.eps_minus)) < 1e-13
    assert abs(co.nu - qq / 2 * (bp.nu_minus - bp.nu_plus)
               / (bp.nu_minus + bp.nu_plus)) < 1e-13
    assert abs(co.kappa_minus - 2 * qq * bp.kappa**2
               / (bp.eps_plus + bp.eps_minus)) < 1e-13
    assert abs(co.tau_plus - 2 * qq * bp.tau**2
               / (bp.nu_minus + bp.nu_plus)) < 1e-13
    # equal diagonal coefficients switch the longitudinal field off
    sym = dataclasses.replace(bp, eps_minus=bp.eps_plus)
    assert abs(hamiltonian_couplings(sym, q).eps) < 1e-14
    # a vanishing normalization is singular, not silently infinite
    degen = dataclasses.replace(bp, eps_minus=-bp.eps_plus)
    with pytest.raises(SingularPoint):
        hamiltonian_couplings(degen, q)
