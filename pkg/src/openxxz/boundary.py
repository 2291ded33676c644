"""Boundary K-matrices: reflection equations, quantum determinants, couplings.

The right boundary matrix acts at the far end of the chain (site N side) and
carries the ``nu/tau`` parameters; the left (dual) boundary matrix carries
``eps/kappa`` and enters the transfer matrix through a trace.  Both 2x2
matrices are returned as plain ndarrays; callers wrap them in labeled ``Op``
objects as needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import ANTISYMMETRIZER, Op, r_op
from .params import BoundaryParams, _nz
from .scalars import (b, c, k_minus, k_plus, k_tilde_minus, k_tilde_plus,
                      rel_residual)


def k_minus_matrix(u: complex, bp: BoundaryParams) -> np.ndarray:
    """Right boundary matrix [[k^-(u), tau^2 c(u)], [tau_tilde^2 c(u), k^-(1/u)]]."""
    cu = c(u)
    return np.array([
        [k_minus(u, bp), bp.tau**2 * cu],
        [bp.tau_tilde**2 * cu, k_minus(1.0 / u, bp)],
    ], dtype=complex)


def k_plus_matrix(u: complex, bp: BoundaryParams, q: complex) -> np.ndarray:
    """Left boundary matrix with arguments shifted by q."""
    cqu = c(q * u)
    return np.array([
        [k_plus(q * u, bp), bp.kappa_tilde**2 * cqu],
        [bp.kappa**2 * cqu, k_plus(1.0 / (q * u), bp)],
    ], dtype=complex)


def check_reflection(u1: complex, u2: complex, bp: BoundaryParams,
                     q: complex) -> float:
    """Relative residual of the reflection equation on two auxiliary legs."""
    pair = ("a", "b")
    r12 = r_op(u1 / u2, q, *pair)
    r21 = r_op(u1 * u2, q, *pair)
    k1 = Op(k_minus_matrix(u1, bp), ("a",)).embed(pair)
    k2 = Op(k_minus_matrix(u2, bp), ("b",)).embed(pair)
    lhs = r12 @ k1 @ r21 @ k2
    rhs = k2 @ r21 @ k1 @ r12
    return rel_residual(lhs.mat, rhs.mat)


def check_dual_reflection(u1: complex, u2: complex, bp: BoundaryParams,
                          q: complex) -> float:
    """Relative residual of the dual reflection equation."""
    pair = ("a", "b")
    r_ratio = r_op(u2 / u1, q, *pair)
    r_cross = r_op(1.0 / (q * q * u1 * u2), q, *pair)
    k1 = Op(k_plus_matrix(u1, bp, q), ("a",)).embed(pair)
    k2 = Op(k_plus_matrix(u2, bp, q), ("b",)).embed(pair)
    lhs = r_ratio @ k1 @ r_cross @ k2
    rhs = k2 @ r_cross @ k1 @ r_ratio
    return rel_residual(lhs.mat, rhs.mat)


def q_det_minus(u: complex, bp: BoundaryParams, q: complex) -> tuple[complex, complex]:
    """Quantum determinant of the right boundary, trace form and factorized form."""
    pair = ("1", "2")
    k1 = Op(k_minus_matrix(u, bp), ("1",)).embed(pair)
    k2 = Op(k_minus_matrix(q * u, bp), ("2",)).embed(pair)
    proj = Op(ANTISYMMETRIZER, pair)
    core = proj @ k1 @ r_op(q * u * u, q, *pair) @ k2
    trace_form = complex(np.trace(core.mat))
    factorized = (b(u * u, q)
                  * k_tilde_minus(q * u, bp)
                  * k_tilde_minus(1.0 / (q * u), bp))
    return trace_form, factorized


def q_det_plus(u: complex, bp: BoundaryParams, q: complex) -> tuple[complex, complex]:
    """Quantum determinant of the left boundary, trace form and factorized form."""
    pair = ("1", "2")
    k1 = Op(k_plus_matrix(u, bp, q), ("1",)).embed(pair)
    k2 = Op(k_plus_matrix(q * u, bp, q), ("2",)).embed(pair)
    proj = Op(ANTISYMMETRIZER, pair)
    core = proj @ k2 @ r_op(1.0 / (q**3 * u * u), q, *pair) @ k1
    trace_form = complex(np.trace(core.mat))
    factorized = (b(1.0 / (q**4 * u * u), q)
                  * k_tilde_plus(q * u, bp)
                  * k_tilde_plus(1.0 / (q * u), bp))
    return trace_form, factorized


@dataclass(frozen=True)
class Couplings:
    """Hamiltonian boundary couplings plus the bulk anisotropy."""

    eps: complex
    kappa_minus: complex
    kappa_plus: complex
    nu: complex
    tau_minus: complex
    tau_plus: complex
    delta: complex


def hamiltonian_couplings(bp: BoundaryParams, q: complex) -> Couplings:
    """Map the K-matrix parameters onto the spin-chain boundary couplings."""
    qq = q - 1.0 / q
    left_sum = _nz(bp.eps_plus + bp.eps_minus, "eps_+ + eps_-")
    right_sum = _nz(bp.nu_plus + bp.nu_minus, "nu_+ + nu_-")
    return Couplings(
        eps=qq / 2.0 * (bp.eps_plus - bp.eps_minus) / left_sum,
        kappa_minus=2.0 * qq * bp.kappa**2 / left_sum,
        kappa_plus=2.0 * qq * bp.kappa_tilde**2 / left_sum,
        nu=qq / 2.0 * (bp.nu_minus - bp.nu_plus) / right_sum,
        tau_minus=2.0 * qq * bp.tau_tilde**2 / right_sum,
        tau_plus=2.0 * qq * bp.tau**2 / right_sum,
        delta=(q + 1.0 / q) / 2.0,
    )
