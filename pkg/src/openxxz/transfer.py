"""Double-row monodromy, transfer matrix, and Hamiltonian for the open chain.

The central object is :class:`Chain`, which bundles bulk and boundary
parameters and exposes:

* the double-row monodromy as a matrix on auxiliary x quantum space;
* the two operator families extracted from it (lower and upper triangular
  bookkeeping of the diagonal entries);
* the transfer matrix, both as an auxiliary-space trace and as the explicit
  expansion over either family (dual routes, kept separate on purpose);
* the spin-chain Hamiltonian, built directly from Pauli operators and,
  independently, from the logarithmic derivative of the transfer matrix;
* residual checks for the full set of exchange relations of the boundary
  Yang-Baxter algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .boundary import hamiltonian_couplings, k_minus_matrix, k_plus_matrix
from .lattice import Op, identity, pauli_on_site, r_op, site_labels
from .params import ModelParams, BoundaryParams
from .scalars import b, c, phi, k_plus, rel_residual, structural


@dataclass(frozen=True)
class OperatorFamily:
    """Quantum-space operators read off one double-row monodromy evaluation.

    ``a, b_op, c_op, d`` close among themselves under exchange; ``a_hat,
    d_hat`` are the alternative diagonal pair (same off-diagonal entries).
    """

    a: np.ndarray
    b_op: np.ndarray
    c_op: np.ndarray
    d: np.ndarray
    a_hat: np.ndarray
    d_hat: np.ndarray


class Chain:
    """Open chain with fixed bulk and boundary parameters.

    Monodromy evaluations are cached per spectral point; every derived
    object (families, transfer matrices) reuses the cache.
    """

    def __init__(self, model: ModelParams, boundary: BoundaryParams):
        self.model = model
        self.boundary = boundary
        self.sites = site_labels(model.n_sites)
        self.dim = 2 ** model.n_sites
        self._mono = {}

    # -- monodromy and operator families -------------------------------------

    def monodromy(self, u: complex) -> Op:
        """Double-row monodromy on ("a", sites): R-chain, reflection, R-chain back."""
        key = complex(u)
        if key in self._mono:
            return self._mono[key]
        q = self.model.q
        spaces = ("a",) + self.sites
        acc = identity(spaces)
        for i, site in enumerate(self.sites):
            acc = acc @ r_op(u / self.model.inhomogeneities[i], q, "a", site)
        acc = acc @ Op(k_minus_matrix(u, self.boundary), ("a",))
        for i in reversed(range(len(self.sites))):
            acc = acc @ r_op(u * self.model.inhomogeneities[i], q, "a", self.sites[i])
        self._mono[key] = acc
        return acc

    def operator_family(self, u: complex) -> OperatorFamily:
        mono = self.monodromy(u)
        q = self.model.q
        top_left = mono.block("a", 0, 0).mat
        top_right = mono.block("a", 0, 1).mat
        bot_left = mono.block("a", 1, 0).mat
        bot_right = mono.block("a", 1, 1).mat
        mix = b(q * u * u, q)
        return OperatorFamily(
            a=top_left,
            b_op=top_right,
            c_op=bot_left,
            d=bot_right - top_left / mix,
            a_hat=top_left - bot_right / mix,
            d_hat=bot_right,
        )

    # -- transfer matrix: trace route and both expansion routes --------------

    def transfer(self, u: complex) -> np.ndarray:
        """Transfer matrix as the auxiliary trace of dual K times monodromy."""
        q = self.model.q
        kp = Op(k_plus_matrix(u, self.boundary, q), ("a",))
        prod = kp @ self.monodromy(u)
        return prod.ptrace("a").mat

    def transfer_from_family(self, u: complex, hat: bool = False) -> np.ndarray:
        """Transfer matrix assembled from the operator family entries."""
        q = self.model.q
        bp = self.boundary
        fam = self.operator_family(u)
        cross = c(q * u) * (bp.kappa ** 2 * fam.b_op
                            + bp.kappa_tilde ** 2 * fam.c_op)
        if hat:
            return (k_plus(q * u, bp) * fam.a_hat
                    + phi(u, q) * k_plus(1.0 / u, bp) * fam.d_hat
                    + cross)
        return (phi(u, q) * k_plus(u, bp) * fam.a
                + k_plus(1.0 / (q * u), bp) * fam.d
                + cross)

    # -- Hamiltonian: direct construction and transfer-derivative route ------

    def hamiltonian_direct(self) -> np.ndarray:
        """Spin-½ chain Hamiltonian assembled from Pauli operators."""
        n = self.model.n_sites
        cp = hamiltonian_couplings(self.boundary, self.model.q)

        def sigma(which, site):
            return pauli_on_site(which, site, n).mat

        h = np.zeros((self.dim, self.dim), dtype=complex)
        h += cp.eps * sigma("z", 1) + cp.kappa_minus * sigma("-", 1)
        h += cp.kappa_plus * sigma("+", 1)
        for k_site in range(1, n):
            for which, weight in (("x", 1.0), ("y", 1.0), ("z", cp.delta)):
                h += weight * sigma(which, k_site) @ sigma(which, k_site + 1)
        h += cp.nu * sigma("z", n) + cp.tau_minus * sigma("-", n)
        h += cp.tau_plus * sigma("+", n)
        return h

    def hamiltonian_from_transfer(self, rel_step: float = 1e-3) -> np.ndarray:
        """Hamiltonian from the log-derivative of t(u) at the homogeneous point.

        Requires all inhomogeneities equal to 1.  The derivative uses a
        fourth-order central stencil at two step sizes combined by one
        Richardson step, so the truncation error is O(h^6).
        """
        if any(abs(v - 1.0) > 1e-12 for v in self.model.inhomogeneities):
            raise ValueError("transfer-derivative route needs the homogeneous point")
        q = self.model.q
        n = self.model.n_sites

        def dt(h: float) -> np.ndarray:
            pts = [(1.0 + 2 * h, -1.0), (1.0 + h, 8.0), (1.0 - h, -8.0),
                   (1.0 - 2 * h, 1.0)]
            acc = np.zeros((self.dim, self.dim), dtype=complex)
            for x, w in pts:
                acc += w * self.transfer(x)
            return acc / (12.0 * h)

        coarse = dt(rel_step)
        fine = dt(rel_step / 2.0)
        deriv = (16.0 * fine - coarse) / 15.0
        log_deriv = deriv @ np.linalg.inv(self.transfer(1.0))
        shift = (n * (q + 1.0 / q) / 2.0
                 + (q - 1.0 / q) ** 2 / (2.0 * (q + 1.0 / q)))
        return ((q - 1.0 / q) / 2.0) * log_deriv - shift * np.eye(self.dim)

    # -- exchange-relation checks ---------------------------------------------

    def check_commutation(self, relation: str, u: complex, v: complex) -> float:
        """Residual of one exchange relation at spectral points (u, v)."""
        try:
            rule = _RELATIONS[relation]
        except KeyError:
            raise KeyError(f"unknown relation {relation!r}; "
                           f"choose from {sorted(_RELATIONS)}") from None
        lhs, rhs = rule(self.operator_family(u), self.operator_family(v),
                        u, v, self.model.q)
        return rel_residual(lhs, rhs)

    @staticmethod
    def relation_names() -> tuple:
        return tuple(sorted(_RELATIONS))


# Each rule returns (lhs, rhs) matrices.  Structural coefficients are looked
# up by name; the first argument of every coefficient is the first spectral
# point of the relation's left side unless swapped explicitly.

def _co(name, u, v, q):
    return structural(name, u, v, q)


def _rel_ab(fu, fv, u, v, q):
    lhs = fu.a @ fv.b_op
    rhs = (_co("f", u, v, q) * fv.b_op @ fu.a
           + _co("g", u, v, q) * fu.b_op @ fv.a
           + _co("w", u, v, q) * fu.b_op @ fv.d)
    return lhs, rhs


def _rel_ca(fu, fv, u, v, q):
    lhs = fv.c_op @ fu.a
    rhs = (_co("f", u, v, q) * fu.a @ fv.c_op
           + _co("g", u, v, q) * fv.a @ fu.c_op
           + _co("w", u, v, q) * fv.d @ fu.c_op)
    return lhs, rhs


def _rel_db(fu, fv, u, v, q):
    lhs = fu.d @ fv.b_op
    rhs = (_co("h", u, v, q) * fv.b_op @ fu.d
           + _co("k", u, v, q) * fu.b_op @ fv.d
           + _co("n", u, v, q) * fu.b_op @ fv.a)
    return lhs, rhs


def _rel_cd(fu, fv, u, v, q):
    lhs = fv.c_op @ fu.d
    rhs = (_co("h", u, v, q) * fu.d @ fv.c_op
           + _co("k", u, v, q) * fv.d @ fu.c_op
           + _co("n", u, v, q) * fv.a @ fu.c_op)
    return lhs, rhs


def _rel_cb(fu, fv, u, v, q):
    lhs = fu.c_op @ fv.b_op
    rhs = (fv.b_op @ fu.c_op
           + _co("s", u, v, q) * fu.a @ fv.a
           + _co("x", u, v, q) * fv.a @ fu.a
           + _co("y", u, v, q) * fu.d @ fv.a
           + _co("r", u, v, q) * fu.a @ fv.d
           + _co("q_fn", u, v, q) * fv.a @ fu.d
           + _co("w", u, v, q) * fu.d @ fv.d)
    return lhs, rhs


def _rel_ad(fu, fv, u, v, q):
    lhs = fu.a @ fv.d
    rhs = (fv.d @ fu.a
           + _co("k", v, u, q) * (fu.b_op @ fv.c_op - fv.b_op @ fu.c_op))
    return lhs, rhs


def _rel_aa(fu, fv, u, v, q):
    lhs = fu.a @ fv.a
    rhs = (fv.a @ fu.a
           + _co("w", u, v, q) * (fu.b_op @ fv.c_op - fv.b_op @ fu.c_op))
    return lhs, rhs


def _rel_dd(fu, fv, u, v, q):
    lhs = fu.d @ fv.d
    rhs = (fv.d @ fu.d
           - phi(u, q) * phi(v, q) * _co("w", u, v, q)
           * (fu.b_op @ fv.c_op - fv.b_op @ fu.c_op))
    return lhs, rhs


def _rel_bb(fu, fv, u, v, q):
    return fu.b_op @ fv.b_op, fv.b_op @ fu.b_op


def _rel_cc(fu, fv, u, v, q):
    return fu.c_op @ fv.c_op, fv.c_op @ fu.c_op


def _rel_ahat_c(fu, fv, u, v, q):
    lhs = fu.a_hat @ fv.c_op
    rhs = (_co("h", u, v, q) * fv.c_op @ fu.a_hat
           + _co("k", u, v, q) * fu.c_op @ fv.a_hat
           + _co("n", u, v, q) * fu.c_op @ fv.d_hat)
    return lhs, rhs


def _rel_dhat_c(fu, fv, u, v, q):
    lhs = fu.d_hat @ fv.c_op
    rhs = (_co("f", u, v, q) * fv.c_op @ fu.d_hat
           + _co("g", u, v, q) * fu.c_op @ fv.d_hat
           + _co("w", u, v, q) * fu.c_op @ fv.a_hat)
    return lhs, rhs


_RELATIONS = {
    "exchange_ab": _rel_ab,
    "exchange_ca": _rel_ca,
    "exchange_db": _rel_db,
    "exchange_cd": _rel_cd,
    "exchange_cb": _rel_cb,
    "exchange_ad": _rel_ad,
    "exchange_aa": _rel_aa,
    "exchange_dd": _rel_dd,
    "exchange_bb": _rel_bb,
    "exchange_cc": _rel_cc,
    "exchange_ahat_c": _rel_ahat_c,
    "exchange_dhat_c": _rel_dhat_c,
}
