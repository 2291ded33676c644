"""Vertex-face gauge layer: gauge vectors and dynamical operators.

The static operator families of :mod:`openxxz.transfer` mix under the
exchange algebra because the boundary matrices are non-diagonal.  A local
change of basis by m-dependent two-vectors repairs this: sandwiching the
double-row monodromy between a covector and a vector at shifted integers m
produces "dynamical" operators whose exchange relations again have the
triangular structure needed for a Bethe-ansatz recursion.

Contents:

* covariant / contravariant gauge vectors and their algebraic identities
  (scalar products, closure, the eight R-matrix intertwining relations);
* :class:`GaugedChain`, which evaluates the dynamical operators both by
  direct sandwiching and by expanding over the static family (dual routes),
  assembles the diagonal / phase-shifted parts of the transfer matrix,
  builds operator strings, and exposes residual checks for every dynamical
  identity used downstream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import r_matrix
from .params import GaugeFrame, gamma, gamma_unit
from .scalars import (b, c, phi, rel_residual, structural, dyn_coeff,
                      a_tilde, d_tilde, a_hat as a_hat_coeff,
                      d_hat as d_hat_coeff,
                      g_m, w_m, k_m, n_m, g_hat_m, w_hat_m, k_hat_m, n_hat_m,
                      G, F_tilde)
from .transfer import Chain


# ----- gauge vectors ----------------------------------------------------------


def x_vec(u, m, frame: GaugeFrame, q) -> np.ndarray:
    """Covariant column vector of the first kind."""
    return np.array([frame.alpha * q ** (-m) / u, 1.0], dtype=complex)


def y_vec(u, m, frame: GaugeFrame, q) -> np.ndarray:
    """Covariant column vector of the second kind."""
    return np.array([frame.beta * q ** m / u, 1.0], dtype=complex)


def x_covec(u, m, frame: GaugeFrame, q) -> np.ndarray:
    """Contravariant row partner of :func:`x_vec`; normalized against y_vec."""
    pref = q * u / gamma_unit(m - 1, frame, q)
    return pref * np.array([-1.0, frame.alpha * q ** (-m) / u], dtype=complex)


def y_covec(u, m, frame: GaugeFrame, q) -> np.ndarray:
    """Contravariant row partner of :func:`y_vec`; normalized against x_vec."""
    pref = q * u / gamma_unit(m + 1, frame, q)
    return pref * np.array([1.0, -frame.beta * q ** m / u], dtype=complex)


def check_scalar_products(u, m, frame: GaugeFrame, q) -> float:
    """Max residual of the four pairing identities of the gauge vectors."""
    vals = (
        x_covec(u, m, frame, q) @ x_vec(u, m, frame, q),
        y_covec(u, m, frame, q) @ y_vec(u, m, frame, q),
        x_covec(u, m + 1, frame, q) @ y_vec(u, m - 1, frame, q) - 1.0,
        y_covec(u, m - 1, frame, q) @ x_vec(u, m + 1, frame, q) - 1.0,
    )
    return max(abs(v) for v in vals)


def check_closure(u, m, frame: GaugeFrame, q) -> float:
    """Residual of the rank-one resolution of the identity."""
    total = (np.outer(y_vec(u, m - 1, frame, q), x_covec(u, m + 1, frame, q))
             + np.outer(x_vec(u, m + 1, frame, q), y_covec(u, m - 1, frame, q)))
    return rel_residual(total, np.eye(2))


def _kron_vec(a, bvec):
    return np.kron(np.asarray(a), np.asarray(bvec))


def check_intertwining(name: str, u, v, m, frame: GaugeFrame, q) -> float:
    """Residual of one of the eight R-matrix intertwining relations.

    Covariant relations act with R on the left of a column 4-vector;
    contravariant ones act with R on the right of a row 4-vector.
    """
    R = r_matrix(u / v, q)
    gm = lambda mm: gamma_unit(mm, frame, q)
    gr = lambda w, mm: gamma(w, mm, frame, q)
    X, Y = x_vec, y_vec
    Xt, Yt = x_covec, y_covec
    if name == "xx":
        lhs = R @ _kron_vec(X(u, m + 1, frame, q), X(v, m, frame, q))
        rhs = b(q * u / v, q) * _kron_vec(X(u, m, frame, q), X(v, m + 1, frame, q))
    elif name == "yy":
        lhs = R @ _kron_vec(Y(u, m, frame, q), Y(v, m + 1, frame, q))
        rhs = b(q * u / v, q) * _kron_vec(Y(u, m + 1, frame, q), Y(v, m, frame, q))
    elif name == "xy":
        lhs = R @ _kron_vec(X(u, m + 1, frame, q), Y(v, m, frame, q))
        rhs = (b(u / v, q) * gm(m) / gm(m + 1)
               * _kron_vec(X(u, m + 2, frame, q), Y(v, m + 1, frame, q))
               + gr(v / u, m + 1) / gm(m + 1)
               * _kron_vec(Y(u, m, frame, q), X(v, m + 1, frame, q)))
    elif name == "yx":
        lhs = R @ _kron_vec(Y(u, m, frame, q), X(v, m + 1, frame, q))
        rhs = (b(u / v, q) * gm(m + 1) / gm(m)
               * _kron_vec(Y(u, m - 1, frame, q), X(v, m, frame, q))
               + gr(u / v, m) / gm(m)
               * _kron_vec(X(u, m + 1, frame, q), Y(v, m, frame, q)))
    elif name == "xt_xt":
        lhs = _kron_vec(Xt(u, m + 1, frame, q), Xt(v, m, frame, q)) @ R
        rhs = b(q * u / v, q) * _kron_vec(Xt(u, m, frame, q), Xt(v, m + 1, frame, q))
    elif name == "yt_yt":
        lhs = _kron_vec(Yt(u, m, frame, q), Yt(v, m + 1, frame, q)) @ R
        rhs = b(q * u / v, q) * _kron_vec(Yt(u, m + 1, frame, q), Yt(v, m, frame, q))
    elif name == "xt_yt":
        lhs = _kron_vec(Xt(u, m + 1, frame, q), Yt(v, m - 2, frame, q)) @ R
        rhs = (b(u / v, q) * gm(m + 1) / gm(m)
               * _kron_vec(Xt(u, m + 2, frame, q), Yt(v, m - 1, frame, q))
               + gr(v / u, m) / gm(m)
               * _kron_vec(Yt(u, m - 2, frame, q), Xt(v, m + 1, frame, q)))
    elif name == "yt_xt":
        lhs = _kron_vec(Yt(u, m - 1, frame, q), Xt(v, m + 2, frame, q)) @ R
        rhs = (b(u / v, q) * gm(m - 1) / gm(m)
               * _kron_vec(Yt(u, m - 2, frame, q), Xt(v, m + 1, frame, q))
               + gr(u / v, m) / gm(m)
               * _kron_vec(Xt(u, m + 2, frame, q), Yt(v, m - 1, frame, q)))
    else:
        raise KeyError(f"unknown intertwining relation {name!r}; "
                       f"choose from {INTERTWINING_NAMES}")
    return rel_residual(lhs, rhs)


INTERTWINING_NAMES = ("xx", "yy", "xy", "yx", "xt_xt", "yt_yt", "xt_yt", "yt_xt")


# ----- dynamical operators ----------------------------------------------------


@dataclass(frozen=True)
class DynFamily:
    """Dynamical operators at one spectral point and gauge integer."""

    a: np.ndarray
    b_op: np.ndarray
    c_op: np.ndarray
    d: np.ndarray
    a_hat: np.ndarray
    d_hat: np.ndarray


class GaugedChain:
    """A chain together with a gauge frame; home of the dynamical algebra."""

    def __init__(self, chain: Chain, frame: GaugeFrame):
        self.chain = chain
        self.frame = frame
        self.q = chain.model.q
        self._dyn = {}

    # -- the two construction routes ----------------------------------------

    def dyn(self, u: complex, m: int) -> DynFamily:
        """Dynamical family via covector/vector sandwiching of the monodromy."""
        key = (complex(u), m)
        if key in self._dyn:
            return self._dyn[key]
        q, fr = self.q, self.frame
        mono = self.chain.monodromy(u)

        def sand(row, col):
            return mono.sandwich("a", row, col).mat

        a_ = sand(y_covec(u, m - 2, fr, q), x_vec(1.0 / u, m, fr, q))
        b_ = sand(y_covec(u, m, fr, q), y_vec(1.0 / u, m, fr, q))
        c_ = sand(x_covec(u, m, fr, q), x_vec(1.0 / u, m, fr, q))
        dh = sand(x_covec(u, m + 2, fr, q), y_vec(1.0 / u, m, fr, q))
        gm = lambda mm: gamma_unit(mm, fr, q)
        mix = b(q * u * u, q)
        ah = (gm(m - 1) / gm(m)) * a_ - (gamma(u * u, m - 1, fr, q)
                                         / (mix * gm(m))) * dh
        d_ = (gm(m + 1) / gm(m)) * dh - (gamma(1.0 / (u * u), m + 1, fr, q)
                                         / (mix * gm(m))) * a_
        fam = DynFamily(a=a_, b_op=b_, c_op=c_, d=d_, a_hat=ah, d_hat=dh)
        self._dyn[key] = fam
        return fam

    def dyn_from_static(self, u: complex, m: int) -> DynFamily:
        """Dynamical family as explicit combinations of the static operators.

        Independent of :meth:`dyn`; used to cross-check the sandwich route.
        """
        q, fr = self.q, self.frame
        al, be = fr.alpha, fr.beta
        st = self.chain.operator_family(u)
        A, B, C, D = st.a, st.b_op, st.c_op, st.d
        mix = b(q * u * u, q)
        ph = phi(u, q)
        ph_inv = phi(1.0 / (q * u), q)
        gm = lambda mm: gamma_unit(mm, fr, q)

        b_dyn = (q * u / gm(m + 1)) * (
            B + q ** m * be * (q * u * ph_inv * A - D / u)
            - (q ** m * be) ** 2 * C)
        a_dyn = (q * u / gm(m - 1)) * (
            B + (q ** (-m) * u * al - q ** (m - 2) * be / (u * mix)) * A
            - q ** (m - 2) * be * D / u - al * be * C / q ** 2)
        d_dyn = (q * u / gm(m - 1)) * (
            (q ** (-m - 1) * al / u + q ** (m - 1) * be * u / mix) * D
            - q ** (m - 1) * be * u * ph * ph_inv * A
            - ph * (B - al * be * C / q ** 2))
        c_dyn = (q * u / gm(m - 1)) * (
            q ** (-2 * m) * al ** 2 * C
            - q ** (-m) * al * (q * u * ph_inv * A - D / u) - B)

        dh_dyn = (gm(m) * d_dyn
                  + gamma(1.0 / (u * u), m + 1, fr, q) / mix * a_dyn) / gm(m + 1)
        ah_dyn = (gm(m - 1) / gm(m)) * a_dyn - (gamma(u * u, m - 1, fr, q)
                                                / (mix * gm(m))) * dh_dyn
        return DynFamily(a=a_dyn, b_op=b_dyn, c_op=c_dyn, d=d_dyn,
                         a_hat=ah_dyn, d_hat=dh_dyn)

    def check_route_equivalence(self, u: complex, m: int) -> float:
        """Max residual between the sandwich and static-expansion routes."""
        lhs = self.dyn(u, m)
        rhs = self.dyn_from_static(u, m)
        return max(rel_residual(getattr(lhs, f), getattr(rhs, f))
                   for f in ("a", "b_op", "c_op", "d", "a_hat", "d_hat"))

    # -- transfer-matrix pieces ----------------------------------------------

    def t_diag(self, u: complex, m: int) -> np.ndarray:
        bp = self.chain.boundary
        fam = self.dyn(u, m)
        return (a_tilde(u, bp, self.q) * fam.a + d_tilde(u, bp, self.q) * fam.d)

    def t_phase(self, u: complex, m: int) -> np.ndarray:
        fam = self.dyn(u, m)
        return phi(1.0 / (self.q * u), self.q) * fam.a - fam.d

    def t_diag_hat(self, u: complex, m: int) -> np.ndarray:
        bp = self.chain.boundary
        fam = self.dyn(u, m)
        return (a_hat_coeff(u, bp, self.q) * fam.a_hat
                + d_hat_coeff(u, bp, self.q) * fam.d_hat)

    def t_phase_hat(self, u: complex, m: int) -> np.ndarray:
        fam = self.dyn(u, m)
        return -fam.a_hat + phi(1.0 / (self.q * u), self.q) * fam.d_hat

    def decomposition_residual(self, u: complex, m: int, hat: bool = False) -> float:
        """Residual of the transfer matrix against its dynamical decomposition."""
        q, fr, bp = self.q, self.frame, self.chain.boundary
        fam = self.dyn(u, m)
        zt = dyn_coeff("zeta", m, fr, bp, q)
        zt_t = dyn_coeff("zeta_tilde", m, fr, bp, q)
        cross = zt * fam.b_op - zt_t * fam.c_op
        if hat:
            main = self.t_diag_hat(u, m)
            cross = cross + dyn_coeff("delta", m - 2, fr, bp, q) * self.t_phase_hat(u, m)
        else:
            main = self.t_diag(u, m)
            cross = cross - dyn_coeff("delta", m, fr, bp, q) * self.t_phase(u, m)
        recon = main + c(q * u) / u * cross
        return rel_residual(self.chain.transfer(u), recon)

    # -- operator strings ------------------------------------------------------

    def string_b(self, us, m: int) -> np.ndarray:
        """Ordered product of creation-type operators descending in m."""
        acc = np.eye(self.chain.dim, dtype=complex)
        for i, u in enumerate(us):
            acc = acc @ self.dyn(u, m - 2 * (i + 1)).b_op
        return acc

    def string_c(self, us, m: int) -> np.ndarray:
        """Ordered product of annihilation-type operators ascending in m."""
        acc = np.eye(self.chain.dim, dtype=complex)
        for i, u in enumerate(us):
            acc = acc @ self.dyn(u, m + 2 * (i + 1)).c_op
        return acc

    # -- dynamical exchange relations -----------------------------------------

    def check_dynamical(self, name: str, u, v, m: int) -> float:
        """Residual of one dynamical exchange relation at gauge integer m."""
        q, fr = self.q, self.frame
        du2 = self.dyn(u, m + 2)
        dm2 = self.dyn(u, m - 2)
        dv = self.dyn(v, m)
        dub = self.dyn(u, m)
        co = lambda nm: structural(nm, u, v, q)
        if name == "dyn_bb":
            lhs = du2.b_op @ dv.b_op
            rhs = self.dyn(v, m + 2).b_op @ dub.b_op
        elif name == "dyn_ab":
            lhs = du2.a @ dv.b_op
            rhs = (co("f") * dv.b_op @ dub.a
                   + g_m(u, v, m, fr, q) * dub.b_op @ dv.a
                   + w_m(u, v, m, fr, q) * dub.b_op @ dv.d)
        elif name == "dyn_db":
            lhs = du2.d @ dv.b_op
            rhs = (co("h") * dv.b_op @ dub.d
                   + k_m(u, v, m, fr, q) * dub.b_op @ dv.d
                   + n_m(u, v, m, fr, q) * dub.b_op @ dv.a)
        elif name == "dyn_cc":
            lhs = dm2.c_op @ dv.c_op
            rhs = self.dyn(v, m - 2).c_op @ dub.c_op
        elif name == "dyn_ahat_c":
            lhs = dm2.a_hat @ dv.c_op
            rhs = (co("h") * dv.c_op @ dub.a_hat
                   + k_hat_m(u, v, m, fr, q) * dub.c_op @ dv.a_hat
                   + n_hat_m(u, v, m, fr, q) * dub.c_op @ dv.d_hat)
        elif name == "dyn_dhat_c":
            lhs = dm2.d_hat @ dv.c_op
            rhs = (co("f") * dv.c_op @ dub.d_hat
                   + g_hat_m(u, v, m, fr, q) * dub.c_op @ dv.d_hat
                   + w_hat_m(u, v, m, fr, q) * dub.c_op @ dv.a_hat)
        else:
            raise KeyError(f"unknown dynamical relation {name!r}; "
                           f"choose from {DYNAMICAL_NAMES}")
        return rel_residual(lhs, rhs)

    # -- scalar functional relations -------------------------------------------

    def check_functional(self, name: str, u, v, m: int) -> float:
        """Residual of one scalar identity tying coefficients to the gauge."""
        q, fr, bp = self.q, self.frame, self.chain.boundary
        at, dt = a_tilde(u, bp, q), d_tilde(u, bp, q)
        ah, dh = a_hat_coeff(u, bp, q), d_hat_coeff(u, bp, q)
        ph_u = phi(1.0 / (q * u), q)
        ph_v = phi(1.0 / (q * v), q)
        cqu = c(q * u) / u
        if name == "fn_b_diag_raise":
            lhs = at * g_m(u, v, m, fr, q) + dt * n_m(u, v, m, fr, q)
            rhs = (F_tilde(u, v, q) * ph_v * a_tilde(v, bp, q)
                   + dyn_coeff("chi", m + 2, fr, bp, q) * cqu * ph_v)
        elif name == "fn_b_diag_lower":
            lhs = at * w_m(u, v, m, fr, q) + dt * k_m(u, v, m, fr, q)
            rhs = (-F_tilde(u, v, q) * phi(v, q) * d_tilde(v, bp, q)
                   - dyn_coeff("chi", m + 2, fr, bp, q) * cqu)
        elif name == "fn_b_phase_raise":
            lhs = ph_u * g_m(u, v, m, fr, q) - n_m(u, v, m, fr, q)
            rhs = ph_v * (G(u, v, q) * b(v * v, q)
                          + dyn_coeff("rho", m + 2, fr, bp, q))
        elif name == "fn_b_phase_lower":
            lhs = ph_u * w_m(u, v, m, fr, q) - k_m(u, v, m, fr, q)
            rhs = -(G(u, v, q) * b(1.0 / (q * q * v * v), q)
                    + dyn_coeff("rho", m + 2, fr, bp, q))
        elif name == "fn_c_diag_raise":
            lhs = dh * g_hat_m(u, v, m, fr, q) + ah * n_hat_m(u, v, m, fr, q)
            rhs = (F_tilde(u, v, q) * ph_v * d_hat_coeff(v, bp, q)
                   + dyn_coeff("chi_hat", m - 2, fr, bp, q) * cqu * ph_v)
        elif name == "fn_c_diag_lower":
            lhs = ah * k_hat_m(u, v, m, fr, q) + dh * w_hat_m(u, v, m, fr, q)
            rhs = (-F_tilde(u, v, q) * phi(v, q) * a_hat_coeff(v, bp, q)
                   - dyn_coeff("chi_hat", m - 2, fr, bp, q) * cqu)
        elif name == "fn_c_phase_lower":
            lhs = -k_hat_m(u, v, m, fr, q) + ph_u * w_hat_m(u, v, m, fr, q)
            rhs = (-G(u, v, q) * b(1.0 / (q * q * v * v), q)
                   + dyn_coeff("rho_hat", m - 2, fr, bp, q))
        elif name == "fn_c_phase_raise":
            lhs = ph_u * g_hat_m(u, v, m, fr, q) - n_hat_m(u, v, m, fr, q)
            rhs = ph_v * (G(u, v, q) * b(v * v, q)
                          - dyn_coeff("rho_hat", m - 2, fr, bp, q))
        else:
            raise KeyError(f"unknown functional relation {name!r}; "
                           f"choose from {FUNCTIONAL_NAMES}")
        return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))

    # -- actions on strings ------------------------------------------------------

    def string_b_replaced(self, us, i: int, u, m: int) -> np.ndarray:
        """Creation string with the i-th spectral point swapped for u.

        The replacement inherits the slot (and hence the m-shift) of the
        point it displaces; since creation operators commute this equals
        any other ordering of the same multiset.
        """
        return self.string_b(tuple(us[:i]) + (u,) + tuple(us[i + 1:]), m)

    def string_c_replaced(self, us, i: int, u, m: int) -> np.ndarray:
        """Annihilation string with the i-th spectral point swapped for u."""
        return self.string_c(tuple(us[:i]) + (u,) + tuple(us[i + 1:]), m)

    def _prod(self, name, u, others):
        return np.prod([structural(name, u, w, self.q) for w in others])

    def check_action(self, name: str, u, us, m: int) -> float:
        """Residual of one multiple-exchange action on an operator string."""
        q, fr, bp = self.q, self.frame, self.chain.boundary
        us = tuple(us)
        mm = len(us)
        m_low = m - 2 * mm
        m_up = m + 2 * mm
        if name in ("string_b_a", "string_b_d", "string_b_tdiag", "string_b_tphase"):
            sb = self.string_b(us, m)
            low = {w: self.dyn(w, m_low) for w in (u,) + us}
        else:
            sc = self.string_c(us, m)
            up = {w: self.dyn(w, m_up) for w in (u,) + us}

        if name == "string_b_a":
            lhs = self.dyn(u, m).a @ sb
            rhs = self._prod("f", u, us) * sb @ low[u].a
            for i, ui in enumerate(us):
                others = us[:i] + us[i + 1:]
                sbr = self.string_b_replaced(us, i, u, m)
                rhs = rhs + (g_m(u, ui, m - 2, fr, q) * self._prod("f", ui, others)
                             * sbr @ low[ui].a)
                rhs = rhs + (w_m(u, ui, m - 2, fr, q) * self._prod("h", ui, others)
                             * sbr @ low[ui].d)
        elif name == "string_b_d":
            lhs = self.dyn(u, m).d @ sb
            rhs = self._prod("h", u, us) * sb @ low[u].d
            for i, ui in enumerate(us):
                others = us[:i] + us[i + 1:]
                sbr = self.string_b_replaced(us, i, u, m)
                rhs = rhs + (k_m(u, ui, m - 2, fr, q) * self._prod("h", ui, others)
                             * sbr @ low[ui].d)
                rhs = rhs + (n_m(u, ui, m - 2, fr, q) * self._prod("f", ui, others)
                             * sbr @ low[ui].a)
        elif name == "string_b_tdiag":
            lhs = self.t_diag(u, m) @ sb
            rhs = sb @ (self._prod("f", u, us) * a_tilde(u, bp, q) * low[u].a
                        + self._prod("h", u, us) * d_tilde(u, bp, q) * low[u].d)
            chi_m = dyn_coeff("chi", m, fr, bp, q)
            for i, ui in enumerate(us):
                others = us[:i] + us[i + 1:]
                sbr = self.string_b_replaced(us, i, u, m)
                ph_i = phi(1.0 / (q * ui), q)
                rhs = rhs + F_tilde(u, ui, q) * sbr @ (
                    ph_i * self._prod("f", ui, others) * a_tilde(ui, bp, q) * low[ui].a
                    - phi(ui, q) * self._prod("h", ui, others)
                    * d_tilde(ui, bp, q) * low[ui].d)
                rhs = rhs + chi_m * c(q * u) / u * sbr @ (
                    ph_i * self._prod("f", ui, others) * low[ui].a
                    - self._prod("h", ui, others) * low[ui].d)
        elif name == "string_b_tphase":
            lhs = self.t_phase(u, m) @ sb
            rhs = sb @ (phi(1.0 / (q * u), q) * self._prod("f", u, us) * low[u].a
                        - self._prod("h", u, us) * low[u].d)
            rho_m = dyn_coeff("rho", m, fr, bp, q)
            for i, ui in enumerate(us):
                others = us[:i] + us[i + 1:]
                sbr = self.string_b_replaced(us, i, u, m)
                ph_i = phi(1.0 / (q * ui), q)
                rhs = rhs + G(u, ui, q) * sbr @ (
                    b(ui * ui, q) * ph_i * self._prod("f", ui, others) * low[ui].a
                    - b(1.0 / (q * q * ui * ui), q)
                    * self._prod("h", ui, others) * low[ui].d)
                rhs = rhs + rho_m * sbr @ (
                    ph_i * self._prod("f", ui, others) * low[ui].a
                    - self._prod("h", ui, others) * low[ui].d)
        elif name == "string_c_tdiag":
            lhs = self.t_diag_hat(u, m) @ sc
            rhs = sc @ (self._prod("h", u, us) * a_hat_coeff(u, bp, q) * up[u].a_hat
                        + self._prod("f", u, us) * d_hat_coeff(u, bp, q) * up[u].d_hat)
            chi_hm = dyn_coeff("chi_hat", m, fr, bp, q)
            for i, ui in enumerate(us):
                others = us[:i] + us[i + 1:]
                scr = self.string_c_replaced(us, i, u, m)
                ph_i = phi(1.0 / (q * ui), q)
                rhs = rhs + F_tilde(u, ui, q) * scr @ (
                    -phi(ui, q) * self._prod("h", ui, others)
                    * a_hat_coeff(ui, bp, q) * up[ui].a_hat
                    + ph_i * self._prod("f", ui, others)
                    * d_hat_coeff(ui, bp, q) * up[ui].d_hat)
                rhs = rhs + chi_hm * c(q * u) / u * scr @ (
                    -self._prod("h", ui, others) * up[ui].a_hat
                    + ph_i * self._prod("f", ui, others) * up[ui].d_hat)
        elif name == "string_c_tphase":
            lhs = self.t_phase_hat(u, m) @ sc
            rhs = sc @ (-self._prod("h", u, us) * up[u].a_hat
                        + phi(1.0 / (q * u), q) * self._prod("f", u, us) * up[u].d_hat)
            rho_hm = dyn_coeff("rho_hat", m, fr, bp, q)
            for i, ui in enumerate(us):
                others = us[:i] + us[i + 1:]
                scr = self.string_c_replaced(us, i, u, m)
                ph_i = phi(1.0 / (q * ui), q)
                rhs = rhs + G(u, ui, q) * scr @ (
                    -b(1.0 / (q * q * ui * ui), q)
                    * self._prod("h", ui, others) * up[ui].a_hat
                    + b(ui * ui, q) * ph_i * self._prod("f", ui, others)
                    * up[ui].d_hat)
                rhs = rhs - rho_hm * scr @ (
                    -self._prod("h", ui, others) * up[ui].a_hat
                    + ph_i * self._prod("f", ui, others) * up[ui].d_hat)
        else:
            raise KeyError(f"unknown string action {name!r}; "
                           f"choose from {ACTION_NAMES}")
        return rel_residual(lhs, rhs)


DYNAMICAL_NAMES = ("dyn_bb", "dyn_ab", "dyn_db", "dyn_cc",
                   "dyn_ahat_c", "dyn_dhat_c")
FUNCTIONAL_NAMES = ("fn_b_diag_raise", "fn_b_diag_lower", "fn_b_phase_raise",
                    "fn_b_phase_lower", "fn_c_diag_raise", "fn_c_diag_lower",
                    "fn_c_phase_raise", "fn_c_phase_lower")
ACTION_NAMES = ("string_b_a", "string_b_d", "string_b_tdiag", "string_b_tphase",
                "string_c_tdiag", "string_c_tphase")
