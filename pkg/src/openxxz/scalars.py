"""Scalar building blocks: Boltzmann weights and commutation coefficients.

Everything here is a plain function of complex arguments.  The deformation
parameter ``q`` is passed explicitly (callers hold it in ModelParams); gauge
data enters through a :class:`~openxxz.params.GaugeFrame`.

Function families:

* ``b, c, phi`` -- the elementary weights of the six-vertex model;
* the structural two-argument coefficients ``f, g, w, h, k, n, s, x, y, r,
  q_fn, G, F, F_tilde`` appearing in the exchange relations of the boundary
  Yang-Baxter algebra (``q_fn`` is the table's q-function, renamed so it does
  not shadow the deformation parameter);
* boundary scalars ``k_minus, k_plus`` and their factorized partners
  ``k_tilde_minus, k_tilde_plus``;
* the gauge-frame-dependent coefficients: ``zeta, zeta_tilde, delta, chi,
  rho`` and derived combinations, plus the m-shifted structural functions
  ``g_m, w_m, k_m, n_m`` and their hatted variants.

All denominators pass through the genericity guard and raise SingularPoint
inside the guarded region.
"""

from __future__ import annotations

import numpy as np

from .errors import SingularPoint
from .params import EPS_GEN, BoundaryParams, GaugeFrame, _nz, gamma, gamma_unit


def rel_residual(lhs, rhs) -> float:
    """|lhs - rhs| / (1 + max(|lhs|, |rhs|)) with Frobenius norm for arrays."""
    lhs = np.asarray(lhs)
    rhs = np.asarray(rhs)
    diff = np.linalg.norm(lhs - rhs)
    scale = 1.0 + max(np.linalg.norm(lhs), np.linalg.norm(rhs))
    return float(diff / scale)


# ----- elementary weights -----------------------------------------------------


def b(u: complex, q: complex) -> complex:
    """b(u) = (u - 1/u) / (q - 1/q)."""
    return (u - 1.0 / u) / _nz(q - 1.0 / q, "q - 1/q")


def c(u: complex) -> complex:
    """c(u) = u**2 - u**-2."""
    return u * u - 1.0 / (u * u)


def phi(u: complex, q: complex) -> complex:
    """phi(u) = b(q**2 u**2) / b(q u**2)."""
    return b(q * q * u * u, q) / _nz(b(q * u * u, q), "b(q u^2)")


# ----- structural coefficients -------------------------------------------------
# Arguments are always (u, v, q); denominators are guarded individually.


def f(u, v, q):
    den = _nz(b(v / u, q), "b(v/u)") * _nz(b(q * u * v, q), "b(q u v)")
    return b(q * v / u, q) * b(u * v, q) / den


def g(u, v, q):
    return phi(1.0 / (q * v), q) / _nz(b(u / v, q), "b(u/v)")


def w(u, v, q):
    return -1.0 / _nz(b(q * u * v, q), "b(q u v)")


def h(u, v, q):
    den = _nz(b(q * u * v, q), "b(q u v)") * _nz(b(u / v, q), "b(u/v)")
    return b(q * q * u * v, q) * b(q * u / v, q) / den


def k(u, v, q):
    return phi(u, q) / _nz(b(v / u, q), "b(v/u)")


def n(u, v, q):
    return phi(u, q) * phi(1.0 / (q * v), q) / _nz(b(q * u * v, q), "b(q u v)")


def s(u, v, q):
    den = _nz(b(v / u, q), "b(v/u)") * _nz(b(q * v * v, q), "b(q v^2)")
    return phi(1.0 / (q * u), q) / den


def x(u, v, q):
    den = _nz(b(u / v, q), "b(u/v)") * _nz(b(q * u * v, q), "b(q u v)")
    return phi(1.0 / (q * u), q) * b(q * u / v, q) / den


def y(u, v, q):
    den = _nz(b(q * v * v, q), "b(q v^2)") * _nz(b(q * u * v, q), "b(q u v)")
    return -1.0 / den


def r(u, v, q):
    return phi(1.0 / (q * u), q) / _nz(b(v / u, q), "b(v/u)")


def q_fn(u, v, q):
    den = _nz(b(u / v, q), "b(u/v)") * _nz(b(q * u * v, q), "b(q u v)")
    return b(u * v, q) / den


def G(u, v, q):
    return 1.0 / (_nz(b(u / v, q), "b(u/v)") * _nz(b(q * u * v, q), "b(q u v)"))


def F(u, v, q):
    return G(u, v, q) * b(q * q * u * u, q) / _nz(phi(v, q), "phi(v)")


def F_tilde(u, v, q):
    return (v / u) * F(u, v, q)


_STRUCTURAL = {
    "f": f, "g": g, "w": w, "h": h, "k": k, "n": n,
    "s": s, "x": x, "y": y, "r": r, "q_fn": q_fn,
    "G": G, "F": F, "F_tilde": F_tilde,
}


def structural(name: str, u: complex, v: complex, q: complex) -> complex:
    """Dispatch into the structural function table by name."""
    try:
        fn = _STRUCTURAL[name]
    except KeyError:
        raise KeyError(f"unknown structural function {name!r}") from None
    return fn(u, v, q)


def structural_names() -> tuple[str, ...]:
    return tuple(_STRUCTURAL)


# ----- boundary scalars ---------------------------------------------------------


def k_minus(u: complex, bp: BoundaryParams) -> complex:
    """Diagonal weight of the right boundary: nu_- u + nu_+ / u."""
    return bp.nu_minus * u + bp.nu_plus / u


def k_plus(u: complex, bp: BoundaryParams) -> complex:
    """Diagonal weight of the left boundary: eps_+ u + eps_- / u."""
    return bp.eps_plus * u + bp.eps_minus / u


def k_tilde_minus(u: complex, bp: BoundaryParams) -> complex:
    """Factorized right-boundary scalar; requires tau_tilde != 0."""
    if bp.mu is None:
        raise SingularPoint("k_tilde_minus undefined at tau_tilde = 0")
    return (1j * bp.tau_tilde * bp.tau
            * (bp.mu * u + u ** -1 / bp.mu)
            * (u / bp.mu_tilde + bp.mu_tilde / u))


def k_tilde_plus(u: complex, bp: BoundaryParams) -> complex:
    """Factorized left-boundary scalar."""
    return (1j * bp.kappa_tilde * bp.kappa
            * (bp.xi_tilde * u + u ** -1 / bp.xi_tilde)
            * (u / bp.xi + bp.xi / u))


# ----- transfer coefficient scalars ----------------------------------------------


def a_tilde(u: complex, bp: BoundaryParams, q: complex) -> complex:
    """Coefficient of the first diagonal operator in the plain decomposition."""
    return phi(u, q) * k_tilde_plus(u, bp) / u


def d_tilde(u: complex, bp: BoundaryParams, q: complex) -> complex:
    return k_tilde_plus(1.0 / (q * u), bp) / u


def a_hat(u: complex, bp: BoundaryParams, q: complex) -> complex:
    """Coefficient of the first diagonal operator in the hatted decomposition."""
    return k_tilde_plus(q * u, bp) / u


def d_hat(u: complex, bp: BoundaryParams, q: complex) -> complex:
    return phi(u, q) * k_tilde_plus(1.0 / u, bp) / u


# ----- gauge-frame coefficients ----------------------------------------------------


def _zeta_factors(bp: BoundaryParams):
    lam = 1j * bp.kappa_tilde / bp.kappa
    return lam * bp.xi / bp.xi_tilde, lam * bp.xi_tilde / bp.xi


def zeta(m: int, frame: GaugeFrame, bp: BoundaryParams, q: complex) -> complex:
    p1, p2 = _zeta_factors(bp)
    a = frame.alpha * q ** (-m - 1)
    return bp.kappa**2 / _nz(gamma_unit(m, frame, q), f"gamma_{m}") * (a + p1) * (a + p2)


def zeta_tilde(m: int, frame: GaugeFrame, bp: BoundaryParams, q: complex) -> complex:
    p1, p2 = _zeta_factors(bp)
    bb = frame.beta * q ** (m - 1)
    return bp.kappa**2 / _nz(gamma_unit(m, frame, q), f"gamma_{m}") * (bb + p1) * (bb + p2)


def delta(m: int, frame: GaugeFrame, bp: BoundaryParams, q: complex) -> complex:
    p1, p2 = _zeta_factors(bp)
    den = _nz(gamma_unit(m + 1, frame, q), f"gamma_{m + 1}")
    return (bp.kappa**2 / den
            * (frame.alpha * q ** (-m - 1) + p1)
            * (frame.beta * q ** (m + 1) + p2))


def chi(m: int, frame: GaugeFrame, bp: BoundaryParams, q: complex) -> complex:
    den = _nz(gamma_unit(m - 1, frame, q), f"gamma_{m - 1}")
    return (1j * bp.kappa_tilde * bp.kappa * (q - 1.0 / q)
            * gamma(bp.xi_tilde / bp.xi, m, frame, q) / den)


def rho(m: int, frame: GaugeFrame, q: complex) -> complex:
    den = _nz(gamma_unit(m - 1, frame, q), f"gamma_{m - 1}")
    return (q - 1.0 / q) * (q ** (-m) * frame.alpha + q**m * frame.beta) / den


def chi_bar(m: int, frame: GaugeFrame, bp: BoundaryParams, q: complex) -> complex:
    return chi(m, frame, bp, q) - delta(m, frame, bp, q) * rho(m, frame, q)


def _hat_ratio(m: int, frame: GaugeFrame, q: complex) -> complex:
    num = gamma_unit(m - 1, frame, q)
    den = _nz(gamma_unit(m + 1, frame, q), f"gamma_{m + 1}")
    return num / den


def chi_hat(m: int, frame: GaugeFrame, bp: BoundaryParams, q: complex) -> complex:
    return chi(m, frame, bp, q) * _hat_ratio(m, frame, q)


def rho_hat(m: int, frame: GaugeFrame, q: complex) -> complex:
    return rho(m, frame, q) * _hat_ratio(m, frame, q)


def chi_bar_hat(m: int, frame: GaugeFrame, bp: BoundaryParams, q: complex) -> complex:
    return (chi_hat(m, frame, bp, q)
            - delta(m - 2, frame, bp, q) * rho_hat(m, frame, q))


_DYN_COEFF = {
    "zeta": lambda m, fr, bp, q: zeta(m, fr, bp, q),
    "zeta_tilde": lambda m, fr, bp, q: zeta_tilde(m, fr, bp, q),
    "delta": lambda m, fr, bp, q: delta(m, fr, bp, q),
    "chi": lambda m, fr, bp, q: chi(m, fr, bp, q),
    "rho": lambda m, fr, bp, q: rho(m, fr, q),
    "chi_bar": lambda m, fr, bp, q: chi_bar(m, fr, bp, q),
    "chi_hat": lambda m, fr, bp, q: chi_hat(m, fr, bp, q),
    "rho_hat": lambda m, fr, bp, q: rho_hat(m, fr, q),
    "chi_bar_hat": lambda m, fr, bp, q: chi_bar_hat(m, fr, bp, q),
}


def dyn_coeff(name: str, m: int, frame: GaugeFrame, bp: BoundaryParams,
              q: complex) -> complex:
    """Dispatch into the gauge-coefficient table by name."""
    try:
        fn = _DYN_COEFF[name]
    except KeyError:
        raise KeyError(f"unknown coefficient {name!r}") from None
    return fn(m, frame, bp, q)


# ----- m-shifted structural functions ----------------------------------------------
# The unwanted-term coefficients of the dynamical exchange relations carry an
# extra gamma ratio relative to their static counterparts.


def g_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m + 1, frame, q), f"gamma_{m + 1}")
    return gamma(u / v, m + 1, frame, q) / den * g(u, v, q)


def w_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m + 1, frame, q), f"gamma_{m + 1}")
    return gamma(u * v, m, frame, q) / den * w(u, v, q)


def k_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m + 1, frame, q), f"gamma_{m + 1}")
    return gamma(v / u, m + 1, frame, q) / den * k(u, v, q)


def n_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m + 1, frame, q), f"gamma_{m + 1}")
    return gamma(1.0 / (u * v), m + 2, frame, q) / den * n(u, v, q)


def g_hat_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m - 1, frame, q), f"gamma_{m - 1}")
    return gamma(v / u, m - 1, frame, q) / den * g(u, v, q)


def w_hat_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m - 1, frame, q), f"gamma_{m - 1}")
    return gamma(1.0 / (u * v), m, frame, q) / den * w(u, v, q)


def k_hat_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m - 1, frame, q), f"gamma_{m - 1}")
    return gamma(u / v, m - 1, frame, q) / den * k(u, v, q)


def n_hat_m(u, v, m, frame, q):
    den = _nz(gamma_unit(m - 1, frame, q), f"gamma_{m - 1}")
    return gamma(u * v, m - 2, frame, q) / den * n(u, v, q)
