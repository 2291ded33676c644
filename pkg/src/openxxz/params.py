"""Parameter records for the chain, the two boundaries and the gauge frame.

Conventions used throughout the package:

* every parameter is a Python ``complex`` (the model is analytic in all of
  them, so real inputs are just a special case);
* the anisotropy ``q`` is kept multiplicative, i.e. Boltzmann-like weights
  are Laurent polynomials in ``q`` and in the spectral parameters;
* genericity is enforced with a single guard ``EPS_GEN``: any denominator
  whose modulus falls below it raises :class:`~openxxz.errors.SingularPoint`.

The boundary parametrisation comes in two equivalent forms.  The *raw* form
carries the matrix entries directly (``eps_pm, kappa, kappa_tilde`` for the
left boundary, ``nu_pm, tau, tau_tilde`` for the right one).  The
*factorized* form trades ``eps_pm`` for ``(xi, xi_tilde)`` and ``nu_pm`` for
``(mu, mu_tilde)`` so that the quantum determinants factorize.  Both are
stored; either constructor fills in the other side of the dictionary.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import SingularPoint

# Genericity guard: denominators below this modulus are treated as singular.
EPS_GEN = 1e-6


def _nz(value: complex, label: str) -> complex:
    """Return ``value`` unchanged, raising SingularPoint if it is too small."""
    if abs(value) < EPS_GEN:
        raise SingularPoint(label, value)
    return value


# ----- model parameters -----------------------------------------------------


@dataclass(frozen=True)
class ModelParams:
    """Bulk data of the chain: anisotropy, length and inhomogeneities.

    ``q**k != 1`` is required for k up to ``2*n_sites + 4`` because shifted
    arguments like q**2 u**2 and q u v_i enter denominators of the fused
    R-matrix weights.
    """

    q: complex
    n_sites: int
    inhomogeneities: tuple[complex, ...] = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        v = tuple(complex(x) for x in self.inhomogeneities)
        if not v:
            v = (1.0 + 0.0j,) * self.n_sites
        if len(v) != self.n_sites:
            raise ValueError("need one inhomogeneity per site")
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "inhomogeneities", v)
        _nz(self.q, "q")
        for k in range(1, 2 * self.n_sites + 5):
            _nz(self.q**k - 1.0, f"q**{k} - 1")
        for i, vi in enumerate(v):
            _nz(vi, f"v_{i + 1}")


# ----- boundary parameters ---------------------------------------------------


def _quadratic_pair(s: complex, label: str) -> tuple[complex, complex]:
    """Both roots of a + 1/a = s, i.e. of a**2 - s*a + 1 = 0."""
    disc = cmath.sqrt(s * s - 4.0)
    a1 = (s + disc) / 2.0
    a2 = (s - disc) / 2.0
    _nz(a1, label)
    _nz(a2, label)
    return a1, a2


@dataclass(frozen=True)
class BoundaryParams:
    """The twelve boundary parameters, raw and factorized forms together.

    Left boundary: ``eps_plus, eps_minus`` (diagonal), ``kappa, kappa_tilde``
    (off-diagonal), factorized by ``xi, xi_tilde``.  Right boundary:
    ``nu_plus, nu_minus``, ``tau, tau_tilde``, factorized by ``mu, mu_tilde``.
    ``mu``/``mu_tilde`` are ``None`` exactly when ``tau_tilde == 0`` (upper
    triangular right boundary), where the factorized form degenerates.

    Use :meth:`from_factorized` or :meth:`from_raw`; the bare constructor
    performs no consistency completion.
    """

    eps_plus: complex
    eps_minus: complex
    kappa: complex
    kappa_tilde: complex
    xi: complex
    xi_tilde: complex
    nu_plus: complex
    nu_minus: complex
    tau: complex
    tau_tilde: complex
    mu: complex | None
    mu_tilde: complex | None
    branch: str = "factorized"

    def __post_init__(self):
        for name in ("kappa", "kappa_tilde", "xi", "xi_tilde", "tau"):
            _nz(getattr(self, name), name)
        if self.triangular:
            if self.mu is not None or self.mu_tilde is not None:
                raise ValueError("mu/mu_tilde must be None when tau_tilde == 0")
        else:
            _nz(self.tau_tilde, "tau_tilde")
            _nz(self.mu, "mu")
            _nz(self.mu_tilde, "mu_tilde")

    @property
    def triangular(self) -> bool:
        """True when the right boundary is upper triangular (tau_tilde == 0)."""
        return abs(self.tau_tilde) < EPS_GEN

    @classmethod
    def from_factorized(cls, *, xi, xi_tilde, kappa, kappa_tilde,
                        mu, mu_tilde, tau, tau_tilde) -> "BoundaryParams":
        """Build from the factorized form, filling in the raw diagonals."""
        xi, xi_tilde = complex(xi), complex(xi_tilde)
        mu, mu_tilde = complex(mu), complex(mu_tilde)
        kk = 1j * complex(kappa_tilde) * complex(kappa)
        tt = 1j * complex(tau_tilde) * complex(tau)
        eps_minus = kk * (xi / xi_tilde + xi_tilde / xi)
        eps_plus = kk * (xi * xi_tilde + 1.0 / (xi * xi_tilde))
        nu_minus = tt * (mu / mu_tilde + mu_tilde / mu)
        nu_plus = tt * (mu * mu_tilde + 1.0 / (mu * mu_tilde))
        return cls(eps_plus=eps_plus, eps_minus=eps_minus,
                   kappa=complex(kappa), kappa_tilde=complex(kappa_tilde),
                   xi=xi, xi_tilde=xi_tilde,
                   nu_plus=nu_plus, nu_minus=nu_minus,
                   tau=complex(tau), tau_tilde=complex(tau_tilde),
                   mu=mu, mu_tilde=mu_tilde, branch="factorized")

    @classmethod
    def from_raw(cls, *, eps_plus, eps_minus, kappa, kappa_tilde,
                 nu_plus, nu_minus, tau, tau_tilde) -> "BoundaryParams":
        """Build from the raw form, recovering the factorized parameters.

        Each recovery solves two quadratics; of the reciprocal-pair branches
        the one with modulus >= 1 is kept (ties broken by phase in [0, pi)).
        The choice only relabels the same K-matrix: all branches reproduce
        the raw parameters identically.
        """
        xi, xi_tilde, br_l = _recover_pair(eps_minus, eps_plus,
                                           1j * complex(kappa_tilde) * complex(kappa),
                                           "eps / (i kappa kappa_tilde)")
        if abs(complex(tau_tilde)) < EPS_GEN:
            mu = mu_tilde = None
            br_r = "triangular"
            tau_tilde = 0.0j
        else:
            mu, mu_tilde, br_r = _recover_pair(nu_minus, nu_plus,
                                               1j * complex(tau_tilde) * complex(tau),
                                               "nu / (i tau tau_tilde)")
        return cls(eps_plus=complex(eps_plus), eps_minus=complex(eps_minus),
                   kappa=complex(kappa), kappa_tilde=complex(kappa_tilde),
                   xi=xi, xi_tilde=xi_tilde,
                   nu_plus=complex(nu_plus), nu_minus=complex(nu_minus),
                   tau=complex(tau), tau_tilde=complex(tau_tilde),
                   mu=mu, mu_tilde=mu_tilde,
                   branch=f"left:{br_l} right:{br_r}")


def _recover_pair(d_minus, d_plus, scale, label):
    """Invert ``d_minus = scale*(p/pt + pt/p)``, ``d_plus = scale*(p*pt + 1/(p*pt))``.

    Returns (p, pt, branch_tag) with |p| >= 1.
    """
    scale = _nz(complex(scale), f"{label} scale")
    s_ratio = complex(d_minus) / scale
    s_prod = complex(d_plus) / scale
    ratios = _quadratic_pair(s_ratio, f"{label} ratio root")
    prods = _quadratic_pair(s_prod, f"{label} product root")
    best = None
    for ia, a in enumerate(ratios):
        for ib, bb in enumerate(prods):
            p = cmath.sqrt(a * bb)
            for sign in (1.0, -1.0):
                cand = sign * p
                pt = bb / cand
                key = (round(abs(cand), 12), -((cmath.phase(cand)) % math.pi))
                if abs(cand) < 1.0 - 1e-12:
                    continue
                if best is None or key > best[0]:
                    best = (key, cand, pt, f"ratio{ia}prod{ib}{'+' if sign > 0 else '-'}")
    if best is None:
        # all four candidates had |p| < 1; numerically impossible since the
        # candidate moduli come in reciprocal pairs, but guard anyway
        raise SingularPoint(f"{label}: no branch with |p| >= 1")
    _, p, pt, tag = best
    _nz(p, f"{label} p")
    _nz(pt, f"{label} pt")
    return p, pt, tag


# ----- gauge frame -----------------------------------------------------------


@dataclass(frozen=True)
class GaugeFrame:
    """Gauge vector data: the two free parameters and the reference weight m0.

    The per-operator integer m is always passed explicitly alongside the
    frame; the frame itself is stateless.  Frames must keep gamma_m away from
    zero on the window [m0 - 2N - 2, m0 + 2N + 2]; :func:`check_frame`
    enforces this where a frame enters actual operator arithmetic.
    """

    alpha: complex
    beta: complex
    m0: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        if not isinstance(self.m0, int):
            raise ValueError("m0 must be an integer")


def gamma(u: complex, m: int, frame: GaugeFrame, q: complex) -> complex:
    """gamma(u, m) = alpha q**-m u - beta q**m u**-1."""
    return frame.alpha * q ** (-m) * u - frame.beta * q**m / u


def gamma_unit(m: int, frame: GaugeFrame, q: complex) -> complex:
    """gamma_m = gamma(1, m)."""
    return frame.alpha * q ** (-m) - frame.beta * q**m


def check_frame(frame: GaugeFrame, q: complex, n_sites: int) -> GaugeFrame:
    """Validate gamma_m != 0 on the working window; return the frame."""
    for m in range(frame.m0 - 2 * n_sites - 2, frame.m0 + 2 * n_sites + 3):
        _nz(gamma_unit(m, frame, q), f"gamma_{m}")
    return frame


# ----- random sampling --------------------------------------------------------

# Moduli are drawn log-uniformly from [0.5, 2.0]; phases uniformly.  Draws
# that trip a genericity guard are rejected and redrawn wholesale.

_MODULUS_RANGE = (0.5, 2.0)
_MAX_REDRAWS = 500


def sample_unit(rng: np.random.Generator) -> complex:
    """One generic complex number: log-uniform modulus, uniform phase."""
    lo, hi = _MODULUS_RANGE
    r = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    th = rng.uniform(0.0, 2.0 * math.pi)
    return complex(r * math.cos(th), r * math.sin(th))


def _redraw(make, rng):
    for _ in range(_MAX_REDRAWS):
        try:
            return make(rng)
        except SingularPoint:
            continue
    raise SingularPoint("sampling failed to find a generic draw")


def sample_model(rng: np.random.Generator, n_sites: int,
                 homogeneous: bool = False) -> ModelParams:
    """Draw generic (q, inhomogeneities); homogeneous=True pins all v_i = 1."""

    def make(rng):
        q = sample_unit(rng)
        if homogeneous:
            v = (1.0 + 0.0j,) * n_sites
        else:
            v = tuple(sample_unit(rng) for _ in range(n_sites))
        return ModelParams(q=q, n_sites=n_sites, inhomogeneities=v)

    return _redraw(make, rng)


def sample_boundary(rng: np.random.Generator) -> BoundaryParams:
    """Draw generic factorized boundary parameters."""

    def make(rng):
        vals = {k: sample_unit(rng)
                for k in ("xi", "xi_tilde", "kappa", "kappa_tilde",
                          "mu", "mu_tilde", "tau", "tau_tilde")}
        return BoundaryParams.from_factorized(**vals)

    return _redraw(make, rng)


def sample_frame(rng: np.random.Generator, q: complex, n_sites: int,
                 m0: int = 0) -> GaugeFrame:
    """Draw a generic gauge frame whose gamma window stays away from zero."""

    def make(rng):
        fr = GaugeFrame(alpha=sample_unit(rng), beta=sample_unit(rng), m0=m0)
        return check_frame(fr, q, n_sites)

    return _redraw(make, rng)
