"""Reference states, Bethe vectors and off-shell transfer-matrix actions.

The creation route dresses a product reference vector with a descending
string of gauged creation operators; the annihilation route mirrors it
from the opposite reference vector with ascending annihilation operators.
Both routes admit closed-form "wanted" and "unwanted" coefficients, and
the central claim of the construction is that for a full-length string
the leftover creation-operator term itself expands over the same family
of vectors.

Every identity here is checked with the two sides built through
independent code paths: one side applies actual operator matrices to
actual state vectors, the other assembles scalar coefficient functions
from the boundary data.  The module never diagonalizes anything; its job
is to make the algebraic structure machine-checkable at small size.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ActionCheckFailed, SingularPoint, ZeroVectorWarning
from .gauge import GaugedChain, x_vec, y_vec
from .params import (EPS_GEN, BoundaryParams, GaugeFrame, ModelParams,
                     check_frame, gamma_unit, sample_unit)
from .scalars import (b, c, dyn_coeff, g_m, k_m, k_minus, k_tilde_minus,
                      k_tilde_plus, n_m, phi, rel_residual, structural, w_m)
from .transfer import Chain


# ----- scalar building blocks -------------------------------------------------


def lambda_product(u: complex, model: ModelParams) -> complex:
    """Product of on-site weights b(qu/v_i) b(qu v_i) over the chain."""
    q = model.q
    out = 1.0 + 0.0j
    for v in model.inhomogeneities:
        out *= b(q * u / v, q) * b(q * u * v, q)
    return out


def _require_generic_right(bp: BoundaryParams):
    if bp.triangular:
        raise SingularPoint("tau_tilde (factorized right boundary required)",
                            bp.tau_tilde)


def alpha_highest_weight(bp: BoundaryParams, q: complex, m0: int,
                         n_sites: int) -> complex:
    """Gauge parameter that turns the product of two-component covariant
    vectors into a highest-weight state for the creation family."""
    _require_generic_right(bp)
    return 1j * q ** (m0 + n_sites) * bp.tau * bp.mu / (bp.tau_tilde * bp.mu_tilde)


def beta_lowest_weight(bp: BoundaryParams, q: complex, m0: int,
                       n_sites: int) -> complex:
    """Dual gauge parameter fixing the lowest-weight state for the
    annihilation family."""
    _require_generic_right(bp)
    return 1j * q ** (-m0 - n_sites) * bp.tau * bp.mu_tilde / (bp.tau_tilde * bp.mu)


def beta_creation(bp: BoundaryParams, q: complex, m0: int, M: int) -> complex:
    """Second gauge parameter for an M-root creation string: kills the
    annihilation-operator coefficient of the transfer matrix at m0 + 2M."""
    return (-1j * q ** (1 - m0 - 2 * M)
            * bp.xi_tilde * bp.kappa_tilde / (bp.xi * bp.kappa))


def alpha_annihilation(bp: BoundaryParams, q: complex, m0: int, n_sites: int,
                       m_hat: int) -> complex:
    """First gauge parameter for an m_hat-root annihilation string: kills
    the creation-operator coefficient at m0 + 2(N - m_hat)."""
    return (-1j * q ** (1 + m0 + 2 * (n_sites - m_hat))
            * bp.xi * bp.kappa_tilde / (bp.xi_tilde * bp.kappa))


def alpha_diagonal(bp: BoundaryParams, q: complex, m0: int, M: int) -> complex:
    """Gauge choice (with beta_diagonal) making the transfer matrix purely
    diagonal in the gauged family at m0 + 2M."""
    return -1j * bp.kappa_tilde * bp.xi / (bp.kappa * bp.xi_tilde) * q ** (m0 + 2 * M + 1)


def beta_diagonal(bp: BoundaryParams, q: complex, m0: int, M: int) -> complex:
    return -1j * bp.kappa_tilde * bp.xi_tilde / (bp.kappa * bp.xi) * q ** (-m0 - 2 * M + 1)


# ----- sampling of generic spectral points -----------------------------------

# Off-shell spectral points live in an annulus chosen for conditioning, and
# keep a fixed margin from every locus that enters a denominator (or that
# degenerates a check) relative to q, the inhomogeneities and other points.

_POINT_MODULUS = (0.6, 1.7)
_LOCUS_MARGIN = 1e-2
_MAX_TRIES = 2000


def _locus_gap(u: complex, q: complex, model: ModelParams, others) -> float:
    gaps = [abs(q * u * u - 1.0), abs(q * u * u + 1.0)]
    for w in tuple(others) + tuple(model.inhomogeneities):
        gaps += [abs(u - w), abs(u + w),
                 abs(q * u * w - 1.0), abs(q * u * w + 1.0),
                 abs(q * u / w - 1.0), abs(q * u / w + 1.0)]
    return min(gaps)


def sample_point(rng: np.random.Generator, model: ModelParams,
                 avoid=()) -> complex:
    """One generic spectral point, rejected near any singular locus."""
    lo, hi = _POINT_MODULUS
    for _ in range(_MAX_TRIES):
        r = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        th = rng.uniform(0.0, 2.0 * math.pi)
        u = complex(r * math.cos(th), r * math.sin(th))
        if _locus_gap(u, model.q, model, avoid) >= _LOCUS_MARGIN:
            return u
    raise SingularPoint("spectral point sampling exhausted its retry budget")


def sample_roots(rng: np.random.Generator, M: int, model: ModelParams,
                 m0: int = 0) -> "RootSet":
    """M mutually generic spectral points packaged as a RootSet."""
    us: list[complex] = []
    while len(us) < M:
        us.append(sample_point(rng, model, avoid=us))
    return RootSet(tuple(us), m0=m0)


# ----- domain types -----------------------------------------------------------


@dataclass(frozen=True)
class RootSet:
    """An unordered tuple of candidate Bethe roots at base weight m0."""

    roots: tuple
    m0: int = 0

    def __post_init__(self):
        rr = tuple(complex(u) for u in self.roots)
        object.__setattr__(self, "roots", rr)
        for i in range(len(rr)):
            for j in range(i + 1, len(rr)):
                if abs(rr[i] - rr[j]) < 1e-9:
                    raise SingularPoint(f"root collision u_{i + 1} = u_{j + 1}",
                                        rr[i] - rr[j])

    @property
    def M(self) -> int:
        return len(self.roots)

    def validate(self, model: ModelParams) -> "RootSet":
        """Raise SingularPoint if any root sits on a singular locus."""
        q = model.q
        for i, u in enumerate(self.roots):
            for lbl, val in ((f"q u_{i + 1}^2 - 1", q * u * u - 1.0),
                             (f"q u_{i + 1}^2 + 1", q * u * u + 1.0)):
                if abs(val) < EPS_GEN:
                    raise SingularPoint(lbl, val)
            for j in range(i + 1, len(self.roots)):
                w = self.roots[j]
                for lbl, val in ((f"u_{i + 1} + u_{j + 1}", u + w),
                                 (f"q u_{i + 1} u_{j + 1} - 1", q * u * w - 1.0),
                                 (f"q u_{i + 1} u_{j + 1} + 1", q * u * w + 1.0)):
                    if abs(val) < EPS_GEN:
                        raise SingularPoint(lbl, val)
        return self

    def replaced(self, i: int, u: complex) -> tuple:
        """The root tuple with slot i swapped for u (plain tuple: the result
        need not satisfy RootSet's own genericity)."""
        return tuple(self.roots[:i]) + (complex(u),) + tuple(self.roots[i + 1:])


@dataclass(frozen=True)
class WeightVector:
    """A reference state together with the gauge frame that defines it."""

    vector: np.ndarray
    kind: str  # "highest" | "lowest" | "diagonal"
    m0: int
    frame: GaugeFrame


@dataclass(frozen=True)
class SpectralData:
    """Eigenvalue-like scalar data attached to one root set.

    ``lam`` is the total wanted coefficient as a function of the spectral
    parameter; ``e_values``/``w_values`` are the per-root unwanted-term
    coefficients.  ``components`` exposes the individual pieces: callables
    ``lam_gd``, ``lam_g``, ``lam_ps`` and tuples ``e_gd``, ``e_g``, ``e_ps``.
    """

    lam: Callable[[complex], complex]
    e_values: tuple
    w_values: tuple
    components: dict
    side: str
    roots: tuple
    q: complex
    scales: tuple = ()

    def footnote_gaps(self, step: float = 1e-4) -> list[float]:
        """Check that each e_values[i] equals the limit of b(u_i/u) lam(u)
        as u approaches u_i; returns relative gaps.

        The limit is taken as a symmetric two-point average, accurate to
        O(step^2); the step must stay above the genericity margin of the
        structural functions.
        """
        out = []
        for i, ui in enumerate(self.roots):
            vals = [b(ui / up, self.q) * self.lam(up)
                    for up in (ui * (1.0 + step), ui * (1.0 - step))]
            approx = 0.5 * (vals[0] + vals[1])
            out.append(abs(approx - self.e_values[i])
                       / (abs(self.e_values[i]) + 1e-12))
        return out


# ----- scalar spectral assembly -----------------------------------------------


class _SpectralKit:
    """Shared scalar assembly for the creation and annihilation routes.

    The two routes differ only in which points the right-boundary scalar
    is evaluated at and in one constant prefactor; the triangular limit
    reuses the same skeleton with the right-boundary scalar replaced by
    its limiting form.
    """

    def __init__(self, model: ModelParams, bp: BoundaryParams, roots,
                 side: str = "creation", ktm=None, pref=None):
        self.model = model
        self.bp = bp
        self.q = model.q
        self.us = tuple(roots)
        self.side = side
        n = model.n_sites
        q = self.q
        if ktm is None or pref is None:
            _require_generic_right(bp)
        self._ktm = ktm if ktm is not None else (lambda x: k_tilde_minus(x, bp))
        if side == "creation":
            self._arg_plain = lambda x: x
            self._arg_shift = lambda x: 1.0 / (q * x)
            bracket = (bp.kappa * bp.tau / (bp.kappa_tilde * bp.tau_tilde)
                       + bp.kappa_tilde * bp.tau_tilde / (bp.kappa * bp.tau)
                       + bp.xi * bp.mu_tilde / (bp.xi_tilde * bp.mu) * q ** (n + 1)
                       + bp.xi_tilde * bp.mu / (bp.xi * bp.mu_tilde) * q ** (-n - 1)
                       ) if pref is None else None
        elif side == "annihilation":
            self._arg_plain = lambda x: 1.0 / x
            self._arg_shift = lambda x: q * x
            bracket = (bp.kappa * bp.tau / (bp.kappa_tilde * bp.tau_tilde)
                       + bp.kappa_tilde * bp.tau_tilde / (bp.kappa * bp.tau)
                       + bp.xi_tilde * bp.mu / (bp.xi * bp.mu_tilde) * q ** (n + 1)
                       + bp.xi * bp.mu_tilde / (bp.xi_tilde * bp.mu) * q ** (-n - 1)
                       ) if pref is None else None
        else:
            raise ValueError(f"unknown side {side!r}")
        if pref is None:
            pref = (-bp.kappa * bp.kappa_tilde * bp.tau * bp.tau_tilde * bracket)
        self.pref = pref

    # products over the root set, optionally skipping one slot
    def _prod(self, name, x, skip=None):
        out = 1.0 + 0.0j
        for j, w in enumerate(self.us):
            if j == skip:
                continue
            out *= structural(name, x, w, self.q)
        return out

    def _lam(self, x):
        return lambda_product(x, self.model)

    # wanted coefficients as functions of the spectral parameter; `skip`
    # gives the finite skip-one evaluation used for per-root scales
    def lam_gd(self, x, skip=None) -> complex:
        q = self.q
        xs = 1.0 / (q * x)
        return (phi(x, q) * k_tilde_plus(self._arg_plain(x), self.bp)
                * self._ktm(self._arg_plain(x)) * self._lam(x)
                * self._prod("f", x, skip=skip)
                + phi(xs, q) * k_tilde_plus(self._arg_shift(x), self.bp)
                * self._ktm(self._arg_shift(x)) * self._lam(xs)
                * self._prod("h", x, skip=skip))

    def lam_g(self, x, skip=None) -> complex:
        q = self.q
        xs = 1.0 / (q * x)
        return (self.pref * c(x) * c(xs) * self._lam(x) * self._lam(xs)
                * self._prod("G", x, skip=skip))

    def lam_ps(self, x) -> complex:
        q = self.q
        xs = 1.0 / (q * x)
        return x * phi(xs, q) * (self._ktm(self._arg_plain(x)) * self._lam(x)
                                 * self._prod("f", x)
                                 - self._ktm(self._arg_shift(x)) * self._lam(xs)
                                 * self._prod("h", x))

    # per-root unwanted coefficients
    def e_gd(self, i) -> complex:
        q = self.q
        ui = self.us[i]
        us_ = 1.0 / (q * ui)
        return (phi(us_, q) * phi(ui, q)
                * (k_tilde_plus(self._arg_plain(ui), self.bp)
                   * self._ktm(self._arg_plain(ui)) * self._lam(ui)
                   * self._prod("f", ui, skip=i)
                   - k_tilde_plus(self._arg_shift(ui), self.bp)
                   * self._ktm(self._arg_shift(ui)) * self._lam(us_)
                   * self._prod("h", ui, skip=i)))

    def e_g(self, i) -> complex:
        q = self.q
        ui = self.us[i]
        us_ = 1.0 / (q * ui)
        return (-self.pref * c(ui) * c(us_) / b(q * ui * ui, q)
                * self._lam(ui) * self._lam(us_) * self._prod("G", ui, skip=i))

    def e_ps(self, i) -> complex:
        q = self.q
        ui = self.us[i]
        us_ = 1.0 / (q * ui)
        return (ui * phi(us_, q)
                * (phi(us_, q) * self._ktm(self._arg_plain(ui)) * self._lam(ui)
                   * self._prod("f", ui, skip=i)
                   + phi(ui, q) * self._ktm(self._arg_shift(ui)) * self._lam(us_)
                   * self._prod("h", ui, skip=i)))

    def w(self, i) -> complex:
        q = self.q
        ui = self.us[i]
        us_ = 1.0 / (q * ui)
        return (ui * phi(us_, q)
                * (self._ktm(self._arg_plain(ui)) * self._lam(ui)
                   * self._prod("f", ui, skip=i)
                   - self._ktm(self._arg_shift(ui)) * self._lam(us_)
                   * self._prod("h", ui, skip=i)))

    def package(self) -> SpectralData:
        M = len(self.us)
        e_gd = tuple(self.e_gd(i) for i in range(M))
        e_g = tuple(self.e_g(i) for i in range(M))
        e_ps = tuple(self.e_ps(i) for i in range(M))
        ws = tuple(self.w(i) for i in range(M))
        total = lambda x: self.lam_gd(x) + self.lam_g(x)
        comps = {"lam_gd": self.lam_gd, "lam_g": self.lam_g,
                 "lam_ps": self.lam_ps,
                 "e_gd": e_gd, "e_g": e_g, "e_ps": e_ps}
        scales = tuple(abs(self.lam_gd(ui, skip=i)) + abs(self.lam_g(ui, skip=i))
                       for i, ui in enumerate(self.us))
        return SpectralData(lam=total,
                            e_values=tuple(a + bb for a, bb in zip(e_gd, e_g)),
                            w_values=ws, components=comps, side=self.side,
                            roots=self.us, q=self.q, scales=scales)


# ----- the ansatz workbench ----------------------------------------------------


class BetheSystem:
    """One chain plus one base weight integer: states, actions, checks.

    All gauge frames used by the modified ansatz are functions of the
    boundary parameters; the class derives them on demand and caches one
    gauged chain per frame.  ``check_tol`` bounds the residuals of the
    reference-state action identities verified at construction of each
    weight vector (``verify=False`` skips those checks).
    """

    def __init__(self, chain: Chain, m0: int = 0, check_tol: float = 1e-8,
                 verify: bool = True):
        self.chain = chain
        self.model = chain.model
        self.bp = chain.boundary
        self.q = chain.model.q
        self.n = chain.model.n_sites
        self.m0 = int(m0)
        self.check_tol = check_tol
        self.verify = verify
        self._gauged: dict = {}
        self._weights: dict = {}

    # -- frames ---------------------------------------------------------------

    def frame_creation(self, M: int) -> GaugeFrame:
        """Frame for an M-root creation string on the highest-weight state."""
        fr = GaugeFrame(alpha_highest_weight(self.bp, self.q, self.m0, self.n),
                        beta_creation(self.bp, self.q, self.m0, M), self.m0)
        return check_frame(fr, self.q, self.n)

    def frame_annihilation(self, m_hat: int) -> GaugeFrame:
        """Frame for an m_hat-root annihilation string on the lowest-weight
        state."""
        fr = GaugeFrame(alpha_annihilation(self.bp, self.q, self.m0, self.n,
                                           m_hat),
                        beta_lowest_weight(self.bp, self.q, self.m0, self.n),
                        self.m0)
        return check_frame(fr, self.q, self.n)

    def frame_nilpotent(self) -> GaugeFrame:
        """Frame pinning both parameters; creation and annihilation strings
        of excess length vanish identically here."""
        fr = GaugeFrame(alpha_highest_weight(self.bp, self.q, self.m0, self.n),
                        beta_lowest_weight(self.bp, self.q, self.m0, self.n),
                        self.m0)
        return check_frame(fr, self.q, self.n)

    def frame_diagonal(self, M: int) -> GaugeFrame:
        """Frame in which the transfer matrix is diagonal in the gauged
        family at m0 + 2M (used with a triangular right boundary)."""
        fr = GaugeFrame(alpha_diagonal(self.bp, self.q, self.m0, M),
                        beta_diagonal(self.bp, self.q, self.m0, M), self.m0)
        return check_frame(fr, self.q, self.n)

    def gauged(self, frame: GaugeFrame) -> GaugedChain:
        key = (frame.alpha, frame.beta)
        if key not in self._gauged:
            self._gauged[key] = GaugedChain(self.chain, frame)
        return self._gauged[key]

    # -- reference states -------------------------------------------------------

    def _check_points(self, count: int = 2):
        rng = np.random.default_rng(20240917)
        return [sample_point(rng, self.model) for _ in range(count)]

    def _ann_residual(self, op: np.ndarray, vec: np.ndarray) -> float:
        scale = (1.0 + np.linalg.norm(op)) * np.linalg.norm(vec)
        return float(np.linalg.norm(op @ vec) / scale)

    def highest_weight_vector(self, frame: GaugeFrame | None = None) -> WeightVector:
        """Product reference state annihilated by the annihilation family.

        Any second gauge parameter may ride along in ``frame``; only the
        first one is pinned by the construction.
        """
        fr = frame if frame is not None else self.frame_creation(0)
        key = ("highest", fr.alpha, fr.beta)
        if key in self._weights:
            return self._weights[key]
        vs = self.model.inhomogeneities
        vec = np.array([1.0 + 0.0j])
        for i, v in enumerate(vs, start=1):
            vec = np.kron(vec, x_vec(v, self.m0 + i, fr, self.q))
        wv = WeightVector(vec, "highest", self.m0, fr)
        self._weights[key] = wv
        if self.verify:
            try:
                for u in self._check_points():
                    res = self.weight_action_residuals("highest", u, fr)
                    if res["annihilation"] > self.check_tol:
                        raise ActionCheckFailed(
                            f"highest-weight annihilation residual "
                            f"{res['annihilation']:.3e} at u={u}")
                    worst = max(res["diag_plain"], res["diag_shifted"])
                    if worst > self.check_tol:
                        raise ActionCheckFailed(
                            f"highest-weight diagonal action residual {worst:.3e}")
            except ActionCheckFailed:
                del self._weights[key]
                raise
        return wv

    def lowest_weight_vector(self, frame: GaugeFrame | None = None) -> WeightVector:
        """Product reference state annihilated by the creation family."""
        fr = frame if frame is not None else self.frame_annihilation(0)
        key = ("lowest", fr.alpha, fr.beta)
        if key in self._weights:
            return self._weights[key]
        vs = self.model.inhomogeneities
        vec = np.array([1.0 + 0.0j])
        for i, v in enumerate(vs, start=1):
            vec = np.kron(vec, y_vec(v, self.m0 + 2 * self.n - i, fr, self.q))
        wv = WeightVector(vec, "lowest", self.m0, fr)
        self._weights[key] = wv
        if self.verify:
            try:
                for u in self._check_points():
                    res = self.weight_action_residuals("lowest", u, fr)
                    if res["annihilation"] > self.check_tol:
                        raise ActionCheckFailed(
                            f"lowest-weight annihilation residual "
                            f"{res['annihilation']:.3e} at u={u}")
                    worst = max(res["diag_plain"], res["diag_shifted"])
                    if worst > self.check_tol:
                        raise ActionCheckFailed(
                            f"lowest-weight diagonal action residual {worst:.3e}")
            except ActionCheckFailed:
                del self._weights[key]
                raise
        return wv

    def weight_action_residuals(self, side: str, u: complex,
                                frame: GaugeFrame | None = None) -> dict:
        """Residuals of the gauged family acting on a reference state.

        ``annihilation`` is the norm of the would-be annihilator applied to
        the state (relative to operator and state norms); ``diag_plain`` and
        ``diag_shifted`` compare the two diagonal actions against their
        closed scalar forms built from the boundary scalar and the
        inhomogeneity product.
        """
        lam_u = lambda_product(u, self.model)
        lam_s = lambda_product(1.0 / (self.q * u), self.model)
        if side == "highest":
            wv = self.highest_weight_vector(frame)
            fam = self.gauged(wv.frame).dyn(u, self.m0)
            vec = wv.vector
            return {
                "annihilation": self._ann_residual(fam.c_op, vec),
                "diag_plain": rel_residual(
                    fam.a @ vec,
                    u * k_tilde_minus(u, self.bp) * lam_u * vec),
                "diag_shifted": rel_residual(
                    fam.d @ vec,
                    u * phi(1.0 / (self.q * u), self.q)
                    * k_tilde_minus(1.0 / (self.q * u), self.bp) * lam_s * vec),
            }
        if side == "lowest":
            wv = self.lowest_weight_vector(frame)
            fam = self.gauged(wv.frame).dyn(u, self.m0 + 2 * self.n)
            vec = wv.vector
            return {
                "annihilation": self._ann_residual(fam.b_op, vec),
                "diag_plain": rel_residual(
                    fam.d_hat @ vec,
                    u * k_tilde_minus(1.0 / u, self.bp) * lam_u * vec),
                "diag_shifted": rel_residual(
                    fam.a_hat @ vec,
                    u * phi(1.0 / (self.q * u), self.q)
                    * k_tilde_minus(self.q * u, self.bp) * lam_s * vec),
            }
        raise ValueError(f"unknown reference-state side {side!r}")

    def diagonal_weight_vector(self, frame: GaugeFrame) -> WeightVector:
        """All-up product state; reference state of the triangular limit."""
        vec = np.zeros(self.chain.dim, dtype=complex)
        vec[0] = 1.0
        return WeightVector(vec, "diagonal", self.m0, frame)

    # -- Bethe vectors ----------------------------------------------------------

    def _as_roots(self, roots) -> RootSet:
        rs = roots if isinstance(roots, RootSet) else RootSet(tuple(roots),
                                                              m0=self.m0)
        return rs.validate(self.model)

    def bethe_vector(self, roots) -> np.ndarray:
        """Creation-string state on the highest-weight vector."""
        rs = self._as_roots(roots)
        fr = self.frame_creation(rs.M)
        g = self.gauged(fr)
        om = self.highest_weight_vector(fr)
        psi = g.string_b(rs.roots, self.m0 + 2 * rs.M) @ om.vector
        if np.linalg.norm(psi) < 1e-13 * np.linalg.norm(om.vector):
            warnings.warn("creation string produced a numerically zero state",
                          ZeroVectorWarning)
        return psi

    def bethe_vector_hat(self, roots) -> np.ndarray:
        """Annihilation-string state on the lowest-weight vector."""
        rs = self._as_roots(roots)
        fr = self.frame_annihilation(rs.M)
        g = self.gauged(fr)
        om = self.lowest_weight_vector(fr)
        psi = g.string_c(rs.roots, self.m0 + 2 * (self.n - rs.M)) @ om.vector
        if np.linalg.norm(psi) < 1e-13 * np.linalg.norm(om.vector):
            warnings.warn("annihilation string produced a numerically zero state",
                          ZeroVectorWarning)
        return psi

    # -- spectral functions -------------------------------------------------------

    def spectral_functions(self, roots, hatted: bool = False) -> SpectralData:
        """All wanted/unwanted scalar coefficients attached to a root set."""
        rs = self._as_roots(roots)
        side = "annihilation" if hatted else "creation"
        return _SpectralKit(self.model, self.bp, rs.roots, side).package()

    # -- off-shell actions: creation side -----------------------------------------

    def _creation_family(self, u: complex, rs: RootSet):
        m = self.m0 + 2 * rs.M
        fr = self.frame_creation(rs.M)
        g = self.gauged(fr)
        om = self.highest_weight_vector(fr)
        psi = g.string_b(rs.roots, m) @ om.vector
        subs = [g.string_b_replaced(rs.roots, i, u, m) @ om.vector
                for i in range(rs.M)]
        return g, fr, m, psi, subs

    def off_shell_check_td(self, u: complex, roots) -> float:
        """Diagonal-part action on a creation-string state."""
        rs = self._as_roots(roots)
        g, fr, m, psi, subs = self._creation_family(u, rs)
        sd = self.spectral_functions(rs)
        q = self.q
        lhs = g.t_diag(u, m) @ psi
        rhs = sd.components["lam_gd"](u) * psi
        chi_m = dyn_coeff("chi", m, fr, self.bp, q)
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (structural("F_tilde", u, ui, q) * sd.components["e_gd"][i]
                         + chi_m * c(q * u) / u * sd.w_values[i]) * subs[i]
        return rel_residual(lhs, rhs)

    def off_shell_check_tps(self, u: complex, roots) -> float:
        """Phase-part action on a creation-string state."""
        rs = self._as_roots(roots)
        g, fr, m, psi, subs = self._creation_family(u, rs)
        sd = self.spectral_functions(rs)
        q = self.q
        lhs = g.t_phase(u, m) @ psi
        rhs = sd.components["lam_ps"](u) * psi
        rho_m = dyn_coeff("rho", m, fr, self.bp, q)
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (structural("G", u, ui, q) * b(q * ui * ui, q)
                         * sd.components["e_ps"][i]
                         + rho_m * sd.w_values[i]) * subs[i]
        return rel_residual(lhs, rhs)

    def off_shell_check_tlow(self, u: complex, roots) -> float:
        """Full transfer-matrix action on a creation-string state, including
        the leftover creation-operator term applied as an actual operator."""
        rs = self._as_roots(roots)
        g, fr, m, psi, subs = self._creation_family(u, rs)
        sd = self.spectral_functions(rs)
        q, bp = self.q, self.bp
        lhs = self.chain.transfer(u) @ psi
        zeta_m = dyn_coeff("zeta", m, fr, bp, q)
        delta_m = dyn_coeff("delta", m, fr, bp, q)
        chib_m = dyn_coeff("chi_bar", m, fr, bp, q)
        cr = c(q * u) / u
        rhs = (sd.components["lam_gd"](u) * psi
               + cr * (zeta_m * (g.dyn(u, m).b_op @ psi)
                       - delta_m * sd.components["lam_ps"](u) * psi))
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (structural("F_tilde", u, ui, q) * sd.components["e_gd"][i]
                         + cr * (chib_m * sd.w_values[i]
                                 - delta_m * structural("G", u, ui, q)
                                 * b(q * ui * ui, q) * sd.components["e_ps"][i])
                         ) * subs[i]
        return rel_residual(lhs, rhs)

    def conjecture_check_B(self, u: complex, roots) -> float:
        """Expansion of the leftover creation-operator action at full string
        length: the central conjectured identity, creation side."""
        rs = self._as_roots(roots)
        if rs.M != self.n:
            raise ValueError("full-length string required: M must equal n_sites")
        g, fr, m, psi, subs = self._creation_family(u, rs)
        sd = self.spectral_functions(rs)
        q, bp = self.q, self.bp
        cr = c(q * u) / u
        zeta_m = dyn_coeff("zeta", m, fr, bp, q)
        delta_m = dyn_coeff("delta", m, fr, bp, q)
        chib_m = dyn_coeff("chi_bar", m, fr, bp, q)
        lhs = cr * zeta_m * (g.dyn(u, m).b_op @ psi)
        rhs = (sd.components["lam_g"](u)
               + cr * delta_m * sd.components["lam_ps"](u)) * psi
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (cr * (delta_m * structural("G", u, ui, q)
                               * b(q * ui * ui, q) * sd.components["e_ps"][i]
                               - chib_m * sd.w_values[i])
                         + structural("F_tilde", u, ui, q) * sd.components["e_g"][i]
                         ) * subs[i]
        return rel_residual(lhs, rhs)

    def full_off_shell_action(self, u: complex, roots) -> dict:
        """Total transfer-matrix action in closed form (creation side)."""
        rs = self._as_roots(roots)
        if rs.M != self.n:
            raise ValueError("full-length string required: M must equal n_sites")
        g, fr, m, psi, subs = self._creation_family(u, rs)
        sd = self.spectral_functions(rs)
        lhs = self.chain.transfer(u) @ psi
        rhs = sd.lam(u) * psi
        for i, ui in enumerate(rs.roots):
            rhs = rhs + structural("F_tilde", u, ui, self.q) * sd.e_values[i] * subs[i]
        return {"residual": rel_residual(lhs, rhs),
                "eigenvalue": sd.lam(u),
                "bethe_residuals": sd.e_values}

    # -- off-shell actions: annihilation side --------------------------------------

    def _annihilation_family(self, u: complex, rs: RootSet):
        m = self.m0 + 2 * (self.n - rs.M)
        fr = self.frame_annihilation(rs.M)
        g = self.gauged(fr)
        om = self.lowest_weight_vector(fr)
        psi = g.string_c(rs.roots, m) @ om.vector
        subs = [g.string_c_replaced(rs.roots, i, u, m) @ om.vector
                for i in range(rs.M)]
        return g, fr, m, psi, subs

    def off_shell_check_td_hat(self, u: complex, roots) -> float:
        """Diagonal-part action on an annihilation-string state."""
        rs = self._as_roots(roots)
        g, fr, m, psi, subs = self._annihilation_family(u, rs)
        sd = self.spectral_functions(rs, hatted=True)
        q = self.q
        lhs = g.t_diag_hat(u, m) @ psi
        rhs = sd.components["lam_gd"](u) * psi
        chih_m = dyn_coeff("chi_hat", m, fr, self.bp, q)
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (structural("F_tilde", u, ui, q) * sd.components["e_gd"][i]
                         + chih_m * c(q * u) / u * sd.w_values[i]) * subs[i]
        return rel_residual(lhs, rhs)

    def off_shell_check_tps_hat(self, u: complex, roots) -> float:
        """Phase-part action on an annihilation-string state."""
        rs = self._as_roots(roots)
        g, fr, m, psi, subs = self._annihilation_family(u, rs)
        sd = self.spectral_functions(rs, hatted=True)
        q = self.q
        lhs = g.t_phase_hat(u, m) @ psi
        rhs = sd.components["lam_ps"](u) * psi
        rhoh_m = dyn_coeff("rho_hat", m, fr, self.bp, q)
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (structural("G", u, ui, q) * b(q * ui * ui, q)
                         * sd.components["e_ps"][i]
                         - rhoh_m * sd.w_values[i]) * subs[i]
        return rel_residual(lhs, rhs)

    def off_shell_check_tlow_hat(self, u: complex, roots) -> float:
        """Full transfer-matrix action on an annihilation-string state."""
        rs = self._as_roots(roots)
        g, fr, m, psi, subs = self._annihilation_family(u, rs)
        sd = self.spectral_functions(rs, hatted=True)
        q, bp = self.q, self.bp
        lhs = self.chain.transfer(u) @ psi
        cr = c(q * u) / u
        ztld_m = dyn_coeff("zeta_tilde", m, fr, bp, q)
        delta_m2 = dyn_coeff("delta", m - 2, fr, bp, q)
        chibh_m = dyn_coeff("chi_bar_hat", m, fr, bp, q)
        rhs = ((sd.components["lam_gd"](u)
                + cr * delta_m2 * sd.components["lam_ps"](u)) * psi
               - cr * ztld_m * (g.dyn(u, m).c_op @ psi))
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (structural("F_tilde", u, ui, q) * sd.components["e_gd"][i]
                         + cr * (chibh_m * sd.w_values[i]
                                 + delta_m2 * structural("G", u, ui, q)
                                 * b(q * ui * ui, q) * sd.components["e_ps"][i])
                         ) * subs[i]
        return rel_residual(lhs, rhs)

    def conjecture_check_C(self, u: complex, roots) -> float:
        """Expansion of the leftover annihilation-operator action at full
        string length: the central conjectured identity, annihilation side."""
        rs = self._as_roots(roots)
        if rs.M != self.n:
            raise ValueError("full-length string required: M must equal n_sites")
        g, fr, m, psi, subs = self._annihilation_family(u, rs)
        sd = self.spectral_functions(rs, hatted=True)
        q, bp = self.q, self.bp
        cr = c(q * u) / u
        ztld_m = dyn_coeff("zeta_tilde", m, fr, bp, q)
        delta_m2 = dyn_coeff("delta", m - 2, fr, bp, q)
        chibh_m = dyn_coeff("chi_bar_hat", m, fr, bp, q)
        lhs = -cr * ztld_m * (g.dyn(u, m).c_op @ psi)
        rhs = (sd.components["lam_g"](u)
               - cr * delta_m2 * sd.components["lam_ps"](u)) * psi
        for i, ui in enumerate(rs.roots):
            rhs = rhs + (-cr * (delta_m2 * structural("G", u, ui, q)
                                * b(q * ui * ui, q) * sd.components["e_ps"][i]
                                + chibh_m * sd.w_values[i])
                         + structural("F_tilde", u, ui, q) * sd.components["e_g"][i]
                         ) * subs[i]
        return rel_residual(lhs, rhs)

    def full_off_shell_action_hat(self, u: complex, roots) -> dict:
        """Total transfer-matrix action in closed form (annihilation side)."""
        rs = self._as_roots(roots)
        if rs.M != self.n:
            raise ValueError("full-length string required: M must equal n_sites")
        g, fr, m, psi, subs = self._annihilation_family(u, rs)
        sd = self.spectral_functions(rs, hatted=True)
        lhs = self.chain.transfer(u) @ psi
        rhs = sd.lam(u) * psi
        for i, ui in enumerate(rs.roots):
            rhs = rhs + structural("F_tilde", u, ui, self.q) * sd.e_values[i] * subs[i]
        return {"residual": rel_residual(lhs, rhs),
                "eigenvalue": sd.lam(u),
                "bethe_residuals": sd.e_values}

    # -- nilpotency and state matching ---------------------------------------------

    def nilpotency_check(self, roots) -> dict:
        """With both gauge parameters pinned, strings one past full length
        vanish and full-length strings map one reference state onto the
        other; returns the four residuals."""
        us = tuple(complex(u) for u in roots)
        if len(us) != self.n + 1:
            raise ValueError("need n_sites + 1 spectral points")
        fr = self.frame_nilpotent()
        g = self.gauged(fr)
        m0 = self.m0

        def op_scale(mats):
            return float(np.prod([max(np.linalg.norm(mm), 1e-300) for mm in mats]))

        # the excess-length strings sweep exactly the physical gauge window
        # [m0, m0 + 2 n]: descending for creation, ascending for annihilation
        b_full = g.string_b(us, m0 + 2 * (self.n + 1))
        b_parts = [g.dyn(u, m0 + 2 * (self.n + 1) - 2 * (i + 1)).b_op
                   for i, u in enumerate(us)]
        c_full = g.string_c(us, m0 - 2)
        c_parts = [g.dyn(u, m0 - 2 + 2 * (i + 1)).c_op for i, u in enumerate(us)]
        out = {"b_string": float(np.linalg.norm(b_full)) / op_scale(b_parts),
               "c_string": float(np.linalg.norm(c_full)) / op_scale(c_parts)}

        om = self.highest_weight_vector(fr)
        omh = self.lowest_weight_vector(fr)
        psi = g.string_b(us[:self.n], m0 + 2 * self.n) @ om.vector
        phiv = g.string_c(us[:self.n], m0) @ omh.vector
        out["b_maps_to_lowest"] = _colinearity(psi, omh.vector)
        out["c_maps_to_highest"] = _colinearity(phiv, om.vector)
        return out

    # -- constrained boundaries -----------------------------------------------------

    def constraint_detector(self, M: int, m_hat: int, tol: float = 1e-9,
                            probes: int = 2) -> dict:
        """Evaluate both boundary-constraint equations and, where one holds,
        verify that the corresponding unwanted terms vanish as operators."""
        bp, q, N = self.bp, self.q, self.n
        _require_generic_right(bp)
        lhs_b = (-bp.kappa_tilde * bp.mu_tilde * bp.tau_tilde * bp.xi
                 / (bp.kappa * bp.mu * bp.tau * bp.xi_tilde) * q ** (1 + 2 * M - N))
        lhs_c = (-bp.kappa * bp.xi * bp.tau * bp.mu_tilde
                 / (bp.kappa_tilde * bp.tau_tilde * bp.xi_tilde * bp.mu)
                 * q ** (N - 1 - 2 * m_hat))
        out = {"holdsB": abs(lhs_b - 1.0) <= tol,
               "holdsC": abs(lhs_c - 1.0) <= tol,
               "residuals": {"constraintB": abs(lhs_b - 1.0),
                             "constraintC": abs(lhs_c - 1.0)}}
        rng = np.random.default_rng(411)
        pts = [sample_point(rng, self.model) for _ in range(probes)]
        if out["holdsB"]:
            fr = self.frame_creation(M)
            g = self.gauged(fr)
            m = self.m0 + 2 * M
            coeffs = {name: abs(dyn_coeff(name, m, fr, bp, q))
                      for name in ("zeta", "delta", "chi")}
            op_res = max(rel_residual(self.chain.transfer(u), g.t_diag(u, m))
                         for u in pts)
            out["residuals"]["conditionB_coefficients"] = coeffs
            out["residuals"]["diagonal_form_B"] = op_res
        if out["holdsC"]:
            fr = self.frame_annihilation(m_hat)
            g = self.gauged(fr)
            m = self.m0 + 2 * (N - m_hat)
            coeffs = {"zeta_tilde": abs(dyn_coeff("zeta_tilde", m, fr, bp, q)),
                      "delta": abs(dyn_coeff("delta", m - 2, fr, bp, q)),
                      "chi_hat": abs(dyn_coeff("chi_hat", m, fr, bp, q))}
            op_res = max(rel_residual(self.chain.transfer(u), g.t_diag_hat(u, m))
                         for u in pts)
            out["residuals"]["conditionC_coefficients"] = coeffs
            out["residuals"]["diagonal_form_C"] = op_res
        return out


def _colinearity(x: np.ndarray, ref: np.ndarray) -> float:
    """Distance of x from the line spanned by ref, relative to |x|."""
    nx = np.linalg.norm(x)
    nr = np.linalg.norm(ref)
    if nx < 1e-300 or nr < 1e-300:
        return float("nan")
    coef = np.vdot(ref, x) / np.vdot(ref, ref)
    return float(np.linalg.norm(x - coef * ref) / nx)


# ----- constrained-family engineering -------------------------------------------


def engineer_constrained_boundary(rng: np.random.Generator, n_sites: int,
                                  M: int, q: complex,
                                  both: bool = False) -> BoundaryParams:
    """Random boundary data satisfying the creation-side constraint exactly.

    With ``both=True`` the annihilation-side constraint at
    m_hat = n_sites - 1 - M is enforced simultaneously, which additionally
    requires the two off-diagonal strength products to agree.
    """
    for _ in range(200):
        try:
            vals = {k: sample_unit(rng)
                    for k in ("xi", "xi_tilde", "kappa", "kappa_tilde",
                              "mu_tilde", "tau", "tau_tilde")}
            if both:
                vals["kappa_tilde"] = (vals["kappa"] * vals["tau"]
                                       / vals["tau_tilde"])
            mu = (-vals["kappa_tilde"] * vals["mu_tilde"] * vals["tau_tilde"]
                  * vals["xi"] / (vals["kappa"] * vals["tau"] * vals["xi_tilde"])
                  * q ** (1 + 2 * M - n_sites))
            return BoundaryParams.from_factorized(mu=mu, **vals)
        except SingularPoint:
            continue
    raise SingularPoint("constrained-boundary sampling exhausted its retries")


# ----- triangular right boundary --------------------------------------------------


def _triangular_kit(model: ModelParams, bp: BoundaryParams, roots) -> _SpectralKit:
    """Spectral kit for an upper-triangular right boundary: the right-boundary
    scalar degenerates to u k^-(u) and the extra-term prefactor to its limit."""
    q, n = model.q, model.n_sites
    pref = (1j * bp.kappa * bp.kappa_tilde
            * (bp.nu_minus * q ** (-n - 1) * bp.xi_tilde / bp.xi
               + 1j * bp.kappa / bp.kappa_tilde * bp.tau ** 2))
    return _SpectralKit(model, bp, roots, side="creation",
                        ktm=lambda x: x * k_minus(x, bp), pref=pref)


def summation_identity_residuals(u: complex, us, m: int, frame: GaugeFrame,
                                 q: complex) -> tuple[float, float]:
    """Two scalar resummation identities used to collapse string actions;
    they hold for any frame and any gauge integer."""
    M = len(us)
    gm_ratio = gamma_unit(m - 2 * M + 1, frame, q) / gamma_unit(m + 1, frame, q)

    def skip_prod(name, x, i):
        return np.prod([structural(name, x, w, q)
                        for j, w in enumerate(us) if j != i]) if M > 1 else 1.0

    s1 = sum(g_m(u, ui, m, frame, q) * skip_prod("f", ui, i)
             - w_m(u, ui, m, frame, q) * skip_prod("h", ui, i) * phi(ui, q)
             for i, ui in enumerate(us))
    s2 = sum(n_m(u, ui, m, frame, q) * skip_prod("f", ui, i)
             - k_m(u, ui, m, frame, q) * skip_prod("h", ui, i) * phi(ui, q)
             for i, ui in enumerate(us))
    f_all = np.prod([structural("f", u, w, q) for w in us])
    h_all = np.prod([structural("h", u, w, q) for w in us])
    r1 = rel_residual(s1, gm_ratio - f_all)
    r2 = rel_residual(s2, -phi(u, q) * (gm_ratio - h_all))
    return r1, r2


def triangular_limit_suite(chain: Chain, m0: int = 0, seed: int = 7,
                           tau_tilde_steps=(1e-2, 1e-3, 1e-4)) -> dict:
    """Every identity specific to an upper-triangular right boundary, plus
    a convergence scan of the generic formulas toward the limit.

    The chain must carry a triangular right boundary (tau_tilde == 0).
    Returns a flat dict of residuals; ``*_slope`` entries are fitted
    log-log convergence rates (the expected rate is 2).
    """
    model, bp = chain.model, chain.boundary
    if not bp.triangular:
        raise ValueError("triangular_limit_suite needs tau_tilde == 0")
    q, N = model.q, model.n_sites
    rng = np.random.default_rng(seed)
    sys = BetheSystem(chain, m0=m0, verify=False)
    out: dict = {}

    # static reference-state actions of the double-row operator family
    omega = sys.diagonal_weight_vector(GaugeFrame(2.0, 0.5, m0)).vector
    res = []
    for u in (sample_point(rng, model), sample_point(rng, model)):
        fam = chain.operator_family(u)
        us_ = 1.0 / (q * u)
        lam_u = lambda_product(u, model)
        lam_s = lambda_product(us_, model)
        res.append(rel_residual(fam.a @ omega, k_minus(u, bp) * lam_u * omega))
        res.append(rel_residual(fam.d @ omega,
                                phi(us_, q) * k_minus(us_, bp) * lam_s * omega))
        res.append(float(np.linalg.norm(fam.c_op @ omega)
                         / ((1.0 + np.linalg.norm(fam.c_op)))))
    out["vacuum_static"] = max(res)

    # modified reference-state actions of the gauged family: valid for any
    # frame and any gauge integer, with an off-diagonal creation leftover
    fr_rand = None
    while fr_rand is None:
        try:
            fr_rand = check_frame(GaugeFrame(sample_unit(rng), sample_unit(rng),
                                             m0), q, N)
        except SingularPoint:
            continue
    res = []
    g = sys.gauged(fr_rand)
    for m in (m0, m0 + 3):
        u = sample_point(rng, model)
        us_ = 1.0 / (q * u)
        lam_u = lambda_product(u, model)
        lam_s = lambda_product(us_, model)
        fam = g.dyn(u, m)
        boff = g.dyn(u, m - 2).b_op @ omega
        res.append(rel_residual(fam.a @ omega,
                                u * u * k_minus(u, bp) * lam_u * omega + boff))
        res.append(rel_residual(
            fam.d @ omega,
            phi(us_, q) * k_minus(us_, bp) * lam_s / q * omega
            - phi(u, q) * boff))
    out["vacuum_dynamical"] = max(res)

    # scalar resummation identities at a random frame
    us3 = [sample_point(rng, model) for _ in range(3)]
    u0 = sample_point(rng, model, avoid=us3)
    r1, r2 = summation_identity_residuals(u0, tuple(us3), m0 + 1, fr_rand, q)
    out["summation"] = max(r1, r2)

    # diagonal form of the transfer matrix at the dedicated frame
    res = []
    for M in range(N + 1):
        fr = sys.frame_diagonal(M)
        gd_ = sys.gauged(fr)
        u = sample_point(rng, model)
        res.append(rel_residual(chain.transfer(u),
                                gd_.t_diag(u, m0 + 2 * M)))
    out["diagonal_form"] = max(res)

    # the off-shell action with the creation-string state built on the
    # diagonal reference state: exact closed form plus one leftover term
    def creation_state(gch, us, base_m):
        return gch.string_b(us, base_m) @ omega

    res_direct, res_gup, res_phi = [], [], []
    for M in range(1, N + 1):
        fr = sys.frame_diagonal(M)
        gch = sys.gauged(fr)
        rs = sample_roots(rng, M, model, m0=m0)
        u = sample_point(rng, model, avoid=rs.roots)
        kit = _triangular_kit(model, bp, rs.roots)
        psi = creation_state(gch, rs.roots, m0 + 2 * M)
        psi_low = creation_state(gch, rs.roots, m0 - 2 + 2 * M)
        lhs = chain.transfer(u) @ psi
        leftover = (bp.kappa ** 2 * gamma_unit(m0 - 1, fr, q) / (q * u) * c(q * u)
                    * (gch.dyn(u, m0 + 2 * M - 2).b_op @ psi_low))
        rhs = kit.lam_gd(u) * psi + leftover
        for i, ui in enumerate(rs.roots):
            sub = gch.string_b_replaced(rs.roots, i, u, m0 + 2 * M) @ omega
            rhs = rhs + structural("F_tilde", u, ui, q) * kit.e_gd(i) * sub
        res_direct.append(rel_residual(lhs, rhs))
        if M == N:
            # leftover term itself expands over the same family of states
            rhs_g = kit.lam_g(u) * psi
            lhs_g = leftover
            for i, ui in enumerate(rs.roots):
                sub = gch.string_b_replaced(rs.roots, i, u, m0 + 2 * M) @ omega
                rhs_g = rhs_g + structural("F_tilde", u, ui, q) * kit.e_g(i) * sub
            res_gup.append(rel_residual(lhs_g, rhs_g))
            # and the total action takes the closed two-term form
            rhs_t = (kit.lam_gd(u) + kit.lam_g(u)) * psi
            for i, ui in enumerate(rs.roots):
                sub = gch.string_b_replaced(rs.roots, i, u, m0 + 2 * M) @ omega
                rhs_t = rhs_t + (structural("F_tilde", u, ui, q)
                                 * (kit.e_gd(i) + kit.e_g(i)) * sub)
            res_phi.append(rel_residual(lhs, rhs_t))
    out["direct_route"] = max(res_direct)
    out["creation_leftover"] = max(res_gup)
    out["transfer_on_string"] = max(res_phi)

    # the closed form is frame-robust: the first gauge parameter is free
    fr_free = None
    while fr_free is None:
        try:
            fr_free = check_frame(
                GaugeFrame(sample_unit(rng),
                           beta_creation(bp, q, m0, N), m0), q, N)
        except SingularPoint:
            continue
    gch = sys.gauged(fr_free)
    rs = sample_roots(rng, N, model, m0=m0)
    u = sample_point(rng, model, avoid=rs.roots)
    kit = _triangular_kit(model, bp, rs.roots)
    psi = creation_state(gch, rs.roots, m0 + 2 * N)
    lhs = chain.transfer(u) @ psi
    rhs = (kit.lam_gd(u) + kit.lam_g(u)) * psi
    for i, ui in enumerate(rs.roots):
        sub = gch.string_b_replaced(rs.roots, i, u, m0 + 2 * N) @ omega
        rhs = rhs + (structural("F_tilde", u, ui, q)
                     * (kit.e_gd(i) + kit.e_g(i)) * sub)
    out["transfer_on_string_free_frame"] = rel_residual(lhs, rhs)

    # convergence of the generic formulas toward the triangular limit
    out.update(_convergence_scan(model, bp, rng, tau_tilde_steps))
    return out


def _convergence_scan(model: ModelParams, bp: BoundaryParams,
                      rng: np.random.Generator, steps) -> dict:
    """Approach tau_tilde -> 0 at fixed raw right-boundary data and record
    how fast the generic scalar formulas land on the triangular ones."""
    q, N = model.q, model.n_sites
    rs = sample_roots(rng, N, model)
    u = sample_point(rng, model, avoid=rs.roots)
    kit0 = _triangular_kit(model, bp, rs.roots)
    lam0 = kit0.lam_gd(u) + kit0.lam_g(u)
    e0 = kit0.e_gd(0) + kit0.e_g(0)
    km0 = u * k_minus(u, bp)

    gaps_pref, gaps_km, gaps_lam, gaps_e = [], [], [], []
    for t in steps:
        bp_t = BoundaryParams.from_raw(
            eps_plus=bp.eps_plus, eps_minus=bp.eps_minus, kappa=bp.kappa,
            kappa_tilde=bp.kappa_tilde, nu_plus=bp.nu_plus,
            nu_minus=bp.nu_minus, tau=bp.tau, tau_tilde=t)
        kit_t = _SpectralKit(model, bp_t, rs.roots, side="creation")
        gaps_pref.append(abs(kit_t.pref - kit0.pref) / (1.0 + abs(kit0.pref)))
        gaps_km.append(abs(k_tilde_minus(u, bp_t) - km0) / (1.0 + abs(km0)))
        gaps_lam.append(abs((kit_t.lam_gd(u) + kit_t.lam_g(u)) - lam0)
                        / (1.0 + abs(lam0)))
        gaps_e.append(abs((kit_t.e_gd(0) + kit_t.e_g(0)) - e0)
                      / (1.0 + abs(e0)))

    def slope(gaps):
        lt = np.log10(np.asarray(steps, dtype=float))
        lg = np.log10(np.maximum(np.asarray(gaps), 1e-300))
        return float(np.polyfit(lt, lg, 1)[0])

    def monotone(gaps):
        ok = all(b < a for a, b in zip(gaps, gaps[1:]))
        return 0.0 if ok else 1.0

    return {"limit_prefactor_gap": gaps_pref[-1],
            "limit_k_minus_gap": gaps_km[-1],
            "limit_eigenvalue_gap": gaps_lam[-1],
            "limit_bethe_gap": gaps_e[-1],
            "limit_prefactor_slope": slope(gaps_pref),
            "limit_k_minus_slope": slope(gaps_km),
            "limit_eigenvalue_slope": slope(gaps_lam),
            "limit_bethe_slope": slope(gaps_e),
            "limit_prefactor_monotone": monotone(gaps_pref),
            "limit_k_minus_monotone": monotone(gaps_km),
            "limit_eigenvalue_monotone": monotone(gaps_lam),
            "limit_bethe_monotone": monotone(gaps_e)}
