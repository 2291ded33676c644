"""Root finding for the boundary Bethe equations and spectrum reconciliation.

The equations demand that every per-root coefficient of the closed-form
transfer-matrix action vanish; at a solution the string state becomes an
honest eigenvector.  The solver is deliberately plain: damped Newton with
a finite-difference Jacobian, a seeded multi-start sweep, and parameter
continuation from an exactly solvable boundary.  Every converged root set
is cross-checked against a dense diagonalization, which is feasible at
the sizes this package targets.
"""

from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (AmbiguousMatch, Diverged, PathCollision, SingularJacobian,
                     SingularPoint, StepUnderflow, StuckAtSingularLocus,
                     ZeroVectorWarning)
from .maba import BetheSystem, RootSet, _SpectralKit, sample_point, sample_roots
from .params import BoundaryParams, ModelParams
from .transfer import Chain

_CONVERGED = 1e-10
_MAX_ITER = 60
_FD_STEP = 1e-6
_DEDUP_TOL = 1e-7
_AMBIGUOUS_GAP = 1e-8


@dataclass
class SolveReport:
    """Outcome of one root-finding run, plus its spectrum cross-check."""

    roots: RootSet
    residual_max: float
    matched_eigenvalue_index: int | None = None
    eigen_gap: float = float("nan")
    eigvec_angle: float = float("nan")
    iterations: int = 0
    seed: int | None = None
    homotopy_path: tuple = ()


def canonical_roots(us) -> tuple:
    """Multiset-canonical ordering: by modulus, then phase."""
    return tuple(sorted((complex(u) for u in us),
                        key=lambda z: (round(abs(z), 10),
                                       round(cmath.phase(z), 10))))


def same_root_set(a, b, tol: float = _DEDUP_TOL) -> bool:
    ca, cb = canonical_roots(a), canonical_roots(b)
    if len(ca) != len(cb):
        return False
    return all(abs(x - y) <= tol * (1.0 + abs(x)) for x, y in zip(ca, cb))


def spurious_root_set(us, q: complex, tol: float = 1e-6) -> bool:
    """True when a root sits on a universal zero of the equations.

    Every per-root equation carries the overall factor structure that
    vanishes identically at u in {±1, ±i, ±1/q, ±i/q} regardless of the
    boundary data or the other roots, and degenerates as u escapes to 0
    or infinity.  Newton happily converges onto these; they carry either
    a zero string state or a state the closed-form action does not cover,
    so sweeps discard them.
    """
    anchors = (1.0, -1.0, 1j, -1j, 1.0 / q, -1.0 / q, 1j / q, -1j / q)
    for u in us:
        if not 0.02 <= abs(u) <= 50.0:
            return True
        if min(abs(u - a) for a in anchors) < tol:
            return True
    return False


class BetheSolver:
    """Newton, multi-start and continuation for one chain at one base weight."""

    def __init__(self, chain: Chain, m0: int = 0):
        self.chain = chain
        self.model = chain.model
        self.bp = chain.boundary
        self.m0 = int(m0)
        self.n = chain.model.n_sites
        self.system = BetheSystem(chain, m0=m0, verify=False)

    # -- residual map ------------------------------------------------------------

    def residuals(self, us) -> list:
        """Per-root equation values at a candidate root tuple."""
        sd = self.system.spectral_functions(RootSet(tuple(us), m0=self.m0))
        return list(sd.e_values)

    def _normalized(self, us) -> np.ndarray:
        kit = _SpectralKit(self.model, self.bp, tuple(us), "creation")
        out = np.empty(len(us), dtype=complex)
        for i, ui in enumerate(us):
            scale = abs(kit.lam_gd(ui, skip=i)) + abs(kit.lam_g(ui, skip=i))
            out[i] = (kit.e_gd(i) + kit.e_g(i)) / (scale + 1e-300)
        return out

    def residual_max(self, us) -> float:
        return float(np.max(np.abs(self._normalized(us))))

    # -- Newton ------------------------------------------------------------------

    def newton_solve(self, initial, damping: float = 1.0,
                     max_iter: int = _MAX_ITER, tol: float = _CONVERGED,
                     seed: int | None = None, trust=None) -> SolveReport:
        """Damped Newton iteration on the normalized residual map.

        The Jacobian is taken by central differences with a relative step;
        the damping factor halves whenever a step fails to reduce the
        residual, and recovers geometrically afterwards.  ``trust`` (a
        per-root list of radii) confines every iterate to a ball around
        the initial guess; path tracking uses it to keep the correction
        on the local branch instead of letting a descent step slide into
        a neighbouring basin.
        """
        us = [complex(u) for u in initial.roots] if isinstance(initial, RootSet) \
            else [complex(u) for u in initial]
        anchor = list(us)
        self._guard_locus(us)
        try:
            res = self._normalized(us)
        except SingularPoint as exc:
            raise StuckAtSingularLocus(f"initial point is singular: {exc}")
        res_norm = float(np.max(np.abs(res)))
        lam = float(damping)
        for it in range(max_iter):
            if res_norm <= tol:
                return SolveReport(roots=RootSet(tuple(us), m0=self.m0),
                                   residual_max=res_norm, iterations=it,
                                   seed=seed)
            jac = self._jacobian(us)
            try:
                step = np.linalg.solve(jac, -res)
            except np.linalg.LinAlgError:
                raise SingularJacobian(
                    f"Jacobian singular at iteration {it} (roots {us})")
            if not np.all(np.isfinite(step)):
                raise SingularJacobian(
                    f"Jacobian produced a non-finite step at iteration {it}")
            moved = False
            for _ in range(30):
                trial = [u + lam * d for u, d in zip(us, step)]
                if trust is not None and any(
                        abs(t - a) > r for t, a, r in zip(trial, anchor, trust)):
                    lam *= 0.5
                    continue
                try:
                    self._guard_locus(trial)
                    trial_res = self._normalized(trial)
                except SingularPoint:
                    lam *= 0.5
                    continue
                trial_norm = float(np.max(np.abs(trial_res)))
                if trial_norm < res_norm or trial_norm <= tol:
                    us, res, res_norm = trial, trial_res, trial_norm
                    lam = min(1.0, 2.0 * lam)
                    moved = True
                    break
                lam *= 0.5
            if not moved:
                raise Diverged(
                    f"no descent after damping exhaustion at iteration {it}, "
                    f"residual {res_norm:.3e}")
        if res_norm <= tol:
            return SolveReport(roots=RootSet(tuple(us), m0=self.m0),
                               residual_max=res_norm, iterations=max_iter,
                               seed=seed)
        raise Diverged(f"no convergence in {max_iter} iterations, "
                       f"residual {res_norm:.3e}")

    def _guard_locus(self, us):
        """Reject collided or crossing-degenerate root tuples outright."""
        q = self.model.q
        for i, u in enumerate(us):
            if abs(q * u * u - 1.0) < 1e-9 or abs(q * u * u + 1.0) < 1e-9:
                raise StuckAtSingularLocus(f"root {i + 1} sits on q u^2 = ±1")
            for j in range(i + 1, len(us)):
                if abs(u - us[j]) < 1e-9:
                    raise StuckAtSingularLocus(
                        f"roots {i + 1} and {j + 1} collide")
                if abs(q * u * us[j] - 1.0) < 1e-9 or abs(q * u * us[j] + 1.0) < 1e-9:
                    raise StuckAtSingularLocus(
                        f"roots {i + 1} and {j + 1} on q u_i u_j = ±1")

    def _jacobian(self, us) -> np.ndarray:
        n = len(us)
        jac = np.empty((n, n), dtype=complex)
        for j in range(n):
            h = _FD_STEP * (1.0 + abs(us[j]))
            up = list(us)
            dn = list(us)
            up[j] += h
            dn[j] -= h
            jac[:, j] = (self._normalized(up) - self._normalized(dn)) / (2.0 * h)
        return jac

    # -- spectrum cross-check ------------------------------------------------------

    def _probes(self, seed: int, count: int = 3, avoid=()):
        rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, 0x9E37])
        return [sample_point(rng, self.model, avoid=avoid) for _ in range(count)]

    def spectrum_match(self, roots, seed: int = 0) -> dict:
        """Match the closed-form eigenvalue and string state against a dense
        diagonalization at three probe points.

        The reported index refers to the deterministic eigenvalue ordering
        at the first probe; the other probes must land on the same
        invariant eigenvector.
        """
        rs = roots if isinstance(roots, RootSet) else RootSet(tuple(roots),
                                                              m0=self.m0)
        sd = self.system.spectral_functions(rs)
        psi = self.system.bethe_vector(rs)
        psi = psi / np.linalg.norm(psi)
        probes = self._probes(seed, avoid=rs.roots)
        index = None
        ref_vec = None
        worst_gap = 0.0
        worst_angle = 0.0
        for k, u0 in enumerate(probes):
            tmat = self.chain.transfer(u0)
            evals, evecs = np.linalg.eig(tmat)
            order = np.lexsort((np.round(evals.imag, 12),
                                np.round(evals.real, 12)))
            evals, evecs = evals[order], evecs[:, order]
            lam0 = sd.lam(u0)
            dists = np.abs(evals - lam0)
            best = int(np.argmin(dists))
            others = np.delete(np.arange(len(evals)), best)
            if others.size and np.min(np.abs(evals[others] - evals[best])) \
                    < _AMBIGUOUS_GAP:
                raise AmbiguousMatch(
                    f"two eigenvalues within {_AMBIGUOUS_GAP} of the match "
                    f"at probe {k}")
            gap = float(dists[best] / (1.0 + abs(lam0)))
            vec = evecs[:, best]
            overlap = abs(np.vdot(vec, psi)) / np.linalg.norm(vec)
            angle = float(math.acos(min(1.0, overlap)))
            worst_gap = max(worst_gap, gap)
            worst_angle = max(worst_angle, angle)
            if k == 0:
                index, ref_vec = best, vec
            else:
                cross = abs(np.vdot(ref_vec, vec)) / (np.linalg.norm(ref_vec)
                                                      * np.linalg.norm(vec))
                if math.acos(min(1.0, cross)) > 1e-6:
                    raise AmbiguousMatch(
                        f"probe {k} matched a different invariant eigenvector")
        return {"index": index, "eigen_gap": worst_gap,
                "eigvec_angle": worst_angle}

    def _carries_state(self, roots: RootSet) -> bool:
        """False when the string state at these roots is numerically zero."""
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ZeroVectorWarning)
                psi = self.system.bethe_vector(roots)
        except SingularPoint:
            return False
        return bool(np.linalg.norm(psi) > 1e-10)

    def _attach_match(self, report: SolveReport, seed: int) -> SolveReport:
        match = self.spectrum_match(report.roots, seed=seed)
        report.matched_eigenvalue_index = match["index"]
        report.eigen_gap = match["eigen_gap"]
        report.eigvec_angle = match["eigvec_angle"]
        return report

    # -- multi-start sweep -----------------------------------------------------------

    def multi_start(self, seed: int, n_starts: int = 200,
                    match: bool = True) -> dict:
        """Seeded Newton sweep; deduplicated reports plus a completeness
        tally against the full spectrum dimension (reported, not asserted)."""
        found: list[SolveReport] = []
        for k in range(n_starts):
            rng = np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, k])
            try:
                start = sample_roots(rng, self.n, self.model, m0=self.m0)
                rep = self.newton_solve(start, seed=seed)
            except (Diverged, SingularJacobian, StuckAtSingularLocus,
                    SingularPoint):
                continue
            if spurious_root_set(rep.roots.roots, self.model.q):
                continue
            if any(same_root_set(rep.roots.roots, f.roots.roots) for f in found):
                continue
            if not self._carries_state(rep.roots):
                continue
            if match:
                try:
                    rep = self._attach_match(rep, seed)
                except (AmbiguousMatch, SingularPoint):
                    pass
            found.append(rep)
        found.sort(key=lambda r: (r.matched_eigenvalue_index is None,
                                  r.matched_eigenvalue_index,
                                  round(abs(r.roots.roots[0]), 8)))
        levels = {r.matched_eigenvalue_index for r in found
                  if r.matched_eigenvalue_index is not None}
        return {"reports": found,
                "distinct_root_sets": len(found),
                "matched_levels": len(levels),
                "dimension": self.chain.dim}


# ----- continuation in boundary parameters ------------------------------------------


_FACTORIZED_FIELDS = ("xi", "xi_tilde", "kappa", "kappa_tilde",
                      "mu", "mu_tilde", "tau", "tau_tilde")


def _blend_boundary(start: BoundaryParams, target: BoundaryParams,
                    s: float) -> BoundaryParams:
    """Linear interpolation in the factorized parametrization (smooth in s,
    no branch recovery involved)."""
    vals = {}
    for name in _FACTORIZED_FIELDS:
        a = getattr(start, name)
        bb = getattr(target, name)
        if a is None or bb is None:
            raise SingularPoint(f"{name} missing on the continuation path "
                                "(factorized form required)")
        vals[name] = (1.0 - s) * a + s * bb
    return BoundaryParams.from_factorized(**vals)


def _align(us, got):
    """Order ``got`` so that it matches ``us`` root-by-root."""
    best, best_cost = None, None
    for perm in itertools.permutations(range(len(got))):
        cost = sum(abs(us[i] - got[p]) for i, p in enumerate(perm))
        if best_cost is None or cost < best_cost:
            best, best_cost = perm, cost
    return [got[p] for p in best]


def _root_orbit(u: complex, q: complex) -> tuple[complex, ...]:
    """Images of a root under the solution-preserving maps.

    Negating a root or replacing it by 1/(q u) leaves every scalar
    quantity of the ansatz invariant, so each solution of the Bethe
    equations is really an orbit of root sets; all members carry the same
    transfer-matrix eigenvalue and eigenvector.
    """
    w = 1.0 / (q * u)
    return (u, -u, w, -w)


def orbit_equal(a, b, q: complex, tol: float = 1e-6) -> bool:
    """Whether two root sets coincide modulo per-root symmetry images."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    for perm in itertools.permutations(range(len(b))):
        if all(any(abs(b[p] - o) <= tol * (1.0 + abs(o))
                   for o in _root_orbit(a[i], q))
               for i, p in enumerate(perm)):
            return True
    return False


def _covered(pred, allow, got, q=None):
    """Two-sided proximity of ``got`` to predicted roots within ``allow``.

    With ``q`` given, proximity to any symmetry image of a predicted root
    counts as well.
    """
    def near(g, p, a):
        images = _root_orbit(p, q) if q is not None else (p,)
        return any(abs(g - o) <= a for o in images)

    return (all(any(near(g, p, a) for p, a in zip(pred, allow)) for g in got)
            and all(any(near(g, p, a) for g in got)
                    for p, a in zip(pred, allow)))


_BOOTSTRAP_STEP = 0.008


def _track_path(model: ModelParams, start_bp: BoundaryParams,
                target_bp: BoundaryParams, tracked, s0: float, m0: int,
                h0: float, h_min: float):
    """Advance a family of root sets from path position s0 to 1.

    Each set is re-converged by Newton after every parameter step and
    validated against a linear predictor built from the previous step's
    root velocities: a genuine branch lands within O(step^2) of the
    prediction, while a hop onto a foreign branch leaves an error of the
    order of the branch separation, which no step size shrinks.  Landing
    on a symmetry image of the prediction is accepted (a branch and its
    image genuinely intersect where a root crosses a self-symmetric
    locus such as u^2 = 1/q, and which representative Newton keeps is
    arbitrary there); the velocity estimate is rebuilt afterwards.

    The step halves on any rejection.  A set still failing at ``h_min``
    has no continuation (its roots typically escape toward 0 or infinity
    at an interior path point) and is dropped.  Two sets merging within
    tolerance are deduplicated when they are symmetry images of each
    other (the same solution under two labels); a persistent merge of
    genuinely distinct solutions is a discriminant point on the path and
    raises PathCollision.  StepUnderflow is raised only when every set
    is lost at once, which signals a defective path.
    """
    branches = [{"us": list(us), "vel": None} for us in tracked]
    path_points = [s0]
    s, h = float(s0), float(h0)
    while s < 1.0 and branches:
        step = min(h, 1.0 - s)
        if any(br["vel"] is None for br in branches):
            step = min(step, _BOOTSTRAP_STEP)
        s_next = s + step
        bp_next = _blend_boundary(start_bp, target_bp, s_next)
        solver = BetheSolver(Chain(model, bp_next), m0=m0)
        moved, survivors = [], []
        for br in branches:
            us, vel = br["us"], br["vel"]
            if vel is None:
                pred = us
                allow = [12.0 * step * (1.0 + abs(u)) for u in us]
            else:
                pred = [u + v * step for u, v in zip(us, vel)]
                allow = [step * (abs(v) + 0.5 * (1.0 + abs(u)))
                         for u, v in zip(us, vel)]
            try:
                got = _align(us, list(solver.newton_solve(
                    pred, trust=[2.0 * a for a in allow]).roots.roots))
            except (Diverged, SingularJacobian, StuckAtSingularLocus,
                    SingularPoint):
                continue
            if any(not 0.02 <= abs(u) <= 50.0 for u in got):
                continue
            if _covered(pred, allow, got):
                new_vel = [(g - u) / step for u, g in zip(us, got)]
            elif _covered(pred, allow, got, q=model.q):
                new_vel = None
            else:
                continue
            moved.append({"us": got, "vel": new_vel})
            survivors.append(br)
        if len(moved) < len(branches):
            h = step * 0.5
            if h >= h_min:
                continue
            if not moved:
                raise StepUnderflow(
                    f"all tracked root sets lost at s = {s:.6f}")
            branches = survivors
            h = float(h0)
            continue
        drop, collide = set(), False
        for i in range(len(moved)):
            for j in range(i + 1, len(moved)):
                if same_root_set(moved[i]["us"], moved[j]["us"]):
                    if orbit_equal(branches[i]["us"], branches[j]["us"],
                                   model.q, tol=1e-5):
                        drop.add(j)
                    else:
                        collide = True
        if collide:
            h = step * 0.5
            if h < h_min:
                raise PathCollision(
                    f"tracked root sets merged at s = {s_next:.6f}")
            continue
        branches = [br for k, br in enumerate(moved) if k not in drop]
        path_points.append(s_next)
        s = s_next
        h = min(2.0 * step, 0.125)
    return [br["us"] for br in branches], tuple(path_points)


def homotopy_solve(model: ModelParams, start_bp: BoundaryParams,
                   target_bp: BoundaryParams, m0: int = 0,
                   seed: int = 0, n_starts: int = 80,
                   seed_points=(0.0, 0.1, 0.2, 0.35, 0.5),
                   initial_roots=None, h0: float = 0.0625,
                   h_min: float = 1e-6, strict: bool = True) -> list[SolveReport]:
    """Track root sets from a solvable boundary to a generic target.

    Root sets are seeded by multi-start sweeps at successive points along
    the path and each is continued to the target.  Seeding at several
    points matters: exactly on a constrained or triangular boundary the
    full-length root sets degenerate (they collapse onto the universal
    anchor points), so the earliest path points may legitimately yield
    nothing.  Duplicates arriving at the same target set are merged.

    ``initial_roots`` (a list of root iterables already converged at the
    start boundary) bypasses the seeding sweeps; this is how a reversed
    path re-tracks the sets produced by a forward run.

    With ``strict=False`` a seed group whose tracking dies underway
    (every branch lost, or an unresolved collision) is skipped instead of
    aborting the whole sweep; use this when only arrival sets matter, and
    the default when the identity of each tracked set does.
    """
    if initial_roots is not None:
        seed_plan = [(0.0, [list(us) for us in initial_roots])]
    else:
        seed_plan = []
        for s0 in seed_points:
            bp0 = _blend_boundary(start_bp, target_bp, s0)
            seeder = BetheSolver(Chain(model, bp0), m0=m0)
            seed_plan.append((s0, [r.roots.roots for r in
                                   seeder.multi_start(seed, n_starts=n_starts,
                                                      match=False)["reports"]]))
    out: list[SolveReport] = []
    for s0, seeds in seed_plan:
        if not seeds:
            continue
        try:
            tracked, path = _track_path(model, start_bp, target_bp,
                                        seeds, s0, m0, h0, h_min)
        except (StepUnderflow, PathCollision):
            if strict:
                raise
            continue
        final_solver = BetheSolver(Chain(model, target_bp), m0=m0)
        for us in tracked:
            try:
                rep = final_solver.newton_solve(us, seed=seed)
            except (Diverged, SingularJacobian, StuckAtSingularLocus,
                    SingularPoint):
                continue
            if spurious_root_set(rep.roots.roots, model.q):
                continue
            if any(same_root_set(rep.roots.roots, r.roots.roots) for r in out):
                continue
            rep.homotopy_path = path
            try:
                rep = final_solver._attach_match(rep, seed)
            except (AmbiguousMatch, SingularPoint):
                pass
            out.append(rep)
    return out
