"""Double-row monodromy, transfer matrix, operator family, Hamiltonian."""

import numpy as np
import pytest

from openxxz.boundary import k_plus_matrix
from openxxz.lattice import Op, pauli_on_site, r_op, site_labels
from openxxz.maba import lambda_product, sample_point
from openxxz.params import BoundaryParams, sample_boundary, sample_model
from openxxz.scalars import b, k_minus, rel_residual
from openxxz.transfer import Chain

from conftest import make_chain


def test_monodromy_satisfies_operator_reflection_equation():
    # The double-row monodromy obeys the same quartic exchange relation as
    # the scalar lower boundary matrix, now with operator-valued entries.
    for seed, n in ((0, 1), (1, 2)):
        rng = np.random.default_rng(seed)
        model = sample_model(rng, n_sites=n)
        q = model.q
        ch = Chain(model, sample_boundary(rng))
        u1 = sample_point(rng, model)
        u2 = sample_point(rng, model, avoid=(u1,))
        layout = ("a", "b") + site_labels(n)
        Ma = ch.monodromy(u1).embed(layout).mat
        mb = ch.monodromy(u2)
        Mb = Op(mb.mat, ("b",) + mb.spaces[1:]).embed(layout).mat
        R_rat = r_op(u1 / u2, q, "a", "b").embed(layout).mat
        R_pro = r_op(u1 * u2, q, "a", "b").embed(layout).mat
        lhs = R_rat @ Ma @ R_pro @ Mb
        rhs = Mb @ R_pro @ Ma @ R_rat
        assert rel_residual(lhs, rhs) < 1e-12


def test_transfer_trace_route_and_family_expansions(chain2):
    rng = np.random.default_rng(2)
    model = chain2.model
    q = model.q
    for _ in range(3):
        u = sample_point(rng, model)
        t = chain2.transfer(u)
        # independent route: contract the upper boundary matrix against the
        # auxiliary-leg blocks of the monodromy by hand
        mono = chain2.monodromy(u)
        Kp = k_plus_matrix(u, chain2.boundary, q)
        manual = sum(Kp[i, j] * mono.block("a", j, i).mat
                     for i in range(2) for j in range(2))
        assert rel_residual(manual, t) < 1e-12
        assert rel_residual(chain2.transfer_from_family(u), t) < 1e-12
        assert rel_residual(chain2.transfer_from_family(u, hat=True), t) < 1e-12


def test_operator_family_matches_monodromy_blocks(chain2):
    rng = np.random.default_rng(3)
    u = sample_point(rng, chain2.model)
    q = chain2.model.q
    fam = chain2.operator_family(u)
    mono = chain2.monodromy(u)
    blk = {(i, j): mono.block("a", i, j).mat for i in range(2) for j in range(2)}
    assert rel_residual(fam.a, blk[(0, 0)]) < 1e-13
    assert rel_residual(fam.b_op, blk[(0, 1)]) < 1e-13
    assert rel_residual(fam.c_op, blk[(1, 0)]) < 1e-13
    # the shifted diagonal entries absorb a 1/b(q u^2) tail of their partner
    bb = b(q * u * u, q)
    assert rel_residual(fam.d + fam.a / bb, blk[(1, 1)]) < 1e-13
    assert rel_residual(fam.a_hat + fam.d_hat / bb, blk[(0, 0)]) < 1e-13
    # B and C are genuinely different operators, not transposes
    assert rel_residual(fam.b_op, fam.c_op.T) > 1e-2


def test_monodromy_at_unit_point_homogeneous():
    rng = np.random.default_rng(4)
    model = sample_model(rng, n_sites=1, homogeneous=True)
    bp = sample_boundary(rng)
    mono = Chain(model, bp).monodromy(1.0)
    want = (bp.nu_minus + bp.nu_plus) * np.eye(4)
    assert np.max(np.abs(mono.mat - want)) < 1e-12


def test_transfer_matrices_commute():
    for seed, n in ((5, 2), (6, 3), (7, 4)):
        ch = make_chain(seed, n)
        rng = np.random.default_rng(seed + 50)
        u = sample_point(rng, ch.model)
        v = sample_point(rng, ch.model, avoid=(u,))
        tu, tv = ch.transfer(u), ch.transfer(v)
        assert rel_residual(tu @ tv, tv @ tu) < 1e-11


def test_static_exchange_relations(chain2):
    rng = np.random.default_rng(8)
    names = Chain.relation_names()
    assert len(names) == 12
    for name in names:
        for _ in range(2):
            u = sample_point(rng, chain2.model)
            v = sample_point(rng, chain2.model, avoid=(u,))
            assert chain2.check_commutation(name, u, v) < 1e-11, name


def test_unknown_relation_name_rejected(chain2):
    with pytest.raises(KeyError):
        chain2.check_commutation("exchange_bogus", 1.1, 1.2)


def test_triangular_boundary_annihilates_reference_state():
    rng = np.random.default_rng(9)
    model = sample_model(rng, n_sites=2)
    bp = sample_boundary(rng)
    tri = BoundaryParams.from_raw(
        eps_plus=bp.eps_plus, eps_minus=bp.eps_minus, kappa=bp.kappa,
        kappa_tilde=bp.kappa_tilde, nu_plus=bp.nu_plus, nu_minus=bp.nu_minus,
        tau=bp.tau, tau_tilde=0.0)
    ch = Chain(model, tri)
    up = np.zeros(4)
    up[0] = 1.0
    u = sample_point(rng, model)
    fam = ch.operator_family(u)
    assert np.linalg.norm(fam.c_op @ up) < 1e-13 * np.linalg.norm(fam.c_op)
    # one site: the reference state is an exact eigenvector of the diagonal
    # entry with eigenvalue k(u) * (site factor product)
    m1 = sample_model(np.random.default_rng(10), n_sites=1)
    f1 = Chain(m1, tri).operator_family(u)
    up1 = np.array([1.0, 0.0])
    got = f1.a @ up1
    want = k_minus(u, tri) * lambda_product(u, m1) * up1
    assert np.max(np.abs(got - want)) < 1e-12 * abs(want[0])


def test_hamiltonian_two_routes():
    for seed, n in ((11, 2), (12, 3)):
        ch = make_chain(seed, n, homogeneous=True)
        hd = ch.hamiltonian_direct()
        ht = ch.hamiltonian_from_transfer()
        assert np.linalg.norm(hd - ht) / np.linalg.norm(hd) < 1e-7


def test_near_diagonal_boundaries_nearly_conserve_magnetization():
    # Exactly diagonal boundaries are outside the generic regime, so probe
    # the approach: the magnetization-breaking couplings are quadratic in the
    # off-diagonal amplitudes, hence shrinking the amplitudes 10x must shrink
    # the commutator with total sigma^z by ~100x.
    rng = np.random.default_rng(13)
    model = sample_model(rng, n_sites=2, homogeneous=True)
    bp = sample_boundary(rng)
    Sz = pauli_on_site("z", 1, 2).mat + pauli_on_site("z", 2, 2).mat

    def comm_norm(amp):
        nd = BoundaryParams.from_raw(
            eps_plus=bp.eps_plus, eps_minus=bp.eps_minus, kappa=amp,
            kappa_tilde=amp, nu_plus=bp.nu_plus, nu_minus=bp.nu_minus,
            tau=amp, tau_tilde=amp)
        H = Chain(model, nd).hamiltonian_direct()
        return np.linalg.norm(H @ Sz - Sz @ H) / np.linalg.norm(H), H

    c_coarse, _ = comm_norm(3e-2)
    c_fine, H = comm_norm(3e-3)
    assert c_fine < 1e-4
    assert 50.0 < c_coarse / c_fine < 200.0
    # sector oracle: block-diagonalizing by magnetization reproduces the
    # spectrum of the nearly-conserving Hamiltonian
    diag = np.real(np.diag(Sz))
    full = np.sort_complex(np.linalg.eigvals(H))
    sector_vals = []
    for s in sorted(set(np.round(diag, 6))):
        idx = np.where(np.abs(diag - s) < 1e-9)[0]
        sector_vals.extend(np.linalg.eigvals(H[np.ix_(idx, idx)]))
    sector = np.sort_complex(np.array(sector_vals))
    assert np.max(np.abs(full - sector)) < 1e-5 * np.linalg.norm(H)


def test_hamiltonian_spatial_reflection_symmetry():
    # Reversing the chain and swapping the two boundaries' roles (diagonal
    # coefficients crosswise, off-diagonal amplitudes crosswise) reproduces
    # the same Hamiltonian exactly.
    rng = np.random.default_rng(14)
    model = sample_model(rng, n_sites=2, homogeneous=True)
    bp = sample_boundary(rng)
    H = Chain(model, bp).hamiltonian_direct()
    swapped = BoundaryParams.from_raw(
        eps_plus=bp.nu_minus, eps_minus=bp.nu_plus,
        nu_minus=bp.eps_plus, nu_plus=bp.eps_minus,
        kappa=bp.tau_tilde, kappa_tilde=bp.tau,
        tau=bp.kappa_tilde, tau_tilde=bp.kappa)
    H2 = Chain(model, swapped).hamiltonian_direct()
    P = np.zeros((4, 4))
    for i in range(2):
        for j in range(2):
            P[j * 2 + i, i * 2 + j] = 1.0
    assert np.linalg.norm(P @ H2 @ P - H) / np.linalg.norm(H) < 1e-12
