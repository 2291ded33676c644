"""Gauge layer: frame (co)vectors, intertwining, dynamical operator family,
functional relations, string actions."""

import numpy as np
import pytest

from openxxz.gauge import (ACTION_NAMES, DYNAMICAL_NAMES, FUNCTIONAL_NAMES,
                           INTERTWINING_NAMES, GaugedChain, check_closure,
                           check_intertwining, check_scalar_products, x_covec,
                           x_vec, y_covec, y_vec)
from openxxz.maba import sample_point, sample_roots
from openxxz.params import sample_frame
from openxxz.scalars import rel_residual

from conftest import make_chain


def test_frame_vector_scalar_products_and_closure():
    rng = np.random.default_rng(0)
    q = 1.21 + 0.33j
    for m in (-1, 0, 2):
        frame = sample_frame(rng, q, 3)
        u = complex(*rng.normal(size=2)) + 1.4
        assert check_scalar_products(u, m, frame, q) < 1e-12
        assert check_closure(u, m, frame, q) < 1e-12


def test_intertwining_relations():
    rng = np.random.default_rng(1)
    q = 1.21 + 0.33j
    assert len(INTERTWINING_NAMES) == 8
    for _ in range(2):
        frame = sample_frame(rng, q, 2)
        m = int(rng.integers(-1, 3))
        u = complex(*rng.normal(size=2)) + 1.3
        v = complex(*rng.normal(size=2)) + 0.9
        for name in INTERTWINING_NAMES:
            assert check_intertwining(name, u, v, m, frame, q) < 1e-11, name


def test_vector_covector_pairings():
    # Same-index pairings vanish; index-shifted cross pairings equal one.
    rng = np.random.default_rng(2)
    q = 1.17 - 0.28j
    frame = sample_frame(rng, q, 1)
    u, m = 1.35 + 0.41j, 1
    assert x_covec(u, m, frame, q).shape == (2,)
    assert y_vec(u, m, frame, q).shape == (2,)
    assert abs(x_covec(u, m, frame, q) @ x_vec(u, m, frame, q)) < 1e-13
    assert abs(y_covec(u, m, frame, q) @ y_vec(u, m, frame, q)) < 1e-13
    assert abs(x_covec(u, m + 1, frame, q) @ y_vec(u, m - 1, frame, q) - 1.0) < 1e-12
    assert abs(y_covec(u, m - 1, frame, q) @ x_vec(u, m + 1, frame, q) - 1.0) < 1e-12


def test_dynamical_family_two_routes():
    for seed, n in ((3, 1), (4, 2)):
        ch = make_chain(seed, n)
        rng = np.random.default_rng(seed + 20)
        frame = sample_frame(rng, ch.model.q, n)
        gch = GaugedChain(ch, frame)
        for m in (0, 1):
            u = sample_point(rng, ch.model)
            assert gch.check_route_equivalence(u, m) < 1e-11
            da = gch.dyn(u, m)
            db = gch.dyn_from_static(u, m)
            for field in ("a", "b_op", "c_op", "d", "a_hat", "d_hat"):
                assert rel_residual(getattr(da, field), getattr(db, field)) < 1e-11


def test_transfer_decompositions(chain2):
    rng = np.random.default_rng(5)
    frame = sample_frame(rng, chain2.model.q, 2)
    gch = GaugedChain(chain2, frame)
    for m in (-1, 0, 2):
        u = sample_point(rng, chain2.model)
        assert gch.decomposition_residual(u, m) < 1e-11
        assert gch.decomposition_residual(u, m, hat=True) < 1e-11
        # the four decomposition pieces are full-size operators and the two
        # routes to them (plain and hatted) describe the same transfer matrix
        for piece in (gch.t_diag(u, m), gch.t_phase(u, m),
                      gch.t_diag_hat(u, m), gch.t_phase_hat(u, m)):
            assert piece.shape == (4, 4)


def test_dynamical_exchange_relations(chain2):
    rng = np.random.default_rng(6)
    assert len(DYNAMICAL_NAMES) == 6
    frame = sample_frame(rng, chain2.model.q, 2)
    gch = GaugedChain(chain2, frame)
    for name in DYNAMICAL_NAMES:
        for _ in range(2):
            u = sample_point(rng, chain2.model)
            v = sample_point(rng, chain2.model, avoid=(u,))
            m = int(rng.integers(-1, 2))
            assert gch.check_dynamical(name, u, v, m) < 1e-10, name


def test_functional_relations(chain2):
    rng = np.random.default_rng(7)
    assert len(FUNCTIONAL_NAMES) == 8
    frame = sample_frame(rng, chain2.model.q, 2)
    gch = GaugedChain(chain2, frame)
    for name in FUNCTIONAL_NAMES:
        u = sample_point(rng, chain2.model)
        v = sample_point(rng, chain2.model, avoid=(u,))
        assert gch.check_functional(name, u, v, 1) < 1e-11, name


def test_string_identity_and_permutation_invariance(chain2):
    rng = np.random.default_rng(8)
    frame = sample_frame(rng, chain2.model.q, 2)
    gch = GaugedChain(chain2, frame)
    # the empty string is the identity in any frame
    empty = gch.string_b((), 0)
    assert np.max(np.abs(empty - np.eye(4))) < 1e-14
    assert np.max(np.abs(gch.string_c((), 0) - np.eye(4))) < 1e-14
    # reordering the string arguments leaves the product invariant
    us = sample_roots(rng, 2, chain2.model).roots
    m = 1
    fwd = gch.string_b(us, m)
    rev = gch.string_b(us[::-1], m)
    assert rel_residual(fwd, rev) < 1e-12
    fwd_c = gch.string_c(us, m)
    rev_c = gch.string_c(us[::-1], m)
    assert rel_residual(fwd_c, rev_c) < 1e-12


def test_string_replacement_matches_direct_product(chain2):
    rng = np.random.default_rng(9)
    frame = sample_frame(rng, chain2.model.q, 2)
    gch = GaugedChain(chain2, frame)
    us = sample_roots(rng, 2, chain2.model).roots
    w = sample_point(rng, chain2.model, avoid=us)
    m = 0
    replaced = gch.string_b_replaced(us, 0, w, m)
    direct = gch.string_b((w, us[1]), m)
    assert rel_residual(replaced, direct) < 1e-12
    replaced_c = gch.string_c_replaced(us, 1, w, m)
    direct_c = gch.string_c((us[0], w), m)
    assert rel_residual(replaced_c, direct_c) < 1e-12


def test_string_action_identities():
    for seed, n in ((10, 1), (11, 2)):
        ch = make_chain(seed, n)
        rng = np.random.default_rng(seed + 30)
        frame = sample_frame(rng, ch.model.q, n)
        gch = GaugedChain(ch, frame)
        assert len(ACTION_NAMES) == 6
        for M in (1, 2):
            us = sample_roots(rng, M, ch.model).roots
            u = sample_point(rng, ch.model, avoid=us)
            for name in ACTION_NAMES:
                assert gch.check_action(name, u, us, 0) < 1e-10, (name, M)
