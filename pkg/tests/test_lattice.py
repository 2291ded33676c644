"""Tensor-leg operator algebra and the six-vertex R-matrix."""

import numpy as np
import pytest

from openxxz.lattice import PAULI, Op, identity, pauli_on_site, r_matrix, r_op, site_labels
from openxxz.maba import sample_point
from openxxz.params import sample_model
from openxxz.scalars import b, rel_residual

Q = 1.3 + 0.2j


def test_site_labels_are_one_based_strings():
    assert site_labels(3) == ("1", "2", "3")


def test_pauli_embeddings():
    z1 = pauli_on_site("z", 1, 2).mat
    assert np.array_equal(z1, np.diag([1, 1, -1, -1]).astype(complex))
    z2 = pauli_on_site("z", 2, 2).mat
    assert np.array_equal(z2, np.diag([1, -1, 1, -1]).astype(complex))
    plus = PAULI["+"]
    assert np.array_equal(plus, np.array([[0, 1], [0, 0]], dtype=complex))
    assert np.max(np.abs(plus @ plus)) == 0.0
    with pytest.raises(ValueError):
        pauli_on_site("z", 0, 2)  # sites are 1-based
    with pytest.raises(KeyError):
        pauli_on_site("bogus", 1, 2)


def test_r_matrix_at_unit_argument_is_permutation():
    P = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]],
                 dtype=complex)
    assert np.max(np.abs(r_matrix(1.0, Q) - P)) < 1e-15


def test_r_matrix_entries_at_reference_point():
    # u = 3, q = 2: corner entries b(qu) = b(6) = 35/9, middle b(u) = 16/9.
    R = r_matrix(3.0, 2.0)
    want = np.array([[35 / 9, 0, 0, 0],
                     [0, 16 / 9, 1, 0],
                     [0, 1, 16 / 9, 0],
                     [0, 0, 0, 35 / 9]], dtype=complex)
    assert np.max(np.abs(R - want)) < 1e-14


def test_r_matrix_inversion_relation():
    # R(u) R(1/u) = b(qu) b(q/u) * Id.
    rng = np.random.default_rng(0)
    model = sample_model(rng, n_sites=1)
    q = model.q
    for _ in range(5):
        u = sample_point(rng, model)
        RR = r_matrix(u, q) @ r_matrix(1 / u, q)
        want = b(q * u, q) * b(q / u, q) * np.eye(4)
        assert rel_residual(RR, want) < 1e-13


def test_yang_baxter_composition():
    rng = np.random.default_rng(1)
    model = sample_model(rng, n_sites=1)
    q = model.q
    layout = ("a", "b", "c")
    for _ in range(10):
        u1 = sample_point(rng, model)
        u2 = sample_point(rng, model, avoid=(u1,))
        u3 = sample_point(rng, model, avoid=(u1, u2))
        r12 = r_op(u1 / u2, q, "a", "b").embed(layout).mat
        r13 = r_op(u1 / u3, q, "a", "c").embed(layout).mat
        r23 = r_op(u2 / u3, q, "b", "c").embed(layout).mat
        assert rel_residual(r12 @ r13 @ r23, r23 @ r13 @ r12) < 1e-12


def test_tensor_embed_and_permute_against_kron():
    rng = np.random.default_rng(2)
    A = Op(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)), ("1",))
    B = Op(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)), ("2",))
    layout = ("1", "2")
    prod = A.embed(layout).mat @ B.embed(layout).mat
    assert np.max(np.abs(prod - np.kron(A.mat, B.mat))) < 1e-14
    # embedding into a permuted layout relocates the factor
    assert np.max(np.abs(A.embed(("2", "1")).mat - np.kron(np.eye(2), A.mat))) < 1e-14
    # permuted() re-sorts the legs of an existing operator
    AB = A.tensor(B)
    BA = AB.permuted(("2", "1"))
    assert np.max(np.abs(BA.mat - np.kron(B.mat, A.mat))) < 1e-14


def test_partial_trace_block_and_sandwich():
    rng = np.random.default_rng(3)
    A = Op(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)), ("a",))
    B = Op(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)), ("s",))
    AB = A.tensor(B)
    # tracing out "a" leaves tr(A) * B; identity traces to 2 * B
    assert np.max(np.abs(AB.ptrace("a").mat - np.trace(A.mat) * B.mat)) < 1e-14
    IB = identity(("a",)).tensor(B)
    assert np.max(np.abs(IB.ptrace("a").mat - 2.0 * B.mat)) < 1e-14
    # block extraction picks one auxiliary matrix element
    for i in range(2):
        for j in range(2):
            blk = AB.block("a", i, j)
            assert blk.spaces == ("s",)
            assert np.max(np.abs(blk.mat - A.mat[i, j] * B.mat)) < 1e-14
    # sandwiching with a row/column pair contracts the auxiliary leg fully
    row = np.array([1.0 + 0.5j, -0.3])
    col = np.array([0.7, 2.0 - 1.0j])
    got = AB.sandwich("a", row, col).mat
    want = (row @ A.mat @ col) * B.mat
    assert np.max(np.abs(got - want)) < 1e-13


def test_dim_and_norm():
    assert identity(("1", "2", "3")).dim == 8
    M = Op(np.array([[3.0, 0.0], [0.0, 4.0]], dtype=complex), ("1",))
    assert abs(M.norm() - 5.0) < 1e-14
