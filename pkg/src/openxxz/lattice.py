"""Dense tensor-leg operators with named two-dimensional spaces.

Operators are stored as full matrices over an ordered tuple of space labels,
each space being C^2.  The row (and column) multi-index runs over the labels
left to right, most significant first, i.e. plain Kronecker order.  All
bookkeeping (embedding, reordering, partial traces, single-space blocks) goes
through the labels so that no call site ever counts tensor legs by hand.

Sizes stay tiny (at most 2**8 = 256), so everything is dense complex128.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Basis convention: index 0 is spin up, (1, 0) the "all up" local vector.
PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
    "id": np.eye(2, dtype=complex),
}


@dataclass(frozen=True)
class Op:
    """A dense linear operator acting on an ordered set of labeled C^2 spaces."""

    mat: np.ndarray
    spaces: tuple[str, ...]

    def __post_init__(self):
        spaces = tuple(self.spaces)
        object.__setattr__(self, "spaces", spaces)
        mat = np.asarray(self.mat, dtype=complex)
        object.__setattr__(self, "mat", mat)
        dim = 2 ** len(spaces)
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} does not match "
                             f"{len(spaces)} spaces")
        if len(set(spaces)) != len(spaces):
            raise ValueError(f"duplicate space labels in {spaces}")

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "Op") -> "Op":
        return Op(self.mat + other.permuted(self.spaces).mat, self.spaces)

    def __sub__(self, other: "Op") -> "Op":
        return Op(self.mat - other.permuted(self.spaces).mat, self.spaces)

    def __mul__(self, scalar) -> "Op":
        return Op(self.mat * complex(scalar), self.spaces)

    __rmul__ = __mul__

    def __neg__(self) -> "Op":
        return Op(-self.mat, self.spaces)

    def __matmul__(self, other: "Op") -> "Op":
        """Operator composition; the smaller layout is padded by identity."""
        if set(other.spaces) <= set(self.spaces):
            return Op(self.mat @ other.embed(self.spaces).mat, self.spaces)
        if set(self.spaces) < set(other.spaces):
            return Op(self.embed(other.spaces).mat @ other.permuted(other.spaces).mat,
                      other.spaces)
        raise ValueError(f"layouts {self.spaces} and {other.spaces} are not nested")

    # -- layout handling ---------------------------------------------------

    def permuted(self, spaces: tuple[str, ...]) -> "Op":
        """Reorder tensor legs into the given label order (same label set)."""
        spaces = tuple(spaces)
        if spaces == self.spaces:
            return self
        if set(spaces) != set(self.spaces):
            raise ValueError(f"layouts differ: {self.spaces} vs {spaces}")
        n = len(spaces)
        perm = [self.spaces.index(s) for s in spaces]
        t = self.mat.reshape((2,) * (2 * n))
        t = t.transpose(perm + [n + p for p in perm])
        return Op(t.reshape(2**n, 2**n), spaces)

    def embed(self, spaces: tuple[str, ...]) -> "Op":
        """Extend by identity onto the larger labeled layout."""
        spaces = tuple(spaces)
        missing = [s for s in spaces if s not in self.spaces]
        extra = [s for s in self.spaces if s not in spaces]
        if extra:
            raise ValueError(f"target layout {spaces} lacks legs {extra}")
        big = np.kron(self.mat, np.eye(2 ** len(missing), dtype=complex))
        return Op(big, self.spaces + tuple(missing)).permuted(spaces)

    def tensor(self, other: "Op") -> "Op":
        overlap = set(self.spaces) & set(other.spaces)
        if overlap:
            raise ValueError(f"tensor factors share labels {overlap}")
        return Op(np.kron(self.mat, other.mat), self.spaces + other.spaces)

    # -- contractions ------------------------------------------------------

    def _axis(self, space: str) -> int:
        try:
            return self.spaces.index(space)
        except ValueError:
            raise KeyError(f"no space {space!r} in layout {self.spaces}") from None

    def ptrace(self, space: str) -> "Op":
        """Partial trace over one labeled space."""
        n = len(self.spaces)
        ax = self._axis(space)
        t = self.mat.reshape((2,) * (2 * n))
        t = np.trace(t, axis1=ax, axis2=n + ax)
        rest = tuple(s for s in self.spaces if s != space)
        return Op(t.reshape(2 ** (n - 1), 2 ** (n - 1)), rest)

    def block(self, space: str, i: int, j: int) -> "Op":
        """The operator <i|_space . |j>_space on the remaining legs."""
        n = len(self.spaces)
        ax = self._axis(space)
        t = self.mat.reshape((2,) * (2 * n))
        t = np.take(np.take(t, i, axis=ax), j, axis=n + ax - 1)
        rest = tuple(s for s in self.spaces if s != space)
        return Op(t.reshape(2 ** (n - 1), 2 ** (n - 1)), rest)

    def sandwich(self, space: str, row: np.ndarray, col: np.ndarray) -> "Op":
        """Contract one space with a row covector and a column vector."""
        row = np.asarray(row, dtype=complex).reshape(2)
        col = np.asarray(col, dtype=complex).reshape(2)
        acc = None
        for i in range(2):
            for j in range(2):
                term = row[i] * col[j] * self.block(space, i, j).mat
                acc = term if acc is None else acc + term
        rest = tuple(s for s in self.spaces if s != space)
        return Op(acc, rest)

    # -- misc ---------------------------------------------------------------

    def norm(self) -> float:
        return float(np.linalg.norm(self.mat))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]


def identity(spaces: tuple[str, ...]) -> Op:
    return Op(np.eye(2 ** len(spaces), dtype=complex), tuple(spaces))


def site_labels(n_sites: int) -> tuple[str, ...]:
    """Quantum-space labels: "1" ... "N"."""
    return tuple(str(i + 1) for i in range(n_sites))


def pauli_on_site(which: str, site: int, n_sites: int) -> Op:
    """sigma^which acting on one site of the chain (sites count from 1)."""
    single = Op(PAULI[which], (str(site),))
    return single.embed(site_labels(n_sites))


def r_matrix(u: complex, q: complex) -> np.ndarray:
    """Six-vertex trigonometric R-matrix on C^2 x C^2.

    Diagonal corners b(qu), inner 2x2 block [[b(u), 1], [1, b(u)]].
    At u = 1 it reduces to the permutation operator.
    """
    from .scalars import b

    bu = b(u, q)
    bqu = b(q * u, q)
    return np.array([
        [bqu, 0, 0, 0],
        [0, bu, 1, 0],
        [0, 1, bu, 0],
        [0, 0, 0, bqu],
    ], dtype=complex)


def r_op(u: complex, q: complex, space_a: str, space_b: str) -> Op:
    """R acting on the ordered pair of labeled spaces (space_a, space_b)."""
    return Op(r_matrix(u, q), (space_a, space_b))


PERMUTATION = np.array([
    [1, 0, 0, 0],
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [0, 0, 0, 1],
], dtype=complex)

# Antisymmetrizer on two legs, projector normalization.
ANTISYMMETRIZER = (np.eye(4, dtype=complex) - PERMUTATION) / 2.0
