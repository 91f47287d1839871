"""Finite direct sums of matrix algebras and their structure maps.

An algebra is described by its block dimensions (n_1, ..., n_k); an element
is one complex n_i x n_i matrix per block.  The canonical coordinate basis
lists the matrix units block by block, row-major inside each block, which
fixes the vectorization used by every channel matrix in the library.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import NotSelfAdjoint, ShapeMismatch
from .linalg import herm_eig, op_norm
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "AlgebraShape",
    "AlgElement",
    "zero",
    "unit",
    "mul",
    "adjoint",
    "trace",
    "normalized_trace",
    "norm",
    "elem_equal",
    "vec",
    "unvec",
    "matrix_units",
    "basis_index",
    "tensor_shape",
    "tensor_elem",
    "is_positive_elem",
    "is_self_adjoint_elem",
    "block_embed",
    "random_element",
    "random_self_adjoint",
    "random_positive",
    "random_density",
]


@dataclass(frozen=True)
class AlgebraShape:
    """Block dimensions (n_1, ..., n_k) of a direct sum of matrix algebras."""

    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(int(n) for n in self.blocks)
        if len(blocks) < 1 or any(n < 1 for n in blocks):
            raise ValueError(f"invalid block dimensions {self.blocks}")
        object.__setattr__(self, "blocks", blocks)

    @property
    def coord_dim(self) -> int:
        return sum(n * n for n in self.blocks)

    @property
    def total_dim(self) -> int:
        """Dimension of the Hilbert space carrying the block-diagonal picture."""
        return sum(self.blocks)

    @property
    def is_commutative(self) -> bool:
        return all(n == 1 for n in self.blocks)

    def offsets(self) -> list[int]:
        """Coordinate offset of each block in the canonical basis."""
        offs, acc = [], 0
        for n in self.blocks:
            offs.append(acc)
            acc += n * n
        return offs

    def __repr__(self):
        return f"AlgebraShape({list(self.blocks)})"


def shape(*blocks: int) -> AlgebraShape:
    return AlgebraShape(tuple(blocks))


@dataclass(frozen=True)
class AlgElement:
    """Block-diagonal element of a direct sum of matrix algebras."""

    shape: AlgebraShape
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.blocks) != len(self.shape.blocks):
            raise ShapeMismatch("block count does not match shape")
        mats = []
        for n, b in zip(self.shape.blocks, self.blocks):
            m = np.asarray(b, dtype=complex)
            if m.shape != (n, n):
                raise ShapeMismatch(f"block of shape {m.shape}, expected ({n}, {n})")
            mats.append(m)
        object.__setattr__(self, "blocks", tuple(mats))

    def block(self, x: int) -> np.ndarray:
        return self.blocks[x]

    def __add__(self, other: "AlgElement") -> "AlgElement":
        _check_same_shape(self, other)
        return AlgElement(self.shape, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other: "AlgElement") -> "AlgElement":
        _check_same_shape(self, other)
        return AlgElement(self.shape, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, scalar: complex) -> "AlgElement":
        return AlgElement(self.shape, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __neg__(self) -> "AlgElement":
        return self * (-1.0)


def _check_same_shape(a: AlgElement, b: AlgElement):
    if a.shape != b.shape:
        raise ShapeMismatch(f"shapes {a.shape} and {b.shape} differ")


def zero(s: AlgebraShape) -> AlgElement:
    return AlgElement(s, tuple(np.zeros((n, n), dtype=complex) for n in s.blocks))


def unit(s: AlgebraShape) -> AlgElement:
    """Multiplicative identity (the image of the unit inclusion)."""
    return AlgElement(s, tuple(np.eye(n, dtype=complex) for n in s.blocks))


def mul(a: AlgElement, b: AlgElement) -> AlgElement:
    """Blockwise matrix product."""
    _check_same_shape(a, b)
    return AlgElement(a.shape, tuple(x @ y for x, y in zip(a.blocks, b.blocks)))


def adjoint(a: AlgElement) -> AlgElement:
    """Blockwise conjugate transpose (the involution)."""
    return AlgElement(a.shape, tuple(b.conj().T for b in a.blocks))


def trace(a: AlgElement) -> complex:
    """Unweighted trace, summed over blocks."""
    return complex(sum(np.trace(b) for b in a.blocks))


def normalized_trace(a: AlgElement) -> complex:
    """Trace divided by the total Hilbert-space dimension; a state on any shape."""
    return trace(a) / a.shape.total_dim


def norm(a: AlgElement) -> float:
    """Operator norm: the maximum of the blockwise operator norms."""
    return max(op_norm(b) for b in a.blocks)


def elem_equal(a: AlgElement, b: AlgElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    _check_same_shape(a, b)
    scale = tol.scale(max(norm(a), norm(b)))
    dev = max(np.max(np.abs(x - y)) if x.size else 0.0 for x, y in zip(a.blocks, b.blocks))
    return dev <= tol.eq * scale


def vec(a: AlgElement) -> np.ndarray:
    """Coordinates of a in the canonical matrix-unit basis (row-major per block)."""
    return np.concatenate([b.reshape(-1) for b in a.blocks])


def unvec(s: AlgebraShape, v: np.ndarray) -> AlgElement:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if v.size != s.coord_dim:
        raise ShapeMismatch(f"coordinate vector of length {v.size}, expected {s.coord_dim}")
    mats, pos = [], 0
    for n in s.blocks:
        mats.append(v[pos : pos + n * n].reshape(n, n))
        pos += n * n
    return AlgElement(s, tuple(mats))


def basis_index(s: AlgebraShape, block: int, i: int, j: int) -> int:
    """Coordinate index of the matrix unit E_ij in the given block."""
    return s.offsets()[block] + i * s.blocks[block] + j


def _basis_labels(s: AlgebraShape) -> Iterator[tuple[int, int, int]]:
    for x, n in enumerate(s.blocks):
        for i in range(n):
            for j in range(n):
                yield x, i, j


def matrix_units(s: AlgebraShape) -> list[AlgElement]:
    """All matrix units of the algebra in canonical coordinate order."""
    out = []
    for x, i, j in _basis_labels(s):
        e = zero(s)
        e.blocks[x][i, j] = 1.0
        out.append(e)
    return out


def tensor_shape(s1: AlgebraShape, s2: AlgebraShape) -> AlgebraShape:
    """Tensor product shape, block pairs ordered left-factor major."""
    return AlgebraShape(tuple(m * n for m in s1.blocks for n in s2.blocks))


def tensor_elem(a: AlgElement, b: AlgElement) -> AlgElement:
    """Kronecker product per block pair, in tensor_shape order."""
    mats = [np.kron(x, y) for x in a.blocks for y in b.blocks]
    return AlgElement(tensor_shape(a.shape, b.shape), tuple(mats))


def is_self_adjoint_elem(a: AlgElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    scale = tol.scale(norm(a))
    dev = max(np.max(np.abs(b - b.conj().T)) if b.size else 0.0 for b in a.blocks)
    return dev <= tol.herm * scale


def is_positive_elem(a: AlgElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether a is positive (equals some b*b), decided spectrally per block.

    Raises NotSelfAdjoint when a is not self-adjoint within tolerance.
    """
    if not is_self_adjoint_elem(a, tol):
        raise NotSelfAdjoint("element is not self-adjoint within tolerance")
    scale = tol.scale(norm(a))
    for b in a.blocks:
        w, _ = herm_eig(0.5 * (b + b.conj().T), tol)
        if w[-1] < -tol.psd * scale:
            return False
    return True


def min_eig(a: AlgElement, tol: Tolerance = DEFAULT_TOL) -> float:
    """Smallest eigenvalue across blocks of a self-adjoint element."""
    lows = []
    for b in a.blocks:
        w, _ = herm_eig(0.5 * (b + b.conj().T), tol)
        lows.append(w[-1])
    return float(min(lows))


def block_embed(a: AlgElement) -> np.ndarray:
    """Faithful block-diagonal matrix picture of a on the total Hilbert space."""
    n = a.shape.total_dim
    out = np.zeros((n, n), dtype=complex)
    pos = 0
    for b, k in zip(a.blocks, a.shape.blocks):
        out[pos : pos + k, pos : pos + k] = b
        pos += k
    return out


def random_element(s: AlgebraShape, rng: np.random.Generator) -> AlgElement:
    """Independent standard complex Gaussian entries in every block."""
    mats = tuple(
        rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) for n in s.blocks
    )
    return AlgElement(s, mats)


def random_self_adjoint(s: AlgebraShape, rng: np.random.Generator) -> AlgElement:
    m = random_element(s, rng)
    return 0.5 * (m + adjoint(m))


def random_positive(s: AlgebraShape, rng: np.random.Generator) -> AlgElement:
    m = random_element(s, rng)
    return mul(adjoint(m), m)


def random_density(s: AlgebraShape, rng: np.random.Generator) -> AlgElement:
    """Random faithful-in-expectation density: positive with unit total trace."""
    p = random_positive(s, rng)
    return p * (1.0 / trace(p).real)
