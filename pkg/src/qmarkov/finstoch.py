"""Classical engine: stochastic matrices, Bayes' rule, disintegration, and
the embedding into commutative algebras.

Entries are column-stochastic: f[y, x] is the probability of y given x.
When every input is rational (int, Fraction, or a "p/q" string) everything
is carried out in exact Fraction arithmetic, so the Bayes diagram
g_xy q_y = f_yx p_x is an identity, not an approximation.  Float inputs fall
back to the usual tolerance policy.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .algebra import AlgebraShape, AlgElement
from .channel import Channel, PropertyReport, _report
from .errors import DimensionMismatch
from .state import State, state_from_density
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "StochasticMatrix",
    "ProbVector",
    "stochastic",
    "prob_vector",
    "deterministic_kernel",
    "compose",
    "product",
    "push",
    "bayes_inverse",
    "ae_equal",
    "is_ae_deterministic",
    "embed",
    "embed_prob",
]


def _parse_entry(v):
    """Return (value, exact) where exact entries are Fractions."""
    if isinstance(v, Fraction):
        return v, True
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return Fraction(int(v)), True
    if isinstance(v, str):
        return Fraction(v), True
    if isinstance(v, (float, np.floating)):
        return float(v), False
    raise TypeError(f"unsupported entry type {type(v)!r}")


def _parse_array(rows):
    vals, exact = [], True
    for row in rows:
        out = []
        for v in row:
            x, ok = _parse_entry(v)
            exact = exact and ok
            out.append(x)
        vals.append(out)
    if exact:
        arr = np.empty((len(vals), len(vals[0]) if vals else 0), dtype=object)
        for i, row in enumerate(vals):
            for j, v in enumerate(row):
                arr[i, j] = v
        return arr, True
    return np.array([[float(v) for v in row] for row in vals], dtype=float), False


def _is_zero(v, exact: bool, tol: Tolerance) -> bool:
    return v == 0 if exact else abs(v) <= tol.eq


@dataclass(frozen=True)
class StochasticMatrix:
    """Column-stochastic kernel from a set of size n_cols to one of size n_rows."""

    entries: np.ndarray
    exact: bool

    @property
    def n_rows(self) -> int:
        return self.entries.shape[0]

    @property
    def n_cols(self) -> int:
        return self.entries.shape[1]

    def is_deterministic(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        """Every column is a 0/1 indicator."""
        for x in range(self.n_cols):
            col = self.entries[:, x]
            for v in col:
                near01 = v in (0, 1) if self.exact else min(abs(v), abs(v - 1)) <= tol.eq
                if not near01:
                    return False
        return True

    def column(self, x: int):
        return self.entries[:, x]


def stochastic(rows, tol: Tolerance = DEFAULT_TOL, validate: bool = True) -> StochasticMatrix:
    arr, exact = _parse_array(rows)
    if validate:
        for x in range(arr.shape[1]):
            col = arr[:, x]
            if any((v < 0) if exact else (v < -tol.eq) for v in col):
                raise ValueError(f"negative probability in column {x}")
            total = sum(col)
            ok = total == 1 if exact else abs(total - 1.0) <= tol.eq * max(1.0, abs(total))
            if not ok:
                raise ValueError(f"column {x} sums to {total}, expected 1")
    return StochasticMatrix(arr, exact)


@dataclass(frozen=True)
class ProbVector:
    """Probability vector with its nullset."""

    entries: np.ndarray
    exact: bool

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def nullset(self, tol: Tolerance = DEFAULT_TOL) -> list[int]:
        return [x for x, v in enumerate(self.entries) if _is_zero(v, self.exact, tol)]


def prob_vector(values, tol: Tolerance = DEFAULT_TOL, validate: bool = True) -> ProbVector:
    arr, exact = _parse_array([list(values)])
    vec = arr[0]
    if validate:
        if any((v < 0) if exact else (v < -tol.eq) for v in vec):
            raise ValueError("negative probability entry")
        total = sum(vec)
        ok = total == 1 if exact else abs(total - 1.0) <= tol.eq * max(1.0, abs(total))
        if not ok:
            raise ValueError(f"probabilities sum to {total}, expected 1")
    return ProbVector(vec.copy(), exact)


def deterministic_kernel(func, n_in: int, n_out: int) -> StochasticMatrix:
    """Kernel of a function {0..n_in-1} -> {0..n_out-1}, exact."""
    rows = [[Fraction(1) if func(x) == y else Fraction(0) for x in range(n_in)]
            for y in range(n_out)]
    return stochastic(rows)


def compose(g: StochasticMatrix, f: StochasticMatrix) -> StochasticMatrix:
    """Chapman-Kolmogorov composite g after f."""
    if g.n_cols != f.n_rows:
        raise DimensionMismatch(f"cannot compose {g.n_cols} columns with {f.n_rows} rows")
    if g.exact and f.exact:
        out = np.empty((g.n_rows, f.n_cols), dtype=object)
        for z in range(g.n_rows):
            for x in range(f.n_cols):
                out[z, x] = sum(g.entries[z, y] * f.entries[y, x] for y in range(f.n_rows))
        return StochasticMatrix(out, True)
    ge = np.asarray(g.entries, dtype=float)
    fe = np.asarray(f.entries, dtype=float)
    return StochasticMatrix(ge @ fe, False)


def product(f: StochasticMatrix, f2: StochasticMatrix) -> StochasticMatrix:
    """Kernel on product spaces, output pairs ordered first-factor major."""
    if f.exact and f2.exact:
        out = np.empty((f.n_rows * f2.n_rows, f.n_cols * f2.n_cols), dtype=object)
        for y in range(f.n_rows):
            for y2 in range(f2.n_rows):
                for x in range(f.n_cols):
                    for x2 in range(f2.n_cols):
                        out[y * f2.n_rows + y2, x * f2.n_cols + x2] = (
                            f.entries[y, x] * f2.entries[y2, x2]
                        )
        return StochasticMatrix(out, True)
    return StochasticMatrix(
        np.kron(np.asarray(f.entries, dtype=float), np.asarray(f2.entries, dtype=float)),
        False,
    )


def push(f: StochasticMatrix, p: ProbVector) -> ProbVector:
    """Pushforward measure (matrix times vector)."""
    if f.n_cols != p.size:
        raise DimensionMismatch(f"kernel has {f.n_cols} columns, measure has {p.size}")
    if f.exact and p.exact:
        vals = [sum(f.entries[y, x] * p.entries[x] for x in range(p.size))
                for y in range(f.n_rows)]
        out = np.empty(len(vals), dtype=object)
        for i, v in enumerate(vals):
            out[i] = v
        return ProbVector(out, True)
    fe = np.asarray(f.entries, dtype=float)
    pe = np.asarray(p.entries, dtype=float)
    return ProbVector(fe @ pe, False)


def bayes_inverse(f: StochasticMatrix, p: ProbVector, tol: Tolerance = DEFAULT_TOL) -> StochasticMatrix:
    """Bayes rule g_xy = f_yx p_x / q_y, with uniform columns on the nullset of q.

    The result satisfies g_xy q_y = f_yx p_x for every x, y (exactly in
    rational mode) and push(g, q) = p.
    """
    if f.n_cols != p.size:
        raise DimensionMismatch(f"kernel has {f.n_cols} columns, measure has {p.size}")
    q = push(f, p)
    n_x = p.size
    exact = f.exact and p.exact
    uniform = Fraction(1, n_x) if exact else 1.0 / n_x
    out = np.empty((n_x, f.n_rows), dtype=object if exact else float)
    for y in range(f.n_rows):
        if _is_zero(q.entries[y], q.exact, tol):
            for x in range(n_x):
                out[x, y] = uniform
        else:
            for x in range(n_x):
                out[x, y] = f.entries[y, x] * p.entries[x] / q.entries[y]
    return StochasticMatrix(out, exact)


def ae_equal(
    f: StochasticMatrix, h: StochasticMatrix, p: ProbVector, tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Column equality off the nullset of p."""
    if f.entries.shape != h.entries.shape:
        raise DimensionMismatch("kernels have different shapes")
    null = set(p.nullset(tol))
    for x in range(f.n_cols):
        if x in null:
            continue
        for y in range(f.n_rows):
            d = f.entries[y, x] - h.entries[y, x]
            if not _is_zero(d, f.exact and h.exact, tol):
                return _report(
                    "classical-ae-equal", False, tol.eq,
                    witness={"point": x, "outcome": y},
                    detail=f"columns differ at supported point {x}",
                )
    return _report("classical-ae-equal", True, tol.eq)


def is_ae_deterministic(
    f: StochasticMatrix, p: ProbVector, tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Every supported column is a 0/1 indicator."""
    null = set(p.nullset(tol))
    for x in range(f.n_cols):
        if x in null:
            continue
        for y in range(f.n_rows):
            v = f.entries[y, x]
            near01 = v in (0, 1) if f.exact else min(abs(v), abs(v - 1.0)) <= tol.eq
            if not near01:
                return _report(
                    "classical-ae-deterministic", False, tol.eq,
                    witness={"point": x, "outcome": y, "value": float(v)},
                    detail=f"column {x} is supported but not an indicator",
                )
    return _report("classical-ae-deterministic", True, tol.eq)


def embed(f: StochasticMatrix) -> Channel:
    """Faithful embedding as a channel between all-ones algebras.

    The kernel X -> Y becomes the unital positive map C^Y ~> C^X acting by
    (F phi)(x) = sum_y f_yx phi(y); on canonical coordinates the channel
    matrix is the transpose of the kernel.
    """
    dom = AlgebraShape((1,) * f.n_rows)
    cod = AlgebraShape((1,) * f.n_cols)
    mat = np.asarray(f.entries, dtype=float).T.astype(complex)
    return Channel(dom, cod, mat)


def embed_prob(p: ProbVector, tol: Tolerance = DEFAULT_TOL) -> State:
    """Probability vector as a diagonal density on the all-ones algebra."""
    s = AlgebraShape((1,) * p.size)
    blocks = tuple(np.array([[complex(v)]]) for v in np.asarray(p.entries, dtype=float))
    return state_from_density(AlgElement(s, blocks), tol)
