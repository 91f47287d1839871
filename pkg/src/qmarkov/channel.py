"""Linear maps between direct sums of matrix algebras.

A channel F: B ~> A is stored as its matrix on canonical coordinates, size
coord_dim(A) x coord_dim(B), acting in the Heisenberg picture (inputs are
observables on the domain algebra).  Exact, basis-reducible properties
(unitality, star-preservation, determinism, complete positivity via Choi
matrices) are decided on matrix units; plain positivity and Schwarz
positivity are only ever sampled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import algebra as alg
from .algebra import AlgebraShape, AlgElement
from .errors import DimensionMismatch, ShapeMismatch, Singular
from .linalg import herm_eig, op_norm
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "PropertyReport",
    "Channel",
    "channel_from_action",
    "identity_channel",
    "transpose_channel",
    "ad_channel",
    "conjugation_by",
    "kraus_channel",
    "mult_map",
    "unit_map",
    "apply",
    "compose",
    "tensor",
    "invert",
    "hs_adjoint",
    "choi",
    "is_cp",
    "is_unital",
    "is_star_preserving",
    "is_deterministic",
    "is_positive_sampled",
    "is_schwarz_sampled",
    "s_positivity_equation",
]


@dataclass
class PropertyReport:
    """Outcome of a single property check.

    verdict is "pass" (decided exactly on a basis), "sampled-pass" (random
    trials found no violation; not a proof), or "fail".  Fail verdicts carry
    a witness reproducing the violation.
    """

    prop: str
    verdict: str
    tolerance: float
    witness: dict | None = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict in ("pass", "sampled-pass")

    def to_dict(self) -> dict:
        out = {"property": self.prop, "verdict": self.verdict, "tolerance": self.tolerance}
        if self.detail:
            out["detail"] = self.detail
        if self.witness is not None:
            out["witness"] = {k: _jsonable(v) for k, v in self.witness.items()}
        return out


def _jsonable(v):
    if isinstance(v, np.ndarray):
        return [[[float(z.real), float(z.imag)] for z in row] for row in np.atleast_2d(v)]
    if isinstance(v, AlgElement):
        return [_jsonable(b) for b in v.blocks]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def _report(prop, ok, tol_used, witness=None, detail="", sampled=False) -> PropertyReport:
    if ok:
        return PropertyReport(prop, "sampled-pass" if sampled else "pass", tol_used, None, detail)
    return PropertyReport(prop, "fail", tol_used, witness, detail)


@dataclass
class Channel:
    """Linear map between algebras in matrix form, with memoized verdicts."""

    domain: AlgebraShape
    codomain: AlgebraShape
    matrix: np.ndarray
    _flags: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        want = (self.codomain.coord_dim, self.domain.coord_dim)
        if m.shape != want:
            raise ShapeMismatch(f"channel matrix is {m.shape}, expected {want}")
        self.matrix = m

    def __call__(self, a: AlgElement) -> AlgElement:
        return apply(self, a)

    def cached(self, key, compute: Callable[[], PropertyReport]) -> PropertyReport:
        if key not in self._flags:
            self._flags[key] = compute()
        return self._flags[key]


def channel_from_action(
    domain: AlgebraShape, codomain: AlgebraShape, action: Callable[[AlgElement], AlgElement]
) -> Channel:
    """Assemble the channel matrix by applying `action` to every matrix unit."""
    cols = []
    for e in alg.matrix_units(domain):
        out = action(e)
        if out.shape != codomain:
            raise ShapeMismatch("action output does not live in the stated codomain")
        cols.append(alg.vec(out))
    return Channel(domain, codomain, np.stack(cols, axis=1))


def identity_channel(s: AlgebraShape) -> Channel:
    return Channel(s, s, np.eye(s.coord_dim, dtype=complex))


def transpose_channel(s: AlgebraShape) -> Channel:
    """Blockwise transpose in the canonical basis."""
    return channel_from_action(
        s, s, lambda a: AlgElement(s, tuple(b.T.copy() for b in a.blocks))
    )


def ad_channel(v: np.ndarray) -> Channel:
    """Conjugation X |-> v X v* as a channel between single-block algebras.

    For v of shape (p, q) this maps M_q to M_p; v need not be square.
    """
    v = np.asarray(v, dtype=complex)
    p, q = v.shape
    dom, cod = AlgebraShape((q,)), AlgebraShape((p,))
    return channel_from_action(dom, cod, lambda a: AlgElement(cod, (v @ a.blocks[0] @ v.conj().T,)))


def conjugation_by(e: AlgElement) -> Channel:
    """Blockwise conjugation A |-> e A e* by an element of the same algebra."""
    s = e.shape
    return channel_from_action(s, s, lambda a: alg.mul(alg.mul(e, a), alg.adjoint(e)))


def kraus_channel(
    domain: AlgebraShape, codomain: AlgebraShape, kraus_ops: Sequence[np.ndarray]
) -> Channel:
    """Heisenberg-picture Kraus channel B |-> sum_i K_i* B K_i.

    Restricted to single-block domain and codomain; each K_i must be
    n_dom x n_cod.  The result is completely positive by construction.
    """
    if len(domain.blocks) != 1 or len(codomain.blocks) != 1:
        raise DimensionMismatch("Kraus form requires single-block domain and codomain")
    n, m = domain.blocks[0], codomain.blocks[0]
    ops = [np.asarray(k, dtype=complex) for k in kraus_ops]
    for k in ops:
        if k.shape != (n, m):
            raise DimensionMismatch(f"Kraus operator of shape {k.shape}, expected ({n}, {m})")

    def act(a: AlgElement) -> AlgElement:
        b = a.blocks[0]
        out = sum(k.conj().T @ b @ k for k in ops)
        return AlgElement(codomain, (out,))

    return channel_from_action(domain, codomain, act)


def mult_map(s: AlgebraShape) -> Channel:
    """Multiplication as a channel from the tensor square onto the algebra.

    Sends the coordinate vector of A (x) B to the coordinates of AB; on the
    tensor basis, E_ij^(x) (x) E_kl^(y) maps to delta_xy delta_jk E_il^(x).
    """
    dom = alg.tensor_shape(s, s)
    mat = np.zeros((s.coord_dim, dom.coord_dim), dtype=complex)
    cod_off = s.offsets()
    col = 0
    k = len(s.blocks)
    for x in range(k):
        m = s.blocks[x]
        for y in range(k):
            n = s.blocks[y]
            # tensor block (x, y) has dimension m*n; its unit at row (i,p), col (j,q)
            for i in range(m):
                for p in range(n):
                    for j in range(m):
                        for q in range(n):
                            if x == y and j == p:
                                mat[cod_off[x] + i * m + q, col] = 1.0
                            col += 1
    return Channel(dom, s, mat)


def unit_map(s: AlgebraShape) -> AlgElement:
    """The multiplicative unit (image of 1 under the unit inclusion)."""
    return alg.unit(s)


def apply(f: Channel, b: AlgElement) -> AlgElement:
    if b.shape != f.domain:
        raise ShapeMismatch("element does not live in the channel domain")
    return alg.unvec(f.codomain, f.matrix @ alg.vec(b))


def compose(f: Channel, g: Channel) -> Channel:
    """Composite f after g (apply g first)."""
    if g.codomain != f.domain:
        raise ShapeMismatch("codomain of the inner channel must match the outer domain")
    return Channel(g.domain, f.codomain, f.matrix @ g.matrix)


def tensor(f: Channel, g: Channel) -> Channel:
    """Tensor product channel acting as F (x) G on elementary tensors."""
    dom = alg.tensor_shape(f.domain, g.domain)
    cod = alg.tensor_shape(f.codomain, g.codomain)
    f_units = [apply(f, e) for e in alg.matrix_units(f.domain)]
    g_units = [apply(g, e) for e in alg.matrix_units(g.domain)]
    mat = np.zeros((cod.coord_dim, dom.coord_dim), dtype=complex)
    col = 0
    # tensor-domain units enumerate (x-block unit, y-block unit) pairs in
    # left-factor-major order matching tensor_shape
    dom_f_labels = list(alg._basis_labels(f.domain))
    dom_g_labels = list(alg._basis_labels(g.domain))
    idx_f = {lab: i for i, lab in enumerate(dom_f_labels)}
    idx_g = {lab: i for i, lab in enumerate(dom_g_labels)}
    for x, m in enumerate(f.domain.blocks):
        for y, n in enumerate(g.domain.blocks):
            for i in range(m):
                for p in range(n):
                    for j in range(m):
                        for q in range(n):
                            fa = f_units[idx_f[(x, i, j)]]
                            gb = g_units[idx_g[(y, p, q)]]
                            mat[:, col] = alg.vec(alg.tensor_elem(fa, gb))
                            col += 1
    return Channel(dom, cod, mat)


_COND_LIMIT = 1e12


def invert(f: Channel) -> Channel:
    """Inverse channel; raises Singular for non-square or ill-conditioned maps."""
    if f.domain.coord_dim != f.codomain.coord_dim:
        raise Singular("channel matrix is not square")
    cond = np.linalg.cond(f.matrix)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise Singular(f"condition estimate {cond:.3e} exceeds {_COND_LIMIT:.0e}")
    return Channel(f.codomain, f.domain, np.linalg.inv(f.matrix))


def hs_adjoint(f: Channel) -> Channel:
    """Adjoint for the unweighted trace pairing sum_x tr(A_x* B_x).

    The matrix-unit basis is orthonormal for this pairing, so the adjoint is
    the conjugate transpose of the channel matrix.
    """
    return Channel(f.codomain, f.domain, f.matrix.conj().T)


def choi(f: Channel) -> list[np.ndarray]:
    """One Choi matrix per domain block y: sum_ij E_ij (x) F(E_ij).

    Each matrix lives on M_{n_y} (x) codomain, with the codomain realized
    block-diagonally on its total Hilbert space; F is CP iff every one of
    them is positive semidefinite.
    """
    out = []
    ncod = f.codomain.total_dim
    for y, n in enumerate(f.domain.blocks):
        c = np.zeros((n * ncod, n * ncod), dtype=complex)
        for i in range(n):
            for j in range(n):
                e = alg.zero(f.domain)
                e.blocks[y][i, j] = 1.0
                img = alg.block_embed(apply(f, e))
                eij = np.zeros((n, n), dtype=complex)
                eij[i, j] = 1.0
                c += np.kron(eij, img)
        out.append(c)
    return out


def is_cp(f: Channel, tol: Tolerance = DEFAULT_TOL) -> PropertyReport:
    """Complete positivity via the blockwise Choi matrices.

    A CP map has Hermitian PSD Choi matrices, so a non-Hermitian Choi block
    fails outright; otherwise the verdict is the minimum eigenvalue test.
    """

    def compute():
        for y, c in enumerate(choi(f)):
            scale = tol.scale(op_norm(c))
            skew = np.max(np.abs(c - c.conj().T)) if c.size else 0.0
            herm_part = 0.5 * (c + c.conj().T)
            w, _ = herm_eig(herm_part, tol)
            if skew > tol.herm * scale:
                return _report(
                    "cp",
                    False,
                    tol.psd,
                    witness={"domain_block": y, "skew_norm": float(skew),
                             "min_eigenvalue": float(w[-1])},
                    detail=f"Choi matrix of domain block {y} is not Hermitian "
                           f"(skew {skew:.3g}); Hermitian part has eigenvalue {w[-1]:.6g}",
                )
            if w[-1] < -tol.psd * scale:
                return _report(
                    "cp",
                    False,
                    tol.psd,
                    witness={"domain_block": y, "min_eigenvalue": float(w[-1])},
                    detail=f"Choi matrix of domain block {y} has eigenvalue {w[-1]:.6g}",
                )
        return _report("cp", True, tol.psd)

    return f.cached(("cp", tol.psd), compute)


def is_unital(f: Channel, tol: Tolerance = DEFAULT_TOL) -> PropertyReport:
    def compute():
        img = apply(f, alg.unit(f.domain))
        one = alg.unit(f.codomain)
        if alg.elem_equal(img, one, tol):
            return _report("unital", True, tol.eq)
        return _report(
            "unital", False, tol.eq, witness={"image_of_unit": img},
            detail="F(1) differs from 1",
        )

    return f.cached(("unital", tol.eq), compute)


def is_star_preserving(f: Channel, tol: Tolerance = DEFAULT_TOL) -> PropertyReport:
    """F(B*) = F(B)* for all B, checked on matrix units."""

    def compute():
        units = alg.matrix_units(f.domain)
        for e in units:
            lhs = apply(f, alg.adjoint(e))
            rhs = alg.adjoint(apply(f, e))
            if not alg.elem_equal(lhs, rhs, tol):
                return _report(
                    "star-preserving", False, tol.eq, witness={"input": e},
                    detail="F(E*) != F(E)* on a matrix unit",
                )
        return _report("star-preserving", True, tol.eq)

    return f.cached(("star", tol.eq), compute)


def is_deterministic(f: Channel, tol: Tolerance = DEFAULT_TOL) -> PropertyReport:
    """Star-preservation plus multiplicativity on all basis pairs."""

    def compute():
        star = is_star_preserving(f, tol)
        if not star.passed:
            return _report(
                "deterministic", False, tol.eq, witness=star.witness,
                detail="not star-preserving",
            )
        units = alg.matrix_units(f.domain)
        images = [apply(f, e) for e in units]
        for a, ea in enumerate(units):
            for b, eb in enumerate(units):
                lhs = apply(f, alg.mul(ea, eb))
                rhs = alg.mul(images[a], images[b])
                if not alg.elem_equal(lhs, rhs, tol):
                    return _report(
                        "deterministic", False, tol.eq,
                        witness={"left_input": ea, "right_input": eb},
                        detail="F(Ea Eb) != F(Ea) F(Eb)",
                    )
        return _report("deterministic", True, tol.eq)

    return f.cached(("deterministic", tol.eq), compute)


def _sampled_check(f, prop, trials, seed, tol, violation) -> PropertyReport:
    rng = np.random.default_rng(seed)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    for t in range(trials):
        b = alg.random_element(f.domain, rng)
        bad = violation(b)
        if bad is not None:
            return _report(
                prop, False, tol.psd, witness={"trial": t, "input": b, **bad},
                detail=f"violation found at trial {t}",
            )
    return _report(prop, True, tol.psd, detail=f"{trials} trials", sampled=True)


def is_positive_sampled(
    f: Channel, trials: int = 64, seed: int = 0, tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Sampled check that F maps positive elements to positive elements."""

    def violation(b):
        arg = alg.mul(alg.adjoint(b), b)
        out = apply(f, arg)
        scale = tol.scale(alg.norm(out))
        if not alg.is_self_adjoint_elem(out, tol):
            return {"reason": "image of a positive element is not self-adjoint"}
        low = alg.min_eig(out, tol)
        if low < -tol.psd * scale:
            return {"reason": "negative eigenvalue", "min_eigenvalue": low}
        return None

    return _sampled_check(f, "positive", trials, seed, tol, violation)


def is_schwarz_sampled(
    f: Channel, trials: int = 64, seed: int = 0, tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Sampled Kadison-Schwarz check F(B*B) >= ||F(1)|| F(B)* F(B)."""
    unit_norm = alg.norm(apply(f, alg.unit(f.domain)))

    def violation(b):
        fb = apply(f, b)
        gap = apply(f, alg.mul(alg.adjoint(b), b)) - unit_norm * alg.mul(alg.adjoint(fb), fb)
        scale = tol.scale(alg.norm(gap))
        if not alg.is_self_adjoint_elem(gap, tol):
            return {"reason": "Schwarz gap is not self-adjoint"}
        low = alg.min_eig(gap, tol)
        if low < -tol.psd * scale:
            return {"reason": "Schwarz inequality violated", "min_eigenvalue": low}
        return None

    return _sampled_check(f, "schwarz", trials, seed, tol, violation)


def s_positivity_equation(
    f: Channel, g: Channel, tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Check F(G(C) B) = F(G(C)) F(B) on all basis pairs.

    This is the equational consequence that holds for Schwarz-positive unital
    F, G whenever the composite F o G is deterministic.
    """
    if g.codomain != f.domain:
        raise ShapeMismatch("channels are not composable")
    c_units = alg.matrix_units(g.domain)
    b_units = alg.matrix_units(f.domain)
    for ci, c in enumerate(c_units):
        gc = apply(g, c)
        fgc = apply(f, gc)
        for bi, b in enumerate(b_units):
            lhs = apply(f, alg.mul(gc, b))
            rhs = alg.mul(fgc, apply(f, b))
            if not alg.elem_equal(lhs, rhs, tol):
                return _report(
                    "s-positivity-equation", False, tol.eq,
                    witness={"outer_input": c, "inner_input": b,
                             "outer_index": ci, "inner_index": bi},
                    detail="F(G(C) B) != F(G(C)) F(B)",
                )
    return _report("s-positivity-equation", True, tol.eq)
