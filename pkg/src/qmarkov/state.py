"""States, support projections, nullspaces, and almost-everywhere relations.

A state is stored by its density element for the unweighted trace pairing,
omega(A) = sum_x tr(rho_x A_x).  All a.e. relations are decided exactly on
the matrix-unit basis (they are linear or sesquilinear in their free
variables); nothing here is sampled.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import algebra as alg
from .algebra import AlgebraShape, AlgElement
from .channel import Channel, PropertyReport, _report, apply, hs_adjoint, is_star_preserving
from .errors import PullbackNotPSD, ShapeMismatch
from .linalg import herm_eig
from .tolerances import DEFAULT_TOL, Tolerance

__all__ = [
    "State",
    "state_from_density",
    "support",
    "pullback_state",
    "NullspaceTest",
    "ae_equal",
    "ae_deterministic",
    "ae_unital",
]


@dataclass(frozen=True)
class State:
    """Positive unital functional omega = tr(rho .) with cached support."""

    shape: AlgebraShape
    density: AlgElement
    support: AlgElement

    def __call__(self, a: AlgElement) -> complex:
        return self.expect(a)

    def expect(self, a: AlgElement) -> complex:
        if a.shape != self.shape:
            raise ShapeMismatch("element does not live on the state's algebra")
        return complex(
            sum(np.trace(r @ b) for r, b in zip(self.density.blocks, a.blocks))
        )


def _support_projection(density: AlgElement, tol: Tolerance) -> AlgElement:
    """Spectral projection onto eigenvalues above the rank cutoff.

    The cutoff is relative to the global largest eigenvalue across blocks so
    rank decisions are consistent between blocks of different scale.
    """
    eigs = []
    for b in density.blocks:
        w, u = herm_eig(0.5 * (b + b.conj().T), tol)
        eigs.append((w, u))
    lam_max = max((w[0] for w, _ in eigs if w.size), default=0.0)
    cutoff = tol.rank * max(lam_max, 0.0)
    projs = []
    for w, u in eigs:
        keep = w > cutoff
        cols = u[:, keep]
        projs.append(cols @ cols.conj().T)
    return AlgElement(density.shape, tuple(projs))


def state_from_density(density: AlgElement, tol: Tolerance = DEFAULT_TOL) -> State:
    """Validate a density element (PSD, unit trace) and build the state."""
    if not alg.is_positive_elem(density, tol):
        raise ValueError("density is not positive semidefinite within tolerance")
    tr = alg.trace(density)
    if abs(tr - 1.0) > tol.eq * tol.scale(abs(tr)):
        raise ValueError(f"density trace {tr} is not 1 within tolerance")
    return State(density.shape, density, _support_projection(density, tol))


def support(omega: State) -> AlgElement:
    """Smallest projection P with omega(PA) = omega(AP) = omega(A) for all A."""
    return omega.support


def pullback_state(omega: State, f: Channel, tol: Tolerance = DEFAULT_TOL) -> State:
    """Pull a state on the codomain back along a channel: density F*(rho).

    Raises PullbackNotPSD when the transported density fails positivity,
    which signals that f is not positive along the support of omega.
    """
    if omega.shape != f.codomain:
        raise ShapeMismatch("state must live on the channel codomain")
    sigma = apply(hs_adjoint(f), omega.density)
    sym = 0.5 * (sigma + alg.adjoint(sigma))
    dev = alg.norm(sigma - alg.adjoint(sigma))
    if dev > 2 * tol.herm * tol.scale(alg.norm(sigma)):
        raise PullbackNotPSD(f"pullback density has anti-self-adjoint part {dev:.3e}")
    if alg.min_eig(sym, tol) < -tol.psd * tol.scale(alg.norm(sym)):
        raise PullbackNotPSD("pullback density has a negative eigenvalue")
    tr = alg.trace(sym)
    if abs(tr - 1.0) > tol.eq * tol.scale(abs(tr)):
        raise PullbackNotPSD(f"pullback density has trace {tr}, expected 1")
    return State(sym.shape, sym, _support_projection(sym, tol))


@dataclass(frozen=True)
class NullspaceTest:
    """Membership test for the one-sided nullspaces of a state.

    side "right": A in N_omega  iff  A P = 0  (omega(A*A) = 0);
    side "left":  A in nullspace from the left  iff  P A = 0.
    """

    side: str
    state: State

    def __post_init__(self):
        _check_side(self.side)

    def contains(self, a: AlgElement, tol: Tolerance = DEFAULT_TOL) -> bool:
        p = self.state.support
        prod = alg.mul(a, p) if self.side == "right" else alg.mul(p, a)
        return alg.norm(prod) <= tol.eq * tol.scale(alg.norm(a))


def _check_side(side: str):
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _side_vanishes(x: AlgElement, p: AlgElement, side: str, tol: Tolerance, scale: float) -> bool:
    prod = alg.mul(x, p) if side == "right" else alg.mul(p, x)
    return alg.norm(prod) <= tol.eq * tol.scale(scale)


def ae_equal(
    f: Channel, g: Channel, omega: State, side: str = "right", tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Almost-everywhere equality of two channels relative to a state.

    Right variant: (F - G)(B) P_omega = 0 for every basis B (linearity makes
    the basis sufficient); left variant multiplies by the support from the
    left.
    """
    _check_side(side)
    if f.domain != g.domain or f.codomain != g.codomain:
        raise ShapeMismatch("channels must share domain and codomain")
    if omega.shape != f.codomain:
        raise ShapeMismatch("state must live on the common codomain")
    p = omega.support
    for e in alg.matrix_units(f.domain):
        fe, ge = apply(f, e), apply(g, e)
        diff = fe - ge
        scale = max(alg.norm(fe), alg.norm(ge))
        if not _side_vanishes(diff, p, side, tol, scale):
            return _report(
                f"ae-equal-{side}", False, tol.eq, witness={"input": e},
                detail="(F - G)(B) does not vanish on the support",
            )
    return _report(f"ae-equal-{side}", True, tol.eq)


def ae_deterministic(
    f: Channel, omega: State, side: str = "right", tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Multiplicativity on the support: F(B*C) P = F(B)* F(C) P on basis pairs.

    The expression is sesquilinear in (B, C), so matrix units suffice.  The
    left variant puts the support on the left of the same expression; the two
    verdicts agree for star-preserving channels.
    """
    _check_side(side)
    if omega.shape != f.codomain:
        raise ShapeMismatch("state must live on the channel codomain")
    if not is_star_preserving(f, tol).passed:
        warnings.warn(
            "ae_deterministic called on a non-star-preserving channel; "
            "left and right verdicts may differ",
            stacklevel=2,
        )
    p = omega.support
    units = alg.matrix_units(f.domain)
    images = [apply(f, e) for e in units]
    for a, ea in enumerate(units):
        fa_star = alg.adjoint(images[a])
        for b, eb in enumerate(units):
            lhs = apply(f, alg.mul(alg.adjoint(ea), eb))
            rhs = alg.mul(fa_star, images[b])
            scale = max(alg.norm(lhs), alg.norm(rhs))
            if not _side_vanishes(lhs - rhs, p, side, tol, scale):
                return _report(
                    f"ae-deterministic-{side}", False, tol.eq,
                    witness={"left_input": ea, "right_input": eb},
                    detail="F(B*C) != F(B)*F(C) on the support",
                )
    return _report(f"ae-deterministic-{side}", True, tol.eq)


def ae_unital(
    f: Channel, omega: State, side: str = "right", tol: Tolerance = DEFAULT_TOL
) -> PropertyReport:
    """Unitality on the support: F(1) P = P (right) or P F(1) = P (left)."""
    _check_side(side)
    if omega.shape != f.codomain:
        raise ShapeMismatch("state must live on the channel codomain")
    p = omega.support
    img = apply(f, alg.unit(f.domain))
    lhs = alg.mul(img, p) if side == "right" else alg.mul(p, img)
    if alg.elem_equal(lhs, p, tol):
        return _report(f"ae-unital-{side}", True, tol.eq)
    return _report(
        f"ae-unital-{side}", False, tol.eq,
        witness={"input": alg.unit(f.domain), "image_of_unit": img},
        detail="F(1) does not act as the identity on the support",
    )
