"""Doubled one-particle space H0 + H0 with conjugation, doublings, and
basis projections.

The doubled conjugation is Gamma(f, g) = (gamma g, gamma f).  A unitary U on
H0 doubles to the block-diagonal Bogoljubov unitary phi(U) = diag(U, gamma U
gamma); a symmetric generator A with gamma A gamma = A doubles to phi(A) =
diag(A, -A), which anticommutes with Gamma.  An orthoprojection P on H0
induces the basis projection Pi(f, g) = (P f, gamma Pperp gamma g), which
satisfies Pi + Gamma Pi Gamma = 1 exactly on the window.

All doubled operators used here are block-diagonal, so they are stored as
two window-sized blocks rather than one doubled matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fredholm_index, mode_space
from .mode_space import (GAMMA, ModeWindow, OneParticleOperator,
                         gamma_invariance_defect, projection_complement,
                         projection_defect, projection_nonneg)

ALGEBRAIC_TOL = 1e-12


@dataclass(frozen=True)
class DoubledVector:
    """Element (f, g) of the doubled space; both components live on one window."""

    window: ModeWindow
    top: np.ndarray
    bottom: np.ndarray

    def __post_init__(self):
        for part in (self.top, self.bottom):
            if np.asarray(part).shape != (self.window.dim,):
                raise ValueError("component length must equal the window dimension")

    @classmethod
    def of(cls, window: ModeWindow, top, bottom) -> "DoubledVector":
        return cls(window, np.asarray(top, dtype=complex), np.asarray(bottom, dtype=complex))

    def norm_sq(self) -> float:
        return float(np.vdot(self.top, self.top).real + np.vdot(self.bottom, self.bottom).real)

    def inner(self, other: "DoubledVector") -> complex:
        """<self, other>, antilinear in self."""
        return complex(np.vdot(self.top, other.top) + np.vdot(self.bottom, other.bottom))


class DoubledConjugation:
    """Gamma(f, g) = (gamma g, gamma f); antilinear involution."""

    def apply(self, v: DoubledVector) -> DoubledVector:
        return DoubledVector.of(v.window,
                                GAMMA.apply_vector(v.window, v.bottom),
                                GAMMA.apply_vector(v.window, v.top))


BIG_GAMMA = DoubledConjugation()


class DoubledOperator:
    """Block-diagonal operator diag(top_block, bottom_block) on H0 + H0."""

    __slots__ = ("window", "top_block", "bottom_block")

    def __init__(self, top_block: OneParticleOperator, bottom_block: OneParticleOperator):
        if top_block.window != bottom_block.window:
            raise ValueError("window mismatch between blocks")
        self.window = top_block.window
        self.top_block = top_block
        self.bottom_block = bottom_block

    def apply(self, v: DoubledVector) -> DoubledVector:
        return DoubledVector.of(v.window,
                                self.top_block.matrix @ v.top,
                                self.bottom_block.matrix @ v.bottom)

    def __matmul__(self, other: "DoubledOperator") -> "DoubledOperator":
        return DoubledOperator(self.top_block @ other.top_block,
                               self.bottom_block @ other.bottom_block)

    def conjugated_by_gamma(self) -> "DoubledOperator":
        """Gamma X Gamma for block-diagonal X: swaps and gamma-conjugates blocks."""
        return DoubledOperator(GAMMA.apply_operator(self.bottom_block),
                               GAMMA.apply_operator(self.top_block))

    def defect_from(self, other: "DoubledOperator") -> float:
        return float(max(np.abs(self.top_block.matrix - other.top_block.matrix).max(),
                         np.abs(self.bottom_block.matrix - other.bottom_block.matrix).max()))

    def scale(self, c) -> "DoubledOperator":
        return DoubledOperator(self.top_block.scale(c), self.bottom_block.scale(c))


def bogoljubov_double(u: OneParticleOperator) -> DoubledOperator:
    """phi(U) = diag(U, gamma U gamma); commutes with Gamma by construction."""
    if u.interior_unitarity_defect() > 1e-10:
        raise ValueError("input must be unitary on the window interior")
    phi = DoubledOperator(u, GAMMA.apply_operator(u))
    defect = phi.conjugated_by_gamma().defect_from(phi)
    if defect > ALGEBRAIC_TOL:
        raise AssertionError(f"Gamma phi Gamma != phi (defect {defect:.2e})")
    return phi


def antisym_double(a: OneParticleOperator) -> DoubledOperator:
    """phi(A) = diag(A, -A) for selfadjoint gamma-invariant generators."""
    if a.hermitian_defect() > ALGEBRAIC_TOL:
        raise ValueError("generator must be selfadjoint")
    if gamma_invariance_defect(a) > ALGEBRAIC_TOL:
        raise ValueError("generator must commute with gamma")
    phi = DoubledOperator(a, a.scale(-1.0))
    defect = phi.conjugated_by_gamma().defect_from(phi.scale(-1.0))
    if defect > ALGEBRAIC_TOL:
        raise AssertionError(f"Gamma phi(A) Gamma != -phi(A) (defect {defect:.2e})")
    return phi


class BasisProjectionData:
    """Pi(f,g) = (P f, gamma Pperp gamma g) induced by a projection P on H0."""

    def __init__(self, p: OneParticleOperator):
        defect = projection_defect(p)
        if defect > ALGEBRAIC_TOL:
            raise ValueError(f"P is not an orthoprojection (defect {defect:.2e})")
        self.p = p
        self.pi = DoubledOperator(
            p, GAMMA.apply_operator(projection_complement(p)))

    def idempotency_defect(self) -> float:
        sq = self.pi @ self.pi
        return max(sq.defect_from(self.pi),
                   float(np.abs(self.pi.top_block.matrix
                                - self.pi.top_block.matrix.conj().T).max()),
                   float(np.abs(self.pi.bottom_block.matrix
                                - self.pi.bottom_block.matrix.conj().T).max()))

    def basis_projection_defect(self) -> float:
        """|| Pi + Gamma Pi Gamma - 1 || on the doubled window."""
        refl = self.pi.conjugated_by_gamma()
        eye = np.eye(self.p.window.dim)
        return float(max(
            np.abs(self.pi.top_block.matrix + refl.top_block.matrix - eye).max(),
            np.abs(self.pi.bottom_block.matrix + refl.bottom_block.matrix - eye).max()))


def standard_basis_projection(window: ModeWindow) -> BasisProjectionData:
    """The Dirac-sea choice P = P_{>=0}."""
    return BasisProjectionData(projection_nonneg(window))


def commutes_with_projection(phi: DoubledOperator, pi: BasisProjectionData,
                             tol: float = 1e-10) -> bool:
    top = phi.top_block.matrix @ pi.pi.top_block.matrix \
        - pi.pi.top_block.matrix @ phi.top_block.matrix
    bot = phi.bottom_block.matrix @ pi.pi.bottom_block.matrix \
        - pi.pi.bottom_block.matrix @ phi.bottom_block.matrix
    return bool(max(np.abs(top).max(), np.abs(bot).max()) <= tol)


def implementability_check(u, window: ModeWindow | None = None) -> dict:
    """Implementability data for the doubling of a Toeplitz unitary.

    Reports the off-diagonal Hilbert-Schmidt norms with convergence flags and
    the two half-line indices, whose sum must vanish (the doubled compression
    Pi phi(U) Pi has index zero).
    """
    if isinstance(u, mode_space.LoopFunction):
        loop = u
    else:
        raise TypeError("implementability_check expects a LoopFunction")
    b = max(loop.bandwidth, 1)
    window = window or ModeWindow(2 * b + 8)
    op = mode_space.multiplication_operator(loop, window)
    p = projection_nonneg(window)
    upper, lower, converged = mode_space.hs_offdiag_norms(op, p)
    plus = fredholm_index.charge_index(loop, side=+1)
    minus = fredholm_index.charge_index(loop, side=-1)
    index_sum = plus.q + minus.q
    if plus.stable and minus.stable and index_sum != 0:
        raise AssertionError(
            f"index sum must vanish for implementable doublings, got {index_sum}")
    return {
        "hs_norm_upper": upper,
        "hs_norm_lower": lower,
        "hs_converged": converged,
        "index_nonneg": plus,
        "index_neg": minus,
        "index_sum": index_sum,
        "window": window.n_max,
    }
