"""Finite-dimensional *-algebra engine: generated algebras, commutants,
centers, and spectral grading by cyclic-group averaging.

Subspaces of d x d matrices are handled as orthonormal bases of vectorized
matrices (Hilbert-Schmidt geometry); rank decisions use SVD with a fixed
reconstruction tolerance.  The clock-and-shift pair U V U^{-1} = omega V is
the exact finite shadow of the rotation/shift system, and every structural
identity checked here (center = relative commutant, double commutant,
grading of spectral components) is exact in these models up to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-9


@dataclass(frozen=True)
class MatrixAlgebra:
    """A unital *-closed subspace of M_d given by an orthonormal basis."""

    ambient_dim: int
    generators: tuple
    basis: tuple  # orthonormal w.r.t. tr(X* Y)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, x: np.ndarray, tol: float = RANK_TOL) -> bool:
        return residual_from_span(self.basis, x) <= tol

    def closure_defect(self) -> float:
        """Largest residual of a product of basis elements from the span."""
        worst = 0.0
        for a in self.basis:
            for b in self.basis:
                worst = max(worst, residual_from_span(self.basis, a @ b))
        return worst


def _orthonormalize(mats, d, tol=RANK_TOL):
    if not mats:
        return []
    stack = np.stack([np.asarray(m, dtype=complex).reshape(d * d) for m in mats])
    u, s, vh = np.linalg.svd(stack, full_matrices=False)
    keep = s > tol * max(1.0, s[0])
    return [vh[i].reshape(d, d) for i in range(len(s)) if keep[i]]


def residual_from_span(basis, x, normalize=True):
    d = x.shape[0]
    v = np.asarray(x, dtype=complex).reshape(d * d)
    norm = np.linalg.norm(v)
    if norm == 0:
        return 0.0
    if normalize:
        v = v / norm
    for b in basis:
        bv = b.reshape(d * d)
        v = v - np.vdot(bv, v) * bv
    return float(np.linalg.norm(v))


def generated_algebra(gens, d: int | None = None) -> MatrixAlgebra:
    """Basis of the smallest unital *-algebra containing the generators.

    Iterates products of the current basis with the generator set (and its
    adjoints), orthonormalizing until the dimension stabilizes.
    """
    gens = [np.asarray(g, dtype=complex) for g in gens]
    if d is None:
        d = gens[0].shape[0] if gens else 1
    for g in gens:
        if g.shape != (d, d):
            raise ValueError("generators must be d x d")
    seed = [np.eye(d, dtype=complex)] + gens + [g.conj().T for g in gens]
    basis = _orthonormalize(seed, d)
    multipliers = gens + [g.conj().T for g in gens]
    while True:
        products = [b @ m for b in basis for m in multipliers]
        new_basis = _orthonormalize(list(basis) + products, d)
        if len(new_basis) == len(basis):
            alg = MatrixAlgebra(d, tuple(gens), tuple(new_basis))
            if alg.dim > d * d:
                raise ArithmeticError("algebra dimension exceeded d^2; orthonormalization failed")
            return alg
        basis = new_basis


def commutant(alg_or_gens, d: int | None = None) -> MatrixAlgebra:
    """Commutant (inside M_d) of an algebra or a generating set.

    Solves [X, G] = 0 for all generators as one stacked linear system; the
    kernel basis is automatically a unital *-algebra when the generating set
    is *-closed (it is made so here).
    """
    if isinstance(alg_or_gens, MatrixAlgebra):
        gens = list(alg_or_gens.generators) or list(alg_or_gens.basis)
        d = alg_or_gens.ambient_dim
    else:
        gens = [np.asarray(g, dtype=complex) for g in alg_or_gens]
        if d is None:
            d = gens[0].shape[0]
    gens = gens + [g.conj().T for g in gens]
    eye = np.eye(d)
    rows = [np.kron(g, eye) - np.kron(eye, g.T) for g in gens]  # vec(GX - XG)
    system = np.vstack(rows)
    _, s, vh = np.linalg.svd(system)
    tol = RANK_TOL * max(1.0, s[0] if len(s) else 1.0)
    null_dim = int(np.sum(s <= tol)) + (d * d - len(s) if len(s) < d * d else 0)
    kernel = vh[len(vh) - null_dim:] if null_dim else vh[:0]
    basis = _orthonormalize([v.reshape(d, d) for v in kernel], d)
    return MatrixAlgebra(d, tuple(), tuple(basis))


def intersect(a: MatrixAlgebra, b: MatrixAlgebra) -> MatrixAlgebra:
    """Intersection of two subspaces of M_d via projector spectra."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    d = a.ambient_dim
    pa = _span_projector(a.basis, d)
    pb = _span_projector(b.basis, d)
    vals, vecs = np.linalg.eigh(pa @ pb @ pa)
    keep = vals > 1 - 1e-7
    basis = _orthonormalize([vecs[:, i].reshape(d, d) for i in np.where(keep)[0]], d)
    return MatrixAlgebra(d, tuple(), tuple(basis))


def _span_projector(basis, d):
    if not basis:
        return np.zeros((d * d, d * d), dtype=complex)
    stack = np.stack([b.reshape(d * d) for b in basis])
    return stack.conj().T @ stack


def subspace_equal(a: MatrixAlgebra, b: MatrixAlgebra, tol: float = RANK_TOL) -> bool:
    """Mutual containment, by least-squares residuals against either span."""
    if a.dim != b.dim:
        return False
    return (max((residual_from_span(b.basis, x) for x in a.basis), default=0.0) <= tol
            and max((residual_from_span(a.basis, x) for x in b.basis), default=0.0) <= tol)


def center(alg: MatrixAlgebra) -> MatrixAlgebra:
    """Z(A) = A intersect A' (commutant taken inside the ambient M_d)."""
    return intersect(alg, commutant(alg))


def verify_center_identity(a_gens, f_gens, d: int) -> dict:
    """Report on Z(A) = A' intersect F with the two sides built independently.

    Also reports whether the span of the gauge generators among ``a_gens``
    (diagonal elements, when present) lands inside the center.
    """
    a = generated_algebra(a_gens, d)
    f = generated_algebra(f_gens, d)
    for g in a_gens:
        if residual_from_span(f.basis, np.asarray(g, dtype=complex)) > RANK_TOL:
            raise ValueError("a_gens must lie inside the F algebra")
    z = center(a)
    rel = intersect(commutant(a), f)
    equal = subspace_equal(z, rel)
    return {
        "z_dim": z.dim,
        "relative_commutant_dim": rel.dim,
        "equal": equal,
        "a_dim": a.dim,
        "f_dim": f.dim,
        "z": z,
        "relative_commutant": rel,
        "fixed_point_algebra": a,
    }


# ---------------------------------------------------------------------------
# clock-and-shift models and spectral grading
# ---------------------------------------------------------------------------

class ClockShiftModel:
    """U = diag(omega^j) (x) 1_K and the cyclic shift V (x) 1_K in M_{MK}.

    Satisfies U V U^{-1} = omega V exactly; the cyclic group {U^k} grades
    M_{MK} into spectral components, and the fixed-point algebra is the
    block-diagonal ring with K x K blocks.
    """

    def __init__(self, modulus: int, multiplicity: int = 1):
        if modulus < 2:
            raise ValueError("modulus must be >= 2")
        self.modulus = modulus
        self.multiplicity = multiplicity
        self.omega = np.exp(2j * np.pi / modulus)
        clock = np.diag(self.omega ** np.arange(modulus))
        shift = np.zeros((modulus, modulus), dtype=complex)
        for j in range(modulus):
            shift[(j + 1) % modulus, j] = 1.0
        eye_k = np.eye(multiplicity)
        self.clock = np.kron(clock, eye_k)
        self.shift = np.kron(shift, eye_k)
        self.dim = modulus * multiplicity

    def covariance_defect(self) -> float:
        lhs = self.clock @ self.shift @ np.linalg.inv(self.clock)
        return float(np.abs(lhs - self.omega * self.shift).max())

    def block_projection(self, n: int) -> np.ndarray:
        """E_n = (n-th diagonal cell) (x) 1_K."""
        e = np.zeros((self.modulus, self.modulus))
        e[n % self.modulus, n % self.modulus] = 1.0
        return np.kron(e, np.eye(self.multiplicity))

    def full_algebra_generators(self):
        """Clock, shift, and one multiplicity-space generator (when K > 1)."""
        gens = [self.clock, self.shift]
        if self.multiplicity > 1:
            cell = np.zeros((self.multiplicity, self.multiplicity))
            cell[0, 1] = 1.0
            gens.append(np.kron(np.eye(self.modulus), cell))
        return gens

    def fixed_point_generators(self):
        """Generators of the U-commutant inside the full algebra."""
        gens = [self.clock]
        if self.multiplicity > 1:
            cell = np.zeros((self.multiplicity, self.multiplicity))
            cell[0, 1] = 1.0
            gens.append(np.kron(np.eye(self.modulus), cell))
        return gens


def spectral_component(f_elem: np.ndarray, n: int, model: ClockShiftModel) -> np.ndarray:
    """Pi_n(F) = (1/M) sum_k omega^{-nk} U^k F U^{-k}; exact group averaging."""
    m = model.modulus
    u = model.clock
    acc = np.zeros_like(np.asarray(f_elem, dtype=complex))
    uk = np.eye(model.dim, dtype=complex)
    for k in range(m):
        acc += model.omega ** (-n * k) * (uk @ f_elem @ np.linalg.inv(uk))
        uk = uk @ u
    return acc / m


def grading_report(model: ClockShiftModel, f_elem: np.ndarray) -> dict:
    """Reconstruction and fixed-point
    checks for the spectral decomposition of one element."""
    m = model.modulus
    comps = {n: spectral_component(f_elem, n, model)
             for n in range(-(m // 2), m - m // 2)}
    total = sum(comps.values())
    recon = float(np.abs(total - f_elem).max())
    vinv = np.linalg.inv(model.shift)
    worst_fix = 0.0
    for n, comp in comps.items():
        shifted = comp @ np.linalg.matrix_power(vinv, n % m)
        commut = model.clock @ shifted - shifted @ model.clock
        worst_fix = max(worst_fix, float(np.abs(commut).max()))
    return {"reconstruction_defect": recon, "fixed_point_defect": worst_fix,
            "components": comps}
