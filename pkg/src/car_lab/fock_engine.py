"""Sparse fermionic Fock space over windowed modes with a Dirac-sea vacuum.

Basis states are occupation bitmasks over the modes [-n_max, n_max]; the
vacuum fills every negative mode.  Fermionic signs follow the ordered-string
convention: acting at a mode picks up the parity of the occupied modes below
it, which makes a basis mask the increasing-order product of creation
operators applied to the empty state.

The module provides the CAR field operators, normal-ordered bilinears
(currents), the charge rotation and shift implementers, the Schwinger-term
commutator on the margin-safe neutral sector, Weyl exponentials with their
central phases, the positivity report for the implemented circle action, and
a least-squares intertwining solver for generic implementable loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sparse
import scipy.sparse.linalg as spla

from . import fredholm_index
from .errors import InsufficientWindowError, InternalConsistencyError, MarginExhaustedError
from .mode_space import (LoopFunction, ModeWindow, OneParticleOperator,
                         interior_columns_defect, multiplication_operator,
                         schwinger_form)
from .selfdual_car import DoubledVector

SECTOR_CAP = 1 << 16


@lru_cache(maxsize=8)
def fock_space(n_max: int) -> "FockSpace":
    return FockSpace(n_max)


class FockSpace:
    """Occupation space over the mode window [-n_max, n_max]."""

    def __init__(self, n_max: int):
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        self.n_max = n_max
        self.n_modes = 2 * n_max + 1
        self.dim = 1 << self.n_modes
        self.window = ModeWindow(n_max)
        states = np.arange(self.dim, dtype=np.int64)
        self.states = states
        # bit b holds mode b - n_max; sea = all negative modes occupied
        self.sea_mask = (1 << n_max) - 1
        occ = ((states[:, None] >> np.arange(self.n_modes)[None, :]) & 1).astype(np.int64)
        modes = np.arange(-n_max, n_max + 1)
        self.charge = occ[:, modes >= 0].sum(axis=1) - (1 - occ[:, modes < 0]).sum(axis=1)
        self.energy = occ[:, modes >= 0] @ modes[modes >= 0] \
            + (1 - occ[:, modes < 0]) @ (-modes[modes < 0])
        self._c_cache = {}

    def bit(self, mode: int) -> int:
        if abs(mode) > self.n_max:
            raise IndexError(f"mode {mode} outside window")
        return mode + self.n_max

    @property
    def vacuum_index(self) -> int:
        return int(self.sea_mask)

    def vacuum_vector(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.vacuum_index] = 1.0
        return v

    def annihilator(self, mode: int) -> sparse.csr_matrix:
        """c_mode with the parity-of-occupied-modes-below sign string."""
        if mode in self._c_cache:
            return self._c_cache[mode]
        b = self.bit(mode)
        below = (1 << b) - 1
        cols = self.states[(self.states >> b) & 1 == 1]
        rows = cols ^ (1 << b)
        signs = 1.0 - 2.0 * (np.bitwise_count(cols & below) % 2).astype(float)
        op = sparse.csr_matrix((signs, (rows, cols)), shape=(self.dim, self.dim))
        self._c_cache[mode] = op
        return op

    def creator(self, mode: int) -> sparse.csr_matrix:
        return self.annihilator(mode).conj().T.tocsr()

    def sector_indices(self, charge: int) -> np.ndarray:
        return np.where(self.charge == charge)[0]

    def margin_safe_mask(self, margin: int) -> np.ndarray:
        """States with the bottom ``margin`` modes filled and top ``margin`` empty."""
        if margin >= self.n_modes:
            raise InsufficientWindowError("margin swallows the whole window",
                                          required_n_max=margin)
        bottom = (1 << margin) - 1
        top = ((1 << self.n_modes) - 1) ^ ((1 << (self.n_modes - margin)) - 1)
        ok = (self.states & bottom) == bottom
        ok &= (self.states & top) == 0
        return ok


@dataclass(frozen=True)
class FockBasisState:
    """Particle/hole content of an occupation mask relative to the sea."""

    particles: frozenset
    holes: frozenset

    def __post_init__(self):
        if any(p < 0 for p in self.particles):
            raise ValueError("particles live on modes >= 0")
        if any(h >= 0 for h in self.holes):
            raise ValueError("holes live on modes < 0")

    @property
    def charge(self) -> int:
        return len(self.particles) - len(self.holes)

    @property
    def energy(self) -> int:
        return sum(self.particles) + sum(-h for h in self.holes)

    @classmethod
    def vacuum(cls) -> "FockBasisState":
        return cls(frozenset(), frozenset())

    @classmethod
    def from_mask(cls, space: FockSpace, mask: int) -> "FockBasisState":
        particles, holes = [], []
        for mode in range(-space.n_max, space.n_max + 1):
            occ = (mask >> space.bit(mode)) & 1
            if mode >= 0 and occ:
                particles.append(mode)
            elif mode < 0 and not occ:
                holes.append(mode)
        return cls(frozenset(particles), frozenset(holes))

    def to_mask(self, space: FockSpace) -> int:
        mask = space.sea_mask
        for p in self.particles:
            mask |= 1 << space.bit(p)
        for h in self.holes:
            mask &= ~(1 << space.bit(h))
        return mask


class FockOperator:
    """Sparse operator on the occupation basis (or one charge-sector block).

    ``charge_shift`` is inferred from the support: every nonzero entry must
    connect states whose charges differ by the same amount, else it is None.
    """

    __slots__ = ("space", "matrix", "charge_shift", "sector_charge", "basis")

    def __init__(self, space: FockSpace, matrix, sector_charge: int | None = None,
                 basis: np.ndarray | None = None):
        self.space = space
        self.matrix = sparse.csr_matrix(matrix)
        self.sector_charge = sector_charge
        if basis is None and sector_charge is not None:
            basis = space.sector_indices(sector_charge)
        self.basis = basis
        self.charge_shift = self._infer_shift()

    def _infer_shift(self):
        coo = self.matrix.tocoo()
        if coo.nnz == 0:
            return 0
        if self.sector_charge is not None:
            return 0
        shifts = np.unique(self.space.charge[coo.row] - self.space.charge[coo.col])
        return int(shifts[0]) if len(shifts) == 1 else None

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        if self.space is not other.space or self.sector_charge != other.sector_charge:
            raise ValueError("operators live on different spaces")
        return FockOperator(self.space, self.matrix @ other.matrix,
                            self.sector_charge, self.basis)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, self.matrix + other.matrix,
                            self.sector_charge, self.basis)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.space, self.matrix - other.matrix,
                            self.sector_charge, self.basis)

    def scale(self, c) -> "FockOperator":
        return FockOperator(self.space, self.matrix * c, self.sector_charge, self.basis)

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.space, self.matrix.conj().T.tocsr(),
                            self.sector_charge, self.basis)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def to_sector(self, charge: int) -> "FockOperator":
        """Restrict a full-space charge-preserving operator to one sector."""
        if self.sector_charge is not None:
            raise ValueError("already a sector block")
        ix = self.space.sector_indices(charge)
        block = self.matrix[ix][:, ix]
        return FockOperator(self.space, block, sector_charge=charge, basis=ix)

    def hermitian_defect(self) -> float:
        d = self.matrix - self.matrix.conj().T
        return float(np.abs(d.toarray()).max()) if d.nnz else 0.0

    def vacuum_expectation(self) -> complex:
        if self.sector_charge not in (None, 0):
            raise ValueError("vacuum lives in the charge-0 sector")
        if self.sector_charge == 0:
            vac = int(np.where(self.basis == self.space.vacuum_index)[0][0])
        else:
            vac = self.space.vacuum_index
        return complex(self.matrix[vac, vac])


# ---------------------------------------------------------------------------
# CAR fields and bilinears
# ---------------------------------------------------------------------------

def car_field(space: FockSpace, h: DoubledVector) -> FockOperator:
    """Field operator B((f,g)) = sum_n f_n c*_n + sum_n g_{-n} c_n.

    Satisfies B(Gamma h) = B(h)* and the self-dual anticommutation relation
    {B(h)*, B(k)} = <h, k> 1; vectors in the complement of the basis
    projection annihilate the sea vacuum.
    """
    if h.window.n_max != space.n_max:
        raise ValueError("doubled vector window does not match the Fock window")
    op = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
    modes = range(-space.n_max, space.n_max + 1)
    for i, n in enumerate(modes):
        if abs(h.top[i]) > 1e-15:
            op = op + h.top[i] * space.creator(n)
        g_rev = h.bottom[h.window.index(-n)]
        if abs(g_rev) > 1e-15:
            op = op + g_rev * space.annihilator(n)
    return FockOperator(space, op)


def _bilinear_triplets(space: FockSpace, p: int, q: int):
    """COO triplets of c*_p c_q in the occupation basis (no normal ordering)."""
    bp, bq = space.bit(p), space.bit(q)
    states = space.states
    if p == q:
        cols = states[(states >> bq) & 1 == 1]
        return cols, cols, np.ones(len(cols))
    occ_q = (states >> bq) & 1 == 1
    empty_p = (states >> bp) & 1 == 0
    cols = states[occ_q & empty_p]
    inter = cols ^ (1 << bq)
    rows = inter | (1 << bp)
    sign_q = 1.0 - 2.0 * (np.bitwise_count(cols & ((1 << bq) - 1)) % 2).astype(float)
    sign_p = 1.0 - 2.0 * (np.bitwise_count(inter & ((1 << bp) - 1)) % 2).astype(float)
    return rows, cols, sign_q * sign_p


def dgamma(space: FockSpace, a: OneParticleOperator) -> FockOperator:
    """Normal-ordered bilinear sum A_pq :c*_p c_q: relative to the sea.

    Selfadjoint for A = A*, vanishing vacuum expectation, charge shift 0.
    """
    if a.window.n_max != space.n_max:
        raise ValueError("operator window does not match the Fock window")
    if a.bandwidth > space.n_max:
        raise InsufficientWindowError(
            f"bandwidth {a.bandwidth} too large for Fock window {space.n_max}",
            required_n_max=a.bandwidth)
    rows, cols, data = [], [], []
    sea_trace = 0.0 + 0j
    for pi, p in enumerate(a.window.modes):
        for qi, q in enumerate(a.window.modes):
            coeff = a.matrix[pi, qi]
            if abs(coeff) <= 1e-15:
                continue
            r, c, s = _bilinear_triplets(space, int(p), int(q))
            rows.append(r)
            cols.append(c)
            data.append(coeff * s)
            if p == q and p < 0:
                sea_trace += coeff
    rows.append(space.states)
    cols.append(space.states)
    data.append(np.full(space.dim, -sea_trace))
    mat = sparse.coo_matrix(
        (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
        shape=(space.dim, space.dim)).tocsr()
    mat.eliminate_zeros()
    return FockOperator(space, mat)


# ---------------------------------------------------------------------------
# Schwinger commutator
# ---------------------------------------------------------------------------

def schwinger_commutator(space: FockSpace, a1: OneParticleOperator,
                         a2: OneParticleOperator, tol: float = 1e-10) -> complex:
    """Central value of [dgamma(A2), dgamma(A1)] on the margin-safe neutral sector.

    Both generators must be multiplication operators (so they commute as
    symbols; their windowed matrices commute on the interior).  The
    commutator acts as a scalar on every neutral state whose excitations
    stay a combined bandwidth away from the window edges; that scalar is
    checked against i s(A1, A2) with s computed by the triple-route
    symplectic form.  Returns the scalar.

    Note the measured scalar is 2i Im tr(P A1 Pperp A2 P): twice the im-trace,
    matching the half-trace expression over the doubled space.
    """
    margin = a1.bandwidth + a2.bandwidth
    if margin >= space.n_max:
        raise InsufficientWindowError(
            f"combined bandwidth {margin} leaves no margin at n_max {space.n_max}",
            required_n_max=margin + 1)
    # commuting-symbols precondition: interior columns of both products agree
    defect = interior_columns_defect(a1 @ a2, a2 @ a1, margin)
    if defect > 1e-12:
        raise ValueError(f"generators do not commute on the interior (defect {defect:.2e})")
    d1 = dgamma(space, a1).to_sector(0)
    d2 = dgamma(space, a2).to_sector(0)
    comm = (d2 @ d1 - d1 @ d2).matrix.tocsc()
    basis = d1.basis
    safe = space.margin_safe_mask(margin)[basis]
    if not safe.any():
        raise InsufficientWindowError("no margin-safe neutral states at this window",
                                      required_n_max=margin + 1)
    vac_pos = int(np.where(basis == space.vacuum_index)[0][0])
    scalar = complex(comm[vac_pos, vac_pos])
    for pos in np.where(safe)[0]:
        col = comm[:, pos].toarray().ravel()
        col[pos] -= scalar
        leak = np.abs(col).max() if len(col) else 0.0
        if leak > tol:
            raise InternalConsistencyError(
                f"commutator is not scalar on the margin-safe sector (leak {leak:.2e})")
    expected = 1j * schwinger_form(a1, a2)
    if abs(scalar - expected) > tol:
        raise InternalConsistencyError(
            f"commutator scalar {scalar} vs i*s(A1,A2) = {expected}")
    return scalar


# ---------------------------------------------------------------------------
# implementers
# ---------------------------------------------------------------------------

def gauge_implementer(space: FockSpace, lam: complex) -> FockOperator:
    """The charge rotation: lambda^{charge} diagonally in the occupation basis.

    This is the unique implementer of the scalar unitary lambda 1 fixing the
    vacuum; its doubling commutes with the basis projection, so there is no
    phase ambiguity to resolve.
    """
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError("lambda must be unimodular")
    diag = complex(lam) ** space.charge
    return FockOperator(space, sparse.diags(diag).tocsr())


def apply_shift(space: FockSpace, mask: int):
    """One application of the shift implementer to a basis mask.

    Returns ``(new_mask, sign)``.  Every occupation moves up one mode and the
    bottom mode refills from the (notional) infinite sea below; a state whose
    top mode is occupied would push charge out of the window and raises.
    """
    top_bit = 1 << (space.n_modes - 1)
    if mask & top_bit:
        raise MarginExhaustedError(
            "state occupies the top window mode; shift would leave the window")
    new = ((mask << 1) | 1) & ((1 << space.n_modes) - 1)
    sign = -1.0 if (int(mask).bit_count() % 2) else 1.0
    return new, sign


def shift_implementer(space: FockSpace) -> FockOperator:
    """Implementer of the mode shift e_n -> e_{n+1} on the truncated basis.

    Defined on the margin-safe subspace of states with the top mode empty;
    maps the vacuum to the mode-0 one-particle state with phase +1 and
    carries charge shift +1.  The sign (-1)^{#occupied} makes the
    intertwining relation with the CAR fields exact.
    """
    valid = (space.states >> (space.n_modes - 1)) & 1 == 0
    cols = space.states[valid]
    rows = ((cols << 1) | 1) & ((1 << space.n_modes) - 1)
    signs = 1.0 - 2.0 * (np.bitwise_count(cols) % 2).astype(float)
    mat = sparse.csr_matrix((signs, (rows, cols)), shape=(space.dim, space.dim))
    return FockOperator(space, mat)


def gauge_covariance(space: FockSpace, phi: FockOperator, u=None,
                     n_roots: int = 16, tol: float = 1e-10) -> int:
    """Exponent q in Phi(lambda) Phi_U Phi(lambda)^{-1} = lambda^q Phi_U.

    Verifies the relation for ``n_roots`` roots of unity and returns the
    unique integer exponent; raises if the operator is not charge
    homogeneous.  When a one-particle ``u`` is supplied the exponent is
    checked against its charge index.
    """
    if phi.sector_charge is not None:
        raise ValueError("covariance needs a full-space operator")
    coo = phi.matrix.tocoo()
    if coo.nnz == 0:
        raise ValueError("cannot read an exponent off the zero operator")
    shifts = np.unique(space.charge[coo.row] - space.charge[coo.col])
    if len(shifts) != 1:
        raise ValueError(f"no single covariance exponent fits: charge shifts {shifts}")
    q = int(shifts[0])
    for j in range(n_roots):
        lam = np.exp(2j * np.pi * j / n_roots)
        scaled = coo.data * lam ** (space.charge[coo.row] - space.charge[coo.col])
        residual = np.abs(scaled - lam ** q * coo.data).max()
        if residual > tol:
            raise InternalConsistencyError(
                f"covariance residual {residual:.2e} at root {j}")
    if u is not None:
        report = fredholm_index.charge_index(u)
        if report.q != q:
            raise InternalConsistencyError(
                f"covariance exponent {q} != charge index {report.q}")
    return q


# ---------------------------------------------------------------------------
# Weyl exponentials and the generating functional
# ---------------------------------------------------------------------------

def weyl_exponential(space: FockSpace, a: OneParticleOperator,
                     sector_cap: int = SECTOR_CAP) -> FockOperator:
    """exp(i dgamma(A)) on the neutral sector, by scaling-and-squaring.

    The sector block is exponentiated densely (Pade with scaling and
    squaring); the result is checked to be unitary to 1e-9.
    """
    d = dgamma(space, a).to_sector(0)
    n = d.matrix.shape[0]
    if n > sector_cap:
        raise InsufficientWindowError(
            f"neutral sector dimension {n} exceeds cap {sector_cap}")
    w = scipy.linalg.expm(1j * d.matrix.toarray())
    defect = np.abs(w @ w.conj().T - np.eye(n)).max()
    if defect > 1e-9:
        raise InternalConsistencyError(f"Weyl exponential not unitary (defect {defect:.2e})")
    return FockOperator(space, sparse.csr_matrix(w), sector_charge=0, basis=d.basis)


def _sector_vacuum(space: FockSpace):
    ix = space.sector_indices(0)
    pos = int(np.where(ix == space.vacuum_index)[0][0])
    v = np.zeros(len(ix), dtype=complex)
    v[pos] = 1.0
    return ix, v


def weyl_central_phase(space: FockSpace, a: OneParticleOperator,
                       b: OneParticleOperator) -> complex:
    """Phase z with exp(i dG(A)) exp(i dG(B)) = z exp(i dG(A+B)) on the vacuum.

    Computed with sparse exponential-times-vector products, so it stays
    cheap at windows where the full sector exponential would not.
    """
    da = dgamma(space, a).to_sector(0).matrix.tocsc()
    db = dgamma(space, b).to_sector(0).matrix.tocsc()
    dab = dgamma(space, a + b).to_sector(0).matrix.tocsc()
    _, vac = _sector_vacuum(space)
    u = spla.expm_multiply(1j * da, spla.expm_multiply(1j * db, vac))
    v = spla.expm_multiply(1j * dab, vac)
    return complex(np.vdot(v, u))


def measured_weyl_sign(space: FockSpace, a: OneParticleOperator,
                       b: OneParticleOperator) -> int:
    """Sign sigma with W(A) W(B) = e^{i sigma s(A,B)/2} W(A+B), measured on Fock.

    This single measurement pins the orientation convention used by the
    symbolic Weyl layer.
    """
    s = schwinger_form(a, b)
    if abs(s) < 1e-6:
        raise ValueError("need a pair with nonzero symplectic form to read the sign")
    z = weyl_central_phase(space, a, b)
    plus = abs(z - np.exp(0.5j * s))
    minus = abs(z - np.exp(-0.5j * s))
    if min(plus, minus) > 0.1 * abs(2 * np.sin(s / 2)):
        raise InternalConsistencyError(
            f"central phase {z} matches neither sign of e^(+-i s/2), s = {s}")
    return +1 if plus < minus else -1


def vacuum_weyl_expectation(space: FockSpace, a: OneParticleOperator,
                            amplitude: float = 1.0) -> complex:
    """<Omega| exp(i c dgamma(A)) |Omega> on the truncated space."""
    d = dgamma(space, a).to_sector(0).matrix.tocsc()
    _, vac = _sector_vacuum(space)
    w = spla.expm_multiply(1j * amplitude * d, vac)
    return complex(np.vdot(vac, w))


def measure_generating_exponent(space: FockSpace, a: OneParticleOperator,
                                amplitudes=(0.25, 0.5, 1.0)) -> dict:
    """Fit kappa in <W(cA)> = e^{-kappa c^2 <A,A>} across amplitudes.

    Reported against the stated 1/4 convention for the generating
    functional; the Gaussian identity for a mode-linear boson generator
    gives 1/2, and the measurement decides.
    """
    from .mode_space import pairing
    norm = pairing(a, a).real
    kappas = {}
    for c in amplitudes:
        vev = vacuum_weyl_expectation(space, a, c)
        if abs(vev.imag) > 1e-8:
            raise InternalConsistencyError(f"vacuum expectation not real: {vev}")
        kappas[c] = float(-np.log(vev.real) / (c * c * norm))
    values = np.array(list(kappas.values()))
    return {
        "kappas": kappas,
        "kappa": float(values.mean()),
        "spread": float(values.max() - values.min()),
        "pairing_norm": norm,
        "window": space.n_max,
    }


# ---------------------------------------------------------------------------
# positivity of the implemented circle action
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositivityReport:
    min_eigenvalue: float
    second_lowest_value: float
    zero_states: tuple
    unique_zero_in_neutral_sector: bool
    window: int


def spectrum_positivity(space: FockSpace) -> PositivityReport:
    """Spectrum of the implemented rotation generator (mode-number bilinear).

    The generator is diagonal: a particle at mode p contributes p, a hole at
    mode h contributes -h, so the spectrum is nonnegative with the vacuum at
    zero.  Within the neutral sector the vacuum is the unique zero mode; on
    the full space the mode-0 one-particle state (charge 1) is a second zero
    mode, which the report lists explicitly.
    """
    energies = space.energy
    zero_masks = space.states[energies == 0]
    zero_states = tuple(FockBasisState.from_mask(space, int(m)) for m in zero_masks)
    neutral_zeros = [s for s in zero_states if s.charge == 0]
    unique = len(neutral_zeros) == 1 and neutral_zeros[0] == FockBasisState.vacuum()
    distinct = np.unique(energies)
    return PositivityReport(
        min_eigenvalue=float(energies.min()),
        second_lowest_value=float(distinct[1]) if len(distinct) > 1 else float("nan"),
        zero_states=zero_states,
        unique_zero_in_neutral_sector=bool(unique),
        window=space.n_max,
    )


def energy_generator(space: FockSpace) -> FockOperator:
    """dgamma of the mode-number operator, assembled diagonally."""
    return FockOperator(space, sparse.diags(space.energy.astype(complex)).tocsr())


# ---------------------------------------------------------------------------
# generic implementer solver
# ---------------------------------------------------------------------------

def solve_implementer(space: FockSpace, u, leak_tol: float = 1e-8) -> tuple:
    """Least-squares implementer of the doubling of a loop unitary.

    The image vacuum is the minimizer of sum ||B(phi(U) h_j) psi||^2 over
    basis vectors h_j of the annihilating half of the doubled space (ties in
    the numerical nullspace are broken by energy).  The operator is then
    extended by transporting excitation products, which enforces the
    intertwining relation column by column.  Returns ``(FockOperator,
    report)`` where the report carries the vacuum residual and the
    unitarity defect on the margin-safe subspace.
    """
    if isinstance(u, LoopFunction):
        # truncate the symbol to the window; the residual report absorbs the tail
        from .mode_space import toeplitz_operator
        op = toeplitz_operator(u.fourier(), space.window)
    elif isinstance(u, OneParticleOperator):
        if u.window.n_max != space.n_max:
            raise ValueError("operator window does not match the Fock window")
        op = u
    else:
        raise TypeError("expected a LoopFunction or OneParticleOperator")
    window = space.window
    umat = op.matrix

    def psi_dag(x):
        total = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
        for i, mode in enumerate(window.modes):
            if abs(x[i]) > 1e-14:
                total = total + x[i] * space.creator(int(mode))
        return total

    def psi(x):
        total = sparse.csr_matrix((space.dim, space.dim), dtype=complex)
        for i, mode in enumerate(window.modes):
            if abs(x[i]) > 1e-14:
                total = total + np.conj(x[i]) * space.annihilator(int(mode))
        return total

    constraints = []
    for n in range(-space.n_max, 0):
        constraints.append(psi_dag(umat[:, window.index(n)]))
    for m in range(0, space.n_max + 1):
        constraints.append(psi(umat[:, window.index(m)]))
    k = np.zeros((space.dim, space.dim), dtype=complex)
    for c in constraints:
        k += (c.conj().T @ c).toarray()
    vals, vecs = np.linalg.eigh(k)
    null_cut = max(1e-10, 10.0 * vals[0])
    null = vecs[:, vals <= null_cut]
    if null.shape[1] == 0:
        null = vecs[:, :1]
    # break nullspace ties by energy (the physical image vacuum is lowest)
    e_small = null.conj().T @ (space.energy[:, None] * null)
    _, ev = np.linalg.eigh(e_small)
    omega_u = null @ ev[:, 0]
    # project on the dominant charge sector and fix the global phase: the
    # amplitude on the canonical excitation ladder of the dominant basis
    # state is made positive real, which for the plain shift reproduces the
    # vacuum-to-c*_0-vacuum phase +1 convention
    weights = [np.linalg.norm(omega_u[space.charge == c]) for c in range(-space.n_max - 1, space.n_max + 2)]
    dominant = int(np.argmax(weights)) - space.n_max - 1
    leak = float(np.linalg.norm(omega_u[space.charge != dominant]))
    omega_u = np.where(space.charge == dominant, omega_u, 0)
    omega_u = omega_u / np.linalg.norm(omega_u)
    peak = int(np.argmax(np.abs(omega_u)))
    ladder_sign = _plain_ladder_sign(space, peak)
    rel = omega_u[peak] / ladder_sign
    omega_u = omega_u * (np.abs(rel) / rel)
    residual = float(vals[0])

    # transported excitation ladder: B(phi(U) h) for h creating each excitation
    create_particle = {p: psi_dag(umat[:, window.index(p)]) for p in range(0, space.n_max + 1)}
    create_hole = {h: psi(umat[:, window.index(h)]) for h in range(-space.n_max, 0)}

    cols, rows, data = [], [], []
    vac = space.vacuum_vector()
    for mask in range(space.dim):
        content = FockBasisState.from_mask(space, mask)
        # canonical excitation order: holes ascending then particles ascending,
        # rightmost factor acting first; the plain CAR ladder fixes the sign
        # relating that product to the basis mask
        plain = [space.annihilator(h) for h in sorted(content.holes)]
        plain += [space.creator(p) for p in sorted(content.particles)]
        ref = vac
        for f in reversed(plain):
            ref = f @ ref
        sign = ref[mask]
        if abs(abs(sign) - 1.0) > 1e-12:
            raise InternalConsistencyError("excitation ladder lost normalization")
        factors = [create_hole[h] for h in sorted(content.holes)]
        factors += [create_particle[p] for p in sorted(content.particles)]
        img = omega_u
        for f in reversed(factors):
            img = f @ img
        img = img / sign
        nz = np.nonzero(np.abs(img) > 1e-13)[0]
        cols.extend([mask] * len(nz))
        rows.extend(nz.tolist())
        data.extend(img[nz].tolist())
    phi = FockOperator(space, sparse.csr_matrix((data, (rows, cols)),
                                                shape=(space.dim, space.dim)))
    report = {
        "vacuum_residual": residual,
        "charge_shift": phi.charge_shift,
        "sector_leak": leak,
        "unitarity_defect": _safe_unitarity_defect(space, phi),
        "window": space.n_max,
    }
    return phi, report


def _plain_ladder_sign(space: FockSpace, mask: int) -> float:
    """Sign relating the canonical CAR excitation product on the vacuum to
    the basis vector of ``mask`` (holes ascending, then particles ascending,
    rightmost factor first)."""
    content = FockBasisState.from_mask(space, int(mask))
    plain = [space.annihilator(h) for h in sorted(content.holes)]
    plain += [space.creator(p) for p in sorted(content.particles)]
    ref = space.vacuum_vector()
    for f in reversed(plain):
        ref = f @ ref
    return float(ref[mask].real)


def _safe_unitarity_defect(space: FockSpace, phi: FockOperator, margin: int = 2) -> float:
    safe = space.margin_safe_mask(margin)
    g = (phi.matrix.conj().T @ phi.matrix).toarray()
    ix = np.where(safe)[0]
    return float(np.abs(g[np.ix_(ix, ix)] - np.eye(len(ix))).max())
