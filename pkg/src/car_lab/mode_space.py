"""One-particle layer: windowed Fourier modes, loops, and the symplectic form.

The Hilbert space is truncated to the symmetric mode window [-n_max, n_max].
Loops f: S^1 -> T act as Toeplitz multiplication matrices; the projection P
onto nonnegative modes splits the window, and the semi-scalar product
tr(P A Pperp B P) together with the symplectic form s(A,B) = 2 Im of it are
computed along independent routes (windowed traces, Fourier sums, quadrature)
that must agree to tolerance.

Window policy: operations demand enough margin that band-limited inputs give
boundary-free, hence exact, answers; otherwise they raise
InsufficientWindowError carrying the required n_max.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientWindowError, InternalConsistencyError
from .fourier import FourierSeries, argument_winding, exp_series, quadrature_mean

DEFAULT_SERIES_TOL = 1e-14
ALGEBRAIC_TOL = 1e-12
QUADRATURE_TOL = 1e-10


@dataclass(frozen=True)
class ModeWindow:
    """Symmetric frequency window: modes n in [-n_max, n_max]."""

    n_max: int

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")

    @property
    def dim(self) -> int:
        return 2 * self.n_max + 1

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.n_max, self.n_max + 1)

    def index(self, mode: int) -> int:
        if abs(mode) > self.n_max:
            raise IndexError(f"mode {mode} outside window [-{self.n_max}, {self.n_max}]")
        return mode + self.n_max

    def enlarged(self, extra: int) -> "ModeWindow":
        return ModeWindow(self.n_max + extra)


class LoopFunction:
    """A smooth T-valued loop f(e^{i alpha}) = e^{i w alpha} e^{i h(alpha)}.

    Stored as the integer winding w plus the Fourier coefficients of the
    real-valued phase function h.  The full Fourier expansion of f is
    obtained by composing e^{ih} as a power series on coefficients (tail
    tolerance ``series_tol``) and shifting by the winding.
    """

    __slots__ = ("winding", "phase", "series_tol", "_coeffs")

    def __init__(self, winding: int = 0, phase: FourierSeries | dict | None = None,
                 series_tol: float = DEFAULT_SERIES_TOL):
        if phase is None:
            phase = FourierSeries.zero()
        elif isinstance(phase, dict):
            phase = FourierSeries.from_dict(phase)
        if not phase.is_real():
            raise ValueError("phase function must be real-valued: h_{-k} = conj(h_k)")
        self.winding = int(winding)
        self.phase = phase
        self.series_tol = series_tol
        self._coeffs = None

    @classmethod
    def identity_loop(cls) -> "LoopFunction":
        return cls(0)

    @classmethod
    def basic(cls, winding: int = 1) -> "LoopFunction":
        """The loop zeta -> zeta^winding (pure Fourier mode)."""
        return cls(winding)

    def fourier(self) -> FourierSeries:
        """Full Fourier coefficients of f (cached)."""
        if self._coeffs is None:
            exp_part = exp_series(self.phase.scale(1j), tol=self.series_tol)
            self._coeffs = FourierSeries(exp_part.coeffs, exp_part.kmin + self.winding)
        return self._coeffs

    @property
    def bandwidth(self) -> int:
        return self.fourier().bandwidth

    @property
    def phase_bandwidth(self) -> int:
        return self.phase.bandwidth

    @property
    def zero_mean_phase(self) -> bool:
        return abs(self.phase.mean) <= 1e-14

    def __mul__(self, other: "LoopFunction") -> "LoopFunction":
        return LoopFunction(self.winding + other.winding, self.phase + other.phase,
                            min(self.series_tol, other.series_tol))

    def inverse(self) -> "LoopFunction":
        return LoopFunction(-self.winding, self.phase.scale(-1.0), self.series_tol)

    def evaluate(self, alphas) -> np.ndarray:
        """Sample the loop from its definition (winding phase times e^{ih})."""
        alphas = np.asarray(alphas, dtype=float)
        h = self.phase.evaluate(alphas)
        return np.exp(1j * (self.winding * alphas + h.real))

    def unimodularity_defect(self, grid: int = 512) -> float:
        """max | |f| - 1 | with f reconstructed from the composed coefficients."""
        vals = self.fourier().sample(grid)
        return float(np.abs(np.abs(vals) - 1.0).max())

    # JSON wire form: {"winding": w, "h": [[k, re, im], ...]}

    def to_json_dict(self) -> dict:
        return {"winding": self.winding, "h": self.phase.to_pairs()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "LoopFunction":
        return cls(int(d.get("winding", 0)), FourierSeries.from_pairs(d.get("h", [])))

    @classmethod
    def load(cls, path: str) -> "LoopFunction":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))

    def __repr__(self):
        return f"LoopFunction(winding={self.winding}, h={self.phase.to_dict()!r})"


class OneParticleOperator:
    """A complex matrix on a mode window with its band structure on record."""

    __slots__ = ("window", "matrix", "bandwidth")

    def __init__(self, window: ModeWindow, matrix, expect_unitary: bool = False):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (window.dim, window.dim):
            raise ValueError(f"matrix shape {m.shape} does not fit window dim {window.dim}")
        m = m.copy()
        m.setflags(write=False)
        self.window = window
        self.matrix = m
        self.bandwidth = _matrix_bandwidth(m)
        if expect_unitary:
            defect = self.interior_unitarity_defect()
            if defect > ALGEBRAIC_TOL:
                raise ValueError(f"operator not unitary on the window interior: defect {defect:.2e}")

    @property
    def n_max(self) -> int:
        return self.window.n_max

    def entry(self, row_mode: int, col_mode: int) -> complex:
        return complex(self.matrix[self.window.index(row_mode), self.window.index(col_mode)])

    def adjoint(self) -> "OneParticleOperator":
        return OneParticleOperator(self.window, self.matrix.conj().T)

    def __matmul__(self, other: "OneParticleOperator") -> "OneParticleOperator":
        if self.window != other.window:
            raise ValueError("window mismatch")
        return OneParticleOperator(self.window, self.matrix @ other.matrix)

    def __add__(self, other: "OneParticleOperator") -> "OneParticleOperator":
        if self.window != other.window:
            raise ValueError("window mismatch")
        return OneParticleOperator(self.window, self.matrix + other.matrix)

    def scale(self, c) -> "OneParticleOperator":
        return OneParticleOperator(self.window, self.matrix * c)

    def is_toeplitz(self, tol: float = ALGEBRAIC_TOL) -> bool:
        return self.toeplitz_defect() <= tol

    def toeplitz_defect(self) -> float:
        worst = 0.0
        for off in range(-self.bandwidth, self.bandwidth + 1):
            d = np.diagonal(self.matrix, offset=-off)  # offset -off: row - col = off
            if len(d) > 1:
                worst = max(worst, float(np.abs(d - d[0]).max()))
        return worst

    def toeplitz_symbol(self, tol: float = ALGEBRAIC_TOL) -> FourierSeries:
        """Fourier series of the symbol, for constant-diagonal matrices."""
        defect = self.toeplitz_defect()
        if defect > tol:
            raise ValueError(f"operator is not Toeplitz (diagonal spread {defect:.2e})")
        d = {}
        for off in range(-self.bandwidth, self.bandwidth + 1):
            diag = np.diagonal(self.matrix, offset=-off)
            d[off] = complex(diag[0])
        return FourierSeries.from_dict(d)

    def interior_unitarity_defect(self) -> float:
        """||U U* - 1|| restricted to rows/columns a bandwidth away from the edge."""
        b = self.bandwidth
        g = self.matrix @ self.matrix.conj().T - np.eye(self.window.dim)
        dim = self.window.dim
        if 2 * b >= dim:
            return float(np.abs(g).max())
        inner = slice(b, dim - b)
        return float(np.abs(g[inner, inner]).max())

    def hermitian_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def __repr__(self):
        return f"OneParticleOperator(n_max={self.n_max}, bandwidth={self.bandwidth})"


def _matrix_bandwidth(m) -> int:
    dim = m.shape[0]
    rows, cols = np.nonzero(np.abs(m) > 1e-15)
    if len(rows) == 0:
        return 0
    return int(np.abs(rows - cols).max())


class Conjugation1P:
    """Antilinear conjugation: complex conjugation composed with mode reflection.

    On basis vectors gamma e_n = e_{-n}; on matrices (gamma A gamma)_{mn} =
    conj(A_{-m,-n}).  gamma is an involution.
    """

    def apply_vector(self, window: ModeWindow, v) -> np.ndarray:
        return np.conj(np.asarray(v, dtype=complex))[::-1]

    def apply_operator(self, op: OneParticleOperator) -> OneParticleOperator:
        return OneParticleOperator(op.window, np.conj(op.matrix[::-1, ::-1]))


GAMMA = Conjugation1P()


def gamma_invariance_defect(op: OneParticleOperator) -> float:
    return float(np.abs(GAMMA.apply_operator(op).matrix - op.matrix).max())


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def identity_operator(window: ModeWindow) -> OneParticleOperator:
    return OneParticleOperator(window, np.eye(window.dim))


def toeplitz_operator(symbol: FourierSeries, window: ModeWindow) -> OneParticleOperator:
    """Windowed Toeplitz matrix with entry(m, n) = symbol coefficient m - n."""
    modes = window.modes
    offsets = modes[:, None] - modes[None, :]
    padded = np.zeros(2 * window.dim + 1, dtype=complex)
    for k, c in symbol.to_dict().items():
        if abs(k) <= window.dim:
            padded[k + window.dim] = c
    return OneParticleOperator(window, padded[offsets + window.dim])


def multiplication_operator(f: LoopFunction, window: ModeWindow) -> OneParticleOperator:
    """Multiplication by the loop f as a windowed Toeplitz matrix.

    Requires n_max >= total bandwidth of f, so that within the margin-safe
    interior the matrix acts exactly as multiplication by f.
    """
    b = f.bandwidth
    if window.n_max < b:
        raise InsufficientWindowError(
            f"window n_max={window.n_max} below loop bandwidth {b}", required_n_max=b)
    op = toeplitz_operator(f.fourier(), window)
    # windowed compressions of unitary multiplication operators are unitary
    # away from the boundary band; verify that much
    defect = op.interior_unitarity_defect()
    if defect > 1e-10:
        raise InternalConsistencyError(
            f"loop composition lost unitarity on the interior: defect {defect:.2e}")
    return op


def real_multiplication_operator(a: FourierSeries, window: ModeWindow) -> OneParticleOperator:
    """Multiplication by a real-valued trig polynomial (a CAR-compatible generator)."""
    if not a.is_real():
        raise ValueError("symbol must be real-valued")
    if window.n_max < a.bandwidth:
        raise InsufficientWindowError(
            f"window n_max={window.n_max} below symbol bandwidth {a.bandwidth}",
            required_n_max=a.bandwidth)
    return toeplitz_operator(a, window)


def regular_rep(zeta: complex, window: ModeWindow) -> OneParticleOperator:
    """Diagonal rotation operator: entry zeta^n at mode n."""
    if abs(abs(zeta) - 1.0) > 1e-12:
        raise ValueError(f"zeta must be unimodular, got |zeta| = {abs(zeta)}")
    return OneParticleOperator(window, np.diag(complex(zeta) ** window.modes))


def projection_nonneg(window: ModeWindow) -> OneParticleOperator:
    """P = P_{>=0}, the projection onto modes n >= 0."""
    return OneParticleOperator(window, np.diag((window.modes >= 0).astype(complex)))


def projection_complement(p: OneParticleOperator) -> OneParticleOperator:
    return OneParticleOperator(p.window, np.eye(p.window.dim) - p.matrix)


def mode_projection(window: ModeWindow, n: int) -> OneParticleOperator:
    d = np.zeros(window.dim, dtype=complex)
    d[window.index(n)] = 1.0
    return OneParticleOperator(window, np.diag(d))


def shift_operator(window: ModeWindow) -> OneParticleOperator:
    """The bilateral shift V: e_n -> e_{n+1}, windowed."""
    return multiplication_operator(LoopFunction.basic(1), window)


def projection_defect(p: OneParticleOperator) -> float:
    m = p.matrix
    return float(max(np.abs(m @ m - m).max(), np.abs(m - m.conj().T).max()))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def pairing(a: OneParticleOperator, b: OneParticleOperator) -> complex:
    """Semi-scalar product tr(P A Pperp B P) on the window.

    Both operators must be band-limited with margin (n_max >= 2 max
    bandwidth) and commute with the conjugation gamma.  For Toeplitz inputs
    the Fourier-side value sum_{k>=1} k a_k b_{-k} is computed as well and
    must agree to 1e-12.
    """
    if a.window != b.window:
        raise ValueError("window mismatch")
    need = 2 * max(a.bandwidth, b.bandwidth)
    if a.window.n_max < need:
        raise InsufficientWindowError(
            f"pairing requires n_max >= {need}, window has {a.window.n_max}",
            required_n_max=need)
    for name, op in (("first", a), ("second", b)):
        defect = gamma_invariance_defect(op)
        if defect > ALGEBRAIC_TOL:
            raise ValueError(f"{name} argument does not commute with gamma (defect {defect:.2e})")
    p = projection_nonneg(a.window).matrix
    pc = np.eye(a.window.dim) - p
    value = complex(np.trace(p @ a.matrix @ pc @ b.matrix @ p))
    if a.is_toeplitz() and b.is_toeplitz():
        sa, sb = a.toeplitz_symbol(), b.toeplitz_symbol()
        fourier = sum(k * sa[k] * sb[-k] for k in range(1, max(sa.bandwidth, sb.bandwidth) + 1))
        if abs(value - fourier) > ALGEBRAIC_TOL:
            raise InternalConsistencyError(
                f"trace route {value} vs Fourier route {fourier} disagree")
    return value


def schwinger_form(a: OneParticleOperator, b: OneParticleOperator,
                   grid: int = 512) -> float:
    """Symplectic form s(A,B) = 2 Im tr(P A Pperp B P), triple-checked.

    Routes: (i) 2 Im pairing(A,B); (ii) quadrature of (1/2pi) int A(alpha)
    B'(alpha) d alpha on a power-of-two grid; (iii) the Fourier series
    2 Im sum_{k>=1} k a_k b_{-k}.  Disagreement beyond 1e-10 signals a
    truncation bug and raises.  Route (i) is returned.
    """
    value = 2.0 * pairing(a, b).imag
    sa, sb = a.toeplitz_symbol(), b.toeplitz_symbol()
    if grid <= 2 * (sa.bandwidth + sb.bandwidth):
        grid = 1 << int(np.ceil(np.log2(2 * (sa.bandwidth + sb.bandwidth) + 2)))
    alphas = 2.0 * np.pi * np.arange(grid) / grid
    quad = quadrature_mean(sa.evaluate(alphas) * sb.derivative().evaluate(alphas))
    if abs(quad.imag) > QUADRATURE_TOL:
        raise InternalConsistencyError(f"quadrature route not real: {quad}")
    fourier = 2.0 * sum(k * sa[k] * sb[-k]
                        for k in range(1, max(sa.bandwidth, sb.bandwidth) + 1)).imag
    if max(abs(value - quad.real), abs(value - fourier)) > QUADRATURE_TOL:
        raise InternalConsistencyError(
            f"schwinger routes disagree: trace {value}, quadrature {quad.real}, "
            f"fourier {fourier}")
    return value


def winding_number(f: LoopFunction, grid: int = 1024) -> int:
    """Winding of f: stored value, revalidated by continuous argument lift."""
    defect = f.unimodularity_defect()
    if defect > 1e-8:
        raise ValueError(f"loop is not unimodular (defect {defect:.2e})")
    lifted = argument_winding(f.fourier().sample(grid))
    if lifted != f.winding:
        raise InternalConsistencyError(
            f"stored winding {f.winding} but argument lift gives {lifted}")
    return f.winding


def hs_offdiag_norms(u: OneParticleOperator, p: OneParticleOperator,
                     rebuild=None, convergence_tol: float = 1e-8):
    """Hilbert-Schmidt norms (||P U Pperp||_2, ||Pperp U P||_2) on the window.

    Returns ``(norm_upper, norm_lower, converged)``.  The convergence flag
    recomputes at n_max + 4 (canonically for Toeplitz operators, or via the
    supplied ``rebuild(window) -> (u, p)`` callback) and reports whether both
    values moved by less than ``convergence_tol`` -- the finite proxy for the
    Hilbert-Schmidt property.
    """
    defect = projection_defect(p)
    if defect > ALGEBRAIC_TOL:
        raise ValueError(f"p is not an orthoprojection (defect {defect:.2e})")
    here = _hs_pair(u, p)
    bigger = None
    if rebuild is not None:
        u2, p2 = rebuild(u.window.enlarged(4))
        bigger = _hs_pair(u2, p2)
    elif u.is_toeplitz() and _is_nonneg_projection(p):
        w2 = u.window.enlarged(4)
        bigger = _hs_pair(toeplitz_operator(u.toeplitz_symbol(), w2), projection_nonneg(w2))
    converged = None
    if bigger is not None:
        converged = bool(abs(here[0] - bigger[0]) < convergence_tol
                         and abs(here[1] - bigger[1]) < convergence_tol)
    return here[0], here[1], converged


def _hs_pair(u, p):
    pm = p.matrix
    pc = np.eye(u.window.dim) - pm
    upper = float(np.linalg.norm(pm @ u.matrix @ pc))
    lower = float(np.linalg.norm(pc @ u.matrix @ pm))
    return upper, lower


def _is_nonneg_projection(p: OneParticleOperator) -> bool:
    return bool(np.abs(p.matrix - projection_nonneg(p.window).matrix).max() <= 1e-14)


# ---------------------------------------------------------------------------
# finite-rank off-diagonal block with multiplicity (shift tensor identity)
# ---------------------------------------------------------------------------

def shift_offdiag_block(n_max: int, multiplicity: int = 1):
    """E_{>=0} V E_{<0} for the shift with a multiplicity space of dim K.

    Returns ``(block, rank, clean)`` where ``block`` is the full off-diagonal
    compression matrix, ``rank`` its numerical rank, and ``clean`` is True
    when the only nonzero entries sit in the mode-0 x mode-(-1) cell, i.e.
    the block equals E_0 V E_{-1} exactly.
    """
    window = ModeWindow(n_max)
    v = np.kron(_shift_matrix(window), np.eye(multiplicity))
    pdiag = np.kron(np.diag((window.modes >= 0).astype(float)), np.eye(multiplicity))
    block = pdiag @ v @ (np.eye(v.shape[0]) - pdiag)
    rank = int(np.linalg.matrix_rank(block, tol=1e-10))
    mask = np.zeros_like(block, dtype=bool)
    i0 = window.index(0) * multiplicity
    im1 = window.index(-1) * multiplicity
    mask[i0:i0 + multiplicity, im1:im1 + multiplicity] = True
    clean = bool(np.abs(block[~mask]).max() == 0.0) if (~mask).any() else True
    return block, rank, clean


def _shift_matrix(window: ModeWindow) -> np.ndarray:
    m = np.zeros((window.dim, window.dim))
    for n in range(-window.n_max, window.n_max):
        m[window.index(n + 1), window.index(n)] = 1.0
    return m


# ---------------------------------------------------------------------------
# interior comparisons and export
# ---------------------------------------------------------------------------

def interior_columns_defect(a: OneParticleOperator, b: OneParticleOperator,
                            margin: int) -> float:
    """max entrywise difference over columns with |mode| <= n_max - margin."""
    if a.window != b.window:
        raise ValueError("window mismatch")
    n = a.window.n_max
    if margin >= n:
        raise InsufficientWindowError("no interior left at this margin",
                                      required_n_max=margin + 1)
    cols = slice(a.window.index(-(n - margin)), a.window.index(n - margin) + 1)
    return float(np.abs(a.matrix[:, cols] - b.matrix[:, cols]).max())


def export_operator(op: OneParticleOperator, path: str, fmt: str = "json") -> None:
    """Dump the dense matrix in a columnar (row, col, re, im) form."""
    rows, cols = np.nonzero(np.abs(op.matrix) > 0)
    modes = op.window.modes
    records = [[int(modes[r]), int(modes[c]),
                float(op.matrix[r, c].real), float(op.matrix[r, c].imag)]
               for r, c in zip(rows, cols)]
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"n_max": op.window.n_max, "columns": ["row", "col", "re", "im"],
                       "entries": records}, fh)
    elif fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["row", "col", "re", "im"])
            writer.writerows(records)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
