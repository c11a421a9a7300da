"""Charge index of windowed Toeplitz compressions.

For a unimodular band-limited loop f, the half-line compression P U_f P
(restricted to modes >= 0) is Fredholm; its index equals the winding number
under the orientation fixed here.

Orientation.  We define q := dim coker - dim ker of the compression.  With
this choice the up-shift (f = zeta) gets q = +1, which is the orientation
the Fock-level gauge covariance test singles out: conjugating the shift
implementer by the charge rotation multiplies it by lambda^{+1}.  The naive
ker-minus-coker convention would give -w(f).

Rank decisions.  The windowed square compression always pairs a spurious
boundary kernel with a spurious cokernel, so ranks are read off rectangular
sub-blocks whose columns are exact restrictions of the semi-infinite
operator: columns within one bandwidth of the artificial window edge are
dropped, the physical edge (mode 0) is kept.  Kernel vectors of smooth
unimodular symbols decay geometrically, so their singular values fall below
the zero threshold once the window is large enough; the window is escalated
deterministically until the zero/nonzero clusters separate cleanly and the
index is stable across three window sizes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndeterminateRankError, NotStabilizedError
from .fourier import FourierSeries
from .mode_space import (LoopFunction, ModeWindow, OneParticleOperator,
                         toeplitz_operator, winding_number)

RANK_THRESHOLD = 1e-7
RANK_GAP = 1e-3
BASE_MARGIN = 16
MAX_MARGIN = 80
STABILITY_STEPS = (0, 4, 8)


@dataclass(frozen=True)
class IndexReport:
    kernel_dim: int
    cokernel_dim: int
    q: int
    stable: bool
    window: int
    singular_values: tuple = field(default=())

    def __post_init__(self):
        if self.q != self.cokernel_dim - self.kernel_dim:
            raise ValueError("q must equal cokernel_dim - kernel_dim")


def _as_symbol(u) -> FourierSeries:
    if isinstance(u, LoopFunction):
        return u.fourier()
    if isinstance(u, OneParticleOperator):
        return u.toeplitz_symbol()
    if isinstance(u, FourierSeries):
        return u
    raise TypeError(f"cannot take a Toeplitz symbol from {type(u).__name__}")


def _edge_kernel_dim(block: np.ndarray, threshold: float, gap: float):
    """Count zero singular values, refusing when clusters do not separate.

    With the default threshold and gap the two clusters are at least four
    orders of magnitude apart whenever this returns.
    """
    sv = np.linalg.svd(block, compute_uv=False)
    zero = sv[sv < threshold]
    nonzero = sv[sv >= threshold]
    if len(nonzero) and nonzero.min() < gap:
        raise IndeterminateRankError(
            f"no spectral gap in singular values (smallest nonzero {nonzero.min():.2e})")
    return len(zero), sv


def _half_line_report(symbol: FourierSeries, n_max: int, side: int,
                      threshold: float, gap: float):
    """Kernel/cokernel of the compression to modes >= 0 (side=+1) or < 0 (side=-1).

    The compression matrix is cut from the windowed Toeplitz matrix; the
    bandwidth-wide column band next to the artificial edge (the window
    boundary, not the physical mode-0 edge) is dropped so every remaining
    column agrees with the semi-infinite operator.
    """
    b = symbol.bandwidth
    if n_max < b + 4:
        from .errors import InsufficientWindowError
        raise InsufficientWindowError(
            f"half-line compression needs n_max >= bandwidth + 4 = {b + 4}",
            required_n_max=b + 4)
    window = ModeWindow(n_max)
    m = toeplitz_operator(symbol, window).matrix
    half = n_max  # number of negative modes == index of mode 0
    if side > 0:
        sub = m[half:, half:]
        cut = slice(0, sub.shape[1] - b)
    else:
        sub = m[:half, :half]
        cut = slice(b, sub.shape[1])
    ker, sv_ker = _edge_kernel_dim(sub[:, cut], threshold, gap)
    cok, sv_cok = _edge_kernel_dim(sub.conj().T[:, cut], threshold, gap)
    return ker, cok, tuple(np.sort(np.concatenate([sv_ker, sv_cok]))[:8])


def charge_index(u, side: int = +1, base_n_max: int | None = None,
                 threshold: float = RANK_THRESHOLD, gap: float = RANK_GAP) -> IndexReport:
    """Charge index q = dim coker - dim ker of the half-line compression.

    ``u`` may be a LoopFunction, a Toeplitz OneParticleOperator, or a raw
    symbol series.  ``side=+1`` compresses by P (modes >= 0), ``side=-1`` by
    its complement.  The window starts at bandwidth + BASE_MARGIN (or the
    caller's ``base_n_max``) and is escalated until the rank decisions are
    clean and q agrees at three window sizes; failure to stabilize raises.
    """
    symbol = _as_symbol(u)
    if isinstance(u, OneParticleOperator):
        defect = u.interior_unitarity_defect()
        if defect > 1e-8:
            raise ValueError(f"operator is not unitary on the interior (defect {defect:.2e})")
    b = symbol.bandwidth
    margin = max(BASE_MARGIN, (base_n_max - b) if base_n_max else 0)
    last_error = None
    while margin <= MAX_MARGIN:
        try:
            reports = [_half_line_report(symbol, b + margin + extra, side, threshold, gap)
                       for extra in STABILITY_STEPS]
        except IndeterminateRankError as exc:
            last_error = exc
            margin += 8
            continue
        qs = [cok - ker for ker, cok, _ in reports]
        if all(q == qs[0] for q in qs):
            ker, cok, svs = reports[0]
            return IndexReport(kernel_dim=ker, cokernel_dim=cok, q=qs[0],
                               stable=True, window=b + margin, singular_values=svs)
        last_error = NotStabilizedError(
            f"index varies across windows: {qs}; enlarge n_max beyond {b + margin + 8}")
        margin += 8
    if isinstance(last_error, IndeterminateRankError):
        raise last_error
    raise NotStabilizedError(
        f"charge index did not stabilize up to n_max = {b + MAX_MARGIN}"
        + (f" ({last_error})" if last_error else ""))


def verify_additivity(f: LoopFunction, g: LoopFunction) -> bool:
    """q(U_f U_g) = q(U_f) + q(U_g), all three stable.

    The product is taken at the loop level (winding and phase add), which is
    exact; windowed matrix products only agree with the product loop on
    interior modes.
    """
    qf = charge_index(f)
    qg = charge_index(g)
    qfg = charge_index(f * g)
    return qfg.q == qf.q + qg.q


def index_winding_agreement(f: LoopFunction) -> bool:
    """ind P U_f P = w(f) under the fixed coker-minus-ker orientation."""
    return charge_index(f).q == winding_number(f)
