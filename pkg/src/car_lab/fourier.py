"""Finite Fourier series on the circle, as exact coefficient arrays.

Everything downstream (loops, multiplication operators, symplectic forms,
graded-element coefficients) is band-limited, so a series is just a complex
coefficient vector with a declared lowest frequency.  Products are
convolutions, rotations are diagonal phases, and exponentials are summed as
power series until the coefficient tail is negligible.
"""

from __future__ import annotations

import numpy as np

# coefficients with modulus below this are dropped when trimming supports
TRIM_EPS = 1e-15


class FourierSeries:
    """Immutable finite Fourier series sum_k c_k e^{i k alpha}.

    ``coeffs[i]`` is the coefficient of frequency ``kmin + i``.  Arrays are
    trimmed and marked read-only on construction.
    """

    __slots__ = ("coeffs", "kmin")

    def __init__(self, coeffs, kmin: int = 0, trim: bool = True):
        arr = np.asarray(coeffs, dtype=complex)
        if arr.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if trim:
            arr, kmin = _trim(arr, kmin)
        arr = arr.copy()
        arr.setflags(write=False)
        self.coeffs = arr
        self.kmin = int(kmin)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls) -> "FourierSeries":
        return cls(np.zeros(1), 0)

    @classmethod
    def one(cls) -> "FourierSeries":
        return cls(np.ones(1), 0)

    @classmethod
    def mode(cls, k: int, c=1.0) -> "FourierSeries":
        return cls(np.array([c]), k)

    @classmethod
    def from_dict(cls, d: dict) -> "FourierSeries":
        if not d:
            return cls.zero()
        kmin = min(d)
        arr = np.zeros(max(d) - kmin + 1, dtype=complex)
        for k, v in d.items():
            arr[k - kmin] = v
        return cls(arr, kmin)

    @classmethod
    def from_pairs(cls, pairs) -> "FourierSeries":
        """Build from ``[[k, re, im], ...]`` triples (the JSON wire form)."""
        return cls.from_dict({int(k): re + 1j * im for k, re, im in pairs})

    @classmethod
    def real_cos(cls, k: int, amplitude: float = 1.0) -> "FourierSeries":
        """amplitude * 2 cos(k alpha), i.e. coefficient ``amplitude`` at +-k."""
        return cls.from_dict({k: amplitude, -k: amplitude})

    @classmethod
    def real_sin(cls, k: int, amplitude: float = 1.0) -> "FourierSeries":
        """amplitude * 2 sin(k alpha), coefficients -i/+i at +-k."""
        return cls.from_dict({k: -1j * amplitude, -k: 1j * amplitude})

    # -- structure ----------------------------------------------------

    @property
    def kmax(self) -> int:
        return self.kmin + len(self.coeffs) - 1

    @property
    def bandwidth(self) -> int:
        """Support radius: smallest b with c_k = 0 for |k| > b."""
        if self.is_zero():
            return 0
        return max(abs(self.kmin), abs(self.kmax))

    def is_zero(self) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= TRIM_EPS))

    def __getitem__(self, k: int) -> complex:
        if self.kmin <= k <= self.kmax:
            return complex(self.coeffs[k - self.kmin])
        return 0j

    def to_dict(self) -> dict:
        return {self.kmin + i: complex(c) for i, c in enumerate(self.coeffs)
                if abs(c) > TRIM_EPS}

    def to_pairs(self) -> list:
        return [[k, c.real, c.imag] for k, c in sorted(self.to_dict().items())]

    @property
    def mean(self) -> complex:
        return self[0]

    # -- algebra ------------------------------------------------------

    def __add__(self, other: "FourierSeries") -> "FourierSeries":
        lo = min(self.kmin, other.kmin)
        hi = max(self.kmax, other.kmax)
        arr = np.zeros(hi - lo + 1, dtype=complex)
        arr[self.kmin - lo: self.kmin - lo + len(self.coeffs)] += self.coeffs
        arr[other.kmin - lo: other.kmin - lo + len(other.coeffs)] += other.coeffs
        return FourierSeries(arr, lo)

    def __sub__(self, other: "FourierSeries") -> "FourierSeries":
        return self + other.scale(-1.0)

    def scale(self, c) -> "FourierSeries":
        return FourierSeries(self.coeffs * c, self.kmin)

    def __mul__(self, other: "FourierSeries") -> "FourierSeries":
        if self.is_zero() or other.is_zero():
            return FourierSeries.zero()
        return FourierSeries(np.convolve(self.coeffs, other.coeffs),
                             self.kmin + other.kmin)

    def conj(self) -> "FourierSeries":
        """Pointwise complex conjugate: c_k -> conj(c_{-k})."""
        return FourierSeries(np.conj(self.coeffs)[::-1], -self.kmax)

    def rotate(self, theta: float) -> "FourierSeries":
        """Precompose with the rigid rotation alpha -> alpha + theta."""
        ks = np.arange(self.kmin, self.kmax + 1)
        return FourierSeries(self.coeffs * np.exp(1j * ks * theta), self.kmin)

    def derivative(self) -> "FourierSeries":
        ks = np.arange(self.kmin, self.kmax + 1)
        return FourierSeries(self.coeffs * 1j * ks, self.kmin)

    def without_mean(self) -> "FourierSeries":
        d = self.to_dict()
        d.pop(0, None)
        return FourierSeries.from_dict(d)

    # -- analysis -----------------------------------------------------

    def is_real(self, tol: float = 1e-12) -> bool:
        """Pointwise real-valuedness: c_{-k} = conj(c_k) for all k."""
        return not (self - self.conj()).max_abs() > tol

    def max_abs(self) -> float:
        return float(np.abs(self.coeffs).max()) if len(self.coeffs) else 0.0

    def evaluate(self, alphas) -> np.ndarray:
        alphas = np.asarray(alphas, dtype=float)
        ks = np.arange(self.kmin, self.kmax + 1)
        return np.exp(1j * np.outer(alphas, ks)) @ self.coeffs

    def sample(self, n: int) -> np.ndarray:
        """Values on the uniform grid alpha_j = 2 pi j / n."""
        return self.evaluate(2.0 * np.pi * np.arange(n) / n)

    def __repr__(self):
        return f"FourierSeries({self.to_dict()!r})"


def _trim(arr, kmin):
    keep = np.abs(arr) > TRIM_EPS
    if not keep.any():
        return np.zeros(1, dtype=complex), 0
    i0 = int(np.argmax(keep))
    i1 = len(keep) - int(np.argmax(keep[::-1]))
    return arr[i0:i1], kmin + i0


def exp_series(x: FourierSeries, tol: float = 1e-14,
               max_terms: int = 500) -> FourierSeries:
    """Coefficients of e^{x} by the power series on Fourier coefficients.

    Terms are accumulated until the l1 norm of the current term drops below
    ``tol``; afterwards coefficients below the trim threshold are dropped,
    which fixes the effective bandwidth of the result.
    """
    result = FourierSeries.one()
    term = FourierSeries.one()
    for j in range(1, max_terms + 1):
        term = (term * x).scale(1.0 / j)
        result = result + term
        if np.abs(term.coeffs).sum() < tol:
            return result
    raise ArithmeticError(f"exponential series did not converge in {max_terms} terms")


def quadrature_mean(values: np.ndarray) -> complex:
    """(1/2pi) integral over the circle as the mean of uniform samples.

    Exact for trig polynomials whose bandwidth is below the grid size.
    """
    return complex(np.mean(values))


def argument_winding(values: np.ndarray, min_modulus: float = 0.5) -> int:
    """Winding number of a sampled loop by continuous argument lift.

    Raises if any sample comes closer to the origin than ``min_modulus``,
    which would make the lift unreliable (corrupted data).
    """
    values = np.asarray(values)
    if np.abs(values).min() < min_modulus:
        raise ArithmeticError("loop passes too close to 0 for argument lift")
    ratios = np.roll(values, -1) / values
    total = float(np.angle(ratios).sum() / (2.0 * np.pi))
    w = round(total)
    if abs(total - w) > 1e-6:
        raise ArithmeticError(f"argument lift did not close up: {total}")
    return int(w)
