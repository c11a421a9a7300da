"""Symbolic Weyl algebra over zero-mean real trig polynomials.

Weyl generators W(A) are never represented as operators; only their
composition law W(A) W(B) = e^{i sigma s(A,B)/2} W(A+B) is used, with the
symplectic form s delegated to the one-particle layer (single source of
truth) and the sign sigma pinned by the Fock-space oracle
``fock_engine.measured_weyl_sign`` (= +1 in the convention of this code
base).  The generating functional follows the quarter-exponent formula
e^{-<A,A>/4}; the fermionic vacuum measurement of the same quantity is
reported by the Fock engine, which is where the exponent question is
settled empirically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .fourier import FourierSeries, exp_series
from .mode_space import (ModeWindow, real_multiplication_operator,
                         pairing, schwinger_form)

# sign of the central phase in W(A) W(B) = e^{i sign * s(A,B)/2} W(A+B),
# measured once on the fermionic Fock representation
WEYL_PHASE_SIGN = +1


class GeneratorElement:
    """A real-valued trig polynomial, the generator datum of a Weyl element.

    Membership in the canonical generator space additionally requires zero
    mean (``zero_mean``); elements with a constant part are still accepted so
    the degeneracy they cause can be demonstrated rather than hidden.
    """

    __slots__ = ("series", "support")

    def __init__(self, series: FourierSeries | dict, support: tuple | None = None):
        if isinstance(series, dict):
            series = FourierSeries.from_dict(series)
        if not series.is_real():
            raise ValueError("generator must be a real-valued trig polynomial")
        self.series = series
        self.support = support  # declared arc (lo, hi), radians, or None

    @classmethod
    def cosine(cls, k: int, amplitude: float = 1.0) -> "GeneratorElement":
        return cls(FourierSeries.real_cos(k, amplitude))

    @classmethod
    def sine(cls, k: int, amplitude: float = 1.0) -> "GeneratorElement":
        return cls(FourierSeries.real_sin(k, amplitude))

    @property
    def bandwidth(self) -> int:
        return self.series.bandwidth

    @property
    def zero_mean(self) -> bool:
        return abs(self.series.mean) <= 1e-14

    def is_zero(self) -> bool:
        return self.series.is_zero()

    def __add__(self, other: "GeneratorElement") -> "GeneratorElement":
        return GeneratorElement(self.series + other.series)

    def scale(self, c: float) -> "GeneratorElement":
        return GeneratorElement(self.series.scale(c), self.support)

    def __neg__(self) -> "GeneratorElement":
        return self.scale(-1.0)

    def as_operator(self, window: ModeWindow):
        return real_multiplication_operator(self.series, window)

    def to_json_dict(self) -> dict:
        d = {"coeffs": self.series.to_pairs()}
        if self.support is not None:
            d["support"] = list(self.support)
        return d

    @classmethod
    def from_json_dict(cls, d: dict) -> "GeneratorElement":
        support = tuple(d["support"]) if "support" in d else None
        return cls(FourierSeries.from_pairs(d.get("coeffs", [])), support)

    @classmethod
    def load(cls, path: str) -> "GeneratorElement":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))

    def __repr__(self):
        return f"GeneratorElement({self.series.to_dict()!r})"


def common_window(*gens: GeneratorElement) -> ModeWindow:
    """Margin-safe window for pairings among the given generators."""
    b = max((g.bandwidth for g in gens), default=1)
    return ModeWindow(max(2 * b, 2))


def symplectic(a: GeneratorElement, b: GeneratorElement) -> float:
    """s(A, B) through the one-particle layer on an auto-sized window."""
    w = common_window(a, b)
    return schwinger_form(a.as_operator(w), b.as_operator(w))


def pairing_norm(a: GeneratorElement) -> float:
    """<A, A> = sum_m m |A_m|^2, via the windowed trace with cross-check."""
    w = common_window(a)
    return pairing(a.as_operator(w), a.as_operator(w)).real


@dataclass(frozen=True)
class WeylWord:
    """Ordered product of Weyl generators with an accumulated central phase."""

    letters: tuple
    phase: complex = 1.0 + 0j

    @classmethod
    def of(cls, *gens: GeneratorElement) -> "WeylWord":
        return cls(tuple(gens))

    def __mul__(self, other: "WeylWord") -> "WeylWord":
        return WeylWord(self.letters + other.letters, self.phase * other.phase)

    def to_json_dict(self) -> dict:
        return {"letters": [g.to_json_dict() for g in self.letters]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "WeylWord":
        return cls(tuple(GeneratorElement.from_json_dict(x) for x in d.get("letters", [])))

    @classmethod
    def load(cls, path: str) -> "WeylWord":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def reduce(word: WeylWord) -> tuple:
    """Normal form of a Weyl word: (sum of generators, central phase).

    Left fold of W(X) W(A) = e^{i sigma s(X,A)/2} W(X+A).  The result is
    independent of how the word was bracketed because the phase of a fold
    only ever sees sums of previously absorbed letters, and s is bilinear.
    """
    total = GeneratorElement(FourierSeries.zero())
    phase = complex(word.phase)
    for letter in word.letters:
        if not total.is_zero() and not letter.is_zero():
            phase *= np.exp(0.5j * WEYL_PHASE_SIGN * symplectic(total, letter))
        total = total + letter
    return total, phase


def commutation_phase(a: GeneratorElement, b: GeneratorElement) -> complex:
    """Phase z in W(A) W(B) = z W(B) W(A); equals e^{i sigma s(A,B)}."""
    _, p_ab = reduce(WeylWord.of(a, b))
    _, p_ba = reduce(WeylWord.of(b, a))
    return p_ab / p_ba


def generating_functional(a: GeneratorElement) -> float:
    """Quasi-free value f(A) = e^{-<A,A>/4}.

    The independent fermionic measurement of the vacuum expectation of
    W(A) lives in fock_engine.measure_generating_exponent; comparing the
    two is a suite/report concern, not hidden in this accessor.
    """
    return float(np.exp(-0.25 * pairing_norm(a)))


@dataclass(frozen=True)
class RequirementsReport:
    offdiag_hilbert_schmidt: bool
    generators_commute: bool
    pairing_positive_definite: bool
    shift_stable: bool
    details: dict = field(default_factory=dict, compare=False)

    @property
    def all_pass(self) -> bool:
        return (self.offdiag_hilbert_schmidt and self.generators_commute
                and self.pairing_positive_definite and self.shift_stable)


def requirements_checklist(generators, v1) -> RequirementsReport:
    """The four structural requirements for the loop-group generator data.

    (1) off-diagonal compressions of each generator are Hilbert-Schmidt
        (windowed norms converge under enlargement);
    (2) the generators commute pairwise as multiplication operators;
    (3) the pairing is positive definite on their span (Gram matrix);
    (4) conjugation by the reference winding-one loop preserves the span --
        multiplication operators commute, so the conjugated symbol is
        unchanged, checked at the coefficient level.
    """
    from .mode_space import hs_offdiag_norms, projection_nonneg
    generators = list(generators)
    w = common_window(*generators)

    hs_flags = []
    for g in generators:
        op = g.as_operator(w)
        _, _, converged = hs_offdiag_norms(op, projection_nonneg(w))
        hs_flags.append(bool(converged))
    req1 = all(hs_flags)

    # trig polynomials commute exactly; verify coefficient-level products
    req2 = True
    for i, g in enumerate(generators):
        for h in generators[i + 1:]:
            diff = g.series * h.series - h.series * g.series
            if diff.max_abs() > 1e-12:
                req2 = False

    gram = np.array([[pairing(g.as_operator(w), h.as_operator(w))
                      for h in generators] for g in generators])
    herm_defect = float(np.abs(gram - gram.conj().T).max())
    # the generator space is real-linear: definiteness of <sum x_i A_i, sum x_j A_j>
    # over real x is governed by the real symmetric part of the Gram matrix
    eigs = np.linalg.eigvalsh(0.5 * (gram + gram.conj().T).real)
    req3 = bool(herm_defect < 1e-10 and eigs.min() > 1e-12)

    # conjugating the symbol a by the loop f gives f a f^{-1} = a exactly
    v1_series = v1.fourier() if hasattr(v1, "fourier") else v1
    req4 = True
    for g in generators:
        conjugated = v1_series * g.series * v1_series.conj()
        if (conjugated - g.series).max_abs() > 1e-12:
            req4 = False

    return RequirementsReport(
        offdiag_hilbert_schmidt=req1,
        generators_commute=req2,
        pairing_positive_definite=req3,
        shift_stable=req4,
        details={"gram_min_eigenvalue": float(eigs.min()),
                 "hs_flags": hs_flags, "window": w.n_max},
    )


def bump_generator(center: float, concentration: float = 36.0,
                   arc_halfwidth: float | None = None) -> GeneratorElement:
    """A localized zero-mean generator: von Mises bump minus its mean.

    exp(kappa (cos(alpha - center) - 1)) decays below 1e-12 outside an arc of
    half-width arccos(1 - 28/kappa), so two such bumps with separated arcs
    give a numerically exact locality check.  The subtracted constant does
    not affect the symplectic form (the integrand pairs against derivatives).
    """
    series = exp_series(FourierSeries.real_cos(1, 0.5 * concentration))
    series = series.scale(np.exp(-concentration)).rotate(-center).without_mean()
    real_part = GeneratorElement(series)
    if arc_halfwidth is None:
        arc_halfwidth = float(np.arccos(max(-1.0, 1.0 - 28.0 / concentration)))
    lo = (center - arc_halfwidth) % (2 * np.pi)
    hi = (center + arc_halfwidth) % (2 * np.pi)
    return GeneratorElement(real_part.series, support=(lo, hi))
