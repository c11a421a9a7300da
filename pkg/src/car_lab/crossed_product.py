"""Symbolic Z-graded crossed product over C(S^1) (x) B with rotation twist.

Elements are finite sums  X = sum_n A_n V^n  with coefficients A_n given by
a circle function (exact Fourier data) tensored with a formal word in the
symbolic B-algebra.  The grading automorphism kappa rotates the circle part
(rigid rotation by theta0, exact as a coefficient phase) and advances a
formal marker power on the B-part, whose concrete action is never needed.

The stabilizer action of a unimodular circle function f multiplies the
degree-n coefficient by the cocycle prod_{j=1..n} f(sigma^j(mu)); negative
degrees follow from the group law.  All identities checked downstream
(automorphism property, commutation with the circle action, homomorphism in
f) are exact identities of Fourier coefficients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .fourier import FourierSeries

UNIMODULAR_TOL = 1e-10


class CircleFn:
    """Finite Fourier series on S^1 with an optional declared support arc."""

    __slots__ = ("series", "support")

    def __init__(self, series: FourierSeries | dict, support: tuple | None = None):
        if isinstance(series, dict):
            series = FourierSeries.from_dict(series)
        self.series = series
        self.support = support

    @classmethod
    def constant(cls, c=1.0) -> "CircleFn":
        return cls(FourierSeries.from_dict({0: c}))

    @classmethod
    def coordinate(cls) -> "CircleFn":
        """The identity chart mu -> mu."""
        return cls(FourierSeries.mode(1))

    @classmethod
    def unimodular_from_phase(cls, winding: int = 0, phase: dict | FourierSeries = None) -> "CircleFn":
        from .mode_space import LoopFunction
        loop = LoopFunction(winding, phase if phase is not None else FourierSeries.zero())
        return cls(loop.fourier())

    def unimodularity_defect(self, grid: int = 512) -> float:
        vals = self.series.sample(max(grid, 4 * self.series.bandwidth + 4))
        return float(np.abs(np.abs(vals) - 1.0).max())

    def require_unimodular(self) -> "CircleFn":
        defect = self.unimodularity_defect()
        if defect > UNIMODULAR_TOL:
            raise ValueError(f"circle function is not T-valued (defect {defect:.2e})")
        return self

    def __mul__(self, other: "CircleFn") -> "CircleFn":
        return CircleFn(self.series * other.series)

    def conj(self) -> "CircleFn":
        return CircleFn(self.series.conj())

    def rotate(self, theta: float) -> "CircleFn":
        return CircleFn(self.series.rotate(theta), self.support)

    def defect_from(self, other: "CircleFn") -> float:
        return (self.series - other.series).max_abs()

    def to_json_dict(self) -> dict:
        return {"coeffs": self.series.to_pairs()}

    @classmethod
    def from_json_dict(cls, d: dict) -> "CircleFn":
        return cls(FourierSeries.from_pairs(d.get("coeffs", [])))

    def __repr__(self):
        return f"CircleFn({self.series.to_dict()!r})"


class Coefficient:
    """Degree coefficient: a formal sum of (B-word, circle-part) tensors.

    A B-word is a tuple of (label, nu_power) letters; the twist marker
    nu_power records how many times the grading automorphism has acted on
    that letter.  Sums are collected by word, so products of graded elements
    (which mix different twist offsets into one degree) stay exact.
    """

    __slots__ = ("parts",)

    def __init__(self, circle: FourierSeries | dict | None = None, word: tuple = (),
                 parts: dict | None = None):
        if parts is None:
            if isinstance(circle, dict):
                circle = FourierSeries.from_dict(circle)
            parts = {tuple(word): circle if circle is not None else FourierSeries.zero()}
        clean = {}
        for w, series in parts.items():
            if series.is_zero():
                continue
            clean[tuple(w)] = clean[tuple(w)] + series if tuple(w) in clean else series
        self.parts = dict(sorted(clean.items()))

    @property
    def circle(self) -> FourierSeries:
        """The circle part, defined for single-word coefficients."""
        if len(self.parts) > 1:
            raise ValueError("coefficient is a sum over several B-words")
        return next(iter(self.parts.values())) if self.parts else FourierSeries.zero()

    @property
    def word(self) -> tuple:
        if len(self.parts) > 1:
            raise ValueError("coefficient is a sum over several B-words")
        return next(iter(self.parts.keys())) if self.parts else ()

    def is_zero(self) -> bool:
        return not self.parts

    def twisted(self, steps: int) -> "Coefficient":
        return Coefficient(parts={tuple((lbl, k + steps) for lbl, k in w): s
                                  for w, s in self.parts.items()})

    def rotate(self, theta: float) -> "Coefficient":
        return Coefficient(parts={w: s.rotate(theta) for w, s in self.parts.items()})

    def __add__(self, other: "Coefficient") -> "Coefficient":
        merged = dict(self.parts)
        for w, s in other.parts.items():
            merged[w] = merged[w] + s if w in merged else s
        return Coefficient(parts=merged)

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        out = {}
        for w1, s1 in self.parts.items():
            for w2, s2 in other.parts.items():
                w = w1 + w2
                piece = s1 * s2
                out[w] = out[w] + piece if w in out else piece
        return Coefficient(parts=out)

    def scale(self, c) -> "Coefficient":
        return Coefficient(parts={w: s.scale(c) for w, s in self.parts.items()})

    def scale_circle(self, series: FourierSeries) -> "Coefficient":
        return Coefficient(parts={w: s * series for w, s in self.parts.items()})

    def defect_from(self, other: "Coefficient") -> float:
        words = set(self.parts) | set(other.parts)
        worst = 0.0
        zero = FourierSeries.zero()
        for w in words:
            diff = self.parts.get(w, zero) - other.parts.get(w, zero)
            worst = max(worst, diff.max_abs())
        return worst


class GradedElement:
    """Finite sum sum_n A_n V^n with rotation angle theta0 configured."""

    __slots__ = ("terms", "theta0")

    def __init__(self, terms: dict, theta0: float):
        clean = {}
        for n, coeff in terms.items():
            if isinstance(coeff, (int, float, complex)):
                coeff = Coefficient(FourierSeries.from_dict({0: coeff}))
            elif isinstance(coeff, FourierSeries):
                coeff = Coefficient(coeff)
            elif isinstance(coeff, CircleFn):
                coeff = Coefficient(coeff.series)
            if not coeff.is_zero():
                clean[int(n)] = coeff
        self.terms = clean
        self.theta0 = float(theta0)

    @classmethod
    def shift_power(cls, n: int, theta0: float) -> "GradedElement":
        """The degree-n unitary V^n."""
        return cls({n: Coefficient(FourierSeries.one())}, theta0)

    def degrees(self) -> list:
        return sorted(self.terms)

    def kappa_on(self, coeff: Coefficient, steps: int = 1) -> Coefficient:
        return coeff.rotate(steps * self.theta0).twisted(steps)

    def __mul__(self, other: "GradedElement") -> "GradedElement":
        if abs(self.theta0 - other.theta0) > 1e-15:
            raise ValueError("rotation angle mismatch")
        out = {}
        for k, xk in self.terms.items():
            for m, ym in other.terms.items():
                piece = xk * self.kappa_on(ym, k)
                n = k + m
                out[n] = out[n] + piece if n in out else piece
        return GradedElement(out, self.theta0)

    def gauge_action(self, zeta: complex) -> "GradedElement":
        """alpha_zeta: multiply the degree-n coefficient by zeta^n."""
        return GradedElement({n: c.scale(complex(zeta) ** n)
                              for n, c in self.terms.items()}, self.theta0)

    def defect_from(self, other: "GradedElement") -> float:
        if self.degrees() != other.degrees():
            return float("inf")
        worst = 0.0
        for n in self.degrees():
            worst = max(worst, self.terms[n].defect_from(other.terms[n]))
        return worst

    def __repr__(self):
        return f"GradedElement(degrees={self.degrees()}, theta0={self.theta0})"

    def to_json_dict(self) -> dict:
        return {"theta0": self.theta0,
                "terms": [{"degree": n,
                           "parts": [{"word": [list(l) for l in w],
                                      "circle": [[k, c.real, c.imag]
                                                 for k, c in sorted(s.to_dict().items())]}
                                     for w, s in self.terms[n].parts.items()]}
                          for n in self.degrees()]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "GradedElement":
        """Accepts either {"degree", "parts": [...]} or the single-part
        shorthand {"degree", "circle": [[k,re,im],...], "word": [...]}."""
        terms = {}
        for t in d.get("terms", []):
            if "parts" in t:
                parts = {}
                for p in t["parts"]:
                    word = tuple((str(l[0]), int(l[1])) for l in p.get("word", []))
                    series = FourierSeries.from_pairs(p.get("circle", []))
                    parts[word] = parts[word] + series if word in parts else series
                coeff = Coefficient(parts=parts)
            else:
                series = FourierSeries.from_pairs(t.get("circle", []))
                word = tuple((str(l[0]), int(l[1])) for l in t.get("word", []))
                coeff = Coefficient(series, word)
            terms[int(t["degree"])] = coeff
        return cls(terms, float(d.get("theta0", 0.0)))

    @classmethod
    def load(cls, path: str) -> "GradedElement":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def kappa(x: GradedElement) -> GradedElement:
    """The grading automorphism applied coefficient-wise (degree preserved)."""
    return GradedElement({n: x.kappa_on(c) for n, c in x.terms.items()}, x.theta0)


def stabilizer_cocycle(f: CircleFn, n: int, theta0: float) -> FourierSeries:
    """The multiplier on degree n: prod_{j=1..n} f(sigma^j mu) for n >= 1,
    prod_{j=0..|n|-1} conj(f)(sigma^{-j} mu) for n <= -1, and 1 at n = 0."""
    acc = FourierSeries.one()
    if n >= 1:
        for j in range(1, n + 1):
            acc = acc * f.series.rotate(j * theta0)
    else:
        conj = f.series.conj()
        for j in range(0, -n):
            acc = acc * conj.rotate(-j * theta0)
    return acc


def stabilizer_action(f: CircleFn, x: GradedElement) -> GradedElement:
    """beta_f: fixes degree 0, multiplies degree n by the rotation cocycle of f."""
    f.require_unimodular()
    out = {n: c.scale_circle(stabilizer_cocycle(f, n, x.theta0)) if n != 0 else c
           for n, c in x.terms.items()}
    return GradedElement(out, x.theta0)


@dataclass(frozen=True)
class StabilizerReport:
    fixes_degree_zero: bool
    commutes_with_gauge: bool
    multiplicative: bool
    degree_one_central: bool
    details: dict

    @property
    def all_pass(self) -> bool:
        return (self.fixes_degree_zero and self.commutes_with_gauge
                and self.multiplicative and self.degree_one_central)


def check_stabilizer_properties(f: CircleFn, x: GradedElement,
                                zeta: complex, tol: float = 1e-12) -> StabilizerReport:
    """Structural checks for the stabilizer action of f at the element x.

    (i) degree-0 part fixed; (ii) beta_f commutes with the gauge action;
    (iii) beta_f is multiplicative (checked on x * x and x * V); (iv) the
    degree-one image of V factors as V times a central unimodular circle
    function with trivial B-word.
    """
    bx = stabilizer_action(f, x)
    zero_fixed = True
    if 0 in x.terms:
        zero_fixed = bx.terms[0].defect_from(x.terms[0]) <= tol

    lhs = stabilizer_action(f, x.gauge_action(zeta))
    rhs = stabilizer_action(f, x).gauge_action(zeta)
    commutes = lhs.defect_from(rhs) <= tol

    v = GradedElement.shift_power(1, x.theta0)
    mult = (stabilizer_action(f, x * x).defect_from(bx * bx) <= tol
            and stabilizer_action(f, x * v).defect_from(bx * stabilizer_action(f, v)) <= tol)

    bv = stabilizer_action(f, v)
    z_factor = bv.terms.get(1)
    central = (z_factor is not None and z_factor.word == ()
               and CircleFn(z_factor.circle).unimodularity_defect() <= 1e-8)

    return StabilizerReport(
        fixes_degree_zero=bool(zero_fixed),
        commutes_with_gauge=bool(commutes),
        multiplicative=bool(mult),
        degree_one_central=bool(central),
        details={"zeta": zeta, "theta0": x.theta0,
                 "cocycle_degree_one": CircleFn(z_factor.circle).to_json_dict()
                 if z_factor is not None else None},
    )


# ---------------------------------------------------------------------------
# net locality at the generator level
# ---------------------------------------------------------------------------

def arcs_disjoint(a: tuple, b: tuple) -> bool:
    """Closed-arc disjointness on the circle; arcs are (lo, hi) mod 2 pi."""
    two_pi = 2 * np.pi
    lo_a = a[0] % two_pi
    hi_a = lo_a + (a[1] - a[0]) % two_pi
    lo_b = b[0] % two_pi
    span_b = (b[1] - b[0]) % two_pi
    for shift in (-two_pi, 0.0, two_pi):
        lo, hi = lo_b + shift, lo_b + span_b + shift
        if hi >= lo_a and lo <= hi_a:  # closed intervals touching counts as overlap
            return False
    return True


def arc_contains(outer: tuple, inner: tuple) -> bool:
    lo_o, hi_o = outer
    span_o = (hi_o - lo_o) % (2 * np.pi)
    for t in inner:
        if (t - lo_o) % (2 * np.pi) > span_o + 1e-12:
            return False
    return True


def net_locality(a1, a2, tol: float = 1e-10) -> dict:
    """Locality of two support-carrying generators.

    Disjoint closed support arcs must give a vanishing symplectic form
    (hence commuting Weyl elements, phase 1); overlapping supports generally
    do not.  Raises when a support arc is undeclared.
    """
    from .weyl_ccr import GeneratorElement, symplectic, WEYL_PHASE_SIGN
    for g in (a1, a2):
        if not isinstance(g, GeneratorElement) or g.support is None:
            raise ValueError("net locality needs generators with declared support arcs")
    disjoint = arcs_disjoint(a1.support, a2.support)
    s = symplectic(a1, a2)
    phase = complex(np.exp(1j * WEYL_PHASE_SIGN * s))
    commute = abs(s) <= tol
    if disjoint and not commute:
        raise AssertionError(
            f"disjoint supports must commute: s = {s:.3e} exceeds {tol}")
    return {
        "supports_disjoint": disjoint,
        "symplectic_form": s,
        "commutation_phase": phase,
        "commute": commute,
    }
