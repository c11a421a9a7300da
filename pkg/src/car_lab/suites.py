"""Deterministic verification suites emitting machine-readable check records.

Each suite bundles the quantitative identities of one theme (index,
schwinger, weyl, grading, stabilizer); ``run_suite("all")`` concatenates
them.  Records are sorted by check id and reproducible bit-for-bit for a
fixed config and seed (runtimes are measured but zeroed on emission unless
explicitly requested, to keep reports diffable).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import commutant_lab, crossed_product, fock_engine, fredholm_index, weyl_ccr
from .config import LabConfig
from .fourier import FourierSeries
from .mode_space import (LoopFunction, ModeWindow, interior_columns_defect,
                         multiplication_operator, pairing, regular_rep,
                         schwinger_form, shift_offdiag_block, shift_operator,
                         hs_offdiag_norms, projection_nonneg)


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    params: dict
    value: object
    expected: object
    tolerance: float
    passed: bool
    window: int
    runtime_ms: int = 0

    def to_json_dict(self, timings: bool = False) -> dict:
        return {
            "check_id": self.check_id,
            "params": _jsonify(self.params),
            "value": _jsonify(self.value),
            "expected": _jsonify(self.expected),
            "tolerance": self.tolerance,
            "pass": self.passed,
            "window": self.window,
            "runtime_ms": self.runtime_ms if timings else 0,
        }


def _jsonify(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, dict):
        return {k: _jsonify(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonify(v) for v in x]
    return x


class _Recorder:
    def __init__(self):
        self.records = []

    def timed(self, check_id, window, fn, expected, tolerance, params=None):
        t0 = time.perf_counter()
        try:
            value = fn()
            passed = _matches(value, expected, tolerance)
        except Exception as exc:  # a failed check is a record, not a crash
            value = f"error: {type(exc).__name__}: {exc}"
            passed = False
        self.records.append(CheckRecord(
            check_id=check_id, params=params or {}, value=value, expected=expected,
            tolerance=float(tolerance), passed=passed, window=int(window),
            runtime_ms=int(1000 * (time.perf_counter() - t0))))


def _matches(value, expected, tolerance):
    if isinstance(expected, bool) or isinstance(value, bool):
        return value is expected or value == expected
    if isinstance(expected, int) and isinstance(value, (int, np.integer)):
        return int(value) == expected
    if isinstance(value, str):
        return False
    try:
        return bool(abs(complex(value) - complex(expected)) <= tolerance)
    except (TypeError, ValueError):
        return value == expected


def random_loop(rng, max_winding=3, phase_bandwidth=3, amplitude=0.15) -> LoopFunction:
    w = int(rng.integers(-max_winding, max_winding + 1))
    h = {}
    for k in range(1, phase_bandwidth + 1):
        re, im = rng.normal(0.0, amplitude, 2)
        h[k] = re + 1j * im
        h[-k] = np.conj(h[k])
    return LoopFunction(w, h)


def random_generator(rng, bandwidth=3, amplitude=0.4) -> weyl_ccr.GeneratorElement:
    d = {}
    for k in range(1, bandwidth + 1):
        re, im = rng.normal(0.0, amplitude, 2)
        d[k] = re + 1j * im
        d[-k] = np.conj(d[k])
    return weyl_ccr.GeneratorElement(FourierSeries.from_dict(d))


# ---------------------------------------------------------------------------
# suite: index  (finite-rank block, charge indices, covariance, index sums)
# ---------------------------------------------------------------------------

def suite_index(cfg: LabConfig) -> list:
    rec = _Recorder()
    rng = np.random.default_rng(cfg.seed)

    rec.timed("index.charge.basic_loop", 0,
              lambda: fredholm_index.charge_index(LoopFunction.basic(1)).q,
              expected=1, tolerance=0)
    rec.timed("index.charge.identity", 0,
              lambda: fredholm_index.charge_index(LoopFunction.identity_loop()).q,
              expected=0, tolerance=0)
    f2 = LoopFunction(2, {1: 0.1, -1: 0.1})
    gm1 = LoopFunction(-1, {2: 0.05j, -2: -0.05j})
    rec.timed("index.charge.product_w2_wm1", 0,
              lambda: fredholm_index.charge_index(f2 * gm1).q,
              expected=1, tolerance=0)

    def additivity_sweep():
        ok = 0
        for _ in range(50):
            f, g = random_loop(rng), random_loop(rng)
            if fredholm_index.verify_additivity(f, g):
                ok += 1
        return ok
    rec.timed("index.additivity.sweep50", 0, additivity_sweep, expected=50, tolerance=0)

    rec.timed("index.winding_agreement.basic", 0,
              lambda: fredholm_index.index_winding_agreement(LoopFunction.basic(1)),
              expected=True, tolerance=0)
    rec.timed("index.winding_agreement.zero_dressed", 0,
              lambda: fredholm_index.index_winding_agreement(LoopFunction(0, {1: 0.2, -1: 0.2})),
              expected=True, tolerance=0)
    rec.timed("index.winding_agreement.neg2_dressed", 0,
              lambda: fredholm_index.index_winding_agreement(
                  LoopFunction(-2, {1: -0.15j, -1: 0.15j})),
              expected=True, tolerance=0)

    def adjoint_negation():
        for _ in range(5):
            f = random_loop(rng)
            if fredholm_index.charge_index(f.inverse()).q != -fredholm_index.charge_index(f).q:
                return False
        return True
    rec.timed("index.adjoint_negation", 0, adjoint_negation, expected=True, tolerance=0)

    def zero_winding_invariance():
        for _ in range(5):
            f = random_loop(rng)
            g = random_loop(rng)
            g = LoopFunction(0, g.phase)
            if fredholm_index.charge_index(g * f).q != fredholm_index.charge_index(f).q:
                return False
        return True
    rec.timed("index.zero_winding_invariance", 0, zero_winding_invariance,
              expected=True, tolerance=0)

    def index_sum_sweep():
        ok = 0
        for _ in range(20):
            f = random_loop(rng)
            plus = fredholm_index.charge_index(f, side=+1).q
            minus = fredholm_index.charge_index(f, side=-1).q
            if plus + minus == 0:
                ok += 1
        return ok
    rec.timed("index.sum_zero.sweep20", 0, index_sum_sweep, expected=20, tolerance=0)

    for k in (1, 2, 3):
        def finite_rank(k=k):
            _, rank, clean = shift_offdiag_block(cfg.n_max, k)
            return rank if clean else -1
        rec.timed(f"index.finite_rank_block.K{k}", cfg.n_max, finite_rank,
                  expected=k, tolerance=0)

    space = fock_engine.fock_space(min(cfg.fock_n_max, 6))
    shift = fock_engine.shift_implementer(space)
    rec.timed("index.gauge_covariance.shift", space.n_max,
              lambda: fock_engine.gauge_covariance(space, shift, u=LoopFunction.basic(1)),
              expected=1, tolerance=0)
    rec.timed("index.gauge_covariance.shift_cubed", space.n_max,
              lambda: fock_engine.gauge_covariance(space, shift @ shift @ shift),
              expected=3, tolerance=0)
    rec.timed("index.gauge_covariance.gauge_is_neutral", space.n_max,
              lambda: fock_engine.gauge_covariance(space, fock_engine.gauge_implementer(space, 1j)),
              expected=0, tolerance=0)
    return rec.records


# ---------------------------------------------------------------------------
# suite: schwinger  (pairing, symplectic form, operator commutator)
# ---------------------------------------------------------------------------

def _gen_ops(*gens, n_max=None):
    b = max(g.bandwidth for g in gens)
    w = ModeWindow(max(2 * b, n_max or 0, 2))
    return [g.as_operator(w) for g in gens]


def suite_schwinger(cfg: LabConfig) -> list:
    rec = _Recorder()
    rng = np.random.default_rng(cfg.seed + 1)
    cos1 = weyl_ccr.GeneratorElement.cosine(1)
    sin1 = weyl_ccr.GeneratorElement.sine(1)
    cos2 = weyl_ccr.GeneratorElement.cosine(2, 3.0)

    a, b = _gen_ops(cos1, sin1)
    rec.timed("schwinger.pairing.cos1", a.window.n_max, lambda: pairing(a, a),
              expected=1.0, tolerance=cfg.tol_algebraic)
    const = weyl_ccr.GeneratorElement({0: 2.0})
    c_op, a2 = _gen_ops(const, cos1)
    rec.timed("schwinger.pairing.constant", c_op.window.n_max, lambda: pairing(c_op, c_op),
              expected=0.0, tolerance=cfg.tol_algebraic)
    (c2,) = _gen_ops(cos2)
    rec.timed("schwinger.pairing.cos2_amp3", c2.window.n_max, lambda: pairing(c2, c2),
              expected=18.0, tolerance=cfg.tol_algebraic)

    rec.timed("schwinger.form.cos_sin", a.window.n_max, lambda: schwinger_form(a, b),
              expected=2.0, tolerance=cfg.tol_quadrature)
    rec.timed("schwinger.form.self_vanishes", a.window.n_max, lambda: schwinger_form(a, a),
              expected=0.0, tolerance=cfg.tol_quadrature)

    def antisymmetry():
        worst = 0.0
        for _ in range(10):
            g1, g2 = random_generator(rng), random_generator(rng)
            o1, o2 = _gen_ops(g1, g2)
            worst = max(worst, abs(schwinger_form(o1, o2) + schwinger_form(o2, o1)))
        return worst
    rec.timed("schwinger.form.antisymmetry_sweep", 0, antisymmetry,
              expected=0.0, tolerance=cfg.tol_quadrature)

    def bilinearity():
        worst = 0.0
        for _ in range(5):
            g1, g2, g3 = (random_generator(rng) for _ in range(3))
            x, y = rng.normal(), rng.normal()
            o1, o2, o3 = _gen_ops(g1, g2, g3)
            lhs = schwinger_form(
                *( _gen_ops(weyl_ccr.GeneratorElement(g1.series.scale(x) + g2.series.scale(y)), g3)))
            worst = max(worst, abs(lhs - x * schwinger_form(o1, o3) - y * schwinger_form(o2, o3)))
        return worst
    rec.timed("schwinger.form.bilinearity_sweep", 0, bilinearity,
              expected=0.0, tolerance=cfg.tol_quadrature)

    space = fock_engine.fock_space(cfg.fock_n_max)
    wfock = space.window
    a_f = cos1.as_operator(wfock)
    b_f = sin1.as_operator(wfock)
    rec.timed("schwinger.commutator.cos_sin", space.n_max,
              lambda: fock_engine.schwinger_commutator(space, a_f, b_f),
              expected=2j, tolerance=cfg.tol_quadrature)
    rec.timed("schwinger.commutator.self_vanishes", space.n_max,
              lambda: fock_engine.schwinger_commutator(space, a_f, a_f),
              expected=0j, tolerance=cfg.tol_quadrature)
    cos2_f = weyl_ccr.GeneratorElement.cosine(2).as_operator(wfock)
    rec.timed("schwinger.commutator.mode_disjoint", space.n_max,
              lambda: fock_engine.schwinger_commutator(space, a_f, cos2_f),
              expected=0j, tolerance=cfg.tol_quadrature)

    def commutator_sweep():
        ok = 0
        for _ in range(10):
            g1 = random_generator(rng, bandwidth=2, amplitude=0.5)
            g2 = random_generator(rng, bandwidth=2, amplitude=0.5)
            o1 = g1.as_operator(wfock)
            o2 = g2.as_operator(wfock)
            z = fock_engine.schwinger_commutator(space, o1, o2)
            s = schwinger_form(*_gen_ops(g1, g2))
            if abs(z - 1j * s) <= cfg.tol_quadrature:
                ok += 1
        return ok
    rec.timed("schwinger.commutator.sweep10", space.n_max, commutator_sweep,
              expected=10, tolerance=0)

    def window_independence():
        w1 = ModeWindow(cfg.n_max)
        w2 = w1.enlarged(4)
        v1 = schwinger_form(cos1.as_operator(w1), sin1.as_operator(w1))
        v2 = schwinger_form(cos1.as_operator(w2), sin1.as_operator(w2))
        return abs(v1 - v2)
    rec.timed("schwinger.window_independence", cfg.n_max, window_independence,
              expected=0.0, tolerance=cfg.tol_window)
    return rec.records


# ---------------------------------------------------------------------------
# suite: weyl  (reduction, generating functional, requirements)
# ---------------------------------------------------------------------------

def suite_weyl(cfg: LabConfig) -> list:
    rec = _Recorder()
    rng = np.random.default_rng(cfg.seed + 2)
    cos1 = weyl_ccr.GeneratorElement.cosine(1)
    sin1 = weyl_ccr.GeneratorElement.sine(1)

    def inverse_pair():
        total, phase = weyl_ccr.reduce(weyl_ccr.WeylWord.of(cos1, -cos1))
        return abs(phase - 1.0) + total.series.max_abs()
    rec.timed("weyl.reduce.inverse_pair", 0, inverse_pair,
              expected=0.0, tolerance=cfg.tol_algebraic)

    def association_independence():
        worst = 0.0
        for _ in range(5):
            letters = [random_generator(rng, bandwidth=2) for _ in range(4)]
            base_sum, base_phase = weyl_ccr.reduce(weyl_ccr.WeylWord.of(*letters))
            for split in range(1, 4):
                left, lp = weyl_ccr.reduce(weyl_ccr.WeylWord.of(*letters[:split]))
                right, rp = weyl_ccr.reduce(weyl_ccr.WeylWord.of(*letters[split:]))
                total, tp = weyl_ccr.reduce(weyl_ccr.WeylWord((left, right), lp * rp))
                worst = max(worst, abs(tp - base_phase),
                            (total.series - base_sum.series).max_abs())
        return worst
    rec.timed("weyl.reduce.association_independence", 0, association_independence,
              expected=0.0, tolerance=cfg.tol_algebraic)

    rec.timed("weyl.commutation_phase.cos_sin", 0,
              lambda: weyl_ccr.commutation_phase(cos1, sin1),
              expected=np.exp(2j), tolerance=cfg.tol_algebraic)

    space_sign = fock_engine.fock_space(cfg.fock_n_max)
    def sign_oracle():
        w = space_sign.window
        return fock_engine.measured_weyl_sign(
            space_sign, cos1.as_operator(w), sin1.as_operator(w))
    rec.timed("weyl.phase_sign_oracle", space_sign.n_max, sign_oracle,
              expected=weyl_ccr.WEYL_PHASE_SIGN, tolerance=0)

    rec.timed("weyl.generating_functional.cos1", 0,
              lambda: weyl_ccr.generating_functional(cos1),
              expected=float(np.exp(-0.25)), tolerance=cfg.tol_algebraic)

    def scaling_law():
        base = np.log(weyl_ccr.generating_functional(cos1))
        worst = 0.0
        for c in (0.5, 2.0):
            worst = max(worst, abs(np.log(weyl_ccr.generating_functional(cos1.scale(c)))
                                   - c * c * base))
        return worst
    rec.timed("weyl.generating_functional.scaling", 0, scaling_law,
              expected=0.0, tolerance=1e-10)

    def mode_sum_match():
        g = random_generator(rng)
        norm = weyl_ccr.pairing_norm(g)
        series_sum = sum(k * abs(g.series[k]) ** 2 for k in range(1, g.bandwidth + 1))
        return abs(norm - series_sum)
    rec.timed("weyl.pairing_matches_mode_sum", 0, mode_sum_match,
              expected=0.0, tolerance=cfg.tol_algebraic)

    space = fock_engine.fock_space(cfg.fock_n_max)
    def vev_exponent():
        report = fock_engine.measure_generating_exponent(
            space, cos1.as_operator(space.window))
        return report["spread"]
    rec.timed("weyl.vev.exponent_constant_in_amplitude", space.n_max, vev_exponent,
              expected=0.0, tolerance=5e-3)

    def vev_kappa():
        report = fock_engine.measure_generating_exponent(
            space, cos1.as_operator(space.window))
        return report["kappa"]
    rec.timed("weyl.vev.measured_exponent", space.n_max, vev_kappa,
              expected=0.5, tolerance=5e-3,
              params={"stated_convention": 0.25})

    def vev_convergence():
        windows = [cfg.fock_n_max - 1, cfg.fock_n_max, cfg.fock_n_max + 1]
        values = []
        for n in windows:
            sp = fock_engine.fock_space(n)
            values.append(fock_engine.vacuum_weyl_expectation(
                sp, cos1.as_operator(sp.window), 1.0).real)
        deltas = [abs(v - values[-1]) for v in values[:-1]]
        return bool(deltas[0] >= deltas[1])
    rec.timed("weyl.vev.convergent_in_window", cfg.fock_n_max, vev_convergence,
              expected=True, tolerance=0)

    gens = [cos1, sin1, weyl_ccr.GeneratorElement.cosine(2)]
    rec.timed("weyl.requirements.loop_group_data", 0,
              lambda: weyl_ccr.requirements_checklist(gens, LoopFunction.basic(1)).all_pass,
              expected=True, tolerance=0)
    rec.timed("weyl.requirements.constant_degenerate", 0,
              lambda: weyl_ccr.requirements_checklist(
                  gens + [weyl_ccr.GeneratorElement({0: 1.0})],
                  LoopFunction.basic(1)).pairing_positive_definite,
              expected=False, tolerance=0)
    rec.timed("weyl.requirements.scaled_generator", 0,
              lambda: weyl_ccr.requirements_checklist(
                  [cos1.scale(10.0)], LoopFunction.basic(1)).all_pass,
              expected=True, tolerance=0)
    return rec.records


# ---------------------------------------------------------------------------
# suite: grading  (shift covariance, positivity, commutants, spectral grading)
# ---------------------------------------------------------------------------

def suite_grading(cfg: LabConfig) -> list:
    rec = _Recorder()
    rng = np.random.default_rng(cfg.seed + 3)

    def shift_covariance():
        w = ModeWindow(cfg.n_max)
        v = shift_operator(w)
        worst = 0.0
        for _ in range(20):
            zeta = np.exp(2j * np.pi * rng.random())
            u = regular_rep(zeta, w)
            lhs = u @ v @ regular_rep(np.conj(zeta), w)
            worst = max(worst, interior_columns_defect(lhs, v.scale(zeta), margin=1))
        return worst
    rec.timed("grading.shift_covariance.random_zeta", cfg.n_max, shift_covariance,
              expected=0.0, tolerance=cfg.tol_algebraic)

    for n in (4, 6):
        def positivity(n=n):
            report = fock_engine.spectrum_positivity(fock_engine.fock_space(n))
            return bool(report.min_eigenvalue >= -1e-12
                        and report.unique_zero_in_neutral_sector
                        and report.second_lowest_value == 1.0)
        rec.timed(f"grading.positivity.n{n}", n, positivity, expected=True, tolerance=0)

    for m in (4, 5):
        for k in (1, 2):
            def center_identity(m=m, k=k):
                model = commutant_lab.ClockShiftModel(m, k)
                out = commutant_lab.verify_center_identity(
                    model.fixed_point_generators(),
                    model.full_algebra_generators(), model.dim)
                return bool(out["equal"])
            rec.timed(f"grading.center_identity.M{m}K{k}", m * k, center_identity,
                      expected=True, tolerance=0)

    def minimal_case_a_equals_z():
        model = commutant_lab.ClockShiftModel(5, 1)
        a = commutant_lab.generated_algebra([model.clock], model.dim)
        z = commutant_lab.center(a)
        return commutant_lab.subspace_equal(a, z)
    rec.timed("grading.center_identity.minimal_A_equals_Z", 5, minimal_case_a_equals_z,
              expected=True, tolerance=0)

    def full_case_z_is_blocks():
        model = commutant_lab.ClockShiftModel(4, 2)
        out = commutant_lab.verify_center_identity(
            model.fixed_point_generators(), model.full_algebra_generators(), model.dim)
        z = out["z"]
        expected_basis = [model.block_projection(n) for n in range(model.modulus)]
        spans = all(z.contains(e) for e in expected_basis)
        return bool(spans and z.dim == model.modulus)
    rec.timed("grading.center_identity.multiplicity_blocks", 8, full_case_z_is_blocks,
              expected=True, tolerance=0)

    def double_commutant():
        model = commutant_lab.ClockShiftModel(5, 2)
        a = commutant_lab.generated_algebra(model.fixed_point_generators(), model.dim)
        back = commutant_lab.commutant(commutant_lab.commutant(a))
        return commutant_lab.subspace_equal(a, back)
    rec.timed("grading.double_commutant", 10, double_commutant, expected=True, tolerance=0)

    def grading_exact():
        model = commutant_lab.ClockShiftModel(5, 1)
        f_elem = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
        report = commutant_lab.grading_report(model, f_elem)
        return max(report["reconstruction_defect"], report["fixed_point_defect"])
    rec.timed("grading.spectral_grading.random_element", 5, grading_exact,
              expected=0.0, tolerance=1e-12)

    def shift_is_pure_degree_one():
        model = commutant_lab.ClockShiftModel(5, 1)
        worst = 0.0
        for n in range(-2, 3):
            comp = commutant_lab.spectral_component(model.shift, n, model)
            target = model.shift if n == 1 else np.zeros_like(model.shift)
            worst = max(worst, float(np.abs(comp - target).max()))
        return worst
    rec.timed("grading.spectral_grading.shift_degree_one", 5, shift_is_pure_degree_one,
              expected=0.0, tolerance=1e-12)
    return rec.records


# ---------------------------------------------------------------------------
# suite: stabilizer  (crossed-product action, net locality)
# ---------------------------------------------------------------------------

def _random_unimodular(rng, bandwidth=2, amplitude=0.3):
    h = {}
    for k in range(1, bandwidth + 1):
        re, im = rng.normal(0.0, amplitude, 2)
        h[k] = re + 1j * im
        h[-k] = np.conj(h[k])
    w = int(rng.integers(-1, 2))
    return crossed_product.CircleFn.unimodular_from_phase(w, h)


def _random_graded(rng, theta0):
    terms = {}
    for n in rng.choice(np.arange(-2, 3), size=3, replace=False):
        series = FourierSeries.from_dict(
            {int(k): complex(rng.normal(), rng.normal()) for k in range(-1, 2)})
        terms[int(n)] = crossed_product.Coefficient(series, (("b", 0),))
    return crossed_product.GradedElement(terms, theta0)


def suite_stabilizer(cfg: LabConfig) -> list:
    rec = _Recorder()
    rng = np.random.default_rng(cfg.seed + 4)
    theta0 = 2 * np.pi / 5

    def basic_properties():
        f = crossed_product.CircleFn.coordinate().require_unimodular()
        x = crossed_product.GradedElement.shift_power(1, theta0)
        return crossed_product.check_stabilizer_properties(f, x, 1j).all_pass
    rec.timed("stabilizer.properties.coordinate_on_shift", 0, basic_properties,
              expected=True, tolerance=0)

    def homomorphism_sweep():
        ok = 0
        for _ in range(20):
            f, g = _random_unimodular(rng), _random_unimodular(rng)
            x = _random_graded(rng, theta0)
            lhs = crossed_product.stabilizer_action(
                f, crossed_product.stabilizer_action(g, x))
            rhs = crossed_product.stabilizer_action(f * g, x)
            if lhs.defect_from(rhs) <= 1e-10:
                ok += 1
        return ok
    rec.timed("stabilizer.homomorphism.sweep20", 0, homomorphism_sweep,
              expected=20, tolerance=0)

    def properties_sweep():
        ok = 0
        for _ in range(20):
            f = _random_unimodular(rng)
            x = _random_graded(rng, theta0)
            if crossed_product.check_stabilizer_properties(f, x, np.exp(0.7j)).all_pass:
                ok += 1
        return ok
    rec.timed("stabilizer.properties.sweep20", 0, properties_sweep,
              expected=20, tolerance=0)

    def inverse_action():
        f = _random_unimodular(rng)
        x = _random_graded(rng, theta0)
        back = crossed_product.stabilizer_action(
            f.conj(), crossed_product.stabilizer_action(f, x))
        return back.defect_from(x)
    rec.timed("stabilizer.inverse_action", 0, inverse_action,
              expected=0.0, tolerance=1e-10)

    def degree_zero_fixed():
        f = _random_unimodular(rng)
        x = crossed_product.GradedElement(
            {0: crossed_product.Coefficient(FourierSeries.from_dict({1: 1.0, -1: 0.5}), (("b", 0),))},
            theta0)
        return crossed_product.stabilizer_action(f, x).defect_from(x)
    rec.timed("stabilizer.fixes_degree_zero", 0, degree_zero_fixed,
              expected=0.0, tolerance=1e-14)

    bump1 = weyl_ccr.bump_generator(0.0)
    bump2 = weyl_ccr.bump_generator(np.pi)
    rec.timed("stabilizer.net_locality.disjoint_arcs", 0,
              lambda: abs(crossed_product.net_locality(bump1, bump2)["symplectic_form"]),
              expected=0.0, tolerance=cfg.tol_quadrature)

    bump3 = weyl_ccr.bump_generator(0.8)
    rec.timed("stabilizer.net_locality.overlap_nonzero", 0,
              lambda: bool(abs(crossed_product.net_locality(bump1, bump3)["symplectic_form"]) > 1e-4),
              expected=True, tolerance=0)

    rec.timed("stabilizer.net_monotonicity.arc_containment", 0,
              lambda: crossed_product.arc_contains((0.0, 2.0), (0.5, 1.5)),
              expected=True, tolerance=0)
    return rec.records


SUITES = {
    "index": suite_index,
    "schwinger": suite_schwinger,
    "weyl": suite_weyl,
    "grading": suite_grading,
    "stabilizer": suite_stabilizer,
}


def run_suite(name: str, cfg: LabConfig | None = None) -> list:
    """Run one named verification family (or ``all``), sorted by check id."""
    cfg = cfg or LabConfig()
    if name == "all":
        records = []
        for key in sorted(SUITES):
            records.extend(SUITES[key](cfg))
    elif name in SUITES:
        records = SUITES[name](cfg)
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    return sorted(records, key=lambda r: r.check_id)


# ---------------------------------------------------------------------------
# convergence sweeps
# ---------------------------------------------------------------------------

def convergence_sweep(check_id: str, windows, cfg: LabConfig | None = None) -> list:
    """Value of one windowed scalar across window sizes.

    Returns rows ``{window, value, delta}`` where delta is the distance to
    the largest-window value, plus a monotonicity flag on the final row.
    """
    cfg = cfg or LabConfig()
    cos1 = weyl_ccr.GeneratorElement.cosine(1)
    sin1 = weyl_ccr.GeneratorElement.sine(1)

    def value_at(n):
        if check_id == "vev":
            sp = fock_engine.fock_space(n)
            return fock_engine.vacuum_weyl_expectation(
                sp, cos1.as_operator(sp.window), 1.0).real
        if check_id == "pairing":
            w = ModeWindow(n)
            return pairing(cos1.as_operator(w), cos1.as_operator(w)).real
        if check_id == "hs_shift":
            w = ModeWindow(n)
            upper, _, _ = hs_offdiag_norms(shift_operator(w), projection_nonneg(w))
            return upper
        raise ValueError(f"sweep does not support check {check_id!r}")

    values = [float(value_at(int(n))) for n in windows]
    ref = values[-1]
    deltas = [abs(v - ref) for v in values]
    rows = [{"window": int(n), "value": v, "delta": d}
            for n, v, d in zip(windows, values, deltas)]
    inner = deltas[:-1]
    rows[-1]["monotone_decreasing"] = bool(
        all(inner[i] >= inner[i + 1] - 1e-15 for i in range(len(inner) - 1)))
    return rows
