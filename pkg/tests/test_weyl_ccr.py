"""Symbolic Weyl layer: reduction, functional, requirement checklist."""

import numpy as np
import pytest

from car_lab import weyl_ccr as wc
from car_lab.fourier import FourierSeries
from car_lab.mode_space import LoopFunction

RNG = np.random.default_rng(5150)

COS1 = wc.GeneratorElement.cosine(1)
SIN1 = wc.GeneratorElement.sine(1)
COS2 = wc.GeneratorElement.cosine(2)


def rand_gen(bandwidth=2, amp=0.5):
    d = {}
    for k in range(1, bandwidth + 1):
        c = RNG.normal(0, amp) + 1j * RNG.normal(0, amp)
        d[k] = c
        d[-k] = np.conj(c)
    return wc.GeneratorElement(FourierSeries.from_dict(d))


def test_generator_validation():
    with pytest.raises(ValueError):
        wc.GeneratorElement({1: 1.0})  # not real-valued
    g = wc.GeneratorElement({0: 2.0, 1: 1.0, -1: 1.0})
    assert not g.zero_mean
    assert COS1.zero_mean


def test_reduce_inverse_pair_is_identity():
    total, phase = wc.reduce(wc.WeylWord.of(COS1, -COS1))
    assert total.is_zero()
    assert phase == pytest.approx(1.0)


def test_reduce_singleton():
    total, phase = wc.reduce(wc.WeylWord.of(COS1))
    assert (total.series - COS1.series).max_abs() == 0
    assert phase == 1.0


def test_commutation_phase_value():
    # s(2cos, 2sin) = 2, measured sign +: phases differ by e^{2i}
    z = wc.commutation_phase(COS1, SIN1)
    assert z == pytest.approx(np.exp(2j), abs=1e-12)


def test_commutation_phase_disjoint_modes_trivial():
    assert wc.commutation_phase(COS1, COS2) == pytest.approx(1.0, abs=1e-12)


def _reduce_random_bracketing(letters, rng):
    """Reduce a word by collapsing random adjacent pairs, as a WeylWord tree."""
    items = [(g, 1.0 + 0j) for g in letters]
    while len(items) > 1:
        i = int(rng.integers(0, len(items) - 1))
        (a, pa), (b, pb) = items[i], items[i + 1]
        total, phase = wc.reduce(wc.WeylWord((a, b), pa * pb))
        items[i: i + 2] = [(total, phase)]
    return items[0]


def test_association_independence_random_bracketings():
    for trial in range(8):
        letters = [rand_gen() for _ in range(4)]
        ref_sum, ref_phase = wc.reduce(wc.WeylWord.of(*letters))
        for _ in range(4):
            total, phase = _reduce_random_bracketing(letters, RNG)
            assert abs(phase - ref_phase) < 1e-12
            assert (total.series - ref_sum.series).max_abs() < 1e-12


def test_generating_functional_values():
    assert wc.generating_functional(wc.GeneratorElement(FourierSeries.zero())) == 1.0
    assert wc.generating_functional(COS1) == pytest.approx(np.exp(-0.25), abs=1e-14)


def test_generating_functional_scaling_law():
    base = np.log(wc.generating_functional(COS1))
    for c in (0.5, 2.0):
        scaled = np.log(wc.generating_functional(COS1.scale(c)))
        assert scaled == pytest.approx(c * c * base, abs=1e-12)


def test_generating_functional_range():
    for _ in range(5):
        g = rand_gen()
        val = wc.generating_functional(g)
        assert 0.0 < val <= 1.0
    assert wc.generating_functional(wc.GeneratorElement(FourierSeries.zero())) == 1.0


def test_pairing_norm_is_mode_sum():
    g = rand_gen(bandwidth=3)
    explicit = sum(k * abs(g.series[k]) ** 2 for k in range(1, 4))
    assert wc.pairing_norm(g) == pytest.approx(explicit, abs=1e-12)


def test_requirements_loop_group_data():
    rep = wc.requirements_checklist([COS1, SIN1, COS2], LoopFunction.basic(1))
    assert rep.all_pass
    assert rep.details["gram_min_eigenvalue"] > 0


def test_requirements_constant_degenerates_pairing():
    rep = wc.requirements_checklist([COS1, SIN1, wc.GeneratorElement({0: 1.0})],
                                    LoopFunction.basic(1))
    assert not rep.pairing_positive_definite
    assert rep.generators_commute and rep.shift_stable
    assert not rep.all_pass


def test_requirements_scaling_irrelevant():
    rep = wc.requirements_checklist([COS1.scale(10.0)], LoopFunction.basic(1))
    assert rep.all_pass


def test_symplectic_matches_fock_pinned_sign_source():
    # the bilinear form used in reduction is exactly the one-particle layer's
    assert wc.symplectic(COS1, SIN1) == pytest.approx(2.0, abs=1e-10)


def test_bump_generator_profile():
    bump = wc.bump_generator(1.0, concentration=36.0)
    assert bump.zero_mean
    assert bump.series.is_real()
    assert bump.support is not None
    lo, hi = bump.support
    # outside the declared arc the (un-offset) profile is negligible
    grid = np.linspace(0, 2 * np.pi, 720, endpoint=False)
    vals = bump.series.evaluate(grid).real + np.exp(-36.0) * 0  # zero-mean part
    mean_offset = -np.exp(-36.0) * 0  # offset folded into the zero-mean profile
    halfwidth = ((hi - lo) % (2 * np.pi)) / 2
    center = (lo + halfwidth) % (2 * np.pi)
    dist = np.abs((grid - center + np.pi) % (2 * np.pi) - np.pi)
    outside = dist > halfwidth
    # off-arc values equal the constant mean shift to high accuracy
    off_values = vals[outside]
    assert np.ptp(off_values) < 1e-10


def test_json_roundtrip():
    g = rand_gen()
    h = wc.GeneratorElement.from_json_dict(g.to_json_dict())
    assert (g.series - h.series).max_abs() < 1e-15
    b = wc.bump_generator(0.5)
    b2 = wc.GeneratorElement.from_json_dict(b.to_json_dict())
    assert b2.support == pytest.approx(b.support)


def test_word_json_roundtrip():
    word = wc.WeylWord.of(COS1, SIN1)
    again = wc.WeylWord.from_json_dict(word.to_json_dict())
    total1, phase1 = wc.reduce(word)
    total2, phase2 = wc.reduce(again)
    assert abs(phase1 - phase2) < 1e-15
    assert (total1.series - total2.series).max_abs() < 1e-15
