"""Charge index of half-line Toeplitz compressions.

The independent oracle for every index value is the winding number obtained
by a phase-unwrap lift of the loop sampled from its defining formula; the
index machinery itself never sees that lift (it counts singular values of
edge-exact compressions).
"""

import numpy as np
import pytest

from car_lab import fredholm_index as fi
from car_lab.errors import CarLabError, IndeterminateRankError
from car_lab.fourier import FourierSeries
from car_lab.mode_space import LoopFunction, ModeWindow, multiplication_operator

RNG = np.random.default_rng(918273)


def lift_winding(f: LoopFunction) -> int:
    grid = 2 * np.pi * np.arange(1025) / 1024
    lift = np.unwrap(np.angle(f.evaluate(grid)))
    return round((lift[-1] - lift[0]) / (2 * np.pi))


def random_loop(max_w=3, amp=0.15):
    w = int(RNG.integers(-max_w, max_w + 1))
    h = {}
    for k in range(1, 4):
        c = RNG.normal(0, amp) + 1j * RNG.normal(0, amp)
        h[k] = c
        h[-k] = np.conj(c)
    return LoopFunction(w, h)


def test_up_shift_orientation():
    # the orientation is fixed so that the up-shift gets +1:
    # kernel empty, cokernel spanned by the mode-0 edge vector
    report = fi.charge_index(LoopFunction.basic(1))
    assert (report.kernel_dim, report.cokernel_dim, report.q) == (0, 1, 1)
    assert report.stable


def test_identity_loop():
    assert fi.charge_index(LoopFunction.identity_loop()).q == 0


def test_down_shift():
    report = fi.charge_index(LoopFunction.basic(-1))
    assert (report.kernel_dim, report.cokernel_dim, report.q) == (1, 0, -1)


def test_product_of_windings():
    f = LoopFunction(2, {1: 0.1, -1: 0.1})
    g = LoopFunction(-1, {2: 0.05j, -2: -0.05j})
    assert fi.charge_index(f * g).q == 1


def test_operator_input():
    f = LoopFunction.basic(1)
    op = multiplication_operator(f, ModeWindow(8))
    assert fi.charge_index(op).q == 1


def test_additivity_examples():
    f = LoopFunction.basic(1)
    assert fi.verify_additivity(f, f)
    g = random_loop()
    assert fi.verify_additivity(g, LoopFunction.identity_loop())


def test_additivity_sweep():
    for _ in range(10):
        assert fi.verify_additivity(random_loop(), random_loop())


def test_index_equals_lift_winding_sweep():
    for _ in range(10):
        f = random_loop()
        assert fi.charge_index(f).q == lift_winding(f)
        assert fi.index_winding_agreement(f)


def test_winding_agreement_examples():
    assert fi.index_winding_agreement(LoopFunction.basic(1))
    assert fi.index_winding_agreement(LoopFunction(0, {1: 0.2, -1: 0.2}))
    f = LoopFunction(-2, {1: -0.15j, -1: 0.15j})
    assert fi.charge_index(f).q == -2
    assert fi.index_winding_agreement(f)


def test_adjoint_negates_index():
    for _ in range(5):
        f = random_loop()
        assert fi.charge_index(f.inverse()).q == -fi.charge_index(f).q


def test_zero_winding_multiplication_invariance():
    for _ in range(5):
        f = random_loop()
        g = LoopFunction(0, random_loop().phase)
        assert fi.charge_index(g * f).q == fi.charge_index(f).q


def test_conjugation_by_zero_winding_unitary():
    # loops commute, so w f w^* = f exactly at the loop level
    f = random_loop()
    w = LoopFunction(0, {1: 0.3j, -1: -0.3j})
    conjugated = w * f * w.inverse()
    assert fi.charge_index(conjugated).q == fi.charge_index(f).q


def test_negative_side_index_is_opposite():
    for _ in range(5):
        f = random_loop()
        assert fi.charge_index(f, side=-1).q == -fi.charge_index(f, side=+1).q


def test_gap_rule_refuses_midband_singular_values():
    # a singular value caught between the zero threshold and the gap floor
    # must refuse the rank decision
    with pytest.raises(IndeterminateRankError):
        fi._edge_kernel_dim(np.diag([1.0, 5e-4]), fi.RANK_THRESHOLD, fi.RANK_GAP)
    n, sv = fi._edge_kernel_dim(np.diag([1.0, 1e-9]), fi.RANK_THRESHOLD, fi.RANK_GAP)
    assert n == 1


def test_underresolved_window_raises_indeterminate():
    # a strongly dressed loop whose kernel vector decays slowly: at this
    # window the decaying singular value sits mid-band
    f = LoopFunction(-1, {1: 0.9, -1: 0.9, 2: 0.4 - 0.2j, -2: 0.4 + 0.2j})
    symbol = f.fourier()
    with pytest.raises(IndeterminateRankError):
        fi._half_line_report(symbol, symbol.bandwidth + 12, +1,
                             fi.RANK_THRESHOLD, fi.RANK_GAP)
    # the adaptive escalation pushes past it
    assert fi.charge_index(f).q == -1


def test_half_line_report_guards_tiny_windows():
    symbol = LoopFunction.basic(1).fourier()
    with pytest.raises(CarLabError):
        fi._half_line_report(symbol, 3, +1, fi.RANK_THRESHOLD, fi.RANK_GAP)


def test_report_invariant():
    with pytest.raises(ValueError):
        fi.IndexReport(kernel_dim=1, cokernel_dim=1, q=1, stable=True, window=8)
