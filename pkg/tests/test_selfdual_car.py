"""Doubled space, conjugation, Bogoljubov doublings, basis projections."""

import numpy as np
import pytest
import scipy.linalg

from car_lab import selfdual_car as sd
from car_lab.fourier import FourierSeries
from car_lab.mode_space import (LoopFunction, ModeWindow, OneParticleOperator,
                                multiplication_operator, regular_rep, shift_operator,
                                toeplitz_operator)

RNG = np.random.default_rng(77)
W = ModeWindow(6)


def rand_doubled():
    return sd.DoubledVector.of(
        W, RNG.normal(size=W.dim) + 1j * RNG.normal(size=W.dim),
        RNG.normal(size=W.dim) + 1j * RNG.normal(size=W.dim))


def test_doubled_vector_norm_splits():
    v = rand_doubled()
    assert v.norm_sq() == pytest.approx(
        np.linalg.norm(v.top) ** 2 + np.linalg.norm(v.bottom) ** 2)


def test_big_gamma_is_antilinear_involution():
    for _ in range(5):
        v = rand_doubled()
        again = sd.BIG_GAMMA.apply(sd.BIG_GAMMA.apply(v))
        assert np.allclose(again.top, v.top) and np.allclose(again.bottom, v.bottom)
    v = rand_doubled()
    c = 1.2 - 0.7j
    scaled = sd.DoubledVector.of(W, c * v.top, c * v.bottom)
    out = sd.BIG_GAMMA.apply(scaled)
    ref = sd.BIG_GAMMA.apply(v)
    assert np.allclose(out.top, np.conj(c) * ref.top)


def test_bogoljubov_double_identity_and_scalar():
    eye = sd.bogoljubov_double(OneParticleOperator(W, np.eye(W.dim)))
    assert eye.defect_from(sd.DoubledOperator(
        OneParticleOperator(W, np.eye(W.dim)), OneParticleOperator(W, np.eye(W.dim)))) == 0
    lam = np.exp(0.4j)
    phi = sd.bogoljubov_double(OneParticleOperator(W, lam * np.eye(W.dim)))
    # scalar doubles to diag(lam, conj(lam)) and commutes with the projection
    assert np.allclose(phi.bottom_block.matrix, np.conj(lam) * np.eye(W.dim))
    pi = sd.standard_basis_projection(W)
    assert sd.commutes_with_projection(phi, pi)


def test_shift_double_commutes_with_gamma():
    phi = sd.bogoljubov_double(shift_operator(W))
    assert phi.conjugated_by_gamma().defect_from(phi) < 1e-14


def test_antisym_double_requirements():
    a = toeplitz_operator(FourierSeries.real_cos(1), W)
    phi = sd.antisym_double(a)
    assert np.allclose(phi.bottom_block.matrix, -a.matrix)
    with pytest.raises(ValueError):
        sd.antisym_double(toeplitz_operator(FourierSeries.mode(1), W))  # not selfadjoint


def test_exponential_intertwines_doublings():
    a = toeplitz_operator(FourierSeries.real_cos(1), W)
    t = 0.3
    lhs_top = scipy.linalg.expm(1j * t * sd.antisym_double(a).top_block.matrix)
    lhs_bot = scipy.linalg.expm(1j * t * sd.antisym_double(a).bottom_block.matrix)
    rhs = sd.bogoljubov_double(OneParticleOperator(W, scipy.linalg.expm(1j * t * a.matrix)))
    assert np.abs(lhs_top - rhs.top_block.matrix).max() < 1e-12
    assert np.abs(lhs_bot - rhs.bottom_block.matrix).max() < 1e-12


def test_basis_projection_identities():
    pi = sd.standard_basis_projection(W)
    assert pi.idempotency_defect() < 1e-14
    assert pi.basis_projection_defect() < 1e-14


def test_doubling_is_multiplicative_on_interior():
    from car_lab.mode_space import GAMMA
    f, g = LoopFunction.basic(1), LoopFunction(0, {1: 0.2, -1: 0.2})
    w = ModeWindow(f.bandwidth + g.bandwidth + 6)
    uf = multiplication_operator(f, w)
    ug = multiplication_operator(g, w)
    prod = sd.bogoljubov_double(uf) @ sd.bogoljubov_double(ug)
    target = sd.DoubledOperator(uf @ ug, GAMMA.apply_operator(uf @ ug))
    assert prod.defect_from(target) < 1e-10


def test_commutes_with_projection_iff_diagonal_symbol():
    pi = sd.standard_basis_projection(W)
    diag = sd.bogoljubov_double(regular_rep(np.exp(1.1j), W))
    assert sd.commutes_with_projection(diag, pi)
    shift = sd.bogoljubov_double(shift_operator(W))
    assert not sd.commutes_with_projection(shift, pi)


def test_implementability_shift():
    out = sd.implementability_check(LoopFunction.basic(1))
    assert out["hs_norm_upper"] == pytest.approx(1.0, abs=1e-12)
    assert out["hs_norm_lower"] == pytest.approx(0.0, abs=1e-12)
    assert out["hs_converged"] is True
    assert (out["index_nonneg"].q, out["index_neg"].q) == (1, -1)
    assert out["index_sum"] == 0


def test_implementability_identity():
    out = sd.implementability_check(LoopFunction.identity_loop())
    assert out["hs_norm_upper"] == 0.0 and out["hs_norm_lower"] == 0.0
    assert out["index_sum"] == 0


def test_implementability_winding_two():
    out = sd.implementability_check(LoopFunction(2, {1: 0.2, -1: 0.2}))
    assert out["index_nonneg"].q == 2
    assert out["index_sum"] == 0
