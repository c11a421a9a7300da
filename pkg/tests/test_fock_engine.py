"""Occupation-basis CAR engine: fields, currents, implementers, Weyl layer.

Brute-force oracles: anticommutators are formed as explicit sparse products,
spectra by exhaustive diagonal enumeration, implementer identities by
applying both sides to every margin-safe basis vector, the Weyl central
phase by dense matrix exponentials on small windows.
"""

import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sparse

from car_lab import fock_engine as fe
from car_lab.errors import (InsufficientWindowError, InternalConsistencyError,
                            MarginExhaustedError)
from car_lab.fourier import FourierSeries
from car_lab.mode_space import LoopFunction, toeplitz_operator
from car_lab.selfdual_car import BIG_GAMMA, DoubledVector, bogoljubov_double
from car_lab.weyl_ccr import GeneratorElement

RNG = np.random.default_rng(424242)
SP = fe.fock_space(4)


def anticomm(a, b):
    return a @ b + b @ a


def rand_doubled(space):
    w = space.window
    return DoubledVector.of(w, RNG.normal(size=w.dim) + 1j * RNG.normal(size=w.dim),
                            RNG.normal(size=w.dim) + 1j * RNG.normal(size=w.dim))


# --- CAR relations -------------------------------------------------------------

def test_car_relations_all_pairs():
    sp = fe.fock_space(2)
    eye = sparse.identity(sp.dim)
    for p in range(-2, 3):
        for q in range(-2, 3):
            cc = anticomm(sp.annihilator(p), sp.annihilator(q))
            assert abs(cc).max() == 0.0
            mixed = anticomm(sp.annihilator(p), sp.creator(q))
            target = eye if p == q else 0 * eye
            assert abs(mixed - target).max() == 0.0


def test_vacuum_is_the_sea():
    state = fe.FockBasisState.from_mask(SP, SP.vacuum_index)
    assert state == fe.FockBasisState.vacuum()
    assert SP.charge[SP.vacuum_index] == 0
    assert SP.energy[SP.vacuum_index] == 0


def test_basis_state_roundtrip_and_energy():
    s = fe.FockBasisState(frozenset({0, 3}), frozenset({-2}))
    assert s.charge == 1
    assert s.energy == 0 + 3 + 2
    mask = s.to_mask(SP)
    assert fe.FockBasisState.from_mask(SP, mask) == s


# --- field operators -----------------------------------------------------------

def test_field_adjoint_is_gamma():
    for _ in range(5):
        h = rand_doubled(SP)
        b = fe.car_field(SP, h)
        b_conj = fe.car_field(SP, BIG_GAMMA.apply(h))
        assert abs(b.matrix.conj().T - b_conj.matrix).max() < 1e-12


def test_field_anticommutator_is_inner_product():
    for _ in range(5):
        h, k = rand_doubled(SP), rand_doubled(SP)
        lhs = anticomm(fe.car_field(SP, h).adjoint().matrix, fe.car_field(SP, k).matrix)
        inner = h.inner(k)
        assert abs(lhs - inner * sparse.identity(SP.dim)).max() < 1e-10


def test_vacuum_annihilated_by_projection_complement():
    # vectors in the annihilating half: (e_n, 0) with n < 0 and (0, e_m) with m <= 0
    vac = SP.vacuum_vector()
    w = SP.window
    for _ in range(10):
        f = np.zeros(w.dim, dtype=complex)
        g = np.zeros(w.dim, dtype=complex)
        for n in range(-SP.n_max, 0):
            f[w.index(n)] = RNG.normal() + 1j * RNG.normal()
        for m in range(-SP.n_max, 1):
            g[w.index(m)] = RNG.normal() + 1j * RNG.normal()
        b = fe.car_field(SP, DoubledVector.of(w, f, g))
        assert np.linalg.norm(b.matrix @ vac) < 1e-12


def test_unit_vector_field_squares_to_identity():
    w = SP.window
    f = np.zeros(w.dim, dtype=complex)
    f[w.index(2)] = 1.0  # (e_2, 0) lies in the basis-projection range
    b = fe.car_field(SP, DoubledVector.of(w, f, np.zeros(w.dim)))
    total = b.matrix @ b.matrix.conj().T + b.matrix.conj().T @ b.matrix
    assert abs(total - sparse.identity(SP.dim)).max() < 1e-12


# --- bilinears -----------------------------------------------------------------

def test_dgamma_zero():
    z = fe.dgamma(SP, toeplitz_operator(FourierSeries.zero(), SP.window))
    assert z.matrix.nnz == 0


def test_dgamma_energy_diagonal():
    from car_lab.mode_space import OneParticleOperator
    h = OneParticleOperator(SP.window, np.diag(SP.window.modes.astype(complex)))
    d = fe.dgamma(SP, h)
    diag = d.matrix.diagonal()
    assert abs(d.matrix - sparse.diags(diag)).max() == 0.0
    assert np.allclose(diag, SP.energy)
    assert np.allclose(fe.energy_generator(SP).matrix.toarray(), d.matrix.toarray())


def test_dgamma_vacuum_moment_matches_pairing():
    a = GeneratorElement.cosine(1).as_operator(SP.window)
    d = fe.dgamma(SP, a)
    vac = SP.vacuum_vector()
    assert abs(np.vdot(vac, d.matrix @ vac)) < 1e-14
    second = np.vdot(d.matrix @ vac, d.matrix @ vac)
    assert second == pytest.approx(1.0, abs=1e-12)  # pairing(2cos, 2cos) = 1


def test_dgamma_selfadjoint_and_real_linear():
    a = GeneratorElement.cosine(1).as_operator(SP.window)
    b = GeneratorElement.sine(2).as_operator(SP.window)
    da, db = fe.dgamma(SP, a), fe.dgamma(SP, b)
    assert da.hermitian_defect() < 1e-12
    combo = fe.dgamma(SP, a.scale(0.5) + b.scale(-2.0))
    assert abs(combo.matrix - (0.5 * da.matrix - 2.0 * db.matrix)).max() < 1e-12
    assert da.charge_shift == 0


def test_dgamma_commutator_against_field_transport():
    # [dG(A), B(h)] = B(phi(A) h) with phi(A) = diag(A, -A)
    a = GeneratorElement.cosine(1).as_operator(SP.window)
    d = fe.dgamma(SP, a).matrix
    for _ in range(5):
        h = rand_doubled(SP)
        b = fe.car_field(SP, h).matrix
        transported = fe.car_field(
            SP, DoubledVector.of(SP.window, a.matrix @ h.top, -a.matrix @ h.bottom)).matrix
        # boundary truncation leaks only through the band edge of A
        inner = fe.FockBasisState.vacuum().to_mask(SP)
        lhs = (d @ b - b @ d)
        assert abs((lhs - transported) @ SP.vacuum_vector()).max() < 1e-12


def test_bilinear_triplets_match_sparse_products():
    for p, q in [(0, 0), (2, -1), (-3, 1), (-1, -1)]:
        rows, cols, data = fe._bilinear_triplets(SP, p, q)
        direct = (SP.creator(p) @ SP.annihilator(q)).tocoo()
        built = sparse.coo_matrix((data, (rows, cols)), shape=(SP.dim, SP.dim))
        assert abs((built - direct).tocsr()).max() == 0.0


# --- Schwinger commutator ------------------------------------------------------

def test_schwinger_commutator_value():
    sp = fe.fock_space(6)
    a = GeneratorElement.cosine(1).as_operator(sp.window)
    b = GeneratorElement.sine(1).as_operator(sp.window)
    z = fe.schwinger_commutator(sp, a, b)
    # the measured scalar is i s(A,B) = 2i Im tr(P A Pperp B P), twice the
    # bare imaginary trace
    assert z == pytest.approx(2j, abs=1e-12)


def test_schwinger_commutator_self_and_disjoint_modes():
    sp = fe.fock_space(6)
    a = GeneratorElement.cosine(1).as_operator(sp.window)
    c = GeneratorElement.cosine(2).as_operator(sp.window)
    assert fe.schwinger_commutator(sp, a, a) == pytest.approx(0j, abs=1e-12)
    assert fe.schwinger_commutator(sp, a, c) == pytest.approx(0j, abs=1e-12)


def test_schwinger_commutator_margin_guard():
    a = GeneratorElement.cosine(2).as_operator(SP.window)
    with pytest.raises(InsufficientWindowError):
        fe.schwinger_commutator(SP, a, a)  # combined bandwidth 4 >= n_max 4


# --- implementers --------------------------------------------------------------

def test_gauge_implementer_spectrum():
    lam = np.exp(0.9j)
    phi = fe.gauge_implementer(SP, lam)
    assert abs(phi.matrix - sparse.diags(lam ** SP.charge)).max() == 0.0
    vac = SP.vacuum_vector()
    assert np.vdot(vac, phi.matrix @ vac) == pytest.approx(1.0)
    one_particle = fe.FockBasisState(frozenset({2}), frozenset()).to_mask(SP)
    assert phi.matrix[one_particle, one_particle] == pytest.approx(lam)
    assert fe.gauge_implementer(SP, 1.0).matrix.diagonal().min() == 1.0


def test_shift_implementer_vacuum_phase():
    phi = fe.shift_implementer(SP)
    vac = SP.vacuum_vector()
    image = phi.matrix @ vac
    target = SP.creator(0) @ vac  # c*_0 |Omega>, phase +1 exactly
    assert np.abs(image - target).max() == 0.0
    assert phi.charge_shift == 1


def test_shift_implementer_intertwines_fields():
    # Phi B(h) = B(phi(V) h) Phi on states clear of the window boundary
    phi = fe.shift_implementer(SP).matrix
    v = toeplitz_operator(FourierSeries.mode(1), SP.window)
    doubled_shift = bogoljubov_double(v)
    safe = SP.margin_safe_mask(2)
    for _ in range(10):
        h = rand_doubled(SP)
        # keep the vector one mode clear of both edges so V h stays in-window
        h = DoubledVector.of(SP.window, _clip_edges(h.top), _clip_edges(h.bottom))
        b = fe.car_field(SP, h).matrix
        vh = doubled_shift.apply(h)
        b_transport = fe.car_field(SP, vh).matrix
        for mask in np.where(safe)[0][:20]:
            e = np.zeros(SP.dim, dtype=complex)
            e[mask] = 1.0
            lhs = phi @ (b @ e)
            rhs = b_transport @ (phi @ e)
            assert np.abs(lhs - rhs).max() < 1e-12


def _clip_edges(x):
    y = x.copy()
    y[0] = 0.0
    y[-1] = 0.0
    return y


def test_shift_margin_exhausted():
    top_state = fe.FockBasisState(frozenset({SP.n_max}), frozenset()).to_mask(SP)
    with pytest.raises(MarginExhaustedError):
        fe.apply_shift(SP, top_state)
    new, sign = fe.apply_shift(SP, SP.vacuum_index)
    assert sign == (-1.0) ** SP.n_max
    assert fe.FockBasisState.from_mask(SP, new) == fe.FockBasisState(frozenset({0}), frozenset())


def test_gauge_covariance_exponents():
    sp = fe.fock_space(5)
    shift = fe.shift_implementer(sp)
    assert fe.gauge_covariance(sp, shift) == 1
    assert fe.gauge_covariance(sp, shift @ shift @ shift) == 3
    assert fe.gauge_covariance(sp, fe.gauge_implementer(sp, np.exp(0.3j))) == 0
    assert fe.gauge_covariance(sp, shift.adjoint()) == -1


def test_gauge_covariance_checks_charge_index():
    sp = fe.fock_space(5)
    shift = fe.shift_implementer(sp)
    assert fe.gauge_covariance(sp, shift, u=LoopFunction.basic(1)) == 1
    with pytest.raises(InternalConsistencyError):
        fe.gauge_covariance(sp, shift, u=LoopFunction.basic(-1))


def test_gauge_covariance_rejects_mixed_charge():
    mixed = fe.shift_implementer(SP) + fe.gauge_implementer(SP, 1.0)
    with pytest.raises(ValueError):
        fe.gauge_covariance(SP, mixed)


def test_charge_shift_bookkeeping():
    shift = fe.shift_implementer(SP)
    assert (shift @ shift).charge_shift == 2
    assert shift.adjoint().charge_shift == -1
    b = fe.car_field(SP, rand_doubled(SP))
    assert b.charge_shift is None


# --- Weyl layer ----------------------------------------------------------------

def test_weyl_exponential_identity_and_unitarity():
    w = fe.weyl_exponential(SP, toeplitz_operator(FourierSeries.zero(), SP.window))
    assert abs(w.matrix - sparse.identity(w.matrix.shape[0])).max() < 1e-12
    a = GeneratorElement.cosine(1).as_operator(SP.window)
    wa = fe.weyl_exponential(SP, a)
    eye = np.eye(wa.matrix.shape[0])
    assert np.abs((wa.matrix @ wa.matrix.conj().T) - eye).max() < 1e-9


def test_weyl_relation_central_phase_dense_oracle():
    # dense-exponential oracle: compare W(A) W(B) |vac> against W(A+B) |vac>;
    # the ratio is the central phase e^{+i s(A,B)/2} up to window truncation
    a = GeneratorElement.cosine(1).as_operator(SP.window)
    b = GeneratorElement.sine(1).as_operator(SP.window)
    wa = fe.weyl_exponential(SP, a).matrix.toarray()
    wb = fe.weyl_exponential(SP, b).matrix.toarray()
    wab = fe.weyl_exponential(SP, a + b).matrix.toarray()
    ix = SP.sector_indices(0)
    vac = np.zeros(len(ix), dtype=complex)
    vac[int(np.where(ix == SP.vacuum_index)[0][0])] = 1.0
    u = wa @ (wb @ vac)
    v = wab @ vac
    phase = np.vdot(v, u)
    s = 2.0  # schwinger_form(2cos, 2sin)
    assert abs(abs(phase) - 1.0) < 1e-3
    assert abs(phase - np.exp(0.5j * s)) < 2e-3
    assert np.linalg.norm(u - phase * v) < 2e-2  # truncation floor at n_max=4
    # the phase measurement helper agrees with the dense oracle
    assert abs(fe.weyl_central_phase(SP, a, b) - phase) < 1e-10
    # and converges to e^{+i s/2} as the window grows
    errors = []
    for n in (5, 6):
        sp = fe.fock_space(n)
        z = fe.weyl_central_phase(sp, GeneratorElement.cosine(1).as_operator(sp.window),
                                  GeneratorElement.sine(1).as_operator(sp.window))
        errors.append(abs(z - np.exp(0.5j * s)))
    assert errors[1] < errors[0] < 1e-4


def test_measured_weyl_sign_is_positive():
    sp = fe.fock_space(6)
    a = GeneratorElement.cosine(1).as_operator(sp.window)
    b = GeneratorElement.sine(1).as_operator(sp.window)
    assert fe.measured_weyl_sign(sp, a, b) == 1


def test_vacuum_expectation_gaussian_value():
    sp = fe.fock_space(6)
    a = GeneratorElement.cosine(1).as_operator(sp.window)
    for c in (0.25, 0.5, 1.0):
        vev = fe.vacuum_weyl_expectation(sp, a, c)
        assert vev.imag == pytest.approx(0.0, abs=1e-10)
        assert vev.real == pytest.approx(np.exp(-0.5 * c * c), abs=1e-8)


def test_measured_generating_exponent():
    sp = fe.fock_space(6)
    a = GeneratorElement.cosine(1).as_operator(sp.window)
    report = fe.measure_generating_exponent(sp, a)
    assert report["kappa"] == pytest.approx(0.5, abs=5e-3)
    assert report["spread"] < 5e-3
    assert report["pairing_norm"] == pytest.approx(1.0, abs=1e-12)


# --- positivity ----------------------------------------------------------------

def test_spectrum_positivity_enumeration():
    report = fe.spectrum_positivity(SP)
    assert report.min_eigenvalue == 0.0
    assert report.second_lowest_value == 1.0
    assert report.unique_zero_in_neutral_sector
    # the only zero modes are the vacuum and the charge-1 mode-0 state
    assert set(report.zero_states) == {
        fe.FockBasisState.vacuum(),
        fe.FockBasisState(frozenset({0}), frozenset()),
    }


def test_one_particle_and_one_hole_energies():
    p3 = fe.FockBasisState(frozenset({3}), frozenset())
    h2 = fe.FockBasisState(frozenset(), frozenset({-2}))
    assert SP.energy[p3.to_mask(SP)] == 3
    assert SP.energy[h2.to_mask(SP)] == 2


# --- generic implementer solver --------------------------------------------------

def test_solver_reproduces_gauge_implementer():
    sp = fe.fock_space(3)
    lam = np.exp(0.7j)
    from car_lab.mode_space import OneParticleOperator
    phi, report = fe.solve_implementer(
        sp, OneParticleOperator(sp.window, lam * np.eye(sp.window.dim)))
    target = fe.gauge_implementer(sp, lam)
    assert abs(phi.matrix - target.matrix).max() < 1e-10
    assert report["vacuum_residual"] < 1e-12


def test_solver_reproduces_shift_implementer():
    sp = fe.fock_space(3)
    phi, report = fe.solve_implementer(sp, LoopFunction.basic(1))
    target = fe.shift_implementer(sp)
    cols = np.nonzero(target.matrix.getnnz(axis=0))[0]
    assert abs((phi.matrix[:, cols] - target.matrix[:, cols]).toarray()).max() < 1e-10
    assert report["charge_shift"] == 1


def test_solver_dressed_loop_covariance():
    sp = fe.fock_space(4)
    f = LoopFunction(1, {1: 0.15, -1: 0.15})
    phi, report = fe.solve_implementer(sp, f)
    assert fe.gauge_covariance(sp, phi) == 1
    assert report["unitarity_defect"] < 1e-2  # truncation-limited, reported honestly
