"""State-vector backend: gate application, observables, Krylov evolution."""

import numpy as np
import pytest

import oracles
from spinchain import builders as b
from spinchain import chain as ch
from spinchain import circuits as c
from spinchain import gates as g
from spinchain import statevector as sv
from spinchain.errors import CapacityError


def test_neel_indices():
    assert sv.neel_index(2) == 0b10
    assert sv.neel_index(4) == 0b1010
    state = sv.init_neel(6)
    assert state.amps[sv.neel_index(6)] == 1.0
    assert state.norm() == pytest.approx(1.0)


def test_staggered_magnetization_reference_states():
    for n in (2, 4, 8, 10):
        assert sv.staggered_magnetization(sv.init_neel(n)) == pytest.approx(0.5)
    # anti-Neel: global spin flip negates the observable
    anti = sv.basis_state(4, 0b0101)
    assert sv.staggered_magnetization(anti) == pytest.approx(-0.5)
    uniform = sv.StateVector(3, np.full(8, 1 / np.sqrt(8), dtype=complex))
    assert sv.staggered_magnetization(uniform) == pytest.approx(0.0)


def test_apply_identity_and_x():
    state = sv.basis_state(3, 0)
    sv.apply(c.Circuit(3, (), c.LOWERED), state)
    assert state.amps[0] == 1.0
    sv.apply(c.Circuit(3, (g.x(0),), c.LOWERED), state)
    assert state.amps[1] == 1.0


def test_apply_each_gate_kind_matches_unitary():
    rng = np.random.default_rng(2)
    gates = [
        g.h(0), g.x(1), g.y(2), g.z(0), g.sx(1), g.sxdg(2),
        g.rz(0, 0.7), g.cx(0, 2), g.cx(2, 1),
        g.swap(1, 2), g.xyz_block(0, 2, (0.3, -0.4, 0.9)),
    ]
    circ = c.Circuit(3, tuple(gates), c.BLOCK)
    psi0 = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    psi0 /= np.linalg.norm(psi0)
    state = sv.StateVector(3, psi0.copy())
    sv.apply(circ, state)
    expected = c.unitary_of(circ) @ psi0
    assert np.max(np.abs(state.amps - expected)) <= 1e-12


def test_apply_dimer_step_matches_unitary_oracle():
    spec = ch.dimer(8)
    circ = c.lower(b.build_dimer_step(spec, ch.TrotterPlan(ch.FIRST_ORDER, 1, 0.2)))
    state = sv.init_neel(8)
    sv.apply(circ, state)
    expected = c.unitary_of(circ) @ sv.init_neel(8).amps
    assert np.max(np.abs(state.amps - expected)) <= 1e-12
    assert abs(state.norm() - 1.0) <= 1e-10


def test_apply_capacity_guard():
    state = sv.StateVector(29, np.zeros(2, dtype=complex))
    with pytest.raises(CapacityError):
        sv.apply(c.Circuit(29, (), c.LOWERED), state)


def test_hamming_sector_conservation_all_builders():
    # every built circuit preserves total Hamming weight exactly
    weights = None
    for spec, plan in (
        (ch.isotropic(8), ch.TrotterPlan(ch.FIRST_ORDER, 2, 0.4)),
        (ch.isotropic(8, ch.PBC), ch.TrotterPlan(ch.SECOND_ORDER_MERGED, 2, 0.4)),
        (ch.dimer(8, ch.PBC), ch.TrotterPlan(ch.FIRST_ORDER, 1, 0.4)),
    ):
        circ = c.lower(b.build_circuit(spec, plan))
        state = sv.apply(circ, sv.init_neel(8))
        idx = np.arange(1 << 8)
        if weights is None:
            weights = np.array([bin(i).count("1") for i in idx])
        leakage = np.abs(state.amps[weights != 4])
        assert leakage.max() <= 1e-12


def test_su2_symmetry_of_isotropic_hamiltonian():
    n = 6
    h = oracles.dense_hamiltonian(ch.hamiltonian_terms(ch.isotropic(n, ch.PBC)), n)
    for pauli in (oracles.X, oracles.Y, oracles.Z):
        total = np.zeros((1 << n, 1 << n), dtype=complex)
        for site in range(n):
            mats = [pauli if q == site else np.eye(2) for q in reversed(range(n))]
            term = mats[0]
            for m in mats[1:]:
                term = np.kron(term, m)
            total += 0.5 * term
        comm = h @ total - total @ h
        assert np.linalg.norm(comm) <= 1e-10


def test_hamiltonian_terms_layout():
    terms = ch.hamiltonian_terms(ch.dimer(8, ch.PBC))
    pairs_nn = {t[2] for t in terms if abs(t[2][0] - t[2][1]) in (1, 7)}
    assert len(terms) == 3 * 8 + 3 * 8
    assert (7, 0) in pairs_nn
    terms_obc = ch.hamiltonian_terms(ch.dimer(8))
    assert len(terms_obc) == 3 * 7 + 3 * 6


def test_apply_hamiltonian_matches_dense():
    rng = np.random.default_rng(4)
    for spec in (ch.isotropic(6), ch.dimer(8, ch.PBC), ch.ChainSpec(6, ch.PBC, delta=0.3)):
        n = spec.n_sites
        terms = ch.hamiltonian_terms(spec)
        psi = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
        state = sv.StateVector(n, psi)
        dense = oracles.dense_hamiltonian(terms, n)
        assert np.max(np.abs(sv.apply_hamiltonian(terms, state) - dense @ psi)) <= 1e-10


def test_exact_evolve_t_zero_is_identity():
    state = sv.init_neel(4)
    before = state.amps.copy()
    sv.exact_evolve(ch.hamiltonian_terms(ch.isotropic(4)), state, 0.0)
    assert np.array_equal(state.amps, before)


def test_exact_evolve_single_zz_term_analytic():
    # exp(-i J t ZZ) puts phase e^{-iJt} on aligned and e^{+iJt} on anti-aligned states
    j, t = 0.8, 1.7
    terms = [(j, "ZZ", (0, 1))]
    plus = sv.StateVector(2, np.array([1, 1, 1, 1], dtype=complex) / 2)
    sv.exact_evolve(terms, plus, t)
    expected = 0.5 * np.array(
        [np.exp(-1j * j * t), np.exp(1j * j * t), np.exp(1j * j * t), np.exp(-1j * j * t)]
    )
    assert np.max(np.abs(plus.amps - expected)) <= 1e-10


def test_exact_evolve_matches_dense_eigendecomposition_n12():
    n, t = 12, 1.0
    terms = ch.hamiltonian_terms(ch.isotropic(n))
    state = sv.exact_evolve(terms, sv.init_neel(n), t)
    dense = oracles.dense_hamiltonian(terms, n)
    psi = oracles.evolve_dense(dense, sv.init_neel(n).amps, t)
    got = sv.staggered_magnetization(state)
    want = float((np.abs(psi) ** 2) @ sv.staggered_weights(n))
    assert abs(got - want) <= 1e-8
    assert np.max(np.abs(state.amps - psi)) <= 1e-8


def test_exact_evolve_energy_drift_small():
    n = 8
    terms = ch.hamiltonian_terms(ch.isotropic(n, ch.PBC))
    state = sv.init_neel(n)
    e0 = sv.energy_expectation(terms, state)
    for _ in range(8):
        sv.exact_evolve(terms, state, 0.5)
    assert abs(sv.energy_expectation(terms, state) - e0) <= 1e-8


def test_exact_evolve_capacity_guard():
    state = sv.StateVector(21, np.zeros(4, dtype=complex))
    with pytest.raises(CapacityError):
        sv.exact_evolve([], state, 1.0)


def test_sample_basis_state():
    counts = sv.sample(sv.basis_state(4, 0b1010), 500, seed=1)
    assert counts == {0b1010: 500}


def test_sample_uniform_two_qubits():
    uniform = sv.StateVector(2, np.full(4, 0.5, dtype=complex))
    counts = sv.sample(uniform, 100_000, seed=7)
    sigma = np.sqrt(100_000 * 0.25 * 0.75)
    for k in range(4):
        assert abs(counts.get(k, 0) - 25_000) <= 5 * sigma


def test_sample_deterministic_and_magnetization_consistent():
    n = 10
    terms = ch.hamiltonian_terms(ch.isotropic(n))
    state = sv.exact_evolve(terms, sv.init_neel(n), 0.9)
    exact = sv.staggered_magnetization(state)
    counts = sv.sample(state, 10_000, seed=11)
    assert counts == sv.sample(state, 10_000, seed=11)
    est = sv.staggered_of_counts(counts, n)
    probs = np.abs(state.amps) ** 2
    w = sv.staggered_weights(n)
    se = np.sqrt((probs @ w**2 - exact**2) / 10_000)
    assert abs(est - exact) <= 4 * se


def test_trotterized_magnetization_converges_to_exact():
    # coarse check here; the slope fit lives in the acceptance suite
    n, t = 6, 0.8
    spec = ch.isotropic(n)
    terms = ch.hamiltonian_terms(spec)
    exact = sv.staggered_magnetization(sv.exact_evolve(terms, sv.init_neel(n), t))
    errs = []
    for steps in (2, 8):
        plan = ch.TrotterPlan(ch.SECOND_ORDER_MERGED, steps, t / steps)
        state = sv.apply(c.lower(b.build_circuit(spec, plan)), sv.init_neel(n))
        errs.append(abs(sv.staggered_magnetization(state) - exact))
    assert errs[1] < errs[0] / 4  # second order gains ~16x per 4x dt refinement
