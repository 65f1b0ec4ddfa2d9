"""Trotter builders: layer structure, gate counts, unitary correctness."""

import numpy as np
import pytest

import oracles
from spinchain import builders as b
from spinchain import chain as ch
from spinchain import circuits as c
from spinchain import gates as g

DT = 0.37


def plan_first(steps, dt=DT):
    return ch.TrotterPlan(ch.FIRST_ORDER, steps, dt)


def plan_merged(steps, dt=DT):
    return ch.TrotterPlan(ch.SECOND_ORDER_MERGED, steps, dt)


def test_chain_spec_validation():
    with pytest.raises(ValueError):
        ch.ChainSpec(5)
    with pytest.raises(ValueError):
        ch.ChainSpec(6, j2=0.5)  # J2 needs a multiple of 4
    with pytest.raises(ValueError):
        ch.ChainSpec(4, boundary="torus")
    with pytest.raises(ValueError):
        ch.ChainSpec(4, j1=-1.0)
    with pytest.raises(ValueError):
        ch.TrotterPlan(ch.FIRST_ORDER, 0, 0.1)


def test_theta_mapping():
    spec = ch.ChainSpec(8, j1=2.0, delta=0.5)
    tx, ty, tz = ch.theta_nn(spec, 0.1)
    assert tx == pytest.approx(2 * (2.0 / 4) * 0.1)
    assert ty == tx
    assert tz == pytest.approx(2 * (0.5 * 2.0 / 4) * 0.1)
    spec2 = ch.dimer(8)
    t2 = ch.theta_nnn(spec2, 0.1)
    assert t2 == pytest.approx((0.5 * 0.1 / 2,) * 3)


def test_first_order_small_layout():
    circ = b.build_first_order(ch.isotropic(4), plan_first(1))
    pairs = [gate.qubits for gate in circ.gates]
    assert pairs == [(0, 1), (2, 3), (1, 2)]
    assert c.cnot_count(c.lower(circ)) == 9


def test_first_order_pbc_adds_boundary_block():
    circ = b.build_first_order(ch.isotropic(4, ch.PBC), plan_first(1))
    assert [gate.qubits for gate in circ.gates] == [(0, 1), (2, 3), (1, 2), (3, 0)]


def test_first_order_unitary_matches_factor_oracle():
    n = 4
    spec = ch.isotropic(n)
    theta = ch.theta_nn(spec, DT)
    circ = b.build_first_order(spec, plan_first(1))
    expected = oracles.product_of_factors(oracles.first_order_factors(n, False, theta, 1), n)
    assert c.phase_gauge_distance(expected, c.unitary_of(c.lower(circ))) <= 1e-10


def test_first_order_rejects_bad_inputs():
    with pytest.raises(ValueError):
        b.build_first_order(ch.isotropic(4), plan_merged(1))
    with pytest.raises(ValueError):
        b.build_first_order(ch.dimer(8), plan_first(1))


def test_merged_layer_structure():
    n, steps = 8, 3
    circ = b.build_second_order_merged(ch.isotropic(n), plan_merged(steps))
    # 2M + 1 layers: M+1 even layers of n/2 blocks, M odd layers of n/2 - 1
    assert len(circ.gates) == (steps + 1) * (n // 2) + steps * (n // 2 - 1)
    assert c.depth(circ) == 2 * steps + 1
    theta = ch.theta_nn(ch.isotropic(n), DT)
    half = tuple(t / 2 for t in theta)
    assert circ.gates[0].params == pytest.approx(half)
    assert circ.gates[-1].params == pytest.approx(half)
    interior_even = circ.gates[(n // 2) + (n // 2 - 1)]
    assert interior_even.params == pytest.approx(theta)


def test_merged_rejects_j2():
    with pytest.raises(ValueError):
        b.build_second_order_merged(ch.dimer(8), plan_merged(1))


def test_merged_equals_unmerged_second_order_exactly():
    n, steps, dt = 6, 2, 0.2
    spec = ch.isotropic(n)
    theta = ch.theta_nn(spec, dt)
    half = tuple(t / 2 for t in theta)
    merged = c.unitary_of(b.build_second_order_merged(spec, plan_merged(steps, dt)))
    # unmerged symmetric step: even(t/2), odd(t/2), odd(t/2), even(t/2)
    factors = []
    for _ in range(steps):
        factors += [(p, half) for p in oracles.even_layer_pairs(n)]
        factors += [(p, half) for p in oracles.odd_layer_pairs(n, False)]
        factors += [(p, half) for p in oracles.odd_layer_pairs(n, False)]
        factors += [(p, half) for p in oracles.even_layer_pairs(n)]
    unmerged = oracles.product_of_factors(factors, n)
    assert np.max(np.abs(merged - unmerged)) <= 1e-12


def test_merged_unitary_matches_factor_oracle_pbc():
    n = 6
    spec = ch.isotropic(n, ch.PBC)
    theta = ch.theta_nn(spec, DT)
    circ = b.build_second_order_merged(spec, plan_merged(2))
    expected = oracles.product_of_factors(
        oracles.merged_second_order_factors(n, True, theta, 2), n
    )
    assert c.phase_gauge_distance(expected, c.unitary_of(c.lower(circ))) <= 1e-10


TABLE_HISO_CNOTS = {
    # (n, boundary): counts for Trotter steps 1..8, merged second order
    (20, ch.OBC): (87, 144, 201, 258, 315, 372, 429, 486),
    (100, ch.OBC): (447, 744, 1041, 1338, 1635, 1932, 2229, 2526),
    (20, ch.PBC): (90, 150, 210, 270, 330, 390, 450, 510),
    (96, ch.PBC): (432, 720, 1008, 1296, 1584, 1872, 2160, 2448),
}


def test_hiso_cnot_table_reproduced_exactly():
    for (n, bc), expected in TABLE_HISO_CNOTS.items():
        for steps, want in enumerate(expected, start=1):
            circ = b.build_second_order_merged(ch.isotropic(n, bc), plan_merged(steps))
            assert c.cnot_count(c.lower(circ)) == want, (n, bc, steps)


def test_hiso_cnot_per_step_increment_constant():
    circ = c.lower(b.build_second_order_merged(ch.isotropic(100), plan_merged(8)))
    m = c.metrics(circ)
    assert m.per_step_cnots[0] == 447
    assert set(m.per_step_cnots[1:]) == {297}


def test_dimer_swap_layers():
    assert b.swap_layer_pairs(8, 1, False) == [(1, 2), (5, 6)]
    assert b.swap_layer_pairs(8, 3, False) == [(3, 4)]
    assert b.swap_layer_pairs(8, 3, True) == [(3, 4), (7, 0)]
    assert b.swap_layer_pairs(20, 1, False) == [(1, 2), (5, 6), (9, 10), (13, 14), (17, 18)]
    assert b.swap_layer_pairs(20, 3, False) == [(3, 4), (7, 8), (11, 12), (15, 16)]


def test_dimer_rejects_bad_inputs():
    with pytest.raises(ValueError):
        b.build_dimer_step(ch.isotropic(8), plan_first(1))
    with pytest.raises(ValueError):
        b.build_dimer_step(ch.dimer(8), plan_merged(1))
    with pytest.raises(ValueError):
        ch.dimer(10)  # not a multiple of 4


def test_dimer_net_permutation_is_identity():
    # composing the step's swap gates alone must be the identity permutation
    for periodic in (False, True):
        circ = b.build_dimer_step(ch.dimer(8, ch.PBC if periodic else ch.OBC), plan_first(1))
        perm = list(range(8))
        for gate in circ.gates:
            if gate.kind == g.SWAP:
                a, bq = gate.qubits
                perm[a], perm[bq] = perm[bq], perm[a]
        assert perm == list(range(8))


def test_dimer_j2_subcircuit_with_zero_angles_is_identity():
    # swap layers cancel pairwise, zero-angle blocks are the identity
    n = 8
    swaps_a = b.swap_layer_pairs(n, 1, False)
    swaps_b = b.swap_layer_pairs(n, 3, False)
    zero = (0.0, 0.0, 0.0)
    gates = []
    gates += [g.swap(*p) for p in swaps_a]
    gates += [g.xyz_block(a, bq, zero) for a, bq in b.even_pairs(n)]
    gates += [g.swap(*p) for p in swaps_a + swaps_b]
    gates += [g.xyz_block(a, bq, zero) for a, bq in b.even_pairs(n)]
    gates += [g.swap(*p) for p in swaps_b]
    u = c.unitary_of(c.Circuit(n, tuple(gates), c.BLOCK))
    assert c.phase_gauge_distance(np.eye(1 << n), u) <= 1e-12


def test_dimer_raw_cnot_count_n20():
    # 19 J1 blocks + 20 J2 blocks + 18 swaps, times 3 CNOTs each
    circ = b.build_dimer_step(ch.dimer(20), plan_first(1))
    blocks = sum(1 for gate in circ.gates if gate.kind == g.XYZ_BLOCK)
    swaps = sum(1 for gate in circ.gates if gate.kind == g.SWAP)
    assert blocks == 19 + 20
    assert swaps == 18
    assert c.cnot_count(c.lower(circ)) == 171


@pytest.mark.parametrize("boundary", [ch.OBC, ch.PBC])
def test_dimer_unitary_matches_ordered_exponential_oracle(boundary):
    n = 8
    spec = ch.dimer(n, boundary)
    plan = plan_first(1, dt=0.23)
    circ = b.build_dimer_step(spec, plan)
    factors = oracles.dimer_step_factors(
        n, spec.periodic, ch.theta_nn(spec, plan.dt), ch.theta_nnn(spec, plan.dt)
    )
    expected = oracles.product_of_factors(factors, n)
    assert c.phase_gauge_distance(expected, c.unitary_of(c.lower(circ))) <= 1e-10


def test_depth_per_step_constant_in_system_size():
    sizes = (8, 12, 16, 20, 40, 100)
    for make_spec, plan, want in (
        (ch.isotropic, plan_first(3), 2),
        (ch.isotropic, plan_merged(3), 2),
        (ch.dimer, plan_first(3), 7),
    ):
        per_n = set()
        for n in sizes:
            spec = make_spec(n)
            per_n.add(b.depth_per_step(spec, plan))
            m = c.metrics(b.build_circuit(spec, plan))
            expected_steps = [want] * plan.steps
            if b.closing_layers(spec, plan):
                expected_steps[0] += 1
            assert list(m.per_step_depth) == expected_steps, (make_spec.__name__, n)
        assert per_n == {want}


def test_build_circuit_dispatch():
    assert b.build_circuit(ch.dimer(8), plan_first(1)).gates[0].kind == g.XYZ_BLOCK
    merged = b.build_circuit(ch.isotropic(8), plan_merged(2))
    assert c.depth(merged) == 5
    first = b.build_circuit(ch.isotropic(8), plan_first(2))
    assert c.depth(first) == 4
