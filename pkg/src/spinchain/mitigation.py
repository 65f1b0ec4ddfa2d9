"""Synthetic noise and the mitigation pipeline: twirling, folding + ZNE,
and matrix-free subspace readout correction.

Noise is trajectory-sampled: every CNOT may inject a uniformly random
non-identity two-qubit Pauli (depolarizing channel, probability ``p`` per
CNOT) and/or a coherent ZZ over-rotation.  Shot statistics come from
splitting the shot budget across independently drawn trajectories, which
mirrors hardware sampling without ever forming a density matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.sparse.linalg import gmres

from . import gates as g
from .circuits import BLOCK, Circuit, phase_gauge_distance
from .errors import NumericsError
from .statevector import (
    StateVector,
    _apply_gate_nd,
    apply,
    apply_gate,
    sample,
    staggered_of_counts,
    staggered_of_quasi_probs,
)

PAULI_LABELS = ("I", "X", "Y", "Z")

_PAULI_GATES = {"X": g.x, "Y": g.y, "Z": g.z}


@dataclass(frozen=True)
class NoiseModel:
    """Synthetic error channels attached to every CNOT, plus readout flips.

    ``readout_flip`` holds one (p(read 1 | prepared 0), p(read 0 | prepared 1))
    pair per qubit; calibration is assumed given, never estimated.
    """

    two_qubit_depolarizing_p: float = 0.0
    coherent_zz_overrotation: float = 0.0
    readout_flip: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        if not 0.0 <= self.two_qubit_depolarizing_p < 1.0:
            raise ValueError("depolarizing probability must be in [0, 1)")
        if not -np.pi < self.coherent_zz_overrotation <= np.pi:
            raise ValueError("coherent over-rotation must be in (-pi, pi]")
        for p01, p10 in self.readout_flip:
            if not (0.0 <= p01 < 1.0 and 0.0 <= p10 < 1.0):
                raise ValueError("readout flip probabilities must be in [0, 1)")

    @property
    def gate_noise_free(self) -> bool:
        return self.two_qubit_depolarizing_p == 0.0 and self.coherent_zz_overrotation == 0.0


def uniform_readout_flip(n_qubits: int, p01: float, p10: float):
    return tuple((p01, p10) for _ in range(n_qubits))


@dataclass(frozen=True)
class MitigationPlan:
    """Knobs of one mitigated estimate.

    ``trajectories`` controls how many independent noise realizations share
    the shot budget of a circuit; it is an implementation knob with no
    physical analogue.  ``dynamical_decoupling`` is accepted for pipeline
    parity but is a no-op in this gate-level simulator.
    """

    twirl_copies: int = 10
    fold_scales: tuple[int, ...] = (1, 3, 5)
    shots: int = 10_000
    extrapolation: str = "quadratic"
    readout_mitigation: bool = True
    seed: int = 0
    trajectories: int = 50
    dynamical_decoupling: bool = False

    def __post_init__(self):
        if self.twirl_copies < 1:
            raise ValueError("twirl_copies must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.trajectories < 1:
            raise ValueError("trajectories must be >= 1")
        if self.extrapolation != "quadratic":
            raise ValueError(f"unknown extrapolation {self.extrapolation!r}")
        scales = self.fold_scales
        if len(scales) < 1 or any(s < 1 or s % 2 == 0 for s in scales):
            raise ValueError("fold_scales must be odd integers >= 1")
        if list(scales) != sorted(set(scales)):
            raise ValueError("fold_scales must be strictly ascending")


@lru_cache(maxsize=1)
def find_twirl_set() -> tuple[tuple[str, str, str, str], ...]:
    """Exhaustive search of all 256 Pauli 4-tuples leaving CNOT invariant.

    A tuple (P1, P2, P3, P4) qualifies when (P3 x P4) CNOT (P1 x P2) equals
    CNOT up to a global phase, with P1/P3 on the control and P2/P4 on the
    target.  The scan over 4^4 candidates returns 16 members.
    """
    cnot = g.gate_matrix(g.cx(0, 1))
    members = []
    for l1 in PAULI_LABELS:
        for l2 in PAULI_LABELS:
            for l3 in PAULI_LABELS:
                for l4 in PAULI_LABELS:
                    before = np.kron(g.PAULI_MATRICES[l1], g.PAULI_MATRICES[l2])
                    after = np.kron(g.PAULI_MATRICES[l3], g.PAULI_MATRICES[l4])
                    if phase_gauge_distance(cnot, after @ cnot @ before) < 1e-12:
                        members.append((l1, l2, l3, l4))
    return tuple(members)


def twirl(circuit: Circuit, copies: int, seed: int) -> list[Circuit]:
    """Wrap every CNOT of each copy in an independently drawn twirl tuple.

    Each copy's noiseless unitary equals the original up to global phase.
    """
    if circuit.level == BLOCK:
        raise ValueError("twirling operates on lowered circuits")
    twirls = find_twirl_set()
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(copies):
        gates: list[g.Gate] = []
        for gate in circuit.gates:
            if gate.kind != g.CNOT:
                gates.append(gate)
                continue
            control, target = gate.qubits
            l1, l2, l3, l4 = twirls[rng.integers(len(twirls))]
            for label, qubit in ((l1, control), (l2, target)):
                if label != "I":
                    gates.append(_PAULI_GATES[label](qubit))
            gates.append(gate)
            for label, qubit in ((l3, control), (l4, target)):
                if label != "I":
                    gates.append(_PAULI_GATES[label](qubit))
        out.append(Circuit(circuit.n_qubits, tuple(gates), circuit.level))
    return out


def fold(circuit: Circuit, scale: int) -> Circuit:
    """Local unitary folding: every CNOT becomes ``scale`` consecutive CNOTs."""
    if scale < 1 or scale % 2 == 0:
        raise ValueError(f"fold scale must be an odd integer >= 1, got {scale}")
    if scale == 1:
        return circuit
    out: list[g.Gate] = []
    bounds: list[int] = []
    step_iter = iter(circuit.step_bounds)
    next_bound = next(step_iter, None)
    for i, gate in enumerate(circuit.gates):
        if gate.kind == g.CNOT:
            out.extend([gate] * scale)
        else:
            out.append(gate)
        while next_bound is not None and next_bound == i + 1:
            bounds.append(len(out))
            next_bound = next(step_iter, None)
    return Circuit(circuit.n_qubits, tuple(out), circuit.level, tuple(bounds))


def apply_dynamical_decoupling(circuit: Circuit) -> Circuit:
    """Pipeline-parity stage: a gate-level simulator has no idle time to fill."""
    return circuit


def simulate_noisy(circuit: Circuit, noise: NoiseModel, state: StateVector, seed) -> StateVector:
    """One noise trajectory: after each CNOT, maybe inject a random two-qubit
    Pauli (probability ``p``), then the coherent ZZ over-rotation."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = noise.two_qubit_depolarizing_p
    angle = noise.coherent_zz_overrotation
    for gate in circuit.gates:
        apply_gate(state, gate)
        if gate.kind != g.CNOT:
            continue
        if p > 0.0 and rng.random() < p:
            k = int(rng.integers(1, 16))
            labels = (PAULI_LABELS[k // 4], PAULI_LABELS[k % 4])
            for label, qubit in zip(labels, gate.qubits):
                if label != "I":
                    apply_gate(state, _PAULI_GATES[label](qubit))
        if angle != 0.0:
            apply_gate(state, g.xyz_block(gate.qubits[0], gate.qubits[1], (0.0, 0.0, angle)))
    return state


def _simulate_noisy_batch(
    circuit: Circuit, noise: NoiseModel, init: StateVector, n_traj: int, rng
) -> np.ndarray:
    """All trajectories at once: gates hit the whole batch in one tensor op,
    only the sparse Pauli insertions touch individual trajectories.

    Returns an array of shape (2,)*n + (n_traj,).
    """
    n = circuit.n_qubits
    arr = np.repeat(init.amps[:, None], n_traj, axis=1).reshape((2,) * n + (n_traj,))
    p = noise.two_qubit_depolarizing_p
    angle = noise.coherent_zz_overrotation
    for gate in circuit.gates:
        arr = _apply_gate_nd(arr, n, gate)
        if gate.kind != g.CNOT:
            continue
        if p > 0.0:
            for k in np.nonzero(rng.random(n_traj) < p)[0]:
                draw = int(rng.integers(1, 16))
                labels = (PAULI_LABELS[draw // 4], PAULI_LABELS[draw % 4])
                view = arr[..., k]
                for label, qubit in zip(labels, gate.qubits):
                    if label != "I":
                        _apply_gate_nd(view, n, _PAULI_GATES[label](qubit))
        if angle != 0.0:
            zz = g.xyz_block(gate.qubits[0], gate.qubits[1], (0.0, 0.0, angle))
            arr = _apply_gate_nd(arr, n, zz)
    return arr


def sample_noisy(
    circuit: Circuit,
    noise: NoiseModel,
    init: StateVector,
    shots: int,
    trajectories: int,
    seed_seq: np.random.SeedSequence,
) -> dict[int, int]:
    """Shot counts from ``trajectories`` independent noise realizations."""
    if noise.gate_noise_free:
        state = apply(circuit, init.copy())
        return sample(state, shots, np.random.default_rng(seed_seq.spawn(1)[0]).integers(2**31))
    n_traj = min(trajectories, shots)
    rng = np.random.default_rng(seed_seq)
    flat = _simulate_noisy_batch(circuit, noise, init, n_traj, rng).reshape(-1, n_traj)
    base, extra = divmod(shots, n_traj)
    counts: dict[int, int] = {}
    for k in range(n_traj):
        probs = np.abs(flat[:, k]) ** 2
        hist = rng.multinomial(base + (1 if k < extra else 0), probs / probs.sum())
        for b in np.nonzero(hist)[0]:
            counts[int(b)] = counts.get(int(b), 0) + int(hist[b])
    return counts


def readout_corrupt(counts: dict[int, int], readout_flip, seed) -> dict[int, int]:
    """Flip each measured bit independently with its calibration probability."""
    if not counts:
        raise ValueError("empty counts")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = len(readout_flip)
    p01 = np.array([f[0] for f in readout_flip])
    p10 = np.array([f[1] for f in readout_flip])
    powers = 1 << np.arange(n)
    out: dict[int, int] = {}
    for index, count in sorted(counts.items()):
        bits = (index >> np.arange(n)) & 1
        flip_p = np.where(bits == 0, p01, p10)
        flips = rng.random((count, n)) < flip_p
        new_indices = index ^ (flips @ powers)
        for idx in new_indices:
            idx = int(idx)
            out[idx] = out.get(idx, 0) + 1
    return out


def _confusion_restricted(observed: list[int], readout_flip) -> np.ndarray:
    n = len(readout_flip)
    p01 = np.array([f[0] for f in readout_flip])
    p10 = np.array([f[1] for f in readout_flip])
    bits = np.array([[(s >> q) & 1 for q in range(n)] for s in observed])
    dim = len(observed)
    a = np.ones((dim, dim))
    for q in range(n):
        read = bits[:, q][:, None]
        true = bits[:, q][None, :]
        stay0, flip0 = 1.0 - p01[q], p01[q]
        stay1, flip1 = 1.0 - p10[q], p10[q]
        prob = np.where(
            true == 0, np.where(read == 0, stay0, flip0), np.where(read == 1, stay1, flip1)
        )
        a *= prob
    return a


def restricted_quasi_probs(counts: dict[int, int], readout_flip) -> dict[int, float]:
    """Solve the confusion model restricted to the observed bitstrings.

    The linear system uses only rows/columns of strings actually seen, per
    the matrix-free readout-mitigation approach; it is solved iteratively to
    1e-8 and renormalized to total weight one.  Entries may be negative.
    """
    if not counts:
        raise ValueError("empty counts")
    observed = sorted(counts)
    shots = sum(counts.values())
    freq = np.array([counts[s] / shots for s in observed])
    a = _confusion_restricted(observed, readout_flip)
    x, info = gmres(a, freq, rtol=1e-8, atol=0.0)
    if info != 0 or not np.all(np.isfinite(x)):
        cond = float(np.linalg.cond(a))
        raise NumericsError(
            f"readout mitigation solve failed (gmres info={info}); "
            f"restricted system size {len(observed)}, condition estimate {cond:.3e}"
        )
    total = x.sum()
    if abs(total) < 1e-12:
        raise NumericsError("readout mitigation produced a zero-mass quasi-distribution")
    x = x / total
    return {s: float(v) for s, v in zip(observed, x)}


def m3_mitigate(counts: dict[int, int], readout_flip) -> float:
    """Readout-mitigated staggered magnetization from bitstring counts."""
    n = len(readout_flip)
    quasi = restricted_quasi_probs(counts, readout_flip)
    return staggered_of_quasi_probs(quasi, n)


def zne_extrapolate(values, scales) -> float:
    """Least-squares quadratic fit in the fold scale, evaluated at zero."""
    values = np.asarray(values, dtype=float)
    scales = np.asarray(scales, dtype=float)
    if len(values) != len(scales) or len(scales) < 3:
        raise ValueError("need at least 3 (scale, value) pairs")
    if len(np.unique(scales)) != len(scales):
        raise ValueError(f"degenerate fold scales: {scales.tolist()}")
    coeffs = np.polyfit(scales, values, deg=2)
    return float(np.polyval(coeffs, 0.0))


@dataclass
class MitigatedEstimate:
    """Outputs of one pipeline run on one circuit.

    ``raw_per_scale`` holds uncorrected twirl-averaged values; the ZNE input
    is ``corrected_per_scale`` (readout-mitigated when enabled, twirl copies
    averaged per scale before fitting).
    """

    raw_per_scale: dict[int, float]
    corrected_per_scale: dict[int, float]
    zne: float
    per_copy_raw: dict[int, list[float]] = field(default_factory=dict)
    per_copy_corrected: dict[int, list[float]] = field(default_factory=dict)

    @property
    def raw_scale1(self) -> float:
        return self.raw_per_scale[min(self.raw_per_scale)]


def run_mitigated(
    circuit: Circuit,
    noise: NoiseModel,
    plan: MitigationPlan,
    init: StateVector,
    seed: int | None = None,
) -> MitigatedEstimate:
    """Full pipeline on one lowered circuit: fold x twirl x trajectories ->
    shots -> readout corruption -> subspace mitigation -> per-scale averages
    -> quadratic zero-noise extrapolation.

    Deterministic for a fixed seed: all randomness derives from one seed
    sequence, consumed in (scale, copy) order.
    """
    n = circuit.n_qubits
    flips = noise.readout_flip if noise.readout_flip else uniform_readout_flip(n, 0.0, 0.0)
    if len(flips) != n:
        raise ValueError(f"readout calibration covers {len(flips)} qubits, circuit has {n}")
    root = np.random.SeedSequence(plan.seed if seed is None else seed)
    raw_per_scale: dict[int, float] = {}
    corrected_per_scale: dict[int, float] = {}
    per_copy_raw: dict[int, list[float]] = {}
    per_copy_corrected: dict[int, list[float]] = {}
    has_readout = any(p01 > 0 or p10 > 0 for p01, p10 in flips)
    for scale, scale_seq in zip(plan.fold_scales, root.spawn(len(plan.fold_scales))):
        folded = apply_dynamical_decoupling(fold(circuit, scale))
        twirl_seed = int(np.random.default_rng(scale_seq.spawn(1)[0]).integers(2**31))
        copies = twirl(folded, plan.twirl_copies, twirl_seed)
        raw_vals: list[float] = []
        corr_vals: list[float] = []
        for copy, copy_seq in zip(copies, scale_seq.spawn(len(copies))):
            counts = sample_noisy(copy, noise, init, plan.shots, plan.trajectories, copy_seq)
            if has_readout:
                corrupt_rng = np.random.default_rng(copy_seq.spawn(1)[0])
                counts = readout_corrupt(counts, flips, corrupt_rng)
            raw_vals.append(staggered_of_counts(counts, n))
            if plan.readout_mitigation and has_readout:
                corr_vals.append(m3_mitigate(counts, flips))
            else:
                corr_vals.append(raw_vals[-1])
        raw_per_scale[scale] = float(np.mean(raw_vals))
        corrected_per_scale[scale] = float(np.mean(corr_vals))
        per_copy_raw[scale] = raw_vals
        per_copy_corrected[scale] = corr_vals
    zne = zne_extrapolate(
        [corrected_per_scale[s] for s in plan.fold_scales], list(plan.fold_scales)
    )
    return MitigatedEstimate(raw_per_scale, corrected_per_scale, zne, per_copy_raw, per_copy_corrected)
