"""Circuit intermediate representation: lowering, metrics, small-N unitaries.

Circuits exist at two levels.  Block-level circuits may contain two-site
interaction blocks (XYZ) and SWAP gates; lowered circuits contain only
{H, X, Y, Z, SX, SXDG, RZ, CX}.  Gate order is execution order and is never
reordered.  Circuits are immutable; every operation here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import gates as g
from .errors import CapacityError

BLOCK = "block"
LOWERED = "lowered"

UNITARY_MAX_QUBITS = 10


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list over ``n_qubits`` sites.

    ``step_bounds`` optionally marks Trotter-step boundaries as cumulative
    gate counts (one entry per step, the last equal to ``len(gates)``); the
    builders fill it in so that metrics can report per-step increments.
    """

    n_qubits: int
    gates: tuple[g.Gate, ...]
    level: str
    step_bounds: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("circuit needs at least one qubit")
        if self.level not in (BLOCK, LOWERED):
            raise ValueError(f"unknown circuit level {self.level!r}")
        for gate in self.gates:
            if any(q >= self.n_qubits for q in gate.qubits):
                raise ValueError(
                    f"gate {gate.kind} on {gate.qubits} exceeds qubit count {self.n_qubits}"
                )
            if self.level == LOWERED and gate.kind not in g.LOWERED_KINDS:
                raise ValueError(f"{gate.kind} gate is not allowed in a lowered circuit")
        if self.step_bounds:
            bounds = self.step_bounds
            if any(b2 < b1 for b1, b2 in zip(bounds, bounds[1:])) or bounds[-1] != len(self.gates):
                raise ValueError("step_bounds must be non-decreasing and end at len(gates)")

    @property
    def n_steps(self) -> int:
        return len(self.step_bounds)

    def prefix(self, n_gates: int) -> "Circuit":
        """Circuit truncated to its first ``n_gates`` gates (step bounds dropped)."""
        return Circuit(self.n_qubits, self.gates[:n_gates], self.level)


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    cnot_count: int
    per_step_cnots: tuple[int, ...]
    per_step_depth: tuple[int, ...]


def lower_block(block: g.Gate) -> tuple[g.Gate, ...]:
    """Lower one XYZ interaction block to the 3-CNOT, depth-7 gate sequence.

    The sequence realizes exp(-i (tx XX + ty YY + tz ZZ)/2) on the block's
    qubit pair (a, b) up to a global phase, with all CNOTs controlled on b.
    """
    if block.kind != g.XYZ_BLOCK:
        raise ValueError(f"expected an XYZ block, got {block.kind}")
    a, b = block.qubits
    tx, ty, tz = block.params
    return (
        g.cx(b, a),
        g.rz(a, tz),
        g.h(b),
        g.rz(b, tx + np.pi / 2),
        g.cx(b, a),
        g.rz(a, -ty),
        g.h(b),
        g.cx(b, a),
        g.sx(a),
        g.sxdg(b),
    )


def lower_swap(gate: g.Gate) -> tuple[g.Gate, ...]:
    """SWAP as three alternating CNOTs: CX(a,b), CX(b,a), CX(a,b)."""
    a, b = gate.qubits
    return (g.cx(a, b), g.cx(b, a), g.cx(a, b))


def lower(circuit: Circuit) -> Circuit:
    """Order-preserving lowering of every XYZ block and SWAP gate."""
    if circuit.level == LOWERED:
        return circuit
    out: list[g.Gate] = []
    bounds: list[int] = []
    step_iter = iter(circuit.step_bounds)
    next_bound = next(step_iter, None)
    for i, gate in enumerate(circuit.gates):
        if gate.kind == g.XYZ_BLOCK:
            out.extend(lower_block(gate))
        elif gate.kind == g.SWAP:
            out.extend(lower_swap(gate))
        else:
            out.append(gate)
        while next_bound is not None and next_bound == i + 1:
            bounds.append(len(out))
            next_bound = next(step_iter, None)
    return Circuit(circuit.n_qubits, tuple(out), LOWERED, tuple(bounds))


def cnot_count(circuit: Circuit) -> int:
    return sum(1 for gate in circuit.gates if gate.kind == g.CNOT)


def depth(circuit: Circuit) -> int:
    """ASAP-scheduled depth: number of layers with no two gates sharing a qubit."""
    frontier = [0] * circuit.n_qubits
    d = 0
    for gate in circuit.gates:
        layer = 1 + max(frontier[q] for q in gate.qubits)
        for q in gate.qubits:
            frontier[q] = layer
        d = max(d, layer)
    return d


def metrics(circuit: Circuit) -> CircuitMetrics:
    """Depth, CNOT count, and per-Trotter-step increments of both.

    Per-step values are deltas between consecutive step boundaries; they are
    empty when the circuit carries no step annotation.
    """
    frontier = [0] * circuit.n_qubits
    d = 0
    cnots = 0
    depth_at: list[int] = []
    cnots_at: list[int] = []
    step_iter = iter(circuit.step_bounds)
    next_bound = next(step_iter, None)
    for i, gate in enumerate(circuit.gates):
        layer = 1 + max(frontier[q] for q in gate.qubits)
        for q in gate.qubits:
            frontier[q] = layer
        d = max(d, layer)
        if gate.kind == g.CNOT:
            cnots += 1
        while next_bound is not None and next_bound == i + 1:
            depth_at.append(d)
            cnots_at.append(cnots)
            next_bound = next(step_iter, None)
    while next_bound is not None:  # empty trailing steps
        depth_at.append(d)
        cnots_at.append(cnots)
        next_bound = next(step_iter, None)
    per_step_depth = tuple(b - a for a, b in zip([0] + depth_at[:-1], depth_at))
    per_step_cnots = tuple(b - a for a, b in zip([0] + cnots_at[:-1], cnots_at))
    return CircuitMetrics(d, cnots, per_step_cnots, per_step_depth)


def unitary_of(circuit: Circuit) -> np.ndarray:
    """Dense 2^n x 2^n unitary of a circuit, little-endian basis ordering.

    Guarded at 10 qubits; this is a test oracle, not a simulation path.
    """
    n = circuit.n_qubits
    if n > UNITARY_MAX_QUBITS:
        raise CapacityError(f"unitary_of supports at most {UNITARY_MAX_QUBITS} qubits, got {n}")
    dim = 1 << n
    u = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for gate in circuit.gates:
        axes = g.qubit_axes(n, gate.qubits)
        u = g.apply_matrix(u, g.gate_matrix(gate), axes)
    return u.reshape(dim, dim)


def phase_gauge_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Max entry-wise distance between two arrays after fixing a global phase.

    The phase is gauged on the largest-magnitude entry of ``a``; if ``b``
    vanishes there the roles are swapped.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    if abs(b[idx]) < 1e-14:
        idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
        if abs(a[idx]) < 1e-14:
            return float(np.max(np.abs(a - b)))
    phase = a[idx] / b[idx]
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))


_KIND_ORDER = (
    g.HADAMARD, g.PAULI_X, g.PAULI_Y, g.PAULI_Z, g.SQRT_X, g.SQRT_X_DAGGER,
    g.ROT_Z, g.CNOT, g.SWAP, g.XYZ_BLOCK,
)


def to_text(circuit: Circuit) -> str:
    """Line-oriented serialization: header then one ``KIND q0 [q1] [angle...]`` per line."""
    lines = [f"qubits={circuit.n_qubits} level={circuit.level}"]
    for gate in circuit.gates:
        parts = [gate.kind, *map(str, gate.qubits), *(repr(p) for p in gate.params)]
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def from_text(text: str) -> Circuit:
    """Parse a circuit serialized by :func:`to_text` (step bounds are not kept)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty circuit text")
    header = dict(item.split("=", 1) for item in lines[0].split())
    try:
        n = int(header["qubits"])
        level = header["level"]
    except KeyError as exc:
        raise ValueError(f"missing header field {exc}") from exc
    parsed: list[g.Gate] = []
    for ln in lines[1:]:
        parts = ln.split()
        kind = parts[0]
        if kind not in _KIND_ORDER:
            raise ValueError(f"unknown gate kind {kind!r} in circuit text")
        n_qubits = 2 if kind in g.TWO_QUBIT_KINDS else 1
        n_params = {g.ROT_Z: 1, g.XYZ_BLOCK: 3}.get(kind, 0)
        if len(parts) != 1 + n_qubits + n_params:
            raise ValueError(f"malformed gate line: {ln!r}")
        qubits = tuple(int(p) for p in parts[1 : 1 + n_qubits])
        params = tuple(float(p) for p in parts[1 + n_qubits :])
        parsed.append(g.Gate(kind, qubits, params))
    return Circuit(n, tuple(parsed), level)


def relabel(circuit: Circuit, permutation: dict[int, int]) -> Circuit:
    """Relabel every qubit index through a permutation (testing helper)."""
    new_gates = tuple(
        replace(gate, qubits=tuple(permutation[q] for q in gate.qubits))
        for gate in circuit.gates
    )
    return Circuit(circuit.n_qubits, new_gates, circuit.level, circuit.step_bounds)
