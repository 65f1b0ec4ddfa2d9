"""Dense state-vector simulation, exact Krylov evolution, and shot sampling.

Spin-to-bit encoding: up-spin is bit 0, so S^z on site i reads +1/2 when bit
i of the basis index is 0.  The staggered magnetization carries sign +1 on
site 0, which makes the Neel state |up down up down ...> evaluate to +1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gates as g
from .circuits import Circuit
from .errors import CapacityError, NumericsError

APPLY_MAX_QUBITS = 28
EXACT_MAX_QUBITS = 20

Term = tuple[float, str, tuple[int, int]]


@dataclass
class StateVector:
    """Dense complex amplitudes over 2^n little-endian basis states."""

    n_qubits: int
    amps: np.ndarray

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


def basis_state(n_qubits: int, index: int) -> StateVector:
    amps = np.zeros(1 << n_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(n_qubits, amps)


def neel_index(n_qubits: int) -> int:
    """Basis index of |up down up down ...>: bits set at odd sites."""
    return sum(1 << i for i in range(1, n_qubits, 2))


def init_neel(n_qubits: int) -> StateVector:
    if n_qubits < 2:
        raise ValueError(f"need at least 2 sites, got {n_qubits}")
    return basis_state(n_qubits, neel_index(n_qubits))


def _axis_index(n: int, axis: int, value: int) -> tuple:
    return tuple(value if i == axis else slice(None) for i in range(n))


def _apply_gate_nd(arr: np.ndarray, n: int, gate: g.Gate) -> np.ndarray:
    """Apply a gate to an array shaped (2,)*n + trailing batch axes.

    Diagonal and permutation-like gates run in place on views; the rest go
    through the generic tensor contraction.  Returns the (possibly new)
    array.
    """
    kind = gate.kind
    if kind == g.ROT_Z:
        axis = n - 1 - gate.qubits[0]
        half = 0.5j * gate.params[0]
        arr[_axis_index(n, axis, 0)] *= np.exp(-half)
        arr[_axis_index(n, axis, 1)] *= np.exp(half)
        return arr
    if kind == g.PAULI_Z:
        axis = n - 1 - gate.qubits[0]
        arr[_axis_index(n, axis, 1)] *= -1.0
        return arr
    if kind == g.PAULI_X:
        axis = n - 1 - gate.qubits[0]
        lo = arr[_axis_index(n, axis, 0)].copy()
        arr[_axis_index(n, axis, 0)] = arr[_axis_index(n, axis, 1)]
        arr[_axis_index(n, axis, 1)] = lo
        return arr
    if kind == g.PAULI_Y:
        axis = n - 1 - gate.qubits[0]
        lo = arr[_axis_index(n, axis, 0)].copy()
        arr[_axis_index(n, axis, 0)] = -1j * arr[_axis_index(n, axis, 1)]
        arr[_axis_index(n, axis, 1)] = 1j * lo
        return arr
    if kind == g.CNOT:
        axis_c = n - 1 - gate.qubits[0]
        axis_t = n - 1 - gate.qubits[1]
        sub = arr[_axis_index(n, axis_c, 1)]
        sub_axis_t = axis_t - 1 if axis_t > axis_c else axis_t
        lo = sub[_axis_index(n - 1, sub_axis_t, 0)].copy()
        sub[_axis_index(n - 1, sub_axis_t, 0)] = sub[_axis_index(n - 1, sub_axis_t, 1)]
        sub[_axis_index(n - 1, sub_axis_t, 1)] = lo
        return arr
    if kind == g.XYZ_BLOCK and gate.params[0] == 0.0 and gate.params[1] == 0.0:
        # pure ZZ rotation: diagonal phases by two-bit parity
        ax_a = n - 1 - gate.qubits[0]
        ax_b = n - 1 - gate.qubits[1]
        half = 0.5j * gate.params[2]
        for va in (0, 1):
            for vb in (0, 1):
                idx = list(_axis_index(n, ax_a, va))
                idx[ax_b] = vb
                arr[tuple(idx)] *= np.exp(-half if va == vb else half)
        return arr
    if kind == g.SWAP:
        a1, a2 = (n - 1 - q for q in gate.qubits)
        return np.ascontiguousarray(arr.swapaxes(a1, a2))
    return g.apply_matrix(arr, g.gate_matrix(gate), g.qubit_axes(n, gate.qubits))


def _apply_gate(amps: np.ndarray, n: int, gate: g.Gate) -> np.ndarray:
    return _apply_gate_nd(amps.reshape((2,) * n), n, gate).reshape(-1)


def apply_gate(state: StateVector, gate: g.Gate) -> StateVector:
    """Apply a single gate (any kind, including block-level) in place."""
    state.amps = _apply_gate(state.amps, state.n_qubits, gate)
    return state


def apply(circuit: Circuit, state: StateVector) -> StateVector:
    """Apply a circuit's gates in order, mutating and returning the state.

    Block-level circuits are accepted too: XYZ blocks and SWAPs run as their
    4x4 matrices, which equals the lowered gate sequence up to global phase.
    """
    if circuit.n_qubits != state.n_qubits:
        raise ValueError(
            f"circuit acts on {circuit.n_qubits} qubits, state has {state.n_qubits}"
        )
    if state.n_qubits > APPLY_MAX_QUBITS:
        raise CapacityError(f"state-vector backend is capped at {APPLY_MAX_QUBITS} qubits")
    amps = state.amps
    n = state.n_qubits
    for gate in circuit.gates:
        amps = _apply_gate(amps, n, gate)
    state.amps = amps
    return state


def staggered_weights(n_qubits: int) -> np.ndarray:
    """Vector of staggered-magnetization values per basis index."""
    idx = np.arange(1 << n_qubits)
    w = np.zeros(1 << n_qubits)
    for i in range(n_qubits):
        bit = (idx >> i) & 1
        sign = 1.0 if i % 2 == 0 else -1.0
        w += sign * 0.5 * (1.0 - 2.0 * bit)
    return w / n_qubits


def staggered_magnetization(state: StateVector) -> float:
    """(1/N) sum_i (-1)^i <S_i^z> with site-0 sign +1."""
    probs = np.abs(state.amps) ** 2
    return float(probs @ staggered_weights(state.n_qubits))


def staggered_of_counts(counts: dict[int, int], n_qubits: int) -> float:
    """Staggered magnetization estimated from bitstring counts."""
    total = sum(counts.values())
    if total == 0:
        raise ValueError("empty counts")
    w = staggered_weights(n_qubits)
    return sum(c * w[b] for b, c in counts.items()) / total


def staggered_of_quasi_probs(quasi: dict[int, float], n_qubits: int) -> float:
    """Staggered magnetization of a (possibly signed) quasi-distribution."""
    w = staggered_weights(n_qubits)
    return float(sum(p * w[b] for b, p in quasi.items()))


def sample(state: StateVector, shots: int, seed: int) -> dict[int, int]:
    """Multinomial shot sampling from |amplitude|^2; deterministic per seed."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    probs = np.abs(state.amps) ** 2
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    hist = rng.multinomial(shots, probs)
    nz = np.nonzero(hist)[0]
    return {int(b): int(hist[b]) for b in nz}


# --- Hamiltonian application and Krylov evolution --------------------------


class _TermAction:
    """Matrix-free H|psi> for a list of two-site Pauli-pair terms.

    ZZ terms collapse into one diagonal; each site pair's XX/YY terms become
    a flip-flop (01 <-> 10) update plus, when the XX and YY coefficients
    differ, a double-flip (00 <-> 11) update.
    """

    def __init__(self, terms: list[Term], n_qubits: int):
        self.n = n_qubits
        dim = 1 << n_qubits
        idx = np.arange(dim)
        zvals = [1.0 - 2.0 * ((idx >> i) & 1) for i in range(n_qubits)]
        diag = np.zeros(dim)
        pair_cx: dict[tuple[int, int], float] = {}
        pair_cy: dict[tuple[int, int], float] = {}
        for coeff, kind, (i, j) in terms:
            if i == j or not (0 <= i < n_qubits and 0 <= j < n_qubits):
                raise ValueError(f"bad term sites ({i}, {j})")
            if kind == "ZZ":
                diag += coeff * zvals[i] * zvals[j]
            elif kind == "XX":
                pair_cx[(i, j)] = pair_cx.get((i, j), 0.0) + coeff
            elif kind == "YY":
                pair_cy[(i, j)] = pair_cy.get((i, j), 0.0) + coeff
            else:
                raise ValueError(f"unknown term kind {kind!r}")
        self.diag = diag
        self.offdiag: list[tuple[int, int, float, float]] = []
        for pair in sorted(set(pair_cx) | set(pair_cy)):
            cxx = pair_cx.get(pair, 0.0)
            cyy = pair_cy.get(pair, 0.0)
            ax_i = n_qubits - 1 - pair[0]
            ax_j = n_qubits - 1 - pair[1]
            self.offdiag.append((ax_i, ax_j, cxx + cyy, cxx - cyy))

    def _pair_index(self, ax_i: int, ax_j: int, vi: int, vj: int) -> tuple:
        out = [slice(None)] * self.n
        out[ax_i] = vi
        out[ax_j] = vj
        return tuple(out)

    def matvec(self, psi: np.ndarray) -> np.ndarray:
        out = self.diag * psi
        arr_in = psi.reshape((2,) * self.n)
        arr_out = out.reshape((2,) * self.n)
        for ax_i, ax_j, ff, fd in self.offdiag:
            i01 = self._pair_index(ax_i, ax_j, 0, 1)
            i10 = self._pair_index(ax_i, ax_j, 1, 0)
            if ff != 0.0:
                arr_out[i01] += ff * arr_in[i10]
                arr_out[i10] += ff * arr_in[i01]
            if fd != 0.0:
                i00 = self._pair_index(ax_i, ax_j, 0, 0)
                i11 = self._pair_index(ax_i, ax_j, 1, 1)
                arr_out[i00] += fd * arr_in[i11]
                arr_out[i11] += fd * arr_in[i00]
        return out


def apply_hamiltonian(terms: list[Term], state: StateVector) -> np.ndarray:
    """H |psi> as a flat amplitude array (the state is left untouched)."""
    return _TermAction(terms, state.n_qubits).matvec(state.amps)


def energy_expectation(terms: list[Term], state: StateVector) -> float:
    return float(np.real(np.vdot(state.amps, apply_hamiltonian(terms, state))))


def _lanczos_step(action: _TermAction, psi: np.ndarray, tau: float, m: int):
    """One Lanczos approximation of exp(-i H tau) |psi>.

    Returns (new_psi, err_estimate); the estimate is the classic leakage
    bound beta_{m+1} * |last component of exp(-i tau T) e1|.
    """
    beta0 = np.linalg.norm(psi)
    v = psi / beta0
    basis = [v]
    alphas: list[float] = []
    betas: list[float] = []
    w = action.matvec(v)
    breakdown = False
    for j in range(m):
        alpha = float(np.real(np.vdot(basis[j], w)))
        alphas.append(alpha)
        w = w - alpha * basis[j]
        if j > 0:
            w = w - betas[j - 1] * basis[j - 1]
        beta = float(np.linalg.norm(w))
        if beta < 1e-14 * max(1.0, abs(alpha)):
            breakdown = True
            break
        if j < m - 1:
            betas.append(beta)
            basis.append(w / beta)
            w = action.matvec(basis[j + 1])
    k = len(alphas)
    tmat = np.diag(alphas)
    if k > 1:
        off = np.array(betas[: k - 1])
        tmat += np.diag(off, 1) + np.diag(off, -1)
    evals, evecs = np.linalg.eigh(tmat)
    phi = evecs @ (np.exp(-1j * evals * tau) * evecs[0, :].conj())
    new = np.zeros_like(psi)
    for j in range(k):
        new += phi[j] * basis[j]
    new *= beta0
    if breakdown:
        return new, 0.0
    err = beta * abs(phi[-1])
    return new, float(err)


def exact_evolve(
    terms: list[Term],
    state: StateVector,
    t: float,
    *,
    krylov_dim: int = 30,
    tol_per_unit_time: float = 1e-10,
) -> StateVector:
    """Evolve |psi> -> exp(-i H t) |psi> by adaptive Lanczos sub-stepping.

    The Hamiltonian is applied term-by-term without ever materializing the
    dense matrix.  Sub-steps halve whenever the local error estimate exceeds
    tol_per_unit_time * tau; persistent non-convergence raises NumericsError.
    """
    if state.n_qubits > EXACT_MAX_QUBITS:
        raise CapacityError(f"exact evolution is capped at {EXACT_MAX_QUBITS} qubits")
    if t == 0.0:
        return state
    action = _TermAction(terms, state.n_qubits)
    psi = state.amps
    remaining = abs(t)
    sign = 1.0 if t > 0 else -1.0
    tau = remaining
    min_tau = abs(t) / 2**40
    while remaining > 1e-15 * abs(t):
        step = min(tau, remaining)
        new, err = _lanczos_step(action, psi, sign * step, krylov_dim)
        if err <= tol_per_unit_time * step:
            psi = new
            remaining -= step
            if err < 0.01 * tol_per_unit_time * step:
                tau = min(2 * tau, abs(t))
        else:
            tau = step / 2
            if tau < min_tau:
                raise NumericsError(
                    f"Lanczos evolution stalled: sub-step {tau:.3e}, "
                    f"error estimate {err:.3e} vs budget {tol_per_unit_time * step:.3e}"
                )
    state.amps = psi
    return state
