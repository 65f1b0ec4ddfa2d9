"""Gate vocabulary, gate matrices, and the tensor contraction kernel.

Basis convention used throughout the package: little-endian, i.e. qubit 0 is
the least significant bit of a computational basis index.  A state vector of
``n`` qubits reshaped to ``(2,) * n`` therefore carries qubit ``q`` on axis
``n - 1 - q``.  Two-qubit gate matrices are written in the local basis where
the first listed qubit is the more significant local bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Gate kinds.  XYZ and SWAP exist only in block-level circuits; everything
# else survives lowering.
HADAMARD = "H"
PAULI_X = "X"
PAULI_Y = "Y"
PAULI_Z = "Z"
SQRT_X = "SX"
SQRT_X_DAGGER = "SXDG"
ROT_Z = "RZ"
CNOT = "CX"
SWAP = "SWAP"
XYZ_BLOCK = "XYZ"

ONE_QUBIT_KINDS = frozenset({HADAMARD, PAULI_X, PAULI_Y, PAULI_Z, SQRT_X, SQRT_X_DAGGER, ROT_Z})
TWO_QUBIT_KINDS = frozenset({CNOT, SWAP, XYZ_BLOCK})
BLOCK_ONLY_KINDS = frozenset({SWAP, XYZ_BLOCK})
LOWERED_KINDS = ONE_QUBIT_KINDS | {CNOT}

_N_PARAMS = {ROT_Z: 1, XYZ_BLOCK: 3}


@dataclass(frozen=True)
class Gate:
    """One gate acting on explicit qubit indices, with optional angles."""

    kind: str
    qubits: tuple[int, ...]
    params: tuple[float, ...] = field(default=())

    def __post_init__(self):
        expected = 2 if self.kind in TWO_QUBIT_KINDS else 1
        if self.kind not in ONE_QUBIT_KINDS and self.kind not in TWO_QUBIT_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != expected:
            raise ValueError(f"{self.kind} takes {expected} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubit index in {self.kind} gate: {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.kind} gate: {self.qubits}")
        if len(self.params) != _N_PARAMS.get(self.kind, 0):
            raise ValueError(f"{self.kind} takes {_N_PARAMS.get(self.kind, 0)} parameter(s)")


def h(q: int) -> Gate:
    return Gate(HADAMARD, (q,))


def x(q: int) -> Gate:
    return Gate(PAULI_X, (q,))


def y(q: int) -> Gate:
    return Gate(PAULI_Y, (q,))


def z(q: int) -> Gate:
    return Gate(PAULI_Z, (q,))


def sx(q: int) -> Gate:
    return Gate(SQRT_X, (q,))


def sxdg(q: int) -> Gate:
    return Gate(SQRT_X_DAGGER, (q,))


def rz(q: int, angle: float) -> Gate:
    return Gate(ROT_Z, (q,), (float(angle),))


def cx(control: int, target: int) -> Gate:
    return Gate(CNOT, (control, target))


def swap(a: int, b: int) -> Gate:
    return Gate(SWAP, (a, b))


def xyz_block(a: int, b: int, theta) -> Gate:
    tx, ty, tz = theta
    return Gate(XYZ_BLOCK, (a, b), (float(tx), float(ty), float(tz)))


_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex)
_SXDG = _SX.conj().T
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)
# control = first local qubit (more significant local bit)
_CX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)

PAULI_MATRICES = {"I": _I2, "X": _X, "Y": _Y, "Z": _Z}

_FIXED = {
    HADAMARD: _H,
    PAULI_X: _X,
    PAULI_Y: _Y,
    PAULI_Z: _Z,
    SQRT_X: _SX,
    SQRT_X_DAGGER: _SXDG,
    CNOT: _CX,
    SWAP: _SWAP,
}


def rz_matrix(angle: float) -> np.ndarray:
    return np.array(
        [[np.exp(-0.5j * angle), 0.0], [0.0, np.exp(0.5j * angle)]], dtype=complex
    )


def xyz_matrix(tx: float, ty: float, tz: float) -> np.ndarray:
    """4x4 unitary exp(-i (tx XX + ty YY + tz ZZ) / 2).

    XX, YY and ZZ commute pairwise, so the exponential factors into three
    rotations, each expanded as cos(t/2) I - i sin(t/2) P.
    """
    u = np.eye(4, dtype=complex)
    for t, p in ((tx, np.kron(_X, _X)), (ty, np.kron(_Y, _Y)), (tz, np.kron(_Z, _Z))):
        u = (np.cos(0.5 * t) * np.eye(4) - 1j * np.sin(0.5 * t) * p) @ u
    return u


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense matrix of a gate in its own qubit order (first qubit = local MSB)."""
    if gate.kind == ROT_Z:
        return rz_matrix(gate.params[0])
    if gate.kind == XYZ_BLOCK:
        return xyz_matrix(*gate.params)
    return _FIXED[gate.kind]


def apply_matrix(arr: np.ndarray, matrix: np.ndarray, axes: tuple[int, ...]) -> np.ndarray:
    """Contract a (2^k x 2^k) matrix into tensor ``arr`` along the given axes.

    ``arr`` may carry extra trailing axes (e.g. a batch of columns when
    building a full unitary); only the listed axes are contracted.  Returns a
    new array with the original axis layout.
    """
    k = len(axes)
    mat = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(mat, arr, axes=(tuple(range(k, 2 * k)), axes))
    return np.moveaxis(out, tuple(range(k)), axes)


def qubit_axes(n_qubits: int, qubits: tuple[int, ...]) -> tuple[int, ...]:
    """Tensor axes of the given qubits for an ``(2,) * n`` little-endian array."""
    return tuple(n_qubits - 1 - q for q in qubits)
