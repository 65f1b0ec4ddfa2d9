"""Matrix-product-state circuit simulation with controlled SVD truncation.

The state is kept in mixed-canonical form around a center site: tensors left
of the center are left-orthonormal, tensors right of it right-orthonormal.
Unitary single-site gates preserve both forms and are contracted in place;
two-site gates are applied at the center bond and re-split by SVD, dropping
relative Schmidt weights below ``svd_cutoff`` and clamping every bond at
``chi_max``.  Non-adjacent gates (the periodic-boundary pairs) are routed by
explicit swap chains, each swap going through the same truncated SVD path.

Discarded weight is accounted per two-site application in ``truncation_log``
(the relative Schmidt mass removed, before renormalization), so the running
total is non-decreasing.
"""

from __future__ import annotations

import numpy as np

from . import gates as g
from .circuits import Circuit
from .errors import CapacityError
from .statevector import StateVector, staggered_weights

_SWAP4 = g.gate_matrix(g.swap(0, 1))

# relative weight below which a cutoff-0 chi clamp is considered lossless
_EXACT_FLOOR = 1e-24


class MpsState:
    """Tensor-train state: one (chi_left, 2, chi_right) tensor per site."""

    def __init__(self, tensors: list[np.ndarray], chi_max: int, svd_cutoff: float):
        if chi_max < 1:
            raise ValueError(f"chi_max must be >= 1, got {chi_max}")
        if svd_cutoff < 0:
            raise ValueError(f"svd_cutoff must be >= 0, got {svd_cutoff}")
        self.tensors = tensors
        self.chi_max = chi_max
        self.svd_cutoff = svd_cutoff
        self.center = 0
        self.truncation_log: list[float] = []

    @property
    def n_sites(self) -> int:
        return len(self.tensors)

    @property
    def bond_dims(self) -> tuple[int, ...]:
        return tuple(t.shape[2] for t in self.tensors[:-1])

    @property
    def max_bond_dim(self) -> int:
        return max(self.bond_dims, default=1)

    @property
    def total_discarded_weight(self) -> float:
        return float(sum(self.truncation_log))

    def norm(self) -> float:
        return float(np.linalg.norm(self.tensors[self.center]))


def mps_init_neel(n_sites: int, chi_max: int = 64, svd_cutoff: float = 1e-12) -> MpsState:
    """Neel product state |up down up down ...>, every bond dimension 1."""
    if n_sites < 2:
        raise ValueError(f"need at least 2 sites, got {n_sites}")
    tensors = []
    for i in range(n_sites):
        t = np.zeros((1, 2, 1), dtype=complex)
        t[0, i % 2, 0] = 1.0
        tensors.append(t)
    return MpsState(tensors, chi_max, svd_cutoff)


def _svd(m: np.ndarray):
    try:
        return np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError:
        import scipy.linalg

        return scipy.linalg.svd(m, full_matrices=False, lapack_driver="gesvd")


def _move_center_right(mps: MpsState) -> None:
    c = mps.center
    a = mps.tensors[c]
    l, _, r = a.shape
    q, rem = np.linalg.qr(a.reshape(l * 2, r))
    mps.tensors[c] = q.reshape(l, 2, q.shape[1])
    mps.tensors[c + 1] = np.tensordot(rem, mps.tensors[c + 1], axes=(1, 0))
    mps.center = c + 1


def _move_center_left(mps: MpsState) -> None:
    c = mps.center
    a = mps.tensors[c]
    l, _, r = a.shape
    q, rem = np.linalg.qr(a.reshape(l, 2 * r).conj().T)
    k = q.shape[1]
    mps.tensors[c] = q.conj().T.reshape(k, 2, r)
    mps.tensors[c - 1] = np.tensordot(mps.tensors[c - 1], rem.conj().T, axes=(2, 0))
    mps.center = c - 1


def move_center(mps: MpsState, site: int) -> None:
    while mps.center < site:
        _move_center_right(mps)
    while mps.center > site:
        _move_center_left(mps)


def _apply_one_site(mps: MpsState, mat2: np.ndarray, site: int) -> None:
    # unitary one-site gates preserve canonical forms; no center move needed
    t = mps.tensors[site]
    mps.tensors[site] = np.tensordot(mat2, t, axes=(1, 1)).transpose(1, 0, 2)


def _apply_two_site(mps: MpsState, mat4: np.ndarray, site: int) -> None:
    """Contract a two-site gate at (site, site+1), SVD-split, truncate."""
    if mps.center < site:
        move_center(mps, site)
    elif mps.center > site + 1:
        move_center(mps, site + 1)
    a, b = mps.tensors[site], mps.tensors[site + 1]
    l, r = a.shape[0], b.shape[2]
    theta = np.tensordot(a, b, axes=(2, 0))  # (l, s_i, s_j, r)
    gate = mat4.reshape(2, 2, 2, 2)
    theta = np.tensordot(gate, theta, axes=([2, 3], [1, 2]))  # (s_i', s_j', l, r)
    theta = theta.transpose(2, 0, 1, 3).reshape(l * 2, 2 * r)
    u, s, vh = _svd(theta)
    weights = s**2
    total = weights.sum()
    keep = int(np.count_nonzero(weights >= mps.svd_cutoff * total))
    keep = max(1, min(keep, mps.chi_max))
    discarded = float(weights[keep:].sum() / total)
    if keep < len(s) and mps.svd_cutoff == 0.0 and discarded > _EXACT_FLOOR:
        raise CapacityError(
            f"bond dimension overflow at site {site}: need {len(s)}, cap {mps.chi_max} "
            "with svd_cutoff=0"
        )
    s_kept = s[:keep] / np.linalg.norm(s[:keep])
    mps.tensors[site] = u[:, :keep].reshape(l, 2, keep)
    mps.tensors[site + 1] = (s_kept[:, None] * vh[:keep, :]).reshape(keep, 2, r)
    mps.center = site + 1
    mps.truncation_log.append(discarded)


def _reorder_pair_matrix(mat4: np.ndarray) -> np.ndarray:
    """Rewrite a two-qubit matrix with its local qubit order exchanged."""
    return mat4.reshape(2, 2, 2, 2).transpose(1, 0, 3, 2).reshape(4, 4)


def _apply_gate(mps: MpsState, gate: g.Gate) -> None:
    if len(gate.qubits) == 1:
        _apply_one_site(mps, g.gate_matrix(gate), gate.qubits[0])
        return
    qa, qb = gate.qubits
    mat = g.gate_matrix(gate)
    if qa > qb:
        qa, qb = qb, qa
        mat = _reorder_pair_matrix(mat)
    if qb - qa == 1:
        _apply_two_site(mps, mat, qa)
        return
    # route the distant site next to the near one with a swap chain and back
    for j in range(qb - 1, qa, -1):
        _apply_two_site(mps, _SWAP4, j)
    _apply_two_site(mps, mat, qa)
    for j in range(qa + 1, qb):
        _apply_two_site(mps, _SWAP4, j)


def mps_apply(circuit: Circuit, mps: MpsState) -> MpsState:
    """Apply a lowered or block-level circuit gate by gate, in order.

    Block-level XYZ gates run directly as 4x4 matrices, which is cheaper than
    their lowered sequence and equal to it up to global phase.
    """
    if circuit.n_qubits != mps.n_sites:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, MPS has {mps.n_sites} sites")
    for gate in circuit.gates:
        _apply_gate(mps, gate)
    return mps


def mps_staggered_magnetization(mps: MpsState) -> float:
    """(1/N) sum_i (-1)^i <S_i^z>, evaluated in one canonical sweep."""
    move_center(mps, 0)
    n = mps.n_sites
    total = 0.0
    for i in range(n):
        t = mps.tensors[i]
        z = float(np.sum(np.abs(t[:, 0, :]) ** 2) - np.sum(np.abs(t[:, 1, :]) ** 2))
        sign = 1.0 if i % 2 == 0 else -1.0
        total += sign * 0.5 * z
        if i < n - 1:
            _move_center_right(mps)
    return total / n


def mps_sample(mps: MpsState, shots: int, seed: int) -> dict[int, int]:
    """Sequential perfect sampling of bitstrings; deterministic per seed."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    move_center(mps, 0)
    rng = np.random.default_rng(seed)
    counts: dict[int, int] = {}
    for _ in range(shots):
        cond = np.ones(1, dtype=complex)
        index = 0
        for i, t in enumerate(mps.tensors):
            amp0 = cond @ t[:, 0, :]
            amp1 = cond @ t[:, 1, :]
            p0 = float(np.linalg.norm(amp0) ** 2)
            p1 = float(np.linalg.norm(amp1) ** 2)
            if rng.random() * (p0 + p1) < p0:
                cond = amp0 / np.sqrt(p0)
            else:
                cond = amp1 / np.sqrt(p1)
                index |= 1 << i
        counts[index] = counts.get(index, 0) + 1
    return counts


def mps_to_statevector(mps: MpsState) -> StateVector:
    """Contract to a dense state; guarded to small systems."""
    n = mps.n_sites
    if n > 16:
        raise CapacityError("dense contraction is capped at 16 sites")
    v = mps.tensors[0][0]  # (2, chi)
    for t in mps.tensors[1:]:
        v = np.tensordot(v, t, axes=(v.ndim - 1, 0))
    v = v[..., 0]  # axes now (site0, site1, ..., site n-1)
    amps = np.transpose(v, tuple(reversed(range(n)))).reshape(-1)
    return StateVector(n, amps.astype(complex))


CHECKPOINT_VERSION = 1


def save_mps(mps: MpsState, path) -> None:
    """Checkpoint to an .npz archive.

    Layout (format version 1): scalar fields ``version``, ``n_sites``,
    ``chi_max``, ``svd_cutoff``, ``center``, the per-link ``bond_dims``
    header, the ``truncation_log`` array, and one ``tensor_<i>`` array per
    site.
    """
    payload = {
        "version": np.array(CHECKPOINT_VERSION),
        "n_sites": np.array(mps.n_sites),
        "chi_max": np.array(mps.chi_max),
        "svd_cutoff": np.array(mps.svd_cutoff),
        "center": np.array(mps.center),
        "bond_dims": np.array(mps.bond_dims, dtype=np.int64),
        "truncation_log": np.array(mps.truncation_log),
    }
    for i, t in enumerate(mps.tensors):
        payload[f"tensor_{i}"] = t
    np.savez(path, **payload)


def load_mps(path) -> MpsState:
    with np.load(path) as data:
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        n = int(data["n_sites"])
        tensors = [data[f"tensor_{i}"] for i in range(n)]
        mps = MpsState(tensors, int(data["chi_max"]), float(data["svd_cutoff"]))
        mps.center = int(data["center"])
        mps.truncation_log = list(data["truncation_log"])
        if tuple(int(b) for b in data["bond_dims"]) != mps.bond_dims:
            raise ValueError("checkpoint bond-dimension header disagrees with tensors")
    return mps
