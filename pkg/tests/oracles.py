"""Independent brute-force oracles used by the test suite.

Everything here deliberately avoids the package's gate-application and
circuit machinery: two-site unitaries come from eigendecompositions of the
4x4 generator, embeddings go through explicit basis permutations and
np.kron, and the swap network is modelled as a permutation of site labels
rather than as gates.
"""

from __future__ import annotations

import numpy as np

X = np.array([[0.0, 1.0], [1.0, 0.0]])
Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])
Z = np.array([[1.0, 0.0], [0.0, -1.0]])

PAIR_OPS = {
    "XX": np.kron(X, X).real,
    "YY": np.kron(Y, Y).real,
    "ZZ": np.kron(Z, Z).real,
}


def expm_hermitian(h: np.ndarray, scale: complex = -1.0j) -> np.ndarray:
    """exp(scale * h) for Hermitian h, via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def xyz_generator(theta) -> np.ndarray:
    tx, ty, tz = theta
    return 0.5 * (tx * PAIR_OPS["XX"] + ty * PAIR_OPS["YY"] + tz * PAIR_OPS["ZZ"])


def xyz_unitary(theta) -> np.ndarray:
    """exp(-i (tx XX + ty YY + tz ZZ) / 2) as a dense 4x4 matrix."""
    return expm_hermitian(xyz_generator(theta))


def pair_permutation(n: int, a: int, b: int) -> np.ndarray:
    """Index permutation moving qubit a to the top bit and b below it."""
    rest = [q for q in range(n) if q not in (a, b)]
    perm = np.empty(1 << n, dtype=np.intp)
    for idx in range(1 << n):
        r = 0
        for k, q in enumerate(rest):
            r |= ((idx >> q) & 1) << k
        perm[idx] = (((idx >> a) & 1) << (n - 1)) | (((idx >> b) & 1) << (n - 2)) | r
    return perm


def embed_pair(mat4: np.ndarray, n: int, a: int, b: int) -> np.ndarray:
    """Embed a two-site operator at sites (a, b) of an n-site register.

    The 4x4 operator is taken in (a, b) order with a as the more significant
    local bit; the register uses little-endian indexing.
    """
    perm = pair_permutation(n, a, b)
    big = np.kron(mat4, np.eye(1 << (n - 2), dtype=mat4.dtype))
    return big[np.ix_(perm, perm)]


def dense_hamiltonian(terms, n: int) -> np.ndarray:
    """Dense real-symmetric Hamiltonian from (coeff, kind, pair) terms."""
    h = np.zeros((1 << n, 1 << n))
    for coeff, kind, (i, j) in terms:
        h += coeff * embed_pair(PAIR_OPS[kind], n, i, j)
    return h


def evolve_dense(h: np.ndarray, psi: np.ndarray, t: float) -> np.ndarray:
    """exp(-i h t) |psi> through a full eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return v @ (np.exp(-1.0j * w * t) * (v.conj().T @ psi))


def product_of_factors(factors, n: int) -> np.ndarray:
    """Ordered product of embedded two-site exponentials.

    ``factors`` is a sequence of (pair, theta) applied first-to-last, i.e.
    later factors multiply from the left.
    """
    u = np.eye(1 << n, dtype=complex)
    for (a, b), theta in factors:
        u = embed_pair(xyz_unitary(theta), n, a, b) @ u
    return u


# --- layer recipes mirroring the paper's circuit diagrams ------------------


def even_layer_pairs(n: int):
    return [(2 * i, 2 * i + 1) for i in range(n // 2)]


def odd_layer_pairs(n: int, periodic: bool):
    pairs = [(2 * i + 1, 2 * i + 2) for i in range((n - 1) // 2)]
    if periodic:
        pairs.append((n - 1, 0))
    return pairs


def first_order_factors(n: int, periodic: bool, theta, steps: int):
    factors = []
    for _ in range(steps):
        factors += [(p, theta) for p in even_layer_pairs(n)]
        factors += [(p, theta) for p in odd_layer_pairs(n, periodic)]
    return factors


def merged_second_order_factors(n: int, periodic: bool, theta, steps: int):
    half = tuple(t / 2 for t in theta)
    factors = [(p, half) for p in even_layer_pairs(n)]
    for k in range(steps):
        factors += [(p, theta) for p in odd_layer_pairs(n, periodic)]
        tt = half if k == steps - 1 else theta
        factors += [(p, tt) for p in even_layer_pairs(n)]
    return factors


def dimer_step_factors(n: int, periodic: bool, theta1, theta2, steps: int = 1):
    """Logical two-site factors of the Dimer step, swaps tracked as relabels.

    The swap layers are never exponentiated; they only permute the mapping
    from line positions to logical sites, so the returned factors act on the
    logical pairs each even layer touches.  The permutation must return to
    the identity at the end of every step.
    """
    swaps_a = [(k, k + 1) for k in range(1, n - 1, 4)]
    swaps_b = [(k, k + 1) for k in range(3, n - 1, 4)]
    if periodic:
        swaps_b = swaps_b + [(n - 1, 0)]
    logical = list(range(n))

    def apply_swaps(pairs):
        for a, b in pairs:
            logical[a], logical[b] = logical[b], logical[a]

    factors = []
    for _ in range(steps):
        factors += [(p, theta1) for p in even_layer_pairs(n)]
        factors += [(p, theta1) for p in odd_layer_pairs(n, periodic)]
        apply_swaps(swaps_a)
        factors += [((logical[a], logical[b]), theta2) for a, b in even_layer_pairs(n)]
        apply_swaps(swaps_a + swaps_b)
        factors += [((logical[a], logical[b]), theta2) for a, b in even_layer_pairs(n)]
        apply_swaps(swaps_b)
        assert logical == list(range(n)), "swap network failed to undo itself"
    return factors


def phase_fixed_max_diff(a: np.ndarray, b: np.ndarray) -> float:
    """Max |a - e^{i phi} b| with phi fixed on a's largest entry."""
    idx = np.unravel_index(np.argmax(np.abs(a)), a.shape)
    phase = a[idx] / b[idx]
    phase /= abs(phase)
    return float(np.max(np.abs(a - phase * b)))
