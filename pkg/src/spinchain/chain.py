"""Chain model definition: couplings, boundary, Trotter plan, Pauli terms.

The Hamiltonian in Pauli form is

    H = sum_j (Jx XjXj+1 + Jy YjYj+1 + Jz ZjZj+1)
      + (J2/4) sum_j (XjXj+2 + YjYj+2 + ZjZj+2)

with Jx = Jy = J1/4 and Jz = Delta * J1/4, site indices wrapping only under
periodic boundary conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

OBC = "obc"
PBC = "pbc"

FIRST_ORDER = "first"
SECOND_ORDER_MERGED = "second-merged"


@dataclass(frozen=True)
class ChainSpec:
    """Sites, boundary condition and couplings of one J1-J2 XXZ chain."""

    n_sites: int
    boundary: str = OBC
    j1: float = 1.0
    j2: float = 0.0
    delta: float = 1.0

    def __post_init__(self):
        if self.boundary not in (OBC, PBC):
            raise ValueError(f"boundary must be {OBC!r} or {PBC!r}, got {self.boundary!r}")
        if self.n_sites < 2 or self.n_sites % 2 != 0:
            raise ValueError(f"n_sites must be even and >= 2, got {self.n_sites}")
        if self.j2 != 0.0 and self.n_sites % 4 != 0:
            raise ValueError("the next-nearest-neighbour swap network needs n_sites % 4 == 0")
        if self.j1 <= 0:
            raise ValueError(f"j1 must be positive, got {self.j1}")
        if self.j2 < 0:
            raise ValueError(f"j2 must be non-negative, got {self.j2}")
        if self.delta < 0:
            raise ValueError(f"delta must be non-negative, got {self.delta}")

    @property
    def periodic(self) -> bool:
        return self.boundary == PBC


def isotropic(n_sites: int, boundary: str = OBC, j1: float = 1.0) -> ChainSpec:
    """Isotropic Heisenberg chain: J2 = 0, Delta = 1."""
    return ChainSpec(n_sites, boundary, j1=j1, j2=0.0, delta=1.0)


def dimer(n_sites: int, boundary: str = OBC, j1: float = 1.0) -> ChainSpec:
    """Majumdar-Ghosh point: J2 = J1/2, Delta = 1."""
    return ChainSpec(n_sites, boundary, j1=j1, j2=j1 / 2, delta=1.0)


@dataclass(frozen=True)
class TrotterPlan:
    """Trotter order, number of steps, and the time per step."""

    order: str
    steps: int
    dt: float

    def __post_init__(self):
        if self.order not in (FIRST_ORDER, SECOND_ORDER_MERGED):
            raise ValueError(f"unknown Trotter order {self.order!r}")
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def total_time(self) -> float:
        return self.steps * self.dt


def theta_nn(spec: ChainSpec, dt: float) -> tuple[float, float, float]:
    """Block angles (2 Jx dt, 2 Jy dt, 2 Jz dt) for a nearest-neighbour block."""
    jx = jy = spec.j1 / 4.0
    jz = spec.delta * spec.j1 / 4.0
    return (2 * jx * dt, 2 * jy * dt, 2 * jz * dt)


def theta_nnn(spec: ChainSpec, dt: float) -> tuple[float, float, float]:
    """Block angles (J2 dt / 2) * (1, 1, 1) for a next-nearest-neighbour block."""
    t = spec.j2 * dt / 2.0
    return (t, t, t)


def hamiltonian_terms(spec: ChainSpec) -> list[tuple[float, str, tuple[int, int]]]:
    """Two-site Pauli terms (coefficient, kind in {XX, YY, ZZ}, site pair)."""
    n = spec.n_sites
    jx = spec.j1 / 4.0
    jz = spec.delta * spec.j1 / 4.0
    terms: list[tuple[float, str, tuple[int, int]]] = []
    nn_last = n if spec.periodic else n - 1
    for j in range(nn_last):
        pair = (j, (j + 1) % n)
        terms.append((jx, "XX", pair))
        terms.append((jx, "YY", pair))
        terms.append((jz, "ZZ", pair))
    if spec.j2 != 0.0:
        c2 = spec.j2 / 4.0
        nnn_last = n if spec.periodic else n - 2
        for j in range(nnn_last):
            pair = (j, (j + 2) % n)
            terms.append((c2, "XX", pair))
            terms.append((c2, "YY", pair))
            terms.append((c2, "ZZ", pair))
    return terms
