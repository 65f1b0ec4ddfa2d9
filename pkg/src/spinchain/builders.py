"""Block-level Trotter circuit builders for the J1-J2 chain.

All builders emit circuits whose per-step layer count is constant in the
number of sites.  Layer order follows the circuit diagrams: within one step
the even layer acts first, then the odd layer; the Dimer step runs its
nearest-neighbour part before the swap-network part for the J2 couplings.
"""

from __future__ import annotations

from . import gates as g
from .chain import ChainSpec, TrotterPlan, FIRST_ORDER, SECOND_ORDER_MERGED, theta_nn, theta_nnn
from .circuits import BLOCK, Circuit

Theta = tuple[float, float, float]


def even_pairs(n: int) -> list[tuple[int, int]]:
    return [(2 * i, 2 * i + 1) for i in range(n // 2)]


def odd_pairs(n: int, periodic: bool) -> list[tuple[int, int]]:
    pairs = [(2 * i + 1, 2 * i + 2) for i in range((n - 1) // 2)]
    if periodic:
        pairs.append((n - 1, 0))
    return pairs


def _blocks(pairs: list[tuple[int, int]], theta: Theta) -> list[g.Gate]:
    return [g.xyz_block(a, b, theta) for a, b in pairs]


def _swaps(pairs: list[tuple[int, int]]) -> list[g.Gate]:
    return [g.swap(a, b) for a, b in pairs]


def swap_layer_pairs(n: int, residue: int, periodic: bool) -> list[tuple[int, int]]:
    """Adjacent pairs (k, k+1) with k = residue (mod 4), plus (n-1, 0) under PBC.

    Only the residue-3 family reaches the boundary; the wrap-around pair is
    appended last so layer contents are deterministic.
    """
    pairs = [(k, k + 1) for k in range(residue, n - 1, 4)]
    if periodic and residue == 3:
        pairs.append((n - 1, 0))
    return pairs


def build_first_order(spec: ChainSpec, plan: TrotterPlan) -> Circuit:
    """First-order Trotterization of the nearest-neighbour chain.

    Each step is one even layer followed by one odd layer of interaction
    blocks; 2M layers in total for M steps.
    """
    if plan.order != FIRST_ORDER:
        raise ValueError(f"build_first_order needs order={FIRST_ORDER!r}, got {plan.order!r}")
    if spec.j2 != 0.0:
        raise ValueError("first-order builder covers the J2=0 chain; use build_dimer_step")
    n = spec.n_sites
    theta = theta_nn(spec, plan.dt)
    out: list[g.Gate] = []
    bounds: list[int] = []
    for _ in range(plan.steps):
        out.extend(_blocks(even_pairs(n), theta))
        out.extend(_blocks(odd_pairs(n, spec.periodic), theta))
        bounds.append(len(out))
    return Circuit(n, tuple(out), BLOCK, tuple(bounds))


def build_second_order_merged(spec: ChainSpec, plan: TrotterPlan) -> Circuit:
    """Merged second-order Trotterization: 2M + 1 layers for M steps.

    Layer sequence Ue(t/2), Uo(t), Ue(t), ..., Uo(t), Ue(t/2): adjacent
    half-angle even layers of the symmetric decomposition are merged into
    full-angle interior layers, leaving half angles only at both ends.
    """
    if plan.order != SECOND_ORDER_MERGED:
        raise ValueError(
            f"build_second_order_merged needs order={SECOND_ORDER_MERGED!r}, got {plan.order!r}"
        )
    if spec.j2 != 0.0:
        raise ValueError("second-order circuits are defined only for the J2=0 chain")
    n = spec.n_sites
    theta = theta_nn(spec, plan.dt)
    half = tuple(t / 2 for t in theta)
    out: list[g.Gate] = []
    bounds: list[int] = []
    out.extend(_blocks(even_pairs(n), half))
    for k in range(plan.steps):
        out.extend(_blocks(odd_pairs(n, spec.periodic), theta))
        closing = k == plan.steps - 1
        out.extend(_blocks(even_pairs(n), half if closing else theta))
        bounds.append(len(out))
    return Circuit(n, tuple(out), BLOCK, tuple(bounds))


def build_dimer_step(spec: ChainSpec, plan: TrotterPlan) -> Circuit:
    """First-order Trotterization of the J1-J2 chain via the swap network.

    Each step appends seven layers: the nearest-neighbour even and odd
    layers, then the J2 sequence of Table-like swap layers around two more
    even layers of J2-angle blocks.  The swaps route next-nearest neighbours
    adjacent on the line and undo themselves, so the net qubit permutation
    per step is the identity.
    """
    if spec.j2 <= 0.0:
        raise ValueError("the Dimer builder needs j2 > 0")
    if plan.order != FIRST_ORDER:
        raise ValueError("the J2 swap network is defined for first-order Trotterization only")
    n = spec.n_sites
    if n % 4 != 0:
        raise ValueError(f"the J2 swap network needs n_sites % 4 == 0, got {n}")
    t1 = theta_nn(spec, plan.dt)
    t2 = theta_nnn(spec, plan.dt)
    periodic = spec.periodic
    swaps_a = swap_layer_pairs(n, 1, periodic)
    swaps_b = swap_layer_pairs(n, 3, periodic)
    out: list[g.Gate] = []
    bounds: list[int] = []
    for _ in range(plan.steps):
        out.extend(_blocks(even_pairs(n), t1))
        out.extend(_blocks(odd_pairs(n, periodic), t1))
        out.extend(_swaps(swaps_a))
        out.extend(_blocks(even_pairs(n), t2))
        out.extend(_swaps(swaps_a + swaps_b))
        out.extend(_blocks(even_pairs(n), t2))
        out.extend(_swaps(swaps_b))
        bounds.append(len(out))
    return Circuit(n, tuple(out), BLOCK, tuple(bounds))


def build_circuit(spec: ChainSpec, plan: TrotterPlan) -> Circuit:
    """Dispatch to the builder matching the chain and plan."""
    if spec.j2 > 0.0:
        return build_dimer_step(spec, plan)
    if plan.order == SECOND_ORDER_MERGED:
        return build_second_order_merged(spec, plan)
    return build_first_order(spec, plan)


def depth_per_step(spec: ChainSpec, plan: TrotterPlan) -> int:
    """Block-level layers added per Trotter step; independent of n_sites."""
    if spec.j2 > 0.0:
        return 7
    return 2


def closing_layers(spec: ChainSpec, plan: TrotterPlan) -> int:
    """One-time extra layers beyond steps * depth_per_step (the merged closer)."""
    if spec.j2 == 0.0 and plan.order == SECOND_ORDER_MERGED:
        return 1
    return 0
