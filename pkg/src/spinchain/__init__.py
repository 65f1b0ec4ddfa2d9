"""Trotterized time evolution of the frustrated J1-J2 Heisenberg chain.

Circuit construction with constant depth per Trotter step, exact and MPS
simulation backends, a synthetic-noise mitigation pipeline, and a
configuration-driven experiment runner.
"""

from .chain import (
    FIRST_ORDER,
    OBC,
    PBC,
    SECOND_ORDER_MERGED,
    ChainSpec,
    TrotterPlan,
    dimer,
    hamiltonian_terms,
    isotropic,
    theta_nn,
    theta_nnn,
)
from .circuits import (
    BLOCK,
    LOWERED,
    Circuit,
    CircuitMetrics,
    cnot_count,
    depth,
    from_text,
    lower,
    lower_block,
    metrics,
    phase_gauge_distance,
    to_text,
    unitary_of,
)
from .builders import (
    build_circuit,
    build_dimer_step,
    build_first_order,
    build_second_order_merged,
    closing_layers,
    depth_per_step,
)
from .errors import CapacityError, ConfigError, NumericsError
from .mitigation import (
    MitigatedEstimate,
    MitigationPlan,
    NoiseModel,
    find_twirl_set,
    fold,
    m3_mitigate,
    readout_corrupt,
    run_mitigated,
    simulate_noisy,
    twirl,
    uniform_readout_flip,
    zne_extrapolate,
)
from .mps import (
    MpsState,
    load_mps,
    mps_apply,
    mps_init_neel,
    mps_sample,
    mps_staggered_magnetization,
    mps_to_statevector,
    save_mps,
)
from .statevector import (
    StateVector,
    apply,
    apply_gate,
    basis_state,
    energy_expectation,
    exact_evolve,
    init_neel,
    sample,
    staggered_magnetization,
    staggered_of_counts,
)
from .experiments import (
    ExperimentConfig,
    ResultSeries,
    compare,
    emit_tables,
    load_config,
    load_series_csv,
    run,
    write_outputs,
)

__version__ = "0.1.0"
