"""Monte Carlo minimal-cut simulator for stochastically controlled circuits.

The package simulates a ring of qudits driven by a feedback process that
alternates control steps (measure at the active site, move left) and
chaotic steps (move right, entangle a pair, measure each with some
probability), then extracts the two phase transitions of the model from
ensembles: an entanglement transition in the measurement rate and a
control transition in the feedback rate.

Layers
------
:mod:`mincutmc.trajectory`  step sequences and seeded streams
:mod:`mincutmc.mincut`      entanglement via a minimal-cut distance matrix
:mod:`mincutmc.ancilla`     purification via cluster connectivity
:mod:`mincutmc.oracle`      slow explicit-lattice reference + static lattice
:mod:`mincutmc.classical`   exactly solvable benchmark processes
:mod:`mincutmc.ensemble`    seeded cells/grids, CSV and manifests
:mod:`mincutmc.scaling`     data collapse and exponent fits
:mod:`mincutmc.cli`         command line front end
"""

__version__ = "0.1.0"

from .trajectory import (
    BIT_GENERATOR,
    CircuitParams,
    InitialState,
    StepEvent,
    StepKind,
    Trajectory,
    derive_stream_seed,
    generate_trajectory,
    next_step,
    stream_rng,
)
from .mincut import DistanceMatrix, QuarterPartition, cyclic_cap, init_distance
from .ancilla import (
    ConnectivityState,
    correlation_run,
    init_connectivity,
    purification_time,
)
from .oracle import (
    EquivalenceReport,
    ExplicitLattice,
    bfs01,
    check_equivalence,
    wetting_p0,
)
from .classical import (
    MapParams,
    classical_pc,
    controlled_map_times,
    drift_velocity,
    effective_depth,
    rw_cover_times,
    rw_wrap_time,
    simulate_controlled_map,
)
from .ensemble import (
    OBSERVABLES,
    CheckpointSchedule,
    GridReport,
    ObservableRecord,
    cell_seed,
    read_records_csv,
    run_cell,
    run_from_manifest,
    run_grid,
    write_records_csv,
)
from .scaling import (
    CollapseFit,
    CrossingReport,
    ExponentFit,
    ScalingError,
    collapse_dynamic,
    collapse_two_param,
    crossing_points,
    fit_beta,
    fit_log_growth,
    fit_powerlaw,
    lmin_sweep,
    master_curve_quality,
    size_curve,
    slice_curves,
    time_curves,
)
