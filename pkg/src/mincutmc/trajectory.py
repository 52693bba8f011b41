"""Stochastic step sequences for the controlled circuit.

A circuit on ``L`` qudits (ring geometry) evolves by discrete steps applied
at a moving active site, the "decimal" position.  Each step is one of two
kinds:

* control (probability ``p``): the qudit at the decimal position is
  measured and the decimal moves one site to the left;
* chaotic (probability ``1 - p``): the decimal moves one site to the
  right, a two-site gate acts on the qudit pair at the old decimal
  position, and then each of those two qudits is measured independently
  with probability ``q``.

This module only produces the event sequences; the entanglement and
purification state updates that consume them live in
:mod:`mincutmc.mincut` and :mod:`mincutmc.ancilla`.

Every step consumes exactly three uniform variates from the realization
stream (step kind, left measurement, right measurement), whether or not
the step uses them.  Fixing the consumption pattern makes trajectories
reproducible under any downstream observable selection and lets the whole
sequence be generated in one vectorized draw.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "InitialState",
    "StepKind",
    "CircuitParams",
    "StepEvent",
    "Trajectory",
    "derive_stream_seed",
    "next_step",
    "generate_trajectory",
]

# SplitMix64 finalizer constants.  Frozen: changing any of these silently
# changes every simulated ensemble.
_STREAM_GAMMA = 0x9E3779B97F4A7C15
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB
_MASK64 = (1 << 64) - 1

#: Name of the bit generator backing every realization stream.  Recorded in
#: ensemble manifests; results are only reproducible under this generator.
BIT_GENERATOR = "PCG64"


def derive_stream_seed(master_seed: int, index: int) -> int:
    """Derive the per-realization RNG seed from a master seed.

    Applies a SplitMix64-style avalanche to ``master_seed XOR
    (index * gamma)``.  For a fixed master seed the map ``index -> seed``
    is injective on 64-bit indices (every stage is a bijection of the
    64-bit integers), so distinct realizations can never collide onto the
    same stream.

    Parameters
    ----------
    master_seed : int
        Ensemble-level seed (any non-negative integer; only the low 64
        bits matter).
    index : int
        Realization index within the ensemble.

    Returns
    -------
    int
        A 64-bit seed for this realization's generator.
    """
    if index < 0:
        raise ValueError("realization index must be non-negative")
    z = (master_seed ^ ((index * _STREAM_GAMMA) & _MASK64)) & _MASK64
    z = (z + _STREAM_GAMMA) & _MASK64
    z ^= z >> 30
    z = (z * _MIX_1) & _MASK64
    z ^= z >> 27
    z = (z * _MIX_2) & _MASK64
    z ^= z >> 31
    return z


def stream_rng(master_seed: int, index: int) -> np.random.Generator:
    """Generator for one realization, seeded via :func:`derive_stream_seed`."""
    return np.random.Generator(np.random.PCG64(derive_stream_seed(master_seed, index)))


class InitialState(enum.Enum):
    """Initial condition of the qudit chain."""

    PRODUCT = "product"
    MAXIMALLY_ENTANGLED = "maximally_entangled"


class StepKind(enum.IntEnum):
    CONTROL = 0
    CHAOTIC = 1


@dataclass(frozen=True)
class CircuitParams:
    """Immutable parameter set of one simulation cell.

    Attributes
    ----------
    L : int
        Number of qudits; even, at least 4 (quarter-system observables
        additionally require a multiple of 4).
    p : float
        Probability of a control step.
    q : float
        Probability of measuring each gated qudit after a chaotic step.
    t_max : int
        Number of steps to simulate.  Defaults to ``2 * L**2``.
    master_seed : int
        Seed from which every realization stream is derived.
    initial_state : InitialState
        Product (zero entanglement) or maximally entangled start.
    decimal_start : int
        Initial decimal position.  The dynamics on a ring are
        translation invariant, so 0 is used unless stated otherwise.
    """

    L: int
    p: float
    q: float
    t_max: int = 0
    master_seed: int = 0
    initial_state: InitialState = InitialState.PRODUCT
    decimal_start: int = 0

    def __post_init__(self):
        if self.L < 4 or self.L % 2:
            raise ValueError("L must be even and at least 4")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.t_max == 0:
            object.__setattr__(self, "t_max", 2 * self.L * self.L)
        if self.t_max < 0:
            raise ValueError("t_max must be non-negative")
        if isinstance(self.initial_state, str):
            object.__setattr__(self, "initial_state", InitialState(self.initial_state))
        if not 0 <= self.decimal_start < self.L:
            raise ValueError("decimal_start must lie in [0, L)")

    def replace(self, **kwargs) -> "CircuitParams":
        from dataclasses import replace

        return replace(self, **kwargs)


@dataclass(frozen=True)
class StepEvent:
    """One resolved step of the stochastic dynamics.

    ``measure_left``/``measure_right`` are only meaningful for chaotic
    steps; control steps always measure exactly the qudit at
    ``decimal_before``.
    """

    kind: StepKind
    decimal_before: int
    decimal_after: int
    measure_left: bool = False
    measure_right: bool = False

    @property
    def gate_qudits(self) -> tuple[int, int]:
        """Qudit pair acted on by the gate of a chaotic step."""
        if self.kind != StepKind.CHAOTIC:
            raise ValueError("control steps apply no gate")
        return self.decimal_before, self.decimal_after

    @property
    def measured_qudit(self) -> int:
        """Qudit measured by a control step."""
        if self.kind != StepKind.CONTROL:
            raise ValueError("chaotic steps have no dedicated control measurement")
        return self.decimal_before


def next_step(params: CircuitParams, decimal: int, rng: np.random.Generator) -> StepEvent:
    """Draw a single step at the given decimal position.

    Consumes exactly three uniforms in a fixed order regardless of the
    step kind, matching :func:`generate_trajectory`.
    """
    u_kind, u_left, u_right = rng.random(3)
    L = params.L
    if u_kind < params.p:
        return StepEvent(
            kind=StepKind.CONTROL,
            decimal_before=decimal,
            decimal_after=(decimal - 1) % L,
        )
    return StepEvent(
        kind=StepKind.CHAOTIC,
        decimal_before=decimal,
        decimal_after=(decimal + 1) % L,
        measure_left=bool(u_left < params.q),
        measure_right=bool(u_right < params.q),
    )


@dataclass
class Trajectory:
    """Columnar record of a full realization's step sequence.

    Iterating yields :class:`StepEvent` objects in time order; the raw
    arrays are exposed for vectorized consumers.
    """

    params: CircuitParams
    realization_index: int
    kind: np.ndarray            # int8, StepKind values
    decimal_before: np.ndarray  # int32
    decimal_after: np.ndarray   # int32
    measure_left: np.ndarray    # bool, False on control steps
    measure_right: np.ndarray   # bool, False on control steps

    def __len__(self) -> int:
        return len(self.kind)

    def __getitem__(self, t: int) -> StepEvent:
        return StepEvent(
            kind=StepKind(int(self.kind[t])),
            decimal_before=int(self.decimal_before[t]),
            decimal_after=int(self.decimal_after[t]),
            measure_left=bool(self.measure_left[t]),
            measure_right=bool(self.measure_right[t]),
        )

    def __iter__(self):
        for t in range(len(self)):
            yield self[t]

    @property
    def n_chaotic(self) -> int:
        return int(self.kind.sum())

    @property
    def n_control(self) -> int:
        return len(self) - self.n_chaotic


def generate_trajectory(params: CircuitParams, realization_index: int) -> Trajectory:
    """Generate the full step sequence of one realization.

    The stream seed comes from ``(params.master_seed, realization_index)``
    via :func:`derive_stream_seed`; the uniform block is drawn in one shot
    as a ``(t_max, 3)`` array whose rows match the per-step consumption
    order of :func:`next_step`.  Truncating a trajectory therefore agrees
    step for step with one generated at smaller ``t_max``.
    """
    rng = stream_rng(params.master_seed, realization_index)
    t_max, L = params.t_max, params.L
    u = rng.random((t_max, 3))

    chaotic = u[:, 0] >= params.p
    moves = np.where(chaotic, 1, -1)
    decimal_after = (params.decimal_start + np.cumsum(moves, dtype=np.int64)) % L
    decimal_after = decimal_after.astype(np.int32)
    decimal_before = np.empty(t_max, dtype=np.int32)
    if t_max:
        decimal_before[0] = params.decimal_start
        decimal_before[1:] = decimal_after[:-1]

    return Trajectory(
        params=params,
        realization_index=realization_index,
        kind=chaotic.astype(np.int8),
        decimal_before=decimal_before,
        decimal_after=decimal_after,
        measure_left=chaotic & (u[:, 1] < params.q),
        measure_right=chaotic & (u[:, 2] < params.q),
    )
