"""Classical benchmarks for the control transition.

Two exactly solvable reference processes bracket the circuit dynamics:

* the stochastically controlled d-adic map on the unit interval, whose
  control transition sits at an exactly known ``p_c``;
* the biased walk of the active site, whose site-coverage time
  reproduces the ancilla purification time of the circuit in the
  always-measure limit (``q = 1``), where a qudit disentangles the
  moment it is touched.

Both carry their own RNG streams; comparisons against circuit ensembles
are distributional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .trajectory import derive_stream_seed

__all__ = [
    "classical_pc",
    "MapParams",
    "simulate_controlled_map",
    "controlled_map_times",
    "rw_wrap_time",
    "rw_cover_times",
    "drift_velocity",
    "effective_depth",
]

_MAP_SALT = 0xC1A551CA1
_RW_SALT = 0x2A1D0C0E2


def classical_pc(a: float, d) -> float:
    """Exact control-transition point of the controlled d-adic map.

    The map contracts by ``1 - a`` under control (probability ``p``) and
    expands by ``d`` otherwise; the Lyapunov exponent
    ``p ln(1 - a) + (1 - p) ln d`` changes sign at::

        p_c = ln(1 - a) / (ln(1 - a) - ln d)

    For the natural contraction strength ``a = (d - 1) / d`` the control
    and chaotic shifts balance and the transition sits at exactly 1/2;
    that input is pinned to the exact value, since rounding ``(d - 1) / d``
    to a float and then evaluating the logarithms can land one ulp off.
    """
    if not 0.0 < a < 1.0:
        raise ValueError("contraction strength a must lie in (0, 1)")
    if d < 2:
        raise ValueError("expansion factor d must be at least 2")
    if a == (d - 1) / d:
        return 0.5
    la = math.log1p(-a)
    return la / (la - math.log(d))


@dataclass(frozen=True)
class MapParams:
    """Parameters of the controlled d-adic map."""

    d: int
    a: float
    p: float
    t_max: int
    tolerance: float = 1e-12
    master_seed: int = 0

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("d must be at least 2")
        if not 0.0 < self.a < 1.0:
            raise ValueError("a must lie in (0, 1)")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if self.t_max < 0 or self.tolerance <= 0:
            raise ValueError("t_max must be non-negative and tolerance positive")


def simulate_controlled_map(params: MapParams, x0: float, realization_index: int):
    """Steps until the map first reaches the controlled fixed point.

    Iterates ``x -> (1 - a) x`` with probability ``p``, else
    ``x -> d x mod 1``, and returns the first (1-based) step at which
    ``|x| < tolerance``; 0 if ``x0`` already qualifies, ``None`` if the
    trajectory stays uncontrolled for ``t_max`` steps.
    """
    if abs(x0) < params.tolerance:
        return 0
    rng = np.random.Generator(
        np.random.PCG64(
            derive_stream_seed(params.master_seed ^ _MAP_SALT, realization_index)
        )
    )
    x = float(x0)
    p, a, d, tol = params.p, params.a, params.d, params.tolerance
    remaining = params.t_max
    t = 0
    while remaining > 0:
        block = rng.random(min(remaining, 4096))
        for u in block:
            t += 1
            if u < p:
                x *= 1.0 - a
            else:
                x = (d * x) % 1.0
            if abs(x) < tol:
                return t
        remaining -= len(block)
    return None


def controlled_map_times(
    d: int,
    a: float,
    p: float,
    t_max: int,
    n_trials: int,
    master_seed: int = 0,
    tolerance: float = 1e-12,
) -> np.ndarray:
    """First-passage times to the controlled fixed point, one per trial.

    Vectorized companion of :func:`simulate_controlled_map` for ensemble
    studies: all trials start from independent uniform ``x0`` and advance
    in lockstep.  Entries are -1 for trials still uncontrolled at
    ``t_max``.
    """
    MapParams(d=d, a=a, p=p, t_max=t_max, tolerance=tolerance)  # validate
    rng = np.random.Generator(
        np.random.PCG64(derive_stream_seed(master_seed ^ _MAP_SALT, 0xB10C))
    )
    x = rng.random(n_trials)
    times = np.full(n_trials, -1, dtype=np.int64)
    open_mask = np.abs(x) >= tolerance
    times[~open_mask] = 0
    for t in range(1, t_max + 1):
        if not open_mask.any():
            break
        u = rng.random(n_trials)
        ctrl = u < p
        x = np.where(ctrl, (1.0 - a) * x, (d * x) % 1.0)
        hit = open_mask & (np.abs(x) < tolerance)
        times[hit] = t
        open_mask &= ~hit
    return times


def rw_wrap_time(L: int, p: float, realization_index: int, master_seed: int = 0) -> int:
    """Steps for the active-site walk to touch every site of the ring.

    The walk starts at 0; with probability ``p`` it marks its site and
    moves left, otherwise it marks its site and the right neighbour and
    moves right.  Returns the first step after which all ``L`` sites have
    been marked.  This is exactly the ancilla purification time of the
    circuit at ``q = 1``, where every touched qudit disentangles on the
    spot.
    """
    if L < 2:
        raise ValueError("L must be at least 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.Generator(
        np.random.PCG64(derive_stream_seed(master_seed ^ _RW_SALT, realization_index))
    )
    marked = bytearray(L)
    left = L
    pos = 0
    t = 0
    while True:
        block = rng.random(4096)
        for u in block:
            t += 1
            if not marked[pos]:
                marked[pos] = 1
                left -= 1
            if u < p:
                pos = pos - 1 if pos else L - 1
            else:
                nxt = pos + 1 if pos + 1 < L else 0
                if not marked[nxt]:
                    marked[nxt] = 1
                    left -= 1
                pos = nxt
            if not left:
                return t


def rw_cover_times(L: int, p: float, n: int, master_seed: int = 0) -> np.ndarray:
    """Coverage times of ``n`` independent walks, advanced in lockstep.

    Same process as :func:`rw_wrap_time` but vectorized across walks with
    a single batch stream; use for ensemble statistics rather than
    per-realization reproduction.
    """
    if L < 2:
        raise ValueError("L must be at least 2")
    rng = np.random.Generator(
        np.random.PCG64(derive_stream_seed(master_seed ^ _RW_SALT, 0xBA7C4))
    )
    pos = np.zeros(n, dtype=np.int64)
    marked = np.zeros((n, L), dtype=bool)
    count = np.zeros(n, dtype=np.int64)
    times = np.zeros(n, dtype=np.int64)
    alive = np.arange(n)
    t = 0
    while alive.size:
        t += 1
        u = rng.random(alive.size)
        right = u >= p
        pos_a = pos[alive]
        newly = ~marked[alive, pos_a]
        marked[alive, pos_a] = True
        count[alive] += newly
        if right.any():
            ra = alive[right]
            nxt = (pos[ra] + 1) % L
            newly2 = ~marked[ra, nxt]
            marked[ra, nxt] = True
            count[ra] += newly2
            pos[ra] = nxt
        if not right.all():
            la = alive[~right]
            pos[la] = (pos[la] - 1) % L
        done = count[alive] == L
        if done.any():
            times[alive[done]] = t
            alive = alive[~done]
    return times


def drift_velocity(p: float) -> float:
    """Mean speed of the active site in the control direction, ``2p - 1``.

    Positive values mean net leftward (control-dominated) motion; the
    signed rightward displacement per step is the negative of this.
    """
    return 2 * p - 1


def effective_depth(t, L: int, p: float):
    """Ring wraps covered by the drift in ``t`` steps: ``|2p - 1| t / L``.

    Rescaling time by this quantity collapses drift-dominated dynamics of
    different sizes onto one curve.  Accepts scalars or arrays.
    """
    return abs(2 * p - 1) * np.asarray(t) / L
