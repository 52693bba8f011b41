"""Minimal-cut entanglement bookkeeping via an all-pairs distance matrix.

Entanglement entropies of stabilizer-like circuits with projective
measurements reduce to minimal cuts through the circuit's spacetime
lattice: each unmeasured qudit worldline segment costs one unit to cut,
each measured segment costs nothing.  Instead of storing the lattice, we
track the matrix ``d[i][j]`` of minimal-cut costs between the dual faces
sitting immediately to the right of qudits ``i`` and ``j`` at the current
time slice.  The entropy of the contiguous block strictly between two
faces is then a single matrix lookup.

Update rules (both are exact, see the oracle cross-checks in the test
suite):

* measuring qudit ``i`` adds a zero-cost crossing between faces ``i`` and
  ``i - 1``: the two rows collapse to their elementwise minimum and a
  one-shot triangle pass ``d[j][k] <- min(d[j][k], d'[i][j] + d'[i][k])``
  propagates any new shortcuts;
* a gate on ``(i, i + 1)`` replaces face ``i`` by a fresh face whose only
  neighbours are faces ``i - 1`` and ``i + 1`` at unit cost:
  ``d[i][j] <- 1 + min(d[i-1][j], d[i+1][j])``, clamped to the ring cap.

The ring cap ``min((i - j) % L, (j - i) % L)`` bounds every entry because
a cut can always run through the current time slice.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .trajectory import CircuitParams, InitialState, StepEvent, StepKind

__all__ = [
    "cyclic_cap",
    "DistanceMatrix",
    "init_distance",
    "QuarterPartition",
]


@lru_cache(maxsize=None)
def cyclic_cap(L: int) -> np.ndarray:
    """Read-only ``L x L`` matrix of ring distances ``min(|i-j|, L-|i-j|)``."""
    idx = np.arange(L)
    diff = (idx[:, None] - idx[None, :]) % L
    cap = np.minimum(diff, L - diff).astype(np.uint16)
    cap.setflags(write=False)
    return cap


class DistanceMatrix:
    """Symmetric matrix of pairwise minimal-cut costs between dual faces.

    Face ``i`` is the dual face immediately to the right of qudit ``i`` on
    the current time slice.  Invariants maintained by every update:
    zero diagonal, symmetry, the triangle inequality, and the ring cap
    ``d[i][j] <= min((i - j) % L, (j - i) % L)``.

    Entries are stored as ``uint16``; the cap keeps them at most ``L / 2``.
    """

    __slots__ = ("L", "d", "_cap", "_row", "_outer")

    def __init__(self, L: int, d: np.ndarray):
        self.L = L
        self.d = d
        self._cap = cyclic_cap(L)
        # scratch buffers; updates are hot-path and allocation free
        self._row = np.empty(L, dtype=np.uint16)
        self._outer = np.empty((L, L), dtype=np.uint16)

    # -- construction -------------------------------------------------

    def copy(self) -> "DistanceMatrix":
        return DistanceMatrix(self.L, self.d.copy())

    # -- updates -------------------------------------------------------

    def apply_measurement(self, i: int) -> None:
        """Measure qudit ``i``: zero-cost crossing between faces ``i``, ``i-1``."""
        d = self.d
        m1 = i - 1 if i else self.L - 1
        row = self._row
        np.minimum(d[i], d[m1], out=row)
        row[i] = 0
        row[m1] = 0
        d[i, :] = row
        d[m1, :] = row
        d[:, i] = row
        d[:, m1] = row
        # one triangle sweep through the merged pair repairs all shortcuts
        outer = self._outer
        np.add.outer(row, row, out=outer)
        np.minimum(d, outer, out=d)

    def apply_chaotic(self, i: int, measure_left: bool = False, measure_right: bool = False) -> None:
        """Gate on ``(i, i+1)`` followed by optional single-qudit measurements."""
        L = self.L
        d = self.d
        im1 = i - 1 if i else L - 1
        ip1 = i + 1 if i < L - 1 else 0
        row = self._row
        np.minimum(d[im1], d[ip1], out=row)
        row += 1
        np.minimum(row, self._cap[i], out=row)
        row[i] = 0
        d[i, :] = row
        d[:, i] = row
        if measure_left:
            self.apply_measurement(i)
        if measure_right:
            self.apply_measurement(ip1)

    def apply(self, event: StepEvent) -> None:
        """Advance by one trajectory step."""
        if event.kind == StepKind.CONTROL:
            self.apply_measurement(event.decimal_before)
        else:
            self.apply_chaotic(event.decimal_before, event.measure_left, event.measure_right)

    # -- observables ---------------------------------------------------

    def entropy_contiguous(self, v_left: int, v_right: int) -> int:
        """Entropy of the block of qudits ``v_left + 1 .. v_right`` (mod L).

        ``v_left`` and ``v_right`` are face indices bounding the block;
        they must differ, since a block and its complement need two
        distinct cut endpoints.
        """
        if v_left == v_right:
            raise ValueError("block boundaries must be distinct faces")
        return int(self.d[v_left, v_right])

    def half_cut(self, decimal: int) -> int:
        """Entropy of the half ring starting just right of the decimal."""
        return self.entropy_contiguous(decimal, (decimal + self.L // 2) % self.L)

    def mutual_information(self, part: "QuarterPartition") -> int:
        """``I2`` between the two opposite quarters A and C (clipped at 0)."""
        v0, v1, v2, v3 = part.vertices
        d = self.d
        raw = int(d[v0, v1]) + int(d[v2, v3]) - int(d[v1, v2]) - int(d[v3, v0])
        return max(0, raw)

    def tripartite_information(self, part: "QuarterPartition") -> int:
        """Tripartite information ``I3`` of quarters A, B, C."""
        v0, v1, v2, v3 = part.vertices
        d = self.d
        i2 = self.mutual_information(part)
        return i2 + int(d[v1, v2]) + int(d[v3, v0]) - int(d[v0, v2]) - int(d[v1, v3])

    # -- invariant checks (used by tests and the oracle harness) -------

    def check_invariants(self) -> None:
        """Raise AssertionError if any matrix invariant is violated."""
        d = self.d.astype(np.int64)
        assert (np.diag(d) == 0).all(), "nonzero diagonal"
        assert (d == d.T).all(), "asymmetric"
        assert (d <= self._cap).all(), "ring cap exceeded"
        through = np.min(d[:, :, None] + d[None, :, :], axis=1)
        assert (d <= through).all(), "triangle inequality violated"


def init_distance(L: int, initial_state: InitialState = InitialState.PRODUCT) -> DistanceMatrix:
    """Distance matrix of the chosen initial condition.

    A product state has zero entanglement everywhere (all-zero matrix); a
    maximally entangled state saturates the ring cap.
    """
    initial_state = InitialState(initial_state)
    if initial_state == InitialState.PRODUCT:
        d = np.zeros((L, L), dtype=np.uint16)
    else:
        d = cyclic_cap(L).copy()
    return DistanceMatrix(L, d)


class QuarterPartition:
    """Four contiguous quarters of the ring, anchored at a movable face.

    Quarter A spans qudits ``a_start + 1 .. a_start + L/4`` and B, C, D
    follow around the ring.  Anchoring at the current decimal position
    keeps the partition aligned with the moving structure of the
    dynamics; any fixed anchor is also valid since the ring is
    homogeneous on average.
    """

    __slots__ = ("L", "a_start")

    def __init__(self, L: int, a_start: int = 0):
        if L % 4:
            raise ValueError("quarter partition requires L divisible by 4")
        if not 0 <= a_start < L:
            raise ValueError("a_start must lie in [0, L)")
        self.L = L
        self.a_start = a_start

    @property
    def vertices(self) -> tuple[int, int, int, int]:
        """Faces bounding the four quarters, in ring order."""
        L, a = self.L, self.a_start
        quarter = L // 4
        return (a, (a + quarter) % L, (a + 2 * quarter) % L, (a + 3 * quarter) % L)

    @classmethod
    def at_decimal(cls, params: CircuitParams, decimal: int) -> "QuarterPartition":
        return cls(params.L, decimal)
