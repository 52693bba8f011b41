"""Ancilla purification dynamics as cluster connectivity.

A reference ancilla entangled with the full chain at time zero stays
entangled exactly as long as some qudit remains connected, through the
circuit's unmeasured worldlines and gates, to the initial time slice.
For stabilizer-like dynamics this is pure bookkeeping on two boolean
structures:

* ``c[i][j]`` - whether qudits ``i`` and ``j`` are currently connected;
* ``a[i]``    - whether qudit ``i`` is still connected to the ancilla.

Measuring qudit ``i`` disconnects it from everything (row and column of
``c`` drop to the identity pattern, ``a[i]`` drops to 0).  A gate on
``(i, i+1)`` merges the connectivity rows of the pair, and the merged
cluster inherits an ancilla link if either part had one.

``c`` is therefore always a disjoint union of cliques, i.e. an
equivalence relation.  The state is stored as a union-find partition
with one boolean per cluster, which makes every update O(alpha) instead
of O(L^2); ``c`` and ``a`` are materialized on demand.  Measurement
"removes" a site from its cluster by giving it a fresh node id, leaving
the old node behind as an inert ghost.

The entropy of the ancilla is 1 bit while any site has ``a[i] = 1`` and
0 forever after (gates only OR existing links together, so purification
is absorbing).  Two probe flags planted mid-run on the clusters of sites
0 and L/2 implement the two-point correlation diagnostic: the outcome is
1 exactly when the probes' clusters later merge, i.e. when the two
coupling points end up connected through the circuit.
"""

from __future__ import annotations

import numpy as np

from .trajectory import CircuitParams, StepEvent, StepKind, generate_trajectory

__all__ = [
    "ConnectivityState",
    "init_connectivity",
    "purification_time",
    "correlation_run",
]


class ConnectivityState:
    """Union-find over qudit worldline tops with per-cluster ancilla flags.

    Public surface mirrors the matrix picture: properties ``c`` (L x L
    boolean connectivity), ``a`` (length-L ancilla links) and ``s_a``
    (ancilla entropy, 0 or 1).  ``probe1``/``probe2`` appear after
    :meth:`couple_probes`.
    """

    __slots__ = (
        "L", "_site", "_parent", "_tree", "_live", "_anc", "_b1", "_b2",
        "_n_anc", "probes_active", "probe_hit",
    )

    def __init__(self, L: int):
        self.L = L
        # all sites start in one cluster that carries the ancilla link
        self._site = [0] * L          # site -> current node id
        self._parent = [0]            # union-find forest over node ids
        self._tree = [1]              # node count per root (balancing)
        self._live = [L]              # live sites per root
        self._anc = [True]            # ancilla flag per root
        self._b1 = [False]            # probe-1 flag per root
        self._b2 = [False]            # probe-2 flag per root
        self._n_anc = L               # live sites with an ancilla link
        self.probes_active = False
        self.probe_hit = False

    # -- union-find core ------------------------------------------------

    def _find(self, x: int) -> int:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    # -- updates ----------------------------------------------------------

    def apply_measurement(self, i: int) -> None:
        """Measure qudit ``i``: detach it into a fresh unlinked singleton."""
        old = self._find(self._site[i])
        self._live[old] -= 1
        if self._anc[old]:
            self._n_anc -= 1
        node = len(self._parent)
        self._parent.append(node)
        self._tree.append(1)
        self._live.append(1)
        self._anc.append(False)
        self._b1.append(False)
        self._b2.append(False)
        self._site[i] = node

    def apply_gate(self, i: int) -> None:
        """Merge the clusters of qudits ``i`` and ``i + 1`` (mod L)."""
        j = i + 1 if i + 1 < self.L else 0
        ri = self._find(self._site[i])
        rj = self._find(self._site[j])
        if ri == rj:
            return
        if self._tree[ri] < self._tree[rj]:
            ri, rj = rj, ri
        ai, aj = self._anc[ri], self._anc[rj]
        if ai != aj:
            self._n_anc += self._live[rj if not aj else ri]
            self._anc[ri] = True
        self._parent[rj] = ri
        self._tree[ri] += self._tree[rj]
        self._live[ri] += self._live[rj]
        if self._b1[rj]:
            self._b1[ri] = True
        if self._b2[rj]:
            self._b2[ri] = True
        if self._b1[ri] and self._b2[ri]:
            self.probe_hit = True

    def apply(self, event: StepEvent) -> None:
        """Advance by one trajectory step (gate first, then measurements)."""
        if event.kind == StepKind.CONTROL:
            self.apply_measurement(event.decimal_before)
        else:
            i = event.decimal_before
            self.apply_gate(i)
            if event.measure_left:
                self.apply_measurement(i)
            if event.measure_right:
                self.apply_measurement(i + 1 if i + 1 < self.L else 0)

    # -- probes ----------------------------------------------------------

    def couple_probes(self) -> None:
        """Attach probe flags to the current clusters of sites 0 and L/2.

        Probe 1 marks the cluster of site 0, probe 2 the cluster of site
        ``L/2``; both then spread under gates and thin out under
        measurement exactly like the ancilla flag.  The correlation hit
        fires as soon as one cluster carries both flags, i.e. when the two
        probes join through the circuit: immediately at coupling if sites
        0 and L/2 already share a cluster, or at the gate whose merge
        first brings the marks together.  Only merges can create the
        meet, so gates are the only place it is checked.  ``probe_hit``
        is sticky; once the probes have met the outcome stays 1.
        """
        r1 = self._find(self._site[0])
        r2 = self._find(self._site[self.L // 2])
        self._b1[r1] = True
        self._b2[r2] = True
        self.probes_active = True
        if r1 == r2:
            self.probe_hit = True

    # -- observables -------------------------------------------------------

    @property
    def s_a(self) -> int:
        """Ancilla entropy: 1 while any site keeps an ancilla link."""
        return 1 if self._n_anc else 0

    @property
    def purified(self) -> bool:
        return self._n_anc == 0

    @property
    def a(self) -> np.ndarray:
        """Length-L boolean vector of per-site ancilla links."""
        return np.array(
            [self._anc[self._find(n)] for n in self._site], dtype=bool
        )

    @property
    def c(self) -> np.ndarray:
        """L x L boolean connectivity matrix (disjoint union of cliques)."""
        roots = np.array([self._find(n) for n in self._site])
        return roots[:, None] == roots[None, :]

    @property
    def probe1(self) -> np.ndarray:
        """Per-site probe-1 links (rows of ``c`` seeded at site 0)."""
        return np.array([self._b1[self._find(n)] for n in self._site], dtype=bool)

    @property
    def probe2(self) -> np.ndarray:
        """Per-site probe-2 links (seeded at site L/2)."""
        return np.array([self._b2[self._find(n)] for n in self._site], dtype=bool)

    def clusters(self) -> list[set[int]]:
        """Current partition of sites into connectivity clusters."""
        groups: dict[int, set[int]] = {}
        for site, node in enumerate(self._site):
            groups.setdefault(self._find(node), set()).add(site)
        return sorted(groups.values(), key=min)


def init_connectivity(L: int) -> ConnectivityState:
    """Fully connected start: every site linked to the ancilla."""
    return ConnectivityState(L)


def purification_time(params: CircuitParams, realization_index: int) -> tuple[int, bool]:
    """First step at which the ancilla disentangles, censored at t_max.

    Returns ``(t, censored)``: the 1-based step index of purification, or
    ``(t_max, True)`` if the ancilla survives the whole run.  Purification
    is absorbing, so the run stops at the first hit.
    """
    traj = generate_trajectory(params, realization_index)
    state = ConnectivityState(params.L)
    for t in range(len(traj)):
        state.apply(traj[t])
        if state.purified:
            return t + 1, False
    return params.t_max, True


def correlation_run(params: CircuitParams, realization_index: int) -> int:
    """Two-point probe correlation outcome of one realization (0 or 1).

    Probes mark the clusters of sites 0 and L/2 at ``t_max / 2``; the
    result is 1 if the marked clusters are one cluster already or merge
    at any later step, and 0 if they never meet.  Connectivity through
    the circuit only ever grows, so the outcome is monotone in time.
    """
    if params.t_max % 2:
        raise ValueError("correlation runs require even t_max")
    t_half = params.t_max // 2
    traj = generate_trajectory(params, realization_index)
    state = ConnectivityState(params.L)
    for t in range(t_half):
        state.apply(traj[t])
    state.couple_probes()
    for t in range(t_half, params.t_max):
        if state.probe_hit:
            break
        state.apply(traj[t])
    return int(state.probe_hit)
