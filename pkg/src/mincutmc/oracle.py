"""Reference implementations against which the fast engines are checked.

The production code tracks entanglement through an incrementally updated
distance matrix (:mod:`mincutmc.mincut`) and ancilla connectivity through
a union-find partition (:mod:`mincutmc.ancilla`).  Both admit a slower,
structurally independent formulation: build the circuit's spacetime
lattice explicitly and answer every question from scratch.

* Minimal-cut entropies become shortest paths in the dual graph whose
  vertices are lattice faces and whose edges are qudit worldline
  segments, weight 0 if the segment was measured and 1 otherwise,
  computed here by 0-1 breadth-first search.
* Ancilla connectivity becomes reachability from the initial time slice
  through unmeasured segments and gates, computed by union-find over the
  primal lattice.

:func:`check_equivalence` replays random trajectories through both the
fast and the explicit representations and reports any disagreement; it
backs the oracle acceptance gate and the ``oracle-check`` CLI command.

:func:`wetting_p0` builds the same lattice non-dynamically for the
gate-only process (``p = 0``), where the gate pattern is a deterministic
staircase and only the measurement mask is random.  It shares no code
with the event-driven path and serves as an end-to-end distributional
cross-check.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .trajectory import (
    CircuitParams,
    InitialState,
    StepEvent,
    StepKind,
    derive_stream_seed,
    generate_trajectory,
)

__all__ = [
    "ExplicitLattice",
    "bfs01",
    "check_equivalence",
    "EquivalenceReport",
    "wetting_p0",
]

# stream salt so static-lattice draws never alias event-driven streams
_WETTING_SALT = 0x57E77157E7715


def bfs01(adjacency, source):
    """Single-source shortest paths over 0/1-weighted edges.

    ``adjacency`` maps vertex -> list of ``(neighbour, weight)`` with
    weights 0 or 1.  Returns a dict of distances for the reachable set.
    Deque-based: zero-weight edges go to the front, unit edges to the
    back, so each vertex settles at its true distance.
    """
    dist = {source: 0}
    dq = deque([source])
    while dq:
        u = dq.popleft()
        du = dist[u]
        for v, w in adjacency[u]:
            dv = du + w
            if v not in dist or dv < dist[v]:
                dist[v] = dv
                if w:
                    dq.append(v)
                else:
                    dq.appendleft(v)
    return dist


class _UnionFind:
    """Plain union-find over ``n`` integer nodes."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]

    def same(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)


class ExplicitLattice:
    """Spacetime lattice of one circuit realization, built event by event.

    Per qudit line the lattice stores the current (dangling) worldline
    segment as ``[left_face, right_face, lower_node, cut]``; a gate
    finalizes the two segments it touches and opens fresh ones around the
    face it creates.  Face ``k`` of the current slice sits immediately to
    the right of qudit ``k``, matching the convention of
    :class:`mincutmc.mincut.DistanceMatrix`.

    Primal nodes are 0 for the initial slice, ``1 + g`` for gate ``g``,
    and one terminal node per qudit line appended at query time.
    """

    INIT_NODE = 0

    def __init__(self, L: int, initial_state: InitialState = InitialState.PRODUCT):
        self.L = L
        self.initial_state = InitialState(initial_state)
        if self.initial_state == InitialState.PRODUCT:
            # one exterior face: the region below the circuit is connected
            self.face = [0] * L
            self.n_faces = 1
        else:
            # ring of distinct faces; the entangled past cannot be crossed
            self.face = list(range(L))
            self.n_faces = L
        self.n_gates = 0
        # dangling segment per line, from the initial slice upward
        self.seg = [
            [self.face[(j - 1) % L], self.face[j], self.INIT_NODE, False]
            for j in range(L)
        ]
        self._dual_edges: list[tuple[int, int, int]] = []
        self._primal_edges: list[tuple[int, int]] = []

    # -- event replay ----------------------------------------------------

    def apply(self, event: StepEvent) -> None:
        if event.kind == StepKind.CONTROL:
            self.seg[event.decimal_before][3] = True
            return
        i = event.decimal_before
        j = i + 1 if i + 1 < self.L else 0
        gate_node = 1 + self.n_gates
        self.n_gates += 1
        self._finalize(i, gate_node)
        self._finalize(j, gate_node)
        v = self.n_faces
        self.n_faces += 1
        self.seg[i] = [self.face[(i - 1) % self.L], v, gate_node, False]
        self.seg[j] = [v, self.face[j], gate_node, False]
        self.face[i] = v
        if event.measure_left:
            self.seg[i][3] = True
        if event.measure_right:
            self.seg[j][3] = True

    def _finalize(self, line: int, upper_node: int) -> None:
        left, right, lower, cut = self.seg[line]
        self._dual_edges.append((left, right, 0 if cut else 1))
        if not cut:
            self._primal_edges.append((lower, upper_node))

    @classmethod
    def from_params(cls, params: CircuitParams, realization_index: int, t: int | None = None) -> "ExplicitLattice":
        """Replay one realization's first ``t`` steps (default: all)."""
        traj = generate_trajectory(params, realization_index)
        if t is None:
            t = len(traj)
        lat = cls(params.L, params.initial_state)
        for k in range(t):
            lat.apply(traj[k])
        return lat

    # -- dual-graph queries (minimal cuts) --------------------------------

    def dual_adjacency(self):
        adj = defaultdict(list)
        for left, right, _, cut in self.seg:
            self._add_edge(adj, left, right, 0 if cut else 1)
        for u, v, w in self._dual_edges:
            self._add_edge(adj, u, v, w)
        for f in self.face:
            adj[f]
        return adj

    @staticmethod
    def _add_edge(adj, u, v, w):
        if u == v:
            return
        adj[u].append((v, w))
        adj[v].append((u, w))

    def distance(self, pos_a: int, pos_b: int) -> int:
        """Minimal-cut cost between current-slice faces at two positions."""
        fa, fb = self.face[pos_a], self.face[pos_b]
        if fa == fb:
            return 0
        return bfs01(self.dual_adjacency(), fa)[fb]

    def distance_matrix(self) -> np.ndarray:
        """All-pairs minimal-cut costs between current-slice faces."""
        adj = self.dual_adjacency()
        L = self.L
        out = np.zeros((L, L), dtype=np.int64)
        dist_from = {}
        for f in set(self.face):
            dist_from[f] = bfs01(adj, f)
        for a in range(L):
            da = dist_from[self.face[a]]
            for b in range(L):
                out[a, b] = da[self.face[b]]
        return out

    # -- primal-graph queries (ancilla connectivity) ----------------------

    def _primal_uf(self) -> _UnionFind:
        L = self.L
        terminal = 1 + self.n_gates
        uf = _UnionFind(terminal + L)
        for lower, upper in self._primal_edges:
            uf.union(lower, upper)
        for j, (_, _, lower, cut) in enumerate(self.seg):
            if not cut:
                uf.union(lower, terminal + j)
        return uf

    def connectivity_matrix(self) -> np.ndarray:
        """Boolean qudit-qudit connectivity through unmeasured spacetime."""
        uf = self._primal_uf()
        base = 1 + self.n_gates
        roots = np.array([uf.find(base + j) for j in range(self.L)])
        return roots[:, None] == roots[None, :]

    def ancilla_vector(self) -> np.ndarray:
        """Which qudits stay connected to the initial slice."""
        uf = self._primal_uf()
        base = 1 + self.n_gates
        init_root = uf.find(self.INIT_NODE)
        return np.array(
            [uf.find(base + j) == init_root for j in range(self.L)], dtype=bool
        )

    def s_a(self) -> int:
        return int(self.ancilla_vector().any())


# -- oracle equivalence harness -------------------------------------------


@dataclass
class Mismatch:
    """Reproducer for one oracle disagreement."""

    L: int
    p: float
    q: float
    initial_state: str
    master_seed: int
    realization_index: int
    step: int
    kind: str
    detail: str

    def __str__(self):
        return (
            f"{self.kind} mismatch at step {self.step}: "
            f"L={self.L} p={self.p:.6f} q={self.q:.6f} init={self.initial_state} "
            f"master_seed={self.master_seed} realization={self.realization_index} "
            f"({self.detail})"
        )


@dataclass
class EquivalenceReport:
    n_triples: int
    n_steps: int
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def __str__(self):
        head = f"checked {self.n_triples} realizations, {self.n_steps} steps"
        if self.ok:
            return head + ": all representations agree"
        lines = [head + f": {len(self.mismatches)} MISMATCHES"]
        lines += [str(m) for m in self.mismatches[:10]]
        return "\n".join(lines)


def check_equivalence(
    L_values=(6, 8, 12),
    t_max: int = 60,
    n_triples: int = 100,
    master_seed: int = 0,
    max_mismatches: int = 25,
) -> EquivalenceReport:
    """Replay random parameter triples through fast and explicit engines.

    For each sampled ``(L, p, q)`` one realization is stepped through the
    distance matrix, the connectivity state and the explicit lattice
    simultaneously; after every step the full distance matrix, the
    connectivity matrix and the ancilla vector must agree exactly.  Both
    initial states are exercised.  Returns a report carrying reproducer
    details for any mismatch.
    """
    from .ancilla import ConnectivityState
    from .mincut import init_distance

    rng = np.random.Generator(
        np.random.PCG64(derive_stream_seed(master_seed, 0x0AC1E))
    )
    report = EquivalenceReport(n_triples=n_triples, n_steps=0)
    inits = (InitialState.PRODUCT, InitialState.MAXIMALLY_ENTANGLED)
    for k in range(n_triples):
        L = int(rng.choice(np.asarray(L_values)))
        p = float(rng.random())
        q = float(rng.random())
        init = inits[k % 2]
        params = CircuitParams(
            L=L, p=p, q=q, t_max=t_max, master_seed=master_seed, initial_state=init
        )
        traj = generate_trajectory(params, k)
        dm = init_distance(L, init)
        conn = ConnectivityState(L)
        lat = ExplicitLattice(L, init)

        def record(step, kind, detail):
            report.mismatches.append(
                Mismatch(
                    L=L, p=p, q=q, initial_state=init.value,
                    master_seed=master_seed, realization_index=k,
                    step=step, kind=kind, detail=detail,
                )
            )

        for t in range(t_max):
            ev = traj[t]
            dm.apply(ev)
            conn.apply(ev)
            lat.apply(ev)
            report.n_steps += 1
            ref_d = lat.distance_matrix()
            if not np.array_equal(ref_d, dm.d.astype(np.int64)):
                bad = np.argwhere(ref_d != dm.d)[0]
                record(
                    t, "distance",
                    f"d[{bad[0]}][{bad[1]}]={dm.d[bad[0], bad[1]]} "
                    f"vs oracle {ref_d[bad[0], bad[1]]}",
                )
                break
            if not np.array_equal(lat.connectivity_matrix(), conn.c):
                record(t, "connectivity", "cluster partition differs")
                break
            if not np.array_equal(lat.ancilla_vector(), conn.a):
                record(t, "ancilla", "ancilla vector differs")
                break
        if len(report.mismatches) >= max_mismatches:
            break
    return report


# -- static gate-only lattice (wetting construction) ------------------------


def wetting_p0(
    L: int,
    q: float,
    depth: int,
    realization_index: int,
    master_seed: int = 0,
    initial_state: InitialState = InitialState.MAXIMALLY_ENTANGLED,
):
    """Half-cut entropy and ancilla bit from the static gate-only lattice.

    With no control steps the gate at step ``t`` always acts on sites
    ``(t mod L, t + 1 mod L)``: the lattice is a fixed tilted brickwork
    winding helically around the ring, and the only randomness is the
    i.i.d. measurement mask (each post-gate segment cut with probability
    ``q``).  The construction here is direct: faces and segments are laid
    out arithmetically rather than by replaying events, then queried with
    the same 0-1 BFS / union-find machinery as :class:`ExplicitLattice`.

    Uses its own salted stream, so results are comparable to event-driven
    runs only in distribution, never realization by realization.

    Returns ``(s_half, s_a)`` measured at the position the moving decimal
    would occupy after ``depth`` steps.
    """
    if depth < 1:
        raise ValueError("depth must be positive")
    if L < 4 or L % 2:
        raise ValueError("L must be even and at least 4")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    initial_state = InitialState(initial_state)
    rng = np.random.Generator(
        np.random.PCG64(derive_stream_seed(master_seed ^ _WETTING_SALT, realization_index))
    )
    cut = rng.random((depth, 2)) < q  # [:, 0] left segment, [:, 1] right segment

    product = initial_state == InitialState.PRODUCT

    # dual faces: initial slice faces then one face per gate
    def init_face(pos):
        return 0 if product else pos % L

    n_init = 1 if product else L
    gate_face = lambda t: n_init + t

    adj = defaultdict(list)
    add = ExplicitLattice._add_edge
    if not product:
        for j in range(L):
            add(adj, init_face(j - 1), init_face(j), 1)
    for t in range(depth):
        below_left = gate_face(t - 1) if t >= 1 else init_face(t - 1)
        add(adj, below_left, gate_face(t), 0 if cut[t, 0] else 1)
        below_right = gate_face(t + 1 - L) if t + 1 - L >= 0 else init_face(t + 1)
        add(adj, below_right, gate_face(t), 0 if cut[t, 1] else 1)

    def face_at(pos):
        # newest gate at this ring position, if any
        if depth - 1 < pos:
            return init_face(pos)
        t_last = depth - 1 - ((depth - 1 - pos) % L)
        return gate_face(t_last)

    decimal = depth % L
    fa = face_at(decimal)
    fb = face_at((decimal + L // 2) % L)
    s_half = 0 if fa == fb else bfs01(adj, fa)[fb]

    # primal connectivity: INIT node 0, gates 1..depth, terminals after
    terminal = 1 + depth
    uf = _UnionFind(terminal + L)
    for j in range(L):
        t_first = max(j - 1, 0)  # earliest gate touching line j
        first = 1 + t_first if t_first < depth else terminal + j
        uf.union(0, first)
    for t in range(depth):
        if not cut[t, 0]:
            up = t + L - 1
            uf.union(1 + t, 1 + up if up < depth else terminal + (t % L))
        if not cut[t, 1]:
            up = t + 1
            uf.union(1 + t, 1 + up if up < depth else terminal + ((t + 1) % L))
    s_a = int(any(uf.same(0, terminal + j) for j in range(L)))
    return s_half, s_a
