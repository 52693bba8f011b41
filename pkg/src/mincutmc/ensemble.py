"""Ensemble runner: seeded cells, exact aggregation, CSV and manifests.

A *cell* is one parameter point ``(L, p, q)`` run for ``n`` realizations;
a *grid* is a cartesian product of cells.  Reproducibility rules:

* realization ``r`` of a cell depends only on the cell's master seed and
  ``r`` (streams are derived, never shared), so results are independent
  of worker count and of which other observables were requested;
* all observables are integers per realization, accumulated in exact
  64-bit sums, so means and standard errors are bit-identical no matter
  how realizations are chunked;
* grid cells derive their seeds from the grid master seed and the cell
  coordinates (exact float bit patterns), so adding cells to a grid
  never changes existing ones.

Output is a flat CSV with one row per (cell, observable, checkpoint
time) plus a JSON manifest recording everything needed to reproduce the
CSV byte for byte.
"""

from __future__ import annotations

import csv
import json
import struct
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .trajectory import (
    BIT_GENERATOR,
    CircuitParams,
    InitialState,
    derive_stream_seed,
    generate_trajectory,
)
from .mincut import init_distance
from .ancilla import ConnectivityState

__all__ = [
    "OBSERVABLES",
    "ObservableRecord",
    "CheckpointSchedule",
    "run_cell",
    "run_grid",
    "GridReport",
    "write_records_csv",
    "read_records_csv",
    "run_from_manifest",
]

#: canonical observable order used in CSV output
OBSERVABLES = ("s_half", "i2", "i3", "s_a", "t_pure", "corr")

CSV_COLUMNS = ("L", "p", "q", "t", "observable", "mean", "stderr", "n", "censored")

MANIFEST_FORMAT = "mincutmc-grid-1"


@dataclass(frozen=True)
class ObservableRecord:
    """One aggregated data point of an ensemble."""

    L: int
    p: float
    q: float
    t: int
    observable: str
    mean: float
    stderr: float
    n: int
    censored: int = 0


@dataclass(frozen=True)
class CheckpointSchedule:
    """Sorted, strictly increasing sampling times (1-based steps)."""

    times: tuple

    def __post_init__(self):
        ts = tuple(int(t) for t in self.times)
        if not ts:
            raise ValueError("schedule must contain at least one time")
        if any(t < 1 for t in ts):
            raise ValueError("checkpoint times are 1-based step counts")
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("checkpoint times must be strictly increasing")
        object.__setattr__(self, "times", ts)

    @classmethod
    def default(cls, t_max: int, ratio: float = 1.2) -> "CheckpointSchedule":
        """Dense early times, geometric spacing later, always t_max/2 and t_max.

        Early dynamics are resolved step by step (1..10); beyond that the
        spacing grows by ``ratio`` per checkpoint, which keeps the row
        count logarithmic in ``t_max``.
        """
        if t_max < 1:
            raise ValueError("t_max must be positive")
        if ratio <= 1.0:
            raise ValueError("ratio must exceed 1")
        ts = set(range(1, min(10, t_max) + 1))
        t = 10.0
        while t < t_max:
            t *= ratio
            ts.add(min(int(round(t)), t_max))
        ts.add(max(1, t_max // 2))
        ts.add(t_max)
        return cls(tuple(sorted(ts)))

    def clipped(self, t_max: int) -> "CheckpointSchedule":
        kept = tuple(t for t in self.times if t <= t_max)
        if not kept:
            raise ValueError("no checkpoint at or below t_max")
        return CheckpointSchedule(kept)


# -- single-cell simulation ---------------------------------------------


def _simulate_one(params, r, want, checkpoints, quarter_anchor):
    """Integer observables of realization ``r`` at every checkpoint."""
    L = params.L
    half = L // 2
    quarter = L // 4
    t_max = params.t_max
    want_mincut = want["s_half"] or want["i2"] or want["i3"]
    want_cluster = want["s_a"] or want["t_pure"] or want["corr"]
    t_half = t_max // 2

    traj = generate_trajectory(params, r)
    kinds = traj.kind.tolist()
    dec_before = traj.decimal_before.tolist()
    dec_after = traj.decimal_after.tolist()
    m_left = traj.measure_left.tolist()
    m_right = traj.measure_right.tolist()

    dm = init_distance(L, params.initial_state) if want_mincut else None
    conn = ConnectivityState(L) if want_cluster else None

    n_ck = len(checkpoints)
    out = {}
    if want["s_half"]:
        out["s_half"] = np.zeros(n_ck, dtype=np.int64)
    if want["i2"]:
        out["i2"] = np.zeros(n_ck, dtype=np.int64)
    if want["i3"]:
        out["i3"] = np.zeros(n_ck, dtype=np.int64)
    if want["s_a"]:
        out["s_a"] = np.zeros(n_ck, dtype=np.int64)

    ck_i = 0
    next_ck = checkpoints[0]
    t_pure = 0
    d = dm.d if dm is not None else None

    for t1 in range(1, t_max + 1):
        idx = t1 - 1
        i = dec_before[idx]
        if kinds[idx]:
            if dm is not None:
                dm.apply_chaotic(i, m_left[idx], m_right[idx])
            if conn is not None:
                conn.apply_gate(i)
                if m_left[idx]:
                    conn.apply_measurement(i)
                if m_right[idx]:
                    conn.apply_measurement(i + 1 if i + 1 < L else 0)
        else:
            if dm is not None:
                dm.apply_measurement(i)
            if conn is not None:
                conn.apply_measurement(i)
        if conn is not None:
            if not t_pure and conn.purified:
                t_pure = t1

        if t1 == next_ck:
            dec = dec_after[idx]
            if want["s_half"]:
                out["s_half"][ck_i] = d[dec, dec + half if dec + half < L else dec + half - L]
            if want["i2"] or want["i3"]:
                a0 = dec if quarter_anchor is None else quarter_anchor
                v0 = a0
                v1 = (a0 + quarter) % L
                v2 = (a0 + 2 * quarter) % L
                v3 = (a0 + 3 * quarter) % L
                s_ab = int(d[v0, v2])
                s_bc = int(d[v1, v3])
                sa = int(d[v0, v1])
                sb = int(d[v1, v2])
                sc = int(d[v2, v3])
                sd = int(d[v3, v0])
                i2 = sa + sc - sb - sd
                if i2 < 0:
                    i2 = 0
                if want["i2"]:
                    out["i2"][ck_i] = i2
                if want["i3"]:
                    out["i3"][ck_i] = i2 + sb + sd - s_ab - s_bc
            if want["s_a"]:
                out["s_a"][ck_i] = 0 if conn.purified else 1
            ck_i += 1
            next_ck = checkpoints[ck_i] if ck_i < n_ck else 0

        if want["corr"] and t1 == t_half:
            conn.couple_probes()

        if dm is None and conn is not None and conn.purified:
            # s_a stays 0 forever; stop once nothing else can change
            corr_settled = not want["corr"] or (t1 >= t_half and conn.probe_hit)
            if corr_settled:
                break

    if want["s_a"]:
        out["s_a"][ck_i:] = 0  # only reachable via the purified early exit
    if want["t_pure"]:
        out["t_pure"] = t_pure if t_pure else t_max
        out["t_pure_censored"] = 0 if t_pure else 1
    if want["corr"]:
        out["corr"] = int(conn.probe_hit)
    return out


def _cell_sums(params, r_start, r_stop, want, checkpoints, quarter_anchor, keep_samples):
    """Exact integer sums over a contiguous block of realizations."""
    n_ck = len(checkpoints)
    sums = {}
    for name in OBSERVABLES:
        if want[name]:
            width = n_ck if name in ("s_half", "i2", "i3", "s_a") else 1
            sums[name] = np.zeros(width, dtype=np.int64)
            sums[name + "/sq"] = np.zeros(width, dtype=np.int64)
    sums["censored"] = np.zeros(1, dtype=np.int64)
    samples = {name: [] for name in OBSERVABLES if want[name]} if keep_samples else None

    for r in range(r_start, r_stop):
        one = _simulate_one(params, r, want, checkpoints, quarter_anchor)
        for name in OBSERVABLES:
            if not want[name]:
                continue
            v = one[name]
            sums[name] += v
            sums[name + "/sq"] += np.square(v) if isinstance(v, np.ndarray) else v * v
            if keep_samples:
                samples[name].append(v)
        if want["t_pure"]:
            sums["censored"] += one["t_pure_censored"]
    return sums, samples


def _worker(args):
    return _cell_sums(*args)


def run_cell(
    params: CircuitParams,
    n_realizations: int,
    observables=("s_half",),
    schedule: CheckpointSchedule | None = None,
    n_workers: int = 1,
    quarter_anchor=None,
    keep_samples: bool = False,
):
    """Aggregate observables of one parameter cell.

    Parameters
    ----------
    params : CircuitParams
        Cell parameters; ``params.master_seed`` roots every realization
        stream.
    n_realizations : int
        Number of independent realizations.
    observables : iterable of str
        Subset of :data:`OBSERVABLES`.  ``s_half``/``i2``/``i3`` sample
        the minimal-cut state at every checkpoint; ``s_a`` samples the
        ancilla bit; ``t_pure`` and ``corr`` are scalar per realization.
    schedule : CheckpointSchedule, optional
        Sampling times; default :meth:`CheckpointSchedule.default`.
    n_workers : int
        Process count.  Pure throughput knob: results are bit-identical
        for any value.
    quarter_anchor : int or None
        Fixed anchor face for the quarter partition; None (default)
        anchors at the moving decimal position.
    keep_samples : bool
        Also return the raw per-realization values (for bootstrap work).

    Returns
    -------
    list of ObservableRecord, or (records, samples) if ``keep_samples``.
    """
    want = {name: False for name in OBSERVABLES}
    for name in observables:
        if name not in want:
            raise ValueError(f"unknown observable {name!r}")
        want[name] = True
    if not any(want.values()):
        raise ValueError("no observables requested")
    if (want["i2"] or want["i3"]) and params.L % 4:
        raise ValueError("i2/i3 need L divisible by 4")
    if want["corr"] and params.t_max % 2:
        raise ValueError("corr needs even t_max")
    if n_realizations < 1:
        raise ValueError("need at least one realization")
    if quarter_anchor is not None and not 0 <= quarter_anchor < params.L:
        raise ValueError("quarter_anchor must lie in [0, L)")

    schedule = schedule or CheckpointSchedule.default(params.t_max)
    checkpoints = schedule.clipped(params.t_max).times

    if n_workers > 1 and n_realizations > 1:
        bounds = np.linspace(0, n_realizations, n_workers + 1, dtype=int)
        jobs = [
            (params, int(a), int(b), want, checkpoints, quarter_anchor, keep_samples)
            for a, b in zip(bounds, bounds[1:])
            if b > a
        ]
        with ProcessPoolExecutor(max_workers=len(jobs)) as pool:
            parts = list(pool.map(_worker, jobs))
        sums, samples = parts[0]
        for other, other_samples in parts[1:]:
            for key in sums:
                sums[key] += other[key]
            if keep_samples:
                for key in samples:
                    samples[key].extend(other_samples[key])
    else:
        sums, samples = _cell_sums(
            params, 0, n_realizations, want, checkpoints, quarter_anchor, keep_samples
        )

    records = []
    n = n_realizations
    for name in OBSERVABLES:
        if not want[name]:
            continue
        s = sums[name]
        sq = sums[name + "/sq"]
        times = checkpoints if len(s) > 1 or name in ("s_half", "i2", "i3", "s_a") else (params.t_max,)
        for k, t in enumerate(times):
            mean = s[k] / n
            if n > 1:
                var = (sq[k] - s[k] * s[k] / n) / (n - 1)
                stderr = float(np.sqrt(max(var, 0.0) / n))
            else:
                stderr = 0.0
            records.append(
                ObservableRecord(
                    L=params.L, p=params.p, q=params.q, t=int(t),
                    observable=name, mean=float(mean), stderr=stderr, n=n,
                    censored=int(sums["censored"][0]) if name == "t_pure" else 0,
                )
            )
    if keep_samples:
        arrays = {
            name: np.array(vals) for name, vals in samples.items()
        }
        return records, arrays
    return records


# -- grids ----------------------------------------------------------------


def _float_bits(x: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(x)))[0]


def cell_seed(master_seed: int, L: int, p: float, q: float) -> int:
    """Seed of cell ``(L, p, q)``: chained stream derivations over the key.

    Uses the exact bit patterns of ``p`` and ``q``, so any two distinct
    float values get unrelated streams and every cell is isolated from
    grid composition.
    """
    s = derive_stream_seed(master_seed, L)
    s = derive_stream_seed(s, _float_bits(p))
    return derive_stream_seed(s, _float_bits(q))


@dataclass
class GridReport:
    """Outcome summary of a grid run."""

    completed: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    failed: list = field(default_factory=list)  # (cell, error string)

    @property
    def ok(self) -> bool:
        return not self.failed

    def __str__(self):
        msg = (
            f"{len(self.completed)} cells completed, "
            f"{len(self.skipped)} skipped, {len(self.failed)} failed"
        )
        for cell, err in self.failed:
            msg += f"\n  FAILED {cell}: {err.splitlines()[-1] if err else err}"
        return msg


def run_grid(
    L_values,
    p_values,
    q_values,
    n_realizations: int,
    observables=("s_half",),
    master_seed: int = 0,
    t_max=None,
    initial_state: InitialState = InitialState.PRODUCT,
    schedule: CheckpointSchedule | None = None,
    n_workers: int = 1,
    quarter_anchor=None,
    csv_path=None,
    manifest_path=None,
    resume: bool = False,
):
    """Run a cartesian grid of cells and optionally persist CSV + manifest.

    ``t_max`` may be an int, a callable ``L -> int``, or None for the
    ``2 L^2`` default.  With ``resume=True`` and an existing CSV, cells
    already present (matched on ``(L, p, q)``) are skipped and new rows
    appended.  A failing cell is recorded and the rest of the grid still
    runs; inspect the returned :class:`GridReport`.

    Returns ``(records, report)`` where ``records`` holds only rows
    produced by this call.
    """
    import traceback

    if t_max is None:
        t_rule = lambda L: 2 * L * L
    elif callable(t_max):
        t_rule = t_max
    else:
        t_rule = lambda L: int(t_max)

    done_keys = set()
    if resume and csv_path is not None:
        try:
            for rec in read_records_csv(csv_path):
                done_keys.add((rec.L, rec.p, rec.q))
        except FileNotFoundError:
            pass

    cells = list(product(L_values, p_values, q_values))
    report = GridReport()
    records = []
    manifest_cells = []
    started = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())

    for L, p, q in cells:
        key = (int(L), float(p), float(q))
        cell_t_max = int(t_rule(int(L)))
        seed = cell_seed(master_seed, *key)
        entry = {
            "L": key[0], "p": key[1], "q": key[2],
            "t_max": cell_t_max, "n": n_realizations, "cell_seed": seed,
        }
        if key in done_keys:
            entry["status"] = "skipped"
            report.skipped.append(key)
            manifest_cells.append(entry)
            continue
        params = CircuitParams(
            L=key[0], p=key[1], q=key[2], t_max=cell_t_max,
            master_seed=seed, initial_state=initial_state,
        )
        try:
            cell_records = run_cell(
                params, n_realizations, observables,
                schedule=schedule, n_workers=n_workers,
                quarter_anchor=quarter_anchor,
            )
        except Exception as exc:  # cell isolation: keep the grid going
            entry["status"] = "failed"
            report.failed.append((key, traceback.format_exc()))
            manifest_cells.append(entry)
            continue
        entry["status"] = "done"
        report.completed.append(key)
        manifest_cells.append(entry)
        records.extend(cell_records)
        if csv_path is not None:
            write_records_csv(cell_records, csv_path, append=True)

    if manifest_path is not None:
        manifest = {
            "format": MANIFEST_FORMAT,
            "bit_generator": BIT_GENERATOR,
            "master_seed": master_seed,
            "initial_state": InitialState(initial_state).value,
            "observables": list(observables),
            "n_realizations": n_realizations,
            "schedule": list(schedule.times) if schedule is not None else "default",
            "quarter_anchor": quarter_anchor,
            "n_workers_hint": n_workers,
            "L_values": [int(L) for L in L_values],
            "p_values": [float(p) for p in p_values],
            "q_values": [float(q) for q in q_values],
            "cells": manifest_cells,
            "csv": str(csv_path) if csv_path is not None else None,
            "started_utc": started,
            "finished_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        with open(manifest_path, "w") as fh:
            json.dump(manifest, fh, indent=1, sort_keys=True)
            fh.write("\n")
    return records, report


def run_from_manifest(manifest_path, csv_path=None, n_workers: int = 1):
    """Re-run the grid described by a manifest (byte-identical CSV rows).

    Timing fields and worker counts in the manifest are informational;
    everything that affects the numbers is replayed exactly.
    """
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ValueError("unrecognized manifest format")
    schedule = manifest["schedule"]
    schedule = None if schedule == "default" else CheckpointSchedule(tuple(schedule))
    t_by_L = {c["L"]: c["t_max"] for c in manifest["cells"]}
    return run_grid(
        manifest["L_values"],
        manifest["p_values"],
        manifest["q_values"],
        manifest["n_realizations"],
        observables=tuple(manifest["observables"]),
        master_seed=manifest["master_seed"],
        t_max=lambda L: t_by_L[L],
        initial_state=InitialState(manifest["initial_state"]),
        schedule=schedule,
        n_workers=n_workers,
        quarter_anchor=manifest["quarter_anchor"],
        csv_path=csv_path,
    )


# -- CSV ---------------------------------------------------------------------


def write_records_csv(records, path, append: bool = False) -> None:
    """Write records as flat CSV (columns :data:`CSV_COLUMNS`).

    Floats use ``repr`` (shortest round-trip form), so identical records
    always produce identical bytes.
    """
    import os

    header = not (append and os.path.exists(path) and os.path.getsize(path) > 0)
    with open(path, "a" if append else "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    rec.L, repr(rec.p), repr(rec.q), rec.t, rec.observable,
                    repr(rec.mean), repr(rec.stderr), rec.n, rec.censored,
                ]
            )


def read_records_csv(path) -> list:
    """Load a records CSV written by :func:`write_records_csv`."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header!r}")
        for row in reader:
            records.append(
                ObservableRecord(
                    L=int(row[0]), p=float(row[1]), q=float(row[2]),
                    t=int(row[3]), observable=row[4], mean=float(row[5]),
                    stderr=float(row[6]), n=int(row[7]), censored=int(row[8]),
                )
            )
    return records
