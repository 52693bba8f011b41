"""
Purification as a random walk
=============================

When every gated qudit is measured (q = 1) no entanglement survives a
step, and the only memory of the initial state rides on sites the
moving decimal has never touched.  The time to purify then equals the
time the decimal's walk needs to visit the whole ring, so the full
circuit ensemble must reproduce a one-line random-walk model.

The second half collapses the ancilla decay on the q = 0 control line
at p = 1/2, where the unbiased walk makes purification diffusive:
curves from different sizes stack when time is measured in units of
L^z with z = 2.
"""

import numpy as np

from mincutmc.classical import rw_cover_times
from mincutmc.ensemble import cell_seed, run_cell
from mincutmc.scaling import collapse_dynamic, time_curves
from mincutmc.trajectory import CircuitParams

# -- q = 1: purification time vs walk cover time ----------------------------
print("q = 1: purification time against the walk model")
print(f"{'L':>4} {'p':>5} {'circuit':>10} {'walk model':>11} {'rel diff':>9}")
for L in (16, 32):
    t_max = 2 * L * L
    for p in (0.3, 0.5, 0.7):
        params = CircuitParams(L=L, p=p, q=1.0, t_max=t_max,
                               master_seed=cell_seed(103, L, p, 1.0))
        (rec,) = run_cell(params, 1000, observables=("t_pure",))
        cover = rw_cover_times(L, p, 20000, master_seed=103)
        model = float(np.minimum(cover, t_max).mean())
        rel = abs(rec.mean - model) / model
        print(f"{L:>4} {p:>5.1f} {rec.mean:>10.2f} {model:>11.2f} {100 * rel:>8.2f}%")

# -- q = 0, p = 1/2: diffusive ancilla decay ---------------------------------
print("\nq = 0, p = 1/2: ancilla decay collapse")
records = []
for L in (12, 16, 24, 32):
    params = CircuitParams(L=L, p=0.5, q=0.0, t_max=2 * L * L,
                           master_seed=cell_seed(104, L, 0.5, 0.0))
    records.extend(run_cell(params, 500, observables=("s_a",)))
    print(f"L={L}: sampled ancilla decay")

curves = time_curves(records, "s_a", p=0.5, q=0.0)
fit = collapse_dynamic(curves, z_range=(1.0, 3.0), bootstrap=40, seed=1,
                       t_min=8.0)
print(f"\nz = {fit.value:.3f} +- {fit.error:.3f} "
      f"(quality {fit.quality:.3f}); diffusive reference z = 2")
