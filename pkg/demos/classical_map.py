"""
The controlled d-adic map: the zero-dimensional limit
=====================================================

Underneath the circuit sits a chaotic map x -> d x mod 1 on the unit
interval, steered toward the fixed point x = 0 by a contraction
x -> (1 - a) x applied with probability p.  Balancing the Lyapunov
exponents of the two moves gives the exact critical control rate

    p_c = ln(1 - a) / (ln(1 - a) - ln d),

which equals 1/2 when the contraction strength matches the expansion,
a = (d - 1)/d.  This script prints the phase boundary, simulates the
map on both sides of it, and shows the diffusive slowing down at the
critical point.
"""

import numpy as np

from mincutmc.classical import classical_pc, controlled_map_times, drift_velocity

D = 3
A = (D - 1) / D  # balanced contraction: p_c is exactly 1/2

# -- phase boundary -----------------------------------------------------------
print(f"base d = {D}: critical control rate vs contraction strength")
for a in (0.3, 0.5, A, 0.8, 0.95):
    print(f"  a = {a:.4f}: p_c = {classical_pc(a, D):.4f}")
print(f"\nbalanced point a = (d-1)/d = {A:.4f} gives p_c = {classical_pc(A, D)!r}")

# -- simulation on both sides --------------------------------------------------
print("\ncontrolled fraction within 2000 steps (1000 trajectories each):")
print(f"{'p':>6} {'fraction':>9} {'mean time':>10} {'drift':>7}")
for p in (0.40, 0.48, 0.52, 0.60, 0.80):
    times = controlled_map_times(D, A, p, 2000, 1000, master_seed=7)
    done = times >= 0
    frac = float(done.mean())
    mean_t = float(times[done].mean()) if done.any() else float("nan")
    print(f"{p:>6.2f} {frac:>9.3f} {mean_t:>10.1f} {drift_velocity(p):>+7.2f}")

print("""
Below p_c = 1/2 most trajectories stay chaotic forever; above it the
contraction wins and the first-passage time is finite.  Near p_c the
log-coordinate walk is unbiased, so control still happens eventually
but the time scale blows up diffusively.""")

# -- critical slowing down -------------------------------------------------------
print("first-passage times at p = 1/2 for shrinking tolerance:")
for tolerance in (1e-6, 1e-9, 1e-12):
    times = controlled_map_times(D, A, 0.5, 200000, 400,
                                  master_seed=11, tolerance=tolerance)
    done = times >= 0
    mean_t = float(times[done].mean())
    # an unbiased walk needs (ln tolerance)^2 steps to wander that far down
    scale = (np.log(tolerance) / np.log(D)) ** 2
    print(f"  tolerance {tolerance:g}: mean {mean_t:8.1f}  "
          f"(ln tol / ln d)^2 = {scale:7.1f}  ratio {mean_t / scale:.2f}")
