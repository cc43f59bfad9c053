"""
Well distance and barrier versus the outer-ring voltage
=======================================================

Below the transition voltage the trap holds two wells.  Their separation L
and barrier E_b shrink to zero at V3*.  The inverse problem, finding the V3
that gives a wanted L, is a bisection on this monotone branch.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from doublewell_trap import (
    CONSTANTS,
    FIG2_GEOMETRY,
    FIG2_VOLTAGES,
    solve_v3_for_shape,
    sweep_v3,
    transition_voltage,
)

geom, volt = FIG2_GEOMETRY, FIG2_VOLTAGES
v_star = transition_voltage(geom, volt.v1, volt.v2)

grid = np.linspace(v_star - 0.1, v_star + 0.02, 121)
rows = sweep_v3(geom, volt.v1, volt.v2, grid)
double = [r for r in rows if r.regime == "double"]
v3 = np.array([r.v3 for r in double])
L = np.array([r.well_distance for r in double])
eb = np.array([r.barrier_height for r in double]) / CONSTANTS.elementary_charge

fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
ax1.plot(v3, L * 1e6)
ax1.set_ylabel("L [um]")
ax2.semilogy(v3, eb)
ax2.set_ylabel("E_b [eV]")
ax2.set_xlabel("V3 [V]")
for ax in (ax1, ax2):
    ax.axvline(v_star, color="k", lw=0.5)
fig.savefig("transition_sweep.png", dpi=120)

# %%
# A 10 um double well needs V3 about 1.2 mV below the transition.
target = solve_v3_for_shape(geom, volt.v1, volt.v2, L=10e-6)
print(f"V3 for L = 10 um: {target:.9f} V  ({(target - v_star) * 1e3:.3f} mV from V3*)")
