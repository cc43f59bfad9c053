"""
Axial potential of the mirror-image planar trap
===============================================

Two planar electrode sets face each other across a gap ``2 zc``.  Along the
axis, the electron energy is a quartic double well near the middle.  This
script shows the profile below, at and above the transition voltage of the
outer ring.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from doublewell_trap import (
    CONSTANTS,
    FIG2_GEOMETRY,
    FIG2_VOLTAGES,
    axial_potential,
    expansion_integrals,
    quartic_coefficients,
    transition_voltage,
)

geom, volt = FIG2_GEOMETRY, FIG2_VOLTAGES

# %%
# The quartic expansion comes from four Bessel-type integrals.  b1 and b2
# are nearly equal, so the transition sits close to V1.
ints = expansion_integrals(geom)
v_star = transition_voltage(geom, volt.v1, volt.v2)
print(ints)
print(f"transition V3* = {v_star:.6f} V  (V1 = {volt.v1} V)")

# %%
# Profiles over the central part of the gap.  The electron energy in eV is
# simply -V.
z = np.linspace(0.05, 0.95, 801) * geom.zc_tilde
fig, ax = plt.subplots(figsize=(6, 4))
for dv, label in ((-0.05, "below"), (0.0, "at"), (0.05, "above")):
    u = -axial_potential(z, geom, volt.with_v3(v_star + dv))
    ax.plot(z, u - u[len(z) // 2], label=f"{label} V3*")
ax.set_xlabel("z / r1")
ax.set_ylabel("U - U(centre)  [eV]")
ax.set_ylim(-0.02, 0.02)
ax.legend()
fig.savefig("axial_potential.png", dpi=120)

# %%
# Near the centre the full profile and the expansion a d^4 - b d^2 agree.
c = quartic_coefficients(geom, volt.with_v3(v_star - 0.05))
d = np.linspace(-0.3, 0.3, 7)
exact = -axial_potential(geom.center + d, geom, volt.with_v3(v_star - 0.05))
approx = (c.energy(d) - c.u0) / CONSTANTS.elementary_charge + exact[3]
print(np.c_[d, exact, approx])
