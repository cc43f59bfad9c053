"""
The tunneling function f(E_b)
=============================

In units of hbar^2 / 2 m L^2, the splitting of the lowest doublet of the
canonical quartic depends only on the barrier height.  The physical
tunneling frequency is f * hbar / (4 pi m L^2).
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from doublewell_trap import CONSTANTS, Regime, quartic_spectrum, tabulate_f, tunneling_frequency

# %%
# Lowest levels of the flagship well, Eb_tilde = 157.4: nearly degenerate pairs.
sol = quartic_spectrum(157.4, k=6)
print(np.round(sol.eigenvalues, 4))

# %%
# f over two decades.  Shallow barriers cannot hold a bound pair.
table = tabulate_f(np.geomspace(10, 1000, 41))
good = [r for r in table if r.regime is Regime.TUNNELING]
print(f"{len(table) - len(good)} grid points without a bound pair")
fig, ax = plt.subplots(figsize=(6, 4))
ax.semilogy([r.Eb_tilde for r in good], [r.f_value for r in good], ".-")
ax.set_xlabel("E_b  [hbar^2 / 2 m L^2]")
ax.set_ylabel("f")
fig.savefig("tunneling_law.png", dpi=120)

# %%
# Physical numbers for L = 10 um and E_b = 6e-8 eV.
e = CONSTANTS.elementary_charge
print(f"prefactor hbar/4 pi m = {CONSTANTS.tunneling_prefactor:.5e} Hz m^2")
print(f"tunneling frequency = {tunneling_frequency(10e-6, 6e-8 * e):.1f} Hz")
