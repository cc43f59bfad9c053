"""Physical constants and the dimensionless scalings used throughout.

Energies in the quantum part of the package are measured in units of
``hbar**2 / (2 m L**2)`` and lengths in units of the well distance ``L``.
All public functions take and return SI values; electron-volts only appear
through the explicit conversion helpers.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA 2018 values (exact where the SI defines them)."""

    hbar: float = 1.054571817e-34  # J s
    electron_mass: float = 9.1093837015e-31  # kg
    elementary_charge: float = 1.602176634e-19  # C, magnitude |e|

    @property
    def ev_per_joule(self):
        return 1.0 / self.elementary_charge

    @property
    def tunneling_prefactor(self):
        """``hbar / (4 pi m)`` in Hz m**2: frequency of a unit dimensionless splitting at L = 1 m."""
        return self.hbar / (4.0 * np.pi * self.electron_mass)


CONSTANTS = PhysicalConstants()


def ev_to_joule(x):
    return np.multiply(x, CONSTANTS.elementary_charge)


def joule_to_ev(x):
    return np.divide(x, CONSTANTS.elementary_charge)


def _require_positive(name, value):
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")


def energy_scale(L, mass=CONSTANTS.electron_mass):
    """Return ``hbar**2 / (2 m L**2)`` in joules."""
    _require_positive("L", L)
    _require_positive("mass", mass)
    return CONSTANTS.hbar**2 / (2.0 * mass * np.square(L))


def dimensionless_barrier(E_b, L, mass=CONSTANTS.electron_mass):
    """Barrier height ``E_b`` (J) measured in units of :func:`energy_scale` at ``L``."""
    _require_positive("E_b", E_b)
    return E_b / energy_scale(L, mass)


def time_scale(L, mass=CONSTANTS.electron_mass):
    """Seconds per unit of dimensionless time, ``hbar / energy_scale(L)``."""
    return CONSTANTS.hbar / energy_scale(L, mass)
