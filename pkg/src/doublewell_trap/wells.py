"""Double-well geometry from quartic coefficients, and the inverse design of V3.

For ``U = a d**4 - b d**2`` (``a, b > 0``) the minima sit at
``d = +-sqrt(b / 2a)`` and the barrier is ``b**2 / 4a`` above them.  The
coordinate ``d`` is in units of ``r1``, so the physical well distance scales
with the trap size while the barrier does not.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .electrostatics import QuarticCoefficients, expansion_integrals, transition_voltage
from .errors import AmbiguousError, DomainError, NoSolutionError, RegimeError
from .units import CONSTANTS, energy_scale

SUB_QUANTUM_FRACTION = 1e-3
V3_RESOLUTION = 1e-10  # volts


@dataclass(frozen=True)
class DoubleWellShape:
    """Physical well distance ``L`` (m) and barrier height ``E_b`` (J)."""

    well_distance: float
    barrier_height: float
    r1_scale: float = 1.0

    def __post_init__(self):
        if not (self.well_distance > 0 and self.barrier_height > 0):
            raise DomainError("well distance and barrier height must be > 0")

    @property
    def sub_quantum(self):
        """True when the barrier is negligible on the ``hbar**2/2mL**2`` scale."""
        return self.barrier_height < SUB_QUANTUM_FRACTION * energy_scale(self.well_distance)


def shape_from_coefficients(c, r1):
    """Convert quartic coefficients (dimensionless ``d = z / r1``) to a :class:`DoubleWellShape`."""
    if r1 <= 0:
        raise DomainError(f"r1 must be > 0, got {r1!r}")
    if c.a <= 0:
        raise RegimeError("quartic coefficient a <= 0: potential is not confining", "unconfined")
    if c.b <= 0:
        raise RegimeError("quadratic coefficient b <= 0: single well", "single")
    L = r1 * 2.0 * np.sqrt(c.b / (2.0 * c.a))
    return DoubleWellShape(float(L), float(c.b**2 / (4.0 * c.a)), r1)


def coefficients_from_shape(L, E_b, r1):
    """Inverse of :func:`shape_from_coefficients`: ``U = E_b (16 (d/L)**4 - 8 (d/L)**2)``."""
    if not (L > 0 and E_b > 0 and r1 > 0):
        raise DomainError("L, E_b and r1 must all be > 0")
    ratio = r1 / L
    return QuarticCoefficients(a=16.0 * E_b * ratio**4, b=8.0 * E_b * ratio**2, u0=0.0)


def classical_axial_frequency(shape, mass=CONSTANTS.electron_mass):
    """Small-oscillation frequency ``omega_z / 2 pi`` (Hz) in either well."""
    omega = 4.0 / shape.well_distance * np.sqrt(2.0 * shape.barrier_height / mass)
    return omega / (2.0 * np.pi)


def _shape_quantity(geom, v1, v2, v3, which):
    ints = expansion_integrals(geom)
    e = CONSTANTS.elementary_charge
    a = e * ((v2 - v1) * ints.a1 + (v3 - v2) * ints.a2)
    b = -e * ((v2 - v1) * ints.b1 + (v3 - v2) * ints.b2)
    if which == "b":
        return b
    if b <= 0 or a <= 0:
        return 0.0  # continuous limit of a vanishing double well
    if which == "L":
        return geom.r1 * 2.0 * np.sqrt(b / (2.0 * a))
    return b**2 / (4.0 * a)


def solve_v3_for_shape(geom, v1, v2, L=None, E_b=None, bracket=None, n_probe=17):
    """Outer-ring voltage producing a target well distance ``L`` (m) or barrier ``E_b`` (J).

    Bisection over ``bracket`` (default ``[V3* - 0.1 V, V3*]``, with ``V3*``
    the transition voltage).  The bracket is probed at ``n_probe`` points
    first and rejected if the target quantity is not monotone there.
    """
    if (L is None) == (E_b is None):
        raise DomainError("give exactly one of L or E_b")
    which, target = ("L", L) if L is not None else ("Eb", E_b)
    if target < 0:
        raise DomainError("target must be >= 0")
    if bracket is None:
        v_star = transition_voltage(geom, v1, v2)
        bracket = (v_star - 0.1, v_star)
    lo, hi = sorted(float(v) for v in bracket)
    if target == 0:
        # both L and E_b vanish exactly where b changes sign
        which = "b"

    def residual(v3):
        return _shape_quantity(geom, v1, v2, v3, which) - target

    probe = np.array([residual(v) for v in np.linspace(lo, hi, n_probe)])
    steps = np.diff(probe)
    if not (np.all(steps >= 0) or np.all(steps <= 0)):
        raise AmbiguousError(f"{which} is not monotone on [{lo}, {hi}] V")
    f_lo, f_hi = probe[0], probe[-1]
    noise = 64 * np.finfo(float).eps * np.max(np.abs(probe))
    if abs(f_lo) <= noise:
        return lo
    if abs(f_hi) <= noise:
        return hi
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSolutionError(f"target {which}={target!r} not bracketed by [{lo}, {hi}] V")
    return bisect(residual, lo, hi, xtol=V3_RESOLUTION, rtol=4 * np.finfo(float).eps, maxiter=200)
