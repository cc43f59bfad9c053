"""Axial double-well physics of an electron in a mirror-image planar Penning trap.

The package is organised bottom-up:

* :mod:`.units` -- CODATA constants and the ``hbar**2 / (2 m L**2)`` energy scale.
* :mod:`.electrostatics` -- on-axis potential, quartic expansion, transition voltage.
* :mod:`.wells` -- well distance / barrier height, classical axial frequency, V3 design.
* :mod:`.eigensolver` -- finite-difference spectrum of the dimensionless quartic.
* :mod:`.tunneling` -- tunneling splitting, localized states, two-level and
  Crank-Nicolson dynamics.
* :mod:`.cli` -- the ``trap`` command producing CSV datasets.
"""

from .errors import (
    AmbiguousError,
    ConfigurationError,
    ContractError,
    DomainError,
    NoSolutionError,
    NumericalError,
    QuadratureError,
    RegimeError,
    TrapError,
)
from .units import CONSTANTS, PhysicalConstants, dimensionless_barrier, energy_scale
from .electrostatics import (
    FIG2_GEOMETRY,
    FIG2_VOLTAGES,
    ExpansionIntegrals,
    QuarticCoefficients,
    TrapGeometry,
    VoltageSet,
    axial_energy,
    axial_potential,
    expansion_integrals,
    phi_kernel,
    quartic_coefficients,
    quartic_fit,
    sweep_v3,
    transition_voltage,
)
from .wells import (
    DoubleWellShape,
    classical_axial_frequency,
    coefficients_from_shape,
    shape_from_coefficients,
    solve_v3_for_shape,
)
from .eigensolver import (
    EigenSolution,
    Grid1D,
    build_hamiltonian,
    dimensionless_quartic,
    lowest_eigenpairs,
    quartic_spectrum,
)
from .tunneling import (
    Regime,
    TunnelingResult,
    WaveState,
    f_of_barrier,
    localized_states,
    propagate,
    tabulate_f,
    tunneling_frequency,
    two_level_evolution,
    well_populations,
)

__version__ = "0.1.0"
