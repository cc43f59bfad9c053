"""Tunneling between the wells of the canonical quartic double well.

The dimensionless tunneling function ``f`` is the splitting of the lowest
doublet, ``eps_1 - eps_0``, in units of ``hbar**2 / (2 m L**2)``.  The
left/right oscillation frequency is then

    omega_10 / 2 pi = f * hbar / (4 pi m L**2).

Time is dimensionless throughout this module (units of ``hbar`` divided by
the energy scale); :func:`doublewell_trap.units.time_scale` converts to
seconds.
"""

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import curve_fit
from scipy.sparse import diags
from scipy.sparse.linalg import splu

from .eigensolver import Grid1D, build_hamiltonian, dimensionless_quartic, quartic_spectrum
from .errors import ConfigurationError, ContractError, DomainError, RegimeError
from .units import CONSTANTS, dimensionless_barrier

# propagator default: resolves the lowest doublet to < 0.2 % up to Eb_tilde ~ 320
PROPAGATOR_GRID = Grid1D(half_width=1.25, n_points=501)


class Regime(enum.Enum):
    TUNNELING = "TUNNELING"
    NO_BOUND_PAIR = "NO_BOUND_PAIR"
    BELOW_RESOLUTION = "BELOW_RESOLUTION"


@dataclass(frozen=True)
class TunnelingResult:
    Eb_tilde: float
    splitting_dimensionless: float
    f_value: float
    regime: Regime
    eigenvalues: tuple
    tunneling_frequency: float | None = None  # Hz


@dataclass(frozen=True)
class WaveState:
    grid: Grid1D
    amplitudes: np.ndarray
    time: float = 0.0  # dimensionless

    def __post_init__(self):
        norm = float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.spacing)
        if abs(norm - 1.0) > 1e-8:
            raise ContractError(f"wave state not normalised (norm={norm!r})")

    @property
    def density(self):
        return np.abs(self.amplitudes) ** 2


def _inner(u, v, spacing):
    return float(np.sum(u * v) * spacing)


def localized_states(phi0, phi1, grid):
    """Right- and left-localised combinations ``(phi0 +- phi1) / sqrt(2)``.

    ``phi1``'s overall sign is chosen so that the ``+`` state carries more
    than half its weight at ``zeta > 0``.
    """
    h = grid.spacing
    gram = np.array(
        [[_inner(phi0, phi0, h), _inner(phi0, phi1, h)], [0.0, _inner(phi1, phi1, h)]]
    )
    gram[1, 0] = gram[0, 1]
    if np.max(np.abs(gram - np.eye(2))) > 1e-6:
        raise ContractError("phi0 and phi1 must be orthonormal on the grid")
    plus = (phi0 + phi1) / np.sqrt(2.0)
    if _right_weight(plus**2, grid) < 0.5:
        phi1 = -phi1
        plus = (phi0 + phi1) / np.sqrt(2.0)
    minus = (phi0 - phi1) / np.sqrt(2.0)
    return plus, minus


def _right_weight(density, grid):
    z = grid.points
    return float((np.sum(density[z > 0]) + 0.5 * np.sum(density[z == 0])) * grid.spacing)


def well_populations(state, grid=None):
    """``(P_left, P_right)``; the point at ``zeta = 0`` is shared evenly."""
    if isinstance(state, WaveState):
        grid, density = state.grid, state.density
    else:
        density = np.asarray(state, dtype=float)
        if grid is None:
            raise ContractError("a grid is required with a bare density")
    total = float(np.sum(density) * grid.spacing)
    if abs(total - 1.0) > 1e-6:
        raise ContractError(f"density not normalised (integral={total!r})")
    right = _right_weight(density, grid)
    return total - right, right


def f_of_barrier(Eb_tilde, grid=None):
    """Dimensionless splitting of the lowest doublet and its regime."""
    sol = quartic_spectrum(Eb_tilde, k=2, grid=grid)
    e0, e1 = (float(x) for x in sol.eigenvalues[:2])
    gap = max(e1 - e0, 0.0)
    if e1 >= 0.0:
        regime = Regime.NO_BOUND_PAIR
    elif sol.splitting is None:
        regime = Regime.BELOW_RESOLUTION
    else:
        regime = Regime.TUNNELING
    return TunnelingResult(float(Eb_tilde), gap, gap, regime, (e0, e1))


def tunneling(L, E_b, grid=None):
    """Full :class:`TunnelingResult` for well distance ``L`` (m) and barrier ``E_b`` (J)."""
    res = f_of_barrier(dimensionless_barrier(E_b, L), grid)
    if res.regime is not Regime.TUNNELING:
        return res
    freq = res.f_value * CONSTANTS.tunneling_prefactor / L**2
    return TunnelingResult(res.Eb_tilde, res.splitting_dimensionless, res.f_value,
                           res.regime, res.eigenvalues, freq)


def tunneling_frequency(L, E_b, grid=None):
    """``omega_10 / 2 pi`` in Hz; raises :class:`RegimeError` outside the tunneling regime."""
    res = tunneling(L, E_b, grid)
    if res.regime is not Regime.TUNNELING:
        raise RegimeError(f"no tunneling frequency: {res.regime.value}", res.regime)
    return res.tunneling_frequency


def tabulate_f(Eb_tilde_grid, grid=None, workers=1):
    """:func:`f_of_barrier` over a grid of barrier heights, in grid order."""
    values = [float(x) for x in Eb_tilde_grid]
    if not values or any(not v > 0 for v in values):
        raise DomainError("Eb_tilde grid must be non-empty and positive")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda v: f_of_barrier(v, grid), values))
    return [f_of_barrier(v, grid) for v in values]


def two_level_evolution(phi0, phi1, E0, E1, t):
    """Probability density of ``(phi0 e^{-i E0 t} + phi1 e^{-i E1 t}) / sqrt(2)``."""
    if not E1 > E0:
        raise ContractError("require E1 > E0")
    omega = E1 - E0
    return 0.5 * (phi0**2 + phi1**2 + 2.0 * phi0 * phi1 * np.cos(omega * t))


def two_level_evolution_localized(phi_plus, phi_minus, E0, E1, t):
    """Same density written in the localised basis: ``cos**2`` / ``sin**2`` weights."""
    half = 0.5 * (E1 - E0) * t
    return phi_plus**2 * np.cos(half) ** 2 + phi_minus**2 * np.sin(half) ** 2


def _energy_moments(psi, H):
    interior = psi[1:-1]
    h_psi = H.matvec(interior)
    norm = np.vdot(interior, interior).real
    mean = np.vdot(interior, h_psi).real / norm
    second = np.vdot(h_psi, h_psi).real / norm
    return mean, np.sqrt(max(second - mean**2, 0.0))


def propagate_trajectory(state0, potential, dt, n_steps, reference_energy=None,
                         every=1, max_phase=0.5):
    """Crank-Nicolson evolution, yielding the state every ``every`` steps (and at the end).

    ``potential`` is a grid array or a callable ``t -> array`` evaluated at
    mid-step.  The Hamiltonian is shifted by ``reference_energy`` (default:
    the initial mean energy), which changes only a global phase but keeps
    the Cayley-transform phase error small.  A negative ``dt`` runs the
    exact inverse map.  Raises :class:`ConfigurationError` when
    ``|dt| * energy spread > max_phase``.
    """
    if not np.isfinite(dt) or dt == 0:
        raise ConfigurationError("dt must be finite and non-zero")
    if n_steps < 0 or every < 1:
        raise ConfigurationError("n_steps must be >= 0 and every >= 1")
    grid = state0.grid
    static = not callable(potential)

    def hamiltonian(t):
        u = potential if static else potential(t)
        return build_hamiltonian(u, grid)

    psi = np.asarray(state0.amplitudes, dtype=complex).copy()
    H = hamiltonian(state0.time + 0.5 * dt)
    mean, spread = _energy_moments(psi, H)
    shift = mean if reference_energy is None else float(reference_energy)
    if abs(dt) * max(spread, abs(mean - shift)) > max_phase:
        raise ConfigurationError(
            f"|dt|={abs(dt):g} too large for energy spread {spread:g} (limit {max_phase})"
        )

    def operators(H):
        d = H.diagonal - shift
        off = H.offdiagonal
        a_diag = 1.0 + 0.5j * dt * d
        a_off = 0.5j * dt * off
        return a_diag, a_off, 1.0 - 0.5j * dt * d, -a_off

    def apply_b(b_diag, b_off, v):
        out = b_diag * v
        out[:-1] += b_off * v[1:]
        out[1:] += b_off * v[:-1]
        return out

    a_diag, a_off, b_diag, b_off = operators(H)
    if static:
        lu = splu(diags([a_off, a_diag, a_off], [-1, 0, 1], format="csc"))
    t = state0.time
    for step in range(1, n_steps + 1):
        if not static:
            a_diag, a_off, b_diag, b_off = operators(hamiltonian(t + 0.5 * dt))
        rhs = apply_b(b_diag, b_off, psi[1:-1])
        if static:
            psi[1:-1] = lu.solve(rhs)
        else:
            ab = np.vstack([np.r_[0, a_off], a_diag, np.r_[a_off, 0]])
            psi[1:-1] = solve_banded((1, 1), ab, rhs)
        t = state0.time + step * dt
        if step % every == 0 or step == n_steps:
            yield WaveState(grid, psi.copy(), t)


def propagate(state0, potential, dt, n_steps, reference_energy=None, max_phase=0.5):
    """Final state after ``n_steps`` Crank-Nicolson steps (see :func:`propagate_trajectory`)."""
    final = state0
    for final in propagate_trajectory(state0, potential, dt, n_steps, reference_energy,
                                      every=max(n_steps, 1), max_phase=max_phase):
        pass
    return final


@dataclass(frozen=True)
class RabiRun:
    """Left/right dynamics from the propagator next to the two-level prediction."""

    Eb_tilde: float
    times: np.ndarray  # dimensionless
    p_right: np.ndarray
    p_right_two_level: np.ndarray
    splitting_eigen: float  # from the default-grid eigensolver
    period_fit: float  # from the propagated populations

    @property
    def period_eigen(self):
        return 2.0 * np.pi / self.splitting_eigen

    @property
    def period_relative_error(self):
        return abs(self.period_fit - self.period_eigen) / self.period_eigen


def _fit_period(times, p_right, guess):
    def model(t, c, amp, omega, phase):
        return c + amp * np.cos(omega * t + phase)

    p0 = (0.5, p_right[0] - 0.5, 2 * np.pi / guess, 0.0)
    params, _ = curve_fit(model, times, p_right, p0=p0)
    return 2.0 * np.pi / abs(params[2])


def rabi_oscillation(Eb_tilde, periods=1.0, steps_per_period=2000, samples=400,
                     grid=PROPAGATOR_GRID):
    """Propagate the right-localised state and compare with the two-level formula.

    The initial state is built from the eigenvectors on the propagator grid.
    The period is fitted to the propagated right-well population alone;
    ``splitting_eigen`` comes from an independent default-grid solve.
    """
    reference = f_of_barrier(Eb_tilde)
    if reference.regime is not Regime.TUNNELING:
        raise RegimeError("no tunneling doublet to follow", reference.regime)
    local = quartic_spectrum(Eb_tilde, k=2, grid=grid)
    phi0, phi1 = local.eigenvectors[:2]
    plus, _ = localized_states(phi0, phi1, grid)
    potential = dimensionless_quartic(grid.points, Eb_tilde)
    period_guess = 2 * np.pi / reference.splitting_dimensionless
    n_steps = int(round(periods * steps_per_period))
    dt = periods * period_guess / n_steps
    every = max(1, n_steps // samples)
    state0 = WaveState(grid, plus.astype(complex))
    times = [0.0]
    p_right = [well_populations(state0)[1]]
    for state in propagate_trajectory(state0, potential, dt, n_steps, every=every):
        times.append(state.time)
        p_right.append(well_populations(state)[1])
    times = np.array(times)
    p_right = np.array(p_right)
    e0, e1 = reference.eigenvalues
    p_two = np.cos(0.5 * (e1 - e0) * times) ** 2
    return RabiRun(float(Eb_tilde), times, p_right, p_two,
                   reference.splitting_dimensionless, _fit_period(times, p_right, period_guess))
