"""On-axis electrostatics of a mirror-image planar Penning trap.

Each electrode plane carries a central disk (radius ``r1``) and a ring out to
``r2``; the outer ring extends to infinity.  Lengths are measured in units of
``r1`` (``z_tilde = z / r1``) with the origin on the lower plane, so the trap
centre sits at ``zc_tilde / 2``.

The potential kernel

    phi_i(z) = r_i * int_0^inf sinh(k (z - zc)) / sinh(k zc) * J1(k r_i) dk

is evaluated by splitting off ``-exp(-k z)``, whose Bessel transform is known
in closed form, and integrating the exponentially damped remainder with
composite Gauss-Legendre panels.  The remainder decays at least as fast as
``exp(-k zc)`` for every ``z`` in ``[0, zc]``, so evaluation right at the
electrode planes costs no more than at the centre.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import j1

from .errors import ConfigurationError, DomainError, NumericalError, QuadratureError
from .units import CONSTANTS

QUAD_RTOL = 1e-10
_START_ORDER = 16
_MAX_ORDER = 256
# exp(-40) ~ 4e-18: beyond this the damped integrands are below double precision
_ENVELOPE_LOG = 40.0


@dataclass(frozen=True)
class TrapGeometry:
    """Electrode layout; ``r2_tilde`` and ``zc_tilde`` are in units of ``r1`` (metres)."""

    r1: float
    r2_tilde: float
    zc_tilde: float

    def __post_init__(self):
        for name in ("r1", "r2_tilde", "zc_tilde"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if self.r1 <= 0:
            raise DomainError(f"r1 must be > 0, got {self.r1!r}")
        if self.r2_tilde <= 1:
            raise DomainError(f"r2_tilde must exceed 1, got {self.r2_tilde!r}")
        if self.zc_tilde <= 0:
            raise DomainError(f"zc_tilde must be > 0, got {self.zc_tilde!r}")

    @property
    def radii(self):
        return (1.0, self.r2_tilde)

    @property
    def center(self):
        return 0.5 * self.zc_tilde


@dataclass(frozen=True)
class VoltageSet:
    """Electrode potentials in volts: disk, first ring, outer ring."""

    v1: float
    v2: float
    v3: float

    def __post_init__(self):
        for name in ("v1", "v2", "v3"):
            if not np.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def with_v3(self, v3):
        return VoltageSet(self.v1, self.v2, v3)


@dataclass(frozen=True)
class ExpansionIntegrals:
    """Dimensionless per-electrode expansion integrals (quartic ``a``, quadratic ``b``)."""

    a1: float
    a2: float
    b1: float
    b2: float


@dataclass(frozen=True)
class QuarticCoefficients:
    """Electron energy near the trap centre, ``U = u0 + a d**4 - b d**2``.

    ``d = z_tilde - zc_tilde / 2`` is dimensionless (units of ``r1``); ``a``,
    ``b`` and ``u0`` are in joules.  ``b > 0`` means a double well.
    ``a_err``/``b_err`` are rounding-error estimates (zero for the
    quadrature route).
    """

    a: float
    b: float
    u0: float
    coordinate_convention: str = "d = z_tilde - zc_tilde/2"
    a_err: float = 0.0
    b_err: float = 0.0

    @property
    def is_double_well(self):
        return self.b > 0

    def energy(self, d):
        d = np.asarray(d, dtype=float)
        return self.u0 + self.a * d**4 - self.b * d**2


# Reference trap of the optimised mirror-image design; v3 is the flagship double-well setting.
FIG2_GEOMETRY = TrapGeometry(r1=100e-6, r2_tilde=4.45, zc_tilde=5.6)
FIG2_VOLTAGES = VoltageSet(v1=-12.8, v2=-11.4, v3=-12.8013)


@lru_cache(maxsize=None)
def _gauss_legendre(order):
    return np.polynomial.legendre.leggauss(order)


def _panel_nodes(k_max, panel_width, order):
    """Nodes and weights of composite Gauss-Legendre on ``[0, k_max]``."""
    n_panels = max(1, int(np.ceil(k_max / panel_width)))
    edges = np.linspace(0.0, k_max, n_panels + 1)
    x, w = _gauss_legendre(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    k = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wk = (half[:, None] * w[None, :]).ravel()
    return k, wk


def _paneled_integral(integrand, k_max, panel_width, scale=1.0, rtol=QUAD_RTOL):
    """Integrate ``integrand(k)`` (shape ``(n_k, ...)``) over ``[0, k_max]``.

    The per-panel order is doubled until two successive estimates agree to
    ``rtol`` relative to ``max(|I|, scale)``.  Every output element shares
    one node set, so results are smooth functions of any parameter carried
    in the trailing axes.
    """
    previous = None
    order = _START_ORDER
    while order <= _MAX_ORDER:
        k, wk = _panel_nodes(k_max, panel_width, order)
        values = integrand(k)
        estimate = np.tensordot(wk, values, axes=(0, 0))
        if previous is not None:
            err = np.max(np.abs(estimate - previous))
            ref = max(float(np.max(np.abs(estimate))), scale)
            if err <= rtol * ref:
                return estimate
        previous = estimate
        order *= 2
    raise QuadratureError(
        f"Bessel quadrature did not converge (k_max={k_max:g}, order={order // 2})",
        error_estimate=float(np.max(np.abs(estimate - previous))) if previous is not None else None,
    )


def _as_z(z_tilde, geom):
    z = np.asarray(z_tilde, dtype=float)
    if not np.all(np.isfinite(z)) or np.any(z < 0) or np.any(z > geom.zc_tilde):
        raise DomainError(f"z_tilde must lie in [0, {geom.zc_tilde}]")
    return z


def phi_kernel(i, z_tilde, geom):
    """Potential kernel of electrode ``i`` (1 = disk, 2 = first ring); vectorised in ``z_tilde``."""
    if i not in (1, 2):
        raise DomainError(f"electrode index must be 1 or 2, got {i!r}")
    z = _as_z(z_tilde, geom)
    r = geom.radii[i - 1]
    zc = geom.zc_tilde
    zf = np.atleast_1d(z)

    def remainder(k):
        kk = k[:, None]
        # sinh ratio + exp(-k z) = [e^{-k(2zc-z)} - e^{-k(2zc+z)}] / (1 - e^{-2k zc})
        num = np.exp(-kk * (2 * zc - zf)) * -np.expm1(-2 * kk * zf)
        den = -np.expm1(-2 * kk * zc)
        return num / den * j1(kk * r)

    decay = 2 * zc - float(np.max(zf))
    k_max = _ENVELOPE_LOG / decay
    tail = r * _paneled_integral(remainder, k_max, np.pi / max(r, 1.0))
    phi = -1.0 + zf / np.hypot(zf, r) + tail
    return phi.reshape(z.shape) if z.ndim else float(phi[0])


def _paired_kernels(z, geom):
    zr = geom.zc_tilde - z
    return (
        phi_kernel(1, z, geom) + phi_kernel(1, zr, geom),
        phi_kernel(2, z, geom) + phi_kernel(2, zr, geom),
    )


def axial_potential(z_tilde, geom, volt):
    """On-axis potential in volts at ``z_tilde`` (units of ``r1``)."""
    z = _as_z(z_tilde, geom)
    s1, s2 = _paired_kernels(z, geom)
    return (volt.v2 - volt.v1) * s1 + (volt.v3 - volt.v2) * s2 + volt.v3


def axial_energy(z_tilde, geom, volt):
    """Electron potential energy ``-|e| V`` in joules."""
    return -CONSTANTS.elementary_charge * axial_potential(z_tilde, geom, volt)


def _cosh_k_max(power, zc):
    # smallest k where 2 k**power exp(-k zc/2) drops below exp(-ENVELOPE_LOG)
    k = 1.0
    while power * np.log(k) + np.log(2.0) - 0.5 * k * zc > -_ENVELOPE_LOG:
        k *= 1.05
    return k


@lru_cache(maxsize=256)
def _expansion_integrals_cached(r2_tilde, zc_tilde):
    out = {}
    for power, prefactor, label in ((4, 1 / 24, "a"), (2, 1 / 2, "b")):
        k_max = _cosh_k_max(power, zc_tilde)
        for idx, r in ((1, 1.0), (2, r2_tilde)):

            def integrand(k, r=r, power=power):
                # 1/cosh(x) = 2 e^{-x} / (1 + e^{-2x})
                x = 0.5 * k * zc_tilde
                return k**power * j1(k * r) * 2 * np.exp(-x) / (1 + np.exp(-2 * x))

            # scale floor keeps the stopping rule finite if an integral is ~0
            value = _paneled_integral(integrand, k_max, np.pi / max(r, 1.0), scale=1e-12)
            out[f"{label}{idx}"] = r * prefactor * float(value)
    return ExpansionIntegrals(**out)


def expansion_integrals(geom):
    """Quartic/quadratic expansion integrals; depend only on ``r2_tilde`` and ``zc_tilde``."""
    return _expansion_integrals_cached(float(geom.r2_tilde), float(geom.zc_tilde))


def quartic_coefficients(geom, volt):
    """Quartic expansion of the electron energy about the trap centre from the Bessel integrals.

    The paired kernels expand as ``-(1 + b_i d**2 + a_i d**4 + ...)``, so the
    electron energy ``-|e| V`` has quartic coefficient ``+|e| sum dV a_i`` and
    quadratic coefficient ``+|e| sum dV b_i``.  The latter is reported with
    the sign flipped to fit ``U = a d**4 - b d**2``.
    """
    ints = expansion_integrals(geom)
    e = CONSTANTS.elementary_charge
    d21 = volt.v2 - volt.v1
    d32 = volt.v3 - volt.v2
    a = e * (d21 * ints.a1 + d32 * ints.a2)
    b = -e * (d21 * ints.b1 + d32 * ints.b2)
    u0 = float(axial_energy(geom.center, geom, volt))
    return QuarticCoefficients(a=a, b=b, u0=u0)


def quartic_fit(geom, volt, h=1e-2, max_relative_error=0.1):
    """Quartic coefficients from Richardson-extrapolated central differences of :func:`axial_energy`.

    Independent of the expansion integrals; serves as their oracle and fixes
    the sign convention.  Raises :class:`NumericalError` when rounding noise
    in the fourth difference exceeds ``max_relative_error`` of its value.
    """
    c = geom.center
    if not 0 < 4 * h < c:
        raise ConfigurationError(f"step h={h!r} must satisfy 0 < 4h < zc_tilde/2")
    offsets = np.array([-4, -2, -1, 0, 1, 2, 4], dtype=float)
    samples = axial_energy(c + offsets * h, geom, volt)
    u0 = float(samples[3])
    # differences taken against the centre value: exact zero for a flat profile
    u = dict(zip(offsets.tolist(), samples - u0))

    def d2(s):
        return (u[s] - 2 * u[0.0] + u[-s]) / (s * h) ** 2

    def d4(s):
        return (u[2 * s] - 4 * u[s] + 6 * u[0.0] - 4 * u[-s] + u[-2 * s]) / (s * h) ** 4

    second = (4 * d2(1.0) - d2(2.0)) / 3
    fourth = (4 * d4(1.0) - d4(2.0)) / 3

    eps = np.finfo(float).eps
    umax = float(np.max(np.abs(samples)))
    err2 = (4 * 4 + 4 / 4) / 3 * eps * umax / h**2
    err4 = (4 * 16 + 16 / 16) / 3 * eps * umax / h**4
    if fourth != 0 and err4 > max_relative_error * abs(fourth):
        raise NumericalError(
            "fourth difference dominated by rounding; increase h",
            error_estimate=err4 / 24,
        )
    return QuarticCoefficients(
        a=float(fourth / 24),
        b=float(-second / 2),
        u0=u0,
        a_err=float(err4 / 24),
        b_err=float(err2 / 2),
    )


def odd_differences(geom, volt, h=1e-2):
    """First and third central differences of the energy at the centre (zero by mirror symmetry)."""
    c = geom.center
    um2, um1, up1, up2 = axial_energy(c + np.array([-2, -1, 1, 2]) * h, geom, volt)
    first = (up1 - um1) / (2 * h)
    third = (up2 - 2 * up1 + 2 * um1 - um2) / (2 * h**3)
    return float(first), float(third)


def transition_voltage(geom, v1, v2):
    """Outer-ring voltage at which the quadratic coefficient vanishes."""
    ints = expansion_integrals(geom)
    if abs(ints.b2) < 1e-14:
        raise DomainError("degenerate geometry: ring quadratic integral b2 vanishes")
    return (v2 * (ints.b2 - ints.b1) + v1 * ints.b1) / ints.b2


@dataclass(frozen=True)
class SweepRow:
    v3: float
    well_distance: float | None
    barrier_height: float | None
    regime: str  # "double" or "single"


def sweep_v3(geom, v1, v2, v3_grid, workers=1):
    """Well distance (m) and barrier height (J) along a grid of outer-ring voltages.

    Rows keep grid order; single-well rows carry ``None`` for both shape fields.
    """
    from .wells import shape_from_coefficients

    grid = [float(v) for v in v3_grid]
    if not grid:
        raise DomainError("v3_grid must be non-empty")
    ints = expansion_integrals(geom)
    e = CONSTANTS.elementary_charge

    def row(v3):
        a = e * ((v2 - v1) * ints.a1 + (v3 - v2) * ints.a2)
        b = -e * ((v2 - v1) * ints.b1 + (v3 - v2) * ints.b2)
        if b <= 0 or a <= 0:
            return SweepRow(v3, None, None, "single")
        shape = shape_from_coefficients(QuarticCoefficients(a=a, b=b, u0=0.0), geom.r1)
        return SweepRow(v3, shape.well_distance, shape.barrier_height, "double")

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(row, grid))
    return [row(v) for v in grid]
