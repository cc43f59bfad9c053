"""Finite-difference eigenproblem for the dimensionless axial Hamiltonian.

Units: lengths in the well distance ``L``, energies in ``hbar**2 / (2 m L**2)``,
so the kinetic operator is simply ``-d**2/dzeta**2``.  The grid is uniform on
``[-half_width, half_width]`` with hard walls at both ends; eigenvectors are
returned on the full grid (zero at the walls) and normalised so that
``sum(phi**2) * spacing == 1``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal

from .errors import ContractError, DomainError, NumericalError

SPLITTING_FLOOR = 1e-10


@dataclass(frozen=True)
class Grid1D:
    half_width: float = 2.0
    n_points: int = 4001

    def __post_init__(self):
        if self.n_points < 3 or self.n_points % 2 == 0:
            raise DomainError(f"n_points must be odd and >= 3, got {self.n_points}")
        if not self.half_width > 0.5:
            raise DomainError(f"half_width must exceed 0.5, got {self.half_width}")

    @property
    def spacing(self):
        return 2.0 * self.half_width / (self.n_points - 1)

    @property
    def points(self):
        return np.linspace(-self.half_width, self.half_width, self.n_points)

    @property
    def center_index(self):
        return self.n_points // 2


@dataclass(frozen=True)
class TridiagonalOperator:
    """Symmetric tridiagonal matrix acting on the interior grid points."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray

    @property
    def size(self):
        return self.diagonal.size

    def to_dense(self):
        return (
            np.diag(self.diagonal)
            + np.diag(self.offdiagonal, 1)
            + np.diag(self.offdiagonal, -1)
        )

    def matvec(self, v):
        out = self.diagonal * v
        out[:-1] += self.offdiagonal * v[1:]
        out[1:] += self.offdiagonal * v[:-1]
        return out


@dataclass(frozen=True)
class EigenSolution:
    grid: Grid1D
    potential: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # shape (k, n_points)
    notes: tuple = field(default=())

    @property
    def splitting(self):
        """``eps_1 - eps_0``, or ``None`` when below double-precision resolution."""
        if self.eigenvalues.size < 2:
            raise ContractError("splitting needs at least two eigenvalues")
        gap = float(self.eigenvalues[1] - self.eigenvalues[0])
        if gap < SPLITTING_FLOOR * abs(float(self.eigenvalues[0])):
            return None
        return gap


def dimensionless_quartic(zeta, Eb_tilde):
    """Canonical double well ``Eb (16 zeta**4 - 8 zeta**2)``: minima at +-1/2, barrier top 0 at 0."""
    if not Eb_tilde > 0:
        raise DomainError(f"Eb_tilde must be > 0, got {Eb_tilde!r}")
    z2 = np.square(zeta)
    return Eb_tilde * (16.0 * z2 * z2 - 8.0 * z2)


def build_hamiltonian(potential, grid):
    """Second-order central-difference Hamiltonian with Dirichlet walls."""
    u = np.asarray(potential, dtype=float)
    if u.shape != (grid.n_points,):
        raise ContractError("potential must be sampled on every grid point")
    inv_h2 = 1.0 / grid.spacing**2
    interior = u[1:-1]
    return TridiagonalOperator(
        diagonal=2.0 * inv_h2 + interior,
        offdiagonal=np.full(interior.size - 1, -inv_h2),
    )


def sturm_count(H, shifts):
    """Number of eigenvalues of ``H`` strictly below each shift (LDL^T inertia)."""
    x = np.atleast_1d(np.asarray(shifts, dtype=float))
    d = H.diagonal
    e2 = H.offdiagonal**2
    tiny = np.finfo(float).tiny ** 0.5
    q = d[0] - x
    count = (q < 0).astype(int)
    for i in range(1, d.size):
        q = np.where(q == 0, tiny, q)
        q = d[i] - x - e2[i - 1] / q
        count += q < 0
    return count


def _certify(H, values):
    k = values.size
    scale = max(1.0, float(np.max(np.abs(values))))
    delta = 1e-12 * scale * max(1.0, H.size)
    probes = [values[0] - delta]
    expected = [0]
    for i in range(k - 1):
        if values[i + 1] - values[i] > 2 * delta:
            probes.append(0.5 * (values[i] + values[i + 1]))
            expected.append(i + 1)
    probes.append(values[-1] + delta)
    counts = sturm_count(H, probes)
    if np.any(counts[:-1] != np.array(expected)) or counts[-1] < k:
        raise NumericalError(f"Sturm certification failed: counts {counts.tolist()} vs {expected}")


def lowest_eigenpairs(H, k):
    """The ``k`` smallest eigenvalues (ascending) and orthonormal interior eigenvectors.

    Bisection (LAPACK ``stebz``) plus inverse iteration (``stein``), with the
    eigenvalues certified by independent Sturm counts.  Returns
    ``(values, vectors)`` with ``vectors`` of shape ``(H.size, k)``.
    """
    if not 1 <= k <= H.size:
        raise DomainError(f"k must lie in [1, {H.size}], got {k}")
    try:
        values, vectors = eigh_tridiagonal(
            H.diagonal,
            H.offdiagonal,
            select="i",
            select_range=(0, k - 1),
            lapack_driver="stebz",
        )
    except LinAlgError as exc:
        raise NumericalError(f"inverse iteration failed: {exc}") from exc
    _certify(H, values)
    # stein may leave quasi-degenerate vectors slightly non-orthogonal
    q, r = np.linalg.qr(vectors)
    q *= np.sign(np.diag(r))
    return values, q


def _parity_disentangle(vectors):
    """Rotate each adjacent pair so that members have definite parity (rows are full-grid vectors)."""
    out = vectors.copy()
    k = out.shape[0]
    i = 0
    while i < k:
        v = out[i]
        parity = float(v @ v[::-1] / (v @ v))
        if abs(parity) > 1 - 1e-8 or i + 1 == k:
            out[i] = 0.5 * (v + np.sign(parity) * v[::-1])
            i += 1
            continue
        w = out[i : i + 2]
        m = w @ w[:, ::-1].T
        m = 0.5 * (m + m.T)
        _, u = np.linalg.eigh(m)  # columns: odd (-1) then even (+1)
        rotated = u[:, ::-1].T @ w  # even first: lower energy within a pair
        rotated[0] = 0.5 * (rotated[0] + rotated[0][::-1])
        rotated[1] = 0.5 * (rotated[1] - rotated[1][::-1])
        out[i : i + 2] = rotated
        i += 2
    return out


def _fix_signs(vectors, grid):
    right = grid.points > 0
    for v in vectors:
        even = np.allclose(v, v[::-1], atol=1e-12 * np.max(np.abs(v)))
        ref = v[grid.center_index] if even and v[grid.center_index] != 0 else np.sum(v[right])
        if ref < 0:
            v *= -1
    return vectors


def solve_potential(potential, grid, k, symmetric=False):
    """Lowest ``k`` eigenpairs of an arbitrary potential sampled on ``grid``."""
    H = build_hamiltonian(potential, grid)
    values, interior = lowest_eigenpairs(H, k)
    vectors = np.zeros((k, grid.n_points))
    vectors[:, 1:-1] = interior.T
    if symmetric:
        vectors = _parity_disentangle(vectors)
    vectors /= np.sqrt(np.sum(vectors**2, axis=1) * grid.spacing)[:, None]
    vectors = _fix_signs(vectors, grid)
    return EigenSolution(grid, np.asarray(potential, dtype=float), values, vectors)


def quartic_spectrum(Eb_tilde, k=2, grid=None):
    """Lowest ``k`` levels of the canonical double well, energies relative to the barrier top."""
    grid = grid or Grid1D()
    u = dimensionless_quartic(grid.points, Eb_tilde)
    sol = solve_potential(u, grid, k, symmetric=True)
    notes = ()
    if sol.eigenvalues[-1] > u[-1] - 10.0:
        msg = f"level {k - 1} lies within 10 units of the wall potential; enlarge half_width"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes = (msg,)
    if k >= 2 and sol.splitting is None:
        notes += ("splitting below numerical resolution",)
    return EigenSolution(sol.grid, sol.potential, sol.eigenvalues, sol.eigenvectors, notes)
