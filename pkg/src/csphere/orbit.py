"""Coadjoint-orbit models of the complex 2-sphere inside gl(2,C)*.

The matrix parametrization of the reduced spheres, the Lie-Poisson (KKS)
bracket and its structure constant, reduction of phase points to the sphere
and to the cotangent bundle of the projective line, the identification `phi`
between the two reduced pictures, the rotation-invariant generators, the
bundle projection to the real sphere, and the fitted kinetic calibration.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import duals, sampling
from .algebra import UNIT_I, UNIT_J, UNIT_K
from .phase import PhasePoint, biquat_to_phase, momentum_P, phase_to_biquat

MEMBERSHIP_TOL = 1e-10

# Unitary aligning the two bundle trivializations used by `phi`, so that the
# unit-quaternion action reads as the same SU(2) matrix on both sides.
ALIGN_W = np.array([[1.0, 1j], [1.0, -1j]]) / math.sqrt(2.0)


class MembershipError(ValueError):
    """Input fails a level-set or variety membership predicate."""


@dataclass(frozen=True)
class OrbitPoint:
    """(x, y, z) with x^2 + y^2 + z^2 = -zeta^2; zeta = i gives the unit sphere."""

    x: complex
    y: complex
    z: complex
    zeta: complex = 1j

    def coords(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def membership_residual(self) -> float:
        return abs(self.x ** 2 + self.y ** 2 + self.z ** 2 + self.zeta ** 2)

    def require_member(self, tol: float = MEMBERSHIP_TOL) -> None:
        r = self.membership_residual()
        if r > tol:
            raise MembershipError(f"orbit membership residual {r:.3e} > {tol:.1e}")

    def isclose(self, other: "OrbitPoint", tol: float = 1e-12) -> bool:
        return (np.max(np.abs(self.coords() - other.coords())) <= tol
                and abs(self.zeta - other.zeta) <= tol)


def orbit_point(coords, zeta: complex = 1j) -> OrbitPoint:
    c = np.asarray(coords, dtype=complex)
    return OrbitPoint(complex(c[0]), complex(c[1]), complex(c[2]), zeta)


@dataclass(frozen=True)
class CotangentPoint:
    """Representative (q, p) with |q| = 1 and p.q = 0, defined up to circle phase."""

    q: np.ndarray
    p: np.ndarray

    def membership_residual(self) -> float:
        return max(abs(np.linalg.norm(self.q) - 1.0), abs(complex(self.p @ self.q)))

    def require_member(self, tol: float = 1e-12) -> None:
        r = self.membership_residual()
        if r > tol:
            raise MembershipError(f"cotangent membership residual {r:.3e}")

    def aligned_to(self, other: "CotangentPoint") -> "CotangentPoint":
        """The circle representative closest to `other`."""
        a = complex(np.conj(other.q) @ self.q)
        b = complex(np.conj(other.p) @ self.p)
        w = a + np.conj(b)
        rot = w.conjugate() / abs(w) if abs(w) > 0 else 1.0
        return CotangentPoint(rot * self.q, np.conj(rot) * self.p)

    def phase_distance(self, other: "CotangentPoint") -> float:
        """Distance minimized over representatives (e^{it} q, e^{-it} p)."""
        al = self.aligned_to(other)
        dq = al.q - other.q
        dp = al.p - other.p
        return math.sqrt(float(np.vdot(dq, dq).real + np.vdot(dp, dp).real))


def coords_to_matrix(pt: OrbitPoint, tol: float = MEMBERSHIP_TOL) -> np.ndarray:
    """Matrix model 0.5 [[t+ix, y+iz], [-y+iz, t-ix]] with t = zeta."""
    pt.require_member(tol)
    t, x, y, z = pt.zeta, pt.x, pt.y, pt.z
    return 0.5 * np.array([[t + 1j * x, y + 1j * z], [-y + 1j * z, t - 1j * x]])


def matrix_to_coords(xi: np.ndarray, tol: float = MEMBERSHIP_TOL) -> OrbitPoint:
    """Inverse of coords_to_matrix; requires det(xi) = 0."""
    xi = np.asarray(xi, dtype=complex)
    det = xi[0, 0] * xi[1, 1] - xi[0, 1] * xi[1, 0]
    if abs(det) > tol:
        raise MembershipError(f"matrix is not on the cone: |det| = {abs(det):.3e}")
    t = xi[0, 0] + xi[1, 1]
    x = -1j * (xi[0, 0] - xi[1, 1])
    y = xi[0, 1] - xi[1, 0]
    z = -1j * (xi[0, 1] + xi[1, 0])
    return OrbitPoint(complex(x), complex(y), complex(z), complex(t))


# -- KKS bracket -------------------------------------------------------------

def _entries(xi):
    if isinstance(xi, np.ndarray):
        return [[xi[0, 0], xi[0, 1]], [xi[1, 0], xi[1, 1]]]
    return [[xi[0][0], xi[0][1]], [xi[1][0], xi[1][1]]]


def _matrix_gradient(f, base):
    """Trace-pairing gradient D of f: f(xi + e X) = f(xi) + e Tr(D X) + ...

    Entries of the matrix argument are passed as dual scalars, so f must be
    built from arithmetic only (trace, det and polynomials all qualify).
    Entries may themselves be duals; nesting then yields second derivatives.
    """
    grad = [[0.0, 0.0], [0.0, 0.0]]
    for i in range(2):
        for j in range(2):
            seeded = [[duals.Dual(base[r][c], 1.0 if (r, c) == (i, j) else 0.0)
                       for c in range(2)] for r in range(2)]
            out = f(seeded)
            grad[j][i] = out.eps if isinstance(out, duals.Dual) else 0.0
    return grad


def kks_bracket(f, g, xi):
    """Lie-Poisson bracket {f,g}(xi) = <xi, [df, dg]> on gl(2,C)*."""
    m = _entries(xi)
    df = _matrix_gradient(f, m)
    dg = _matrix_gradient(g, m)
    comm = [[sum(df[i][k] * dg[k][j] - dg[i][k] * df[k][j] for k in range(2))
             for j in range(2)] for i in range(2)]
    return sum(m[i][k] * comm[k][i] for i in range(2) for k in range(2))


def coord_x(m):
    return -1j * (m[0][0] - m[1][1])


def coord_y(m):
    return m[0][1] - m[1][0]


def coord_z(m):
    return -1j * (m[0][1] + m[1][0])


COORD_FUNCS = (coord_x, coord_y, coord_z)


@functools.lru_cache(maxsize=1)
def structure_constant() -> float:
    """c with {x,y} = c z (cyclically) on the reduced spheres."""
    ref = coords_to_matrix(orbit_point([0.6, 0.48, math.sqrt(1 - 0.6 ** 2 - 0.48 ** 2)]))
    c = kks_bracket(coord_x, coord_y, ref) / coord_z(ref)
    return float(c.real)


# -- reduction ---------------------------------------------------------------

def reduce_to_cotangent(pt: PhasePoint, tol: float = 1e-10) -> CotangentPoint:
    """Rescale a stable zero-level point to the |q| = 1 representative."""
    n = float(np.linalg.norm(pt.q))
    if n < tol:
        raise MembershipError("unstable point: q = 0")
    if abs(complex(pt.p @ pt.q)) > tol * max(1.0, float(np.linalg.norm(pt.p)) * n):
        raise MembershipError("point is not on the level p.q = 0")
    return CotangentPoint(pt.q / n, pt.p * n)


def reduce_to_sphere(pt: PhasePoint, zeta: complex, tol: float = 1e-10) -> OrbitPoint:
    """Send a p.q = zeta point to its orbit, a point of the reduced sphere."""
    if zeta == 0:
        raise MembershipError("reduction to the sphere needs zeta != 0")
    mu = complex(pt.p @ pt.q)
    if abs(mu - zeta) > tol:
        raise MembershipError(f"point is on level {mu:.6g}, expected {zeta:.6g}")
    return matrix_to_coords(momentum_P(pt), tol=10 * tol)


def lift_to_level(pt: OrbitPoint) -> PhasePoint:
    """Factor xi = q p^T with |q| = |p| (balanced representative).

    The column of largest norm spans the image, and one real rescaling fixes
    the balance; the residual freedom is exactly the circle phase.
    """
    xi = coords_to_matrix(pt)
    norms = np.linalg.norm(xi, axis=0)
    j = int(np.argmax(norms))
    if norms[j] < 1e-14:
        raise MembershipError("cannot lift the zero matrix")
    q0 = xi[:, j]
    p0 = (np.conj(q0) @ xi) / np.vdot(q0, q0)
    g = math.sqrt(float(np.linalg.norm(p0)) / float(np.linalg.norm(q0)))
    return PhasePoint(g * q0, p0 / g)


def phi(pt: OrbitPoint) -> CotangentPoint:
    """Identification of the unit complex sphere with T*CP^1.

    Lift to the balanced level representative in the K-basis, transport
    through the biquaternions to the I-basis, align with ALIGN_W, and reduce.
    """
    if abs(pt.zeta - 1j) > 1e-12:
        raise MembershipError("phi is defined on the zeta = i sphere")
    qp = lift_to_level(pt)
    b = phase_to_biquat(qp, "K")
    qi, pi = biquat_to_phase(b, "I")
    winv = np.conj(ALIGN_W.T)
    return reduce_to_cotangent(PhasePoint(winv @ qi, np.conj(winv) @ pi))


# -- invariants and calibration ----------------------------------------------

def eta_norm_sq(pt: CotangentPoint) -> float:
    """Rotation-invariant generator 4 |q|^2 |p|^2 on the |q| = 1 slice."""
    return 4.0 * float(np.vdot(pt.q, pt.q).real * np.vdot(pt.p, pt.p).real)


def orbit_invariant(pt: OrbitPoint) -> float:
    """Rotation-invariant generator Tr(xi^dagger xi)."""
    xi = coords_to_matrix(pt)
    return float(np.sum(np.abs(xi) ** 2))


def coord_norm_sq(pt: OrbitPoint) -> float:
    return float(abs(pt.x) ** 2 + abs(pt.y) ** 2 + abs(pt.z) ** 2)


def bundle_map(pt: OrbitPoint) -> np.ndarray:
    """Projection to the real unit sphere, Re(x) / sqrt(1 + |Im(x)|^2)."""
    pt.require_member()
    c = pt.coords()
    im2 = float(np.sum(c.imag ** 2))
    return c.real / math.sqrt(1.0 + im2)


@dataclass(frozen=True)
class KineticCalibration:
    """Affine fit |eta|^2 = slope * (|x|^2+|y|^2+|z|^2) + intercept."""

    slope: float
    intercept: float
    max_residual: float
    n_samples: int

    def eta_sq_from_coords(self, s: float) -> float:
        return self.slope * s + self.intercept

    def physical_energy_offset(self) -> float:
        """Additive offset turning the raw restricted Hamiltonian into energy."""
        return self.intercept / 4.0

    def angular_momentum_scale(self) -> float:
        return math.sqrt(self.slope)


@functools.lru_cache(maxsize=1)
def kinetic_calibration(n: int = 400, seed: int = 2024) -> KineticCalibration:
    """Fit the invariant relation across phi once; coefficients are reused."""
    r = sampling.rng(seed)
    s_vals = np.empty(n)
    eta_vals = np.empty(n)
    for k in range(n):
        pt = orbit_point(sampling.cs2_coords(r))
        s_vals[k] = coord_norm_sq(pt)
        eta_vals[k] = eta_norm_sq(phi(pt))
    design = np.column_stack([s_vals, np.ones(n)])
    coef, *_ = np.linalg.lstsq(design, eta_vals, rcond=None)
    resid = float(np.max(np.abs(design @ coef - eta_vals)))
    return KineticCalibration(float(coef[0]), float(coef[1]), resid, n)


def omega_kks(pt: OrbitPoint, d1: np.ndarray, d2: np.ndarray) -> complex:
    """Orbit symplectic form on tangents (x.d = 0), via the structure constant."""
    x = pt.coords()
    return complex(np.dot(x, np.cross(d1, d2)) / (structure_constant() * np.dot(x, x)))


def omega_cotangent(t1: tuple[np.ndarray, np.ndarray],
                    t2: tuple[np.ndarray, np.ndarray]) -> complex:
    """Canonical form on T*CP^1 evaluated on level-set tangent representatives."""
    dq1, dp1 = t1
    dq2, dp2 = t2
    return complex(dp2 @ dq1 - dp1 @ dq2)


def orbit_tangent_basis(pt: OrbitPoint) -> tuple[np.ndarray, np.ndarray]:
    """Two complex tangent vectors at pt (null space of x^T)."""
    x = pt.coords()
    _, _, vh = np.linalg.svd(x.reshape(1, 3))
    return np.conj(vh[1]), np.conj(vh[2])
