"""Energy-momentum analysis on the two real forms of the pendulum pair.

Each form is a 4-dimensional variety cut out of a 6-real-coordinate ambient
space by two constraints.  The compact form carries the restricted (H, J)
with the compensated second integral (z1+z2)/2; the cotangent form carries
the physically calibrated pair (sqrt(a) Im z1, (a S + b)/4 + height) built
from the fitted kinetic coefficients (a, b).

Rank-zero search is a multi-start least-squares on tangential gradients.
On the compact form the two circle-fixed configurations sit on the singular
stratum of H, where only a continuous extension exists; they are treated
with stratified rank and Richardson-extrapolated limit values.  Boundary
curves are rank-one critical values traced by pseudo-arclength continuation,
together with (on the compact form) the stratum's directional-limit extremes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import least_squares

from . import duals, sampling
from .dynamics import ProductPoint, SingularityError, product_point
from .orbit import OrbitPoint, kinetic_calibration

FORM_NAMES = ("tstar-s2", "s2xs2")
RANK_THRESHOLD = 1e-8
STRATUM_TOL = 1e-6


class OffFormError(ValueError):
    pass


def _sqrt(x):
    return duals.sqrt(x)


class RealForm:
    """Common machinery: constraints, tangent frames, EM map, rank."""

    name: str

    def em(self, u):
        j, h = self._em_pair(list(u))
        return float(duals.value(j)), float(duals.value(h))

    def em_grads_ad(self, u: np.ndarray) -> np.ndarray:
        """Ambient 2x6 real gradient of (J, H) by duals; cross-check oracle."""
        out = np.empty((2, 6))
        for k in range(6):
            seeded = [duals.Dual(float(v), 1.0 if i == k else 0.0)
                      for i, v in enumerate(u)]
            j, h = self._em_pair(seeded)
            out[0, k] = j.eps if isinstance(j, duals.Dual) else 0.0
            out[1, k] = h.eps if isinstance(h, duals.Dual) else 0.0
        return out

    def em_grads(self, u: np.ndarray) -> np.ndarray:
        return self.em_grads_ad(u)

    def constraint_jacobian(self, u: np.ndarray) -> np.ndarray:
        out = np.empty((2, 6))
        for k in range(6):
            seeded = [duals.Dual(float(v), 1.0 if i == k else 0.0)
                      for i, v in enumerate(u)]
            c = self._constraints(seeded)
            out[0, k] = c[0].eps if isinstance(c[0], duals.Dual) else 0.0
            out[1, k] = c[1].eps if isinstance(c[1], duals.Dual) else 0.0
        return out

    def constraints(self, u) -> np.ndarray:
        c = self._constraints(list(u))
        return np.array([duals.value(c[0]), duals.value(c[1])], dtype=float)

    def tangent_projector(self, u: np.ndarray) -> np.ndarray:
        c = self.constraint_jacobian(u)
        return np.eye(6) - c.T @ np.linalg.solve(c @ c.T, c)

    def tangent_frame(self, u: np.ndarray) -> np.ndarray:
        return null_space(self.constraint_jacobian(u))   # 6 x 4

    def require_on_form(self, u: np.ndarray, tol: float = 1e-8) -> None:
        r = float(np.max(np.abs(self.constraints(u))))
        if r > tol:
            raise OffFormError(f"constraint residual {r:.3e} on {self.name}")

    def tangential_jacobian(self, u: np.ndarray) -> np.ndarray:
        return self.em_grads(u) @ self.tangent_frame(u)    # 2 x 4

    def rank_at(self, u: np.ndarray, threshold: float = RANK_THRESHOLD) -> int:
        self.require_on_form(u)
        s = np.linalg.svd(self.tangential_jacobian(u), compute_uv=False)
        return int(np.sum(s > threshold * max(s[0] if len(s) else 0.0, 1.0)))

    def project(self, u: np.ndarray) -> np.ndarray:
        """One least-squares Newton repair onto the constraint set."""
        v = u.copy()
        for _ in range(3):
            c = self.constraints(v)
            if np.max(np.abs(c)) < 1e-13:
                break
            jac = self.constraint_jacobian(v)
            v = v - jac.T @ np.linalg.solve(jac @ jac.T, c)
        return v


class CompactForm(RealForm):
    """S^2 x S^2: both factors real unit vectors; raw restricted pair."""

    name = "s2xs2"

    def gauge(self, u) -> float:
        # slice transversal to the vertical-rotation orbits
        return 0.3 * float(u[1]) + 0.7 * float(u[4])

    def _constraints(self, u):
        return (u[0] * u[0] + u[1] * u[1] + u[2] * u[2] - 1.0,
                u[3] * u[3] + u[4] * u[4] + u[5] * u[5] - 1.0)

    def _em_pair(self, u):
        j = 0.5 * (u[2] + u[5])
        rad = (u[0] + u[3]) ** 2 + (u[1] + u[4]) ** 2 + (u[2] - u[5]) ** 2
        if abs(duals.value(rad)) < STRATUM_TOL ** 2:
            raise SingularityError("compact-form point on the singular stratum",
                                   location=tuple(duals.value(x) for x in u))
        h = 0.5 * (u[0] * u[3] + u[1] * u[4] - u[2] * u[5]) + (u[2] - u[5]) / _sqrt(rad)
        return j, h

    def em_grads(self, u: np.ndarray) -> np.ndarray:
        sx, sy, dz = u[0] + u[3], u[1] + u[4], u[2] - u[5]
        rad = sx * sx + sy * sy + dz * dz
        if rad < STRATUM_TOL ** 2:
            raise SingularityError("gradient requested on the singular stratum",
                                   location=tuple(u))
        r = math.sqrt(rad)
        w = dz / (r * rad)
        gj = np.array([0.0, 0.0, 0.5, 0.0, 0.0, 0.5])
        gh = np.array([
            0.5 * u[3] - w * sx,
            0.5 * u[4] - w * sy,
            -0.5 * u[5] + 1.0 / r - w * dz,
            0.5 * u[0] - w * sx,
            0.5 * u[1] - w * sy,
            -0.5 * u[2] - 1.0 / r + w * dz,
        ])
        return np.vstack([gj, gh])

    def constraint_jacobian(self, u: np.ndarray) -> np.ndarray:
        return np.array([
            [2 * u[0], 2 * u[1], 2 * u[2], 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 2 * u[3], 2 * u[4], 2 * u[5]],
        ])

    def to_product(self, u: np.ndarray) -> ProductPoint:
        return product_point([complex(v) for v in u])

    def from_product(self, pt: ProductPoint) -> np.ndarray:
        c = np.array(pt.coords())
        if np.max(np.abs(c.imag)) > 1e-8:
            raise OffFormError("point has imaginary parts")
        return c.real.copy()

    def sample(self, n: int, seed: int) -> np.ndarray:
        eng = sampling.sobol(4, seed)
        raw = eng.random(n)
        out = np.empty((n, 6))
        k = 0
        while k < n:
            row = raw[k]
            a = _sphere_from_unit(row[0], row[1])
            b = _sphere_from_unit(row[2], row[3])
            u = np.concatenate([a, b])
            if _radicand_real(u) > 1e-3:
                out[k] = u
                k += 1
            else:
                raw[k] = eng.random(1)[0]
        return out

    # -- singular stratum helpers --

    def stratum_distance(self, u: np.ndarray) -> float:
        return math.sqrt(max(_radicand_real(u), 0.0))

    def stratum_point(self, theta: float, phi: float = 0.0) -> np.ndarray:
        a = np.array([math.sin(theta) * math.cos(phi),
                      math.sin(theta) * math.sin(phi),
                      math.cos(theta)])
        return np.concatenate([a, [-a[0], -a[1], a[2]]])

    def _transverse_frame(self, u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal form-tangent directions transverse to the stratum."""
        frame = self.tangent_frame(u)
        # stratum tangents: (da, Rz(pi) da) for da tangent to the first sphere
        a = u[0:3]
        b1 = np.cross(a, [0.0, 0.0, 1.0])
        if np.linalg.norm(b1) < 1e-9:
            b1 = np.cross(a, [1.0, 0.0, 0.0])
        b1 /= np.linalg.norm(b1)
        b2 = np.cross(a, b1)
        strat = np.stack([np.concatenate([b1, [-b1[0], -b1[1], b1[2]]]),
                          np.concatenate([b2, [-b2[0], -b2[1], b2[2]]])]).T
        coeff = frame.T @ strat                     # 4 x 2
        trans = null_space(coeff.T)                 # 4 x 2
        e = frame @ trans
        e, _ = np.linalg.qr(e)
        return e[:, 0], e[:, 1]

    def limit_H(self, u: np.ndarray, direction: np.ndarray,
                eps: float = 1e-4) -> float:
        """Richardson limit of H approaching the stratum point u along direction."""
        vals = []
        for e in (eps, eps / 2, eps / 4):
            v = self.project(u + e * direction)
            vals.append(self.em(v)[1])
        v1 = 2 * vals[1] - vals[0]
        v2 = 2 * vals[2] - vals[1]
        return (4 * v2 - v1) / 3.0

    def limit_H_extremes(self, u: np.ndarray, n_dirs: int = 48) -> tuple[float, float]:
        """Extreme directional limits of H at a stratum point."""
        e1, e2 = self._transverse_frame(u)

        def lim(psi: float) -> float:
            d = math.cos(psi) * e1 + math.sin(psi) * e2
            return self.limit_H(u, d)

        grid = [lim(2 * math.pi * k / n_dirs) for k in range(n_dirs)]
        lo = _refine_extreme(lim, grid, n_dirs, minimum=True)
        hi = _refine_extreme(lim, grid, n_dirs, minimum=False)
        return lo, hi

    def stratum_rank(self, u: np.ndarray, threshold: float = RANK_THRESHOLD) -> int:
        """Rank of (J, extended H) along the stratum; H_ext is constant there."""
        a = u[0:3]
        grad_z = np.array([0.0, 0.0, 1.0]) - a[2] * a
        return 0 if np.linalg.norm(grad_z) <= threshold else 1


class CotangentForm(RealForm):
    """The conjugate-diagonal form, parametrized by the first-factor coordinates.

    u = (Re x, Im x, Re y, Im y, Re z, Im z); the calibrated pair is the
    pendulum's (angular momentum, energy).
    """

    name = "tstar-s2"

    def __init__(self):
        cal = kinetic_calibration()
        self.slope = cal.slope
        self.intercept = cal.intercept
        self.j_scale = math.sqrt(cal.slope)

    def gauge(self, u) -> float:
        return float(u[2])      # Re(y) = 0 fixes the rotation phase

    def _constraints(self, u):
        # real and imaginary parts of x^2 + y^2 + z^2 - 1
        re = (u[0] * u[0] - u[1] * u[1] + u[2] * u[2] - u[3] * u[3]
              + u[4] * u[4] - u[5] * u[5] - 1.0)
        im = 2.0 * (u[0] * u[1] + u[2] * u[3] + u[4] * u[5])
        return re, im

    def _em_pair(self, u):
        s = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]
             + u[3] * u[3] + u[4] * u[4] + u[5] * u[5])
        height = u[4] / _sqrt(1.0 + u[1] * u[1] + u[3] * u[3] + u[5] * u[5])
        j = self.j_scale * u[5]
        h = (self.slope * s + self.intercept) / 4.0 + height
        return j, h

    def em_grads(self, u: np.ndarray) -> np.ndarray:
        w2 = 1.0 + u[1] * u[1] + u[3] * u[3] + u[5] * u[5]
        w = math.sqrt(w2)
        gj = np.zeros(6)
        gj[5] = self.j_scale
        gh = (self.slope / 2.0) * np.asarray(u, dtype=float)
        gh[4] += 1.0 / w
        fac = -u[4] / (w * w2)
        gh[1] += fac * u[1]
        gh[3] += fac * u[3]
        gh[5] += fac * u[5]
        return np.vstack([gj, gh])

    def constraint_jacobian(self, u: np.ndarray) -> np.ndarray:
        return np.array([
            [2 * u[0], -2 * u[1], 2 * u[2], -2 * u[3], 2 * u[4], -2 * u[5]],
            [2 * u[1], 2 * u[0], 2 * u[3], 2 * u[2], 2 * u[5], 2 * u[4]],
        ])

    def to_product(self, u: np.ndarray) -> ProductPoint:
        x = complex(u[0], u[1])
        y = complex(u[2], u[3])
        z = complex(u[4], u[5])
        a = OrbitPoint(x, y, z)
        b = OrbitPoint(np.conj(x), np.conj(y), -np.conj(z))
        return ProductPoint(a, b)

    def from_product(self, pt: ProductPoint) -> np.ndarray:
        c = np.array(pt.a.coords())
        return np.array([c[0].real, c[0].imag, c[1].real, c[1].imag,
                         c[2].real, c[2].imag])

    def sample(self, n: int, seed: int, radius: float = 1.0) -> np.ndarray:
        eng = sampling.sobol(4, seed)
        raw = eng.random(n)
        out = np.empty((n, 6))
        for k in range(n):
            z, phi, rho_u, psi = raw[k]
            nvec = _sphere_from_unit(z, phi)
            rho = radius * math.sqrt(max(rho_u, 1e-12))
            b1 = np.cross(nvec, [0.0, 0.0, 1.0])
            if np.linalg.norm(b1) < 1e-9:
                b1 = np.cross(nvec, [1.0, 0.0, 0.0])
            b1 /= np.linalg.norm(b1)
            b2 = np.cross(nvec, b1)
            mhat = math.cos(2 * math.pi * psi) * b1 + math.sin(2 * math.pi * psi) * b2
            x = np.cosh(rho) * nvec + 1j * np.sinh(rho) * mhat
            out[k] = [x[0].real, x[0].imag, x[1].real, x[1].imag, x[2].real, x[2].imag]
        return out


def _sphere_from_unit(z01: float, phi01: float) -> np.ndarray:
    z = 2.0 * z01 - 1.0
    z = min(1.0, max(-1.0, z))
    r = math.sqrt(max(1.0 - z * z, 0.0))
    ph = 2 * math.pi * phi01
    return np.array([r * math.cos(ph), r * math.sin(ph), z])


def _radicand_real(u: np.ndarray) -> float:
    return float((u[0] + u[3]) ** 2 + (u[1] + u[4]) ** 2 + (u[2] - u[5]) ** 2)


def _refine_extreme(fn, grid, n, minimum: bool) -> float:
    vals = np.array(grid)
    k = int(np.argmin(vals) if minimum else np.argmax(vals))
    lo = 2 * math.pi * (k - 1) / n
    hi = 2 * math.pi * (k + 1) / n
    # golden-section refinement
    invphi = (math.sqrt(5) - 1) / 2
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(40):
        if (fc < fd) == minimum:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return fn(x)


def get_form(name: str) -> RealForm:
    if name == "tstar-s2":
        return CotangentForm()
    if name == "s2xs2":
        return CompactForm()
    raise ValueError(f"unknown form {name!r}")


# -- rank-0 search ------------------------------------------------------------------

@dataclass(frozen=True)
class EMomSample:
    j: float
    h: float
    rank: int
    location: np.ndarray
    stratum: bool = False


def _rank0_residuals(form: RealForm, u: np.ndarray) -> np.ndarray:
    proj = form.tangent_projector(u)
    grads = form.em_grads(u)
    return np.concatenate([proj @ grads[0], proj @ grads[1], form.constraints(u)])


def find_rank0(form: RealForm, budget: int = 512, seed: int = 0,
               dedup: float = 1e-4) -> list[EMomSample]:
    """Multi-start tangential-gradient minimization, deduplicated."""
    starts = form.sample(budget, seed + 101)
    found: list[EMomSample] = []

    def push(u: np.ndarray, stratum: bool, jh=None) -> None:
        if jh is None:
            jh = form.em(u)
        for s in found:
            if np.linalg.norm(s.location - u) < dedup:
                return
            if abs(s.j - jh[0]) < dedup and abs(s.h - jh[1]) < dedup:
                return
        rank = (form.stratum_rank(u) if stratum else form.rank_at(u))
        if rank == 0:
            found.append(EMomSample(jh[0], jh[1], 0, u.copy(), stratum))

    for u0 in starts:
        try:
            res = least_squares(lambda v: _rank0_residuals(form, v), u0,
                                xtol=1e-14, ftol=1e-14, gtol=1e-14, method="lm",
                                max_nfev=400)
        except (SingularityError, np.linalg.LinAlgError):
            continue
        if res.cost < 1e-22:
            try:
                push(res.x, stratum=False)
            except (SingularityError, OffFormError):
                continue

    if isinstance(form, CompactForm):
        found.extend(_compact_stratum_rank0(form, budget, seed, found, dedup))
    found.sort(key=lambda s: (round(s.j, 9), round(s.h, 9)))
    return found


def _compact_stratum_rank0(form: CompactForm, budget: int, seed: int,
                           existing: list[EMomSample], dedup: float) -> list[EMomSample]:
    """Isolated second-integral extrema: both factors at the same pole."""

    def j_residuals(u: np.ndarray) -> np.ndarray:
        proj = form.tangent_projector(u)
        grad_j = np.array([0.0, 0.0, 0.5, 0.0, 0.0, 0.5])
        return np.concatenate([proj @ grad_j, form.constraints(u)])

    out: list[EMomSample] = []
    starts = form.sample(max(budget // 8, 16), seed + 777)
    for u0 in starts:
        res = least_squares(j_residuals, u0, xtol=1e-14, ftol=1e-14, gtol=1e-14,
                            method="lm", max_nfev=200)
        if res.cost > 1e-22:
            continue
        u = res.x
        if form.stratum_distance(u) > STRATUM_TOL:
            continue        # smooth critical points are found by the main search
        if form.stratum_rank(u) != 0:
            continue
        lo, hi = form.limit_H_extremes(u, n_dirs=16)
        if hi - lo > 1e-6:
            continue        # limit exists only where the extremes agree
        j_val = 0.5 * (u[2] + u[5])
        h_val = 0.5 * (lo + hi)
        known = out + existing
        if any(abs(s.j - j_val) < dedup and abs(s.h - h_val) < dedup for s in known):
            continue
        out.append(EMomSample(j_val, h_val, 0, u.copy(), stratum=True))
    return out


# -- boundary tracing ----------------------------------------------------------------

class ContinuationStall(RuntimeError):
    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


def _re_residuals(form: RealForm, v: np.ndarray) -> np.ndarray:
    u, lam = v[:6], v[6]
    proj = form.tangent_projector(u)
    grads = form.em_grads(u)
    return np.concatenate([proj @ (grads[1] - lam * grads[0]),
                           form.constraints(u), [form.gauge(u)]])


def _solve_on_level(form: RealForm, u0: np.ndarray, lam0: float, j_target: float):
    def res(v):
        base = _re_residuals(form, v)
        return np.concatenate([base, [form.em(v[:6])[0] - j_target]])
    v0 = np.concatenate([u0, [lam0]])
    sol = least_squares(res, v0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=800)
    return sol.x, sol.cost


def _fd_jacobian(fn, v: np.ndarray, h: float = 1e-6) -> np.ndarray:
    out = None
    for k in range(len(v)):
        vp = v.copy()
        vm = v.copy()
        vp[k] += h
        vm[k] -= h
        col = (fn(vp) - fn(vm)) / (2 * h)
        if out is None:
            out = np.empty((len(col), len(v)))
        out[:, k] = col
    return out


def _curve_tangent(fn, v: np.ndarray) -> np.ndarray:
    """Unit kernel direction of the (overdetermined) residual Jacobian."""
    jac = _fd_jacobian(fn, v)
    _, _, vh = np.linalg.svd(jac)
    return vh[-1]


def trace_re_curve(form: RealForm, v0: np.ndarray, ds: float = 2e-3,
                   max_steps: int = 4000, stop=None) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-arclength continuation of rank-1 critical points.

    Returns (values, stop_reason) with values the polyline of (J, H).
    """
    fn = lambda v: _re_residuals(form, v)
    v = v0.copy()
    t = _curve_tangent(fn, v)
    # orient toward increasing |J|
    j_dir = form.em_grads(v[:6])[0] @ t[:6]
    if j_dir < 0:
        t = -t
    pts = [form.em(v[:6])]
    reason = "max-steps"
    step = ds
    for _ in range(max_steps):
        pred = v + step * t

        def aug(w):
            return np.concatenate([fn(w), [t @ (w - pred)]])

        sol = least_squares(aug, pred, xtol=1e-14, ftol=1e-14, gtol=1e-14,
                            max_nfev=200)
        ok = sol.cost < 1e-20 and np.max(np.abs(fn(sol.x))) < 1e-9
        if not ok:
            if step > ds / 64:
                step *= 0.5
                continue
            reason = "stall"
            break
        v_new = sol.x
        _, _, vh = np.linalg.svd(sol.jac[:-1])   # reuse the corrector Jacobian
        t_new = vh[-1]
        if t_new @ t < 0:
            t_new = -t_new
        v, t = v_new, t_new
        step = min(step * 1.6, ds)
        try:
            pts.append(form.em(v[:6]))
        except SingularityError:
            reason = "stratum"
            break
        if stop is not None and stop(v, pts[-1]):
            reason = "stop-condition"
            break
        if isinstance(form, CompactForm) and form.stratum_distance(v[:6]) < 3e-3:
            reason = "stratum"
            break
    return np.array(pts), reason


@dataclass
class BifurcationData:
    form: str
    rank0: list[EMomSample]
    curves: list[np.ndarray] = field(default_factory=list)
    image: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    meta: dict = field(default_factory=dict)
    stalled: bool = False


def _mirror(curve: np.ndarray) -> np.ndarray:
    out = curve.copy()
    out[:, 0] = -out[:, 0]
    return out


def trace_boundary(form: RealForm, seed: int = 0, j_max: float = 2.7) -> BifurcationData:
    rank0 = find_rank0(form, seed=seed)
    data = BifurcationData(form.name, rank0)
    if isinstance(form, CotangentForm):
        bottom = min(rank0, key=lambda s: s.h)
        j0 = 5e-3
        u0 = bottom.location.copy()
        u0[5] = j0 / form.j_scale * 1.05
        u0[1] += 0.05
        u0 = form.project(u0)
        v0, cost = _solve_on_level(form, u0, 0.0, j0)
        if cost > 1e-18:
            data.stalled = True
            return data
        curve, reason = trace_re_curve(
            form, v0, stop=lambda v, jh: jh[0] > j_max)
        curve = np.vstack([[bottom.j, bottom.h], curve])
        data.curves = [curve, _mirror(curve)]
        data.stalled = reason == "stall"
        return data

    # compact form: upper family from the top vertex, then the stratum circle
    top = max(rank0, key=lambda s: s.h)
    j0 = 5e-3
    u0 = top.location.copy()
    u0[2] -= 1e-3
    u0[0] += 0.05
    u0 = form.project(u0)
    v0, cost = _solve_on_level(form, u0, 0.0, j0)
    if cost > 1e-18:
        data.stalled = True
        return data
    upper, reason = trace_re_curve(form, v0)
    upper = np.vstack([[top.j, top.h], upper])
    arc = _stratum_arc(form)
    # the upper family legitimately terminates where it meets the stratum arc
    ended_at_arc = distance_to_polyline(upper[-1], arc) < 5e-3
    stall = reason not in ("stratum", "stop-condition") and not ended_at_arc

    right = _assemble_compact_right(upper, arc)
    closed = np.vstack([right, _mirror(right)[::-1]])
    closed = np.vstack([closed, closed[:1]])
    data.curves = [closed]
    data.meta["upper_family"] = upper
    data.meta["stratum_arc"] = arc
    data.meta["re_stop_reason"] = reason
    data.stalled = stall
    return data


def _stratum_arc(form: CompactForm, n_theta: int = 121) -> np.ndarray:
    """Directional-limit extreme values of H along the singular stratum.

    Returns the arc from (J, H_hi) down the J >= 0 side: theta from 0 to pi
    gives J = cos(theta); the upper and lower limit extremes trace the two
    halves of a closed curve.
    """
    thetas = np.linspace(0.0, math.pi, n_theta)
    los, his = [], []
    for th in thetas:
        u = form.stratum_point(th)
        if th < 1e-9 or th > math.pi - 1e-9:
            val = form.limit_H(u, _pole_direction(form, u))
            los.append(val)
            his.append(val)
            continue
        lo, hi = form.limit_H_extremes(u)
        los.append(lo)
        his.append(hi)
    j = np.cos(thetas)
    upper = np.column_stack([j, his])
    lower = np.column_stack([j, los])
    return np.vstack([upper, lower[::-1]])    # closed-ish loop over the stratum


def _pole_direction(form: CompactForm, u: np.ndarray) -> np.ndarray:
    e1, _ = form._transverse_frame(u)
    return e1


def _assemble_compact_right(upper: np.ndarray, arc: np.ndarray) -> np.ndarray:
    """Right half of the closed boundary: upper RE curve then the stratum arc.

    The arc is ordered by the angle about the arc's own centroid height,
    measured from the bottom point, and walked from the junction (nearest
    arc point to the end of the RE curve) down to the bottom.
    """
    end = upper[-1]
    center_h = float(np.mean(arc[:, 1]))
    ang = np.arctan2(arc[:, 0], -(arc[:, 1] - center_h))
    ang_j = math.atan2(end[0], -(end[1] - center_h))
    keep = (ang <= ang_j + 1e-9) & (ang >= -1e-9)
    seg = arc[keep]
    order = np.argsort(-ang[keep])
    seg = seg[order]
    # drop duplicate angles (the two limbs share their endpoints)
    dedup = [seg[0]]
    for p in seg[1:]:
        if np.linalg.norm(p - dedup[-1]) > 1e-9:
            dedup.append(p)
    return np.vstack([upper, np.array(dedup)])


def sample_image(form: RealForm, n: int, seed: int, radius: float = 1.0) -> np.ndarray:
    if isinstance(form, CotangentForm):
        us = form.sample(n, seed + 5, radius=radius)
    else:
        us = form.sample(n, seed + 5)
    out = []
    for u in us:
        try:
            out.append(form.em(u))
        except SingularityError:
            continue
    return np.array(out)


# -- containment ------------------------------------------------------------------

def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom < 1e-30:
        return float(np.linalg.norm(p - a))
    t = float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def distance_to_polyline(p: np.ndarray, poly: np.ndarray) -> float:
    return min(point_segment_distance(p, poly[i], poly[i + 1])
               for i in range(len(poly) - 1))


def polygon_contains(poly: np.ndarray, p: np.ndarray) -> bool:
    """Even-odd rule point-in-polygon."""
    inside = False
    x, y = p
    n = len(poly)
    for i in range(n - 1):
        x1, y1 = poly[i]
        x2, y2 = poly[i + 1]
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric polyline Hausdorff distance (vertices against segments)."""
    d1 = max(distance_to_polyline(p, b) for p in a)
    d2 = max(distance_to_polyline(p, a) for p in b)
    return max(d1, d2)
