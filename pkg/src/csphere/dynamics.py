"""Holomorphic Hamiltonian flows on the product of two unit complex spheres.

The commuting pair: the pendulum Hamiltonian H (quadratic coupling plus a
square-root potential) and the vertical generator J = (z1+z2)/(2i).  Flows
integrate the holomorphic vector field of a chosen multiple of H or of the
compensated rotation generator iJ = (z1+z2)/2 with an embedded 5(4)
Dormand-Prince pair, projecting each accepted step back onto the two
quadrics.  The raw J is exposed for bracket checks; its own holomorphic
flow is hyperbolic, while the compensated generator is the 2*pi-periodic
rotation from any start and is the one the command line calls "J".
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import duals, sampling
from .orbit import OrbitPoint, orbit_point, structure_constant
from .realstruct import CATALOGUE, CheckReport, apply as rs_apply, fixed_residual, sample_fixed

SINGULAR_TOL = 1e-8


class SingularityError(ArithmeticError):
    """The square-root radicand of H vanished (within tolerance) at a point."""

    def __init__(self, message, location=None, time=None):
        super().__init__(message)
        self.location = location
        self.time = time


class ProductPoint(NamedTuple):
    a: OrbitPoint
    b: OrbitPoint

    def coords(self) -> tuple[complex, ...]:
        return (self.a.x, self.a.y, self.a.z, self.b.x, self.b.y, self.b.z)

    def require_member(self, tol: float = 1e-10) -> None:
        self.a.require_member(tol)
        self.b.require_member(tol)


def product_point(c6, zeta: complex = 1j) -> ProductPoint:
    c = [complex(v) for v in c6]
    return ProductPoint(OrbitPoint(c[0], c[1], c[2], zeta),
                        OrbitPoint(c[3], c[4], c[5], zeta))


def _coords6(pt) -> tuple:
    if isinstance(pt, ProductPoint):
        return pt.coords()
    if len(pt) == 2 and isinstance(pt[0], OrbitPoint):
        return (pt[0].x, pt[0].y, pt[0].z, pt[1].x, pt[1].y, pt[1].z)
    return tuple(pt)


def radicand(c6) -> complex:
    x1, y1, z1, x2, y2, z2 = c6
    return (x1 + x2) ** 2 + (y1 + y2) ** 2 + (z1 - z2) ** 2


def hamiltonian_H(pt, singular_tol: float = SINGULAR_TOL) -> complex:
    """Coupling term plus (z1 - z2) over the principal root of the radicand."""
    c = _coords6(pt)
    rad = radicand(c)
    if abs(duals.value(rad)) < singular_tol:
        raise SingularityError(f"radicand {duals.value(rad):.3e} within "
                               f"{singular_tol:.1e} of the singular set",
                               location=tuple(map(duals.value, c)))
    x1, y1, z1, x2, y2, z2 = c
    return 0.5 * (x1 * x2 + y1 * y2 - z1 * z2) + (z1 - z2) / duals.sqrt(rad)


def hamiltonian_J(pt) -> complex:
    c = _coords6(pt)
    return (c[2] + c[5]) / 2j


def compensated_J(pt) -> complex:
    """i J = (z1 + z2)/2, the rotation generator; real on the compact form."""
    c = _coords6(pt)
    return 0.5 * (c[2] + c[5])


def grad_H(c6) -> tuple[complex, ...]:
    """Closed-form complex gradient of hamiltonian_H."""
    x1, y1, z1, x2, y2, z2 = c6
    rad = (x1 + x2) ** 2 + (y1 + y2) ** 2 + (z1 - z2) ** 2
    rr = cmath.sqrt(rad)
    w = (z1 - z2) / (rr * rad)
    return (
        0.5 * x2 - w * (x1 + x2),
        0.5 * y2 - w * (y1 + y2),
        -0.5 * z2 + 1.0 / rr - w * (z1 - z2),
        0.5 * x1 - w * (x1 + x2),
        0.5 * y1 - w * (y1 + y2),
        -0.5 * z1 - 1.0 / rr + w * (z1 - z2),
    )


def grad_ad(f, c6) -> tuple[complex, ...]:
    """Gradient by forward-mode duals; the independent cross-check."""
    return tuple(duals.gradient(f, list(c6)))


def product_bracket(f, g, pt) -> complex:
    """Sum of the two factor Lie-Poisson brackets, c * x.(grad f x grad g)."""
    c6 = list(_coords6(pt))
    df = duals.gradient(f, c6)
    dg = duals.gradient(g, c6)
    c = structure_constant()
    total = 0.0j
    for a in (0, 3):
        x = np.array(c6[a:a + 3])
        total += c * complex(np.dot(x, np.cross(df[a:a + 3], dg[a:a + 3])))
    return total


def hamiltonian_vector_field(f, pt) -> np.ndarray:
    """Tangent 6-vector of the holomorphic field of f, per factor c (grad f x x)."""
    c6 = list(_coords6(pt))
    df = duals.gradient(f, c6)
    return _field_from_grad(np.array(c6), np.array(df))


def _field_from_grad(c6: np.ndarray, grad: np.ndarray) -> np.ndarray:
    c = structure_constant()
    out = np.empty(6, dtype=complex)
    out[0:3] = c * np.cross(grad[0:3], c6[0:3])
    out[3:6] = c * np.cross(grad[3:6], c6[3:6])
    return out


# -- named vector fields (scalar arithmetic; this is the integrator hot path) ---

def _rhs_H(c6, phase: complex, singular_tol: float):
    x1, y1, z1, x2, y2, z2 = c6
    sx, sy, dz = x1 + x2, y1 + y2, z1 - z2
    rad = sx * sx + sy * sy + dz * dz
    if abs(rad) < singular_tol:
        raise SingularityError(f"radicand {abs(rad):.3e} below {singular_tol:.1e}",
                               location=tuple(c6))
    rr = cmath.sqrt(rad)
    rinv = 1.0 / rr
    w = dz * rinv / rad
    gx1 = phase * (0.5 * x2 - w * sx)
    gy1 = phase * (0.5 * y2 - w * sy)
    gz1 = phase * (-0.5 * z2 + rinv - w * dz)
    gx2 = phase * (0.5 * x1 - w * sx)
    gy2 = phase * (0.5 * y1 - w * sy)
    gz2 = phase * (-0.5 * z1 - rinv + w * dz)
    # c * (grad x xvec) per factor with c = -2
    return (
        -2.0 * (gy1 * z1 - gz1 * y1),
        -2.0 * (gz1 * x1 - gx1 * z1),
        -2.0 * (gx1 * y1 - gy1 * x1),
        -2.0 * (gy2 * z2 - gz2 * y2),
        -2.0 * (gz2 * x2 - gx2 * z2),
        -2.0 * (gx2 * y2 - gy2 * x2),
    )


def _rhs_rotation(c6):
    # field of (z1+z2)/2: each factor rotates (x, y) clockwise at unit rate
    return (c6[1], -c6[0], 0.0, c6[4], -c6[3], 0.0)


HAMILTONIANS: dict[str, Callable] = {
    "H": hamiltonian_H,
    "iH": lambda pt: 1j * hamiltonian_H(pt),
    "J": compensated_J,
}


def named_rhs(name: str, singular_tol: float = SINGULAR_TOL):
    if name == "H":
        return lambda c6: _rhs_H(c6, 1.0, singular_tol)
    if name == "iH":
        return lambda c6: _rhs_H(c6, 1j, singular_tol)
    if name == "J":
        return lambda c6: _rhs_rotation(c6)
    raise ValueError(f"unknown hamiltonian {name!r}; choose H, iH or J")


# -- integrator ------------------------------------------------------------------

@dataclass(frozen=True)
class FlowControls:
    atol: float = 1e-10
    rtol: float = 1e-10
    max_step: float = 0.01
    min_step: float = 1e-12
    singular_tol: float = SINGULAR_TOL
    project: bool = True


@dataclass
class Trajectory:
    hamiltonian: str
    times: np.ndarray
    states: np.ndarray                  # (n, 6) complex
    h_values: np.ndarray                # complex, raw H
    j_values: np.ndarray                # complex, compensated (z1+z2)/2
    casimir1: np.ndarray
    casimir2: np.ndarray
    status: str                         # "ok" or "singular"
    controls: FlowControls
    message: str = ""

    def drift(self) -> dict[str, float]:
        def rel(vals):
            ref = max(1.0, abs(vals[0]))
            return float(np.max(np.abs(vals - vals[0])) / ref)
        return {
            "H": rel(self.h_values),
            "J": rel(self.j_values),
            "casimir1": float(np.max(self.casimir1)),
            "casimir2": float(np.max(self.casimir2)),
        }

    def final_point(self) -> np.ndarray:
        return self.states[-1].copy()


# Dormand-Prince 5(4) tableau
_DP_A = (
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_ERR = tuple(b5 - b4 for b5, b4 in zip(
    _DP_B5,
    (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)))


def _project_quadric(c6):
    x1, y1, z1, x2, y2, z2 = c6
    s1 = cmath.sqrt(1.0 / (x1 * x1 + y1 * y1 + z1 * z1))
    s2 = cmath.sqrt(1.0 / (x2 * x2 + y2 * y2 + z2 * z2))
    return (x1 * s1, y1 * s1, z1 * s1, x2 * s2, y2 * s2, z2 * s2)


def flow(start, hamiltonian: str, t_final: float,
         controls: FlowControls = FlowControls()) -> Trajectory:
    """Integrate the named field from `start` over [0, t_final].

    `start` is a ProductPoint or a 6-vector of complex coordinates on the
    product of unit spheres.  A singular-set approach aborts with the
    partial trajectory attached (status "singular").
    """
    if isinstance(start, ProductPoint):
        start.require_member(1e-8)
        c = tuple(complex(v) for v in start.coords())
    else:
        c = tuple(complex(v) for v in start)
    base_rhs = named_rhs(hamiltonian, controls.singular_tol)
    direction = 1.0 if t_final >= 0 else -1.0
    if direction > 0:
        rhs = base_rhs
    else:
        def rhs(cc):
            k = base_rhs(cc)
            return (-k[0], -k[1], -k[2], -k[3], -k[4], -k[5])
    t_end = abs(float(t_final))

    ts = [0.0]
    states = [c]
    t = 0.0
    h = min(controls.max_step, t_end if t_end > 0 else controls.max_step)
    status, message = "ok", ""
    atol, rtol = controls.atol, controls.rtol
    try:
        k1 = rhs(c)
        while t < t_end:
            h = min(h, t_end - t, controls.max_step)
            try:
                ks = [k1]
                for arow in _DP_A:
                    stage = []
                    for m in range(6):
                        acc = 0.0j
                        for aij, k in zip(arow, ks):
                            acc += aij * k[m]
                        stage.append(c[m] + h * acc)
                    ks.append(rhs(tuple(stage)))
            except SingularityError:
                # a stage probed the singular ball: retry with a smaller step
                h *= 0.2
                if h < controls.min_step:
                    raise
                continue
            y5 = []
            err = 0.0
            for m in range(6):
                acc5 = 0.0j
                acce = 0.0j
                for b5, be, k in zip(_DP_B5, _DP_ERR, ks):
                    acc5 += b5 * k[m]
                    acce += be * k[m]
                ym = c[m] + h * acc5
                y5.append(ym)
                sc = atol + rtol * max(abs(c[m]), abs(ym))
                e = abs(h * acce) / sc
                err += e * e
            err = math.sqrt(err / 6.0)
            if err <= 1.0:
                t += h
                c = _project_quadric(tuple(y5)) if controls.project else tuple(y5)
                ts.append(direction * t)
                states.append(c)
                if t_end - t < 1e-13 * max(1.0, t_end):
                    break
                k1 = rhs(c)    # FSAL does not survive projection
            elif h < controls.min_step * 5.0:
                raise SingularityError("step size underflow", location=c, time=t)
            h *= min(5.0, max(0.2, 0.9 * (err + 1e-16) ** -0.2))
    except SingularityError as exc:
        status = "singular"
        message = str(exc)

    arr = np.array(states)
    hv = np.empty(len(states), dtype=complex)
    jv = np.empty(len(states), dtype=complex)
    c1 = np.empty(len(states))
    c2 = np.empty(len(states))
    for i, s in enumerate(arr):
        try:
            hv[i] = hamiltonian_H(tuple(s), singular_tol=0.0)
        except (SingularityError, ZeroDivisionError):
            hv[i] = np.nan
        jv[i] = 0.5 * (s[2] + s[5])
        c1[i] = abs(s[0] ** 2 + s[1] ** 2 + s[2] ** 2 - 1.0)
        c2[i] = abs(s[3] ** 2 + s[4] ** 2 + s[5] ** 2 - 1.0)
    return Trajectory(hamiltonian, np.array(ts), arr, hv, jv, c1, c2,
                      status, controls, message)


# -- real-form helpers ------------------------------------------------------------

REAL_FORM_IDS = ("Sigma@product", "Upsilon@product")


def form_residual(form_rid: str, c6: np.ndarray) -> float:
    pt = product_point(c6)
    return fixed_residual(form_rid, pt)


def adapted_hamiltonian(form_rid: str, base: str = "H") -> str:
    """The multiple of the base Hamiltonian whose flow restricts to the form.

    Real-symplectic forms take the field of f itself, imaginary-symplectic
    forms the field of i*f (the induced real dynamics); an overall sign is
    dropped since it only reverses time.
    """
    if base == "J":
        return "J"
    power = {"H": 0, "iH": 1}[base]
    if CATALOGUE[form_rid].classification == "imaginary-symplectic":
        power += 1
    return "H" if power % 2 == 0 else "iH"


def check_invariance(form_rid: str, hamiltonian: str, n_samples: int,
                     t_short: float, r: np.random.Generator,
                     deriv_tol: float = 1e-10, flow_tol: float = 1e-8,
                     expect_fail: bool = False) -> CheckReport:
    """Two-part invariance test for a real form and a holomorphic Hamiltonian.

    (i) the imaginary part of the Hamiltonian has vanishing derivative along
    the form; (ii) short adapted flows started on the form stay on it.
    """
    f = HAMILTONIANS[hamiltonian]
    deriv_worst = 0.0
    flow_worst = 0.0
    flown = 0
    for _ in range(n_samples):
        pair = sample_fixed(form_rid, r)
        c6 = list(ProductPoint(*pair).coords())
        if abs(radicand(c6)) < 1e-2:
            continue
        for direction in _form_tangent_frame(form_rid, np.array(c6)):
            d = complex(duals.directional(lambda cc: f(tuple(cc)), c6, list(direction)))
            deriv_worst = max(deriv_worst, abs(d.imag))
        if flown < 3:   # a few short flows; the acceptance suite runs long ones
            adapted = adapted_hamiltonian(form_rid, hamiltonian)
            traj = flow(np.array(c6), adapted, t_short)
            flow_worst = max(flow_worst,
                             max(form_residual(form_rid, s) for s in traj.states))
            flown += 1
    rep = CheckReport(f"({form_rid},{hamiltonian})", "flow invariance",
                      n_samples, deriv_worst, deriv_tol, expect_fail=expect_fail)
    ok = deriv_worst <= deriv_tol and flow_worst <= flow_tol
    rep.passed = (not ok) if expect_fail else ok
    rep.detail = f"flow residual {flow_worst:.3e} (tol {flow_tol:.1e})"
    return rep


def _form_tangent_frame(form_rid: str, c6: np.ndarray) -> list[np.ndarray]:
    """A real basis of the form's tangent space as complex coordinate directions."""
    if form_rid == "Sigma@product":
        dirs = []
        for a in (0, 3):
            x = c6[a:a + 3].real
            b1 = np.cross(x, [0.0, 0.0, 1.0])
            if np.linalg.norm(b1) < 1e-8:
                b1 = np.cross(x, [1.0, 0.0, 0.0])
            b1 /= np.linalg.norm(b1)
            b2 = np.cross(x, b1)
            for b in (b1, b2):
                d = np.zeros(6, dtype=complex)
                d[a:a + 3] = b
                dirs.append(d)
        return dirs
    if form_rid == "Upsilon@product":
        # (delta, Ut_* delta) with x1.delta = 0 over the real span
        x1 = c6[0:3]
        _, _, vh = np.linalg.svd(x1.reshape(1, 3))
        out = []
        for t in (np.conj(vh[1]), np.conj(vh[2])):
            for s in (t, 1j * t):
                d = np.zeros(6, dtype=complex)
                d[0:3] = s
                d[3:6] = np.array([np.conj(s[0]), np.conj(s[1]), -np.conj(s[2])])
                out.append(d)
        return out
    raise ValueError(form_rid)


def safe_sigma_start(r: np.random.Generator, h_min: float = 0.6) -> ProductPoint:
    """A compact-form start whose flow can never reach the singular set.

    The limit values of H on the singular stratum fill |H + 1/2| <= 1, so by
    conservation any trajectory with H > 1/2 stays a positive distance away;
    generic compact-form starts do hit the stratum in finite time.
    """
    while True:
        pt = ProductPoint(*sample_fixed("Sigma@product", r))
        if abs(radicand(pt.coords())) < 1e-2:
            continue
        if hamiltonian_H(pt).real >= h_min:
            return pt


def upsilon_point_from_orbit(pt: OrbitPoint) -> ProductPoint:
    return ProductPoint(pt, rs_apply("Ut@cs2", pt))


def rest_point(top: bool = True) -> ProductPoint:
    z = 1.0 if top else -1.0
    return upsilon_point_from_orbit(orbit_point([0.0, 0.0, z]))
