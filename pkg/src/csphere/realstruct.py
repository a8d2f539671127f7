"""The involution catalogue and its compatibility checks.

Four involutions of the biquaternions (R, S, T, U) expressed in the three
phase-space identifications, their descents to the reduced spaces, the
product-space involutions Sigma and Upsilon, the scalar-group real forms
rho, sigma, tau, and the numeric verifications: involutivity, linearity
type, real-/imaginary-symplectic classification, descent consistency,
real-Poisson property, equivariance, momentum compatibility, and fixed-set
membership.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import sampling
from .algebra import UNIT_I, UNIT_J, UNIT_K, conjugate_adjoint_gl
from .orbit import (CotangentPoint, OrbitPoint, coords_to_matrix, kks_bracket,
                    matrix_to_coords, omega_cotangent, omega_kks, orbit_point,
                    orbit_tangent_basis, reduce_to_cotangent)
from .phase import PhasePoint, gl1_action, momentum_P, omega

CLASS_REAL = "real-symplectic"
CLASS_IMAG = "imaginary-symplectic"
CLASS_ANTI = "anti-symplectic"

ProductPair = tuple[OrbitPoint, OrbitPoint]


@dataclass(frozen=True)
class Involution:
    rid: str
    space: str
    func: Callable
    linearity: str                       # "conjugate" or "complex"
    classification: Optional[str] = None
    fixed_label: Optional[str] = None
    table_cell: Optional[tuple[str, str]] = None   # (column, row) of the source table
    formula: str = ""
    dfunc: Optional[Callable] = None     # analytic differential for nonlinear maps


def _cc(v):
    return np.conj(v)


# -- phase-space rows ---------------------------------------------------------

def _r_phase_i(pt):
    return PhasePoint(-1j * UNIT_K @ _cc(pt.q), 1j * UNIT_K @ _cc(pt.p))


def _s_phase_i(pt):
    return PhasePoint(pt.q.copy(), -pt.p)


def _t_phase_i(pt):
    return PhasePoint(-1j * UNIT_K @ pt.q, 1j * UNIT_K @ pt.p)


def _u_phase_i(pt):
    return PhasePoint(_cc(pt.q), _cc(pt.p))


def _r_phase_j(pt):
    return PhasePoint(_cc(pt.q), _cc(pt.p))


def _s_phase_j(pt):
    return PhasePoint(-_cc(pt.p), -_cc(pt.q))


def _t_phase_j(pt):
    return PhasePoint(-1j * UNIT_J @ _cc(pt.p), 1j * UNIT_J @ _cc(pt.q))


def _u_phase_j(pt):
    return PhasePoint(-1j * UNIT_K @ pt.p, -1j * UNIT_K @ pt.q)


def _r_phase_k(pt):
    return PhasePoint(1j * UNIT_K @ pt.p, 1j * UNIT_K @ pt.q)


def _s_phase_k(pt):
    return PhasePoint(1j * _cc(pt.p), 1j * _cc(pt.q))


def _t_phase_k(pt):
    return PhasePoint(UNIT_I @ _cc(pt.p), UNIT_I @ _cc(pt.q))


def _u_phase_k(pt):
    return PhasePoint(-1j * UNIT_I @ _cc(pt.q), 1j * UNIT_I @ _cc(pt.p))


# -- reduced spheres (coordinate actions; zeta is preserved) -------------------

def _coord_map(fx, fy, fz):
    def act(pt: OrbitPoint) -> OrbitPoint:
        return OrbitPoint(fx(pt), fy(pt), fz(pt), pt.zeta)
    return act


_rt_cs2 = _coord_map(lambda p: -p.x, lambda p: p.y, lambda p: p.z)
_st_cs2 = _coord_map(lambda p: np.conj(p.x), lambda p: np.conj(p.y), lambda p: np.conj(p.z))
_tt_cs2 = _coord_map(lambda p: np.conj(p.x), lambda p: -np.conj(p.y), lambda p: -np.conj(p.z))
_ut_cs2 = _coord_map(lambda p: np.conj(p.x), lambda p: np.conj(p.y), lambda p: -np.conj(p.z))

_rt_ics2 = _coord_map(lambda p: -np.conj(p.x), lambda p: np.conj(p.y), lambda p: -np.conj(p.z))
_st_ics2 = _coord_map(lambda p: -np.conj(p.x), lambda p: -np.conj(p.y), lambda p: -np.conj(p.z))
_tt_ics2 = _coord_map(lambda p: np.conj(p.x), lambda p: -np.conj(p.y), lambda p: np.conj(p.z))
_ut_ics2 = _coord_map(lambda p: -p.x, lambda p: p.y, lambda p: p.z)


# -- T*CP^1 (acting on level representatives) ---------------------------------

def _s_tcp1(pt: CotangentPoint) -> CotangentPoint:
    return CotangentPoint(pt.q.copy(), -pt.p)


def _t_tcp1(pt: CotangentPoint) -> CotangentPoint:
    return CotangentPoint(-1j * UNIT_K @ pt.q, 1j * UNIT_K @ pt.p)


def _u_tcp1(pt: CotangentPoint) -> CotangentPoint:
    return CotangentPoint(_cc(pt.q), _cc(pt.p))


# -- products ------------------------------------------------------------------

def sigma_product(pt: ProductPair) -> ProductPair:
    return (_st_cs2(pt[0]), _st_cs2(pt[1]))


def upsilon_product(pt: ProductPair) -> ProductPair:
    return (_ut_cs2(pt[1]), _ut_cs2(pt[0]))


# -- ambient gl(2,C)* and the scalar group -------------------------------------

def _rt_gl(xi):
    return np.conj(xi)


def _st_gl(xi):
    return -np.conj(xi.T)


def _tt_gl(xi):
    return UNIT_I @ np.conj(xi.T) @ UNIT_I


def rho_group(z: complex) -> complex:
    return np.conj(z)


def sigma_group(z: complex) -> complex:
    return 1.0 / np.conj(z)


tau_group = sigma_group


CATALOGUE: dict[str, Involution] = {}


def _reg(inv: Involution) -> None:
    CATALOGUE[inv.rid] = inv


for rid, fn, lin, cls, cell, formula in [
    ("R@phase-I", _r_phase_i, "conjugate", CLASS_IMAG, ("R", "phase-I"), "(-iK conj(q), iK conj(p))"),
    ("S@phase-I", _s_phase_i, "complex", CLASS_ANTI, ("S", "phase-I"), "(q, -p)"),
    ("T@phase-I", _t_phase_i, "complex", CLASS_ANTI, ("T", "phase-I"), "(-iK q, iK p)"),
    ("U@phase-I", _u_phase_i, "conjugate", CLASS_REAL, ("U", "phase-I"), "(conj(q), conj(p))"),
    ("R@phase-J", _r_phase_j, "conjugate", CLASS_REAL, ("R", "phase-J"), "(conj(q), conj(p))"),
    ("S@phase-J", _s_phase_j, "conjugate", CLASS_IMAG, ("S", "phase-J"), "(-conj(p), -conj(q))"),
    ("T@phase-J", _t_phase_j, "conjugate", CLASS_IMAG, ("T", "phase-J"), "(-iJ conj(p), iJ conj(q))"),
    ("U@phase-J", _u_phase_j, "complex", CLASS_ANTI, ("U", "phase-J"), "(-iK p, -iK q)"),
    ("R@phase-K", _r_phase_k, "complex", CLASS_ANTI, ("R", "phase-K"), "(iK p, iK q)"),
    ("S@phase-K", _s_phase_k, "conjugate", CLASS_REAL, ("S", "phase-K"), "(i conj(p), i conj(q))"),
    ("T@phase-K", _t_phase_k, "conjugate", CLASS_REAL, ("T", "phase-K"), "(I conj(p), I conj(q))"),
    ("U@phase-K", _u_phase_k, "conjugate", CLASS_IMAG, ("U", "phase-K"), "(-iI conj(q), iI conj(p))"),
]:
    _reg(Involution(rid, "phase", fn, lin, cls, None, cell, formula))

for rid, fn, lin, cls, label, cell, formula in [
    ("Rt@cs2", _rt_cs2, "complex", CLASS_ANTI, "CS1", ("R", "cs2"), "-K xi^T K"),
    ("St@cs2", _st_cs2, "conjugate", CLASS_REAL, "S2", ("S", "cs2"), "-xi^dag"),
    ("Tt@cs2", _tt_cs2, "conjugate", CLASS_REAL, "H2H2", ("T", "cs2"), "I xi^dag I"),
    ("Ut@cs2", _ut_cs2, "conjugate", CLASS_IMAG, None, ("U", "cs2"), "I conj(xi) I"),
    ("Rt@ics2", _rt_ics2, "conjugate", CLASS_REAL, "S1xR", ("R", "ics2"), "conj(xi)"),
    ("St@ics2", _st_ics2, "conjugate", CLASS_IMAG, None, ("S", "ics2"), "xi^dag"),
    ("Tt@ics2", _tt_ics2, "conjugate", CLASS_IMAG, None, ("T", "ics2"), "-J xi^dag J"),
    ("Ut@ics2", _ut_ics2, "complex", CLASS_ANTI, "iCS1", ("U", "ics2"), "-K xi^T K"),
]:
    space = "cs2" if rid.endswith("cs2") and "ics2" not in rid else "ics2"
    _reg(Involution(rid, space, fn, lin, cls, label, cell, formula))

for rid, fn, lin, cls, label, cell, formula in [
    ("S@tcp1", _s_tcp1, "complex", CLASS_ANTI, "CP1-zero-section", ("S", "tcp1"), "(q, -p)"),
    ("T@tcp1", _t_tcp1, "complex", CLASS_ANTI, "fibre-pair", ("T", "tcp1"), "(-iK q, iK p)"),
    ("U@tcp1", _u_tcp1, "conjugate", CLASS_REAL, "T*RP1", ("U", "tcp1"), "(conj(q), conj(p))"),
]:
    _reg(Involution(rid, "tcp1", fn, lin, cls, label, cell, formula))

_reg(Involution("Sigma@product", "product", sigma_product, "conjugate",
                CLASS_REAL, "S2xS2", None, "(St xi1, St xi2)"))
_reg(Involution("Upsilon@product", "product", upsilon_product, "conjugate",
                CLASS_IMAG, "conj-diagonal-CS2", None, "(Ut xi2, Ut xi1)"))

_reg(Involution("Rt@gl", "gl", _rt_gl, "conjugate", None, "gl2R", None, "conj(xi)"))
_reg(Involution("St@gl", "gl", _st_gl, "conjugate", None, "u2", None, "-xi^dag"))
_reg(Involution("Tt@gl", "gl", _tt_gl, "conjugate", None, "u11", None, "I xi^dag I"))

_reg(Involution("rho@gl1", "gl1", rho_group, "conjugate", None, None, None,
                "conj(z)", dfunc=lambda z, dz: np.conj(dz)))
_reg(Involution("sigma@gl1", "gl1", sigma_group, "conjugate", None, None, None,
                "1/conj(z)", dfunc=lambda z, dz: -np.conj(dz) / np.conj(z) ** 2))
_reg(Involution("tau@gl1", "gl1", tau_group, "conjugate", None, None, None,
                "1/conj(z)", dfunc=lambda z, dz: -np.conj(dz) / np.conj(z) ** 2))


def _biq_via_axis(phase_fn, axis):
    from .phase import biquat_to_phase, phase_to_biquat

    def act(b):
        return phase_to_biquat(phase_fn(biquat_to_phase(b, axis)), axis)
    return act


for fam, fns in [("R", (_r_phase_i, _r_phase_j, _r_phase_k)),
                 ("S", (_s_phase_i, _s_phase_j, _s_phase_k)),
                 ("T", (_t_phase_i, _t_phase_j, _t_phase_k)),
                 ("U", (_u_phase_i, _u_phase_j, _u_phase_k))]:
    _reg(Involution(f"{fam}@biquaternion", "biquaternion",
                    _biq_via_axis(fns[0], "I"), "real", None, None, None,
                    f"{fam} through the reference identification"))


# descent pairs: (phase id, reduced id, level of p.q, reducer)
DESCENT_PAIRS = (
    ("R@phase-K", "Rt@cs2", 1j),
    ("S@phase-K", "St@cs2", 1j),
    ("T@phase-K", "Tt@cs2", 1j),
    ("U@phase-K", "Ut@cs2", 1j),
    ("R@phase-J", "Rt@ics2", -1.0),
    ("S@phase-J", "St@ics2", -1.0),
    ("T@phase-J", "Tt@ics2", -1.0),
    ("U@phase-J", "Ut@ics2", -1.0),
)

COTANGENT_DESCENT_PAIRS = (
    ("S@phase-I", "S@tcp1"),
    ("T@phase-I", "T@tcp1"),
    ("U@phase-I", "U@tcp1"),
)

EQUIVARIANCE_PAIRS = (
    ("R@phase-J", "rho@gl1"),
    ("S@phase-K", "sigma@gl1"),
    ("T@phase-K", "tau@gl1"),
)

# cells of the source table with no fixed-point set listed
OMITTED_CELLS = (("R", "tcp1"), ("S", "ics2"), ("T", "ics2"), ("U", "cs2"))


def get(rid: str) -> Involution:
    return CATALOGUE[rid]


def apply(rid: str, pt):
    return CATALOGUE[rid].func(pt)


# -- generic point plumbing per space ------------------------------------------

def _sample(space: str, r: np.random.Generator, rid: str = ""):
    if space == "phase":
        return sampling.phase_point(r)
    if space == "cs2":
        return orbit_point(sampling.cs2_coords(r))
    if space == "ics2":
        return orbit_point(sampling.ics2_coords(r), zeta=-1.0)
    if space == "tcp1":
        return sampling.cotangent_point(r)
    if space == "product":
        return (orbit_point(sampling.cs2_coords(r)), orbit_point(sampling.cs2_coords(r)))
    if space == "gl":
        return sampling.complex_normal(r, (2, 2))
    if space == "gl1":
        return sampling.nonzero_scalar(r)
    if space == "biquaternion":
        return sampling.biquaternion(r)
    raise ValueError(space)


def _as_vector(space: str, pt) -> np.ndarray:
    if space == "phase":
        return np.concatenate([pt.q, pt.p])
    if space in ("cs2", "ics2"):
        return pt.coords()
    if space == "tcp1":
        return np.concatenate([pt.q, pt.p])
    if space == "product":
        return np.concatenate([pt[0].coords(), pt[1].coords()])
    if space == "gl":
        return np.asarray(pt, dtype=complex).ravel()
    if space == "gl1":
        return np.array([pt], dtype=complex)
    if space == "biquaternion":
        return np.array(pt.coeffs())
    raise ValueError(space)


def point_distance(rid: str, a, b) -> float:
    space = CATALOGUE[rid].space
    if space == "tcp1":
        return a.phase_distance(b)       # representatives are circle classes
    return float(np.max(np.abs(_as_vector(space, a) - _as_vector(space, b))))


def _from_vector(space: str, vec: np.ndarray, template):
    if space == "phase":
        return PhasePoint(vec[:2].copy(), vec[2:].copy())
    if space in ("cs2", "ics2"):
        return OrbitPoint(complex(vec[0]), complex(vec[1]), complex(vec[2]),
                          template.zeta)
    if space == "tcp1":
        return CotangentPoint(vec[:2].copy(), vec[2:].copy())
    if space == "product":
        return (OrbitPoint(*map(complex, vec[:3]), template[0].zeta),
                OrbitPoint(*map(complex, vec[3:]), template[1].zeta))
    if space == "gl":
        return vec.reshape(2, 2)
    if space == "gl1":
        return complex(vec[0])
    raise ValueError(space)


def differential(rid: str, pt, direction: np.ndarray) -> np.ndarray:
    """dA at pt along a coordinate direction (exact for these affine maps)."""
    inv = CATALOGUE[rid]
    if inv.dfunc is not None:
        return np.atleast_1d(np.asarray(inv.dfunc(pt, direction), dtype=complex))
    base = _as_vector(inv.space, pt)
    moved = _from_vector(inv.space, base + direction, pt)
    return _as_vector(inv.space, inv.func(moved)) - _as_vector(inv.space, inv.func(pt))


# -- checks ---------------------------------------------------------------------

@dataclass
class CheckReport:
    rid: str
    prop: str
    samples: int
    max_residual: float
    tol: float
    passed: bool = field(init=False)
    expect_fail: bool = False
    detail: str = ""

    def __post_init__(self):
        self.max_residual = float(self.max_residual)
        self.tol = float(self.tol)
        ok = self.max_residual <= self.tol
        self.passed = bool((not ok) if self.expect_fail else ok)

    def to_dict(self) -> dict:
        out = {"id": self.rid, "property": self.prop, "samples": self.samples,
               "max_residual": self.max_residual, "tol": self.tol, "pass": self.passed}
        if self.expect_fail:
            out["expect_fail"] = True
        if self.detail:
            out["detail"] = self.detail
        return out


def check_involution(rid: str, n: int, r: np.random.Generator,
                     tol: float = 1e-14) -> CheckReport:
    inv = CATALOGUE[rid]
    worst = 0.0
    for _ in range(n):
        pt = _sample(inv.space, r, rid)
        worst = max(worst, point_distance(rid, inv.func(inv.func(pt)), pt))
    return CheckReport(rid, "involution", n, worst, tol)


def check_linearity(rid: str, n: int, r: np.random.Generator,
                    tol: float = 1e-10) -> CheckReport:
    """dA(iX) = -i dA(X) for conjugate-linear cells, +i dA(X) for complex ones."""
    inv = CATALOGUE[rid]
    sign = -1j if inv.linearity == "conjugate" else 1j
    worst = 0.0
    dim = {"phase": 4, "cs2": 3, "ics2": 3, "tcp1": 4, "product": 6,
           "gl": 4, "gl1": 1, "biquaternion": 4}[inv.space]
    for _ in range(n):
        pt = _sample(inv.space, r, rid)
        direction = sampling.complex_normal(r, (dim,))
        lhs = differential(rid, pt, 1j * direction)
        rhs = sign * differential(rid, pt, direction)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckReport(rid, f"{inv.linearity}-linear differential", n, worst, tol)


def _tangent_pair(space: str, pt, r: np.random.Generator):
    """A random tangent direction at pt, as a coordinate vector."""
    if space == "phase":
        return sampling.complex_normal(r, (4,))
    if space in ("cs2", "ics2"):
        t1, t2 = orbit_tangent_basis(pt)
        return complex(sampling.complex_normal(r)) * t1 + complex(sampling.complex_normal(r)) * t2
    if space == "tcp1":
        dq = sampling.complex_normal(r, (2,))
        dp = sampling.complex_normal(r, (2,))
        # stay tangent to the level p.q = 0: correct dp along conj(q)
        err = complex(dp @ pt.q + pt.p @ dq)
        dp = dp - err * np.conj(pt.q) / float(np.vdot(pt.q, pt.q).real)
        return np.concatenate([dq, dp])
    if space == "product":
        a = _tangent_pair("cs2", pt[0], r)
        b = _tangent_pair("cs2", pt[1], r)
        return np.concatenate([a, b])
    raise ValueError(space)


def _symplectic_eval(space: str, pt, d1: np.ndarray, d2: np.ndarray) -> complex:
    if space == "phase":
        return omega(PhasePoint(d1[:2], d1[2:]), PhasePoint(d2[:2], d2[2:]))
    if space in ("cs2", "ics2"):
        return omega_kks(pt, d1, d2)
    if space == "tcp1":
        return omega_cotangent((d1[:2], d1[2:]), (d2[:2], d2[2:]))
    if space == "product":
        return (omega_kks(pt[0], d1[:3], d2[:3])
                + omega_kks(pt[1], d1[3:], d2[3:]))
    raise ValueError(space)


def classify_symplectic(rid: str, n: int, r: np.random.Generator) -> dict:
    """Residuals of A*Omega against conj(Omega), -conj(Omega), Omega, -Omega."""
    inv = CATALOGUE[rid]
    keys = (CLASS_REAL, CLASS_IMAG, "holomorphic-symplectic", CLASS_ANTI)
    worst = dict.fromkeys(keys, 0.0)
    for _ in range(n):
        pt = _sample(inv.space, r, rid)
        d1 = _tangent_pair(inv.space, pt, r)
        d2 = _tangent_pair(inv.space, pt, r)
        base = _symplectic_eval(inv.space, pt, d1, d2)
        img = inv.func(pt) if inv.space != "product" else inv.func(pt)
        pull = _symplectic_eval(inv.space, img,
                                differential(rid, pt, d1), differential(rid, pt, d2))
        worst[CLASS_REAL] = max(worst[CLASS_REAL], abs(pull - np.conj(base)))
        worst[CLASS_IMAG] = max(worst[CLASS_IMAG], abs(pull + np.conj(base)))
        worst["holomorphic-symplectic"] = max(worst["holomorphic-symplectic"], abs(pull - base))
        worst[CLASS_ANTI] = max(worst[CLASS_ANTI], abs(pull + base))
    best = min(worst, key=worst.get)
    return {"id": rid, "classification": best, "residuals": worst,
            "claimed": inv.classification,
            "matches_claim": best == inv.classification}


def check_classification(rid: str, n: int, r: np.random.Generator,
                         tol: float = 1e-9) -> CheckReport:
    res = classify_symplectic(rid, n, r)
    claimed = CATALOGUE[rid].classification
    residual = res["residuals"][claimed] if claimed else math.inf
    rep = CheckReport(rid, f"classified {claimed}", n, residual, tol)
    rep.detail = res["classification"]
    return rep


def check_descent(phase_rid: str, reduced_rid: str, level: complex, n: int,
                  r: np.random.Generator, tol: float = 1e-12) -> CheckReport:
    """momentum_P intertwines the phase involution with its reduced form."""
    inv_red = CATALOGUE[reduced_rid]
    worst = 0.0
    for _ in range(n):
        pt = sampling.level_phase_point(r, level)
        xi_after = momentum_P(apply(phase_rid, pt))
        red_before = inv_red.func(matrix_to_coords(momentum_P(pt), tol=1e-8))
        worst = max(worst, float(np.max(np.abs(
            xi_after - coords_to_matrix(red_before, tol=1e-8)))))
    return CheckReport(f"{phase_rid}->{reduced_rid}", "descent consistency", n, worst, tol)


def check_descent_cotangent(phase_rid: str, tcp_rid: str, n: int,
                            r: np.random.Generator, tol: float = 1e-12) -> CheckReport:
    worst = 0.0
    for _ in range(n):
        pt = sampling.level_phase_point(r, 0.0)
        lhs = reduce_to_cotangent(apply(phase_rid, pt))
        rhs = apply(tcp_rid, reduce_to_cotangent(pt))
        worst = max(worst, lhs.phase_distance(rhs))
    return CheckReport(f"{phase_rid}->{tcp_rid}", "descent consistency", n, worst, tol)


def check_real_poisson(rid: str, n: int, r: np.random.Generator,
                       tol: float = 1e-10, expect_fail: bool = False) -> CheckReport:
    """pi_{A(xi)}(conj-adj df, conj-adj dg) = conj(pi_xi(df, dg)) for KKS."""
    inv = CATALOGUE[rid]
    worst = 0.0
    for _ in range(n):
        xi = sampling.complex_normal(r, (2, 2))
        # observables Tr(A .) have constant trace-pairing gradient A
        da = sampling.complex_normal(r, (2, 2))
        db = sampling.complex_normal(r, (2, 2))
        da_adj = conjugate_adjoint_gl(inv.func, da)
        db_adj = conjugate_adjoint_gl(inv.func, db)
        lhs = np.trace(inv.func(xi) @ (da_adj @ db_adj - db_adj @ da_adj))
        rhs = np.conj(np.trace(xi @ (da @ db - db @ da)))
        worst = max(worst, abs(complex(lhs - rhs)))
    return CheckReport(rid, "real-Poisson for the Lie-Poisson bracket", n, worst,
                       tol, expect_fail=expect_fail)


def wrong_involution_gl(xi: np.ndarray) -> np.ndarray:
    """Deliberately broken candidate used as the negative control."""
    return np.conj(xi.T) @ UNIT_J


def check_real_poisson_negative(n: int, r: np.random.Generator) -> CheckReport:
    worst = 0.0
    for _ in range(n):
        xi = sampling.complex_normal(r, (2, 2))
        da = sampling.complex_normal(r, (2, 2))
        db = sampling.complex_normal(r, (2, 2))
        da_adj = conjugate_adjoint_gl(wrong_involution_gl, da)
        db_adj = conjugate_adjoint_gl(wrong_involution_gl, db)
        lhs = np.trace(wrong_involution_gl(xi) @ (da_adj @ db_adj - db_adj @ da_adj))
        rhs = np.conj(np.trace(xi @ (da @ db - db @ da)))
        worst = max(worst, abs(complex(lhs - rhs)))
    return CheckReport("negative-control@gl", "real-Poisson (must fail)", n, worst,
                       1e-10, expect_fail=True)


def check_equivariance(phase_rid: str, group_rid: str, n: int,
                       r: np.random.Generator, tol: float = 1e-12,
                       expect_fail: bool = False) -> CheckReport:
    """A(g.m) = rho(g).A(m) for the scalar action."""
    a_m = CATALOGUE[phase_rid].func
    a_g = CATALOGUE[group_rid].func
    worst = 0.0
    for _ in range(n):
        pt = sampling.phase_point(r)
        g = sampling.nonzero_scalar(r)
        lhs = a_m(gl1_action(g, pt))
        rhs = gl1_action(a_g(g), a_m(pt))
        worst = max(worst, point_distance(phase_rid, lhs, rhs))
    return CheckReport(f"({phase_rid},{group_rid})", "equivariance", n, worst, tol,
                       expect_fail=expect_fail)


def check_momentum_compat(mu, rid: str, rho_star, n: int, r: np.random.Generator,
                          sample, tol: float = 1e-10) -> CheckReport:
    """mu(A(pt)) = rho_star(mu(pt)) on random points from `sample`."""
    inv = CATALOGUE[rid]
    worst = 0.0
    for _ in range(n):
        pt = sample(r)
        lhs = np.asarray(mu(inv.func(pt)), dtype=complex)
        rhs = np.asarray(rho_star(mu(pt)), dtype=complex)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return CheckReport(rid, "momentum compatibility", n, worst, tol)


def realify(f, rid: str):
    """Altered integral f + conj(f o A), purely real on the fixed set of A."""
    inv = CATALOGUE[rid]

    def g(pt):
        return f(pt) + np.conj(f(inv.func(pt)))
    return g


# -- fixed sets -------------------------------------------------------------------

def is_fixed(rid: str, pt, tol: float = 1e-10) -> bool:
    return point_distance(rid, pt, apply(rid, pt)) <= tol


def fixed_residual(rid: str, pt) -> float:
    return 0.5 * point_distance(rid, pt, apply(rid, pt))


def project_to_fixed(rid: str, pt, tol: float = 1e-8):
    """Average with the image, then repair the variety membership."""
    inv = CATALOGUE[rid]
    image = apply(rid, pt)
    if inv.space == "tcp1":
        image = image.aligned_to(pt)
    vec = 0.5 * (_as_vector(inv.space, pt) + _as_vector(inv.space, image))
    out = _from_vector(inv.space, vec, pt)
    if inv.space in ("cs2", "ics2"):
        out = _rescale_orbit(out)
    elif inv.space == "product":
        out = (_rescale_orbit(out[0]), _rescale_orbit(out[1]))
    elif inv.space == "tcp1":
        q = out.q / np.linalg.norm(out.q)
        p = out.p - complex(out.p @ q) * np.conj(q)
        out = CotangentPoint(q, p)
    if not is_fixed(rid, out, max(tol, 10 * fixed_residual(rid, pt) * 1e-6 + 1e-12)):
        resid = fixed_residual(rid, out)
        if resid > tol:
            raise ValueError(f"projection did not reach the fixed set of {rid}: {resid:.2e}")
    return out


def _rescale_orbit(pt: OrbitPoint) -> OrbitPoint:
    s = pt.x ** 2 + pt.y ** 2 + pt.z ** 2
    lam = cmath.sqrt(-pt.zeta ** 2 / s)
    return OrbitPoint(lam * pt.x, lam * pt.y, lam * pt.z, pt.zeta)


def sample_fixed(rid: str, r: np.random.Generator):
    """A random point of the fixed set of the named involution."""
    label = CATALOGUE[rid].fixed_label
    if label == "S2":
        return orbit_point(sampling.unit_vector(r))
    if label == "H2H2":
        rr, ph = abs(r.standard_normal()), r.uniform(0, 2 * math.pi)
        sign = 1.0 if r.uniform() < 0.5 else -1.0
        return orbit_point([sign * math.cosh(rr),
                            1j * math.sinh(rr) * math.cos(ph),
                            1j * math.sinh(rr) * math.sin(ph)])
    if label == "S1xR":
        y = r.standard_normal()
        ph = r.uniform(0, 2 * math.pi)
        rad = math.sqrt(1.0 + y * y)
        return orbit_point([1j * rad * math.cos(ph), y, 1j * rad * math.sin(ph)],
                           zeta=-1.0)
    if label == "CS1":
        w = complex(r.standard_normal() + 1j * 0.6 * r.standard_normal())
        return orbit_point([0.0, cmath.cos(w), cmath.sin(w)])
    if label == "iCS1":
        w = complex(r.standard_normal() + 1j * 0.6 * r.standard_normal())
        return orbit_point([0.0, 1j * cmath.cos(w), 1j * cmath.sin(w)], zeta=-1.0)
    if label == "T*RP1":
        th = r.uniform(0, 2 * math.pi)
        q = np.array([math.cos(th), math.sin(th)], dtype=complex)
        p = float(r.standard_normal()) * np.array([-q[1], q[0]])
        return CotangentPoint(q, p)
    if label == "CP1-zero-section":
        pt = sampling.cotangent_point(r)
        return CotangentPoint(pt.q, np.zeros(2, dtype=complex))
    if label == "fibre-pair":
        sgn = 1.0 if r.uniform() < 0.5 else -1.0
        q = np.array([1.0, sgn], dtype=complex) / math.sqrt(2)
        p = complex(sampling.complex_normal(r)) * np.array([1.0, -sgn], dtype=complex) / math.sqrt(2)
        return CotangentPoint(q, p)
    if label == "S2xS2":
        return (orbit_point(sampling.unit_vector(r)), orbit_point(sampling.unit_vector(r)))
    if label == "conj-diagonal-CS2":
        a = orbit_point(sampling.cs2_coords(r))
        return (a, _ut_cs2(a))
    raise ValueError(f"{rid} has no sampled fixed set")
