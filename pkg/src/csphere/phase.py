"""The holomorphic symplectic vector space C^2 (+) C^2.

Standard symplectic form, scalar and SU(2) actions, momentum maps, and the
three real-linear identifications with the biquaternions (one per choice of
distinguished quaternion unit).
"""

from __future__ import annotations

import math
from typing import Iterable, NamedTuple

import numpy as np

from .algebra import Biquaternion
from . import duals

SQRT2 = math.sqrt(2.0)

AXES = ("I", "J", "K")

# Position of (alpha, beta, gamma) inside (v, w, z) for each distinguished axis.
# "I" keeps the reference order; "J" and "K" are its cyclic rotations, the
# unique assignment under which the three circle moments agree across bases.
_CYCLE = {"I": (0, 1, 2), "J": (1, 2, 0), "K": (2, 0, 1)}


class PhasePoint(NamedTuple):
    q: np.ndarray
    p: np.ndarray

    def isclose(self, other: "PhasePoint", tol: float = 1e-12) -> bool:
        return (np.max(np.abs(self.q - other.q)) <= tol
                and np.max(np.abs(self.p - other.p)) <= tol)


def phase_point(q: Iterable[complex], p: Iterable[complex]) -> PhasePoint:
    return PhasePoint(np.asarray(q, dtype=complex), np.asarray(p, dtype=complex))


def omega(v1: PhasePoint, v2: PhasePoint) -> complex:
    """Standard holomorphic symplectic form p2.q1 - p1.q2 (complex-bilinear)."""
    return complex(v2.p @ v1.q - v1.p @ v2.q)


def gl1_action(g: complex, pt: PhasePoint) -> PhasePoint:
    """Scalar cotangent action g.(q,p) = (g q, p/g)."""
    if g == 0:
        raise ValueError("scalar action requires g != 0")
    return PhasePoint(g * pt.q, pt.p / g)


def su2_action(g: np.ndarray, pt: PhasePoint, tol: float = 1e-10) -> PhasePoint:
    """Unit-quaternion action g.(q,p) = (g q, conj(g) p), g in SU(2)."""
    g = np.asarray(g, dtype=complex)
    if not np.allclose(g @ np.conj(g.T), np.eye(2), atol=tol):
        raise ValueError("g must be unitary")
    if abs(np.linalg.det(g) - 1.0) > tol:
        raise ValueError("g must have determinant 1")
    return PhasePoint(g @ pt.q, np.conj(g) @ pt.p)


def momentum_P(pt: PhasePoint) -> np.ndarray:
    """Momentum map of the full linear action: the rank-one matrix q p^T."""
    return np.outer(pt.q, pt.p)


def mu_trace(pt: PhasePoint) -> complex:
    """Scalar-action moment, the trace of momentum_P."""
    return complex(pt.p @ pt.q)


def biquat_to_phase(b: Biquaternion, axis: str) -> PhasePoint:
    """Identify a biquaternion with (q, p), the given axis distinguished."""
    vwz = (b.v, b.w, b.z)
    c = _CYCLE[axis]
    al, be, ga = vwz[c[0]], vwz[c[1]], vwz[c[2]]
    q = np.array([b.u + 1j * al, be + 1j * ga]) / SQRT2
    p = np.array([np.conj(be) + 1j * np.conj(ga),
                  -np.conj(b.u) - 1j * np.conj(al)]) / SQRT2
    return PhasePoint(q, p)


def phase_to_biquat(pt: PhasePoint, axis: str) -> Biquaternion:
    """Inverse of biquat_to_phase for the same axis."""
    q, p = pt
    u = (q[0] - np.conj(p[1])) / SQRT2
    al = -1j * (q[0] + np.conj(p[1])) / SQRT2
    be = (q[1] + np.conj(p[0])) / SQRT2
    ga = -1j * (q[1] - np.conj(p[0])) / SQRT2
    c = _CYCLE[axis]
    vwz = [0j, 0j, 0j]
    vwz[c[0]], vwz[c[1]], vwz[c[2]] = al, be, ga
    return Biquaternion(complex(u), complex(vwz[0]), complex(vwz[1]), complex(vwz[2]))


def mu123(b: Biquaternion) -> tuple[complex, complex, complex]:
    """Circle moments (mu1, mu2, mu3) in u(1)* = iR.

    mu_a is i(|q|^2 - |p|^2) computed in the basis with axis a distinguished;
    the triple is a basis-independent function of the biquaternion.
    """
    out = []
    for axis in AXES:
        q, p = biquat_to_phase(b, axis)
        out.append(1j * float(np.vdot(q, q).real - np.vdot(p, p).real))
    return tuple(out)


def mu123_via_axis(b: Biquaternion, axis: str) -> tuple[complex, complex, complex]:
    """The full moment triple read off from a single identification.

    In the a-basis, mu_a = i(|q|^2 - |p|^2) while p^T q = (mu_b + i mu_c)/2
    for (a, b, c) cyclic.  Used as the cross-basis consistency oracle.
    """
    q, p = biquat_to_phase(b, axis)
    mua = 1j * float(np.vdot(q, q).real - np.vdot(p, p).real)
    hol = 2.0 * complex(p @ q)
    mub = 1j * hol.imag
    muc = -1j * hol.real
    order = {"I": (0, 1, 2), "J": (1, 2, 0), "K": (2, 0, 1)}[axis]
    res = [0j, 0j, 0j]
    res[order[0]], res[order[1]], res[order[2]] = mua, mub, muc
    return tuple(res)


def canonical_bracket(f, g, pt: PhasePoint) -> complex:
    """Poisson bracket of holomorphic observables on (C^2 (+) C^2, omega).

    f and g take the flat argument (q1, q2, p1, p2) of scalars supporting
    dual-number arithmetic.
    """
    flat = [complex(pt.q[0]), complex(pt.q[1]), complex(pt.p[0]), complex(pt.p[1])]
    df = duals.gradient(f, flat)
    dg = duals.gradient(g, flat)
    return (df[0] * dg[2] - df[2] * dg[0]) + (df[1] * dg[3] - df[3] * dg[1])
