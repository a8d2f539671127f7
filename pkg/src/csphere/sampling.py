"""Seeded random and quasi-random generators for every space in the library."""

from __future__ import annotations

import numpy as np
from scipy.stats import qmc

from .algebra import Biquaternion
from .phase import PhasePoint


def rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def sobol(dim: int, seed: int) -> qmc.Sobol:
    return qmc.Sobol(d=dim, scramble=True, seed=seed)


def complex_normal(r: np.random.Generator, shape=()) -> np.ndarray:
    return r.standard_normal(shape) + 1j * r.standard_normal(shape)


def biquaternion(r: np.random.Generator) -> Biquaternion:
    c = complex_normal(r, (4,))
    return Biquaternion(*map(complex, c))


def phase_point(r: np.random.Generator) -> PhasePoint:
    return PhasePoint(complex_normal(r, (2,)), complex_normal(r, (2,)))


def su2(r: np.random.Generator) -> np.ndarray:
    v = r.standard_normal(4)
    v /= np.linalg.norm(v)
    a = v[0] + 1j * v[1]
    b = v[2] + 1j * v[3]
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def nonzero_scalar(r: np.random.Generator) -> complex:
    while True:
        g = complex(complex_normal(r))
        if abs(g) > 0.1:
            return g


def unit_vector(r: np.random.Generator) -> np.ndarray:
    n = r.standard_normal(3)
    return n / np.linalg.norm(n)


def tangent_dir(r: np.random.Generator, n: np.ndarray) -> np.ndarray:
    m = r.standard_normal(3)
    m -= (m @ n) * n
    return m / np.linalg.norm(m)


def cs2_coords(r: np.random.Generator, spread: float = 0.7) -> np.ndarray:
    """Point of the complex sphere x^2+y^2+z^2 = 1 as cosh(rho) n + i sinh(rho) m."""
    n = unit_vector(r)
    m = tangent_dir(r, n)
    rho = abs(r.standard_normal()) * spread
    return np.cosh(rho) * n + 1j * np.sinh(rho) * m


def ics2_coords(r: np.random.Generator, spread: float = 0.7) -> np.ndarray:
    """Point of x^2+y^2+z^2 = -1 (multiply a unit complex sphere point by i)."""
    return 1j * cs2_coords(r, spread)


def level_phase_point(r: np.random.Generator, level: complex) -> PhasePoint:
    """(q, p) with p^T q = level (any nonzero q, a transverse p plus kernel part)."""
    q = complex_normal(r, (2,))
    while np.linalg.norm(q) < 0.3:
        q = complex_normal(r, (2,))
    perp = np.array([-q[1], q[0]])
    p = level * np.conj(q) / np.vdot(q, q) + complex(complex_normal(r)) * perp
    return PhasePoint(q, p)


def cotangent_point(r: np.random.Generator, scale: float = 1.0):
    from .orbit import CotangentPoint

    q = complex_normal(r, (2,))
    while np.linalg.norm(q) < 0.3:
        q = complex_normal(r, (2,))
    q = q / np.linalg.norm(q)
    perp = np.array([-q[1], q[0]])
    p = scale * complex(complex_normal(r)) * perp
    return CotangentPoint(q, p)
