"""Exact small complex linear algebra.

Biquaternions (quaternions with complex coefficients), the 2x2 matrix
realization of the quaternion units, the trace pairing on gl(2,C), and
conjugate-adjoints of conjugate-linear maps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Quaternion units as 2x2 complex matrices: (i sigma3, i sigma2, i sigma1).
# Fixing this realization once pins every cyclic convention downstream.
UNIT_I = np.array([[1j, 0.0], [0.0, -1j]])
UNIT_J = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
UNIT_K = np.array([[0.0, 1j], [1j, 0.0]])
IDENT2 = np.eye(2, dtype=complex)


def pauli_basis() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The quaternion unit matrices (diag(i,-i) first)."""
    return UNIT_I.copy(), UNIT_J.copy(), UNIT_K.copy()


def trace_pairing(a: np.ndarray, b: np.ndarray) -> complex:
    """Symmetric non-degenerate pairing <A,B> = Tr(AB) on gl(2,C)."""
    return complex(np.trace(a @ b))


@dataclass(frozen=True)
class Biquaternion:
    """u*1 + v*I + w*J + z*K with complex coefficients."""

    u: complex
    v: complex
    w: complex
    z: complex

    def __add__(self, other: "Biquaternion") -> "Biquaternion":
        return Biquaternion(self.u + other.u, self.v + other.v,
                            self.w + other.w, self.z + other.z)

    def __sub__(self, other: "Biquaternion") -> "Biquaternion":
        return Biquaternion(self.u - other.u, self.v - other.v,
                            self.w - other.w, self.z - other.z)

    def __mul__(self, other):
        if isinstance(other, Biquaternion):
            return biquat_mul(self, other)
        return Biquaternion(self.u * other, self.v * other,
                            self.w * other, self.z * other)

    def __rmul__(self, scalar: complex) -> "Biquaternion":
        return Biquaternion(scalar * self.u, scalar * self.v,
                            scalar * self.w, scalar * self.z)

    def __neg__(self) -> "Biquaternion":
        return Biquaternion(-self.u, -self.v, -self.w, -self.z)

    @property
    def gamma(self) -> float:
        """Metric norm |u|^2 + |v|^2 + |w|^2 + |z|^2."""
        return (abs(self.u) ** 2 + abs(self.v) ** 2
                + abs(self.w) ** 2 + abs(self.z) ** 2)

    def to_matrix(self) -> np.ndarray:
        """Faithful representation 1 -> id, I -> UNIT_I, J -> UNIT_J, K -> UNIT_K."""
        return (self.u * IDENT2 + self.v * UNIT_I
                + self.w * UNIT_J + self.z * UNIT_K)

    def coeffs(self) -> tuple[complex, complex, complex, complex]:
        return (self.u, self.v, self.w, self.z)

    def isclose(self, other: "Biquaternion", tol: float = 1e-12) -> bool:
        return (self - other).gamma <= tol * tol


BQ_ONE = Biquaternion(1.0, 0.0, 0.0, 0.0)
BQ_I = Biquaternion(0.0, 1.0, 0.0, 0.0)
BQ_J = Biquaternion(0.0, 0.0, 1.0, 0.0)
BQ_K = Biquaternion(0.0, 0.0, 0.0, 1.0)


def biquat_mul(a: Biquaternion, b: Biquaternion) -> Biquaternion:
    """Hamilton product extended complex-bilinearly (IJ = K cyclically)."""
    return Biquaternion(
        a.u * b.u - a.v * b.v - a.w * b.w - a.z * b.z,
        a.u * b.v + a.v * b.u + a.w * b.z - a.z * b.w,
        a.u * b.w - a.v * b.z + a.w * b.u + a.z * b.v,
        a.u * b.z + a.v * b.w - a.w * b.v + a.z * b.u,
    )


def conjugate_linear_matrix(apply_map, dim: int) -> np.ndarray:
    """Matrix M with L(x) = M conj(x) for a conjugate-linear L on C^dim.

    Raises ValueError if L is not conjugate-linear or is singular.
    """
    basis = np.eye(dim, dtype=complex)
    cols = [np.asarray(apply_map(basis[k]), dtype=complex) for k in range(dim)]
    m = np.column_stack(cols)
    for k in range(dim):
        got = np.asarray(apply_map(1j * basis[k]), dtype=complex)
        if not np.allclose(got, -1j * cols[k], atol=1e-10):
            raise ValueError("map is not conjugate-linear")
    if abs(np.linalg.det(m)) < 1e-12:
        raise ValueError("conjugate-linear map is singular")
    return m


def conjugate_adjoint(apply_map, df: np.ndarray) -> np.ndarray:
    """Covector e with <e, X> = conj(<df, L(X)>) for all X, pairing a.X = sum a_k X_k.

    L must be an invertible conjugate-linear map on C^dim.
    """
    df = np.asarray(df, dtype=complex)
    m = conjugate_linear_matrix(apply_map, df.shape[0])
    # <df, M conj(X)> = (df^T M) conj(X); conjugating gives a linear functional.
    return np.conj(df @ m)


def conjugate_adjoint_gl(apply_map, df: np.ndarray) -> np.ndarray:
    """Conjugate-adjoint on gl(2,C) covectors with the trace pairing."""
    df = np.asarray(df, dtype=complex)
    out = np.zeros((2, 2), dtype=complex)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            out[j, i] = np.conj(np.trace(df @ apply_map(e)))
    return out
