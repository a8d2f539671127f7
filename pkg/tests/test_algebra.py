import numpy as np
import numpy.testing as npt
import pytest

from csphere import duals, sampling
from csphere.algebra import (BQ_I, BQ_J, BQ_K, BQ_ONE, IDENT2, Biquaternion,
                             UNIT_I, UNIT_J, UNIT_K, biquat_mul,
                             conjugate_adjoint, conjugate_adjoint_gl,
                             conjugate_linear_matrix, pauli_basis, trace_pairing)


def test_pauli_basis_values():
    mi, mj, mk = pauli_basis()
    npt.assert_allclose(mi, np.diag([1j, -1j]))
    npt.assert_allclose(mj, np.array([[0, 1], [-1, 0]]))
    npt.assert_allclose(mk, np.array([[0, 1j], [1j, 0]]))


def test_quaternion_relations():
    mi, mj, mk = pauli_basis()
    for a, b, c in ((mi, mj, mk), (mj, mk, mi), (mk, mi, mj)):
        npt.assert_allclose(a @ b, c, atol=1e-14)
        npt.assert_allclose(a @ a, -IDENT2, atol=1e-14)
        npt.assert_allclose(b @ a, -c, atol=1e-14)


def test_trace_pairing_gram_invertible():
    basis = [IDENT2, UNIT_I, UNIT_J, UNIT_K]
    gram = np.array([[trace_pairing(a, b) for b in basis] for a in basis])
    # diagonal (2, -2, -2, -2), off-diagonal zero
    npt.assert_allclose(gram, np.diag([2, -2, -2, -2]), atol=1e-14)
    assert abs(np.linalg.det(gram)) > 1


def test_biquat_units_multiply():
    assert (BQ_I * BQ_J).isclose(BQ_K)
    assert (BQ_J * BQ_K).isclose(BQ_I)
    assert (BQ_K * BQ_I).isclose(BQ_J)
    assert (BQ_I * BQ_I).isclose(-1.0 * BQ_ONE)


def test_unit_law():
    r = sampling.rng(7)
    b = sampling.biquaternion(r)
    assert (BQ_ONE * b).isclose(b)
    assert (b * BQ_ONE).isclose(b)


def test_complex_coefficient_square():
    # (iI)(iI) = i^2 I^2 = +1
    ii = 1j * BQ_I
    assert (ii * ii).isclose(BQ_ONE)


def test_product_matches_matrix_representation():
    r = sampling.rng(11)
    worst = 0.0
    for _ in range(1000):
        a = sampling.biquaternion(r)
        b = sampling.biquaternion(r)
        lhs = (a * b).to_matrix()
        rhs = a.to_matrix() @ b.to_matrix()
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    assert worst < 1e-12


def test_gamma_norm():
    b = Biquaternion(1.0, 2j, 0.0, -1.0)
    assert b.gamma == pytest.approx(1 + 4 + 0 + 1)
    assert Biquaternion(0, 0, 0, 0).gamma == 0.0


def test_conjugate_adjoint_entrywise_conjugation():
    conj_map = np.conj
    npt.assert_allclose(conjugate_adjoint(conj_map, np.array([1.0, 0.0])),
                        [1.0, 0.0], atol=1e-14)
    npt.assert_allclose(conjugate_adjoint(conj_map, np.array([1j, 0.0])),
                        [-1j, 0.0], atol=1e-14)


def test_conjugate_adjoint_against_basis_oracle():
    # L(q) = UNIT_I conj(q); expected covector from evaluating both sides
    lmap = lambda q: UNIT_I @ np.conj(q)
    r = sampling.rng(3)
    df = sampling.complex_normal(r, (2,))
    got = conjugate_adjoint(lmap, df)
    for k, e in enumerate(np.eye(2, dtype=complex)):
        want = np.conj(df @ lmap(e))
        assert got[k] == pytest.approx(want, abs=1e-14)


def test_conjugate_adjoint_rejects_singular_and_linear():
    with pytest.raises(ValueError):
        conjugate_linear_matrix(lambda q: 0.0 * np.conj(q), 2)
    with pytest.raises(ValueError):
        conjugate_linear_matrix(lambda q: q, 2)


def test_conjugate_adjoint_gl_defining_identity():
    r = sampling.rng(5)
    amap = lambda xi: -np.conj(xi.T)
    df = sampling.complex_normal(r, (2, 2))
    adj = conjugate_adjoint_gl(amap, df)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            lhs = np.trace(adj @ e)
            rhs = np.conj(np.trace(df @ amap(e)))
            assert lhs == pytest.approx(rhs, abs=1e-13)


def test_dual_arithmetic_and_sqrt():
    x = duals.Dual(4.0, 1.0)
    y = duals.sqrt(x)
    assert y.val == pytest.approx(2.0)
    assert y.eps == pytest.approx(0.25)
    z = duals.Dual(1.0 + 1j, 1.0)
    w = (z * z + 3.0) / z
    # d/dz (z + 3/z) = 1 - 3/z^2
    assert w.eps == pytest.approx(1 - 3 / (1 + 1j) ** 2)


def test_dual_nested_second_derivative():
    # f(x) = x^3: f''(2) = 12, via nested duals
    inner = duals.Dual(duals.Dual(2.0, 1.0), duals.Dual(1.0, 0.0))
    out = inner * inner * inner
    assert out.eps.eps == pytest.approx(12.0)
