import math

import numpy as np
import numpy.testing as npt
import pytest

from csphere import sampling
from csphere.orbit import (CotangentPoint, MembershipError, bundle_map,
                           coord_x, coord_y, coord_z, coords_to_matrix,
                           eta_norm_sq, kinetic_calibration, kks_bracket,
                           lift_to_level, matrix_to_coords, omega_cotangent,
                           omega_kks, orbit_invariant, orbit_point,
                           orbit_tangent_basis, phi, reduce_to_cotangent,
                           reduce_to_sphere, structure_constant, coord_norm_sq)
from csphere.phase import gl1_action, momentum_P, phase_point


def rand_cs2(r):
    return orbit_point(sampling.cs2_coords(r))


def test_coords_to_matrix_reference():
    xi = coords_to_matrix(orbit_point([1.0, 0.0, 0.0]))
    npt.assert_allclose(xi, [[1j, 0], [0, 0]], atol=1e-15)


def test_matrix_roundtrip_and_cone():
    r = sampling.rng(0)
    for _ in range(100):
        pt = rand_cs2(r)
        xi = coords_to_matrix(pt)
        det = xi[0, 0] * xi[1, 1] - xi[0, 1] * xi[1, 0]
        assert abs(det) < 1e-12
        assert np.trace(xi) == pytest.approx(pt.zeta, abs=1e-13)
        back = matrix_to_coords(xi)
        assert back.isclose(pt, tol=1e-13)


def test_membership_rejected():
    with pytest.raises(MembershipError):
        coords_to_matrix(orbit_point([1.0, 1.0, 1.0]))
    with pytest.raises(MembershipError):
        matrix_to_coords(np.eye(2, dtype=complex))


def test_kks_trace_casimir_exact():
    r = sampling.rng(1)
    trace2 = lambda m: m[0][0] + m[1][1]
    for _ in range(25):
        xi = sampling.complex_normal(r, (2, 2))
        a = sampling.complex_normal(r, (2, 2))
        f = lambda m: (a[0, 0] * m[0][0] + a[0, 1] * m[0][1] ** 2
                       + a[1, 0] * m[1][0] + a[1, 1] * m[1][1])
        assert abs(kks_bracket(trace2, f, xi)) < 1e-14


def test_kks_det_casimir():
    r = sampling.rng(2)
    det2 = lambda m: m[0][0] * m[1][1] - m[0][1] * m[1][0]
    for _ in range(25):
        xi = sampling.complex_normal(r, (2, 2))
        a = sampling.complex_normal(r, (2, 2))
        f = lambda m: a[0, 0] * m[0][0] * m[1][1] + a[0, 1] * m[0][1] + a[1, 1] * m[1][0]
        assert abs(kks_bracket(det2, f, xi)) < 1e-10


def test_structure_constant_frozen_value():
    # derived by hand from the matrix parametrization; also the bracket oracle
    assert structure_constant() == pytest.approx(-2.0, abs=1e-12)


def test_structure_constant_consistency():
    r = sampling.rng(3)
    c = structure_constant()
    cycle = ((coord_x, coord_y, coord_z), (coord_y, coord_z, coord_x),
             (coord_z, coord_x, coord_y))
    for _ in range(100):
        pt = rand_cs2(r)
        xi = coords_to_matrix(pt)
        m = [[xi[0, 0], xi[0, 1]], [xi[1, 0], xi[1, 1]]]
        for f, g, h in cycle:
            assert kks_bracket(f, g, xi) == pytest.approx(c * h(m), abs=1e-12)
            assert kks_bracket(g, f, xi) == pytest.approx(-c * h(m), abs=1e-12)


def test_kks_casimir_of_coordinates():
    # x^2 + y^2 + z^2 brackets to zero with each coordinate
    r = sampling.rng(4)
    cas = lambda m: (coord_x(m) ** 2 + coord_y(m) ** 2 + coord_z(m) ** 2)
    for _ in range(20):
        xi = coords_to_matrix(rand_cs2(r))
        for f in (coord_x, coord_y, coord_z):
            assert abs(kks_bracket(cas, f, xi)) < 1e-12


def test_kks_jacobi_numeric():
    r = sampling.rng(5)
    worst = 0.0
    for _ in range(20):
        xi = sampling.complex_normal(r, (2, 2))
        mats = [sampling.complex_normal(r, (2, 2)) for _ in range(3)]

        def quad(a):
            return lambda m: (a[0, 0] * m[0][0] * m[1][1] + a[0, 1] * m[0][1]
                              + a[1, 0] * m[1][0] * m[0][0] + a[1, 1] * m[1][1] ** 2)

        f, g, h = (quad(a) for a in mats)
        total = (kks_bracket(lambda m: kks_bracket(f, g, np.array(m, dtype=object)), h, xi)
                 + kks_bracket(lambda m: kks_bracket(g, h, np.array(m, dtype=object)), f, xi)
                 + kks_bracket(lambda m: kks_bracket(h, f, np.array(m, dtype=object)), g, xi))
        worst = max(worst, abs(total))
    assert worst < 1e-8


def test_reduce_to_cotangent_examples():
    out = reduce_to_cotangent(phase_point([2, 0], [0, 3]))
    npt.assert_allclose(out.q, [1, 0], atol=1e-15)
    npt.assert_allclose(out.p, [0, 6], atol=1e-15)
    zero_sec = reduce_to_cotangent(phase_point([1, 0], [0, 0]))
    npt.assert_allclose(zero_sec.p, [0, 0], atol=1e-15)
    with pytest.raises(MembershipError):
        reduce_to_cotangent(phase_point([0, 0], [1, 0]))
    with pytest.raises(MembershipError):
        reduce_to_cotangent(phase_point([1, 0], [1, 0]))


def test_reduce_to_cotangent_orbit_invariance():
    r = sampling.rng(6)
    for _ in range(50):
        pt = sampling.level_phase_point(r, 0.0)
        g = sampling.nonzero_scalar(r)
        a = reduce_to_cotangent(pt)
        b = reduce_to_cotangent(gl1_action(g, pt))
        assert a.phase_distance(b) < 1e-12


def test_reduce_to_sphere_examples():
    out = reduce_to_sphere(phase_point([1, 0], [1j, 0]), 1j)
    npt.assert_allclose([out.x, out.y, out.z], [1, 0, 0], atol=1e-14)
    with pytest.raises(MembershipError):
        reduce_to_sphere(phase_point([1, 0], [1j, 0]), -1.0)


def test_reduce_to_sphere_invariance_and_membership():
    r = sampling.rng(7)
    for _ in range(50):
        pt = sampling.level_phase_point(r, 1j)
        g = sampling.nonzero_scalar(r)
        a = reduce_to_sphere(pt, 1j)
        b = reduce_to_sphere(gl1_action(g, pt), 1j)
        assert np.max(np.abs(a.coords() - b.coords())) < 1e-12
        assert a.membership_residual() < 1e-12


def test_lift_to_level():
    r = sampling.rng(8)
    for _ in range(50):
        pt = rand_cs2(r)
        q, p = lift_to_level(pt)
        npt.assert_allclose(np.outer(q, p), coords_to_matrix(pt), atol=1e-12)
        assert complex(p @ q) == pytest.approx(1j, abs=1e-12)
        assert np.linalg.norm(q) == pytest.approx(np.linalg.norm(p), abs=1e-12)


def test_phi_zero_momentum_at_real_pole():
    cot = phi(orbit_point([0.0, 0.0, 1.0]))
    assert eta_norm_sq(cot) == pytest.approx(0.0, abs=1e-12)


def test_phi_lift_independent():
    # the lift has a residual circle phase; phi must not see it
    r = sampling.rng(9)
    for _ in range(25):
        pt = rand_cs2(r)
        qp = lift_to_level(pt)
        th = float(r.uniform(0, 2 * np.pi))
        from csphere.orbit import reduce_to_cotangent as red
        from csphere.phase import PhasePoint, biquat_to_phase, phase_to_biquat
        from csphere.orbit import ALIGN_W

        rotated = PhasePoint(np.exp(1j * th) * qp.q, np.exp(-1j * th) * qp.p)
        b = phase_to_biquat(rotated, "K")
        qi, pi = biquat_to_phase(b, "I")
        winv = np.conj(ALIGN_W.T)
        other = red(PhasePoint(winv @ qi, np.conj(winv) @ pi))
        assert phi(pt).phase_distance(other) < 1e-9


def test_phi_injective_on_samples():
    r = sampling.rng(10)
    pts = [rand_cs2(r) for _ in range(40)]
    images = [phi(p) for p in pts]
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            sep = np.max(np.abs(pts[i].coords() - pts[j].coords()))
            if sep > 1e-3:
                assert images[i].phase_distance(images[j]) > 1e-8


def test_invariant_generators_reference():
    zero_sec = CotangentPoint(np.array([1.0, 0.0], dtype=complex),
                              np.zeros(2, dtype=complex))
    assert eta_norm_sq(zero_sec) == 0.0
    assert orbit_invariant(orbit_point([1.0, 0.0, 0.0])) == pytest.approx(1.0)


def test_calibration_fit():
    cal = kinetic_calibration()
    assert cal.max_residual < 1e-9
    # derived: slope 2, intercept -2 under this library's normalizations
    assert cal.slope == pytest.approx(2.0, abs=1e-6)
    assert cal.intercept == pytest.approx(-2.0, abs=1e-6)


def test_bundle_map_values_and_norm():
    npt.assert_allclose(bundle_map(orbit_point([0, 0, 1.0])), [0, 0, 1])
    npt.assert_allclose(bundle_map(orbit_point([1.0, 0, 0])), [1, 0, 0])
    r = sampling.rng(11)
    for _ in range(100):
        v = bundle_map(rand_cs2(r))
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)


def test_omega_kks_vs_bracket():
    # the tangent-space formula reproduces brackets of coordinate functions
    r = sampling.rng(12)
    c = structure_constant()
    for _ in range(20):
        pt = rand_cs2(r)
        x = pt.coords()
        # hamiltonian fields of x and y: V_f = c (grad f x xvec)
        vx = c * np.cross([1, 0, 0], x)
        vy = c * np.cross([0, 1, 0], x)
        assert omega_kks(pt, vx, vy) == pytest.approx(c * x[2], abs=1e-12)


def test_tangent_basis():
    r = sampling.rng(13)
    for _ in range(20):
        pt = rand_cs2(r)
        t1, t2 = orbit_tangent_basis(pt)
        assert abs(pt.coords() @ t1) < 1e-12
        assert abs(pt.coords() @ t2) < 1e-12
