import numpy as np
import numpy.testing as npt
import pytest

from csphere import realstruct as rs
from csphere import sampling
from csphere.dynamics import hamiltonian_H, hamiltonian_J
from csphere.orbit import coords_to_matrix, matrix_to_coords, orbit_point


def test_apply_st_fixed_matrix_example():
    pt = orbit_point([1.0, 0.0, 0.0])
    out = rs.apply("St@cs2", pt)
    assert out.isclose(pt)
    npt.assert_allclose(coords_to_matrix(out), [[1j, 0], [0, 0]], atol=1e-15)


def test_ut_coordinate_action():
    r = sampling.rng(0)
    for _ in range(20):
        pt = orbit_point(sampling.cs2_coords(r))
        out = rs.apply("Ut@cs2", pt)
        assert out.x == pytest.approx(np.conj(pt.x))
        assert out.y == pytest.approx(np.conj(pt.y))
        assert out.z == pytest.approx(-np.conj(pt.z))


def test_reduced_maps_match_matrix_conjugations():
    """Coordinate formulas against the matrix-level involutions."""
    from csphere.algebra import UNIT_I, UNIT_J, UNIT_K

    mat_maps = {
        "Rt@cs2": lambda xi: -UNIT_K @ xi.T @ UNIT_K,
        "St@cs2": lambda xi: -np.conj(xi.T),
        "Tt@cs2": lambda xi: UNIT_I @ np.conj(xi.T) @ UNIT_I,
        "Ut@cs2": lambda xi: UNIT_I @ np.conj(xi) @ UNIT_I,
        "Rt@ics2": lambda xi: np.conj(xi),
        "St@ics2": lambda xi: np.conj(xi.T),
        "Tt@ics2": lambda xi: -UNIT_J @ np.conj(xi.T) @ UNIT_J,
        "Ut@ics2": lambda xi: -UNIT_K @ xi.T @ UNIT_K,
    }
    r = sampling.rng(1)
    for rid, mat_map in mat_maps.items():
        zeta = 1j if rid.endswith("@cs2") else -1.0
        for _ in range(20):
            coords = (sampling.cs2_coords(r) if zeta == 1j
                      else sampling.ics2_coords(r))
            pt = orbit_point(coords, zeta=zeta)
            via_coords = rs.apply(rid, pt)
            via_matrix = matrix_to_coords(mat_map(coords_to_matrix(pt)))
            assert via_coords.isclose(via_matrix, tol=1e-12), rid


def test_involutivity_catalogue():
    r = sampling.rng(2)
    for rid in rs.CATALOGUE:
        rep = rs.check_involution(rid, 100, r)
        assert rep.passed, (rid, rep.max_residual)


def test_linearity_catalogue():
    r = sampling.rng(3)
    for rid, inv in rs.CATALOGUE.items():
        if inv.linearity == "real":
            continue
        rep = rs.check_linearity(rid, 30, r)
        assert rep.passed, (rid, rep.max_residual)


EXPECTED_CLASSES = {
    "R@phase-I": rs.CLASS_IMAG, "R@phase-J": rs.CLASS_REAL, "R@phase-K": rs.CLASS_ANTI,
    "S@phase-I": rs.CLASS_ANTI, "S@phase-J": rs.CLASS_IMAG, "S@phase-K": rs.CLASS_REAL,
    "T@phase-I": rs.CLASS_ANTI, "T@phase-J": rs.CLASS_IMAG, "T@phase-K": rs.CLASS_REAL,
    "U@phase-I": rs.CLASS_REAL, "U@phase-J": rs.CLASS_ANTI, "U@phase-K": rs.CLASS_IMAG,
    "Rt@cs2": rs.CLASS_ANTI, "St@cs2": rs.CLASS_REAL, "Tt@cs2": rs.CLASS_REAL,
    "Ut@cs2": rs.CLASS_IMAG,
    "Rt@ics2": rs.CLASS_REAL, "St@ics2": rs.CLASS_IMAG, "Tt@ics2": rs.CLASS_IMAG,
    "Ut@ics2": rs.CLASS_ANTI,
    "S@tcp1": rs.CLASS_ANTI, "T@tcp1": rs.CLASS_ANTI, "U@tcp1": rs.CLASS_REAL,
    "Sigma@product": rs.CLASS_REAL, "Upsilon@product": rs.CLASS_IMAG,
}


def test_classifications():
    r = sampling.rng(4)
    for rid, expected in EXPECTED_CLASSES.items():
        res = rs.classify_symplectic(rid, 25, r)
        assert res["classification"] == expected, (rid, res)
        assert res["matches_claim"], rid
        assert res["residuals"][expected] < 1e-9


def test_descent_consistency():
    r = sampling.rng(5)
    for prid, rrid, level in rs.DESCENT_PAIRS:
        rep = rs.check_descent(prid, rrid, level, 60, r)
        assert rep.passed, (rep.rid, rep.max_residual)
    for prid, trid in rs.COTANGENT_DESCENT_PAIRS:
        rep = rs.check_descent_cotangent(prid, trid, 60, r)
        assert rep.passed, (rep.rid, rep.max_residual)


def test_biquaternion_rows_agree_up_to_circle():
    """All three basis expressions of one family give the same biquaternion
    involution up to a constant circle phase."""
    from csphere.phase import biquat_to_phase, phase_to_biquat

    fams = {
        "R": ("R@phase-I", "R@phase-J", "R@phase-K"),
        "S": ("S@phase-I", "S@phase-J", "S@phase-K"),
        "T": ("T@phase-I", "T@phase-J", "T@phase-K"),
        "U": ("U@phase-I", "U@phase-J", "U@phase-K"),
    }
    r = sampling.rng(6)
    for fam, rids in fams.items():
        maps = []
        for rid, axis in zip(rids, "IJK"):
            fn = rs.CATALOGUE[rid].func
            maps.append(lambda b, fn=fn, axis=axis: phase_to_biquat(
                fn(biquat_to_phase(b, axis)), axis))
        ref = sampling.biquaternion(r)
        out0 = np.array(maps[0](ref).coeffs())
        for other in maps[1:]:
            out = np.array(other(ref).coeffs())
            k = int(np.argmax(np.abs(out0)))
            phase = out0[k] / out[k]
            assert abs(abs(phase) - 1) < 1e-12, fam
            for _ in range(20):
                b = sampling.biquaternion(r)
                a0 = np.array(maps[0](b).coeffs())
                a1 = phase * np.array(other(b).coeffs())
                npt.assert_allclose(a0, a1, atol=1e-12, err_msg=fam)


def test_fixed_sets_satisfy_variety_equations():
    r = sampling.rng(7)
    for rid, inv in rs.CATALOGUE.items():
        if inv.fixed_label is None or inv.space in ("gl", "gl1"):
            continue
        for _ in range(30):
            pt = rs.sample_fixed(rid, r)
            assert rs.fixed_residual(rid, pt) < 1e-10, rid


def test_fixed_set_defining_equations_by_label():
    r = sampling.rng(8)
    for _ in range(20):
        pt = rs.sample_fixed("St@cs2", r)       # real unit sphere
        c = pt.coords()
        assert np.max(np.abs(c.imag)) < 1e-12
        assert np.linalg.norm(c.real) == pytest.approx(1.0, abs=1e-12)
        pt = rs.sample_fixed("Tt@cs2", r)       # two-sheeted hyperboloid
        assert abs(pt.x.imag) < 1e-12 and abs(pt.x.real) >= 1.0 - 1e-12
        assert abs(pt.y.real) < 1e-12 and abs(pt.z.real) < 1e-12
        pt = rs.sample_fixed("Rt@ics2", r)      # one-sheeted hyperboloid
        assert abs(pt.x.real) < 1e-12 and abs(pt.y.imag) < 1e-12
        assert abs(pt.z.real) < 1e-12
        assert (pt.x.imag ** 2 + pt.z.imag ** 2
                - pt.y.real ** 2) == pytest.approx(1.0, abs=1e-12)
    # membership of fix(Upsilon): pairs (xi, Ut xi)
    for _ in range(10):
        a, b = rs.sample_fixed("Upsilon@product", r)
        assert b.isclose(rs.apply("Ut@cs2", a), tol=1e-12)


def test_project_to_fixed():
    r = sampling.rng(9)
    pt = rs.sample_fixed("St@cs2", r)
    assert rs.project_to_fixed("St@cs2", pt).isclose(pt, tol=1e-12)
    moved = orbit_point(pt.coords() + 1e-3 * sampling.complex_normal(r, (3,)))
    from csphere.realstruct import _rescale_orbit

    moved = _rescale_orbit(moved)
    proj = rs.project_to_fixed("St@cs2", moved)
    assert rs.fixed_residual("St@cs2", proj) < 1e-6
    assert proj.membership_residual() < 1e-12
    # fibre-pair projection must respect the circle phase
    pt = rs.sample_fixed("T@tcp1", r)
    out = rs.project_to_fixed("T@tcp1", pt)
    assert pt.phase_distance(out) < 1e-10


def test_real_poisson():
    r = sampling.rng(10)
    for rid in ("Rt@gl", "St@gl", "Tt@gl"):
        rep = rs.check_real_poisson(rid, 60, r)
        assert rep.passed, rep.rid
    neg = rs.check_real_poisson_negative(60, r)
    assert neg.passed and neg.expect_fail
    assert neg.max_residual > 1e-3


def test_equivariance():
    r = sampling.rng(11)
    for a, b in rs.EQUIVARIANCE_PAIRS:
        rep = rs.check_equivariance(a, b, 100, r)
        assert rep.passed, (a, b)
    neg = rs.check_equivariance("S@phase-K", "rho@gl1", 100, r, expect_fail=True)
    assert neg.passed
    assert neg.max_residual > 1e-3


def _product_sample(r):
    from csphere.dynamics import ProductPoint, radicand

    while True:
        pt = ProductPoint(orbit_point(sampling.cs2_coords(r)),
                          orbit_point(sampling.cs2_coords(r)))
        if abs(radicand(pt.coords())) > 1e-2:
            return pt


def test_momentum_compatibility():
    r = sampling.rng(12)
    emap = lambda pt: (hamiltonian_H(pt), hamiltonian_J(pt))
    rep = rs.check_momentum_compat(
        emap, "Sigma@product", lambda hj: (np.conj(hj[0]), -np.conj(hj[1])),
        100, r, _product_sample)
    assert rep.passed
    rep = rs.check_momentum_compat(
        emap, "Upsilon@product", lambda hj: (np.conj(hj[0]), np.conj(hj[1])),
        100, r, _product_sample)
    assert rep.passed
    # identity involution with conjugation on a real-valued map
    real_map = lambda pt: (abs(pt[0].x) ** 2,)
    rs.CATALOGUE["__ident"] = rs.Involution("__ident", "product", lambda p: p, "real")
    try:
        rep = rs.check_momentum_compat(real_map, "__ident",
                                       lambda v: (np.conj(v[0]),), 50, r,
                                       _product_sample)
        assert rep.passed
    finally:
        del rs.CATALOGUE["__ident"]


def test_momentum_compat_negative():
    r = sampling.rng(13)
    emap = lambda pt: (hamiltonian_H(pt), hamiltonian_J(pt))
    rep = rs.check_momentum_compat(
        emap, "Sigma@product", lambda hj: (np.conj(hj[0]), np.conj(hj[1])),
        50, r, _product_sample)
    assert not rep.passed          # wrong sign on the second component


def test_realify_integrals():
    r = sampling.rng(14)
    # J realified over Sigma vanishes identically (sign cancellation)
    g = rs.realify(hamiltonian_J, "Sigma@product")
    for _ in range(20):
        pair = rs.sample_fixed("Sigma@product", r)
        val = g(pair)
        assert abs(val) < 1e-12
    # H realified over Upsilon doubles on the fixed set
    g = rs.realify(hamiltonian_H, "Upsilon@product")
    for _ in range(20):
        pair = rs.sample_fixed("Upsilon@product", r)
        val = g(pair)
        assert abs(val.imag) < 1e-12
        assert val.real == pytest.approx(2 * hamiltonian_H(pair).real, abs=1e-10)
    # a map already real on the fixed set doubles there
    f = lambda pt: (pt[0].x * np.conj(pt[0].x)).real
    g = rs.realify(f, "Sigma@product")
    for _ in range(10):
        pair = rs.sample_fixed("Sigma@product", r)
        assert g(pair) == pytest.approx(2 * f(pair), abs=1e-12)


def test_fix_upsilon_membership_formula():
    r = sampling.rng(15)
    for _ in range(20):
        a = orbit_point(sampling.cs2_coords(r))
        pair = (a, rs.apply("Ut@cs2", a))
        assert rs.is_fixed("Upsilon@product", pair, tol=1e-12)
        wrong = (a, a)
        if abs(a.z.real) > 1e-3:
            assert not rs.is_fixed("Upsilon@product", wrong, tol=1e-6)
