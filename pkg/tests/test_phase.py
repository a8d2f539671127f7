import numpy as np
import numpy.testing as npt
import pytest

from csphere import sampling
from csphere.algebra import UNIT_I, Biquaternion
from csphere.phase import (AXES, PhasePoint, biquat_to_phase, canonical_bracket,
                           gl1_action, momentum_P, mu123, mu123_via_axis,
                           mu_trace, omega, phase_point, phase_to_biquat,
                           su2_action)

E1 = np.array([1.0, 0.0], dtype=complex)
E2 = np.array([0.0, 1.0], dtype=complex)
ZERO = np.zeros(2, dtype=complex)


def test_omega_canonical_pairing():
    assert omega(PhasePoint(E1, ZERO), PhasePoint(ZERO, E1)) == pytest.approx(1.0)


def test_omega_antisymmetry():
    r = sampling.rng(0)
    for _ in range(50):
        v = sampling.phase_point(r)
        w = sampling.phase_point(r)
        assert omega(v, v) == pytest.approx(0.0, abs=1e-15)
        assert omega(v, w) == pytest.approx(-omega(w, v), abs=1e-13)


def test_omega_hand_expansion():
    # ((e1, i e2), (e2, e1)): p2.q1 - p1.q2 = 1 - i
    v1 = PhasePoint(E1, 1j * E2)
    v2 = PhasePoint(E2, E1)
    assert omega(v1, v2) == pytest.approx(1 - 1j)


def test_gl1_action_basics():
    pt = phase_point([1, 0], [1, 0])
    out = gl1_action(2.0, pt)
    npt.assert_allclose(out.q, [2, 0])
    npt.assert_allclose(out.p, [0.5, 0])
    assert gl1_action(1.0, pt).isclose(pt)
    with pytest.raises(ValueError):
        gl1_action(0.0, pt)


def test_gl1_preserves_omega():
    r = sampling.rng(1)
    for _ in range(100):
        g = sampling.nonzero_scalar(r)
        v, w = sampling.phase_point(r), sampling.phase_point(r)
        assert abs(omega(gl1_action(g, v), gl1_action(g, w)) - omega(v, w)) < 1e-12


def test_su2_action_basics():
    pt = phase_point([1, 0], [0, 1])
    out = su2_action(UNIT_I, pt)
    npt.assert_allclose(out.q, [1j, 0])
    npt.assert_allclose(out.p, [0, 1j])
    with pytest.raises(ValueError):
        su2_action(np.array([[2.0, 0], [0, 0.5]]), pt)
    with pytest.raises(ValueError):
        su2_action(np.diag([1j, 1j]), pt)   # unitary but det = -1


def test_su2_preserves_structures():
    r = sampling.rng(2)
    for _ in range(100):
        g = sampling.su2(r)
        v = sampling.phase_point(r)
        w = sampling.phase_point(r)
        gv, gw = su2_action(g, v), su2_action(g, w)
        assert abs(omega(gv, gw) - omega(v, w)) < 1e-12
        assert np.linalg.norm(gv.q) == pytest.approx(np.linalg.norm(v.q), abs=1e-12)
        assert np.linalg.norm(gv.p) == pytest.approx(np.linalg.norm(v.p), abs=1e-12)
        b = phase_to_biquat(v, "I")
        gb = phase_to_biquat(gv, "I")
        npt.assert_allclose(mu123(gb), mu123(b), atol=1e-12)


def test_momentum_map_values():
    npt.assert_allclose(momentum_P(phase_point([1, 0], [0, 1])),
                        [[0, 1], [0, 0]], atol=1e-15)
    npt.assert_allclose(momentum_P(phase_point([1, 0], [1j, 0])),
                        [[1j, 0], [0, 0]], atol=1e-15)


def test_momentum_map_rank_one_and_trace():
    r = sampling.rng(3)
    for _ in range(100):
        v = sampling.phase_point(r)
        m = momentum_P(v)
        assert abs(np.linalg.det(m)) < 1e-12 * max(1.0, np.max(np.abs(m)) ** 2)
        assert np.trace(m) == pytest.approx(mu_trace(v), abs=1e-13)


def test_momentum_equivariance():
    r = sampling.rng(4)
    for _ in range(100):
        v = sampling.phase_point(r)
        g = sampling.nonzero_scalar(r)
        npt.assert_allclose(momentum_P(gl1_action(g, v)), momentum_P(v), atol=1e-10)
        u = sampling.su2(r)
        npt.assert_allclose(momentum_P(su2_action(u, v)),
                            u @ momentum_P(v) @ np.conj(u.T), atol=1e-10)


def test_mu_trace_values():
    assert mu_trace(phase_point([1, 0], [1j, 0])) == pytest.approx(1j)
    assert mu_trace(phase_point([1, 0], [0, 1])) == pytest.approx(0.0)


def test_biquat_identification_reference_values():
    b = Biquaternion(1.0, 0.0, 0.0, 0.0)
    pt = biquat_to_phase(b, "I")
    s = np.sqrt(2.0)
    npt.assert_allclose(pt.q, [1 / s, 0])
    npt.assert_allclose(pt.p, [0, -1 / s])


def test_biquat_roundtrip_and_metric():
    r = sampling.rng(5)
    for _ in range(200):
        b = sampling.biquaternion(r)
        for axis in AXES:
            pt = biquat_to_phase(b, axis)
            back = phase_to_biquat(pt, axis)
            assert back.isclose(b, tol=1e-13)
            norm = float(np.vdot(pt.q, pt.q).real + np.vdot(pt.p, pt.p).real)
            assert norm == pytest.approx(b.gamma, abs=1e-12)


def test_circle_action_in_every_identification():
    r = sampling.rng(6)
    for _ in range(50):
        b = sampling.biquaternion(r)
        th = float(r.uniform(0, 2 * np.pi))
        rotated = np.exp(1j * th) * b
        for axis in AXES:
            pt = biquat_to_phase(b, axis)
            pt_rot = biquat_to_phase(rotated, axis)
            npt.assert_allclose(pt_rot.q, np.exp(1j * th) * pt.q, atol=1e-12)
            npt.assert_allclose(pt_rot.p, np.exp(-1j * th) * pt.p, atol=1e-12)


def test_mu123_reference_level():
    # I-basis image q = (1,0), p = 0 sits on the (i, 0, 0) level
    b = phase_to_biquat(phase_point([1, 0], [0, 0]), "I")
    mu = mu123(b)
    npt.assert_allclose(mu, [1j, 0, 0], atol=1e-14)
    assert mu123(Biquaternion(0, 0, 0, 0)) == (0, 0, 0)


def test_mu123_basis_independence_pins_cycle():
    r = sampling.rng(7)
    worst = 0.0
    for _ in range(1000):
        b = sampling.biquaternion(r)
        m0 = np.array(mu123(b))
        for axis in AXES:
            worst = max(worst, float(np.max(np.abs(
                np.array(mu123_via_axis(b, axis)) - m0))))
    assert worst < 1e-12


def test_wrong_cycle_breaks_independence():
    # swapping the J and K identifications must break the cross-basis triple
    from csphere import phase as ph

    r = sampling.rng(8)
    b = sampling.biquaternion(r)
    swapped = {"I": (0, 1, 2), "J": (2, 0, 1), "K": (1, 2, 0)}
    orig = ph._CYCLE.copy()
    try:
        ph._CYCLE.update(swapped)
        m0 = np.array(mu123(b))
        diffs = [np.max(np.abs(np.array(mu123_via_axis(b, a)) - m0)) for a in AXES]
        assert max(diffs) > 1e-2
    finally:
        ph._CYCLE.update(orig)


def test_canonical_bracket_reference():
    # {q1 p1, p2 q2-free test}: independent coordinates commute
    f = lambda c: c[0] * c[2]        # q1 p1
    g = lambda c: c[1] * c[3]        # q2 p2
    r = sampling.rng(9)
    pt = sampling.phase_point(r)
    assert canonical_bracket(f, g, pt) == pytest.approx(0.0, abs=1e-14)
    # {q1, p1} = 1
    assert canonical_bracket(lambda c: c[0], lambda c: c[2], pt) == pytest.approx(1.0)
