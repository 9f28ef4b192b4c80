import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from acoustorque.errors import DomainError, TruncationError
from acoustorque.specfun import n_coeffs, mode_numbers
from acoustorque.transform import (
    Orientation,
    euler_angles,
    euler_to_rotation,
    rotate_expansion,
    rotation_between,
    translate_regular,
    translate_z_regular,
)
from acoustorque.wavefield import (
    AIR,
    ArrayField,
    PlaneWave,
    WaveExpansion,
    evaluate_expansion,
    plane_wave_coefficients,
    project_incident,
)

from conftest import FOUR_ELEMENT, FREQUENCY, K_AIR

angles = st.tuples(*[st.floats(-3.1, 3.1)] * 3)


def _random_expansion(rng, n_max, kind="regular"):
    c = rng.normal(size=n_coeffs(n_max)) + 1j * rng.normal(size=n_coeffs(n_max))
    return WaveExpansion(kind, n_max, K_AIR, np.zeros(3), c)


class TestEuler:
    def test_zero_is_identity(self):
        np.testing.assert_array_equal(euler_to_rotation((0, 0, 0)).rotation, np.eye(3))

    def test_thirty_degrees_about_x(self):
        R = euler_to_rotation((math.pi / 6, 0, 0)).rotation
        np.testing.assert_allclose(R @ [0, 1, 0], [0, 0.866025, 0.5], atol=1e-6)

    def test_half_turn_involution(self):
        R = euler_to_rotation((math.pi, 0, 0)).rotation
        np.testing.assert_allclose(R @ R, np.eye(3), atol=1e-14)

    def test_order_is_x_then_y_then_z(self):
        a = (0.3, -0.5, 1.1)
        R = euler_to_rotation(a).rotation
        Rx = euler_to_rotation((a[0], 0, 0)).rotation
        Ry = euler_to_rotation((0, a[1], 0)).rotation
        Rz = euler_to_rotation((0, 0, a[2])).rotation
        np.testing.assert_allclose(R, Rz @ Ry @ Rx, atol=1e-15)

    @given(a=angles)
    @settings(max_examples=50, deadline=None)
    def test_orthogonal(self, a):
        R = euler_to_rotation(a).rotation
        np.testing.assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

    @given(a=st.tuples(st.floats(-3.1, 3.1), st.floats(-1.5, 1.5), st.floats(-3.1, 3.1)))
    @settings(max_examples=50, deadline=None)
    def test_principal_angles_round_trip(self, a):
        R = euler_to_rotation(a).rotation
        np.testing.assert_allclose(euler_angles(R), a, atol=1e-9)

    def test_reference_keeps_continuity(self):
        prev = np.array([3.1, 0.0, 0.0])
        R = euler_to_rotation((3.2, 0.0, 0.0)).rotation
        np.testing.assert_allclose(euler_angles(R, prev), [3.2, 0.0, 0.0], atol=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            euler_to_rotation((np.nan, 0, 0))

    def test_rejects_improper_matrix(self):
        with pytest.raises(DomainError):
            Orientation(np.zeros(3), np.diag([1.0, 1.0, -1.0]))

    @given(a=angles)
    @settings(max_examples=30, deadline=None)
    def test_rotation_between(self, a):
        u = euler_to_rotation(a).rotation @ [0.2, -0.3, 0.9]
        for v in ([0, 0, 1], [0, 0, -1], u / np.linalg.norm(u), [1, 0, 0]):
            R = rotation_between(u, v).rotation
            np.testing.assert_allclose(R @ u / np.linalg.norm(u), v, atol=1e-12)


class TestRotation:
    def test_identity(self, rng):
        e = _random_expansion(rng, 6)
        np.testing.assert_array_equal(rotate_expansion(e, Orientation.identity()).coeffs, e.coeffs)

    @pytest.mark.parametrize("beta", [0.3, 1.2, math.pi / 2, 2.9])
    def test_tilted_plane_wave(self, beta):
        n_max = 14
        axial = plane_wave_coefficients(PlaneWave(1.0, (0, 0, 1)), K_AIR, n_max)
        tilted = plane_wave_coefficients(PlaneWave(1.0, (math.sin(beta), 0, math.cos(beta))), K_AIR, n_max)
        got = rotate_expansion(axial, euler_to_rotation((0, beta, 0)))
        np.testing.assert_allclose(got.coeffs, tilted.coeffs, atol=1e-8 * np.abs(tilted.coeffs).max())

    @given(a=angles)
    @settings(max_examples=25, deadline=None)
    def test_general_plane_wave_direction(self, a):
        o = euler_to_rotation(a)
        d = o.rotation @ [0.0, 0.0, 1.0]
        axial = plane_wave_coefficients(PlaneWave(1.0, (0, 0, 1)), K_AIR, 10)
        ref = plane_wave_coefficients(PlaneWave(1.0, d), K_AIR, 10)
        np.testing.assert_allclose(rotate_expansion(axial, o).coeffs, ref.coeffs, atol=1e-9)

    def test_field_is_rotated(self, rng):
        e = _random_expansion(rng, 7)
        o = euler_to_rotation((0.4, -1.0, 2.2))
        pts = rng.uniform(-0.004, 0.004, size=(15, 3))
        p_rot, _ = evaluate_expansion(rotate_expansion(e, o), AIR, FREQUENCY, pts)
        p_ref, _ = evaluate_expansion(e, AIR, FREQUENCY, pts @ o.rotation)  # R^T x, row-wise
        np.testing.assert_allclose(p_rot, p_ref, rtol=1e-10)

    @given(a=angles)
    @settings(max_examples=25, deadline=None)
    def test_degree_norms_invariant(self, a):
        e = _random_expansion(np.random.default_rng(3), 9)
        r = rotate_expansion(e, euler_to_rotation(a))
        n, _ = mode_numbers(9)
        before = np.bincount(n, weights=np.abs(e.coeffs) ** 2)
        after = np.bincount(n, weights=np.abs(r.coeffs) ** 2)
        np.testing.assert_allclose(after, before, rtol=1e-10)

    @given(a1=angles, a2=angles)
    @settings(max_examples=25, deadline=None)
    def test_group_law(self, a1, a2):
        e = _random_expansion(np.random.default_rng(5), 8)
        o1, o2 = euler_to_rotation(a1), euler_to_rotation(a2)
        twice = rotate_expansion(rotate_expansion(e, o1), o2)
        once = rotate_expansion(e, o2.compose(o1))
        np.testing.assert_allclose(twice.coeffs, once.coeffs, atol=1e-10 * np.abs(e.coeffs).max())

    def test_inverse(self, rng):
        e = _random_expansion(rng, 8)
        o = euler_to_rotation((1.0, 0.5, -2.0))
        back = rotate_expansion(rotate_expansion(e, o), o.inverse)
        np.testing.assert_allclose(back.coeffs, e.coeffs, atol=1e-12)


class TestTranslation:
    def test_zero_displacement(self, rng):
        e = _random_expansion(rng, 6)
        np.testing.assert_allclose(translate_z_regular(e, 0.0).coeffs, e.coeffs, atol=1e-14)

    @pytest.mark.parametrize("d", [0.001, -0.0025, 0.004])
    def test_plane_wave_phase_shift(self, d):
        # the input must itself be converged for the check on the dropped tail
        e = plane_wave_coefficients(PlaneWave(1.0, (0, 0, 1)), K_AIR, 40)
        moved = translate_z_regular(e, d).truncated(20)
        ref = e.truncated(20).coeffs * np.exp(1j * K_AIR * d)
        np.testing.assert_allclose(moved.coeffs, ref, atol=1e-8 * np.abs(ref).max())
        np.testing.assert_allclose(moved.origin, [0, 0, d])

    def test_monopole(self, rng):
        n_max = 12
        coeffs = np.zeros(n_coeffs(4), complex)
        coeffs[0] = 1.0
        e = WaveExpansion("regular", 4, K_AIR, np.zeros(3), coeffs)
        d = 0.3 / K_AIR
        moved = translate_z_regular(e, d, n_max)
        pts = rng.uniform(-1, 1, size=(20, 3)) / K_AIR
        p, _ = evaluate_expansion(moved, AIR, FREQUENCY, moved.origin + pts)
        r = np.linalg.norm(pts + [0, 0, d], axis=1)
        ref = np.sinc(K_AIR * r / np.pi) / math.sqrt(4 * math.pi)
        np.testing.assert_allclose(p, ref, atol=1e-8 * np.abs(ref).max())

    def test_composition(self, rng):
        e = _random_expansion(rng, 6)
        d1, d2 = 0.8 / K_AIR, -0.5 / K_AIR
        two = translate_z_regular(translate_z_regular(e, d1, 14), d2, 14)
        one = translate_z_regular(e, d1 + d2, 14)
        np.testing.assert_allclose(two.coeffs, one.coeffs, atol=1e-8 * np.abs(one.coeffs).max())

    def test_general_translation_matches_projection(self):
        # sources 0.1 m away keep the expansion convergent on the whole
        # ball the dropped tail is weighed on
        n_max = 12
        far = dataclasses.replace(FOUR_ELEMENT, interdistance=0.1)
        field = ArrayField(far, AIR, FREQUENCY)
        radii = (0.008, 0.010)
        base = project_incident(field.pressure, K_AIR, 30, np.zeros(3), radii)
        shift = np.array([0.0012, -0.0008, 0.0015])
        moved = translate_regular(base, shift, 30).truncated(n_max)
        ref = project_incident(field.pressure, K_AIR, n_max, shift, radii)
        assert np.abs(moved.coeffs - ref.coeffs).max() < 1e-6 * np.abs(ref.coeffs).max()
        np.testing.assert_allclose(moved.origin, shift)

    def test_nearby_sources_raise(self):
        field = ArrayField(FOUR_ELEMENT, AIR, FREQUENCY)
        base = project_incident(field.pressure, K_AIR, 24, np.zeros(3), (0.008, 0.010))
        with pytest.raises(TruncationError):
            translate_regular(base, [0.0012, -0.0008, 0.0015], 24)

    def test_general_translation_preserves_field(self, rng):
        e = plane_wave_coefficients(PlaneWave(1.0, (0.48, 0.6, 0.64)), K_AIR, 30)
        shift = np.array([-0.001, 0.002, 0.0005])
        moved = translate_regular(e, shift)
        pts = rng.uniform(-1, 1, size=(10, 3)) / K_AIR
        p, _ = evaluate_expansion(moved, AIR, FREQUENCY, moved.origin + pts)
        np.testing.assert_allclose(p, np.exp(1j * K_AIR * (shift + pts) @ [0.48, 0.6, 0.64]), rtol=1e-8)

    def test_truncation_error(self):
        e = plane_wave_coefficients(PlaneWave(1.0, (0, 0, 1)), K_AIR, 4)
        with pytest.raises(TruncationError):
            translate_z_regular(e, 0.01)

    def test_rejects_smaller_target(self, rng):
        with pytest.raises(DomainError):
            translate_z_regular(_random_expansion(rng, 6), 0.001, 4)

    def test_rejects_outgoing(self, rng):
        with pytest.raises(DomainError):
            translate_z_regular(_random_expansion(rng, 3, "outgoing"), 0.001)
