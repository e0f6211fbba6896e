import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gvf_formation.dynamics import VehicleState, step
from gvf_formation.errors import SingularPointError
from gvf_formation.gvf import (
    GvfParams,
    ImplicitCurve,
    bank_angle,
    build_field,
    field_turn_rate,
    gradient,
    hessian,
    level_error,
    max_yaw_rate,
    rotation,
    saturate_yaw_rate,
    yaw_rate_command,
)
from oracles import fd_gradient, fd_hessian, fd_jacobian, fd_turn_rate, random_annulus_points

CCW = GvfParams(k_e=1.0, k_d=1.0, rotation_sense="counterclockwise")
coords = st.floats(-500, 500, allow_nan=False)


def unit_circle():
    return ImplicitCurve.circle((0, 0), 1.0)


class TestCurves:
    def test_invalid_radius(self):
        with pytest.raises(ValueError):
            ImplicitCurve.circle((0, 0), 0.0)
        with pytest.raises(ValueError):
            ImplicitCurve.ellipse((0, 0), 1.0, -2.0)

    @pytest.mark.parametrize("r, p, expected", [
        (30.0, (30.0, 0.0), 0.0),
        (30.0, (0.0, 0.0), -900.0),
        (2.0, (3.0, 4.0), 21.0),
    ])
    def test_level_error_examples(self, r, p, expected):
        assert level_error(ImplicitCurve.circle((0, 0), r), p) == expected

    def test_level_error_offset_center(self):
        c = ImplicitCurve.circle((10.0, -5.0), 2.0)
        assert level_error(c, (13.0, -1.0)) == 21.0

    @pytest.mark.parametrize("p, expected", [
        ((1.0, 2.0), (2.0, 4.0)),
        ((0.0, 0.0), (0.0, 0.0)),
        ((-3.0, 0.0), (-6.0, 0.0)),
    ])
    def test_gradient_examples(self, p, expected):
        for r in (0.5, 30.0):
            np.testing.assert_array_equal(gradient(ImplicitCurve.circle((0, 0), r), p), expected)

    def test_circle_hessian(self):
        c = ImplicitCurve.circle((4, 4), 30.0)
        for p in [(0, 0), (100, -3), (4, 4)]:
            np.testing.assert_array_equal(hessian(c, p), [[2.0, 0.0], [0.0, 2.0]])

    def test_axis_aligned_ellipse_hessian(self):
        e = ImplicitCurve.ellipse((0, 0), 3.0, 5.0)
        np.testing.assert_allclose(hessian(e, (1.0, 1.0)), [[2 / 9, 0.0], [0.0, 2 / 25]], rtol=1e-15)

    def test_ellipse_level_on_axes(self):
        e = ImplicitCurve.ellipse((1.0, 2.0), 3.0, 5.0, angle=math.pi / 2)
        # rotated a quarter turn: the 3 m semi-axis points along y
        assert level_error(e, (1.0, 5.0)) == pytest.approx(0.0, abs=1e-12)
        assert level_error(e, (6.0, 2.0)) == pytest.approx(0.0, abs=1e-12)

    def test_hessian_matches_fd_of_gradient(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            a, b = rng.uniform(5, 60, 2)
            curve = ImplicitCurve.ellipse(rng.uniform(-20, 20, 2), a, b, rng.uniform(-3, 3))
            p = random_annulus_points(rng, 1, 0.1 * max(a, b), 10 * max(a, b), curve.center)[0]
            H = hessian(curve, p)
            J = fd_jacobian(lambda q: gradient(curve, q), p, 1e-4)
            assert np.linalg.norm(J - H) <= 1e-6 * np.linalg.norm(H)


class TestField:
    def test_on_path_direction_is_tangent(self):
        fs = build_field(unit_circle(), CCW, (1.0, 0.0))
        assert fs.error == 0.0
        np.testing.assert_allclose(fs.desired_direction, fs.tangent / np.linalg.norm(fs.tangent))

    def test_outside_points_inward(self):
        fs = build_field(unit_circle(), CCW, (2.0, 0.0))
        assert fs.error == 3.0
        raw = fs.tangent - 3.0 * fs.normal
        np.testing.assert_allclose(raw, [-12.0, 4.0])
        np.testing.assert_allclose(fs.desired_direction, raw / np.linalg.norm(raw))
        assert fs.desired_direction[0] < 0

    def test_center_is_singular(self):
        with pytest.raises(SingularPointError):
            build_field(unit_circle(), CCW, (0.0, 0.0))

    def test_reference_matrix_turns_clockwise(self):
        E = rotation("clockwise")
        np.testing.assert_array_equal(E, [[0, 1], [-1, 0]])
        fs = build_field(ImplicitCurve.circle((0, 0), 5.0), GvfParams(1.0, 1.0, "clockwise"),
                         (5.0, 0.0))
        np.testing.assert_allclose(fs.tangent, [0.0, -10.0])

    @given(coords, coords, st.sampled_from(["clockwise", "counterclockwise"]))
    def test_tangent_orthogonal_to_normal(self, x, y, sense):
        if math.hypot(x, y) < 1e-6:
            return
        fs = build_field(ImplicitCurve.circle((0, 0), 30.0), GvfParams(0.01, 1.0, sense), (x, y))
        nn = np.linalg.norm(fs.normal)
        assert abs(fs.normal @ fs.tangent) <= 1e-14 * nn * nn
        np.testing.assert_allclose(np.linalg.norm(fs.desired_direction), 1.0, rtol=1e-12)

    @given(st.floats(-math.pi, math.pi), st.floats(0.5, 200))
    def test_on_path_direction_orthogonal_to_normal(self, ang, r):
        curve = ImplicitCurve.circle((0, 0), r)
        p = (r * math.cos(ang), r * math.sin(ang))
        if level_error(curve, p) != 0.0:
            # round-off put p slightly off the path; only the exact case is claimed
            return
        d = build_field(curve, GvfParams(0.1, 1.0), p).desired_direction
        n = gradient(curve, p)
        assert abs(d @ n / np.linalg.norm(n)) < 1e-12

    @given(coords, coords)
    def test_flipping_sense(self, x, y):
        if math.hypot(x, y) < 1e-6:
            return
        curve = ImplicitCurve.circle((0, 0), 30.0)
        a = build_field(curve, GvfParams(0.01, 1.0, "clockwise"), (x, y))
        b = build_field(curve, GvfParams(0.01, 1.0, "counterclockwise"), (x, y))
        assert a.error == b.error
        np.testing.assert_array_equal(a.tangent, -b.tangent)
        t_hat = a.tangent / np.linalg.norm(a.tangent)
        n_hat = a.normal / np.linalg.norm(a.normal)
        assert a.desired_direction @ t_hat == pytest.approx(-(b.desired_direction @ t_hat), abs=1e-12)
        assert a.desired_direction @ n_hat == pytest.approx(b.desired_direction @ n_hat, abs=1e-12)


class TestYawRate:
    @pytest.mark.parametrize("sense", ["clockwise", "counterclockwise"])
    def test_on_circle_turn_rate(self, sense):
        r, s = 30.0, 11.0
        params = GvfParams(0.002, 4.0, sense)
        curve = ImplicitCurve.circle((0, 0), r)
        psi = math.pi / 2 if sense == "counterclockwise" else -math.pi / 2
        state = VehicleState(r, 0.0, psi, s)
        u = yaw_rate_command(curve, params, state)
        assert abs(u) == pytest.approx(s / r, rel=1e-12)
        assert math.copysign(1, u) == (1 if sense == "counterclockwise" else -1)
        dt = 1e-4
        for _ in range(10_000):
            state = step(state, yaw_rate_command(curve, params, state), dt)
            assert abs(level_error(curve, state.position)) < 1e-3 * r * r

    def test_opposite_heading_alignment_vanishes(self):
        curve = ImplicitCurve.circle((0, 0), 30.0)
        params = GvfParams(0.002, 4.0)
        d = build_field(curve, params, (50.0, 10.0)).desired_direction
        psi = math.atan2(-d[1], -d[0])
        st_ = VehicleState(50.0, 10.0, psi, 11.0)
        u = yaw_rate_command(curve, params, st_)
        ff = field_turn_rate(curve, params, (50.0, 10.0), st_.velocity)
        assert math.isfinite(ff)
        assert u - ff == pytest.approx(0.0, abs=1e-12)

    def test_aligned_heading_alignment_vanishes(self):
        curve = ImplicitCurve.circle((0, 0), 30.0)
        params = GvfParams(0.002, 4.0)
        d = build_field(curve, params, (-20.0, 70.0)).desired_direction
        st_ = VehicleState(-20.0, 70.0, math.atan2(d[1], d[0]), 11.0)
        u = yaw_rate_command(curve, params, st_)
        ff = field_turn_rate(curve, params, (-20.0, 70.0), st_.velocity)
        assert u == pytest.approx(ff, abs=1e-12)

    def test_alignment_steers_toward_field(self):
        curve = ImplicitCurve.circle((0, 0), 30.0)
        params = GvfParams(0.002, 4.0)
        p = (60.0, 0.0)
        d = build_field(curve, params, p).desired_direction
        base = math.atan2(d[1], d[0])
        ff = field_turn_rate
        # heading rotated clockwise from the field must turn counterclockwise
        st_ = VehicleState(*p, base - 0.3, 11.0)
        assert yaw_rate_command(curve, params, st_) - ff(curve, params, p, st_.velocity) > 0

    @pytest.mark.parametrize("kind", ["circle", "ellipse"])
    def test_feedforward_matches_directional_derivative(self, kind):
        rng = np.random.default_rng(11)
        for _ in range(100):
            if kind == "circle":
                curve = ImplicitCurve.circle(rng.uniform(-50, 50, 2), 30.0)
                params = GvfParams(0.002, 4.0, str(rng.choice(["clockwise", "counterclockwise"])))
                scale = 30.0
            else:
                a, b = rng.uniform(10, 60, 2)
                curve = ImplicitCurve.ellipse(rng.uniform(-50, 50, 2), a, b, rng.uniform(-3, 3))
                params = GvfParams(1.5, 4.0, str(rng.choice(["clockwise", "counterclockwise"])))
                scale = max(a, b)
            p = random_annulus_points(rng, 1, 0.2 * scale, 5 * scale, curve.center)[0]
            v = 11.0 * np.array([math.cos(a_ := rng.uniform(-3, 3)), math.sin(a_)])
            ff = field_turn_rate(curve, params, p, v)
            fd = fd_turn_rate(lambda q: build_field(curve, params, q).desired_direction,
                              p, v, 1e-5 * scale / 11.0)
            assert fd == pytest.approx(ff, rel=1e-5, abs=1e-9)


class TestBankAngle:
    def test_examples(self):
        assert bank_angle(0.0, 11.0) == 0.0
        assert bank_angle(9.81, 1.0, 9.81) == pytest.approx(math.pi / 4, rel=1e-15)
        assert bank_angle(3.0, 1.0, 3.0) == pytest.approx(0.7853981633974483)
        assert bank_angle(9.81, 1.0, 9.81) == pytest.approx(0.7853981, abs=1e-7)

    def test_rejects_nonpositive_g(self):
        with pytest.raises(ValueError):
            bank_angle(1.0, 1.0, 0.0)

    def test_saturation_matches_max_bank(self):
        lim = max_yaw_rate(11.0)
        assert lim == pytest.approx(9.81 / 11.0)
        assert saturate_yaw_rate(5.0, 11.0) == lim
        assert saturate_yaw_rate(-5.0, 11.0) == -lim
        assert saturate_yaw_rate(0.1, 11.0) == 0.1
        assert bank_angle(lim, 11.0) == pytest.approx(math.radians(45))


class TestKernelAgreement:
    def test_circle_command_matches_generic(self, kern):
        rng = np.random.default_rng(5)
        for _ in range(300):
            cx, cy = rng.uniform(-40, 40, 2)
            r = rng.uniform(5, 80)
            sense = str(rng.choice(["clockwise", "counterclockwise"]))
            params = GvfParams(rng.uniform(1e-4, 1e-2), rng.uniform(0.5, 5), sense)
            p = random_annulus_points(rng, 1, 0.1 * r, 10 * r, (cx, cy))[0]
            st_ = VehicleState(p[0], p[1], rng.uniform(-math.pi, math.pi), rng.uniform(5, 20))
            u_ref = yaw_rate_command(ImplicitCurve.circle((cx, cy), r), params, st_)
            u, e = kern.circle_command(st_.x, st_.y, st_.psi, st_.speed, cx, cy, r,
                                       params.k_e, params.k_d, sense == "counterclockwise")
            assert u == pytest.approx(u_ref, rel=1e-9, abs=1e-12)
            assert e == pytest.approx(level_error(ImplicitCurve.circle((cx, cy), r), p), rel=1e-12,
                                      abs=1e-9)

    def test_circle_command_singular(self, kern):
        with pytest.raises(SingularPointError):
            kern.circle_command(1.0, 2.0, 0.0, 1.0, 1.0, 2.0, 5.0, 0.01, 1.0, True)


def test_level_error_derivatives_match_fd():
    rng = np.random.default_rng(0)
    curve = ImplicitCurve.circle((0, 0), 30.0)
    f = lambda q: level_error(curve, q)  # noqa: E731
    for p in random_annulus_points(rng, 50, 3.0, 300.0):
        g = gradient(curve, p)
        assert np.linalg.norm(fd_gradient(f, p, 1e-3) - g) <= 1e-6 * np.linalg.norm(g)
        H = hessian(curve, p)
        assert np.linalg.norm(fd_hessian(f, p, 0.5) - H) <= 1e-6 * np.linalg.norm(H)


@settings(max_examples=50)
@given(st.floats(-200, 200), st.floats(-200, 200))
def test_field_is_unit_everywhere_but_center(x, y):
    if math.hypot(x, y) < 1e-6:
        return
    d = build_field(ImplicitCurve.circle((0, 0), 30.0), GvfParams(0.002, 4.0), (x, y))
    assert np.linalg.norm(d.desired_direction) == pytest.approx(1.0, rel=1e-12)
