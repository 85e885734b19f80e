import math

import numpy as np
import pytest

from helibend import (
    BOOKSTEIN,
    TRACE,
    Conic2D,
    EllipseParams,
    HelixSpec,
    RigidTransform,
    canonicalize_section,
    centroid,
    conic_to_params,
    fold_half_open,
    generate,
    params_to_conic,
)
from helibend.errors import DegenerateSection, EmptyInput, NotAnEllipse, TooFewPoints
from helibend.geometry import rotation_x, rotation_y, rotation_z

from helpers import random_ellipse, random_helix_spec


class TestCentroid:
    def test_two_points(self):
        assert np.allclose(centroid([(0, 0, 0), (2, 0, 0)]), (1, 0, 0))

    def test_single_point(self):
        assert np.allclose(centroid([(1, 1, 1)]), (1, 1, 1))

    def test_empty(self):
        with pytest.raises(EmptyInput):
            centroid([])

    def test_ellipse_samples_against_direct_summation(self):
        t = 2 * math.pi * np.arange(1000) / 1000
        pts = np.column_stack(
            (5 + 7 * np.cos(t), -3 + 2 * np.sin(t), 2 + 0 * t)
        )
        got = centroid(pts)
        # independent oracle: plain compensated summation, no numpy reductions
        oracle = [math.fsum(pts[:, k]) / len(pts) for k in range(3)]
        assert np.allclose(got, oracle, atol=1e-12)
        assert np.all(np.abs(got - np.array([5.0, -3.0, 2.0])) < 0.05)


class TestRigidTransform:
    def test_round_trip(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            angles = rng.uniform(-math.pi, math.pi, 3)
            rot = rotation_z(angles[0]) @ rotation_y(angles[1]) @ rotation_x(angles[2])
            t = RigidTransform(rot, rng.uniform(-10, 10, 3))
            pts = rng.uniform(-50, 50, (20, 3))
            back = t.inverse().apply(t.apply(pts))
            assert np.max(np.abs(back - pts)) < 1e-10

    def test_compose_matches_sequential_application(self):
        rng = np.random.default_rng(4)
        t1 = RigidTransform(rotation_x(0.3) @ rotation_y(-1.1), rng.uniform(-5, 5, 3))
        t2 = RigidTransform(rotation_z(2.0) @ rotation_x(0.7), rng.uniform(-5, 5, 3))
        pts = rng.uniform(-10, 10, (7, 3))
        assert np.allclose(t2.compose(t1).apply(pts), t2.apply(t1.apply(pts)), atol=1e-12)

    def test_rejects_non_orthonormal(self):
        with pytest.raises(ValueError):
            RigidTransform(np.eye(3) * 1.001, np.zeros(3))

    def test_rejects_reflection(self):
        with pytest.raises(ValueError):
            RigidTransform(np.diag([1.0, 1.0, -1.0]), np.zeros(3))


class TestFold:
    def test_identity_on_branch(self):
        for x in (-1.5, -0.3, 0.0, 0.7, math.pi / 2):
            assert fold_half_open(x) == pytest.approx(x, abs=1e-15)

    def test_half_open_boundary(self):
        assert fold_half_open(-math.pi / 2) == pytest.approx(math.pi / 2)
        assert fold_half_open(math.pi / 2) == pytest.approx(math.pi / 2)

    def test_wraps(self):
        assert fold_half_open(math.pi) == pytest.approx(0.0, abs=1e-15)
        assert fold_half_open(2.0) == pytest.approx(2.0 - math.pi)
        assert fold_half_open(-2.0) == pytest.approx(math.pi - 2.0)


class TestCanonicalize:
    def _section_at(self, center, n=12, radius=3.0):
        t = 2 * math.pi * np.arange(n) / n
        pts = np.column_stack((np.zeros(n), radius * np.cos(t), radius * np.sin(t)))
        return pts + np.asarray(center, dtype=float)

    def test_zero_azimuth_is_pure_translation(self):
        pts = self._section_at((150.0, 0.0, 25.0))
        sec = canonicalize_section(pts)
        assert sec.azimuth_phi == pytest.approx(0.0, abs=1e-12)
        assert sec.centroid_radius == pytest.approx(150.0, abs=1e-9)
        assert np.allclose(sec.to_canonical.rotation, np.eye(3), atol=1e-12)
        assert np.allclose(sec.to_canonical.translation, [-150.0, 0.0, -25.0], atol=1e-9)

    def test_quarter_turn(self):
        pts = self._section_at((0.0, 80.0, -4.0))
        sec = canonicalize_section(pts)
        assert sec.azimuth_phi == pytest.approx(math.pi / 2, abs=1e-12)
        assert np.allclose(sec.points_canonical.mean(axis=0), 0.0, atol=1e-9)

    def test_helix_section_pose(self):
        # oracle: generator ground truth at phi = 0.7, R = 120
        spec = HelixSpec(radius=120.0, extent=0.7, sections=2, rng_seed=5)
        part = generate(spec)
        last = part.points[part.labels == 1]
        sec = canonicalize_section(last)
        assert sec.azimuth_phi == pytest.approx(0.7, abs=1e-9)
        assert sec.centroid_radius == pytest.approx(120.0, abs=1e-9)

    def test_round_trip_and_rigidity(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            spec = random_helix_spec(rng)
            part = generate(spec)
            pts = part.points[part.labels == 0]
            sec = canonicalize_section(pts)
            back = sec.to_canonical.inverse().apply(sec.points_canonical)
            assert np.max(np.abs(back - pts)) < 1e-9
            d_in = np.linalg.norm(pts[:, None] - pts[None, :], axis=-1)
            d_out = np.linalg.norm(
                sec.points_canonical[:, None] - sec.points_canonical[None, :], axis=-1
            )
            assert np.max(np.abs(d_in - d_out)) < 1e-9

    def test_rotated_centroid_lands_on_x_axis(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            pts = self._section_at(rng.uniform(-100, 100, 3))
            try:
                sec = canonicalize_section(pts)
            except DegenerateSection:
                continue
            ctr = pts.mean(axis=0)
            moved = sec.to_canonical.rotation @ ctr
            assert abs(math.atan2(moved[1], moved[0])) < 1e-12

    def test_too_few_points(self):
        with pytest.raises(TooFewPoints):
            canonicalize_section(self._section_at((10, 0, 0), n=5))

    def test_on_axis_is_degenerate(self):
        with pytest.raises(DegenerateSection):
            canonicalize_section(self._section_at((0.0, 0.0, 30.0)))


class TestConicConversion:
    def test_unit_circle_trace(self):
        params = conic_to_params(Conic2D(0.5, 0.0, 0.5, 0.0, 0.0, -0.5, TRACE))
        assert np.allclose(params.center, 0.0)
        assert params.semi_major == pytest.approx(1.0, abs=1e-12)
        assert params.semi_minor == pytest.approx(1.0, abs=1e-12)
        assert not params.orientation_defined

    def test_axis_aligned_ellipse(self):
        params = conic_to_params(Conic2D(0.2, 0.0, 0.8, 0.0, 0.0, -0.8, TRACE))
        assert params.semi_major == pytest.approx(2.0, abs=1e-12)
        assert params.semi_minor == pytest.approx(1.0, abs=1e-12)
        assert params.orientation == pytest.approx(0.0, abs=1e-12)

    def test_params_to_conic_examples(self):
        circle = EllipseParams(np.zeros(2), 1.0, 1.0, 0.0, orientation_defined=False)
        c = params_to_conic(circle, TRACE)
        assert (c.a11, c.a12, c.a22, c.c) == pytest.approx((0.5, 0.0, 0.5, -0.5), abs=1e-15)
        c = params_to_conic(circle, BOOKSTEIN)
        r = 1 / math.sqrt(2)
        assert (c.a11, c.a22, c.c) == pytest.approx((r, r, -r), abs=1e-15)
        ell = EllipseParams(np.zeros(2), 2.0, 1.0, 0.0)
        c = params_to_conic(ell, TRACE)
        assert (c.a11, c.a22, c.c) == pytest.approx((0.2, 0.8, -0.8), abs=1e-15)

    def test_conic_zero_on_boundary(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            params = random_ellipse(rng)
            for tag in (TRACE, BOOKSTEIN):
                conic = params_to_conic(params, tag)
                residuals = conic.evaluate(params.boundary_points(32))
                assert np.max(np.abs(residuals)) < 1e-10

    def test_round_trip(self):
        params = EllipseParams(np.array([3.0, -1.0]), 5.0, 2.0, 0.4)
        back = conic_to_params(params_to_conic(params, TRACE))
        assert np.allclose(back.center, params.center, atol=1e-10)
        assert back.semi_major == pytest.approx(5.0, abs=1e-10)
        assert back.semi_minor == pytest.approx(2.0, abs=1e-10)
        assert back.orientation == pytest.approx(0.4, abs=1e-10)

    def test_round_trip_random(self):
        rng = np.random.default_rng(23)
        for _ in range(50):
            params = random_ellipse(rng)
            for tag in (TRACE, BOOKSTEIN):
                back = conic_to_params(params_to_conic(params, tag))
                scale = params.semi_major
                assert np.max(np.abs(back.center - params.center)) < 1e-9 * max(
                    1.0, float(np.abs(params.center).max())
                )
                assert abs(back.semi_major - params.semi_major) < 1e-9 * scale
                assert abs(back.semi_minor - params.semi_minor) < 1e-9 * scale
                assert fold_half_open(back.orientation - params.orientation) == pytest.approx(
                    0.0, abs=1e-9
                )

    def test_constraint_exact(self):
        rng = np.random.default_rng(29)
        for _ in range(20):
            params = random_ellipse(rng)
            c = params_to_conic(params, TRACE)
            assert abs(c.a11 + c.a22 - 1.0) < 1e-12
            c = params_to_conic(params, BOOKSTEIN)
            assert abs(c.a11**2 + 2 * c.a12**2 + c.a22**2 - 1.0) < 1e-12

    def test_hyperbola_rejected(self):
        with pytest.raises(NotAnEllipse) as err:
            conic_to_params(Conic2D(1.0, 0.0, -1.0, 0.0, 0.0, -1.0))
        assert err.value.conic is not None

    def test_imaginary_ellipse_rejected(self):
        with pytest.raises(NotAnEllipse):
            conic_to_params(Conic2D(0.5, 0.0, 0.5, 0.0, 0.0, 0.5))
