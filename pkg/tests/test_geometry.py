"""Tests for the camera model and the radial domain transforms.

Reference values were computed independently with mpmath at 50 decimal
digits and are frozen here as literals; the implementation under test
never produced them.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fisheyetec.geometry import (
    CameraModel,
    Domain,
    DomainOverflow,
    InvalidRadius,
    PolarCoord,
    backproject_mm,
    equisolid_to_perspective,
    incident_angle,
    mm_to_pixel,
    perspective_to_equisolid,
    pixel_to_mm,
    pixel_to_sensor,
    reproject_mm,
    sensor_to_pixel,
    shift_in_perspective,
    wrap_angle,
)

# mpmath, 50 digits: 1.8 * tan(2*asin(0.5)) == 1.8 * sqrt(3)
RP_AT_RE_1_8 = 3.1176914536239791283
# mpmath: 2 * 1.8 * sin(pi/4), the radius where the incident angle hits 90 deg
RE_AT_THETA_90 = 2.5455844122715710878
# mpmath: 2 * 1.8 * sin(atan(5 * (5.2/1088) / 1.8) / 2)
RE_AXIS_SHIFT_5PX = 0.023895479503357320071


def make_cam(**kwargs) -> CameraModel:
    defaults = dict(
        focal_length_mm=1.8,
        sensor_width_mm=5.2,
        sensor_height_mm=5.2,
        image_width=1088,
        image_height=1088,
        fov_degrees=185.0,
    )
    defaults.update(kwargs)
    return CameraModel(**defaults)


def test_principal_point_defaults_to_sample_centered_middle():
    cam = make_cam()
    assert cam.principal_point == (1087 / 2, 1087 / 2)


def test_pixel_pitch_from_sensor_and_resolution():
    cam = make_cam()
    assert cam.pitch_x_mm == pytest.approx(5.2 / 1088, abs=0.0)
    assert cam.pitch_y_mm == pytest.approx(5.2 / 1088, abs=0.0)


def test_anisotropic_pitch_carried_per_axis():
    cam = make_cam(
        sensor_width_mm=4.6, sensor_height_mm=2.9, image_width=768, image_height=1216
    )
    assert cam.pitch_x_mm == pytest.approx(4.6 / 768, rel=1e-15)
    assert cam.pitch_y_mm == pytest.approx(2.9 / 1216, rel=1e-15)


def test_fov_radius():
    cam = make_cam()
    expected = 2 * 1.8 * math.sin(math.radians(185 / 2) / 2)
    assert cam.fov_radius_mm == pytest.approx(expected, rel=1e-15)


def test_camera_model_rejects_bad_parameters():
    with pytest.raises(ValueError):
        make_cam(focal_length_mm=0.0)
    with pytest.raises(ValueError):
        make_cam(sensor_width_mm=-1.0)
    with pytest.raises(ValueError):
        make_cam(image_height=0)
    with pytest.raises(ValueError):
        make_cam(fov_degrees=0.0)


def test_polar_coord_validation():
    with pytest.raises(ValueError):
        PolarCoord(-0.1, 0.0, Domain.EQUISOLID)
    with pytest.raises(ValueError):
        PolarCoord(1.0, math.pi, Domain.EQUISOLID)  # half-open interval


def test_wrap_angle():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(math.pi) == -math.pi
    assert wrap_angle(-math.pi) == -math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2, abs=1e-15)


def test_center_pixel_maps_to_zero_radius():
    cam = make_cam()
    c = pixel_to_sensor(cam.principal_point, cam)
    assert c.radius == 0.0
    assert c.domain is Domain.EQUISOLID


def test_one_pixel_right_of_center_is_one_pitch():
    cam = make_cam()
    c = pixel_to_sensor((cam.principal_point[0] + 1, cam.principal_point[1]), cam)
    assert c.radius == pytest.approx(5.2 / 1088, rel=1e-12)
    assert c.angle == 0.0


def test_pixel_roundtrip_many_points():
    cam = make_cam()
    rng = np.random.default_rng(3)
    pts = rng.uniform(0, 1087, size=(10_000, 2))
    for px, py in pts:
        c = pixel_to_sensor((px, py), cam)
        qx, qy = sensor_to_pixel(c, cam)
        assert abs(qx - px) < 1e-9
        assert abs(qy - py) < 1e-9


def test_back_projection_matches_high_precision_value():
    cam = make_cam()
    c = PolarCoord(1.8, 0.7, Domain.EQUISOLID)
    p = equisolid_to_perspective(c, cam)
    assert p.domain is Domain.PERSPECTIVE
    assert p.radius == pytest.approx(RP_AT_RE_1_8, abs=1e-12)


def test_back_projection_zero_radius_is_identity():
    cam = make_cam()
    p = equisolid_to_perspective(PolarCoord(0.0, 0.0, Domain.EQUISOLID), cam)
    assert p.radius == 0.0


def test_back_projection_overflow_at_90_degrees():
    cam = make_cam()
    with pytest.raises(DomainOverflow):
        equisolid_to_perspective(PolarCoord(RE_AT_THETA_90, 0.0, Domain.EQUISOLID), cam)


def test_back_projection_overflow_at_configured_limit():
    cam = make_cam()
    r_at_85 = 2 * 1.8 * math.sin(math.radians(85) / 2)
    # feasible under the default limit, infeasible when the limit drops below
    equisolid_to_perspective(PolarCoord(r_at_85, 0.0, Domain.EQUISOLID), cam)
    with pytest.raises(DomainOverflow):
        equisolid_to_perspective(
            PolarCoord(r_at_85, 0.0, Domain.EQUISOLID), cam, theta_limit_deg=80.0
        )


def test_back_projection_invalid_radius_beyond_2f():
    cam = make_cam()
    with pytest.raises(InvalidRadius):
        equisolid_to_perspective(PolarCoord(3.61, 0.0, Domain.EQUISOLID), cam)


def test_reprojection_inverse_of_frozen_example():
    cam = make_cam()
    e = perspective_to_equisolid(PolarCoord(RP_AT_RE_1_8, 0.3, Domain.PERSPECTIVE), cam)
    assert e.radius == pytest.approx(1.8, abs=1e-12)
    assert e.domain is Domain.EQUISOLID


def test_reprojection_total_and_bounded():
    cam = make_cam()
    e = perspective_to_equisolid(PolarCoord(1e6 * 1.8, 0.0, Domain.PERSPECTIVE), cam)
    assert e.radius < RE_AT_THETA_90
    assert e.radius == pytest.approx(RE_AT_THETA_90, rel=1e-5)
    assert perspective_to_equisolid(PolarCoord(0.0, 0.0, Domain.PERSPECTIVE), cam).radius == 0.0


def test_domain_tags_are_enforced():
    cam = make_cam()
    with pytest.raises(ValueError):
        equisolid_to_perspective(PolarCoord(1.0, 0.0, Domain.PERSPECTIVE), cam)
    with pytest.raises(ValueError):
        perspective_to_equisolid(PolarCoord(1.0, 0.0, Domain.EQUISOLID), cam)
    with pytest.raises(ValueError):
        sensor_to_pixel(PolarCoord(1.0, 0.0, Domain.PERSPECTIVE), cam)


def test_roundtrip_dense_radii():
    cam = make_cam()
    r_limit = 2 * 1.8 * math.sin(math.radians(89.0) / 2)
    radii = np.linspace(0.0, r_limit * (1 - 1e-12), 20_000)
    for r in radii[::37]:  # sampled; the exhaustive sweep lives in acceptance
        c = PolarCoord(float(r), 0.0, Domain.EQUISOLID)
        back = perspective_to_equisolid(equisolid_to_perspective(c, cam), cam)
        assert abs(back.radius - r) < 1e-9


@settings(max_examples=200, deadline=None)
@given(
    radius=st.floats(min_value=0.0, max_value=2.52, allow_nan=False),
    angle=st.floats(min_value=-math.pi, max_value=math.pi, exclude_max=True),
)
def test_roundtrip_property(radius, angle):
    cam = make_cam()
    c = PolarCoord(radius, angle, Domain.EQUISOLID)
    if radius >= 2 * 1.8 * math.sin(math.radians(89.0) / 2):
        with pytest.raises(DomainOverflow):
            equisolid_to_perspective(c, cam)
        return
    back = perspective_to_equisolid(equisolid_to_perspective(c, cam), cam)
    assert abs(back.radius - radius) < 1e-9
    assert back.angle == angle  # bit-identical


def test_angle_preserved_bit_identical():
    cam = make_cam()
    for angle in (-math.pi, -1.234567891, 0.0, 0.5, 3.0):
        c = PolarCoord(1.2, angle, Domain.EQUISOLID)
        p = equisolid_to_perspective(c, cam)
        assert p.angle == angle
        e = perspective_to_equisolid(p, cam)
        assert e.angle == angle


def test_transforms_strictly_increasing():
    cam = make_cam()
    r_limit = 2 * 1.8 * math.sin(math.radians(89.0) / 2)
    radii = np.linspace(0.0, r_limit * 0.999999, 4096)
    rp = [
        equisolid_to_perspective(PolarCoord(float(r), 0.0, Domain.EQUISOLID), cam).radius
        for r in radii
    ]
    assert all(b > a for a, b in zip(rp, rp[1:]))
    rps = np.linspace(0.0, 200.0, 4096)
    re = [
        perspective_to_equisolid(PolarCoord(float(r), 0.0, Domain.PERSPECTIVE), cam).radius
        for r in rps
    ]
    assert all(b > a for a, b in zip(re, re[1:]))


def test_incident_angle_examples():
    cam = make_cam()
    assert incident_angle(PolarCoord(0.0, 0.0, Domain.EQUISOLID), cam) == 0.0
    theta = incident_angle(PolarCoord(1.8, 0.0, Domain.EQUISOLID), cam)
    assert theta == pytest.approx(math.radians(60.0), rel=1e-12)


def test_shift_zero_mv_is_identity():
    cam = make_cam()
    for radius in (0.0, 0.4, 1.1, 2.0):
        c = PolarCoord(radius, 0.9, Domain.EQUISOLID)
        out = shift_in_perspective(c, (0, 0), cam)
        assert abs(out.radius - radius) < 1e-9


def test_shift_from_axis_matches_frozen_composition():
    cam = make_cam()
    c = PolarCoord(0.0, 0.0, Domain.EQUISOLID)
    out = shift_in_perspective(c, (5, 0), cam)
    assert out.angle == 0.0
    assert out.radius == pytest.approx(RE_AXIS_SHIFT_5PX, abs=1e-12)


def test_shift_near_limit_large_mv_stays_bounded():
    cam = make_cam()
    r = 2 * 1.8 * math.sin(math.radians(88.9) / 2)
    out = shift_in_perspective(PolarCoord(r, 0.0, Domain.EQUISOLID), (10_000, 0), cam)
    assert out.radius < RE_AT_THETA_90


def test_shift_propagates_overflow():
    cam = make_cam()
    c = PolarCoord(RE_AT_THETA_90, 0.0, Domain.EQUISOLID)
    with pytest.raises(DomainOverflow):
        shift_in_perspective(c, (1, 0), cam)


def test_shift_displacement_shrinks_with_radius():
    # A fixed perspective-domain displacement moves a point by less and
    # less on the equisolid sensor the farther out it starts.
    cam = make_cam()
    radii = np.linspace(0.0, 2.3, 24)
    displacements = []
    for r in radii:
        c = PolarCoord(float(r), 0.0, Domain.EQUISOLID)
        out = shift_in_perspective(c, (4, 0), cam)
        dx = out.radius * math.cos(out.angle) - r
        dy = out.radius * math.sin(out.angle)
        displacements.append(math.hypot(dx, dy))
    diffs = np.diff(displacements)
    assert np.all(diffs <= 1e-12)


# --- array helpers ---------------------------------------------------------


def test_array_backprojection_matches_scalar():
    cam = make_cam()
    rng = np.random.default_rng(11)
    m = rng.uniform(100, 987, 256)
    n = rng.uniform(100, 987, 256)
    x, y = pixel_to_mm(cam, m, n)
    X, Y, valid = backproject_mm(cam, x, y)
    for i in range(256):
        c = pixel_to_sensor((m[i], n[i]), cam)
        try:
            p = equisolid_to_perspective(c, cam)
        except DomainOverflow:
            assert not valid[i]
            continue
        assert valid[i]
        assert X[i] == pytest.approx(p.radius * math.cos(p.angle), abs=1e-12)
        assert Y[i] == pytest.approx(p.radius * math.sin(p.angle), abs=1e-12)


def test_array_reprojection_matches_scalar():
    cam = make_cam()
    rng = np.random.default_rng(12)
    X = rng.uniform(-40, 40, 256)
    Y = rng.uniform(-40, 40, 256)
    x, y = reproject_mm(cam, X, Y)
    for i in range(256):
        radius = math.hypot(X[i], Y[i])
        angle = wrap_angle(math.atan2(Y[i], X[i]))
        e = perspective_to_equisolid(PolarCoord(radius, angle, Domain.PERSPECTIVE), cam)
        assert x[i] == pytest.approx(e.radius * math.cos(e.angle), abs=1e-12)
        assert y[i] == pytest.approx(e.radius * math.sin(e.angle), abs=1e-12)


def test_array_validity_mask_cutoff():
    cam = make_cam()
    limit = 2 * 1.8 * math.sin(math.radians(89.0) / 2)
    x = np.array([0.0, limit - 1e-9, limit, limit + 0.1, 3.7])
    y = np.zeros_like(x)
    _, _, valid = backproject_mm(cam, x, y)
    assert valid.tolist() == [True, True, False, False, False]


def test_mm_pixel_roundtrip_array():
    cam = make_cam(image_width=640, image_height=480, sensor_height_mm=3.9)
    rng = np.random.default_rng(13)
    m = rng.uniform(0, 639, 1000)
    n = rng.uniform(0, 479, 1000)
    x, y = pixel_to_mm(cam, m, n)
    m2, n2 = mm_to_pixel(cam, x, y)
    assert np.max(np.abs(m2 - m)) < 1e-9
    assert np.max(np.abs(n2 - n)) < 1e-9
