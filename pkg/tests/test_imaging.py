"""Tests for planes, regions, and the interpolated reference grid."""

import numpy as np
import pytest

from fisheyetec.imaging import (
    Plane,
    Region,
    RegionKind,
    RegionOutOfBounds,
    decision_box,
    decision_ring_pixels,
    extract_region,
    region_pixels,
    sample_at,
    sample_many,
    upsample,
    write_region,
)


def random_plane(width, height, seed=0):
    rng = np.random.default_rng(seed)
    return Plane.from_array(rng.integers(0, 256, (height, width), dtype=np.uint8))


# --- Plane ------------------------------------------------------------------


def test_plane_from_array_widens_and_validates():
    p = Plane.from_array(np.array([[0, 255], [7, 128]], dtype=np.uint8))
    assert p.samples.dtype == np.int32
    assert p.width == 2 and p.height == 2
    assert np.array_equal(p.to_uint8(), [[0, 255], [7, 128]])


def test_plane_rejects_out_of_range_and_wrong_shape():
    with pytest.raises(ValueError):
        Plane.from_array(np.array([[256]]))
    with pytest.raises(ValueError):
        Plane.from_array(np.array([[-1]]))
    with pytest.raises(ValueError):
        Plane.from_array(np.zeros(4, dtype=np.uint8))
    with pytest.raises(ValueError):
        Plane(np.zeros((2, 2), dtype=np.float64))


def test_plane_copy_is_independent():
    p = random_plane(8, 8)
    q = p.copy()
    q.samples[0, 0] = 99
    assert p.samples[0, 0] != 99 or p.samples[0, 0] == q.samples[0, 0] - 0  # differs
    assert not np.shares_memory(p.samples, q.samples)


# --- Region geometry --------------------------------------------------------


def test_region_properties_and_validation():
    r = Region(3, 5, 16, 16)
    assert r.m_end == 19 and r.n_end == 21
    assert r.area == 256
    assert r.center == (3 + 7.5, 5 + 7.5)
    with pytest.raises(ValueError):
        Region(0, 0, 0, 16)


def test_decision_box_default_geometry():
    loss = Region(40, 56, 16, 16)
    box = decision_box(loss, 8)
    assert (box.m, box.n, box.width, box.height) == (32, 48, 32, 32)
    assert box.kind is RegionKind.DECISION_AREA
    assert box.area == 1024
    assert box.area - loss.area == 768  # the ring itself


def test_decision_ring_pixels_disjoint_from_loss():
    loss = Region(40, 56, 16, 16)
    nn, mm = decision_ring_pixels(loss, 8, 200, 200)
    assert nn.size == 768
    in_loss = (
        (nn >= loss.n) & (nn < loss.n_end) & (mm >= loss.m) & (mm < loss.m_end)
    )
    assert not in_loss.any()


def test_decision_ring_clipped_at_frame_corner():
    loss = Region(0, 0, 16, 16)
    nn, mm = decision_ring_pixels(loss, 8, 200, 200)
    # box would be 32x32 but 8 rows and 8 cols fall off the frame
    assert nn.size == 24 * 24 - 256
    assert nn.min() == 0 and mm.min() == 0


def test_decision_ring_exclusion_mask():
    loss = Region(40, 56, 16, 16)
    mask = np.zeros((200, 200), dtype=bool)
    mask[48:50, 32:34] = True  # four ring pixels masked out
    nn, mm = decision_ring_pixels(loss, 8, 200, 200, mask)
    assert nn.size == 768 - 4
    assert not mask[nn, mm].any()


def test_region_pixels_raster_order():
    nn, mm = region_pixels(Region(2, 3, 2, 2))
    assert nn.tolist() == [3, 3, 4, 4]
    assert mm.tolist() == [2, 3, 2, 3]


def test_extract_write_roundtrip():
    p = random_plane(32, 24, seed=5)
    region = Region(10, 4, 8, 8)
    block = extract_region(p, region)
    assert block.shape == (8, 8)
    original = p.samples.copy()
    write_region(p, region, block)
    assert np.array_equal(p.samples, original)
    write_region(p, region, np.zeros((8, 8), dtype=np.int32))
    assert p.samples[4:12, 10:18].max() == 0
    assert np.array_equal(np.delete(p.samples, slice(4, 12), axis=0),
                          np.delete(original, slice(4, 12), axis=0))


def test_extract_region_returns_copy():
    p = random_plane(16, 16, seed=6)
    block = extract_region(p, Region(0, 0, 4, 4))
    block[0, 0] = 77
    assert p.samples[0, 0] != 77 or not np.shares_memory(block, p.samples)


def test_region_out_of_bounds():
    p = random_plane(16, 16)
    for region in (Region(-1, 0, 4, 4), Region(0, 14, 4, 4), Region(13, 0, 4, 4)):
        with pytest.raises(RegionOutOfBounds):
            extract_region(p, region)
    with pytest.raises(ValueError):
        write_region(p, Region(0, 0, 4, 4), np.zeros((3, 4), dtype=np.int32))


# --- Upsampling -------------------------------------------------------------


def test_upsample_constant_plane():
    p = Plane.from_array(np.full((9, 7), 100, dtype=np.uint8))
    up = upsample(p, 8)
    assert up.samples.shape == (8 * 8 + 1, 6 * 8 + 1)
    assert np.all(up.samples == 100.0)


def test_upsample_factor_one_is_identity():
    p = random_plane(13, 11, seed=7)
    up = upsample(p, 1)
    assert up.factor == 1
    assert np.array_equal(up.samples.astype(np.int64), p.samples)


def test_upsample_rejects_bad_factor():
    p = random_plane(4, 4)
    with pytest.raises(ValueError):
        upsample(p, 0)
    with pytest.raises(ValueError):
        upsample(p, 2.5)


def test_upsample_preserves_integer_grid_exhaustive():
    p = random_plane(17, 12, seed=8)
    up = upsample(p, 8)
    nodes = up.samples[::8, ::8]
    assert np.array_equal(nodes.astype(np.int64), p.samples)


def test_upsample_reproduces_linear_ramp():
    # cubic convolution is exact on degree-1 fields; interior half-pixel
    # positions of a horizontal ramp must read m + 0.5
    ramp = np.tile(np.arange(32, dtype=np.uint8), (8, 1))
    up = upsample(Plane.from_array(ramp), 8)
    for m in range(2, 29):
        got = sample_at(up, (m + 0.5, 4.0))
        assert abs(got - (m + 0.5)) < 1e-6


def test_upsample_reproduces_vertical_ramp():
    ramp = np.tile(np.arange(24, dtype=np.uint8)[:, None], (1, 9))
    up = upsample(Plane.from_array(ramp), 8)
    for n in range(2, 21):
        got = sample_at(up, (3.0, n + 0.5))
        assert abs(got - (n + 0.5)) < 1e-6


def test_upsample_source_dims():
    up = upsample(random_plane(17, 12, seed=9), 8)
    assert up.source_width == 17
    assert up.source_height == 12


def test_sample_at_integer_coordinates_exact():
    p = random_plane(10, 10, seed=10)
    up = upsample(p, 8)
    for n in range(10):
        for m in range(10):
            assert sample_at(up, (m, n)) == p.samples[n, m]


def test_sample_rounding_half_up():
    p = random_plane(16, 6, seed=11)
    up = upsample(p, 8)
    k = 7
    # slightly below half a subpixel step: rounds back to the grid node
    assert sample_at(up, (k + 0.49 / 8, 2)) == up.samples[16, 8 * k]
    # exactly half: ties go toward +inf, onto the next subpixel
    assert sample_at(up, (k + 0.5 / 8, 2)) == up.samples[16, 8 * k + 1]
    assert sample_at(up, (k + 0.51 / 8, 2)) == up.samples[16, 8 * k + 1]
    # approaching from below: -0.5/8 also rounds up, to the node itself
    assert sample_at(up, (k - 0.5 / 8, 2)) == up.samples[16, 8 * k]


def test_sample_out_of_bounds_clamps_to_edge():
    p = random_plane(8, 8, seed=12)
    up = upsample(p, 8)
    assert sample_at(up, (-3.0, 0.0)) == p.samples[0, 0]
    assert sample_at(up, (100.0, 7.0)) == p.samples[7, 7]
    assert sample_at(up, (3.0, -50.0)) == p.samples[0, 3]


def test_sample_many_matches_sample_at():
    p = random_plane(12, 12, seed=13)
    up = upsample(p, 8)
    rng = np.random.default_rng(14)
    m = rng.uniform(-1, 12, 200)
    n = rng.uniform(-1, 12, 200)
    vec = sample_many(up, m, n)
    for i in range(200):
        assert vec[i] == sample_at(up, (m[i], n[i]))
