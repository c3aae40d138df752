"""Frame storage, block/region geometry, and the upsampled reference.

Planes hold 8-bit sample grids widened to int32 so that difference
arithmetic never wraps. Arrays are indexed ``samples[n, m]`` with m
horizontal and n vertical, matching the (m, n) ordering used for region
origins and motion vectors.

The upsampled reference is a separable cubic-convolution (Keys kernel,
a = -0.5) interpolation of a plane at 1/factor pixel spacing. The kernel
interpolates, so samples at integer source positions are preserved
exactly; subpixel lookups round the requested coordinate to the nearest
1/factor position, ties toward +inf, and reads are clamped to the edge
both for kernel support and for out-of-range coordinates.

Planes and upsampled references are immutable after construction and may
be read concurrently; ``write_region`` mutates its target plane and is
intended for single-writer assembly of an output frame.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

DEFAULT_BLOCK_SIZE = 16
DEFAULT_DECISION_WIDTH = 8
DEFAULT_UPSAMPLE_FACTOR = 8

CUBIC_KEYS_KERNEL_ID = "cubic-convolution-keys-a=-0.5"


class RegionOutOfBounds(ValueError):
    """Region extends past the plane it is applied to."""


class RegionKind(enum.Enum):
    LOSS_AREA = "loss_area"
    DECISION_AREA = "decision_area"


@dataclass(frozen=True)
class Plane:
    """One sample grid of a frame (luma or a chroma channel)."""

    samples: np.ndarray

    def __post_init__(self) -> None:
        a = self.samples
        if a.ndim != 2:
            raise ValueError(f"plane samples must be 2-D, got shape {a.shape}")
        if a.dtype != np.int32:
            raise ValueError(f"plane samples must be int32, got {a.dtype}")

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Plane":
        """Widen an 8-bit-valued array into a plane, validating the range."""
        a = np.asarray(arr)
        if a.ndim != 2:
            raise ValueError(f"plane samples must be 2-D, got shape {a.shape}")
        if a.size and (a.min() < 0 or a.max() > 255):
            raise ValueError("plane samples must lie in [0, 255]")
        return cls(a.astype(np.int32))

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def to_uint8(self) -> np.ndarray:
        return self.samples.astype(np.uint8)

    def copy(self) -> "Plane":
        return Plane(self.samples.copy())


@dataclass(frozen=True)
class Frame:
    """Luminance plane plus optional 4:2:0 chroma planes."""

    y: Plane
    u: Plane | None = None
    v: Plane | None = None


@dataclass(frozen=True)
class Region:
    """Axis-aligned pixel rectangle with origin (m, n)."""

    m: int
    n: int
    width: int
    height: int
    kind: RegionKind = RegionKind.LOSS_AREA

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("region dimensions must be positive")

    @property
    def m_end(self) -> int:
        return self.m + self.width

    @property
    def n_end(self) -> int:
        return self.n + self.height

    @property
    def area(self) -> int:
        return self.width * self.height

    @property
    def center(self) -> tuple[float, float]:
        return (self.m + (self.width - 1) / 2.0, self.n + (self.height - 1) / 2.0)

    def inside(self, width: int, height: int) -> bool:
        return self.m >= 0 and self.n >= 0 and self.m_end <= width and self.n_end <= height


def decision_box(loss: Region, width: int = DEFAULT_DECISION_WIDTH) -> Region:
    """Bounding box of the decision ring around a loss area.

    The decision area itself is this box minus the loss area; for the
    default 16x16 loss and 8-pixel ring the box is 32x32.
    """
    return Region(
        loss.m - width,
        loss.n - width,
        loss.width + 2 * width,
        loss.height + 2 * width,
        RegionKind.DECISION_AREA,
    )


def region_pixels(region: Region) -> tuple[np.ndarray, np.ndarray]:
    """Row and column index arrays covering a region, row-major."""
    nn, mm = np.meshgrid(
        np.arange(region.n, region.n_end),
        np.arange(region.m, region.m_end),
        indexing="ij",
    )
    return nn.ravel(), mm.ravel()


def decision_ring_pixels(
    loss: Region,
    ring_width: int,
    frame_width: int,
    frame_height: int,
    exclude_mask: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Pixels of the decision area around ``loss``, as (rows, cols) arrays.

    The ring is clipped to the frame, and pixels flagged in
    ``exclude_mask`` (for instance, pixels lost to another block) are
    dropped so both concealment engines score the same received set.
    """
    box = decision_box(loss, ring_width)
    n0, n1 = max(box.n, 0), min(box.n_end, frame_height)
    m0, m1 = max(box.m, 0), min(box.m_end, frame_width)
    if n0 >= n1 or m0 >= m1:
        empty = np.empty(0, dtype=np.int64)
        return empty, empty
    nn, mm = np.meshgrid(np.arange(n0, n1), np.arange(m0, m1), indexing="ij")
    in_loss = (
        (nn >= loss.n) & (nn < loss.n_end) & (mm >= loss.m) & (mm < loss.m_end)
    )
    keep = ~in_loss
    if exclude_mask is not None:
        keep &= ~exclude_mask[nn, mm]
    return nn[keep], mm[keep]


def extract_region(plane: Plane, region: Region) -> np.ndarray:
    """Copy a region's samples out of a plane."""
    _check_bounds(plane, region)
    return plane.samples[region.n : region.n_end, region.m : region.m_end].copy()


def write_region(plane: Plane, region: Region, block: np.ndarray) -> None:
    """Write a block of samples into a plane at a region."""
    _check_bounds(plane, region)
    if block.shape != (region.height, region.width):
        raise ValueError(
            f"block shape {block.shape} does not match region "
            f"{(region.height, region.width)}"
        )
    plane.samples[region.n : region.n_end, region.m : region.m_end] = block


def _check_bounds(plane: Plane, region: Region) -> None:
    if not region.inside(plane.width, plane.height):
        raise RegionOutOfBounds(
            f"region (m={region.m}, n={region.n}, {region.width}x{region.height}) "
            f"exceeds plane {plane.width}x{plane.height}"
        )


# --- Cubic-convolution upsampling ----------------------------------------


@dataclass(frozen=True)
class UpsampledReference:
    """A plane interpolated onto a 1/factor grid for subpixel lookups.

    ``samples[j, i]`` holds the value at pixel coordinate
    (i / factor, j / factor); the grid spans [0, width-1] x [0, height-1]
    of the source plane inclusive.
    """

    samples: np.ndarray
    factor: int
    kernel: str = CUBIC_KEYS_KERNEL_ID

    @property
    def source_width(self) -> int:
        return (self.samples.shape[1] - 1) // self.factor + 1

    @property
    def source_height(self) -> int:
        return (self.samples.shape[0] - 1) // self.factor + 1


def _keys_phase_weights(factor: int) -> np.ndarray:
    """Keys (a = -0.5) kernel weights for the four-tap stencil at each phase.

    Row p weights source neighbors [i-1, i, i+1, i+2] for the position
    i + p/factor. Phase 0 evaluates exactly to [0, 1, 0, 0], which is what
    keeps integer grid points bit-exact.
    """
    a = -0.5
    t = np.arange(factor, dtype=np.float64) / factor

    def near(s: np.ndarray) -> np.ndarray:  # |s| <= 1
        return (a + 2.0) * s**3 - (a + 3.0) * s**2 + 1.0

    def far(s: np.ndarray) -> np.ndarray:  # 1 <= |s| <= 2
        return a * (s**3 - 5.0 * s**2 + 8.0 * s - 4.0)

    return np.stack([far(1.0 + t), near(t), near(1.0 - t), far(2.0 - t)], axis=1)


def _upsample_rows(arr: np.ndarray, factor: int, weights: np.ndarray) -> np.ndarray:
    """Interpolate along axis 1 onto a (cols-1)*factor + 1 grid."""
    h, w = arr.shape
    out_w = (w - 1) * factor + 1
    out = np.empty((h, out_w), dtype=np.float64)
    if w == 1:
        out[:] = arr
        return out
    support = np.clip(np.arange(-1, w + 2), 0, w - 1)  # clamp-to-edge
    padded = arr[:, support]
    neighbors = [padded[:, k : k + w - 1] for k in range(4)]
    for p in range(factor):
        acc = weights[p, 0] * neighbors[0]
        for k in range(1, 4):
            acc += weights[p, k] * neighbors[k]
        out[:, p : (w - 1) * factor : factor] = acc
    out[:, -1] = arr[:, -1]
    return out


def upsample(plane: Plane, factor: int) -> UpsampledReference:
    """Materialize the interpolated reference grid for a plane.

    Separable cubic convolution; with factor 1 the grid is the plane
    itself. The result is built once per reference frame and shared
    read-only across all block searches.
    """
    if factor < 1 or int(factor) != factor:
        raise ValueError(f"upsample factor must be a positive integer, got {factor}")
    factor = int(factor)
    src = plane.samples.astype(np.float64)
    if factor == 1:
        return UpsampledReference(src.astype(np.float32), 1)
    weights = _keys_phase_weights(factor)
    horizontal = _upsample_rows(src, factor, weights)
    full = _upsample_rows(horizontal.T, factor, weights).T
    return UpsampledReference(full.astype(np.float32), factor)


def sample_many(
    ref: UpsampledReference, m: np.ndarray, n: np.ndarray
) -> np.ndarray:
    """Look up continuous pixel coordinates on the upsampled grid.

    Coordinates are rounded to the nearest 1/factor position (ties toward
    +inf) and clamped to the grid, so the lookup is total.
    """
    f = ref.factor
    rows, cols = ref.samples.shape
    i = np.floor(np.asarray(m, dtype=np.float64) * f + 0.5).astype(np.int64)
    j = np.floor(np.asarray(n, dtype=np.float64) * f + 0.5).astype(np.int64)
    np.clip(i, 0, cols - 1, out=i)
    np.clip(j, 0, rows - 1, out=j)
    return ref.samples[j, i]


def sample_at(ref: UpsampledReference, coord: tuple[float, float]) -> float:
    """Scalar convenience wrapper around :func:`sample_many`."""
    return float(sample_many(ref, np.array([coord[0]]), np.array([coord[1]]))[0])
