"""Motion-compensated concealment of lost blocks.

Three engines share one structure. Each lost 16x16 block is surrounded
by an 8-pixel decision ring of received pixels; a candidate motion
vector is scored by the sum of squared differences between the ring in
the current frame and the displaced ring in the previous frame, and the
best candidate fills the block from the previous frame.

The conventional engine ("dmve") displaces the ring on the integer
pixel grid of the fisheye image itself. The re-projecting engine
("etec") back-projects every ring pixel to the perspective plane of an
equisolid camera model, applies the candidate there in millimeters, and
re-projects, so that a straight camera translation remains a single
shared displacement even far from the image center where the fisheye
grid warps it. The hybrid ("hetec") runs both and keeps, per block,
whichever engine's best SSD is smaller.

Blocks whose surroundings reach the model's incident-angle limit cannot
be re-projected and always fall back to the conventional engine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import (
    DEFAULT_THETA_LIMIT_DEG,
    CameraModel,
    backproject_mm,
    mm_to_pixel,
    pixel_to_mm,
    reproject_mm,
)
from .imaging import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_DECISION_WIDTH,
    DEFAULT_UPSAMPLE_FACTOR,
    Plane,
    Region,
    UpsampledReference,
    decision_ring_pixels,
    region_pixels,
    upsample,
    write_region,
)
from .loss_model import LossMap

DEFAULT_SEARCH_RANGE = 128

ENGINES = ("dmve", "etec", "hetec")

_DMVE_CHUNK = 4096
_ETEC_CHUNK = 512


class InfeasibleBlock(ValueError):
    """Re-projection requested for a block outside the usable field of view."""


class Method(enum.Enum):
    DMVE = "dmve"
    ETEC = "etec"


@dataclass(frozen=True)
class MotionVector:
    """Integer displacement (dm horizontal, dn vertical).

    Units are pixels of the grid the owning engine searches on: the
    fisheye image grid for the conventional engine, steps of one pixel
    pitch on the perspective plane for the re-projecting engine.
    """

    dm: int
    dn: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.dm, self.dn)


@dataclass(frozen=True)
class SearchConfig:
    range_px: int = DEFAULT_SEARCH_RANGE
    block_size: int = DEFAULT_BLOCK_SIZE
    decision_width: int = DEFAULT_DECISION_WIDTH
    upsample_factor: int = DEFAULT_UPSAMPLE_FACTOR
    theta_limit_deg: float = DEFAULT_THETA_LIMIT_DEG

    def __post_init__(self) -> None:
        if self.range_px < 0:
            raise ValueError("range_px must be non-negative")
        if self.block_size <= 0 or self.decision_width <= 0:
            raise ValueError("block_size and decision_width must be positive")
        if self.upsample_factor < 1:
            raise ValueError("upsample_factor must be at least 1")

    @property
    def candidate_count(self) -> int:
        return (2 * self.range_px + 1) ** 2


@dataclass(frozen=True)
class BlockDecision:
    """Outcome of concealing one lost block."""

    block: Region
    method: Method
    mv: MotionVector
    ssd_dmve: float | None
    ssd_etec: float | None
    feasible_etec: bool


def candidate_offsets(range_px: int) -> np.ndarray:
    """All integer candidates in scan order: dn outer, dm inner, (-R,-R) first.

    Returned as an (count, 2) array with columns (dm, dn); ties in the
    searches resolve to the earliest index here.
    """
    span = np.arange(-range_px, range_px + 1, dtype=np.int32)
    dn, dm = np.meshgrid(span, span, indexing="ij")
    return np.stack([dm.ravel(), dn.ravel()], axis=1)


def _ring(
    cur: Plane, block: Region, cfg: SearchConfig, exclude_mask: np.ndarray | None
) -> tuple[np.ndarray, np.ndarray]:
    return decision_ring_pixels(
        block, cfg.decision_width, cur.width, cur.height, exclude_mask
    )


def dmve_search(
    cur: Plane,
    ref: Plane,
    block: Region,
    cfg: SearchConfig,
    exclude_mask: np.ndarray | None = None,
) -> tuple[MotionVector, int]:
    """Exhaustive integer-grid motion search over the decision ring.

    Returns the first candidate (in scan order) attaining the minimum
    SSD, with the SSD itself. Reference reads past the image edge clamp
    to the border. A ring left empty by clipping and exclusions carries
    no evidence, so the zero vector is returned with SSD 0.
    """
    nn, mm = _ring(cur, block, cfg, exclude_mask)
    if nn.size == 0:
        return MotionVector(0, 0), 0
    cur_vals = cur.samples[nn, mm]
    height, width = ref.samples.shape
    offsets = candidate_offsets(cfg.range_px)
    best_ssd = -1
    best_index = 0
    for start in range(0, len(offsets), _DMVE_CHUNK):
        chunk = offsets[start : start + _DMVE_CHUNK]
        idx_m = np.clip(mm[None, :] + chunk[:, 0:1], 0, width - 1)
        idx_n = np.clip(nn[None, :] + chunk[:, 1:2], 0, height - 1)
        diff = ref.samples[idx_n, idx_m] - cur_vals[None, :]
        ssd = np.sum(diff * diff, axis=1, dtype=np.int64)
        local = int(np.argmin(ssd))
        if best_ssd < 0 or ssd[local] < best_ssd:
            best_ssd = int(ssd[local])
            best_index = start + local
    dm, dn = offsets[best_index]
    return MotionVector(int(dm), int(dn)), best_ssd


def dmve_conceal(ref: Plane, block: Region, mv: MotionVector) -> np.ndarray:
    """Copy the displaced block from the reference, clamped at edges."""
    nn, mm = region_pixels(block)
    idx_m = np.clip(mm + mv.dm, 0, ref.width - 1)
    idx_n = np.clip(nn + mv.dn, 0, ref.height - 1)
    return ref.samples[idx_n, idx_m].reshape(block.height, block.width)


def _block_feasible(
    cam: CameraModel,
    block: Region,
    cfg: SearchConfig,
    frame_width: int,
    frame_height: int,
) -> bool:
    """True when every ring and block pixel back-projects below the angle limit."""
    box_nn, box_mm = decision_ring_pixels(
        block, cfg.decision_width, frame_width, frame_height
    )
    loss_nn, loss_mm = region_pixels(block)
    nn = np.concatenate([box_nn, loss_nn])
    mm = np.concatenate([box_mm, loss_mm])
    x, y = pixel_to_mm(cam, mm.astype(np.float64), nn.astype(np.float64))
    _, _, valid = backproject_mm(cam, x, y, cfg.theta_limit_deg)
    return bool(valid.all())


def etec_search(
    cur: Plane,
    ref: UpsampledReference,
    block: Region,
    cam: CameraModel,
    cfg: SearchConfig,
    exclude_mask: np.ndarray | None = None,
) -> tuple[MotionVector, float, bool]:
    """Motion search with per-pixel re-projection through the perspective plane.

    Each candidate shifts the back-projected ring by whole pixel pitches
    in perspective millimeters; the shifted positions are re-projected
    and read from the interpolated reference. Infeasibility (any ring or
    block pixel at or beyond the angle limit) is reported, not raised,
    so the caller can fall back to the conventional engine.
    """
    if not _block_feasible(cam, block, cfg, cur.width, cur.height):
        return MotionVector(0, 0), math.inf, False
    nn, mm = _ring(cur, block, cfg, exclude_mask)
    if nn.size == 0:
        return MotionVector(0, 0), 0.0, True
    cur_vals = cur.samples[nn, mm].astype(np.float64)
    x, y = pixel_to_mm(cam, mm.astype(np.float64), nn.astype(np.float64))
    px, py, _ = backproject_mm(cam, x, y, cfg.theta_limit_deg)

    offsets = candidate_offsets(cfg.range_px)
    best_ssd = math.inf
    best_index = 0
    for start in range(0, len(offsets), _ETEC_CHUNK):
        chunk = offsets[start : start + _ETEC_CHUNK].astype(np.float64)
        shifted_x = px[None, :] + chunk[:, 0:1] * cam.pitch_x_mm
        shifted_y = py[None, :] + chunk[:, 1:2] * cam.pitch_y_mm
        ex, ey = reproject_mm(cam, shifted_x, shifted_y)
        em, en = mm_to_pixel(cam, ex, ey)
        diff = _sample_grid(ref, em, en) - cur_vals[None, :]
        ssd = np.sum(diff * diff, axis=1)
        local = int(np.argmin(ssd))
        if ssd[local] < best_ssd:
            best_ssd = float(ssd[local])
            best_index = start + local
    dm, dn = offsets[best_index]
    return MotionVector(int(dm), int(dn)), best_ssd, True


def _sample_grid(ref: UpsampledReference, m: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Vector lookup on the upsampled grid, returning float64."""
    f = ref.factor
    rows, cols = ref.samples.shape
    i = np.floor(m * f + 0.5).astype(np.int64)
    j = np.floor(n * f + 0.5).astype(np.int64)
    np.clip(i, 0, cols - 1, out=i)
    np.clip(j, 0, rows - 1, out=j)
    return ref.samples[j, i].astype(np.float64)


def etec_conceal(
    ref: UpsampledReference,
    block: Region,
    mv: MotionVector,
    cam: CameraModel,
    theta_limit_deg: float = DEFAULT_THETA_LIMIT_DEG,
) -> np.ndarray:
    """Fill a block by re-projected sampling of the reference.

    Feasibility is re-derived from the block's own pixels (the ring is
    not needed to synthesize); calling this on a block outside the angle
    limit raises ``InfeasibleBlock``.
    """
    nn, mm = region_pixels(block)
    x, y = pixel_to_mm(cam, mm.astype(np.float64), nn.astype(np.float64))
    px, py, valid = backproject_mm(cam, x, y, theta_limit_deg)
    if not valid.all():
        raise InfeasibleBlock(
            f"block at ({block.m}, {block.n}) has pixels beyond "
            f"{theta_limit_deg} degrees incident angle"
        )
    ex, ey = reproject_mm(cam, px + mv.dm * cam.pitch_x_mm, py + mv.dn * cam.pitch_y_mm)
    em, en = mm_to_pixel(cam, ex, ey)
    values = _sample_grid(ref, em, en)
    rounded = np.floor(values + 0.5)
    return np.clip(rounded, 0, 255).astype(np.int32).reshape(block.height, block.width)


def scale_mv_for_chroma(mv: MotionVector) -> MotionVector:
    """Halve a luma motion vector for 4:2:0 chroma, rounding half up."""
    return MotionVector(
        int(math.floor(mv.dm / 2 + 0.5)), int(math.floor(mv.dn / 2 + 0.5))
    )


def conceal_chroma(
    ref_chroma: Plane, luma_block: Region, mv: MotionVector
) -> np.ndarray:
    """Chroma samples for a lost luma block, by displaced copy.

    Both engines reuse the luma-selected vector, halved for the 4:2:0
    grid; chroma is carried for viewing only and is never scored.
    """
    cb = Region(
        luma_block.m // 2,
        luma_block.n // 2,
        max(luma_block.width // 2, 1),
        max(luma_block.height // 2, 1),
        luma_block.kind,
    )
    return dmve_conceal(ref_chroma, cb, scale_mv_for_chroma(mv))


def hetec_conceal_frame(
    cur: Plane,
    ref: Plane,
    losses: LossMap,
    cam: CameraModel,
    cfg: SearchConfig,
    engine: str = "hetec",
    upsampled: UpsampledReference | None = None,
) -> tuple[Plane, list[BlockDecision]]:
    """Conceal every lost block of a frame with the selected engine.

    "dmve" always copies on the fisheye grid; "etec" re-projects wherever
    feasible and falls back otherwise; "hetec" runs both searches and
    keeps the smaller SSD per block, ties going to the re-projecting
    engine. Received pixels pass through unchanged. Pixels lost to one
    block are excluded from every other block's ring so both engines
    score the same received set.
    """
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {ENGINES}")
    out = cur.copy()
    decisions: list[BlockDecision] = []
    if len(losses) == 0:
        return out, decisions
    exclude_mask = losses.lost_mask()
    want_etec = engine != "dmve"
    if want_etec and upsampled is None:
        upsampled = upsample(ref, cfg.upsample_factor)

    for block in losses.blocks:
        mv_d, ssd_d = dmve_search(cur, ref, block, cfg, exclude_mask)
        if want_etec:
            mv_e, ssd_e, feasible = etec_search(
                cur, upsampled, block, cam, cfg, exclude_mask
            )
        else:
            mv_e, ssd_e, feasible = MotionVector(0, 0), math.inf, False

        if engine == "etec":
            use_etec = feasible
        elif engine == "hetec":
            use_etec = feasible and ssd_e <= ssd_d
        else:
            use_etec = False

        if use_etec:
            samples = etec_conceal(upsampled, block, mv_e, cam, cfg.theta_limit_deg)
            method, mv = Method.ETEC, mv_e
        else:
            samples = dmve_conceal(ref, block, mv_d)
            method, mv = Method.DMVE, mv_d
        write_region(out, block, samples)
        decisions.append(
            BlockDecision(
                block=block,
                method=method,
                mv=mv,
                ssd_dmve=float(ssd_d),
                ssd_etec=float(ssd_e) if feasible else None,
                feasible_etec=feasible,
            )
        )
    return out, decisions
