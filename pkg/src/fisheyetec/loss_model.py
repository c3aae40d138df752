"""Reproducible injection of isolated block losses.

Losses are square, grid-snapped blocks whose pixels are zeroed in the
corrupted plane. Placements are drawn from a seeded permutation of the
eligible grid cells and accepted greedily under a separation rule that
keeps every block's decision ring clear of every other block's lost
pixels; with the default 8-pixel separation two 16x16 blocks may not
touch, not even at a corner.

By default, grid cells whose pixels all lie outside the fisheye image
circle are not eligible: those regions are black in both the original
and the reference, so "concealing" them would be free and would inflate
any loss-area quality figure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .geometry import CameraModel
from .imaging import DEFAULT_BLOCK_SIZE, Plane, Region, RegionKind, decision_box

DEFAULT_MIN_SEPARATION = 8


class InfeasiblePattern(ValueError):
    """The requested number of losses cannot be placed under the constraints."""


@dataclass(frozen=True)
class LossPattern:
    """Parameters of one frame's loss draw.

    Exactly one of ``count`` and ``density`` must be given; density is
    the fraction of eligible grid cells to corrupt, rounded to the
    nearest whole block.
    """

    seed: int
    count: int | None = None
    density: float | None = None
    block_size: int = DEFAULT_BLOCK_SIZE
    min_separation: int = DEFAULT_MIN_SEPARATION
    exclude_outside_circle: bool = True

    def __post_init__(self) -> None:
        if (self.count is None) == (self.density is None):
            raise ValueError("specify exactly one of count or density")
        if self.count is not None and self.count < 0:
            raise ValueError("count must be non-negative")
        if self.density is not None and not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")
        if self.block_size <= 0:
            raise ValueError("block_size must be positive")
        if self.min_separation < 0:
            raise ValueError("min_separation must be non-negative")


def region_separation(a: Region, b: Region) -> int:
    """Largest axis-aligned boundary gap between two regions.

    Positive values mean the regions are separated by that many clear
    pixels along at least one axis; the decision ring of one block stays
    off the other block exactly when this is at least the ring width.
    """
    gap_m = max(b.m - a.m_end, a.m - b.m_end)
    gap_n = max(b.n - a.n_end, a.n - b.n_end)
    return max(gap_m, gap_n)


@dataclass(frozen=True)
class LossMap:
    """The lost blocks of one frame, in raster order."""

    width: int
    height: int
    blocks: tuple[Region, ...]

    def __post_init__(self) -> None:
        for block in self.blocks:
            if not block.inside(self.width, self.height):
                raise ValueError(
                    f"loss block at ({block.m}, {block.n}) exceeds "
                    f"{self.width}x{self.height} frame"
                )

    def __len__(self) -> int:
        return len(self.blocks)

    def lost_mask(self) -> np.ndarray:
        """Boolean (height, width) mask of all lost pixels."""
        mask = np.zeros((self.height, self.width), dtype=bool)
        for block in self.blocks:
            mask[block.n : block.n_end, block.m : block.m_end] = True
        return mask

    def decision_areas(self, ring_width: int) -> tuple[Region, ...]:
        """Bounding box of each block's decision ring, unclipped."""
        return tuple(decision_box(block, ring_width) for block in self.blocks)

    def to_json(self) -> str:
        payload = {
            "width": self.width,
            "height": self.height,
            "blocks": [
                {"m": b.m, "n": b.n, "width": b.width, "height": b.height}
                for b in self.blocks
            ],
        }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "LossMap":
        payload = json.loads(text)
        blocks = tuple(
            Region(int(b["m"]), int(b["n"]), int(b["width"]), int(b["height"]),
                   RegionKind.LOSS_AREA)
            for b in payload["blocks"]
        )
        return cls(int(payload["width"]), int(payload["height"]), blocks)

    @classmethod
    def from_origins(
        cls,
        width: int,
        height: int,
        origins: "list[tuple[int, int]]",
        block_size: int = DEFAULT_BLOCK_SIZE,
    ) -> "LossMap":
        blocks = tuple(
            Region(m, n, block_size, block_size, RegionKind.LOSS_AREA)
            for m, n in sorted(origins, key=lambda o: (o[1], o[0]))
        )
        return cls(width, height, blocks)


def _eligible_cells(
    width: int, height: int, pattern: LossPattern, cam: CameraModel | None
) -> list[tuple[int, int]]:
    """Grid origins (m, n) where a loss block may legally land."""
    size = pattern.block_size
    cells = [
        (m, n)
        for n in range(0, height - size + 1, size)
        for m in range(0, width - size + 1, size)
    ]
    if not (pattern.exclude_outside_circle and cam is not None):
        return cells
    radius = cam.fov_radius_mm
    keep = []
    for m, n in cells:
        mm_idx, nn_idx = np.meshgrid(
            np.arange(m, m + size), np.arange(n, n + size), indexing="xy"
        )
        x = (mm_idx - cam.principal_point[0]) * cam.pitch_x_mm
        y = (nn_idx - cam.principal_point[1]) * cam.pitch_y_mm
        r = np.hypot(x, y)
        if r.min() <= radius:
            keep.append((m, n))
    return keep


def inject(
    frame: Plane, pattern: LossPattern, cam: CameraModel | None = None
) -> tuple[Plane, LossMap]:
    """Corrupt a plane with isolated block losses.

    Returns the corrupted plane (lost pixels zeroed) and the map of lost
    blocks. Placement walks a seeded permutation of the eligible grid
    cells, accepting each cell whose separation from every accepted block
    meets ``min_separation``; the draw is deterministic in the seed.

    Raises ``InfeasiblePattern`` when fewer than the requested number of
    blocks fit.
    """
    cells = _eligible_cells(frame.width, frame.height, pattern, cam)
    if pattern.count is not None:
        wanted = pattern.count
    else:
        wanted = int(round(pattern.density * len(cells)))
    if wanted == 0:
        return frame.copy(), LossMap(frame.width, frame.height, ())
    if wanted > len(cells):
        raise InfeasiblePattern(
            f"{wanted} blocks requested but only {len(cells)} eligible cells"
        )

    rng = np.random.default_rng(pattern.seed)
    order = rng.permutation(len(cells))
    size = pattern.block_size
    accepted: list[Region] = []
    for idx in order:
        m, n = cells[idx]
        candidate = Region(m, n, size, size, RegionKind.LOSS_AREA)
        if all(
            region_separation(candidate, prev) >= pattern.min_separation
            for prev in accepted
        ):
            accepted.append(candidate)
            if len(accepted) == wanted:
                break
    if len(accepted) < wanted:
        raise InfeasiblePattern(
            f"placed {len(accepted)} of {wanted} blocks before running out of "
            f"cells satisfying min_separation={pattern.min_separation}"
        )

    accepted.sort(key=lambda b: (b.n, b.m))
    losses = LossMap(frame.width, frame.height, tuple(accepted))
    corrupted = frame.copy()
    for block in losses.blocks:
        corrupted.samples[block.n : block.n_end, block.m : block.m_end] = 0
    return corrupted, losses
