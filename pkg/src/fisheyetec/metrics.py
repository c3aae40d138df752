"""Quality accounting over loss areas.

PSNR is computed on luminance only and only over the pixels that were
actually lost; received pixels are identical by construction and would
dilute the comparison. A frame whose loss areas are recovered exactly
has infinite PSNR: such values are carried as ``math.inf``, shown
capped at 99.99 dB, and a frame is dropped from averages only when
every engine recovered it exactly (otherwise the cap substitutes, which
keeps per-frame gains defined).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .concealment import BlockDecision, Method
from .imaging import Plane
from .loss_model import LossMap

PEAK_VALUE = 255
DISPLAY_CAP_DB = 99.99


class EmptyLossSet(ValueError):
    """PSNR requested over a frame with no lost pixels."""


def psnr_loss_area(orig: Plane, concealed: Plane, losses: LossMap) -> float:
    """Luminance PSNR restricted to the lost pixels.

    Returns ``math.inf`` for an exact recovery.
    """
    if orig.samples.shape != concealed.samples.shape:
        raise ValueError(
            f"plane shapes differ: {orig.samples.shape} vs {concealed.samples.shape}"
        )
    if len(losses) == 0:
        raise EmptyLossSet("no lost pixels to score")
    mask = losses.lost_mask()
    diff = orig.samples[mask].astype(np.int64) - concealed.samples[mask]
    sse = int(np.sum(diff * diff))
    if sse == 0:
        return math.inf
    mse = sse / diff.size
    return 10.0 * math.log10(PEAK_VALUE * PEAK_VALUE / mse)


def display_db(psnr: float | None) -> float | None:
    """Cap infinite PSNR for human-readable output."""
    if psnr is None:
        return None
    return min(psnr, DISPLAY_CAP_DB)


@dataclass(frozen=True)
class FrameScore:
    """Per-frame scores and decisions; ``None`` marks an engine not run."""

    frame_index: int
    psnr_dmve: float | None
    psnr_hetec: float | None
    decisions: tuple[BlockDecision, ...] = field(default=())

    @property
    def etec_blocks(self) -> int:
        return sum(1 for d in self.decisions if d.method is Method.ETEC)

    @property
    def dmve_blocks(self) -> int:
        return sum(1 for d in self.decisions if d.method is Method.DMVE)

    @property
    def gain(self) -> float | None:
        """Hybrid minus conventional, with exact recoveries capped.

        ``None`` when either engine was not run or both were exact (no
        meaningful difference to report).
        """
        if self.psnr_dmve is None or self.psnr_hetec is None:
            return None
        if math.isinf(self.psnr_dmve) and math.isinf(self.psnr_hetec):
            return None
        return _capped(self.psnr_hetec) - _capped(self.psnr_dmve)


def _capped(value: float) -> float:
    return DISPLAY_CAP_DB if math.isinf(value) else value


@dataclass(frozen=True)
class Summary:
    frames: int
    scored_frames: int
    mean_psnr_dmve: float | None
    mean_psnr_hetec: float | None
    mean_gain: float | None
    max_gain: float | None
    max_gain_frame: int | None
    etec_blocks: int
    dmve_blocks: int

    @property
    def etec_fraction(self) -> float | None:
        total = self.etec_blocks + self.dmve_blocks
        return self.etec_blocks / total if total else None


def aggregate(scores: "list[FrameScore] | tuple[FrameScore, ...]") -> Summary:
    """Average scores over frames and find the best per-frame gain.

    Frames where every engine that ran recovered the loss areas exactly
    carry no information and are left out of the averages; a single
    exact engine is capped instead so its frame still counts.
    """
    scores = list(scores)
    if not scores:
        raise ValueError("cannot aggregate an empty score list")

    def informative(s: FrameScore) -> bool:
        ran = [p for p in (s.psnr_dmve, s.psnr_hetec) if p is not None]
        return bool(ran) and not all(math.isinf(p) for p in ran)

    scored = [s for s in scores if informative(s)]

    def mean_of(values: "list[float]") -> float | None:
        return sum(values) / len(values) if values else None

    mean_dmve = mean_of([_capped(s.psnr_dmve) for s in scored if s.psnr_dmve is not None])
    mean_hetec = mean_of(
        [_capped(s.psnr_hetec) for s in scored if s.psnr_hetec is not None]
    )
    gains = [(s.gain, s.frame_index) for s in scored if s.gain is not None]
    mean_gain = mean_of([g for g, _ in gains])
    if gains:
        max_gain, max_gain_frame = max(gains, key=lambda pair: pair[0])
    else:
        max_gain, max_gain_frame = None, None
    return Summary(
        frames=len(scores),
        scored_frames=len(scored),
        mean_psnr_dmve=mean_dmve,
        mean_psnr_hetec=mean_hetec,
        mean_gain=mean_gain,
        max_gain=max_gain,
        max_gain_frame=max_gain_frame,
        etec_blocks=sum(s.etec_blocks for s in scores),
        dmve_blocks=sum(s.dmve_blocks for s in scores),
    )
