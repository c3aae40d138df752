"""Temporal error concealment for equisolid fisheye video.

The package recovers lost 16x16 blocks of a decoded frame from the
previous frame. Two engines are provided: a conventional decision-area
motion search that copies a translated block from the reference, and a
variant that performs the same search on the perspective re-projection
of the fisheye image so that straight-line camera motion stays
translational away from the image center. A hybrid mode runs both and
keeps whichever matched the received surroundings better, block by
block.
"""

from __future__ import annotations

from .geometry import (
    CameraModel,
    Domain,
    DomainOverflow,
    InvalidRadius,
    PolarCoord,
    equisolid_to_perspective,
    perspective_to_equisolid,
    shift_in_perspective,
)
from .concealment import (
    BlockDecision,
    InfeasibleBlock,
    Method,
    MotionVector,
    SearchConfig,
    dmve_conceal,
    dmve_search,
    etec_conceal,
    etec_search,
    hetec_conceal_frame,
)
from .imaging import Frame, Plane, Region, RegionKind, UpsampledReference, upsample
from .loss_model import InfeasiblePattern, LossMap, LossPattern, inject
from .metrics import EmptyLossSet, FrameScore, Summary, aggregate, psnr_loss_area
from .pipeline import (
    ConfigError,
    ExperimentConfig,
    TruncatedFile,
    UnknownFormat,
    generate_synthetic,
    load_sequence,
    run_experiment,
)

__all__ = [
    "CameraModel",
    "Domain",
    "DomainOverflow",
    "InvalidRadius",
    "PolarCoord",
    "equisolid_to_perspective",
    "perspective_to_equisolid",
    "shift_in_perspective",
    "Frame",
    "Plane",
    "Region",
    "RegionKind",
    "UpsampledReference",
    "upsample",
    "LossPattern",
    "LossMap",
    "InfeasiblePattern",
    "inject",
    "Method",
    "MotionVector",
    "SearchConfig",
    "BlockDecision",
    "InfeasibleBlock",
    "dmve_search",
    "dmve_conceal",
    "etec_search",
    "etec_conceal",
    "hetec_conceal_frame",
    "EmptyLossSet",
    "FrameScore",
    "Summary",
    "aggregate",
    "psnr_loss_area",
    "ConfigError",
    "TruncatedFile",
    "UnknownFormat",
    "ExperimentConfig",
    "generate_synthetic",
    "load_sequence",
    "run_experiment",
]

__version__ = "0.1.0"
