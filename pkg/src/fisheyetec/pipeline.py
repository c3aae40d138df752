"""Experiment orchestration: config, frame I/O, synthesis, reports.

An experiment is described by one JSON config file. For every tested
frame the pipeline injects block losses into the decoded frame, conceals
them against the clean previous frame with each selected engine, scores
loss-area PSNR against the original, and writes the concealed frames,
a per-block decision overlay, and a machine-readable report. Everything
downstream of the config is deterministic: the same file and seed
produce byte-identical reports.

The built-in synthetic source renders a band-limited random texture
that translates on the perspective plane and is imaged through the
equisolid model, which gives a sequence with exactly the motion
structure the re-projecting engine assumes, plus a known ground truth.
"""

from __future__ import annotations

import json
import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .concealment import (
    ENGINES,
    BlockDecision,
    Method,
    SearchConfig,
    conceal_chroma,
    hetec_conceal_frame,
)
from .geometry import CameraModel, backproject_mm, pixel_to_mm
from .imaging import Frame, Plane, Region, upsample, write_region
from .loss_model import LossMap, LossPattern, inject
from .metrics import EmptyLossSet, FrameScore, Summary, aggregate, psnr_loss_area

CHROMA_FILL = 128

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Experiment configuration rejected; message lists every problem."""


class TruncatedFile(ValueError):
    """Raw video file size is not a whole number of frames."""


class UnknownFormat(ValueError):
    """Input format string not recognized."""


_FORMATS = ("yuv420", "pgm", "png", "synthetic")


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved experiment description. Built from JSON via ``from_file``."""

    fmt: str = "synthetic"
    path: str | None = None
    width: int = 512
    height: int = 512
    focal_length_mm: float = 1.8
    sensor_width_mm: float = 5.2
    sensor_height_mm: float = 5.2
    fov_degrees: float = 120.0
    principal_point: tuple[float, float] | None = None
    search: SearchConfig = field(default_factory=SearchConfig)
    loss_count: int | None = 20
    loss_density: float | None = None
    loss_blocks: tuple[tuple[int, int], ...] | None = None
    loss_seed: int = 7
    min_separation: int = 8
    exclude_outside_circle: bool = True
    frames: tuple[int, int] | None = None
    engines: tuple[str, ...] = ("dmve", "hetec")
    out_dir: str = "out"
    synth_frames: int = 12
    motion_px_per_frame: tuple[float, float] = (3.0, 2.0)
    texture_seed: int = 11
    supersample: int = 3
    n_waves: int = 48
    amplitude: float = 45.0
    wavelength_px: tuple[float, float] = (16.0, 64.0)

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            with open(path, "r", encoding="utf-8") as handle:
                payload = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
        if not isinstance(payload, dict):
            raise ConfigError(f"{path}: top level must be a JSON object")
        return cls.from_dict(payload)

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        problems: list[str] = []

        def section(name: str) -> dict:
            value = payload.get(name, {})
            if not isinstance(value, dict):
                problems.append(f"{name}: must be an object")
                return {}
            return value

        inp = section("input")
        cam = section("camera")
        search = section("search")
        loss = section("loss")

        fmt = inp.get("format", "synthetic")
        frames_range = payload.get("frames")
        if frames_range is not None:
            try:
                a, b = int(frames_range[0]), int(frames_range[1])
                frames_range = (a, b)
            except (TypeError, ValueError, IndexError):
                problems.append("frames: expected [start, end]")
                frames_range = None

        engines = payload.get("engines", ["dmve", "hetec"])
        if isinstance(engines, str):
            engines = [engines]
        engines = tuple(normalize_engine(e, problems) for e in engines)

        blocks = loss.get("blocks")
        if blocks is not None:
            blocks = tuple((int(m), int(n)) for m, n in blocks)

        pp = cam.get("principal_point")
        if pp is not None:
            pp = (float(pp[0]), float(pp[1]))

        motion = inp.get("motion_px_per_frame", (3.0, 2.0))
        wavelengths = inp.get("wavelength_px", (16.0, 64.0))

        try:
            search_cfg = SearchConfig(
                range_px=int(search.get("range_px", 128)),
                block_size=int(search.get("block_size", 16)),
                decision_width=int(search.get("decision_width", 8)),
                upsample_factor=int(search.get("upsample_factor", 8)),
                theta_limit_deg=float(search.get("theta_limit_deg", 89.0)),
            )
        except ValueError as exc:
            problems.append(f"search: {exc}")
            search_cfg = SearchConfig()

        cfg = cls(
            fmt=str(fmt),
            path=inp.get("path"),
            width=int(inp.get("width", 512)),
            height=int(inp.get("height", 512)),
            focal_length_mm=float(cam.get("focal_length_mm", 1.8)),
            sensor_width_mm=float(cam.get("sensor_width_mm", 5.2)),
            sensor_height_mm=float(cam.get("sensor_height_mm", 5.2)),
            fov_degrees=float(cam.get("fov_degrees", 120.0)),
            principal_point=pp,
            search=search_cfg,
            loss_count=None if "density" in loss or blocks else int(loss.get("count", 20)),
            loss_density=float(loss["density"]) if "density" in loss else None,
            loss_blocks=blocks,
            loss_seed=int(loss.get("seed", 7)),
            min_separation=int(loss.get("min_separation", 8)),
            exclude_outside_circle=bool(loss.get("exclude_outside_circle", True)),
            frames=frames_range,
            engines=engines,
            out_dir=str(payload.get("out_dir", "out")),
            synth_frames=int(inp.get("frames", 12)),
            motion_px_per_frame=(float(motion[0]), float(motion[1])),
            texture_seed=int(inp.get("texture_seed", 11)),
            supersample=int(inp.get("supersample", 3)),
            n_waves=int(inp.get("n_waves", 48)),
            amplitude=float(inp.get("amplitude", 45.0)),
            wavelength_px=(float(wavelengths[0]), float(wavelengths[1])),
        )
        problems.extend(cfg._validate())
        if problems:
            raise ConfigError("invalid config:\n  " + "\n  ".join(problems))
        return cfg

    def _validate(self) -> list[str]:
        problems = []
        if self.fmt not in _FORMATS:
            problems.append(f"input.format: {self.fmt!r} not one of {_FORMATS}")
        if self.fmt != "synthetic" and not self.path:
            problems.append("input.path: required for file input")
        if self.width <= 0 or self.height <= 0:
            problems.append("input.width/height: must be positive")
        if self.focal_length_mm <= 0:
            problems.append("camera.focal_length_mm: must be positive")
        if not 0 < self.fov_degrees <= 360:
            problems.append("camera.fov_degrees: must lie in (0, 360]")
        for engine in self.engines:
            if engine not in ENGINES:
                problems.append(f"engines: unknown engine {engine!r}")
        if not self.engines:
            problems.append("engines: at least one required")
        if self.loss_count is not None and self.loss_count < 0:
            problems.append("loss.count: must be non-negative")
        if self.frames is not None and self.frames[0] > self.frames[1]:
            problems.append("frames: start exceeds end")
        if self.frames is not None and self.frames[0] < 1:
            problems.append("frames: start must be >= 1 (frame 0 is reference only)")
        if self.fmt == "synthetic" and self.synth_frames < 2:
            problems.append("input.frames: synthetic sequence needs >= 2 frames")
        if self.supersample < 1:
            problems.append("input.supersample: must be >= 1")
        return problems

    def with_overrides(
        self,
        engine: str | None = None,
        seed: int | None = None,
        frames: tuple[int, int] | None = None,
        out_dir: str | None = None,
    ) -> "ExperimentConfig":
        cfg = self
        if engine is not None:
            problems: list[str] = []
            normalized = normalize_engine(engine, problems)
            if problems:
                raise ConfigError("invalid config:\n  " + "\n  ".join(problems))
            if normalized == "hetec":
                cfg = replace(cfg, engines=("dmve", "hetec"))
            else:
                cfg = replace(cfg, engines=(normalized,))
        if seed is not None:
            cfg = replace(cfg, loss_seed=seed)
        if frames is not None:
            cfg = replace(cfg, frames=frames)
        if out_dir is not None:
            cfg = replace(cfg, out_dir=out_dir)
        problems = cfg._validate()
        if problems:
            raise ConfigError("invalid config:\n  " + "\n  ".join(problems))
        return cfg

    def to_dict(self) -> dict:
        return {
            "input": {
                "format": self.fmt,
                "path": self.path,
                "width": self.width,
                "height": self.height,
                "frames": self.synth_frames,
                "motion_px_per_frame": list(self.motion_px_per_frame),
                "texture_seed": self.texture_seed,
                "supersample": self.supersample,
                "n_waves": self.n_waves,
                "amplitude": self.amplitude,
                "wavelength_px": list(self.wavelength_px),
            },
            "camera": {
                "focal_length_mm": self.focal_length_mm,
                "sensor_width_mm": self.sensor_width_mm,
                "sensor_height_mm": self.sensor_height_mm,
                "fov_degrees": self.fov_degrees,
                "principal_point": list(self.principal_point)
                if self.principal_point
                else None,
            },
            "search": {
                "range_px": self.search.range_px,
                "block_size": self.search.block_size,
                "decision_width": self.search.decision_width,
                "upsample_factor": self.search.upsample_factor,
                "theta_limit_deg": self.search.theta_limit_deg,
            },
            "loss": {
                "count": self.loss_count,
                "density": self.loss_density,
                "blocks": [list(b) for b in self.loss_blocks]
                if self.loss_blocks
                else None,
                "seed": self.loss_seed,
                "min_separation": self.min_separation,
                "exclude_outside_circle": self.exclude_outside_circle,
            },
            "frames": list(self.frames) if self.frames else None,
            "engines": list(self.engines),
        }

    def camera(self) -> CameraModel:
        return CameraModel(
            focal_length_mm=self.focal_length_mm,
            sensor_width_mm=self.sensor_width_mm,
            sensor_height_mm=self.sensor_height_mm,
            image_width=self.width,
            image_height=self.height,
            fov_degrees=self.fov_degrees,
            principal_point=self.principal_point,
        )


def normalize_engine(name: str, problems: list[str] | None = None) -> str:
    """Map CLI spellings onto internal engine ids ("hybrid" -> "hetec")."""
    key = str(name).strip().lower()
    if key == "hybrid":
        return "hetec"
    if key not in ENGINES:
        if problems is not None:
            problems.append(f"engines: unknown engine {name!r}")
            return key
        raise ConfigError(f"unknown engine {name!r}")
    return key


# --- Frame I/O -------------------------------------------------------------


def load_sequence(
    path: str, fmt: str, width: int | None = None, height: int | None = None
) -> list[Frame]:
    """Read a frame sequence from disk.

    ``yuv420`` is planar 8-bit 4:2:0 raw video and needs explicit
    dimensions; ``pgm`` and ``png`` load one luma-only frame each.
    """
    if fmt == "yuv420":
        if not width or not height:
            raise ConfigError("yuv420 input needs width and height")
        if width % 2 or height % 2:
            raise ConfigError("yuv420 dimensions must be even")
        with open(path, "rb") as handle:
            data = handle.read()
        frame_bytes = width * height * 3 // 2
        if len(data) == 0 or len(data) % frame_bytes:
            raise TruncatedFile(
                f"{path}: {len(data)} bytes is not a whole number of "
                f"{width}x{height} 4:2:0 frames ({frame_bytes} bytes each)"
            )
        frames = []
        cw, ch = width // 2, height // 2
        for start in range(0, len(data), frame_bytes):
            raw = np.frombuffer(data, dtype=np.uint8, count=frame_bytes, offset=start)
            y = raw[: width * height].reshape(height, width)
            u = raw[width * height : width * height + cw * ch].reshape(ch, cw)
            v = raw[width * height + cw * ch :].reshape(ch, cw)
            frames.append(
                Frame(Plane.from_array(y), Plane.from_array(u), Plane.from_array(v))
            )
        return frames
    if fmt in ("pgm", "png"):
        from PIL import Image

        with Image.open(path) as img:
            luma = np.asarray(img.convert("L"))
        return [Frame(Plane.from_array(luma))]
    raise UnknownFormat(f"unknown input format {fmt!r}")


def write_pgm(path: str, plane: Plane) -> None:
    header = f"P5\n{plane.width} {plane.height}\n255\n".encode("ascii")
    with open(path, "wb") as handle:
        handle.write(header)
        handle.write(plane.to_uint8().tobytes())


def append_yuv(handle, frame: Frame) -> None:
    handle.write(frame.y.to_uint8().tobytes())
    for plane in (frame.u, frame.v):
        if plane is not None:
            handle.write(plane.to_uint8().tobytes())
        else:
            ch, cw = frame.y.height // 2, frame.y.width // 2
            handle.write(np.full((ch, cw), CHROMA_FILL, dtype=np.uint8).tobytes())


# --- Synthetic source ------------------------------------------------------


def generate_synthetic(
    cam: CameraModel,
    motion_mm_per_frame: tuple[float, float],
    texture_seed: int,
    n_frames: int,
    *,
    supersample: int = 3,
    n_waves: int = 48,
    mean_level: float = 128.0,
    amplitude: float = 45.0,
    wavelength_px: tuple[float, float] = (16.0, 64.0),
) -> list[Frame]:
    """Render an equisolid view of a translating flat random texture.

    The texture is a fixed sum of sinusoids on the perspective plane
    (wavelengths drawn log-uniformly, in units of the sensor pixel
    pitch); frame t sees it displaced by t times the motion vector in
    millimeters. Pixels beyond the field-of-view circle or at 90 degrees
    and over are black. Rendering supersamples each pixel on a regular
    grid and averages, so the circle edge is anti-aliased the same way
    in every frame.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be at least 1")
    rng = np.random.default_rng(texture_seed)
    lo, hi = wavelength_px
    wavelengths = np.exp(rng.uniform(np.log(lo), np.log(hi), n_waves))
    directions = rng.uniform(0.0, 2.0 * np.pi, n_waves)
    phases = rng.uniform(0.0, 2.0 * np.pi, n_waves)
    omega = 2.0 * np.pi / (wavelengths * cam.pitch_x_mm)
    kx = omega * np.cos(directions)
    ky = omega * np.sin(directions)
    amp = np.full(n_waves, amplitude * math.sqrt(2.0 / n_waves))

    s = supersample
    W, H = cam.image_width, cam.image_height
    sub = (np.arange(s, dtype=np.float64) + 0.5) / s - 0.5
    m_coords = (np.arange(W, dtype=np.float64)[:, None] + sub[None, :]).ravel()
    n_coords = (np.arange(H, dtype=np.float64)[:, None] + sub[None, :]).ravel()
    mm_grid, nn_grid = np.meshgrid(m_coords, n_coords)
    x, y = pixel_to_mm(cam, mm_grid, nn_grid)
    r_e = np.hypot(x, y)
    px, py, valid = backproject_mm(cam, x, y, theta_limit_deg=90.0)
    visible = valid & (r_e <= cam.fov_radius_mm)

    flat_x = px[visible]
    flat_y = py[visible]
    vx, vy = motion_mm_per_frame
    drift = kx * vx + ky * vy  # phase advance per frame, per wave

    values = np.zeros((n_frames, flat_x.size), dtype=np.float64)
    chunk = 1 << 16
    for start in range(0, flat_x.size, chunk):
        stop = min(start + chunk, flat_x.size)
        base = kx[:, None] * flat_x[None, start:stop]
        base += ky[:, None] * flat_y[None, start:stop]
        base += phases[:, None]
        sin_base = np.sin(base)
        cos_base = np.cos(base)
        for t in range(n_frames):
            shift = t * drift
            values[t, start:stop] = (amp * np.cos(shift)) @ sin_base - (
                amp * np.sin(shift)
            ) @ cos_base

    frames: list[Frame] = []
    for t in range(n_frames):
        canvas = np.zeros(visible.shape, dtype=np.float64)
        canvas[visible] = mean_level + values[t]
        pixels = canvas.reshape(H, s, W, s).mean(axis=(1, 3))
        quantized = np.clip(np.floor(pixels + 0.5), 0, 255).astype(np.uint8)
        frames.append(Frame(Plane.from_array(quantized)))
    return frames


def synthetic_from_config(cfg: ExperimentConfig) -> list[Frame]:
    cam = cfg.camera()
    motion_mm = (
        cfg.motion_px_per_frame[0] * cam.pitch_x_mm,
        cfg.motion_px_per_frame[1] * cam.pitch_y_mm,
    )
    return generate_synthetic(
        cam,
        motion_mm,
        cfg.texture_seed,
        cfg.synth_frames,
        supersample=cfg.supersample,
        n_waves=cfg.n_waves,
        amplitude=cfg.amplitude,
        wavelength_px=cfg.wavelength_px,
    )


# --- Experiment runner -----------------------------------------------------


@dataclass(frozen=True)
class ExperimentResult:
    report: dict
    report_path: str
    scores: tuple[FrameScore, ...]
    summary: Summary


def frame_loss_seed(base_seed: int, frame_index: int) -> int:
    """Stable per-frame seed derived from the experiment seed."""
    return int(np.random.SeedSequence([base_seed, frame_index]).generate_state(1)[0])


def _losses_for_frame(
    cfg: ExperimentConfig, luma: Plane, cam: CameraModel, frame_index: int
) -> tuple[Plane, LossMap]:
    if cfg.loss_blocks is not None:
        losses = LossMap.from_origins(
            luma.width, luma.height, list(cfg.loss_blocks), cfg.search.block_size
        )
        corrupted = luma.copy()
        for block in losses.blocks:
            corrupted.samples[block.n : block.n_end, block.m : block.m_end] = 0
        return corrupted, losses
    pattern = LossPattern(
        seed=frame_loss_seed(cfg.loss_seed, frame_index),
        count=cfg.loss_count,
        density=cfg.loss_density,
        block_size=cfg.search.block_size,
        min_separation=cfg.min_separation,
        exclude_outside_circle=cfg.exclude_outside_circle,
    )
    return inject(luma, pattern, cam)


def _corrupt_chroma(plane: Plane, losses: LossMap) -> Plane:
    out = plane.copy()
    for block in losses.blocks:
        out.samples[
            block.n // 2 : (block.n_end + 1) // 2,
            block.m // 2 : (block.m_end + 1) // 2,
        ] = CHROMA_FILL
    return out


def _conceal_frame_chroma(
    chroma_lossy: Plane, chroma_ref: Plane, decisions: list[BlockDecision]
) -> Plane:
    out = chroma_lossy.copy()
    for decision in decisions:
        block = decision.block
        samples = conceal_chroma(chroma_ref, block, decision.mv)
        target = Region(
            block.m // 2, block.n // 2, samples.shape[1], samples.shape[0], block.kind
        )
        write_region(out, target, samples)
    return out


def _overlay_image(luma: Plane, decisions: list[BlockDecision]) -> np.ndarray:
    """Decision mask: each lost block tinted by the engine that filled it."""
    gray = luma.to_uint8()
    rgb = np.stack([gray, gray, gray], axis=2).astype(np.float64)
    colors = {Method.ETEC: (255.0, 0.0, 0.0), Method.DMVE: (0.0, 0.0, 255.0)}
    for decision in decisions:
        block = decision.block
        color = np.array(colors[decision.method])
        patch = rgb[block.n : block.n_end, block.m : block.m_end]
        rgb[block.n : block.n_end, block.m : block.m_end] = (
            0.5 * patch + 0.5 * color[None, None, :]
        )
    return np.clip(np.floor(rgb + 0.5), 0, 255).astype(np.uint8)


def _psnr_or_none(orig: Plane, concealed: Plane, losses: LossMap) -> float | None:
    try:
        return psnr_loss_area(orig, concealed, losses)
    except EmptyLossSet:
        return None


def _json_db(value: float | None) -> float | None:
    if value is None or math.isinf(value):
        return None
    return value


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Execute one configured experiment and write its artifacts.

    Creates the output directory if needed. On any failure, files this
    run already wrote are deleted before the error propagates.
    """
    if cfg.fmt == "synthetic":
        frames = synthetic_from_config(cfg)
    else:
        frames = load_sequence(cfg.path, cfg.fmt, cfg.width, cfg.height)
    if len(frames) < 2:
        raise ConfigError(
            f"need at least 2 frames (reference + tested), got {len(frames)}"
        )
    width, height = frames[0].y.width, frames[0].y.height
    cfg_cam = replace(cfg, width=width, height=height)
    cam = cfg_cam.camera()

    first, last = cfg.frames if cfg.frames is not None else (1, len(frames) - 1)
    if not 1 <= first <= last <= len(frames) - 1:
        raise ConfigError(
            f"frames [{first}, {last}] out of range for a {len(frames)}-frame input"
        )

    created_dir = not os.path.isdir(cfg.out_dir)
    os.makedirs(cfg.out_dir, exist_ok=True)
    written: list[str] = []
    yuv_handles: dict[str, object] = {}

    def out_path(name: str) -> str:
        path = os.path.join(cfg.out_dir, name)
        written.append(path)
        return path

    try:
        has_chroma = frames[0].u is not None and frames[0].v is not None
        if has_chroma:
            for engine in cfg.engines:
                yuv_handles[engine] = open(
                    out_path(f"concealed_{engine}.yuv"), "wb"
                )

        scores: list[FrameScore] = []
        frame_rows: list[dict] = []
        for t in range(first, last + 1):
            orig = frames[t]
            ref = frames[t - 1]
            lossy_y, losses = _losses_for_frame(cfg, orig.y, cam, t)
            with open(out_path(f"losses_f{t:04d}.json"), "w", encoding="utf-8") as fh:
                fh.write(losses.to_json())
            write_pgm(out_path(f"lossy_f{t:04d}.pgm"), lossy_y)

            upsampled = None
            if any(engine != "dmve" for engine in cfg.engines) and len(losses):
                upsampled = upsample(ref.y, cfg.search.upsample_factor)

            psnrs: dict[str, float | None] = {}
            decisions_by_engine: dict[str, list[BlockDecision]] = {}
            for engine in cfg.engines:
                concealed_y, decisions = hetec_conceal_frame(
                    lossy_y, ref.y, losses, cam, cfg.search, engine, upsampled
                )
                decisions_by_engine[engine] = decisions
                psnrs[engine] = _psnr_or_none(orig.y, concealed_y, losses)
                write_pgm(out_path(f"concealed_{engine}_f{t:04d}.pgm"), concealed_y)
                if has_chroma:
                    lossy_u = _corrupt_chroma(orig.u, losses)
                    lossy_v = _corrupt_chroma(orig.v, losses)
                    concealed = Frame(
                        concealed_y,
                        _conceal_frame_chroma(lossy_u, ref.u, decisions),
                        _conceal_frame_chroma(lossy_v, ref.v, decisions),
                    )
                    append_yuv(yuv_handles[engine], concealed)
                if engine == "hetec":
                    from PIL import Image

                    overlay = _overlay_image(concealed_y, decisions)
                    Image.fromarray(overlay, mode="RGB").save(
                        out_path(f"overlay_f{t:04d}.png")
                    )

            report_decisions = decisions_by_engine.get(
                "hetec", decisions_by_engine[cfg.engines[0]]
            )
            score = FrameScore(
                frame_index=t,
                psnr_dmve=psnrs.get("dmve"),
                psnr_hetec=psnrs.get("hetec"),
                decisions=tuple(report_decisions),
            )
            scores.append(score)
            log.info(
                "frame %d: %d losses, psnr %s",
                t,
                len(losses),
                {k: None if v is None else round(min(v, 99.99), 2) for k, v in psnrs.items()},
            )
            row = {
                "frame_index": t,
                "psnr_dmve": _json_db(score.psnr_dmve),
                "psnr_hetec": _json_db(score.psnr_hetec),
                "gain": score.gain,
                "blocks": [
                    {
                        "origin": [d.block.m, d.block.n],
                        "method": d.method.value,
                        "mv": [d.mv.dm, d.mv.dn],
                        "ssd_dmve": d.ssd_dmve,
                        "ssd_etec": d.ssd_etec,
                    }
                    for d in report_decisions
                ],
            }
            if "etec" in psnrs:
                row["psnr_etec"] = _json_db(psnrs["etec"])
            frame_rows.append(row)

        summary = aggregate(scores)
        report = {
            "config": cfg_cam.to_dict(),
            "frames": frame_rows,
            "summary": {
                "frames": summary.frames,
                "scored_frames": summary.scored_frames,
                "mean_psnr_dmve": summary.mean_psnr_dmve,
                "mean_psnr_hetec": summary.mean_psnr_hetec,
                "mean_gain": summary.mean_gain,
                "max_gain": summary.max_gain,
                "max_gain_frame": summary.max_gain_frame,
                "etec_blocks": summary.etec_blocks,
                "dmve_blocks": summary.dmve_blocks,
                "etec_fraction": summary.etec_fraction,
            },
        }
        report_path = out_path("report.json")
        with open(report_path, "w", encoding="utf-8") as handle:
            json.dump(report, handle, indent=2)
            handle.write("\n")
    except BaseException:
        for handle in yuv_handles.values():
            handle.close()
        for path in written:
            if os.path.exists(path):
                os.remove(path)
        if created_dir and os.path.isdir(cfg.out_dir) and not os.listdir(cfg.out_dir):
            os.rmdir(cfg.out_dir)
        raise
    for handle in yuv_handles.values():
        handle.close()
    return ExperimentResult(
        report=report,
        report_path=report_path,
        scores=tuple(scores),
        summary=summary,
    )
