"""Camera model and equisolid/perspective coordinate transforms.

An equisolid fisheye lens maps light arriving at incident angle theta onto
the sensor at radius r = 2*f*sin(theta/2) from the optical center, while a
pinhole (perspective) lens maps it to r = f*tan(theta). Both mappings are
purely radial, so a point keeps its polar angle in either domain and
converting between them reduces to rescaling the radius:

    equisolid  -> perspective:  r_p = f * tan(2 * arcsin(r_e / (2*f)))
    perspective -> equisolid:   r_e = 2 * f * sin(arctan(r_p / f) / 2)

The perspective radius diverges as theta approaches 90 degrees, so the
back-projection is usable only strictly below that. ``theta_limit_deg``
(default 89) is the configured cutoff: a coordinate whose incident angle
reaches it is declared perspective-infeasible. 89 degrees leaves float
headroom, since tan(89 deg) is still a modest ~57.3.

Conventions:
  * All lengths are millimeters on the sensor plane unless the name says
    otherwise.
  * Pixel coordinates are continuous and sample-centered: pixel (m, n) has
    its center at coordinate (m, n), m horizontal and n vertical.
  * The principal point defaults to ((width-1)/2, (height-1)/2) so the
    geometric image center maps exactly to radius zero.
  * Pixel pitch is carried per axis (sensor size / resolution), so
    anisotropic sensors are supported directly.

Everything here is a pure function of immutable inputs and is safe for
unrestricted concurrent use. Scalar functions operate on ``PolarCoord``
values and raise on domain violations; the ``*_mm`` array helpers mirror
the same math over numpy arrays and report validity through masks, which
is what the block-search inner loops consume.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_THETA_LIMIT_DEG = 89.0

_TWO_PI = 2.0 * math.pi


class DomainOverflow(ValueError):
    """Incident angle at or beyond the perspective feasibility cutoff."""


class InvalidRadius(ValueError):
    """Equisolid radius larger than 2*f, outside the projection's range."""


class Domain(enum.Enum):
    """Which projection a coordinate lives in."""

    EQUISOLID = "equisolid"
    PERSPECTIVE = "perspective"


def wrap_angle(angle: float) -> float:
    """Wrap an angle in radians into [-pi, pi)."""
    return (angle + math.pi) % _TWO_PI - math.pi


@dataclass(frozen=True)
class PolarCoord:
    """Polar sensor-plane coordinate: radius in mm, angle in [-pi, pi)."""

    radius: float
    angle: float
    domain: Domain

    def __post_init__(self) -> None:
        if self.radius < 0.0:
            raise ValueError(f"radius must be non-negative, got {self.radius}")
        if not (-math.pi <= self.angle < math.pi):
            raise ValueError(f"angle must lie in [-pi, pi), got {self.angle}")


@dataclass(frozen=True)
class CameraModel:
    """Equisolid fisheye camera: optics plus sensor/raster geometry.

    ``principal_point`` is a continuous (x, y) pixel coordinate; when left
    unset it resolves to the sample-centered image middle.
    """

    focal_length_mm: float
    sensor_width_mm: float
    sensor_height_mm: float
    image_width: int
    image_height: int
    fov_degrees: float
    principal_point: tuple[float, float] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.focal_length_mm <= 0.0:
            raise ValueError("focal_length_mm must be positive")
        if self.sensor_width_mm <= 0.0 or self.sensor_height_mm <= 0.0:
            raise ValueError("sensor dimensions must be positive")
        if self.image_width <= 0 or self.image_height <= 0:
            raise ValueError("image dimensions must be positive")
        if not (0.0 < self.fov_degrees <= 360.0):
            raise ValueError("fov_degrees must lie in (0, 360]")
        if self.principal_point is None:
            center = ((self.image_width - 1) / 2.0, (self.image_height - 1) / 2.0)
            object.__setattr__(self, "principal_point", center)
        else:
            object.__setattr__(
                self,
                "principal_point",
                (float(self.principal_point[0]), float(self.principal_point[1])),
            )

    @property
    def pitch_x_mm(self) -> float:
        """Horizontal pixel pitch in mm/pixel."""
        return self.sensor_width_mm / self.image_width

    @property
    def pitch_y_mm(self) -> float:
        """Vertical pixel pitch in mm/pixel."""
        return self.sensor_height_mm / self.image_height

    @property
    def fov_radius_mm(self) -> float:
        """Sensor radius of the fisheye circle: 2*f*sin(min(fov/2, 180)/2)."""
        half_fov = min(self.fov_degrees / 2.0, 180.0)
        return 2.0 * self.focal_length_mm * math.sin(math.radians(half_fov) / 2.0)


def pixel_to_sensor(p: tuple[float, float], cam: CameraModel) -> PolarCoord:
    """Convert a continuous pixel coordinate to an equisolid polar coordinate."""
    dx = (p[0] - cam.principal_point[0]) * cam.pitch_x_mm
    dy = (p[1] - cam.principal_point[1]) * cam.pitch_y_mm
    radius = math.hypot(dx, dy)
    angle = wrap_angle(math.atan2(dy, dx))
    return PolarCoord(radius, angle, Domain.EQUISOLID)


def sensor_to_pixel(c: PolarCoord, cam: CameraModel) -> tuple[float, float]:
    """Inverse of :func:`pixel_to_sensor`; composes with it to identity."""
    _require_domain(c, Domain.EQUISOLID)
    x = c.radius * math.cos(c.angle) / cam.pitch_x_mm + cam.principal_point[0]
    y = c.radius * math.sin(c.angle) / cam.pitch_y_mm + cam.principal_point[1]
    return (x, y)


def incident_angle(c: PolarCoord, cam: CameraModel) -> float:
    """Incident angle theta in radians for an equisolid coordinate."""
    _require_domain(c, Domain.EQUISOLID)
    s = c.radius / (2.0 * cam.focal_length_mm)
    if s > 1.0:
        raise InvalidRadius(
            f"equisolid radius {c.radius} mm exceeds 2*f = "
            f"{2.0 * cam.focal_length_mm} mm"
        )
    return 2.0 * math.asin(s)


def equisolid_to_perspective(
    c: PolarCoord,
    cam: CameraModel,
    theta_limit_deg: float = DEFAULT_THETA_LIMIT_DEG,
) -> PolarCoord:
    """Back-project an equisolid coordinate into the perspective domain.

    Raises ``InvalidRadius`` if the radius exceeds 2*f, and
    ``DomainOverflow`` if the incident angle reaches ``theta_limit_deg``.
    The angle component is passed through untouched.
    """
    theta = incident_angle(c, cam)
    if theta >= math.radians(theta_limit_deg):
        raise DomainOverflow(
            f"incident angle {math.degrees(theta):.3f} deg is at or beyond "
            f"the {theta_limit_deg} deg perspective feasibility limit"
        )
    r_p = cam.focal_length_mm * math.tan(theta)
    return PolarCoord(r_p, c.angle, Domain.PERSPECTIVE)


def perspective_to_equisolid(c: PolarCoord, cam: CameraModel) -> PolarCoord:
    """Re-project a perspective coordinate into the equisolid domain.

    Total on radius >= 0; the result radius is always below
    2*f*sin(45 deg) because arctan never reaches 90 degrees. The angle
    component is passed through untouched.
    """
    _require_domain(c, Domain.PERSPECTIVE)
    f = cam.focal_length_mm
    r_e = 2.0 * f * math.sin(0.5 * math.atan(c.radius / f))
    return PolarCoord(r_e, c.angle, Domain.EQUISOLID)


def shift_in_perspective(
    c: PolarCoord,
    mv_px: tuple[int, int],
    cam: CameraModel,
    theta_limit_deg: float = DEFAULT_THETA_LIMIT_DEG,
) -> PolarCoord:
    """Displace an equisolid coordinate by a perspective-domain motion vector.

    The coordinate is back-projected, shifted by ``mv_px`` converted to mm
    through the per-axis pixel pitch (motion vectors are Cartesian in the
    perspective domain), and re-projected. Propagates ``DomainOverflow``
    from the back-projection.
    """
    p = equisolid_to_perspective(c, cam, theta_limit_deg)
    x = p.radius * math.cos(p.angle) + mv_px[0] * cam.pitch_x_mm
    y = p.radius * math.sin(p.angle) + mv_px[1] * cam.pitch_y_mm
    shifted = PolarCoord(math.hypot(x, y), wrap_angle(math.atan2(y, x)), Domain.PERSPECTIVE)
    return perspective_to_equisolid(shifted, cam)


def _require_domain(c: PolarCoord, expected: Domain) -> None:
    if c.domain is not expected:
        raise ValueError(f"expected a {expected.value} coordinate, got {c.domain.value}")


# --- Array helpers -------------------------------------------------------
#
# The block-search loops evaluate the transforms above over millions of
# (pixel, candidate) pairs per lost block. These vectorized versions share
# the exact formulas; validity is reported as a mask instead of raising.


def pixel_to_mm(
    cam: CameraModel, m: np.ndarray, n: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Pixel coordinates to Cartesian mm offsets from the principal point."""
    x = (np.asarray(m, dtype=np.float64) - cam.principal_point[0]) * cam.pitch_x_mm
    y = (np.asarray(n, dtype=np.float64) - cam.principal_point[1]) * cam.pitch_y_mm
    return x, y


def mm_to_pixel(
    cam: CameraModel, x: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Cartesian mm offsets from the principal point to pixel coordinates."""
    m = x / cam.pitch_x_mm + cam.principal_point[0]
    n = y / cam.pitch_y_mm + cam.principal_point[1]
    return m, n


def backproject_mm(
    cam: CameraModel,
    x: np.ndarray,
    y: np.ndarray,
    theta_limit_deg: float = DEFAULT_THETA_LIMIT_DEG,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Equisolid Cartesian mm to perspective Cartesian mm, with validity mask.

    A point is valid when its incident angle is strictly below the limit,
    which in radius terms is r_e < 2*f*sin(theta_limit/2); this also rules
    out radii beyond 2*f. Invalid entries are returned as zeros.
    """
    f = cam.focal_length_mm
    r_e = np.sqrt(x * x + y * y)
    s = r_e / (2.0 * f)
    valid = s < math.sin(math.radians(theta_limit_deg) / 2.0)
    s_safe = np.where(valid, s, 0.0)
    r_p = f * np.tan(2.0 * np.arcsin(s_safe))
    scale = np.divide(r_p, r_e, out=np.ones_like(r_p), where=r_e > 0.0)
    scale = np.where(valid, scale, 0.0)
    return x * scale, y * scale, valid


def reproject_mm(
    cam: CameraModel, x: np.ndarray, y: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Perspective Cartesian mm to equisolid Cartesian mm. Total."""
    f = cam.focal_length_mm
    r_p = np.sqrt(x * x + y * y)
    r_e = 2.0 * f * np.sin(0.5 * np.arctan(r_p / f))
    scale = np.divide(r_e, r_p, out=np.ones_like(r_p), where=r_p > 0.0)
    return x * scale, y * scale
