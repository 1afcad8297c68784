"""sRGB (D65) to CIELAB conversion and b* channel extraction."""
from dataclasses import dataclass

import numpy as np

from .errors import InvalidImageError
from .imagecore import FloatPlane, RgbImage

# Linear sRGB -> XYZ, D65
SRGB_TO_XYZ = np.array(
    [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ]
)
# Reference white is the image of RGB (1, 1, 1), so white maps to a* = b* = 0
D65_WHITE = SRGB_TO_XYZ.sum(axis=1)

_DELTA = 6.0 / 29.0


@dataclass(frozen=True, eq=False)
class LabImage:
    lightness: np.ndarray
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        planes = []
        for name in ("lightness", "a", "b"):
            plane = np.array(getattr(self, name), dtype=np.float64, copy=True)
            if plane.ndim != 2:
                raise InvalidImageError(f"LabImage.{name} must be 2-D, got shape {plane.shape}")
            if not np.all(np.isfinite(plane)):
                raise InvalidImageError(f"LabImage.{name} has non-finite values")
            plane.setflags(write=False)
            planes.append(plane)
        if not planes[0].shape == planes[1].shape == planes[2].shape:
            raise InvalidImageError("LabImage planes must share dimensions")
        if planes[0].min() < -1e-6 or planes[0].max() > 100.0 + 1e-6:
            raise InvalidImageError("L* must lie within [0, 100]")
        for name, plane in zip(("lightness", "a", "b"), planes):
            object.__setattr__(self, name, plane)

    @property
    def width(self) -> int:
        return self.lightness.shape[1]

    @property
    def height(self) -> int:
        return self.lightness.shape[0]


def srgb_to_linear(encoded: np.ndarray) -> np.ndarray:
    """Inverse sRGB transfer function on values in [0, 1]."""
    return np.where(encoded <= 0.04045, encoded / 12.92, ((encoded + 0.055) / 1.055) ** 2.4)


def _lab_f(t: np.ndarray) -> np.ndarray:
    return np.where(t > _DELTA ** 3, np.cbrt(t), t / (3.0 * _DELTA ** 2) + 4.0 / 29.0)


def rgb_to_lab(image: RgbImage) -> LabImage:
    linear = srgb_to_linear(image.pixels.astype(np.float64) / 255.0)
    xyz = linear @ SRGB_TO_XYZ.T
    fx, fy, fz = (_lab_f(xyz[..., k] / D65_WHITE[k]) for k in range(3))
    lightness = np.clip(116.0 * fy - 16.0, 0.0, 100.0)
    return LabImage(lightness=lightness, a=500.0 * (fx - fy), b=200.0 * (fy - fz))


def extract_b(lab: LabImage) -> FloatPlane:
    return FloatPlane(lab.b)
