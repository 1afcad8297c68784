"""Canny edge detection: Gaussian smoothing, Sobel gradients, 4-way NMS, hysteresis."""
import logging
import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import ndimage

from .imagecore import BinaryMask, GrayImage

logger = logging.getLogger(__name__)

_EIGHT_CONNECTED = np.ones((3, 3), dtype=bool)

# (drow, dcol) of the neighbor along the gradient, per quantized direction
_NMS_STEPS = {
    0: (0, 1),  # horizontal gradient
    1: (1, 1),  # down-right diagonal
    2: (1, 0),  # vertical gradient
    3: (1, -1),  # down-left diagonal
}


class CannyParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    sigma: float = Field(default=1.4, gt=0)
    low: float = Field(default=0.10, gt=0)
    high: float = Field(default=0.30, le=1)

    @model_validator(mode="after")
    def _ordered(self) -> "CannyParams":
        if not 0 < self.low < self.high <= 1:
            raise ValueError(f"need 0 < low < high <= 1, got low={self.low} high={self.high}")
        return self


@dataclass(frozen=True, eq=False)
class CannyTrace:
    magnitude: np.ndarray
    suppressed: np.ndarray
    low_threshold: float
    high_threshold: float
    edges: BinaryMask


def _quantize(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    angle = np.degrees(np.arctan2(gy, gx)) % 180.0
    return (np.floor((angle + 22.5) / 45.0).astype(int)) % 4


def _non_maximum_suppression(magnitude: np.ndarray, direction: np.ndarray) -> np.ndarray:
    height, width = magnitude.shape
    padded = np.pad(magnitude, 1, mode="constant", constant_values=0.0)
    keep = np.zeros(magnitude.shape, dtype=bool)
    for code, (drow, dcol) in _NMS_STEPS.items():
        ahead = padded[1 + drow:1 + drow + height, 1 + dcol:1 + dcol + width]
        behind = padded[1 - drow:1 - drow + height, 1 - dcol:1 - dcol + width]
        # Ties keep the pixel further along the gradient, so plateaus thin to one pixel
        keep |= (direction == code) & (magnitude >= behind) & (magnitude > ahead)
    return keep & (magnitude > 0)


def canny_trace(image: GrayImage, params: CannyParams) -> CannyTrace:
    radius = math.ceil(3 * params.sigma)
    smoothed = ndimage.gaussian_filter(
        image.pixels.astype(np.float64), params.sigma, mode="nearest", truncate=radius / params.sigma
    )
    gx = ndimage.sobel(smoothed, axis=1, mode="nearest")
    gy = ndimage.sobel(smoothed, axis=0, mode="nearest")
    magnitude = np.hypot(gx, gy)
    peak = float(magnitude.max())
    low, high = params.low * peak, params.high * peak
    if peak == 0.0:
        empty = np.zeros(magnitude.shape, dtype=bool)
        return CannyTrace(magnitude, empty, low, high, BinaryMask(empty))

    thin = _non_maximum_suppression(magnitude, _quantize(gx, gy))
    weak = thin & (magnitude >= low)
    strong = thin & (magnitude >= high)
    labels, count = ndimage.label(weak, structure=_EIGHT_CONNECTED)
    seeds = np.unique(labels[strong])
    edges = np.isin(labels, seeds[seeds > 0])
    logger.debug(f"Canny: {count} weak components, {int(edges.sum())} edge pixels")
    return CannyTrace(magnitude, thin, low, high, BinaryMask(edges))


def canny(image: GrayImage, params: CannyParams) -> BinaryMask:
    return canny_trace(image, params).edges
