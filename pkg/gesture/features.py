"""First-order histogram statistics of a segmented region."""
import logging
from dataclasses import astuple, dataclass, fields
from typing import Tuple

import numpy as np
from scipy.stats import entropy as shannon_entropy

from .errors import DimensionMismatchError, EmptyRegionError
from .imagecore import BinaryMask, GrayImage

logger = logging.getLogger(__name__)

GRAY_LEVELS = 256


@dataclass(frozen=True, eq=False)
class Histogram:
    p: np.ndarray

    @property
    def levels(self) -> int:
        return len(self.p)


@dataclass(frozen=True)
class FeatureVector:
    mean: float
    variance: float
    skewness: float
    kurtosis: float  # excess
    energy: float
    entropy: float  # bits

    @classmethod
    def names(cls) -> Tuple[str, ...]:
        return tuple(f.name for f in fields(cls))

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        return cls(*(float(v) for v in values))


FEATURE_NAMES = FeatureVector.names()


def region_histogram(image: GrayImage, mask: BinaryMask) -> Histogram:
    if image.shape != mask.shape:
        raise DimensionMismatchError(
            f"Histogram needs equal dimensions, got {image.shape} and {mask.shape}"
        )
    region = image.pixels[mask.data]
    if region.size == 0:
        raise EmptyRegionError("The segmented region has no foreground pixel")
    counts = np.bincount(region, minlength=GRAY_LEVELS)
    return Histogram(counts / region.size)


def extract_features(hist: Histogram) -> FeatureVector:
    p = hist.p
    levels = np.arange(hist.levels, dtype=np.float64)
    mean = float(np.sum(levels * p))
    centered = levels - mean
    variance = float(np.sum(centered ** 2 * p))
    if variance > 0.0:
        sigma = np.sqrt(variance)
        skewness = float(np.sum(centered ** 3 * p) / sigma ** 3)
        kurtosis = float(np.sum(centered ** 4 * p) / sigma ** 4 - 3.0)
    else:
        # A single-level region has no spread to normalize by
        skewness = kurtosis = 0.0
    energy = float(np.sum(p ** 2))
    entropy = float(shannon_entropy(p, base=2))
    return FeatureVector(mean, variance, skewness, kurtosis, energy, entropy)


def features_of_region(image: GrayImage, mask: BinaryMask) -> FeatureVector:
    return extract_features(region_histogram(image, mask))
