"""
Hand segmentation on the CIELAB b* channel.

rgb -> lab -> b* -> Otsu threshold -> binary mask -> erosion (5x5 diamond)
-> dilation (6x6 square) -> masked grayscale -> Canny edges.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .colorspace import extract_b, rgb_to_lab
from .edges import CannyParams, canny
from .errors import DimensionMismatchError, InvalidImageError
from .imagecore import BinaryMask, FloatPlane, GrayImage, RgbImage, rgb_to_gray
from .morphology import complement, dilate, dilation_element, erode, erosion_element

logger = logging.getLogger(__name__)

OTSU_BINS = 256


@dataclass(frozen=True, eq=False)
class SegmentationResult:
    binary: BinaryMask  # thresholded b*, before morphology
    mask: BinaryMask
    masked_gray: GrayImage
    edges: BinaryMask
    threshold: float


def quantize_plane(plane: FloatPlane, bins: int = OTSU_BINS):
    """
    Map plane values onto `bins` equal-width bins over [min, max]. Bins are
    closed on the right: bin k holds (lo + k*width, lo + (k+1)*width], bin 0
    also holds lo. A value lands at or above bin k exactly when it is
    strictly greater than lo + k*width, the threshold `binarize` applies.
    :return: (bin index array, lower bound, bin width); width is 0 for a constant plane.
    """
    values = plane.values
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return np.zeros(values.shape, dtype=np.int64), lo, 0.0
    width = (hi - lo) / bins
    boundaries = lo + np.arange(1, bins) * width
    # Number of boundaries strictly below each value
    index = np.searchsorted(boundaries, values.ravel(), side="left").reshape(values.shape)
    return index.astype(np.int64), lo, width


def otsu_threshold(plane: FloatPlane) -> float:
    """
    Otsu's threshold over a 256-bin quantization of the plane.
    Between-class variance is compared in exact integer arithmetic; ties go to
    the smallest bin boundary. A constant plane returns its constant.
    """
    index, lo, width = quantize_plane(plane)
    if width == 0.0:
        return lo
    counts = [int(c) for c in np.bincount(index.ravel(), minlength=OTSU_BINS)]
    total = sum(counts)
    level_sum = sum(level * count for level, count in enumerate(counts))

    best_k, best_num, best_den = 1, -1, 1
    below, below_sum = 0, 0
    for k in range(1, OTSU_BINS):
        below += counts[k - 1]
        below_sum += (k - 1) * counts[k - 1]
        above = total - below
        if below == 0 or above == 0:
            continue
        # sigma_B^2 is proportional to (n*s0 - n0*S)^2 / (n0*n1)
        num = (total * below_sum - below * level_sum) ** 2
        den = below * above
        if num * best_den > best_num * den:
            best_k, best_num, best_den = k, num, den
    return lo + best_k * width


def binarize(plane: FloatPlane, threshold: float) -> BinaryMask:
    if not np.isfinite(threshold):
        raise ValueError(f"Threshold must be finite, got {threshold}")
    return BinaryMask(plane.values > threshold)


def map_mask(original: GrayImage, mask: BinaryMask) -> GrayImage:
    """Keep the original intensity where the mask is foreground, 0 elsewhere."""
    if original.shape != mask.shape:
        raise DimensionMismatchError(
            f"map_mask needs equal dimensions, got {original.shape} and {mask.shape}"
        )
    return GrayImage(np.where(mask.data, original.pixels, 0))


def segment_pipeline(
    image: RgbImage, canny_params: Optional[CannyParams] = None, invert: bool = False
) -> SegmentationResult:
    """
    :param image: Camera image (sRGB).
    :param canny_params: Edge detector settings; defaults when None.
    :param invert: Take the low-b* side of the threshold as the hand.
    """
    if not isinstance(image, RgbImage):
        raise InvalidImageError(f"segment_pipeline needs an RgbImage, got {type(image).__name__}")
    canny_params = canny_params or CannyParams()

    plane = extract_b(rgb_to_lab(image))
    threshold = otsu_threshold(plane)
    binary = binarize(plane, threshold)
    if invert:
        binary = complement(binary)

    mask = dilate(erode(binary, erosion_element()), dilation_element())
    masked = map_mask(rgb_to_gray(image), mask)
    edges = canny(masked, canny_params)
    logger.debug(
        f"Segmented {image.width}x{image.height}: threshold={threshold:.6f} "
        f"binary={binary.count} mask={mask.count} edges={edges.count}"
    )
    return SegmentationResult(binary=binary, mask=mask, masked_gray=masked, edges=edges, threshold=threshold)
