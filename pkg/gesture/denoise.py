"""
Random-value impulse noise (RVIN) injection and the modified directional
weighted median filter (MDWMF).

Offsets are written (i, j) with i along columns (x) and j along rows (y);
a pixel's neighbor at offset (i, j) is I(x + i, y + j). Reads outside the
image are clamped to the nearest border pixel.
"""
import logging
from dataclasses import dataclass
from typing import List, Literal, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .errors import InvalidImageError
from .imagecore import GrayImage, RgbImage

logger = logging.getLogger(__name__)

RADIUS = 2
Offset = Tuple[int, int]

# Primitive directions of the 5x5 window, in the order lines are emitted
_PRIMITIVES: Tuple[Offset, ...] = ((0, 1), (1, 0), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1))

# Row-major 5x5 window, center at index 12
_WINDOW: Tuple[Offset, ...] = tuple(
    (i, j) for j in range(-RADIUS, RADIUS + 1) for i in range(-RADIUS, RADIUS + 1)
)
_CENTER = _WINDOW.index((0, 0))


@dataclass(frozen=True)
class DirectionSet:
    """Disjoint direction lines; each line holds antipodal offset pairs."""

    lines: Tuple[Tuple[Offset, ...], ...]

    def __post_init__(self):
        lines = tuple(tuple((int(i), int(j)) for i, j in line) for line in self.lines)
        if not lines:
            raise ValueError("A direction set needs at least one line")
        seen = set()
        for line in lines:
            if not line:
                raise ValueError("Direction lines must not be empty")
            for i, j in line:
                if (i, j) == (0, 0) or abs(i) > RADIUS or abs(j) > RADIUS:
                    raise ValueError(f"Offset {(i, j)} lies outside the 5x5 window or at its center")
                if (-i, -j) not in line:
                    raise ValueError(f"Line containing {(i, j)} lacks its antipode {(-i, -j)}")
                if (i, j) in seen:
                    raise ValueError(f"Offset {(i, j)} appears in more than one line")
                seen.add((i, j))
        object.__setattr__(self, "lines", lines)

    def __len__(self) -> int:
        return len(self.lines)

    def pairs(self, index: int) -> List[Offset]:
        """One representative per antipodal pair of line `index`."""
        return [(i, j) for i, j in self.lines[index] if j > 0 or (j == 0 and i > 0)]


def default_directions() -> DirectionSet:
    """The 12 antipodal pair lines covering all 24 non-center offsets."""
    lines = []
    for di, dj in _PRIMITIVES:
        k = 1
        while abs(k * di) <= RADIUS and abs(k * dj) <= RADIUS:
            lines.append(((k * di, k * dj), (-k * di, -k * dj)))
            k += 1
    return DirectionSet(tuple(lines))


def collinear_directions() -> DirectionSet:
    """The 8 collinear lines: each primitive direction with its in-window multiples."""
    lines = []
    for di, dj in _PRIMITIVES:
        line = []
        k = 1
        while abs(k * di) <= RADIUS and abs(k * dj) <= RADIUS:
            line.extend([(k * di, k * dj), (-k * di, -k * dj)])
            k += 1
        lines.append(tuple(line))
    return DirectionSet(tuple(lines))


_DIRECTION_SETS = {"pairs": default_directions, "collinear": collinear_directions}


class MdwmfConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    thresholds: List[float] = Field(default_factory=lambda: [33, 23, 16], min_length=1)
    weight: int = Field(default=2, ge=1)
    directions: Literal["pairs", "collinear"] = "pairs"

    @field_validator("thresholds")
    @classmethod
    def _positive(cls, value: List[float]) -> List[float]:
        if any(not t > 0 for t in value):
            raise ValueError("every threshold must be > 0")
        return value

    @property
    def direction_set(self) -> DirectionSet:
        return _DIRECTION_SETS[self.directions]()

    def to_text(self) -> str:
        thresholds = ",".join(_format_threshold(t) for t in self.thresholds)
        return f"thresholds={thresholds}\nweight={self.weight}\ndirections={self.directions}\n"

    @classmethod
    def from_text(cls, text: str) -> "MdwmfConfig":
        values = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"Expected key=value, got {line!r}")
            values[key.strip()] = value.strip()
        if "thresholds" in values:
            values["thresholds"] = parse_thresholds(values["thresholds"])
        return cls(**values)


def _format_threshold(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


def parse_thresholds(text: str) -> List[float]:
    """Parse comma-separated thresholds such as '33,23,16'."""
    parts = [part.strip() for part in text.split(",") if part.strip()]
    if not parts:
        raise ValueError("at least one threshold is required")
    return [float(part) for part in parts]


def _rvin(pixels: np.ndarray, density: float, seed: int) -> Tuple[np.ndarray, np.ndarray]:
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"Noise density must lie in [0, 1], got {density}")
    rng = np.random.default_rng(seed)
    corrupted = rng.random(pixels.shape[:2]) < density
    replacement = rng.integers(0, 256, size=pixels.shape, dtype=np.uint8)
    mask = corrupted if pixels.ndim == 2 else corrupted[:, :, None]
    return np.where(mask, replacement, pixels), corrupted


def inject_rvin_counted(
    image: Union[GrayImage, RgbImage], density: float, seed: int
) -> Tuple[Union[GrayImage, RgbImage], int]:
    """
    Corrupt each pixel position independently with probability `density`.
    :return: The noisy image and the number of corrupted positions (same-value
             redraws count as corrupted).
    """
    noisy, corrupted = _rvin(image.pixels, density, seed)
    count = int(np.count_nonzero(corrupted))
    logger.debug(f"RVIN density={density} seed={seed}: {count} positions corrupted")
    return type(image)(noisy), count


def inject_rvin(image: Union[GrayImage, RgbImage], density: float, seed: int) -> Union[GrayImage, RgbImage]:
    return inject_rvin_counted(image, density, seed)[0]


def directional_differences(image: GrayImage, x: int, y: int, dirs: DirectionSet) -> List[int]:
    """
    Second-order directional statistics of pixel (x, y): per line, the sum over
    its pairs of |I(x+i, y+j) + I(x-i, y-j) - 2 I(x, y)|.
    """
    if not (0 <= x < image.width and 0 <= y < image.height):
        raise IndexError(f"Pixel ({x}, {y}) is outside the {image.width}x{image.height} image")
    pixels = image.pixels

    def at(i: int, j: int) -> int:
        row = min(max(y + j, 0), image.height - 1)
        col = min(max(x + i, 0), image.width - 1)
        return int(pixels[row, col])

    center = at(0, 0)
    return [
        sum(abs(at(i, j) + at(-i, -j) - 2 * center) for i, j in dirs.pairs(index))
        for index in range(len(dirs))
    ]


def is_noisy(diffs: Sequence[float], threshold: float) -> bool:
    """A pixel is an impulse when even its smoothest direction exceeds the threshold."""
    if len(diffs) == 0:
        raise ValueError("is_noisy needs at least one directional difference")
    return min(diffs) > threshold


def weighted_median(values: Sequence[float], weights: Sequence[int]) -> float:
    """Lower weighted median: the smallest value whose cumulative weight reaches half the total."""
    if len(values) != len(weights):
        raise ValueError(f"{len(values)} values but {len(weights)} weights")
    if len(values) == 0:
        raise ValueError("weighted_median needs at least one value")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    total = sum(weights)
    cumulative = 0
    for value, weight in sorted(zip(values, weights), key=lambda pair: pair[0]):
        cumulative += weight
        if 2 * cumulative >= total:
            return value
    return max(values)


def _shifted(padded: np.ndarray, i: int, j: int, height: int, width: int) -> np.ndarray:
    return padded[RADIUS + j:RADIUS + j + height, RADIUS + i:RADIUS + i + width]


def direction_statistics(pixels: np.ndarray, dirs: DirectionSet) -> np.ndarray:
    """Vectorized directional_differences for every pixel, shape (lines, height, width)."""
    height, width = pixels.shape
    padded = np.pad(pixels.astype(np.int64), RADIUS, mode="edge")
    center = 2 * padded[RADIUS:RADIUS + height, RADIUS:RADIUS + width]
    stats = np.zeros((len(dirs), height, width), dtype=np.int64)
    for index in range(len(dirs)):
        for i, j in dirs.pairs(index):
            forward = _shifted(padded, i, j, height, width)
            backward = _shifted(padded, -i, -j, height, width)
            stats[index] += np.abs(forward + backward - center)
    return stats


def _line_membership(dirs: DirectionSet) -> np.ndarray:
    membership = np.zeros((len(dirs), len(_WINDOW)), dtype=bool)
    for index, line in enumerate(dirs.lines):
        for offset in line:
            membership[index, _WINDOW.index(offset)] = True
    return membership


def _filter_pass(pixels: np.ndarray, threshold: float, weight: int, dirs: DirectionSet) -> np.ndarray:
    height, width = pixels.shape
    stats = direction_statistics(pixels, dirs)
    noisy = stats.min(axis=0) > threshold
    output = pixels.copy()
    if not noisy.any():
        return output

    rows, cols = np.nonzero(noisy)
    padded = np.pad(pixels, RADIUS, mode="edge")
    window = np.stack([_shifted(padded, i, j, height, width)[rows, cols] for i, j in _WINDOW], axis=1)

    best_line = stats.argmin(axis=0)[rows, cols]
    boosted = _line_membership(dirs)[best_line]
    boosted[:, _CENTER] = True
    weights = np.where(boosted, weight, 1)

    # Vectorized weighted_median over each noisy pixel's window
    order = np.argsort(window, axis=1, kind="stable")
    sorted_values = np.take_along_axis(window, order, axis=1)
    cumulative = np.cumsum(np.take_along_axis(weights, order, axis=1), axis=1)
    pick = np.argmax(2 * cumulative >= cumulative[:, -1:], axis=1)
    output[rows, cols] = sorted_values[np.arange(len(rows)), pick]
    return output


def mdwmf_trace(image: GrayImage, config: MdwmfConfig) -> Tuple[GrayImage, List[int]]:
    """
    Run the MDWMF and report how many pixels each iteration changed.
    Each iteration detects on a snapshot of its input and writes a fresh buffer.
    """
    dirs = config.direction_set
    current = image.pixels
    changed = []
    for iteration, threshold in enumerate(config.thresholds, start=1):
        restored = _filter_pass(current, threshold, config.weight, dirs)
        changed.append(int(np.count_nonzero(restored != current)))
        logger.debug(f"MDWMF iteration {iteration} (T={threshold}): {changed[-1]} pixels changed")
        current = restored
    return GrayImage(current), changed


def mdwmf(image: GrayImage, config: MdwmfConfig) -> GrayImage:
    return mdwmf_trace(image, config)[0]


def mdwmf_rgb(image: RgbImage, config: MdwmfConfig) -> Tuple[RgbImage, List[int]]:
    """Filter each color channel independently; counts are summed over channels."""
    if not isinstance(image, RgbImage):
        raise InvalidImageError(f"mdwmf_rgb needs an RgbImage, got {type(image).__name__}")
    channels = []
    changed = [0] * len(config.thresholds)
    for channel in range(3):
        restored, counts = mdwmf_trace(GrayImage(image.pixels[:, :, channel]), config)
        channels.append(restored.pixels)
        changed = [a + b for a, b in zip(changed, counts)]
    return RgbImage(np.stack(channels, axis=2)), changed
