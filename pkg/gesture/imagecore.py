"""
Pixel-buffer types, binary PNM file I/O and fidelity metrics.

Every raster is an immutable numpy array in row-major (height, width[, 3])
layout. Constructors validate the invariants and freeze the buffer, so
values can be shared freely between threads.
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidImageError,
    PnmHeaderError,
    PnmMaxvalError,
    PnmTruncatedError,
)
from .utils import atomic_write

logger = logging.getLogger(__name__)

_WHITESPACE = b" \t\n\r\x0b\x0c"


def _as_u8(data, ndim: int, kind: str) -> np.ndarray:
    array = np.asarray(data)
    if array.ndim != ndim:
        raise InvalidImageError(f"{kind} needs a {ndim}-D buffer, got shape {array.shape}")
    if ndim == 3 and array.shape[2] != 3:
        raise InvalidImageError(f"{kind} needs 3 channels, got {array.shape[2]}")
    if array.shape[0] < 1 or array.shape[1] < 1:
        raise InvalidImageError(f"{kind} must be at least 1x1, got {array.shape[1]}x{array.shape[0]}")
    if array.dtype != np.uint8:
        if array.dtype == bool or not np.issubdtype(array.dtype, np.number):
            raise InvalidImageError(f"{kind} samples must be numeric, got {array.dtype}")
        if not np.all(np.isfinite(array)) or np.any(array != np.round(array)):
            raise InvalidImageError(f"{kind} samples must be integers")
        if array.min() < 0 or array.max() > 255:
            raise InvalidImageError(f"{kind} samples must lie in [0, 255]")
        array = array.astype(np.uint8)
    frozen = np.array(array, dtype=np.uint8, copy=True)
    frozen.setflags(write=False)
    return frozen


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _as_u8(self.pixels, 2, "GrayImage"))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape


@dataclass(frozen=True, eq=False)
class RgbImage:
    pixels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pixels", _as_u8(self.pixels, 3, "RgbImage"))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pixels.shape[:2]


@dataclass(frozen=True, eq=False)
class FloatPlane:
    values: np.ndarray

    def __post_init__(self):
        array = np.array(self.values, dtype=np.float64, copy=True)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise InvalidImageError(f"FloatPlane needs a non-empty 2-D buffer, got shape {array.shape}")
        if not np.all(np.isfinite(array)):
            raise InvalidImageError("FloatPlane values must be finite")
        array.setflags(write=False)
        object.__setattr__(self, "values", array)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Foreground is True."""

    data: np.ndarray

    def __post_init__(self):
        array = np.asarray(self.data)
        if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
            raise InvalidImageError(f"BinaryMask needs a non-empty 2-D buffer, got shape {array.shape}")
        array = np.array(array != 0, dtype=bool, copy=True)
        array.setflags(write=False)
        object.__setattr__(self, "data", array)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.data.shape

    @property
    def count(self) -> int:
        return int(np.count_nonzero(self.data))

    def is_empty(self) -> bool:
        return not self.data.any()


Image = Union[GrayImage, RgbImage]


def _read_token(raw: bytes, pos: int, path) -> Tuple[bytes, int]:
    # Skip whitespace and '#' comments, then read one header token
    while pos < len(raw):
        if raw[pos] in _WHITESPACE:
            pos += 1
        elif raw[pos:pos + 1] == b"#":
            while pos < len(raw) and raw[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < len(raw) and raw[pos] not in _WHITESPACE and raw[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise PnmHeaderError(f"{path}: header ends prematurely")
    return raw[start:pos], pos


def _read_int(raw: bytes, pos: int, path, field: str) -> Tuple[int, int]:
    token, pos = _read_token(raw, pos, path)
    if not token.isdigit():
        raise PnmHeaderError(f"{path}: {field} is not a decimal integer: {token!r}")
    return int(token), pos


def load_pnm(path: Union[str, Path]) -> Image:
    """
    Read a binary PGM (P5) or PPM (P6) file with maxval 255.
    :param path: File to read.
    :return: GrayImage for P5, RgbImage for P6.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Image file {path} was not found")
    raw = path.read_bytes()

    magic, pos = _read_token(raw, 0, path)
    if magic == b"P5":
        channels = 1
    elif magic == b"P6":
        channels = 3
    else:
        raise PnmHeaderError(f"{path}: unsupported magic number {magic[:8]!r}")

    width, pos = _read_int(raw, pos, path, "width")
    height, pos = _read_int(raw, pos, path, "height")
    maxval, pos = _read_int(raw, pos, path, "maxval")
    if width < 1 or height < 1:
        raise PnmHeaderError(f"{path}: invalid dimensions {width}x{height}")
    if maxval != 255:
        raise PnmMaxvalError(f"{path}: maxval {maxval} is not supported (only 255)")
    if pos >= len(raw) or raw[pos] not in _WHITESPACE:
        raise PnmHeaderError(f"{path}: missing whitespace byte after maxval")
    pos += 1

    expected = width * height * channels
    payload = raw[pos:pos + expected]
    if len(payload) < expected:
        raise PnmTruncatedError(
            f"{path}: expected {expected} payload bytes, found {len(payload)}"
        )
    pixels = np.frombuffer(payload, dtype=np.uint8)
    logger.debug(f"Loaded {magic.decode()} {width}x{height} from {path}")
    if channels == 1:
        return GrayImage(pixels.reshape(height, width))
    return RgbImage(pixels.reshape(height, width, 3))


def encode_pnm(image: Union[GrayImage, RgbImage, BinaryMask]) -> bytes:
    if isinstance(image, BinaryMask):
        magic, payload = b"P5", np.where(image.data, 255, 0).astype(np.uint8)
    elif isinstance(image, GrayImage):
        magic, payload = b"P5", image.pixels
    elif isinstance(image, RgbImage):
        magic, payload = b"P6", image.pixels
    else:
        raise InvalidImageError(f"Cannot serialize {type(image).__name__} as PNM")
    header = b"%s\n%d %d\n255\n" % (magic, image.width, image.height)
    return header + np.ascontiguousarray(payload).tobytes()


def save_pnm(image: Union[GrayImage, RgbImage, BinaryMask], path: Union[str, Path]) -> None:
    """
    Write an image as binary PNM. Masks become P5 with foreground 255.
    The file appears atomically; a failed write leaves no partial file.
    """
    atomic_write(path, encode_pnm(image))
    logger.debug(f"Wrote {type(image).__name__} {image.width}x{image.height} to {path}")


def rgb_to_gray(image: RgbImage) -> GrayImage:
    """BT.601 luma, rounded half up in exact integer arithmetic."""
    rgb = image.pixels.astype(np.int32)
    luma = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return GrayImage(np.clip(luma, 0, 255).astype(np.uint8))


def gray_to_rgb(image: GrayImage) -> RgbImage:
    return RgbImage(np.repeat(image.pixels[:, :, None], 3, axis=2))


def as_rgb(image: Image) -> RgbImage:
    return image if isinstance(image, RgbImage) else gray_to_rgb(image)


def psnr(reference: GrayImage, test: GrayImage) -> float:
    """
    Peak signal-to-noise ratio in dB for 8-bit images.
    :return: 10*log10(255^2 / MSE), or math.inf when the images are identical.
    """
    if reference.shape != test.shape:
        raise DimensionMismatchError(
            f"psnr needs equal dimensions, got {reference.shape} and {test.shape}"
        )
    diff = reference.pixels.astype(np.float64) - test.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)
