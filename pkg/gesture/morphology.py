"""
Binary erosion and dilation with explicit-origin structuring elements.

Pixels outside the image count as background for both operations.
"""
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

from .imagecore import BinaryMask


@dataclass(frozen=True, eq=False)
class StructuringElement:
    cells: np.ndarray
    origin: Tuple[int, int]  # (row, col)

    def __post_init__(self):
        cells = np.array(np.asarray(self.cells) != 0, dtype=bool, copy=True)
        if cells.ndim != 2 or cells.size == 0:
            raise ValueError(f"Structuring element must be a non-empty 2-D grid, got shape {cells.shape}")
        row, col = int(self.origin[0]), int(self.origin[1])
        if not (0 <= row < cells.shape[0] and 0 <= col < cells.shape[1]):
            raise ValueError(f"Origin {(row, col)} lies outside the {cells.shape} grid")
        if not cells[row, col]:
            raise ValueError("The origin cell of a structuring element must be true")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)
        object.__setattr__(self, "origin", (row, col))

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    def offsets(self) -> Iterator[Tuple[int, int]]:
        """(drow, dcol) of every true cell relative to the origin."""
        for row, col in zip(*np.nonzero(self.cells)):
            yield int(row) - self.origin[0], int(col) - self.origin[1]

    def reflect(self) -> "StructuringElement":
        return StructuringElement(
            self.cells[::-1, ::-1],
            (self.height - 1 - self.origin[0], self.width - 1 - self.origin[1]),
        )


def erosion_element() -> StructuringElement:
    """5x5 diamond."""
    cells = np.array(
        [
            [0, 0, 1, 0, 0],
            [0, 1, 1, 1, 0],
            [1, 1, 1, 1, 1],
            [0, 1, 1, 1, 0],
            [0, 0, 1, 0, 0],
        ]
    )
    return StructuringElement(cells, (2, 2))


def dilation_element() -> StructuringElement:
    """6x6 square; the origin is the upper-left of the four central cells."""
    return StructuringElement(np.ones((6, 6), dtype=bool), (2, 2))


def _padded(mask: BinaryMask, se: StructuringElement) -> Tuple[np.ndarray, int]:
    pad = max(se.height, se.width)
    return np.pad(mask.data, pad, mode="constant", constant_values=False), pad


def _window(padded: np.ndarray, pad: int, drow: int, dcol: int, shape) -> np.ndarray:
    height, width = shape
    return padded[pad + drow:pad + drow + height, pad + dcol:pad + dcol + width]


def erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Foreground where every SE cell, origin placed on the pixel, lands on foreground."""
    padded, pad = _padded(mask, se)
    out = np.ones(mask.shape, dtype=bool)
    for drow, dcol in se.offsets():
        out &= _window(padded, pad, drow, dcol, mask.shape)
    return BinaryMask(out)


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """Union of SE translates over the foreground pixels."""
    padded, pad = _padded(mask, se)
    out = np.zeros(mask.shape, dtype=bool)
    for drow, dcol in se.offsets():
        out |= _window(padded, pad, -drow, -dcol, mask.shape)
    return BinaryMask(out)


def complement(mask: BinaryMask) -> BinaryMask:
    return BinaryMask(~mask.data)
