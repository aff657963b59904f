"""Image value types shared by every stage of the detector.

Arrays are indexed ``[y, x]`` with the origin at the top-left corner; public
positions are ``(x, y)`` tuples.  All three types are immutable: the backing
arrays are copied on construction and flagged read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

#: Largest grey value (8-bit images).  Also the distance-transform offset.
LAMBDA = 255

#: Internal code for an undefined grey value.  Every legal value is >= 0, so
#: the plain integer ordering reproduces the -inf semantics of undefined
#: positions: it loses every ``min``, never wins a ``max`` against a defined
#: value, and ``-1 < -1`` is false.
BOTTOM_CODE = -1


class _Bottom:
    """Singleton returned by :func:`value_at` for undefined positions."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "BOTTOM"

    def __lt__(self, other):
        return not isinstance(other, _Bottom)

    def __le__(self, other):
        return True

    def __gt__(self, other):
        return False

    def __ge__(self, other):
        return isinstance(other, _Bottom)


BOTTOM = _Bottom()


def _frozen(arr: np.ndarray, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class GrayImage:
    """Rectangular 8-bit intensity raster."""

    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"GrayImage needs a non-empty 2-D array, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() > LAMBDA):
            raise ValueError("GrayImage values must lie in [0, 255]")
        object.__setattr__(self, "values", _frozen(arr, np.uint8))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def __eq__(self, other):
        if not isinstance(other, GrayImage):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None

    @classmethod
    def constant(cls, width: int, height: int, value: int = 0) -> "GrayImage":
        return cls(np.full((height, width), value, dtype=np.uint8))


@dataclass(frozen=True, eq=False)
class BinaryImage:
    """A set of foreground positions inside a ``width x height`` raster.

    Stored as a boolean mask; equality is set equality.
    """

    mask: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.mask)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"BinaryImage needs a non-empty 2-D array, got shape {arr.shape}")
        object.__setattr__(self, "mask", _frozen(arr, bool))

    @classmethod
    def empty(cls, width: int, height: int) -> "BinaryImage":
        return cls(np.zeros((height, width), dtype=bool))

    @classmethod
    def full(cls, width: int, height: int) -> "BinaryImage":
        return cls(np.ones((height, width), dtype=bool))

    @classmethod
    def from_positions(cls, width: int, height: int, positions: Iterable[tuple[int, int]]) -> "BinaryImage":
        m = np.zeros((height, width), dtype=bool)
        for x, y in positions:
            if not (0 <= x < width and 0 <= y < height):
                raise ValueError(f"position {(x, y)} outside {width}x{height} raster")
            m[y, x] = True
        return cls(m)

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.mask.shape

    def positions(self) -> set[tuple[int, int]]:
        ys, xs = np.nonzero(self.mask)
        return {(int(x), int(y)) for x, y in zip(xs, ys)}

    def count(self) -> int:
        return int(np.count_nonzero(self.mask))

    def __len__(self):
        return self.count()

    def __contains__(self, pos):
        x, y = pos
        return 0 <= x < self.width and 0 <= y < self.height and bool(self.mask[y, x])

    def __eq__(self, other):
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return np.array_equal(self.mask, other.mask)

    __hash__ = None

    def _check(self, other: "BinaryImage"):
        if self.shape != other.shape:
            raise ValueError(f"dimension mismatch: {self.shape} vs {other.shape}")

    def __and__(self, other: "BinaryImage") -> "BinaryImage":
        self._check(other)
        return BinaryImage(self.mask & other.mask)

    def __or__(self, other: "BinaryImage") -> "BinaryImage":
        self._check(other)
        return BinaryImage(self.mask | other.mask)

    def __sub__(self, other: "BinaryImage") -> "BinaryImage":
        self._check(other)
        return BinaryImage(self.mask & ~other.mask)

    def __invert__(self) -> "BinaryImage":
        return BinaryImage(~self.mask)

    def issubset(self, other: "BinaryImage") -> bool:
        self._check(other)
        return not np.any(self.mask & ~other.mask)


@dataclass(frozen=True, eq=False)
class PartialGrayImage:
    """Grey surface defined on a subset of the raster (at most one value per position).

    ``values`` holds the grey value where ``defined`` is true; values at
    undefined positions are normalised to 0 and carry no meaning.
    """

    values: np.ndarray
    defined: np.ndarray = field(default=None)

    def __post_init__(self):
        vals = np.asarray(self.values)
        if self.defined is None:
            defined = np.ones(vals.shape, dtype=bool)
        else:
            defined = np.asarray(self.defined, dtype=bool)
        if vals.ndim != 2 or vals.shape != defined.shape:
            raise ValueError("values and defined must be 2-D arrays of the same shape")
        vals = np.where(defined, vals, 0)
        if vals.size and (vals.min() < 0 or vals.max() > LAMBDA):
            raise ValueError("PartialGrayImage values must lie in [0, 255]")
        object.__setattr__(self, "values", _frozen(vals, np.int16))
        object.__setattr__(self, "defined", _frozen(defined, bool))

    @classmethod
    def from_codes(cls, codes: np.ndarray) -> "PartialGrayImage":
        """Build from an integer array using ``BOTTOM_CODE`` for undefined positions."""
        codes = np.asarray(codes)
        defined = codes != BOTTOM_CODE
        return cls(np.where(defined, codes, 0), defined)

    @classmethod
    def constant(cls, width: int, height: int, value: int = LAMBDA) -> "PartialGrayImage":
        """Total surface with one value everywhere (``L`` when value is 255)."""
        return cls(np.full((height, width), value, dtype=np.int16))

    @classmethod
    def from_gray(cls, img: GrayImage) -> "PartialGrayImage":
        return cls(img.values.astype(np.int16))

    def codes(self) -> np.ndarray:
        """Values as int16 with ``BOTTOM_CODE`` at undefined positions."""
        return np.where(self.defined, self.values, BOTTOM_CODE).astype(np.int16)

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def support(self) -> BinaryImage:
        return BinaryImage(self.defined)

    def is_total(self) -> bool:
        return bool(self.defined.all())

    def __eq__(self, other):
        if not isinstance(other, PartialGrayImage):
            return NotImplemented
        return np.array_equal(self.defined, other.defined) and np.array_equal(self.values, other.values)

    __hash__ = None
