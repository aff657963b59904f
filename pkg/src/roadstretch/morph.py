"""Binary and partial-grey morphology on the types of :mod:`imgcore`.

Border policy: a position outside the raster is background for binary
operators and undefined (BOTTOM) for grey operators, unless a grey operator
is given an explicit ``border`` value.

The ``*_mask`` / ``*_codes`` helpers work on raw numpy arrays and are what the
hot loops in :mod:`dt` and :mod:`dbs` call; the public functions wrap them.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .imgcore import BOTTOM, BOTTOM_CODE, LAMBDA, BinaryImage, PartialGrayImage

Offsets = frozenset

#: 4-connected cross including the origin.
N = frozenset({(0, 1), (0, -1), (0, 0), (1, 0), (-1, 0)})
#: 4-connected cross without the origin.
Q = frozenset({(1, 0), (-1, 0), (0, 1), (0, -1)})
#: Two-pixel vertical element used to clean up marking detections.
VERTICAL_PAIR = frozenset({(0, 0), (0, 1)})


def structuring_element(offsets: Iterable[tuple[int, int]]) -> frozenset:
    return frozenset((int(dx), int(dy)) for dx, dy in offsets)


def neighbor(a: np.ndarray, dx: int, dy: int, fill) -> np.ndarray:
    """Array whose entry at (x, y) is ``a`` at (x + dx, y + dy), or ``fill`` off-raster."""
    h, w = a.shape
    out = np.full_like(a, fill)
    if abs(dx) >= w or abs(dy) >= h:
        return out
    ys_dst = slice(max(0, -dy), h - max(0, dy))
    xs_dst = slice(max(0, -dx), w - max(0, dx))
    ys_src = slice(max(0, dy), h - max(0, -dy))
    xs_src = slice(max(0, dx), w - max(0, -dx))
    out[ys_dst, xs_dst] = a[ys_src, xs_src]
    return out


def dilate_mask(a: np.ndarray, offsets=N) -> np.ndarray:
    out = np.zeros_like(a, dtype=bool)
    for dx, dy in offsets:
        out |= neighbor(a, -dx, -dy, False)
    return out


def erode_mask(a: np.ndarray, offsets=N) -> np.ndarray:
    out = np.ones_like(a, dtype=bool)
    for dx, dy in offsets:
        out &= neighbor(a, dx, dy, False)
    return out


def cross_dilate(a: np.ndarray) -> np.ndarray:
    """Fast dilation by ``N`` (the DT inner loop)."""
    out = a.copy()
    out[1:, :] |= a[:-1, :]
    out[:-1, :] |= a[1:, :]
    out[:, 1:] |= a[:, :-1]
    out[:, :-1] |= a[:, 1:]
    return out


def external_edge_mask(s: np.ndarray) -> np.ndarray:
    return cross_dilate(s) & ~s


def internal_edge_mask(s: np.ndarray) -> np.ndarray:
    return s & ~erode_mask(s, N)


def erode_codes(codes: np.ndarray, offsets, border: int = BOTTOM_CODE) -> np.ndarray:
    out = np.full(codes.shape, np.iinfo(np.int16).max, dtype=np.int16)
    for dx, dy in offsets:
        np.minimum(out, neighbor(codes, dx, dy, border), out=out)
    return out


def dilate_codes(codes: np.ndarray, offsets, border: int = BOTTOM_CODE) -> np.ndarray:
    out = np.full(codes.shape, BOTTOM_CODE, dtype=np.int16)
    for dx, dy in offsets:
        np.maximum(out, neighbor(codes, dx, dy, border), out=out)
    return out


# -- binary ------------------------------------------------------------------

def dilate(s: BinaryImage, e=N) -> BinaryImage:
    """Positions p with p - e in ``s`` for some offset e."""
    return BinaryImage(dilate_mask(s.mask, e))


def erode(s: BinaryImage, e=N) -> BinaryImage:
    """Positions p with p + e in ``s`` for every offset e (off-raster counts as absent)."""
    return BinaryImage(erode_mask(s.mask, e))


def opening(s: BinaryImage, e) -> BinaryImage:
    return dilate(erode(s, e), e)


def complement(s: BinaryImage) -> BinaryImage:
    return BinaryImage(~s.mask)


def union(a: BinaryImage, b: BinaryImage) -> BinaryImage:
    return a | b


def intersection(a: BinaryImage, b: BinaryImage) -> BinaryImage:
    return a & b


def external_edge(s: BinaryImage) -> BinaryImage:
    """One-pixel ring just outside ``s``: ``(s + N) minus s``."""
    return BinaryImage(external_edge_mask(s.mask))


def internal_edge(s: BinaryImage) -> BinaryImage:
    """One-pixel ring just inside ``s``: ``s`` minus its erosion by N."""
    return BinaryImage(internal_edge_mask(s.mask))


# -- partial grey --------------------------------------------------------------

def mask(a: BinaryImage, b: PartialGrayImage) -> PartialGrayImage:
    """Restrict surface ``b`` to the positions of ``a``."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return PartialGrayImage(b.values, b.defined & a.mask)


def union_gray(a: PartialGrayImage, b: PartialGrayImage) -> PartialGrayImage:
    """Union of two surfaces, keeping the top (larger) value where both are defined."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return PartialGrayImage.from_codes(np.maximum(a.codes(), b.codes()))


def value_at(a: PartialGrayImage, pos: tuple[int, int]):
    """Value of ``a`` at ``(x, y)``, or ``BOTTOM`` where undefined or off-raster."""
    x, y = pos
    if not (0 <= x < a.width and 0 <= y < a.height) or not a.defined[y, x]:
        return BOTTOM
    return int(a.values[y, x])


def _border_code(border) -> int:
    if border is None or border is BOTTOM:
        return BOTTOM_CODE
    if not 0 <= border <= LAMBDA:
        raise ValueError(f"border value must be BOTTOM or in [0, 255], got {border}")
    return int(border)


def erode_gray(k: PartialGrayImage, e=Q, border=BOTTOM) -> PartialGrayImage:
    """Minimum of ``k`` over ``x + e``; any undefined neighbour makes the result undefined.

    ``border`` is the value assumed for off-raster neighbours.
    """
    return PartialGrayImage.from_codes(erode_codes(k.codes(), e, _border_code(border)))


def dilate_gray(k: PartialGrayImage, e=Q, border=BOTTOM) -> PartialGrayImage:
    """Maximum of ``k`` over ``x + e``, ignoring undefined neighbours."""
    return PartialGrayImage.from_codes(dilate_codes(k.codes(), e, _border_code(border)))


def less_mask(a: PartialGrayImage, b: PartialGrayImage) -> BinaryImage:
    """Positions where ``value_at(a) < value_at(b)``; BOTTOM is below every value."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return BinaryImage(a.codes() < b.codes())
