"""Parametric road / lane templates: a filled triangle or trapezoid per frame."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .imgcore import BinaryImage


class ModelKind(enum.Enum):
    ROAD = "road"
    LANE = "lane"


@dataclass(frozen=True)
class ModelSpec:
    """Template geometry.

    The region has its apex at ``(vp_col, horizon_row)`` and spans
    ``[bottom_left_col, bottom_right_col]`` on the last row.  Columns may be
    fractional (a centred apex on an even-width frame sits at ``(w - 1) / 2``)
    and the base may extend past the frame; it is clipped when rasterised.
    """

    kind: ModelKind = ModelKind.LANE
    image_w: int = 32
    image_h: int = 32
    horizon_row: int = 8
    vp_col: float = 15.5
    bottom_left_col: float = 4.0
    bottom_right_col: float = 27.0

    def __post_init__(self):
        if self.image_w < 1 or self.image_h < 1:
            raise ValueError("model size must be positive")
        if not 0 <= self.horizon_row < self.image_h:
            raise ValueError(f"horizon_row {self.horizon_row} outside [0, {self.image_h})")
        if not self.bottom_left_col < self.bottom_right_col:
            raise ValueError("bottom_left_col must be smaller than bottom_right_col")
        if not 0 <= self.vp_col < self.image_w:
            raise ValueError(f"vp_col {self.vp_col} outside [0, {self.image_w})")

    @property
    def key(self) -> str:
        return self.kind.value

    def scaled(self, factor: float) -> "ModelSpec":
        """Same shape on a raster ``factor`` times larger (pixel-centre scaling)."""
        def col(c):
            return (c + 0.5) * factor - 0.5
        return ModelSpec(self.kind, round(self.image_w * factor), round(self.image_h * factor),
                         int((self.horizon_row + 0.5) * factor - 0.5), col(self.vp_col),
                         col(self.bottom_left_col), col(self.bottom_right_col))

    def shifted(self, dx: float) -> "ModelSpec":
        return ModelSpec(self.kind, self.image_w, self.image_h, self.horizon_row,
                         min(max(self.vp_col + dx, 0.0), self.image_w - 1.0),
                         self.bottom_left_col + dx, self.bottom_right_col + dx)


@dataclass(frozen=True, eq=False)
class SyntheticModel:
    image: BinaryImage
    spec: ModelSpec | None = None
    name: str | None = None

    @property
    def key(self) -> str:
        if self.name is not None:
            return self.name
        return self.spec.key if self.spec is not None else ""


def row_spans(spec: ModelSpec) -> dict[int, tuple[int, int]]:
    """Inclusive column span for each row from the horizon down (before clipping)."""
    last = spec.image_h - 1
    spans = {}
    prev = None
    for y in range(spec.horizon_row, spec.image_h):
        t = 0.0 if last == spec.horizon_row else (y - spec.horizon_row) / (last - spec.horizon_row)
        left = spec.vp_col + t * (spec.bottom_left_col - spec.vp_col)
        right = spec.vp_col + t * (spec.bottom_right_col - spec.vp_col)
        # pixel c is inside when its centre lies in [left - 1/2, right + 1/2];
        # ceil/floor pairs are mirror images of each other, so symmetric specs stay symmetric
        lo = math.ceil(left - 0.5)
        hi = math.floor(right + 0.5)
        if hi < lo:
            lo = hi = math.floor((left + right) / 2 + 0.5)
        if prev is not None:
            # keep consecutive rows overlapping so the region stays 4-connected
            plo, phi = prev
            if lo > phi:
                lo = phi
            if hi < plo:
                hi = plo
        spans[y] = (lo, hi)
        prev = (lo, hi)
    return spans


def generate_model(spec: ModelSpec) -> SyntheticModel:
    m = np.zeros((spec.image_h, spec.image_w), dtype=bool)
    for y, (lo, hi) in row_spans(spec).items():
        lo, hi = max(lo, 0), min(hi, spec.image_w - 1)
        if lo <= hi:
            m[y, lo:hi + 1] = True
    return SyntheticModel(BinaryImage(m), spec)


def select_model(library: list[SyntheticModel], context: str) -> SyntheticModel:
    """Pick the library entry whose key equals ``context``."""
    if not library:
        raise ValueError("empty model library")
    for entry in library:
        if entry.key == context:
            return entry
    raise KeyError(f"no model for context {context!r}; known: {[e.key for e in library]}")
