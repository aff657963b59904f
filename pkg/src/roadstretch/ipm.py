"""Flat-road inverse perspective mapping and lateral marking detection.

Camera model (zero roll and yaw).  A source pixel at row ``r`` views the
ground at a depression angle ``pitch + (r / (H - 1) - 1/2) * vfov``; column
``c`` has lateral angle ``a = (c / (W - 1) - 1/2) * hfov``.  A ground point at
forward distance ``y`` and lateral offset ``x`` therefore satisfies

    tan(depression) = height / y
    tan(a)          = x / sqrt(y**2 + height**2)

The bird's-eye grid has square cells of ``cell_m`` metres.  Cell column ``i``
is at ``x = (i - cols / 2) * cell_m``; the bottom grid row is at ``near_m`` and
each row up adds ``cell_m``, so every cell covers the same ground area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import morph
from .imgcore import BinaryImage, GrayImage


class DegenerateGeometryError(ValueError):
    pass


@dataclass(frozen=True)
class CameraGeometry:
    height_m: float = 1.5
    pitch_rad: float = 0.25
    vfov_rad: float = 0.7
    hfov_rad: float = 1.4
    image_w: int = 256
    image_h: int = 256

    def __post_init__(self):
        if self.height_m <= 0:
            raise DegenerateGeometryError("camera height must be positive")
        if not 0 < self.pitch_rad < math.pi / 2:
            raise DegenerateGeometryError("pitch must lie in (0, pi/2)")
        if not (0 < self.vfov_rad < math.pi and 0 < self.hfov_rad < math.pi):
            raise DegenerateGeometryError("fields of view must lie in (0, pi)")
        if self.horizon_row > self.image_h - 1:
            raise DegenerateGeometryError(f"horizon row {self.horizon_row:.1f} is below the image")

    @classmethod
    def from_degrees(cls, height_m, pitch_deg, vfov_deg, hfov_deg, image_w=256, image_h=256):
        return cls(height_m, math.radians(pitch_deg), math.radians(vfov_deg),
                   math.radians(hfov_deg), image_w, image_h)

    @property
    def horizon_row(self) -> float:
        """Fractional row whose viewing ray is parallel to the ground."""
        return (self.image_h - 1) * (0.5 - self.pitch_rad / self.vfov_rad)

    def project(self, x, y):
        """Ground point(s) to fractional (col, row); NaN where not in front of the camera."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            dep = np.arctan2(self.height_m, y)
            row = (self.image_h - 1) * ((dep - self.pitch_rad) / self.vfov_rad + 0.5)
            lat = np.arctan(x / np.hypot(y, self.height_m))
            col = (self.image_w - 1) * (lat / self.hfov_rad + 0.5)
        bad = y <= 0
        return np.where(bad, np.nan, col), np.where(bad, np.nan, row)

    def back_project(self, col, row):
        """Fractional (col, row) to ground (x, y); NaN at or above the horizon."""
        col = np.asarray(col, dtype=float)
        row = np.asarray(row, dtype=float)
        dep = self.pitch_rad + (row / (self.image_h - 1) - 0.5) * self.vfov_rad
        with np.errstate(divide="ignore", invalid="ignore"):
            y = np.where(dep > 0, self.height_m / np.tan(dep), np.nan)
            lat = (col / (self.image_w - 1) - 0.5) * self.hfov_rad
            x = np.hypot(y, self.height_m) * np.tan(lat)
        return x, y


@dataclass(frozen=True)
class BirdsEyeGrid:
    cols: int = 80
    rows: int = 380
    cell_m: float = 0.10
    near_m: float = 2.2

    def __post_init__(self):
        if self.cell_m <= 0:
            raise ValueError("cell_m must be positive")
        if self.cols < 1 or self.rows < 1:
            raise ValueError("grid must have at least one cell")
        if self.near_m <= 0:
            raise ValueError("near_m must be positive")

    def cell_ground(self):
        """Ground (x, y) of every cell centre, arrays of shape (rows, cols)."""
        i = np.arange(self.cols)
        j = self.rows - 1 - np.arange(self.rows)    # grid row index counted from the bottom
        x = (i - self.cols / 2) * self.cell_m
        y = self.near_m + j * self.cell_m
        return np.broadcast_to(x[None, :], (self.rows, self.cols)), np.broadcast_to(y[:, None], (self.rows, self.cols))

    def ground_to_cell(self, x, y):
        """Nearest cell (col, array row) for ground points; -1 where outside the grid."""
        i = np.rint(np.asarray(x) / self.cell_m + self.cols / 2)
        j = np.rint((np.asarray(y) - self.near_m) / self.cell_m)
        ok = np.isfinite(i) & np.isfinite(j) & (i >= 0) & (i < self.cols) & (j >= 0) & (j < self.rows)
        i = np.where(ok, i, -1).astype(np.int64)
        r = np.where(ok, self.rows - 1 - j, -1).astype(np.int64)
        return i, r


class PerspectiveMap:
    """Precomputed nearest-neighbour lookup tables for one camera and grid."""

    def __init__(self, cam: CameraGeometry, grid: BirdsEyeGrid):
        if cam.horizon_row > cam.image_h - 1:
            raise DegenerateGeometryError("horizon below the image")
        self.cam = cam
        self.grid = grid

    @cached_property
    def cell_source(self):
        """For every cell: the source (row, col) it samples and whether it is valid."""
        gx, gy = self.grid.cell_ground()
        col, row = self.cam.project(gx, gy)
        c = np.rint(col)
        r = np.rint(row)
        valid = (np.isfinite(c) & np.isfinite(r) & (c >= 0) & (c < self.cam.image_w)
                 & (r >= 0) & (r < self.cam.image_h) & (r > self.cam.horizon_row))
        return np.where(valid, r, 0).astype(np.int64), np.where(valid, c, 0).astype(np.int64), valid

    @cached_property
    def pixel_cell(self):
        """For every source pixel: the cell (array row, col) containing its ground point."""
        rr, cc = np.mgrid[0:self.cam.image_h, 0:self.cam.image_w]
        x, y = self.cam.back_project(cc, rr)
        i, r = self.grid.ground_to_cell(x, y)
        valid = i >= 0
        return r, i, valid

    def remove(self, img: GrayImage) -> GrayImage:
        src_r, src_c, valid = self.cell_source
        out = np.where(valid, img.values[src_r, src_c], 0).astype(np.uint8)
        return GrayImage(out)

    def reintroduce(self, marks: BinaryImage) -> BinaryImage:
        if marks.shape != (self.grid.rows, self.grid.cols):
            raise ValueError(f"marks shape {marks.shape} does not match the grid")
        out = np.zeros((self.cam.image_h, self.cam.image_w), dtype=bool)
        src_r, src_c, valid = self.cell_source
        sel = marks.mask & valid
        out[src_r[sel], src_c[sel]] = True
        # near the camera one cell spans many pixels; fill its whole footprint too
        cell_r, cell_c, pvalid = self.pixel_cell
        out |= pvalid & marks.mask[np.where(pvalid, cell_r, 0), np.where(pvalid, cell_c, 0)]
        return BinaryImage(out)

    def ground_region(self) -> BinaryImage:
        """Source pixels reached by the grid (reprojection of a fully marked grid)."""
        return self.reintroduce(BinaryImage.full(self.grid.cols, self.grid.rows))


def remove_perspective(img: GrayImage, cam: CameraGeometry, grid: BirdsEyeGrid) -> GrayImage:
    """Resample ``img`` onto the bird's-eye grid; unreachable cells are 0."""
    if img.shape != (cam.image_h, cam.image_w):
        raise ValueError(f"image {img.width}x{img.height} does not match the camera")
    return PerspectiveMap(cam, grid).remove(img)


def detect_markings(bird: GrayImage, marking_w_cells: int = 2, contrast_t: int = 20) -> BinaryImage:
    """Pixels brighter by ``contrast_t`` than both pixels ``marking_w_cells`` to the side.

    A vertical opening by a two-pixel element then drops detections without a
    vertical neighbour.
    """
    if marking_w_cells < 1:
        raise ValueError("marking_w_cells must be >= 1")
    v = bird.values.astype(np.int16)
    m = marking_w_cells
    left = morph.neighbor(v, -m, 0, 10_000)
    right = morph.neighbor(v, m, 0, 10_000)
    hit = (v - left >= contrast_t) & (v - right >= contrast_t)
    return morph.opening(BinaryImage(hit), morph.VERTICAL_PAIR)


def reintroduce_perspective(marks: BinaryImage, cam: CameraGeometry, grid: BirdsEyeGrid) -> BinaryImage:
    """Paint marked cells back onto the source raster."""
    return PerspectiveMap(cam, grid).reintroduce(marks)


def perspective_evidence(img: GrayImage, pmap: PerspectiveMap, marking_w_cells: int = 2,
                         contrast_t: int = 20) -> BinaryImage:
    """Full perspective front-end: resample, detect markings, reproject."""
    return pmap.reintroduce(detect_markings(pmap.remove(img), marking_w_cells, contrast_t))
