"""Ray-cast synthetic road scenes with per-row ground truth.

The scene is rendered through the same flat-road camera model the
perspective front-end inverts, so the truth is exact in both directions.
World layout (metres): lane markings 0.15 wide whose inner edges sit at
``+-lane_half_width`` from the road centre line, asphalt out to 3.6 m, grass
beyond, sky above the horizon.  A curved road bends its centre line as
``curvature * y**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .imgcore import GrayImage
from .ipm import CameraGeometry
from .model import ModelKind, ModelSpec

SKY, GRASS, ASPHALT, PAINT = 170.0, 60.0, 90.0, 220.0


@dataclass(frozen=True)
class SceneSpec:
    size: int = 256
    curvature: float = 0.0
    lateral_offset_m: float = 0.0
    shadow: tuple[float, float] | None = None
    shadow_factor: float = 0.6
    noise_sigma: float = 5.0
    seed: int = 0
    lane_half_width: float = 1.75
    marking_w: float = 0.15
    road_half_width: float = 3.6
    supersample: int = 3


@dataclass
class Scene:
    frame: GrayImage
    cam: CameraGeometry
    spec: SceneSpec
    # row -> (lo, hi) fractional column extent of the marking on that row
    left_marking: dict[int, tuple[float, float]] = field(default_factory=dict)
    right_marking: dict[int, tuple[float, float]] = field(default_factory=dict)

    @property
    def horizon_row(self) -> int:
        return math.ceil(self.cam.horizon_row)

    def lane_model(self, coarse: int = 32, inset_px: float = 4.0) -> ModelSpec:
        """Straight coarse template whose base lies ``inset_px`` inside the bottom-row markings.

        With the default inset a lateral shift of 6 coarse pixels keeps the
        base on the raster.
        """
        return lane_model_for(self.cam, self.spec, coarse, inset_px)


def default_camera(size: int = 256) -> CameraGeometry:
    return CameraGeometry(height_m=1.5, pitch_rad=0.25, vfov_rad=0.7, hfov_rad=1.4,
                          image_w=size, image_h=size)


def _centre(spec: SceneSpec, y):
    return spec.lateral_offset_m + spec.curvature * y * y


def _shade(spec: SceneSpec, x, y):
    above = ~np.isfinite(y)
    yy = np.where(above, 1.0, y)
    u = np.abs(np.where(above, 0.0, x) - _centre(spec, yy))
    val = np.where(u <= spec.road_half_width, ASPHALT, GRASS)
    paint = (u >= spec.lane_half_width) & (u <= spec.lane_half_width + spec.marking_w)
    val = np.where(paint, PAINT, val)
    if spec.shadow is not None:
        y0, y1 = spec.shadow
        val = np.where((yy >= y0) & (yy <= y1), val * spec.shadow_factor, val)
    return np.where(above, SKY, val)


def render(spec: SceneSpec = SceneSpec(), cam: CameraGeometry | None = None) -> Scene:
    cam = cam or default_camera(spec.size)
    n = spec.size
    ss = spec.supersample
    sub = (np.arange(ss) + 0.5) / ss - 0.5
    acc = np.zeros((n, n))
    rows, cols = np.mgrid[0:n, 0:n].astype(float)
    for dy in sub:
        for dx in sub:
            x, y = cam.back_project(cols + dx, rows + dy)
            acc += _shade(spec, x, y)
    img = acc / (ss * ss)
    if spec.noise_sigma > 0:
        img = img + np.random.default_rng(spec.seed).normal(0.0, spec.noise_sigma, img.shape)
    frame = GrayImage(np.clip(np.rint(img), 0, 255).astype(np.uint8))

    scene = Scene(frame, cam, spec)
    for r in range(scene.horizon_row, n):
        _, y = cam.back_project(0.0, float(r))
        if not np.isfinite(y):
            continue
        c = _centre(spec, float(y))
        inner, outer = spec.lane_half_width, spec.lane_half_width + spec.marking_w
        lcols, _ = cam.project(np.array([c - outer, c - inner]), np.array([y, y]))
        rcols, _ = cam.project(np.array([c + inner, c + outer]), np.array([y, y]))
        scene.left_marking[r] = (float(lcols[0]), float(lcols[1]))
        scene.right_marking[r] = (float(rcols[0]), float(rcols[1]))
    return scene


def lane_model_for(cam: CameraGeometry, spec: SceneSpec, coarse: int = 32,
                   inset_px: float = 4.0) -> ModelSpec:
    n = spec.size
    f = coarse / n
    _, y = cam.back_project(0.0, float(n - 1))
    c = _centre(spec, float(y))
    cols, _ = cam.project(np.array([c - spec.lane_half_width, c + spec.lane_half_width]),
                          np.array([y, y]))
    vp_full, _ = cam.project(np.array([_centre(spec, 0.0)]), np.array([1e6]))

    def to_coarse(col):
        return (col + 0.5) * f - 0.5

    horizon = min(max(int(math.floor((math.ceil(cam.horizon_row) + 0.5) * f)), 0), coarse - 1)
    vp = min(max(to_coarse(float(vp_full[0])), 0.0), coarse - 1.0)
    return ModelSpec(ModelKind.LANE, coarse, coarse, horizon, vp,
                     to_coarse(float(cols[0])) + inset_px, to_coarse(float(cols[1])) - inset_px)


def row_errors(mask: np.ndarray, scene: Scene, first_row: int | None = None) -> dict[int, float]:
    """Worst horizontal distance per row between the detected left/right edges and the markings.

    The detected edge of a row is its leftmost (rightmost) foreground column;
    distance is measured to the marking's column interval.  Rows with no
    foreground score infinity.
    """
    if first_row is None:
        first_row = scene.horizon_row + 10
    out = {}
    for r in range(first_row, mask.shape[0]):
        cols = np.nonzero(mask[r])[0]
        if cols.size == 0 or r not in scene.left_marking:
            out[r] = math.inf
            continue
        errs = []
        for det, (lo, hi) in ((cols[0], scene.left_marking[r]), (cols[-1], scene.right_marking[r])):
            errs.append(max(0.0, lo - det, det - hi))
        out[r] = max(errs)
    return out


def fraction_within(mask: np.ndarray, scene: Scene, tol: float = 2.0) -> float:
    errs = row_errors(mask, scene)
    return sum(e <= tol for e in errs.values()) / len(errs)
