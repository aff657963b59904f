"""Coarse-to-fine detection: pyramid descent, per-level stretching, ascent and output."""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .dbs import DbsConfig, DbsTrace, dbs_iterate
from .edges import ThresholdPolicy, gradient_evidence
from .imgcore import BinaryImage, GrayImage
from .ipm import BirdsEyeGrid, CameraGeometry, PerspectiveMap, perspective_evidence
from .model import SyntheticModel
from .morph import internal_edge
from .pyramid import PyramidSchedule, expand_binary, gray_pyramid, reduce_binary, reduce_binary_to


class FrontEnd(enum.Enum):
    GRADIENT = "gradient"
    IPM = "ipm"


class OutputMode(enum.Enum):
    OVERLAY = "overlay"
    LED = "led"


class FrameStatus(enum.Enum):
    OK = "OK"
    NO_EVIDENCE = "NO_EVIDENCE"


class NoEvidenceError(ValueError):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    schedule: PyramidSchedule = PyramidSchedule()
    front_end: FrontEnd = FrontEnd.GRADIENT
    dbs: DbsConfig = DbsConfig()
    dt_max_iters: int | None = None
    output_mode: OutputMode = OutputMode.OVERLAY
    temporal: bool = False
    temporal_iters: int = 3
    threshold: ThresholdPolicy = ThresholdPolicy()
    cam: CameraGeometry | None = None
    grid: BirdsEyeGrid = BirdsEyeGrid()
    marking_w_cells: int = 2
    contrast_t: int = 20
    # inclusive rows of the led-size result; None = bottom quarter
    led_stripe_rows: tuple[int, int] | None = None
    # offsets separating the 5 LEDs, left to right
    led_bins: tuple[float, float, float, float] = (-12.0, -4.0, 4.0, 12.0)

    def __post_init__(self):
        if self.front_end is FrontEnd.IPM and self.cam is None:
            raise ValueError("the perspective front-end needs a camera geometry")
        if self.temporal_iters < 1:
            raise ValueError("temporal_iters must be >= 1")
        b = self.led_bins
        if len(b) != 4 or list(b) != sorted(b):
            raise ValueError("led_bins must be 4 increasing offsets")

    def stripe(self) -> tuple[int, int]:
        if self.led_stripe_rows is not None:
            return self.led_stripe_rows
        n = self.schedule.led_size
        return n - n // 4, n - 1


@dataclass(frozen=True)
class LedState:
    lit: int

    def __post_init__(self):
        if not 0 <= self.lit <= 4:
            raise ValueError(f"lit LED index {self.lit} outside 0..4")


@dataclass
class FrameResult:
    status: FrameStatus
    stretched: BinaryImage
    boundary: BinaryImage
    traces: list[tuple[int, DbsTrace]] = field(default_factory=list)
    led: LedState | None = None
    timing: dict[str, float] = field(default_factory=dict)
    stages: list[str] = field(default_factory=list)
    frame_index: int = 0

    @property
    def iterations(self) -> int:
        return sum(t.iterations_run for _, t in self.traces)

    @property
    def total_ms(self) -> float:
        return 1000.0 * sum(self.timing.values())


@lru_cache(maxsize=8)
def perspective_map(cam: CameraGeometry, grid: BirdsEyeGrid) -> PerspectiveMap:
    pmap = PerspectiveMap(cam, grid)
    # build both lookup tables up front so per-frame timing excludes them
    pmap.cell_source, pmap.pixel_cell
    return pmap


def _evidence_levels(frame: GrayImage, grey: dict[int, GrayImage], sizes: list[int],
                     cfg: PipelineConfig) -> dict[int, BinaryImage]:
    if cfg.front_end is FrontEnd.GRADIENT:
        return {n: gradient_evidence(grey[n], cfg.threshold) for n in sizes}
    pmap = perspective_map(cfg.cam, cfg.grid)
    ev = perspective_evidence(frame, pmap, cfg.marking_w_cells, cfg.contrast_t)
    out = {}
    while True:
        if ev.width in sizes:
            out[ev.width] = ev
        if ev.width <= min(sizes):
            return out
        ev = reduce_binary(ev)


def led_from_result(stretched: BinaryImage, cfg: PipelineConfig = PipelineConfig()) -> LedState:
    """Quantise the lateral centroid of a stripe of the result into one of 5 LEDs."""
    n = cfg.schedule.led_size
    if stretched.shape != (n, n):
        raise ValueError(f"expected a {n}x{n} result, got {stretched.width}x{stretched.height}")
    r0, r1 = cfg.stripe()
    ys, xs = np.nonzero(stretched.mask[r0:r1 + 1])
    if xs.size == 0:
        raise NoEvidenceError("LED stripe is empty")
    offset = xs.mean() - (n - 1) / 2
    b0, b1, b2, b3 = cfg.led_bins
    if offset < b0:
        lit = 0
    elif offset < b1:
        lit = 1
    elif offset <= b2:
        lit = 2
    elif offset <= b3:
        lit = 3
    else:
        lit = 4
    return LedState(lit)


def _pass_through(model: SyntheticModel, top: int) -> BinaryImage:
    s = model.image
    while s.width < top:
        s = expand_binary(s)
    return s


def process_frame(frame: GrayImage, model: SyntheticModel, cfg: PipelineConfig = PipelineConfig(),
                  dbs: DbsConfig | None = None) -> FrameResult:
    """Run the full coarse-to-fine stretch of ``model`` onto ``frame``.

    ``dbs`` overrides ``cfg.dbs`` (the temporal mode uses a smaller budget).
    """
    sched = cfg.schedule
    if frame.shape != (sched.full_size, sched.full_size):
        raise ValueError(f"frame must be {sched.full_size}x{sched.full_size}, got {frame.width}x{frame.height}")
    if model.image.shape != (sched.coarse_size, sched.coarse_size):
        raise ValueError(f"model must be {sched.coarse_size}x{sched.coarse_size}")
    dbs = dbs or cfg.dbs
    top = sched.led_size if cfg.output_mode is OutputMode.LED else sched.full_size
    sizes = sched.sizes_up(top)
    timing: dict[str, float] = {}
    stages: list[str] = []

    t = time.perf_counter()
    grey = gray_pyramid(frame, sched.coarse_size)
    timing["reduce"] = time.perf_counter() - t
    stages.append(f"reduce:{sched.full_size}->{sched.coarse_size}")

    t = time.perf_counter()
    evidence = _evidence_levels(frame, grey, sizes, cfg)
    timing["evidence"] = time.perf_counter() - t

    s = model.image
    traces = []
    t = time.perf_counter()
    for n in sizes:
        if n > s.width:
            s = expand_binary(s)
        ev = evidence[n]
        if not ev.mask.any():
            timing["dbs"] = time.perf_counter() - t
            stretched = _pass_through(model, top)
            return FrameResult(FrameStatus.NO_EVIDENCE, stretched, internal_edge(stretched),
                               traces, None, timing, stages + [f"no-evidence:{n}"])
        s, trace = dbs_iterate(s, ev, dbs, cfg.dt_max_iters)
        traces.append((n, trace))
        stages.append(f"dbs:{n}")
    timing["dbs"] = time.perf_counter() - t

    result = FrameResult(FrameStatus.OK, s, internal_edge(s), traces, None, timing, stages)
    if cfg.output_mode is OutputMode.LED:
        try:
            result.led = led_from_result(s, cfg)
        except NoEvidenceError:
            result.status = FrameStatus.NO_EVIDENCE
    return result


def overlay(frame: GrayImage, boundary: BinaryImage) -> np.ndarray:
    """Grey frame as RGB with boundary pixels painted pure red."""
    if boundary.shape != frame.shape:
        raise ValueError(f"dimension mismatch: frame {frame.shape} vs boundary {boundary.shape}")
    rgb = np.repeat(frame.values[:, :, None], 3, axis=2)
    rgb[boundary.mask] = (255, 0, 0)
    return rgb


def full_resolution_boundary(result: FrameResult, size: int) -> BinaryImage:
    """Boundary of the result replicated up to ``size`` (for LED-mode overlays)."""
    s = result.stretched
    while s.width < size:
        s = expand_binary(s)
    return internal_edge(s)


def process_sequence(frames: Iterable[GrayImage], model: SyntheticModel,
                     cfg: PipelineConfig = PipelineConfig()) -> Iterator[FrameResult]:
    """Process frames in order, seeding each from the previous stretched template.

    Without ``cfg.temporal`` every frame starts from ``model``.  A frame with no
    evidence resets the next one to ``model`` and the full iteration budget.

    The carried template is reduced with the all-four rule so it starts just
    inside the previous boundary.  An any-of-four reduction grows it by up to
    a coarse pixel per side; the boundary then settles on the far side of the
    evidence and creeps outward from frame to frame.
    """
    coarse = cfg.schedule.coarse_size
    seed = model
    short = replace(cfg.dbs, max_iterations=cfg.temporal_iters)
    for k, frame in enumerate(frames):
        fresh = seed is model
        result = process_frame(frame, seed, cfg, None if fresh else short)
        result.frame_index = k
        yield result
        if not cfg.temporal or result.status is FrameStatus.NO_EVIDENCE:
            seed = model
        else:
            carried = reduce_binary_to(result.stretched, coarse, interior=True)
            # a sliver can vanish under the all-four rule; fall back to the library model
            seed = SyntheticModel(carried, name="temporal") if carried.count() else model
