"""Flat ``section.key = value`` configuration files for the command line.

Blank lines and ``#`` comments are ignored.  Unknown keys are rejected.
Every key is optional except that the perspective front-end needs all four
``camera.*`` angles and the height.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

from .dbs import DbsConfig, InternalRule
from .edges import ThresholdMode, ThresholdPolicy
from .ipm import BirdsEyeGrid, CameraGeometry
from .model import ModelKind, ModelSpec
from .pipeline import FrontEnd, OutputMode, PipelineConfig
from .pyramid import PyramidSchedule


class ConfigError(ValueError):
    pass


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _enum(cls):
    def parse(text: str):
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"expected one of {[m.value for m in cls]}, got {text!r}") from None
    return parse


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(","))


def _opt_int(text: str) -> int | None:
    return None if text.strip().lower() in ("none", "") else int(text)


# key -> (parser, default); None defaults mean "not set"
KEYS = {
    "schedule.full_size": (int, 256),
    "schedule.coarse_size": (int, 32),
    "schedule.led_size": (int, 64),
    "front_end.kind": (_enum(FrontEnd), FrontEnd.GRADIENT),
    "front_end.marking_w_cells": (int, 2),
    "front_end.contrast_t": (int, 20),
    "front_end.grid_cols": (int, 80),
    "front_end.grid_rows": (int, 380),
    "front_end.cell_m": (float, 0.10),
    "front_end.near_m": (float, 2.2),
    "dbs.max_iterations": (int, 5),
    "dbs.flat_handling": (_bool, True),
    "dbs.internal_rule": (_enum(InternalRule), InternalRule.APPENDIX_MAX),   # max | min
    "dbs.cycle_detection": (_bool, True),
    "dbs.dt_max_iters": (_opt_int, None),
    "dbs.temporal": (_bool, False),
    "dbs.temporal_iters": (int, 3),
    "threshold.mode": (_enum(ThresholdMode), ThresholdMode.PERCENTILE),
    "threshold.fixed_left": (int, 128),
    "threshold.fixed_right": (int, 128),
    "threshold.percentile_q": (float, 0.95),
    "camera.height_m": (float, None),
    "camera.pitch_deg": (float, None),
    "camera.vfov_deg": (float, None),
    "camera.hfov_deg": (float, None),
    "model.kind": (_enum(ModelKind), ModelKind.LANE),
    "model.horizon_row": (int, 8),
    "model.vp_col": (float, 15.5),
    "model.bottom_left_col": (float, 4.0),
    "model.bottom_right_col": (float, 27.0),
    "led.output_mode": (_enum(OutputMode), OutputMode.OVERLAY),
    "led.stripe_first": (_opt_int, None),
    "led.stripe_last": (_opt_int, None),
    "led.bins": (_floats, (-12.0, -4.0, 4.0, 12.0)),
}

CAMERA_KEYS = ("camera.height_m", "camera.pitch_deg", "camera.vfov_deg", "camera.hfov_deg")


@dataclass
class CliConfig:
    values: dict = field(default_factory=dict)

    def get(self, key: str):
        if key not in KEYS:
            raise KeyError(key)
        return self.values.get(key, KEYS[key][1])

    def set(self, key: str, value) -> None:
        if key not in KEYS:
            raise ConfigError(f"unknown config key: {key}")
        self.values[key] = value

    def has_camera(self) -> bool:
        return all(k in self.values for k in CAMERA_KEYS)

    def schedule(self) -> PyramidSchedule:
        return PyramidSchedule(self.get("schedule.full_size"), self.get("schedule.coarse_size"),
                               self.get("schedule.led_size"))

    def camera(self) -> CameraGeometry | None:
        if not self.has_camera():
            return None
        n = self.get("schedule.full_size")
        return CameraGeometry.from_degrees(*(self.get(k) for k in CAMERA_KEYS), image_w=n, image_h=n)

    def model_spec(self) -> ModelSpec:
        n = self.get("schedule.coarse_size")
        return ModelSpec(self.get("model.kind"), n, n, self.get("model.horizon_row"), self.get("model.vp_col"),
                         self.get("model.bottom_left_col"), self.get("model.bottom_right_col"))

    def pipeline(self) -> PipelineConfig:
        fe = self.get("front_end.kind")
        cam = self.camera()
        if fe is FrontEnd.IPM and cam is None:
            missing = [k for k in CAMERA_KEYS if k not in self.values]
            raise ConfigError(f"the ipm front-end needs camera settings; missing {', '.join(missing)}")
        first, last = self.get("led.stripe_first"), self.get("led.stripe_last")
        if (first is None) != (last is None):
            raise ConfigError("led.stripe_first and led.stripe_last must be given together")
        return PipelineConfig(
            schedule=self.schedule(),
            front_end=fe,
            dbs=DbsConfig(self.get("dbs.max_iterations"), self.get("dbs.flat_handling"),
                          self.get("dbs.internal_rule"), self.get("dbs.cycle_detection")),
            dt_max_iters=self.get("dbs.dt_max_iters"),
            output_mode=self.get("led.output_mode"),
            temporal=self.get("dbs.temporal"),
            temporal_iters=self.get("dbs.temporal_iters"),
            threshold=ThresholdPolicy(self.get("threshold.mode"), self.get("threshold.fixed_left"),
                                      self.get("threshold.fixed_right"), self.get("threshold.percentile_q")),
            cam=cam,
            grid=BirdsEyeGrid(self.get("front_end.grid_cols"), self.get("front_end.grid_rows"),
                              self.get("front_end.cell_m"), self.get("front_end.near_m")),
            marking_w_cells=self.get("front_end.marking_w_cells"),
            contrast_t=self.get("front_end.contrast_t"),
            led_stripe_rows=None if first is None else (first, last),
            led_bins=self.get("led.bins"),
        )


def parse_config(text: str) -> CliConfig:
    cfg = CliConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown config key: {key}")
        try:
            cfg.values[key] = KEYS[key][0](value)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return cfg


def load_config(path) -> CliConfig:
    return parse_config(Path(path).read_text())


def dump_config(cfg: CliConfig) -> str:
    """Every key with its effective value, in a form :func:`parse_config` reads back."""
    lines = []
    for key in KEYS:
        v = cfg.get(key)
        if v is None:
            continue
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, tuple):
            v = ",".join(repr(x) for x in v)
        elif not isinstance(v, (int, float)):
            v = v.value
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"


def with_overrides(cfg: CliConfig, pairs: dict) -> CliConfig:
    """Copy of ``cfg`` with the non-None entries of ``pairs`` applied."""
    out = replace(cfg, values=dict(cfg.values))
    for key, value in pairs.items():
        if value is not None:
            out.set(key, value)
    return out
