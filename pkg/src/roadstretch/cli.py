"""Command-line entry point: ``roadstretch <command> ...``.

Exit codes: 0 success, 1 error (bad input, config or arguments), 2 when a
frame had no usable evidence.
"""

from __future__ import annotations

import argparse
import glob
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import netpbm
from .config import KEYS, CliConfig, ConfigError, load_config, with_overrides
from .dt import brute_force_dt, distance_transform
from .imgcore import BinaryImage, GrayImage
from .ipm import PerspectiveMap, detect_markings
from .model import SyntheticModel, generate_model
from .pipeline import (FrameResult, FrameStatus, full_resolution_boundary, overlay, process_frame,
                       process_sequence)

EXIT_OK, EXIT_ERROR, EXIT_NO_EVIDENCE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which this tool reserves for NO_EVIDENCE
    def error(self, message):
        raise UsageError(message)


def _add_pipeline_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file (see README)")
    p.add_argument("--front-end", choices=["gradient", "ipm"])
    p.add_argument("--mode", choices=["overlay", "led"])
    p.add_argument("--temporal", action="store_true", default=None)
    p.add_argument("--dbs-iters", type=int)
    p.add_argument("--dt-iters", type=int)
    p.add_argument("--seed", type=int, default=0, help="accepted for uniformity; the pipeline is deterministic")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--model", help="coarse template as PBM")
    g.add_argument("--gen-model", nargs="?", const="", metavar="KEY=VAL,...",
                   help="generate the template from the model.* config keys, with optional overrides")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="roadstretch", description="Coarse-to-fine lane and road boundary stretching.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("detect", help="stretch a template onto one frame")
    p.add_argument("frame")
    _add_model_flags(p)
    _add_pipeline_flags(p)
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("sequence", help="process an ordered list of frames")
    p.add_argument("frames", nargs="*", help="PGM files, directories or glob patterns")
    _add_model_flags(p)
    _add_pipeline_flags(p)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--no-images", action="store_true", help="write only the trace")

    p = sub.add_parser("make-model", help="rasterise a template to PBM")
    p.add_argument("--config")
    p.add_argument("--kind", choices=["road", "lane"])
    p.add_argument("--size", type=int, help="raster side (default schedule.coarse_size)")
    p.add_argument("--horizon", type=int)
    p.add_argument("--vp", type=float)
    p.add_argument("--left", type=float)
    p.add_argument("--right", type=float)
    p.add_argument("--out", required=True)

    p = sub.add_parser("dt-check", help="compare the iterative distance transform with brute force")
    p.add_argument("--size", type=int, default=64)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--max-points", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ipm-debug", help="write the stages of the perspective front-end")
    p.add_argument("frame")
    p.add_argument("--config")
    p.add_argument("--out-prefix", required=True)

    p = sub.add_parser("make-scene", help="render synthetic road frames with known markings")
    p.add_argument("--out", help="single PGM output")
    p.add_argument("--out-dir", help="write --frames numbered PGMs here")
    p.add_argument("--frames", type=int, default=1)
    p.add_argument("--curvature", type=float, default=0.0)
    p.add_argument("--offset", type=float, default=0.0, help="lateral road offset in metres")
    p.add_argument("--drift", type=float, default=0.0, help="offset change per frame in metres")
    p.add_argument("--shadow", help="Y0,Y1 forward distances of a dimmed band")
    p.add_argument("--noise", type=float, default=5.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--model-out", help="also write the matching coarse lane template")
    p.add_argument("--config-out", help="also write a config matching the scene camera and template")
    return ap


def _config(args) -> CliConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else CliConfig()
    over = {}
    if getattr(args, "front_end", None):
        over["front_end.kind"] = _parse("front_end.kind", args.front_end)
    if getattr(args, "mode", None):
        over["led.output_mode"] = _parse("led.output_mode", args.mode)
    if getattr(args, "temporal", None):
        over["dbs.temporal"] = True
    if getattr(args, "dbs_iters", None) is not None:
        over["dbs.max_iterations"] = args.dbs_iters
    if getattr(args, "dt_iters", None) is not None:
        over["dbs.dt_max_iters"] = args.dt_iters
    return with_overrides(cfg, over)


def _parse(key: str, text: str):
    if key not in KEYS:
        raise ConfigError(f"unknown config key: {key}")
    try:
        return KEYS[key][0](text)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {exc}") from None


def _model(args, cfg: CliConfig) -> SyntheticModel:
    if args.model:
        return SyntheticModel(netpbm.load_binary(args.model), name=Path(args.model).stem)
    if args.gen_model:
        over = {}
        for item in args.gen_model.split(","):
            if not item.strip():
                continue
            key, _, value = item.partition("=")
            full = "model." + key.strip()
            over[full] = _parse(full, value)
        cfg = with_overrides(cfg, over)
    return generate_model(cfg.model_spec())


def _trace_line(r: FrameResult, ms: float) -> str:
    led = "-" if r.led is None else str(r.led.lit)
    return f"{r.frame_index} {r.status.value} {led} {r.iterations} {ms:.2f}"


def _write_outputs(prefix: str, frame: GrayImage, r: FrameResult) -> None:
    boundary = r.boundary if r.boundary.shape == frame.shape else full_resolution_boundary(r, frame.width)
    netpbm.save_color(overlay(frame, boundary), prefix + ".overlay.ppm")
    netpbm.save_binary(r.stretched, prefix + ".mask.pbm")


def _ensure_parent(prefix: str) -> None:
    parent = os.path.dirname(prefix)
    if parent:
        os.makedirs(parent, exist_ok=True)


def cmd_detect(args) -> int:
    cfg = _config(args)
    pcfg = cfg.pipeline()
    model = _model(args, cfg)
    frame = netpbm.load_gray(args.frame)
    t = time.perf_counter()
    r = process_frame(frame, model, pcfg)
    ms = 1000 * (time.perf_counter() - t)
    _ensure_parent(args.out_prefix)
    _write_outputs(args.out_prefix, frame, r)
    line = _trace_line(r, ms)
    Path(args.out_prefix + ".trace.txt").write_text(line + "\n")
    print(line)
    return EXIT_OK if r.status is FrameStatus.OK else EXIT_NO_EVIDENCE


def _expand_frames(items: list[str]) -> list[str]:
    out = []
    for item in items:
        if os.path.isdir(item):
            out.extend(sorted(glob.glob(os.path.join(item, "*.pgm"))))
        elif any(c in item for c in "*?["):
            out.extend(sorted(glob.glob(item)))
        else:
            out.append(item)
    return out


def cmd_sequence(args) -> int:
    cfg = _config(args)
    pcfg = cfg.pipeline()
    model = _model(args, cfg)
    paths = _expand_frames(args.frames)
    if not paths:
        raise ValueError("no frames given")
    os.makedirs(args.out_dir, exist_ok=True)
    frames: dict[int, GrayImage] = {}

    def source():
        for k, path in enumerate(paths):
            frames[k] = netpbm.load_gray(path)
            yield frames[k]

    lines, times, statuses = [], [], []
    start = time.perf_counter()
    t = start
    for r in process_sequence(source(), model, pcfg):
        ms = 1000 * (time.perf_counter() - t)
        frame = frames.pop(r.frame_index)
        if not args.no_images:
            stem = os.path.join(args.out_dir, Path(paths[r.frame_index]).stem)
            _write_outputs(stem, frame, r)
        line = _trace_line(r, ms)
        print(line)
        lines.append(line)
        times.append(ms)
        statuses.append(r.status)
        t = time.perf_counter()
    wall = time.perf_counter() - start
    mean_ms = float(np.mean(times))
    fps = len(times) / wall if wall > 0 else float("inf")
    summary = f"# frames {len(times)} mean_ms {mean_ms:.2f} fps {fps:.1f}"
    print(summary)
    Path(args.out_dir, "trace.txt").write_text("\n".join(lines + [summary]) + "\n")
    if all(s is FrameStatus.NO_EVIDENCE for s in statuses):
        return EXIT_NO_EVIDENCE
    return EXIT_OK


def cmd_make_model(args) -> int:
    cfg = load_config(args.config) if args.config else CliConfig()
    over = {"model.kind": _parse("model.kind", args.kind) if args.kind else None,
            "schedule.coarse_size": args.size, "model.horizon_row": args.horizon,
            "model.vp_col": args.vp, "model.bottom_left_col": args.left, "model.bottom_right_col": args.right}
    cfg = with_overrides(cfg, over)
    m = generate_model(cfg.model_spec())
    _ensure_parent(args.out)
    netpbm.save_binary(m.image, args.out)
    print(f"wrote {args.out} ({m.image.width}x{m.image.height}, {m.image.count()} pixels)")
    return EXIT_OK


def cmd_dt_check(args) -> int:
    if args.size < 1 or args.trials < 1 or args.max_points < 1:
        raise ValueError("size, trials and max-points must be positive")
    rng = np.random.default_rng(args.seed)
    n = args.size
    bad = 0
    start = time.perf_counter()
    for trial in range(args.trials):
        k = int(rng.integers(1, min(args.max_points, n * n) + 1))
        flat = rng.choice(n * n, size=k, replace=False)
        mask = np.zeros(n * n, dtype=bool)
        mask[flat] = True
        ev = BinaryImage(mask.reshape(n, n))
        fast, slow = distance_transform(ev), brute_force_dt(ev)
        diff = int(np.count_nonzero(fast.value != slow.value))
        if diff:
            bad += 1
            print(f"trial {trial}: {k} points, {diff} mismatching pixels")
    secs = time.perf_counter() - start
    print(f"dt-check size {n} trials {args.trials} seed {args.seed}: "
          f"{args.trials - bad} exact, {bad} mismatched ({secs:.2f} s)")
    return EXIT_OK if bad == 0 else EXIT_ERROR


def cmd_ipm_debug(args) -> int:
    cfg = load_config(args.config) if args.config else CliConfig()
    cam = cfg.camera()
    if cam is None:
        raise ConfigError("ipm-debug needs camera.height_m, camera.pitch_deg, camera.vfov_deg and camera.hfov_deg")
    pcfg = with_overrides(cfg, {"front_end.kind": _parse("front_end.kind", "ipm")}).pipeline()
    frame = netpbm.load_gray(args.frame)
    if frame.shape != (cam.image_h, cam.image_w):
        raise ValueError(f"frame {frame.width}x{frame.height} does not match schedule.full_size {cam.image_w}")
    pmap = PerspectiveMap(cam, pcfg.grid)
    bird = pmap.remove(frame)
    marks = detect_markings(bird, pcfg.marking_w_cells, pcfg.contrast_t)
    back = pmap.reintroduce(marks)
    p = args.out_prefix
    _ensure_parent(p)
    netpbm.save_gray(frame, p + ".source.pgm")
    netpbm.save_gray(bird, p + ".birdseye.pgm")
    netpbm.save_binary(marks, p + ".markings.pbm")
    netpbm.save_binary(back, p + ".reprojected.pbm")
    netpbm.save_color(overlay(frame, back), p + ".overlay.ppm")
    print(f"bird's-eye {bird.width}x{bird.height}; {marks.count()} marked cells; {back.count()} reprojected pixels")
    return EXIT_OK


def scene_config_text(scene) -> str:
    """Config for synthetic scenes: their camera, their lane template and a calibrated threshold."""
    cam, m = scene.cam, scene.lane_model()
    pairs = {
        "threshold.mode": "fixed",
        "threshold.fixed_left": 30,
        "threshold.fixed_right": 30,
        "camera.height_m": cam.height_m,
        "camera.pitch_deg": math.degrees(cam.pitch_rad),
        "camera.vfov_deg": math.degrees(cam.vfov_rad),
        "camera.hfov_deg": math.degrees(cam.hfov_rad),
        "model.kind": m.kind.value,
        "model.horizon_row": m.horizon_row,
        "model.vp_col": m.vp_col,
        "model.bottom_left_col": m.bottom_left_col,
        "model.bottom_right_col": m.bottom_right_col,
    }
    return "# written by roadstretch make-scene\n" + "".join(f"{k} = {v}\n" for k, v in pairs.items())


def cmd_make_scene(args) -> int:
    from .scenes import SceneSpec, default_camera, render
    if bool(args.out) == bool(args.out_dir):
        raise ValueError("give exactly one of --out and --out-dir")
    if args.out and args.frames != 1:
        raise ValueError("--frames needs --out-dir")
    shadow = None
    if args.shadow:
        y0, y1 = (float(v) for v in args.shadow.split(","))
        shadow = (y0, y1)
    cam = default_camera()
    scene = None
    for k in range(args.frames):
        spec = SceneSpec(curvature=args.curvature, lateral_offset_m=args.offset + k * args.drift,
                         shadow=shadow, noise_sigma=args.noise, seed=args.seed + k)
        scene = render(spec, cam)
        if args.out:
            path = args.out
            _ensure_parent(path)
        else:
            os.makedirs(args.out_dir, exist_ok=True)
            path = os.path.join(args.out_dir, f"frame_{k:04d}.pgm")
        netpbm.save_gray(scene.frame, path)
    if args.model_out:
        _ensure_parent(args.model_out)
        netpbm.save_binary(generate_model(scene.lane_model()).image, args.model_out)
    if args.config_out:
        _ensure_parent(args.config_out)
        Path(args.config_out).write_text(scene_config_text(scene))
    print(f"wrote {args.frames} frame(s)")
    return EXIT_OK


COMMANDS = {
    "detect": cmd_detect,
    "sequence": cmd_sequence,
    "make-model": cmd_make_model,
    "dt-check": cmd_dt_check,
    "ipm-debug": cmd_ipm_debug,
    "make-scene": cmd_make_scene,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
