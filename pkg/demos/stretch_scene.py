"""Render a synthetic road, stretch the lane template onto it with both
front-ends, and write overlays next to this script.

    python3 demos/stretch_scene.py [curvature]
"""

import sys
from pathlib import Path

from roadstretch.edges import ThresholdMode, ThresholdPolicy
from roadstretch.model import generate_model
from roadstretch.netpbm import save_color, save_gray
from roadstretch.pipeline import (FrontEnd, PipelineConfig, full_resolution_boundary, overlay,
                                  process_frame)
from roadstretch.scenes import SceneSpec, default_camera, fraction_within, render

out = Path(__file__).with_name("out")
out.mkdir(exist_ok=True)
cam = default_camera()
scene = render(SceneSpec(curvature=float(sys.argv[1]) if len(sys.argv) > 1 else 0.0), cam)
model = generate_model(scene.lane_model())
save_gray(scene.frame, out / "frame.pgm")

for fe in FrontEnd:
    cfg = PipelineConfig(front_end=fe, cam=cam, threshold=ThresholdPolicy(ThresholdMode.FIXED, 30, 30))
    r = process_frame(scene.frame, model, cfg)
    score = fraction_within(r.stretched.mask, scene)
    print(f"{fe.value:8s} {r.status.value:12s} iterations {r.iterations:3d}  rows within 2 px {score:.3f}")
    for name, tr in r.traces:
        print(f"    {name:4d}: {tr.iterations_run} iterations, stop {tr.stop_reason.value}")
    save_color(overlay(scene.frame, full_resolution_boundary(r, 256)), out / f"overlay_{fe.value}.ppm")
print("wrote", out)
