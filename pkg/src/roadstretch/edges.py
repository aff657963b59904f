"""Gradient evidence: 3x3 morphological gradient and per-half thresholding."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .imgcore import LAMBDA, BinaryImage, GrayImage


class ThresholdMode(enum.Enum):
    FIXED = "fixed"
    PERCENTILE = "percentile"


@dataclass(frozen=True)
class ThresholdPolicy:
    mode: ThresholdMode = ThresholdMode.PERCENTILE
    fixed_left: int = 128
    fixed_right: int = 128
    percentile_q: float = 0.95

    def __post_init__(self):
        for v in (self.fixed_left, self.fixed_right):
            if not 0 <= v <= LAMBDA:
                raise ValueError(f"fixed threshold {v} outside [0, 255]")
        if not 0.0 < self.percentile_q < 1.0:
            raise ValueError(f"percentile_q must lie in (0, 1), got {self.percentile_q}")


def gradient3x3(img: GrayImage) -> GrayImage:
    """Max minus min over each 3x3 window; windows are clipped at the border."""
    if img.width < 3 or img.height < 3:
        raise ValueError(f"gradient needs at least 3x3 pixels, got {img.width}x{img.height}")
    # edge replication leaves a clipped window's max and min unchanged
    p = np.pad(img.values, 1, mode="edge")
    h, w = img.shape
    hi = p[1:h + 1, 1:w + 1].copy()
    lo = hi.copy()
    for dy in range(3):
        for dx in range(3):
            win = p[dy:dy + h, dx:dx + w]
            np.maximum(hi, win, out=hi)
            np.minimum(lo, win, out=lo)
    return GrayImage(hi - lo)


def nearest_rank(values: np.ndarray, q: float) -> int | None:
    """Nearest-rank q-quantile of ``values``; None for an empty array."""
    if values.size == 0:
        return None
    v = np.sort(values, kind="stable")
    rank = max(1, math.ceil(q * v.size))
    return int(v[rank - 1])


def half_thresholds(grad: GrayImage, policy: ThresholdPolicy) -> tuple[int | None, int | None]:
    if policy.mode is ThresholdMode.FIXED:
        return policy.fixed_left, policy.fixed_right
    mid = grad.width // 2
    out = []
    for half in (grad.values[:, :mid], grad.values[:, mid:]):
        out.append(nearest_rank(half[half > 0], policy.percentile_q))
    return out[0], out[1]


def dual_threshold(grad: GrayImage, policy: ThresholdPolicy = ThresholdPolicy()) -> BinaryImage:
    """Keep pixels strictly above their half's threshold (left: columns < W/2)."""
    left_t, right_t = half_thresholds(grad, policy)
    mid = grad.width // 2
    out = np.zeros(grad.shape, dtype=bool)
    g = grad.values
    if left_t is not None:
        out[:, :mid] = g[:, :mid] > left_t
    if right_t is not None:
        out[:, mid:] = g[:, mid:] > right_t
    return BinaryImage(out)


def gradient_evidence(img: GrayImage, policy: ThresholdPolicy = ThresholdPolicy()) -> BinaryImage:
    return dual_threshold(gradient3x3(img), policy)
