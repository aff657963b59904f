"""City-block potential image computed by iterated dilation.

The potential at ``p`` is ``max(0, 255 - d(p, T))`` where ``d`` is the
city-block distance to the nearest evidence pixel.  It is grown one ring per
round: the evidence set is dilated by the cross ``N`` and every pixel that
turns on in round ``k`` receives ``255 - k``.  Growth can stop early once a
region of interest is covered, so a :class:`PotentialImage` may be partial.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imgcore import LAMBDA, BinaryImage, PartialGrayImage
from .morph import cross_dilate


class EmptyEvidenceError(ValueError):
    """The evidence image has no foreground; the potential is undefined."""


class UnassignedPotentialError(RuntimeError):
    """A rule tried to read a potential value that was never computed."""


@dataclass(frozen=True, eq=False)
class PotentialImage:
    value: np.ndarray
    assigned: np.ndarray
    rounds: int = 0

    def __post_init__(self):
        v = np.array(self.value, dtype=np.int16, copy=True)
        a = np.array(self.assigned, dtype=bool, copy=True)
        if v.shape != a.shape or v.ndim != 2:
            raise ValueError("value and assigned must be 2-D arrays of one shape")
        v[~a] = 0
        v.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "assigned", a)

    @property
    def width(self) -> int:
        return self.value.shape[1]

    @property
    def height(self) -> int:
        return self.value.shape[0]

    @property
    def shape(self):
        return self.value.shape

    def at(self, x: int, y: int) -> int:
        if not self.assigned[y, x]:
            raise UnassignedPotentialError(f"potential at {(x, y)} was never assigned")
        return int(self.value[y, x])

    def as_surface(self) -> PartialGrayImage:
        """The potential as a grey surface defined on the assigned positions."""
        return PartialGrayImage(self.value, self.assigned)

    def __eq__(self, other):
        if not isinstance(other, PotentialImage):
            return NotImplemented
        return np.array_equal(self.assigned, other.assigned) and np.array_equal(self.value, other.value)

    __hash__ = None


class GrowingPotential:
    """Resumable iterated-dilation state for one evidence image.

    ``extend`` keeps dilating until a region is covered, so repeated requests
    for a moving boundary never redo finished rounds.
    """

    def __init__(self, evidence: np.ndarray):
        evidence = np.asarray(evidence, dtype=bool)
        if not evidence.any():
            raise EmptyEvidenceError("no edge evidence")
        self.value = np.where(evidence, LAMBDA, 0).astype(np.int16)
        self.assigned = evidence.copy()
        self._grown = evidence.copy()
        self.rounds = 0
        self.exhausted = bool(evidence.all())

    def covers(self, region: np.ndarray) -> bool:
        return not np.any(region & ~self.assigned)

    def extend(self, roi: np.ndarray | None = None, max_rounds: int | None = None) -> bool:
        """Grow until ``roi`` (None = everything) is covered, the dilation stops
        changing, or ``max_rounds`` total rounds have run.  Returns coverage."""
        while True:
            if roi is None:
                if self.exhausted:
                    return True
            elif self.covers(roi):
                return True
            if self.exhausted or (max_rounds is not None and self.rounds >= max_rounds):
                return roi is None and self.exhausted
            nxt = cross_dilate(self._grown)
            fresh = nxt & ~self._grown
            if not fresh.any():
                self.exhausted = True
                continue
            self.rounds += 1
            self.value[fresh] = max(LAMBDA - self.rounds, 0)
            self.assigned |= fresh
            self._grown = nxt
            if self.assigned.all():
                self.exhausted = True

    def snapshot(self) -> PotentialImage:
        return PotentialImage(self.value, self.assigned, self.rounds)


def distance_transform(evidence: BinaryImage, roi: BinaryImage | None = None,
                       max_iters: int | None = None) -> PotentialImage:
    """Iterated-dilation potential of ``evidence``.

    Parameters
    ----------
    evidence : BinaryImage
        Thresholded edge / marking image; must be non-empty.
    roi : BinaryImage or None
        Stop as soon as every pixel of ``roi`` is assigned.  None means the
        whole raster.
    max_iters : int or None
        Cap on dilation rounds.  None runs until the roi is covered or the
        dilation reaches a fixed point.

    Returns
    -------
    PotentialImage
        Values ``max(0, 255 - d)``; pixels never reached have ``assigned`` false.
    """
    if roi is not None and roi.shape != evidence.shape:
        raise ValueError(f"roi shape {roi.shape} != evidence shape {evidence.shape}")
    grow = GrowingPotential(evidence.mask)
    grow.extend(None if roi is None else roi.mask, max_iters)
    return grow.snapshot()


def brute_force_dt(evidence: BinaryImage) -> PotentialImage:
    """Potential by exhaustive minimum over all evidence pixels (test oracle)."""
    ys, xs = np.nonzero(evidence.mask)
    if len(xs) == 0:
        raise EmptyEvidenceError("no edge evidence")
    h, w = evidence.shape
    gy, gx = np.mgrid[0:h, 0:w]
    best = np.full((h, w), np.iinfo(np.int32).max, dtype=np.int64)
    # chunk the evidence list to bound memory on large rasters
    for start in range(0, len(xs), 256):
        tx = xs[start:start + 256, None, None]
        ty = ys[start:start + 256, None, None]
        d = np.abs(gx[None] - tx) + np.abs(gy[None] - ty)
        np.minimum(best, d.min(axis=0), out=best)
    value = np.maximum(LAMBDA - best, 0)
    return PotentialImage(value, np.ones((h, w), dtype=bool), 0)
