"""Driven binary stretching: reshape a binary template along a DT potential.

One iteration applies two local rules, in order, on the updated set:

* external rule: a pixel just outside the set joins it when its potential is
  higher than the lowest potential among its 4-neighbours inside the set (with
  flat handling, also when equal, unless the pixel is itself evidence);
* internal rule: a pixel on the inner ring leaves the set when its potential
  is higher than the highest (``APPENDIX_MAX``) or lowest (``PROSE_MIN``)
  potential among its 4-neighbours outside the set.

Neighbours are in-raster only, so the frame edge neither attracts nor repels:
a set pixel whose only "outside" neighbours are off-raster is left alone.

Two interchangeable engines are provided.  :func:`dbs_iterate` evaluates the
rules directly per pixel (vectorised); :func:`dbs_iterate_morphological`
builds the same steps out of masking, grey erosion/dilation and the
``less_mask`` comparison from :mod:`morph`.  They share the iteration driver
and the lazily-extended potential, so traces are comparable field by field.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import morph
from .dt import GrowingPotential, PotentialImage, UnassignedPotentialError
from .imgcore import LAMBDA, BinaryImage, PartialGrayImage
from .morph import Q, cross_dilate, dilate_mask, external_edge_mask, internal_edge_mask, neighbor

_BIG = np.iinfo(np.int16).max


class InternalRule(enum.Enum):
    APPENDIX_MAX = "max"
    PROSE_MIN = "min"


class StopReason(enum.Enum):
    FIXED_POINT = "fixed_point"
    CYCLE = "cycle"
    MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class DbsConfig:
    max_iterations: int = 5
    flat_handling: bool = True
    internal_rule_variant: InternalRule = InternalRule.APPENDIX_MAX
    cycle_detection: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class DbsTrace:
    iterations_run: int = 0
    stop_reason: StopReason = StopReason.MAX_ITERS
    inserted: list[int] = field(default_factory=list)
    removed: list[int] = field(default_factory=list)
    dt_rounds: int = 0


# -- per-pixel rules on raw arrays ----------------------------------------------

def rule_domain(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """External edge and the inner ring that has an in-raster outside neighbour."""
    be = external_edge_mask(s)
    bi = s & dilate_mask(~s, Q)
    return be, bi


def _require(assigned: np.ndarray, region: np.ndarray):
    missing = region & ~assigned
    if missing.any():
        ys, xs = np.nonzero(missing)
        raise UnassignedPotentialError(
            f"rule reads {len(xs)} unassigned potential value(s), first at {(int(xs[0]), int(ys[0]))}")


def _external_arrays(s, value, assigned, evidence, flat) -> np.ndarray:
    be, bi = rule_domain(s)
    _require(assigned, be | bi)
    lowest_inside = np.full(s.shape, _BIG, dtype=np.int16)
    for dx, dy in Q:
        inside = neighbor(s, dx, dy, False)
        v = neighbor(value, dx, dy, 0)
        np.copyto(lowest_inside, np.minimum(lowest_inside, v), where=inside)
    grow = value > lowest_inside
    if flat:
        grow |= (value == lowest_inside) & ~evidence
    return s | (be & grow)


def _internal_arrays(s, value, assigned, variant) -> np.ndarray:
    be, bi = rule_domain(s)
    _require(assigned, be | bi)
    use_max = variant is InternalRule.APPENDIX_MAX
    ref = np.full(s.shape, -1 if use_max else _BIG, dtype=np.int16)
    pick = np.maximum if use_max else np.minimum
    for dx, dy in Q:
        outside = ~neighbor(s, dx, dy, True)
        v = neighbor(value, dx, dy, 0)
        np.copyto(ref, pick(ref, v), where=outside)
    return s & ~(bi & (value > ref))


def _check_shapes(*imgs):
    shapes = {img.shape for img in imgs}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch: {sorted(shapes)}")


def external_rule_step(s: BinaryImage, dt: PotentialImage, evidence: BinaryImage,
                       flat: bool = True) -> BinaryImage:
    """Apply the external-edge rule once; returns ``s`` plus the inserted pixels."""
    _check_shapes(s, dt, evidence)
    return BinaryImage(_external_arrays(s.mask, dt.value, dt.assigned, evidence.mask, flat))


def internal_rule_step(s: BinaryImage, dt: PotentialImage,
                       variant: InternalRule = InternalRule.APPENDIX_MAX) -> BinaryImage:
    """Apply the internal-edge rule once; returns ``s`` minus the removed pixels."""
    _check_shapes(s, dt)
    return BinaryImage(_internal_arrays(s.mask, dt.value, dt.assigned, variant))


# -- the same rules as morphological compositions ---------------------------------

def external_rule_morphological(s: BinaryImage, dt: PotentialImage, evidence: BinaryImage,
                                flat: bool = True) -> BinaryImage:
    _check_shapes(s, dt, evidence)
    surface = dt.as_surface()
    be = morph.external_edge(s)
    _require(dt.assigned, be.mask | (s.mask & dilate_mask(~s.mask, Q)))
    lam = PartialGrayImage.constant(s.width, s.height, LAMBDA)
    # the constant-255 surface extends past the frame, hence border=LAMBDA
    k_e = morph.union_gray(morph.mask(s, surface), morph.mask(morph.complement(s), lam))
    m_e = morph.erode_gray(k_e, Q, border=LAMBDA)
    lower = morph.less_mask(m_e, surface)
    entering = lower & be
    if flat:
        equal = morph.complement(lower | morph.less_mask(surface, m_e))
        entering = entering | (equal & be & morph.complement(evidence))
    return s | entering


def internal_rule_morphological(s: BinaryImage, dt: PotentialImage,
                                variant: InternalRule = InternalRule.APPENDIX_MAX) -> BinaryImage:
    _check_shapes(s, dt)
    surface = dt.as_surface()
    outside = morph.complement(s)
    bi = morph.internal_edge(s) & morph.dilate(outside, Q)
    _require(dt.assigned, bi.mask | morph.external_edge(s).mask)
    k_i = morph.mask(outside, surface)
    if variant is InternalRule.APPENDIX_MAX:
        m_i = morph.dilate_gray(k_i, Q)
    else:
        lam = PartialGrayImage.constant(s.width, s.height, LAMBDA)
        m_i = morph.erode_gray(morph.union_gray(k_i, morph.mask(s, lam)), Q, border=LAMBDA)
    leaving = morph.less_mask(m_i, surface) & bi
    return s & morph.complement(leaving)


# -- iteration driver ------------------------------------------------------------

class _Potential:
    """Potential that grows on demand to cover whatever the rules will read."""

    def __init__(self, evidence: np.ndarray, max_rounds: int | None):
        self.grow = GrowingPotential(evidence)
        self.max_rounds = max_rounds

    def ensure(self, s: np.ndarray):
        be, bi = rule_domain(s)
        needed = be | bi
        if self.grow.covers(needed):
            return
        roi = cross_dilate(be | internal_edge_mask(s))
        self.grow.extend(roi, self.max_rounds)
        # the budget may stop short of the full roi; only the reads must be covered
        _require(self.grow.assigned, needed)


_Step = Callable[[np.ndarray, "_Potential", np.ndarray, DbsConfig], np.ndarray]


def _pixel_external(s, pot, ev, cfg):
    return _external_arrays(s, pot.grow.value, pot.grow.assigned, ev, cfg.flat_handling)


def _pixel_internal(s, pot, ev, cfg):
    return _internal_arrays(s, pot.grow.value, pot.grow.assigned, cfg.internal_rule_variant)


def _morph_external(s, pot, ev, cfg):
    out = external_rule_morphological(BinaryImage(s), pot.grow.snapshot(), BinaryImage(ev),
                                      cfg.flat_handling)
    return out.mask


def _morph_internal(s, pot, ev, cfg):
    out = internal_rule_morphological(BinaryImage(s), pot.grow.snapshot(), cfg.internal_rule_variant)
    return out.mask


def _drive(s0: BinaryImage, evidence: BinaryImage, cfg: DbsConfig, dt_max_iters,
           external: _Step, internal: _Step) -> tuple[BinaryImage, DbsTrace]:
    _check_shapes(s0, evidence)
    ev = evidence.mask
    pot = _Potential(ev, dt_max_iters)
    trace = DbsTrace()
    s = s0.mask
    # every state seen so far; a repeat means the run has entered a cycle
    seen = {np.packbits(s).tobytes()}
    for _ in range(cfg.max_iterations):
        pot.ensure(s)
        grown = external(s, pot, ev, cfg)
        pot.ensure(grown)
        shrunk = internal(grown, pot, ev, cfg)
        trace.iterations_run += 1
        trace.inserted.append(int(np.count_nonzero(grown & ~s)))
        trace.removed.append(int(np.count_nonzero(grown & ~shrunk)))
        if np.array_equal(shrunk, s):
            trace.stop_reason = StopReason.FIXED_POINT
            break
        key = np.packbits(shrunk).tobytes()
        if cfg.cycle_detection and key in seen:
            s = shrunk
            trace.stop_reason = StopReason.CYCLE
            break
        seen.add(key)
        s = shrunk
    else:
        trace.stop_reason = StopReason.MAX_ITERS
    trace.dt_rounds = pot.grow.rounds
    return BinaryImage(s), trace


def dbs_iterate(s0: BinaryImage, evidence: BinaryImage, cfg: DbsConfig = DbsConfig(),
                dt_max_iters: int | None = None) -> tuple[BinaryImage, DbsTrace]:
    """Stretch ``s0`` toward ``evidence`` until a fixed point, a revisited state or the budget.

    ``dt_max_iters`` caps the dilation rounds spent on the potential for this
    call; if the cap leaves a value the rules need unassigned,
    :class:`UnassignedPotentialError` is raised.  Empty evidence raises
    :class:`~roadstretch.dt.EmptyEvidenceError`.
    """
    return _drive(s0, evidence, cfg, dt_max_iters, _pixel_external, _pixel_internal)


def dbs_iterate_morphological(s0: BinaryImage, evidence: BinaryImage, cfg: DbsConfig = DbsConfig(),
                              dt_max_iters: int | None = None) -> tuple[BinaryImage, DbsTrace]:
    """Same contract as :func:`dbs_iterate`, built only from :mod:`morph` operators."""
    return _drive(s0, evidence, cfg, dt_max_iters, _morph_external, _morph_internal)
