import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import ndimage

from roadstretch.model import ModelKind, ModelSpec, SyntheticModel, generate_model, row_spans, select_model
from roadstretch.netpbm import encode_binary, parse_binary

import oracles


def one_component(mask):
    _, n = ndimage.label(mask, ndimage.generate_binary_structure(2, 1))
    return n == 1


def test_small_trapezoid():
    spec = ModelSpec(ModelKind.ROAD, 8, 8, 2, 4, 1, 6)
    m = generate_model(spec).image.mask
    assert np.nonzero(m[7])[0].tolist() == list(range(1, 7))
    assert not m[:2].any()
    widths = m.sum(axis=1)[2:]
    assert all(a <= b for a, b in zip(widths, widths[1:]))


def test_degenerate_sliver_still_connected():
    spec = ModelSpec(ModelKind.LANE, 16, 16, 1, 7, 7, 8)
    m = generate_model(spec).image.mask
    assert m[1:].any(axis=1).all()
    assert one_component(m)


def test_symmetric_spec_is_mirror_symmetric():
    spec = ModelSpec(ModelKind.LANE, 32, 32, 8, 15.5, 4, 27)
    m = generate_model(spec).image.mask
    assert np.array_equal(m, m[:, ::-1])


@pytest.mark.parametrize("kw", [dict(horizon_row=32), dict(bottom_left_col=20, bottom_right_col=10),
                                dict(vp_col=-1), dict(image_w=0)])
def test_invariant_violations(kw):
    with pytest.raises(ValueError):
        ModelSpec(**kw)


specs = st.builds(
    lambda w, h, hz, vp, a, b: ModelSpec(ModelKind.LANE, w, h, min(hz, h - 1), vp * (w - 1),
                                         a, a + b),
    st.integers(4, 40), st.integers(4, 40), st.integers(0, 30), st.floats(0, 1),
    st.floats(-10, 40), st.floats(0.5, 40))


@given(specs)
def test_generated_model_shape(spec):
    m = generate_model(spec).image.mask
    assert not m[:spec.horizon_row].any()
    for y in range(spec.horizon_row, spec.image_h):
        c = np.nonzero(m[y])[0]
        if c.size:
            assert c[-1] - c[0] + 1 == c.size
    if m.any():
        assert one_component(m)


@given(specs)
def test_rows_follow_linear_edges(spec):
    # the span on each row covers the pixel centres inside the interpolated interval
    spans = row_spans(spec)
    prev = None
    for y, (lo, hi) in spans.items():
        left, right = oracles.row_interval(spec.image_h, spec.horizon_row, spec.vp_col,
                                           spec.bottom_left_col, spec.bottom_right_col, y)
        inside = [c for c in range(int(np.floor(left)) - 1, int(np.ceil(right)) + 2)
                  if left - 0.5 <= c <= right + 0.5]
        if inside:
            assert lo <= inside[0] and hi >= inside[-1]
        if prev is not None:
            assert lo <= prev[1] and hi >= prev[0]
        prev = (lo, hi)


@given(specs)
def test_pbm_roundtrip(spec):
    img = generate_model(spec).image
    assert parse_binary(encode_binary(img)) == img


def test_scaled_and_shifted():
    spec = ModelSpec()
    big = spec.scaled(2)
    assert (big.image_w, big.image_h) == (64, 64)
    assert big.vp_col == pytest.approx(31.5)
    moved = spec.shifted(3)
    assert moved.bottom_left_col == 7 and moved.vp_col == 18.5
    assert spec.shifted(100).vp_col == 31


def test_select_model():
    road = generate_model(ModelSpec(ModelKind.ROAD))
    lane = generate_model(ModelSpec(ModelKind.LANE))
    assert select_model([road], "road") is road
    assert select_model([road, lane], "lane") is lane
    named = SyntheticModel(lane.image, name="two-lane")
    assert select_model([road, named], "two-lane") is named
    with pytest.raises(KeyError):
        select_model([road], "lane")
    with pytest.raises(ValueError):
        select_model([], "road")
