import numpy as np
import pytest
from hypothesis import given
from scipy import ndimage

from roadstretch import morph
from roadstretch.imgcore import BOTTOM, BinaryImage, PartialGrayImage
from roadstretch.morph import N, Q

import oracles
from conftest import masks

CROSS = ndimage.generate_binary_structure(2, 1)


def single(w, h, x, y):
    return BinaryImage.from_positions(w, h, [(x, y)])


def test_elements_exact():
    assert N == {(0, 1), (0, -1), (0, 0), (1, 0), (-1, 0)}
    assert Q == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_dilate_cross():
    assert morph.dilate(single(5, 5, 2, 2), N).positions() == {(2, 2), (1, 2), (3, 2), (2, 1), (2, 3)}


def test_dilate_empty():
    assert morph.dilate(BinaryImage.empty(4, 4), N).count() == 0


def test_dilate_clips_at_border():
    assert morph.dilate(single(3, 3, 0, 0), N).positions() == {(0, 0), (1, 0), (0, 1)}


def test_erode_single_pixel_empties():
    assert morph.erode(single(5, 5, 2, 2), N).count() == 0


def test_erode_full_raster_loses_border():
    out = morph.erode(BinaryImage.full(6, 5), N)
    exp = np.zeros((5, 6), bool)
    exp[1:-1, 1:-1] = True
    assert np.array_equal(out.mask, exp)


@given(masks())
def test_dilate_matches_scipy_and_sets(m):
    s = BinaryImage(m)
    out = morph.dilate(s, N)
    assert np.array_equal(out.mask, ndimage.binary_dilation(m, CROSS))
    h, w = m.shape
    assert out.positions() == oracles.dilate_set(s.positions(), N, w, h)
    assert s.issubset(out)


@given(masks())
def test_erode_matches_scipy_and_sets(m):
    s = BinaryImage(m)
    out = morph.erode(s, N)
    # scipy's border_value=0 is the same "off-raster is background" policy
    assert np.array_equal(out.mask, ndimage.binary_erosion(m, CROSS, border_value=0))
    h, w = m.shape
    assert out.positions() == oracles.erode_set(s.positions(), N, w, h)
    assert out.issubset(s)


@given(masks(min_side=3))
def test_erode_dilate_duality_on_interior(m):
    s = BinaryImage(m)
    lhs = morph.erode(s, N).mask
    rhs = morph.complement(morph.dilate(morph.complement(s), N)).mask
    assert np.array_equal(lhs[1:-1, 1:-1], rhs[1:-1, 1:-1])


@given(masks())
def test_complement_laws(m):
    s = BinaryImage(m)
    c = morph.complement(s)
    assert morph.complement(c) == s
    assert s.count() + c.count() == s.width * s.height


def test_complement_empty_is_full():
    assert morph.complement(BinaryImage.empty(3, 2)) == BinaryImage.full(3, 2)


def test_external_edge_single():
    assert morph.external_edge(single(5, 5, 2, 2)).positions() == {(1, 2), (3, 2), (2, 1), (2, 3)}
    assert morph.external_edge(BinaryImage.full(4, 4)).count() == 0


def test_internal_edge_single_and_empty():
    assert morph.internal_edge(single(5, 5, 2, 2)).positions() == {(2, 2)}
    assert morph.internal_edge(BinaryImage.empty(5, 5)).count() == 0


@given(masks())
def test_edge_properties(m):
    s = BinaryImage(m)
    pts = s.positions()
    be, bi = morph.external_edge(s), morph.internal_edge(s)
    assert (be & s).count() == 0
    assert bi.issubset(s)
    for (x, y) in be.positions():
        assert any((x + dx, y + dy) in pts for dx, dy in Q)


@given(masks(min_side=3))
def test_internal_edge_duality_on_interior(m):
    s = BinaryImage(m)
    a = morph.internal_edge(s).mask
    b = morph.external_edge(morph.complement(s)).mask
    assert np.array_equal(a[1:-1, 1:-1], b[1:-1, 1:-1])


@given(masks())
def test_edges_separate_set_from_complement(m):
    # every 4-adjacent (inside, outside) pair has its outside pixel in B_e and its inside pixel in B_i
    s = BinaryImage(m)
    be, bi = morph.external_edge(s).mask, morph.internal_edge(s).mask
    h, w = m.shape
    for y in range(h):
        for x in range(w - 1):
            if m[y, x] != m[y, x + 1]:
                a, b = ((x, y), (x + 1, y)) if m[y, x] else ((x + 1, y), (x, y))
                assert bi[a[1], a[0]] and be[b[1], b[0]]


def test_mask_empty_and_identity(rng):
    b = PartialGrayImage(rng.integers(0, 256, (4, 5)))
    assert not morph.mask(BinaryImage.empty(5, 4), b).defined.any()
    assert morph.mask(BinaryImage.full(5, 4), b) == b
    with pytest.raises(ValueError):
        morph.mask(BinaryImage.empty(4, 4), b)


@given(masks(w=6, h=5), masks(w=6, h=5))
def test_mask_defined_set(a, d):
    b = PartialGrayImage(np.arange(30).reshape(5, 6), d)
    out = morph.mask(BinaryImage(a), b)
    assert np.array_equal(out.defined, a & d)
    assert np.array_equal(out.values[out.defined], b.values[out.defined])


def test_value_at():
    p = PartialGrayImage(np.array([[4, 9]]), np.array([[True, False]]))
    assert morph.value_at(p, (0, 0)) == 4
    assert morph.value_at(p, (1, 0)) is BOTTOM
    assert morph.value_at(p, (5, 0)) is BOTTOM
    t = PartialGrayImage.constant(3, 3, 0)
    assert all(morph.value_at(t, (x, y)) is not BOTTOM for x in range(3) for y in range(3))


def brute_gray(k, e, op):
    h, w = k.shape
    out = np.full((h, w), -1, dtype=np.int16)
    for y in range(h):
        for x in range(w):
            vals = []
            for dx, dy in e:
                v = morph.value_at(k, (x + dx, y + dy))
                vals.append(-1 if v is BOTTOM else v)
            if op == "min":
                out[y, x] = min(vals)
            else:
                out[y, x] = max(vals)
    return out


def test_erode_gray_constant_interior():
    out = morph.erode_gray(PartialGrayImage.constant(5, 4, 77), Q)
    assert (out.codes()[1:-1, 1:-1] == 77).all()
    assert (out.codes()[0] == -1).all()


def test_erode_gray_single_defined_pixel_all_bottom():
    d = np.zeros((4, 4), bool)
    d[1, 1] = True
    out = morph.erode_gray(PartialGrayImage(np.full((4, 4), 9), d), Q)
    assert not out.defined.any()


def test_dilate_gray_single_defined_pixel():
    d = np.zeros((4, 4), bool)
    d[1, 1] = True
    out = morph.dilate_gray(PartialGrayImage(np.full((4, 4), 9), d), Q)
    assert out.support().positions() == {(0, 1), (2, 1), (1, 0), (1, 2)}


@given(masks(max_side=8, density=0.7))
def test_gray_morphology_brute_force(d):
    h, w = d.shape
    k = PartialGrayImage(np.random.default_rng(d.sum()).integers(0, 256, (h, w)), d)
    assert np.array_equal(morph.erode_gray(k, Q).codes(), brute_gray(k, Q, "min"))
    assert np.array_equal(morph.dilate_gray(k, Q).codes(), brute_gray(k, Q, "max"))


def test_less_mask():
    a = PartialGrayImage(np.array([[1, 5, 0]]), np.array([[True, True, False]]))
    b = PartialGrayImage(np.array([[2, 5, 0]]), np.array([[True, True, False]]))
    assert morph.less_mask(a, b).positions() == {(0, 0)}
    assert morph.less_mask(a, a).count() == 0
    none = PartialGrayImage(np.zeros((2, 2)), np.zeros((2, 2), bool))
    assert morph.less_mask(none, PartialGrayImage.constant(2, 2, 0)).count() == 4


@given(masks(max_side=8), masks(max_side=8))
def test_less_mask_oracle(da, db):
    if da.shape != db.shape:
        return
    h, w = da.shape
    r = np.random.default_rng(int(da.sum() * 7 + db.sum()))
    a = PartialGrayImage(r.integers(0, 4, (h, w)), da)
    b = PartialGrayImage(r.integers(0, 4, (h, w)), db)
    out = morph.less_mask(a, b)
    for y in range(h):
        for x in range(w):
            va, vb = morph.value_at(a, (x, y)), morph.value_at(b, (x, y))
            assert ((x, y) in out) == (va < vb)
