import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from roadstretch.imgcore import BinaryImage, GrayImage

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def masks(draw, min_side=1, max_side=12, w=None, h=None, density=None):
    w = w or draw(st.integers(min_side, max_side))
    h = h or draw(st.integers(min_side, max_side))
    seed = draw(st.integers(0, 2**32 - 1))
    p = density if density is not None else draw(st.sampled_from([0.1, 0.3, 0.5, 0.8]))
    return np.random.default_rng(seed).random((h, w)) < p


@st.composite
def nonempty_masks(draw, **kw):
    m = draw(masks(**kw))
    if not m.any():
        m = m.copy()
        m[draw(st.integers(0, m.shape[0] - 1)), draw(st.integers(0, m.shape[1] - 1))] = True
    return m


@st.composite
def gray_arrays(draw, min_side=1, max_side=12, even=False):
    w = draw(st.integers(min_side, max_side))
    h = draw(st.integers(min_side, max_side))
    if even:
        w, h = 2 * max(1, w // 2), 2 * max(1, h // 2)
    seed = draw(st.integers(0, 2**32 - 1))
    return np.random.default_rng(seed).integers(0, 256, (h, w)).astype(np.uint8)


def random_mask(rng, h, w, p=0.3):
    return BinaryImage(rng.random((h, w)) < p)


def random_gray(rng, h, w):
    return GrayImage(rng.integers(0, 256, (h, w)).astype(np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
