"""2x2 resolution ladder: averaged grey reduction, OR-reduction and replication of masks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imgcore import BinaryImage, GrayImage


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class PyramidSchedule:
    full_size: int = 256
    coarse_size: int = 32
    led_size: int = 64

    def __post_init__(self):
        for name in ("full_size", "coarse_size", "led_size"):
            if not _is_pow2(getattr(self, name)):
                raise ValueError(f"{name} must be a power of two, got {getattr(self, name)}")
        if not self.coarse_size <= self.led_size <= self.full_size:
            raise ValueError("need coarse_size <= led_size <= full_size")

    def sizes_down(self) -> list[int]:
        """Level sizes from full resolution down to the coarse level."""
        out, n = [], self.full_size
        while n >= self.coarse_size:
            out.append(n)
            n //= 2
        return out

    def sizes_up(self, top: int) -> list[int]:
        """Level sizes from the coarse level up to ``top`` inclusive."""
        return [n for n in reversed(self.sizes_down()) if n <= top]


def _check_even(shape):
    h, w = shape
    if h % 2 or w % 2:
        raise ValueError(f"reduction needs even dimensions, got {w}x{h}")


def reduce_gray(img: GrayImage) -> GrayImage:
    """Halve both dimensions; each output pixel is the floored mean of its 2x2 block."""
    _check_even(img.shape)
    v = img.values.astype(np.uint16)
    s = v[0::2, 0::2] + v[1::2, 0::2] + v[0::2, 1::2] + v[1::2, 1::2]
    return GrayImage((s // 4).astype(np.uint8))


def reduce_binary(img: BinaryImage) -> BinaryImage:
    """Halve both dimensions; a block is foreground if any of its 4 pixels is."""
    _check_even(img.shape)
    m = img.mask
    return BinaryImage(m[0::2, 0::2] | m[1::2, 0::2] | m[0::2, 1::2] | m[1::2, 1::2])


def expand_binary(img: BinaryImage) -> BinaryImage:
    """Double both dimensions by 2x2 replication."""
    return BinaryImage(np.repeat(np.repeat(img.mask, 2, axis=0), 2, axis=1))


def reduce_binary_interior(img: BinaryImage) -> BinaryImage:
    """Halve both dimensions; a block is foreground only if all 4 pixels are."""
    _check_even(img.shape)
    m = img.mask
    return BinaryImage(m[0::2, 0::2] & m[1::2, 0::2] & m[0::2, 1::2] & m[1::2, 1::2])


def reduce_binary_to(img: BinaryImage, size: int, interior: bool = False) -> BinaryImage:
    step = reduce_binary_interior if interior else reduce_binary
    while img.width > size:
        img = step(img)
    return img


def gray_pyramid(img: GrayImage, coarse_size: int) -> dict[int, GrayImage]:
    """Map from level size to image, from ``img`` down to ``coarse_size``."""
    if img.width != img.height or not _is_pow2(img.width):
        raise ValueError(f"pyramid input must be square with power-of-two side, got {img.width}x{img.height}")
    levels = {img.width: img}
    while img.width > coarse_size:
        img = reduce_gray(img)
        levels[img.width] = img
    return levels
