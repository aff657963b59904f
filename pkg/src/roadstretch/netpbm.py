"""Minimal netpbm codecs: PGM (P2/P5), PBM (P1/P4) and PPM (P6).

Only 8-bit grey data is accepted; a maxval above 255 is rejected rather than
rescaled.  PBM bit 1 is foreground (road).
"""

from __future__ import annotations

import numpy as np

from .imgcore import LAMBDA, BinaryImage, GrayImage


class NetpbmError(ValueError):
    """Base class for netpbm parse failures."""


class MalformedHeaderError(NetpbmError):
    pass


class UnsupportedMaxvalError(NetpbmError):
    pass


class TruncatedDataError(NetpbmError):
    pass


_WS = b" \t\r\n\v\f"


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def skip_ws_and_comments(self):
        d = self.data
        while self.pos < len(d):
            c = d[self.pos:self.pos + 1]
            if c in (b" ", b"\t", b"\r", b"\n", b"\v", b"\f"):
                self.pos += 1
            elif c == b"#":
                while self.pos < len(d) and d[self.pos:self.pos + 1] not in (b"\n", b"\r"):
                    self.pos += 1
            else:
                break

    def token(self) -> bytes:
        self.skip_ws_and_comments()
        start = self.pos
        d = self.data
        while self.pos < len(d) and d[self.pos] not in _WS and d[self.pos:self.pos + 1] != b"#":
            self.pos += 1
        if start == self.pos:
            raise MalformedHeaderError("unexpected end of header")
        return d[start:self.pos]

    def int_token(self, what: str) -> int:
        tok = self.token()
        try:
            val = int(tok)
        except ValueError:
            raise MalformedHeaderError(f"bad {what}: {tok!r}") from None
        if val < 0:
            raise MalformedHeaderError(f"negative {what}: {val}")
        return val

    def single_ws(self):
        # exactly one whitespace byte separates the header from binary payload
        if self.pos >= len(self.data) or self.data[self.pos] not in _WS:
            raise MalformedHeaderError("missing whitespace after header")
        self.pos += 1


def _read_header(r: _Reader, with_maxval: bool):
    width = r.int_token("width")
    height = r.int_token("height")
    if width < 1 or height < 1:
        raise MalformedHeaderError(f"bad dimensions {width}x{height}")
    maxval = None
    if with_maxval:
        maxval = r.int_token("maxval")
        if maxval < 1:
            raise MalformedHeaderError(f"bad maxval {maxval}")
        if maxval > LAMBDA:
            raise UnsupportedMaxvalError(f"unsupported maxval {maxval}")
    return width, height, maxval


def _read_file(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def parse_gray(data: bytes) -> GrayImage:
    r = _Reader(data)
    magic = data[:2]
    r.pos = 2
    if magic not in (b"P5", b"P2"):
        raise MalformedHeaderError(f"not a PGM file (magic {magic!r})")
    width, height, maxval = _read_header(r, with_maxval=True)
    n = width * height
    if magic == b"P5":
        r.single_ws()
        payload = data[r.pos:r.pos + n]
        if len(payload) < n:
            raise TruncatedDataError(f"expected {n} bytes, found {len(payload)}")
        vals = np.frombuffer(payload, dtype=np.uint8)
    else:
        vals = np.empty(n, dtype=np.int64)
        for i in range(n):
            try:
                vals[i] = r.int_token("sample")
            except MalformedHeaderError as exc:
                if r.pos >= len(data):
                    raise TruncatedDataError(f"expected {n} samples, found {i}") from None
                raise NetpbmError(str(exc)) from None
    if vals.max(initial=0) > maxval:
        raise NetpbmError("sample exceeds maxval")
    return GrayImage(vals.reshape(height, width))


def load_gray(path) -> GrayImage:
    """Read a P5 or P2 PGM file with maxval <= 255."""
    return parse_gray(_read_file(path))


def encode_gray(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n{LAMBDA}\n".encode("ascii")
    return header + img.values.tobytes()


def save_gray(img: GrayImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_gray(img))


def parse_binary(data: bytes) -> BinaryImage:
    r = _Reader(data)
    magic = data[:2]
    r.pos = 2
    if magic not in (b"P4", b"P1"):
        raise MalformedHeaderError(f"not a PBM file (magic {magic!r})")
    width, height, _ = _read_header(r, with_maxval=False)
    if magic == b"P4":
        r.single_ws()
        row_bytes = (width + 7) // 8
        n = row_bytes * height
        payload = data[r.pos:r.pos + n]
        if len(payload) < n:
            raise TruncatedDataError(f"expected {n} bytes, found {len(payload)}")
        packed = np.frombuffer(payload, dtype=np.uint8).reshape(height, row_bytes)
        bits = np.unpackbits(packed, axis=1)[:, :width]
        return BinaryImage(bits.astype(bool))
    # P1: digits may run together, whitespace and comments are ignored
    n = width * height
    bits = []
    d = data
    pos = r.pos
    while len(bits) < n and pos < len(d):
        c = d[pos:pos + 1]
        if c == b"#":
            while pos < len(d) and d[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        if c in (b"0", b"1"):
            bits.append(c == b"1")
        elif c not in (b" ", b"\t", b"\r", b"\n", b"\v", b"\f"):
            raise NetpbmError(f"bad PBM sample {c!r}")
        pos += 1
    if len(bits) < n:
        raise TruncatedDataError(f"expected {n} bits, found {len(bits)}")
    return BinaryImage(np.array(bits, dtype=bool).reshape(height, width))


def load_binary(path) -> BinaryImage:
    """Read a P1 or P4 PBM file; bit 1 is foreground."""
    return parse_binary(_read_file(path))


def encode_binary(img: BinaryImage) -> bytes:
    header = f"P4\n{img.width} {img.height}\n".encode("ascii")
    return header + np.packbits(img.mask, axis=1).tobytes()


def save_binary(img: BinaryImage, path) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_binary(img))


def encode_color(rgb: np.ndarray) -> bytes:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ValueError(f"expected an (H, W, 3) array, got {rgb.shape}")
    h, w, _ = rgb.shape
    header = f"P6\n{w} {h}\n{LAMBDA}\n".encode("ascii")
    return header + np.ascontiguousarray(rgb, dtype=np.uint8).tobytes()


def save_color(rgb: np.ndarray, path) -> None:
    """Write an (H, W, 3) uint8 array as a P6 PPM file."""
    with open(path, "wb") as fh:
        fh.write(encode_color(rgb))


def parse_color(data: bytes) -> np.ndarray:
    r = _Reader(data)
    if data[:2] != b"P6":
        raise MalformedHeaderError(f"not a P6 file (magic {data[:2]!r})")
    r.pos = 2
    width, height, _ = _read_header(r, with_maxval=True)
    r.single_ws()
    n = width * height * 3
    payload = data[r.pos:r.pos + n]
    if len(payload) < n:
        raise TruncatedDataError(f"expected {n} bytes, found {len(payload)}")
    return np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3).copy()


def load_color(path) -> np.ndarray:
    return parse_color(_read_file(path))

