"""Minimal PGM (portable greymap) reader and writer.

Reads ASCII (P2) and binary (P5) greymaps with maxval up to 65535, writes
binary P5.  Round-trips of integer-valued images are bit-exact.
"""

from __future__ import annotations

import numpy as np

from .grid import Image

_WHITESPACE = b" \t\r\n\v\f"


class PgmError(ValueError):
    """Malformed or unsupported PGM input."""


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c in _WHITESPACE:
            pos += 1
        elif c == b"#":
            while pos < n and data[pos : pos + 1] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE + b"#":
        pos += 1
    if start == pos:
        raise PgmError("truncated PGM header")
    return data[start:pos], pos


def _header_int(data: bytes, pos: int, name: str) -> tuple[int, int]:
    tok, pos = _next_token(data, pos)
    try:
        value = int(tok)
    except ValueError:
        raise PgmError(f"malformed PGM header: bad {name} {tok!r}") from None
    return value, pos


def load_pgm(path) -> Image:
    """Read a P2 or P5 greymap into a double-precision image with h = 1."""
    with open(path, "rb") as fh:
        data = fh.read()
    magic, pos = _next_token(data, 0)
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"unsupported PGM magic {magic.decode('ascii', 'replace')!r} (want P2 or P5)")
    width, pos = _header_int(data, pos, "width")
    height, pos = _header_int(data, pos, "height")
    maxval, pos = _header_int(data, pos, "maxval")
    if width < 1 or height < 1:
        raise PgmError(f"malformed PGM header: bad dimensions {width}x{height}")
    if not 1 <= maxval <= 65535:
        raise PgmError(f"malformed PGM header: maxval {maxval} out of [1, 65535]")
    count = width * height
    if magic == b"P5":
        pos += 1  # single whitespace byte after maxval
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        payload = data[pos : pos + count * dtype.itemsize]
        if len(payload) < count * dtype.itemsize:
            raise PgmError("truncated PGM payload")
        values = np.frombuffer(payload, dtype=dtype).astype(np.float64)
    else:
        values = np.empty(count)
        for k in range(count):
            try:
                v, pos = _header_int(data, pos, "sample")
            except PgmError:
                raise PgmError("truncated PGM payload") from None
            values[k] = v
    if values.max() > maxval:
        raise PgmError("PGM sample exceeds maxval")
    return Image(values.reshape(height, width), h=1.0)


def save_pgm(img: Image, path, maxval: int = 255) -> None:
    """Write a binary P5 greymap; values clamped to [0, maxval], rounded half-to-even."""
    if not 1 <= maxval <= 65535:
        raise ValueError(f"maxval {maxval} out of [1, 65535]")
    vals = np.clip(np.rint(img.values), 0, maxval)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    header = f"P5\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(vals.astype(dtype).tobytes())
