"""Netpbm PGM (P2/P5) reading and writing.

Readers are tolerant of comments and arbitrary header whitespace; writers
emit a canonical header (``P5\\n<w> <h>\\n<maxval>\\n``).  Binary samples
are one byte up to maxval 255 and big-endian two bytes above, per the
Netpbm convention; maxval is capped at 65535.
"""

from __future__ import annotations

import numpy as np

from .params import ConfigError, padded_bits

MAX_MAXVAL = 65535


class PgmError(ConfigError):
    """Malformed PGM data."""


def bits_for_maxval(maxval: int) -> int:
    """Even sample width implied by a PGM maxval (at least 2 bits)."""
    return max(2, padded_bits(maxval.bit_length()))


def _header_tokens(data: bytes, count: int):
    """First ``count`` whitespace-separated header tokens, skipping comments.

    Returns the tokens and the offset just past the single whitespace byte
    terminating the last one (where P5 raster data begins).
    """
    tokens = []
    i = 0
    while len(tokens) < count:
        while i < len(data) and data[i:i + 1].isspace():
            i += 1
        if i < len(data) and data[i] == ord("#"):
            while i < len(data) and data[i] not in b"\r\n":
                i += 1
            continue
        start = i
        while i < len(data) and not data[i:i + 1].isspace():
            i += 1
        if start == i:
            raise PgmError("truncated PGM header")
        tokens.append(data[start:i])
        if len(tokens) == count:
            if i >= len(data):
                raise PgmError("truncated PGM header")
            i += 1  # exactly one whitespace byte ends the header
    return tokens, i


def read_pgm_bytes(data: bytes) -> tuple[np.ndarray, int]:
    """Decode PGM bytes into ``(image, maxval)``."""
    (magic,), _ = _header_tokens(data, 1)
    if magic not in (b"P2", b"P5"):
        raise PgmError(f"not a PGM file (magic {magic!r})")
    tokens, offset = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as exc:
        raise PgmError("non-numeric PGM header field") from exc
    if width < 1 or height < 1:
        raise PgmError("PGM dimensions must be positive")
    if not 1 <= maxval <= MAX_MAXVAL:
        raise PgmError(f"PGM maxval must be in [1, {MAX_MAXVAL}]")
    count = width * height
    if magic == b"P2":
        fields = data[offset:].split()
        if len(fields) != count:
            raise PgmError(
                f"expected {count} ASCII samples, found {len(fields)}"
            )
        try:
            flat = np.array([int(f) for f in fields], dtype=np.int64)
        except ValueError as exc:
            raise PgmError("non-integer ASCII sample") from exc
    else:
        raster = data[offset:]
        if maxval > 255:
            if len(raster) < 2 * count:
                raise PgmError("truncated binary raster")
            flat = np.frombuffer(raster[:2 * count], dtype=">u2").astype(np.int64)
        else:
            if len(raster) < count:
                raise PgmError("truncated binary raster")
            flat = np.frombuffer(raster[:count], dtype=np.uint8).astype(np.int64)
    if flat.max(initial=0) > maxval:
        raise PgmError("sample exceeds the declared maxval")
    return flat.reshape(height, width), maxval


def read_pgm(path) -> tuple[np.ndarray, int]:
    with open(path, "rb") as fh:
        return read_pgm_bytes(fh.read())


def write_pgm_bytes(image, maxval: int, binary: bool = True) -> bytes:
    image = np.asarray(image)
    if image.ndim != 2 or image.size == 0:
        raise PgmError("images must be non-empty 2-D arrays")
    if not 1 <= maxval <= MAX_MAXVAL:
        raise PgmError(f"PGM maxval must be in [1, {MAX_MAXVAL}]")
    if image.min() < 0 or image.max() > maxval:
        raise PgmError("pixels outside [0, maxval]")
    height, width = image.shape
    magic = "P5" if binary else "P2"
    header = f"{magic}\n{width} {height}\n{maxval}\n".encode("ascii")
    if not binary:
        body = "\n".join(" ".join(str(v) for v in row) for row in image)
        return header + body.encode("ascii") + b"\n"
    if maxval > 255:
        return header + image.astype(">u2").tobytes()
    return header + image.astype(np.uint8).tobytes()


def write_pgm(path, image, maxval: int, binary: bool = True) -> None:
    with open(path, "wb") as fh:
        fh.write(write_pgm_bytes(image, maxval, binary))
