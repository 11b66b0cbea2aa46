"""Binary (P5) 8-bit PGM reading and writing."""

import numpy as np

from .exceptions import ParseError, UnsupportedFormatError, ValidationError

_WHITESPACE = b" \t\n\r\v\f"


def _header_tokens(data, count):
    """Read ``count`` header tokens, skipping ``#`` comments.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the last one.
    """
    tokens, pos, n = [], 0, len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        if pos >= n:
            raise ParseError("truncated header")
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def decode_pgm(data):
    if data[:2] in (b"P2", b"P1", b"P3", b"P4", b"P6"):
        raise UnsupportedFormatError(f"PGM variant {data[:2].decode()} is not supported (need P5)")
    if data[:2] != b"P5":
        raise ParseError("not a PGM file (missing P5 magic)")
    tokens, pos = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ParseError(f"bad header fields {tokens[1:]!r}") from None
    if width < 1 or height < 1:
        raise ParseError(f"bad dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormatError(f"maxval {maxval} is not supported (need 255)")
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise ParseError("missing whitespace after maxval")
    payload = data[pos + 1:]
    need = width * height
    if len(payload) < need:
        raise ParseError(f"truncated payload: expected {need} bytes, got {len(payload)}")
    pixels = np.frombuffer(payload[:need], dtype=np.uint8).reshape(height, width)
    return pixels.astype(np.float64)


def read_pgm(path):
    """Read an 8-bit P5 PGM as a float64 array of shape ``(height, width)``."""
    with open(path, "rb") as fh:
        return decode_pgm(fh.read())


def quantize(img):
    """Round to nearest with ties away from zero; pixels must land in 0..255."""
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("image contains non-finite pixels")
    q = np.sign(arr) * np.floor(np.abs(arr) + 0.5)
    if q.min() < 0 or q.max() > 255:
        raise ValidationError(
            f"pixels outside [0, 255] after rounding: [{q.min()}, {q.max()}]; clamp first")
    return q.astype(np.uint8)


def encode_pgm(img):
    q = quantize(img)
    h, w = q.shape
    return f"P5\n{w} {h}\n255\n".encode("ascii") + q.tobytes()


def write_pgm(img, path, rounding="nearest"):
    if rounding != "nearest":
        raise ValidationError(f"unsupported rounding {rounding!r}")
    with open(path, "wb") as fh:
        fh.write(encode_pgm(img))
