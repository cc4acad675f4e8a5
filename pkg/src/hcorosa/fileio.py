"""File formats: HCMK masks, HCKS k-space samples, HCRS raw images, PGM.

All multi-byte integers and floats in the HC* containers are little-endian;
complex sample values are stored as (re, im) f64 pairs in raster order of
the mask's set positions.  PGM covers binary P5 at 8 or 16 bits (16-bit
payloads big-endian per the format).
"""

import struct
from pathlib import Path

import numpy as np

from .fourier import ComplexSamples, SamplingMask

MASK_MAGIC = b"HCMK"
SAMPLES_MAGIC = b"HCKS"
IMAGE_MAGIC = b"HCRS"
FORMAT_VERSION = 1


def _read_exact(fh, n, what):
    buf = fh.read(n)
    if len(buf) != n:
        raise ValueError(f"truncated file while reading {what}")
    return buf


def _check_magic(fh, magic):
    got = _read_exact(fh, 4, "magic")
    if got != magic:
        raise ValueError(f"bad magic {got!r}, expected {magic!r}")
    (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported version {version}")


def write_mask(path, mask):
    with open(path, "wb") as fh:
        fh.write(MASK_MAGIC)
        fh.write(struct.pack("<III", FORMAT_VERSION, mask.rows, mask.cols))
        fh.write(mask.grid.astype(np.uint8).tobytes())


def read_mask(path):
    with open(path, "rb") as fh:
        _check_magic(fh, MASK_MAGIC)
        rows, cols = struct.unpack("<II", _read_exact(fh, 8, "dims"))
        grid = np.frombuffer(
            _read_exact(fh, rows * cols, "mask bytes"), dtype=np.uint8
        ).reshape(rows, cols)
    return SamplingMask(grid.copy())


def write_samples(path, m):
    with open(path, "wb") as fh:
        fh.write(SAMPLES_MAGIC)
        fh.write(struct.pack("<III", FORMAT_VERSION, m.rows, m.cols))
        fh.write(m.mask.grid.astype(np.uint8).tobytes())
        fh.write(struct.pack("<Q", m.values.size))
        fh.write(np.ascontiguousarray(m.values, dtype="<c16").tobytes())


def read_samples(path):
    with open(path, "rb") as fh:
        _check_magic(fh, SAMPLES_MAGIC)
        rows, cols = struct.unpack("<II", _read_exact(fh, 8, "dims"))
        grid = np.frombuffer(
            _read_exact(fh, rows * cols, "mask bytes"), dtype=np.uint8
        ).reshape(rows, cols)
        mask = SamplingMask(grid.copy())
        (count,) = struct.unpack("<Q", _read_exact(fh, 8, "count"))
        if count != mask.sample_count:
            raise ValueError(
                f"sample count {count} does not match mask ({mask.sample_count})"
            )
        values = np.frombuffer(
            _read_exact(fh, 16 * count, "sample values"), dtype="<c16"
        )
    return ComplexSamples(mask, values.copy())


def write_image(path, img):
    img = np.asarray(img, dtype=np.float64)
    with open(path, "wb") as fh:
        fh.write(IMAGE_MAGIC)
        fh.write(struct.pack("<III", FORMAT_VERSION, img.shape[0], img.shape[1]))
        fh.write(np.ascontiguousarray(img, dtype="<f8").tobytes())


def read_image(path):
    with open(path, "rb") as fh:
        _check_magic(fh, IMAGE_MAGIC)
        rows, cols = struct.unpack("<II", _read_exact(fh, 8, "dims"))
        data = np.frombuffer(
            _read_exact(fh, 8 * rows * cols, "pixel data"), dtype="<f8"
        )
    return data.reshape(rows, cols).copy()


def _pgm_tokens(fh):
    """Yield header tokens, skipping '#' comments."""
    while True:
        line = fh.readline()
        if not line:
            raise ValueError("truncated PGM header")
        line = line.split(b"#", 1)[0]
        for tok in line.split():
            yield tok


def read_pgm(path):
    """Binary P5 at 8 or 16 bits; returns raw integer values as float64."""
    with open(path, "rb") as fh:
        tokens = _pgm_tokens(fh)
        if next(tokens) != b"P5":
            raise ValueError("only binary (P5) PGM is supported")
        cols, rows, maxval = (int(next(tokens)) for _ in range(3))
        if not (0 < maxval < 65536):
            raise ValueError(f"bad PGM maxval {maxval}")
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
        data = np.frombuffer(
            _read_exact(fh, rows * cols * dtype.itemsize, "pixel data"), dtype=dtype
        )
    return data.reshape(rows, cols).astype(np.float64)


def write_pgm(path, img, maxval=65535):
    """Write a preview scaled so the image maximum maps to maxval."""
    img = np.asarray(img, dtype=np.float64)
    peak = float(np.max(np.abs(img)))
    scaled = np.zeros_like(img) if peak == 0 else np.clip(img / peak, 0.0, 1.0)
    quant = np.rint(scaled * maxval)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n{maxval}\n".encode())
        fh.write(quant.astype(dtype).tobytes())


def load_image(path):
    """Read a PGM or HCRS image, dispatching on the file's magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head[:2] == b"P5":
        return read_pgm(path)
    if head == IMAGE_MAGIC:
        return read_image(path)
    raise ValueError(f"unrecognized image format in {Path(path).name}")


def normalize(img):
    """Scale to [0, 1] by the peak absolute value; returns (scaled, factor)."""
    img = np.asarray(img, dtype=np.float64)
    peak = float(np.max(np.abs(img)))
    if peak == 0:
        return img.copy(), 1.0
    return img / peak, peak
