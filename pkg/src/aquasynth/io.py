"""File handling: images, depth maps, spectral CSVs, term visualizations.

Images travel as float arrays in [0, 1]. `load_image` keeps the file's gamma
encoding; linearization is the pipeline's job. PNG output quantizes with
round-half-up so 0.5 lands on byte 128.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import CsvFormatError, DecodeError, DimensionError

# sRGB transfer function breakpoints (IEC 61966-2-1)
_SRGB_EPS = 0.0031308
_SRGB_EPS_ENC = 0.04045


def srgb_to_linear(image: np.ndarray) -> np.ndarray:
    """Decode gamma-encoded sRGB values in [0, 1] to linear light."""
    x = np.asarray(image, dtype=np.float64)
    return np.where(x <= _SRGB_EPS_ENC, x / 12.92, ((x + 0.055) / 1.055) ** 2.4)


def linear_to_srgb(image: np.ndarray) -> np.ndarray:
    """Encode linear-light values in [0, 1] with the sRGB transfer function."""
    x = np.asarray(image, dtype=np.float64)
    return np.where(x <= _SRGB_EPS, x * 12.92, 1.055 * np.maximum(x, 0.0) ** (1.0 / 2.4) - 0.055)


def load_image(path) -> np.ndarray:
    """Load a PNG or JPEG as H x W x 3 floats in [0, 1], gamma-encoded.

    Grayscale files are promoted to three identical channels. Alpha is
    dropped. Anything Pillow cannot decode raises DecodeError.
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.format not in ("PNG", "JPEG"):
                raise DecodeError(f"{path}: unsupported image format {img.format!r}")
            img = img.convert("RGB")
            arr = np.asarray(img, dtype=np.float64)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"{path}: cannot decode image ({exc})") from exc
    return arr / 255.0


def quantize_u8(image: np.ndarray) -> np.ndarray:
    """Quantize floats in [0, 1] to uint8 with round-half-up."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("image values must already be clamped to [0, 1]")
    return np.floor(arr * 255.0 + 0.5).astype(np.uint8)


def save_image(path, image: np.ndarray, bit_depth: int = 8) -> None:
    """Write an H x W x 3 float image in [0, 1] as PNG (8-bit, or 16-bit on request)."""
    path = Path(path)
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise DimensionError(f"expected H x W x 3 image, got shape {arr.shape}")
    if bit_depth == 8:
        Image.fromarray(quantize_u8(arr), mode="RGB").save(path, format="PNG")
    elif bit_depth == 16:
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("image values must already be clamped to [0, 1]")
        data = np.floor(arr * 65535.0 + 0.5).astype(np.uint16)
        # Pillow has no 16-bit RGB mode; write via PNG plugin's I;16 per channel
        # is not supported either, so pack with the pure-python encoder path.
        _write_png16_rgb(path, data)
    else:
        raise ValueError(f"unsupported bit depth {bit_depth}")


def _write_png16_rgb(path: Path, data: np.ndarray) -> None:
    import struct
    import zlib

    h, w, _ = data.shape
    raw = bytearray()
    big = data.astype(">u2").tobytes()
    stride = w * 6
    for row in range(h):
        raw.append(0)
        raw.extend(big[row * stride:(row + 1) * stride])

    def chunk(tag: bytes, payload: bytes) -> bytes:
        return (struct.pack(">I", len(payload)) + tag + payload
                + struct.pack(">I", zlib.crc32(tag + payload) & 0xFFFFFFFF))

    header = struct.pack(">IIBBBBB", w, h, 16, 2, 0, 0, 0)
    blob = (b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header)
            + chunk(b"IDAT", zlib.compress(bytes(raw), 6)) + chunk(b"IEND", b""))
    Path(path).write_bytes(blob)


# ---------------------------------------------------------------------------
# depth formats
# ---------------------------------------------------------------------------

def read_depth_png16(path) -> np.ndarray:
    """Read a 16-bit grayscale PNG as relative depth in [0, 1] (full-scale)."""
    path = Path(path)
    try:
        with Image.open(path) as img:
            if img.format != "PNG":
                raise DecodeError(f"{path}: not a PNG file")
            if img.mode not in ("I;16", "I;16B", "I;16L", "I"):
                raise DecodeError(
                    f"{path}: expected 16-bit grayscale PNG, got mode {img.mode!r}")
            arr = np.asarray(img, dtype=np.float64)
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"{path}: cannot decode depth PNG ({exc})") from exc
    if arr.ndim != 2:
        raise DecodeError(f"{path}: depth PNG must be single-channel")
    if arr.min() < 0 or arr.max() > 65535:
        raise DecodeError(f"{path}: sample values outside 16-bit range")
    return arr / 65535.0


def write_depth_png16(path, depth: np.ndarray) -> None:
    """Write relative depth in [0, 1] as a 16-bit grayscale PNG."""
    arr = np.asarray(depth, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError("depth must be H x W")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("relative depth must lie in [0, 1]")
    data = np.floor(arr * 65535.0 + 0.5).astype(np.uint16)
    Image.fromarray(data).save(Path(path), format="PNG")


def read_pfm(path) -> np.ndarray:
    """Read a single-channel PFM file (header ``Pf``) as float32, row 0 on top.

    The scale line's sign selects endianness and its magnitude multiplies the
    samples, per the format; color ``PF`` files are rejected because depth
    maps are single-channel.
    """
    path = Path(path)
    with path.open("rb") as fh:
        magic = fh.readline().strip()
        if magic == b"PF":
            raise DecodeError(f"{path}: color PFM is not a single-channel depth map")
        if magic != b"Pf":
            raise DecodeError(f"{path}: not a PFM file (magic {magic!r})")
        dims = fh.readline().split()
        if len(dims) != 2:
            raise DecodeError(f"{path}: malformed PFM dimension line")
        try:
            w, h = int(dims[0]), int(dims[1])
            scale = float(fh.readline().strip())
        except ValueError as exc:
            raise DecodeError(f"{path}: malformed PFM header ({exc})") from exc
        if w <= 0 or h <= 0 or scale == 0.0:
            raise DecodeError(f"{path}: invalid PFM dimensions or scale")
        endian = "<" if scale < 0 else ">"
        buf = fh.read()
    if len(buf) != 4 * w * h:
        raise DecodeError(
            f"{path}: expected {4 * w * h} sample bytes, found {len(buf)}")
    data = np.frombuffer(buf, dtype=endian + "f4")
    if abs(scale) != 1.0:
        data = (data * np.float32(abs(scale))).astype(np.float32)
    # PFM scanlines run bottom-to-top; flip so row 0 is the image top.
    return np.ascontiguousarray(data.reshape(h, w)[::-1])


def write_pfm(path, depth: np.ndarray) -> None:
    """Write a single-channel float32 PFM (little-endian, negative scale)."""
    arr = np.asarray(depth, dtype=np.float32)
    if arr.ndim != 2:
        raise DimensionError("depth must be H x W")
    h, w = arr.shape
    with Path(path).open("wb") as fh:
        fh.write(b"Pf\n")
        fh.write(f"{w} {h}\n".encode("ascii"))
        fh.write(b"-1.0\n")
        fh.write(np.ascontiguousarray(arr[::-1]).astype("<f4").tobytes())


# ---------------------------------------------------------------------------
# spectral CSVs
# ---------------------------------------------------------------------------

def _read_csv_columns(path, expected_header: tuple[str, ...]) -> np.ndarray:
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file") from None
        if tuple(h.strip() for h in header) != expected_header:
            raise CsvFormatError(
                f"{path}: unknown header {header!r}, expected {list(expected_header)!r}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(expected_header):
                raise CsvFormatError(f"{path}:{lineno}: expected {len(expected_header)} fields")
            try:
                values = [float(cell) for cell in row]
            except ValueError as exc:
                raise CsvFormatError(f"{path}:{lineno}: {exc}") from exc
            if not all(np.isfinite(values)):
                raise CsvFormatError(f"{path}:{lineno}: non-finite value")
            rows.append(values)
    if len(rows) < 2:
        raise CsvFormatError(f"{path}: need at least 2 data rows")
    return np.asarray(rows, dtype=np.float64)


def read_curve_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``wavelength_nm,value`` into (wavelengths, values)."""
    data = _read_csv_columns(path, ("wavelength_nm", "value"))
    return data[:, 0], data[:, 1]


def read_water_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Read ``wavelength_nm,a,b,kd`` into (wavelengths, a, b, kd)."""
    data = _read_csv_columns(path, ("wavelength_nm", "a", "b", "kd"))
    return data[:, 0], data[:, 1], data[:, 2], data[:, 3]


def read_response_csv(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Read ``wavelength_nm,r,g,b`` into (wavelengths, r, g, b)."""
    data = _read_csv_columns(path, ("wavelength_nm", "r", "g", "b"))
    return data[:, 0], data[:, 1], data[:, 2], data[:, 3]


# ---------------------------------------------------------------------------
# term visualization
# ---------------------------------------------------------------------------

def stretch_panel(term: np.ndarray) -> tuple[np.ndarray, float]:
    """Min-max stretch a term to uint8; returns (panel, stretch factor).

    The factor is 255 / (max - min). A constant term maps to uniform black
    with factor 0.
    """
    arr = np.asarray(term, dtype=np.float64)
    lo, hi = float(arr.min()), float(arr.max())
    if hi <= lo:
        return np.zeros(arr.shape, dtype=np.uint8), 0.0
    factor = 255.0 / (hi - lo)
    return np.floor((arr - lo) * factor + 0.5).astype(np.uint8), factor


GUTTER_PX = 8


def emit_term_grid(stack, path) -> Path:
    """Write D | F | B side by side, each panel min-max stretched.

    Debugging aid: stretch factors are recorded in the file name, e.g.
    ``name_s1.2e+03_s0_s4.5e+02.png``. Returns the path actually written.
    """
    panels = []
    factors = []
    for term in (stack.direct, stack.forward, stack.backscatter):
        panel, factor = stretch_panel(term)
        panels.append(panel)
        factors.append(factor)
    h, w, _ = panels[0].shape
    gutter = np.zeros((h, GUTTER_PX, 3), dtype=np.uint8)
    grid = np.concatenate(
        [panels[0], gutter, panels[1], gutter, panels[2]], axis=1)

    path = Path(path)
    tag = "_".join(f"s{f:.3g}" for f in factors)
    out = path.with_name(f"{path.stem}_{tag}{path.suffix or '.png'}")
    Image.fromarray(grid, mode="RGB").save(out, format="PNG")
    return out
