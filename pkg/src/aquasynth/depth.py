"""Relative depth ingestion and metric scaling.

Relative maps (larger = farther) come from 16-bit grayscale PNGs or
single-channel PFMs. Metric conversion min-max normalizes, applies a gamma
curve, and maps affinely onto [z_min, z_max]; field modulation happens after
scaling so the field multiplies physical path length.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as aio
from .errors import DecodeError, DegenerateDepthError, DomainError

DEPTH_SUFFIXES = (".pfm", ".png")


@dataclass
class DepthScaling:
    """Target metric range and gamma for relative-to-metric conversion."""

    z_min: float
    z_max: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.z_min) and np.isfinite(self.z_max)):
            raise DomainError("depth range must be finite")
        if self.z_min < 0 or self.z_min >= self.z_max:
            raise DomainError(
                f"depth range must satisfy 0 <= z_min < z_max, got [{self.z_min}, {self.z_max}]")
        if not np.isfinite(self.gamma) or self.gamma <= 0:
            raise DomainError(f"gamma must be > 0, got {self.gamma}")


def scale_depth(rel: np.ndarray, scaling: DepthScaling) -> np.ndarray:
    """Min-max normalize, apply u^gamma, map onto [z_min, z_max].

    The output minimum and maximum equal z_min and z_max exactly for any
    gamma, and the map is monotone in the input.
    """
    arr = np.asarray(rel, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise DomainError("relative depth must be finite")
    lo, hi = arr.min(), arr.max()
    if hi <= lo:
        raise DegenerateDepthError("constant depth map cannot be range-scaled")
    u = ((arr - lo) / (hi - lo)) ** scaling.gamma
    return (1.0 - u) * scaling.z_min + u * scaling.z_max


def load_depth(path, invert: bool = False) -> np.ndarray:
    """Load a relative depth map (larger = farther) from PFM or 16-bit PNG.

    `invert` negates the map for disparity-style sources; subsequent min-max
    scaling makes negation equivalent to 1-normalized.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pfm":
        rel = aio.read_pfm(path).astype(np.float64)
    elif suffix == ".png":
        rel = aio.read_depth_png16(path)
    else:
        raise DecodeError(f"{path}: unsupported depth format {suffix!r}")
    if not np.all(np.isfinite(rel)):
        raise DecodeError(f"{path}: depth map contains non-finite samples")
    return -rel if invert else rel
