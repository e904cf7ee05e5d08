"""Scale-free Gaussian random fields for medium inhomogeneity.

Fields are synthesized spectrally: complex white noise shaped by a power-law
amplitude |k|^(-alpha/2), inverse-transformed, and min-max rescaled to a
small band around 1. Multiplying the depth map by such a field emulates
density variation along the optical path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError


@dataclass
class FieldConfig:
    """Spectral slope, output range, and seed of one field.

    `seed` may be left None; the pipeline then derives it from the
    degradation seed.
    """

    exponent: float = 3.0
    lo: float = 0.7
    hi: float = 1.3
    seed: int | None = None

    def __post_init__(self):
        if not np.isfinite(self.exponent) or self.exponent <= 0:
            raise DomainError(f"field exponent must be > 0, got {self.exponent}")
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise DomainError("field range must be finite")
        if not 0 < self.lo <= 1 <= self.hi:
            raise DomainError(
                f"field range must satisfy 0 < lo <= 1 <= hi, got [{self.lo}, {self.hi}]")
        if self.lo >= self.hi:
            raise DomainError(f"field range must have lo < hi, got [{self.lo}, {self.hi}]")


def generate_grf(h: int, w: int, cfg: FieldConfig) -> np.ndarray:
    """Sample one scale-free field, rescaled so min == lo and max == hi.

    Deterministic: a fixed (h, w, cfg) always returns the same field.
    """
    if h < 2 or w < 2:
        raise DimensionError(f"field needs at least 2 x 2 pixels, got {h} x {w}")
    seed = 0 if cfg.seed is None else cfg.seed
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((h, w)) + 1j * rng.standard_normal((h, w))

    ky = np.fft.fftfreq(h)[:, None]
    kx = np.fft.fftfreq(w)[None, :]
    k = np.sqrt(kx * kx + ky * ky)
    amplitude = np.zeros_like(k)
    nonzero = k > 0
    amplitude[nonzero] = k[nonzero] ** (-cfg.exponent / 2.0)

    raw = np.fft.ifft2(noise * amplitude).real
    lo_v, hi_v = raw.min(), raw.max()
    if hi_v <= lo_v:
        raise DomainError("degenerate field sample (constant); check dimensions")
    t = (raw - lo_v) / (hi_v - lo_v)
    # Lerp keeps the endpoints exact: t == 0 -> lo, t == 1 -> hi.
    return (1.0 - t) * cfg.lo + t * cfg.hi


def modulate_depth(depth: np.ndarray, field: np.ndarray) -> np.ndarray:
    """Pointwise product of depth and field (density variation along the path)."""
    z = np.asarray(depth, dtype=np.float64)
    f = np.asarray(field, dtype=np.float64)
    if z.shape != f.shape:
        raise DimensionError(f"depth {z.shape} and field {f.shape} dimensions differ")
    return z * f
