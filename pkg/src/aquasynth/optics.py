"""The three image-formation terms over an image/depth pair.

Direct transmission attenuates the latent scene exponentially with path
length; backscatter is the hazy veil saturating at its infinite-distance
value; forward scattering is a weighted, blurred copy of the latent scene.
All operations are per-channel over H x W x 3 linear-light arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import convolve1d

from .errors import DimensionError, DomainError, ParametrizationError

# Level count bounds the linear-blend error of the binned blur against a
# dense per-pixel gather: measured max abs error at 64 levels stays under
# 1e-3 for sigma ranges produced by survey-like parameters.
MAX_BLUR_LEVELS = 64


@dataclass(eq=False)
class ScenePair:
    """A clean image and its dimension-matched depth map.

    `radiance` is H x W x 3 in [0, 1]; `depth` is H x W, finite and >= 0.
    Optics operations expect linear-light radiance and metric depth; the
    pipeline feeds gamma-encoded radiance / relative depth through the same
    container before converting.
    """

    radiance: np.ndarray
    depth: np.ndarray

    def __post_init__(self):
        self.radiance = np.asarray(self.radiance, dtype=np.float64)
        self.depth = np.asarray(self.depth, dtype=np.float64)
        if self.radiance.ndim != 3 or self.radiance.shape[2] != 3:
            raise DimensionError(f"radiance must be H x W x 3, got {self.radiance.shape}")
        if self.depth.shape != self.radiance.shape[:2]:
            raise DimensionError(
                f"depth shape {self.depth.shape} does not match image {self.radiance.shape[:2]}")
        if not np.all(np.isfinite(self.radiance)):
            raise DomainError("radiance must be finite")
        if self.radiance.min() < 0 or self.radiance.max() > 1:
            raise DomainError("radiance must lie in [0, 1]")
        if not np.all(np.isfinite(self.depth)) or self.depth.min() < 0:
            raise DomainError("depth must be finite and >= 0")

    @property
    def shape(self) -> tuple[int, int]:
        return self.depth.shape


@dataclass(eq=False)
class TermStack:
    """Direct, forward, and backscatter terms of one synthesis."""

    direct: np.ndarray
    forward: np.ndarray
    backscatter: np.ndarray

    def __post_init__(self):
        shape = None
        for name in ("direct", "forward", "backscatter"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if shape is None:
                shape = arr.shape
            elif arr.shape != shape:
                raise DimensionError("term shapes do not match")
            if np.any(arr < 0):
                raise DomainError(f"{name} term must be non-negative")
            setattr(self, name, arr)

    def total(self) -> np.ndarray:
        return self.direct + self.forward + self.backscatter


def _channel_vec(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if arr.shape != (3,):
        raise DimensionError(f"{name} must have exactly 3 channel entries")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite")
    return arr


def transmission(depth: np.ndarray, beta_d) -> np.ndarray:
    """Per-channel transmission map t = exp(-beta_c * z)."""
    beta = _channel_vec(beta_d, "beta_d")
    if np.any(beta < 0):
        raise DomainError("beta_d must be >= 0 per channel")
    z = np.asarray(depth, dtype=np.float64)
    return np.exp(-z[..., None] * beta)


def direct_transmission(scene: ScenePair, beta_d) -> tuple[np.ndarray, np.ndarray]:
    """Attenuate the latent scene: D = J * exp(-beta_c * z).

    Returns (direct term, transmission map) so callers get t(x) without
    recomputing the exponential.
    """
    t = transmission(scene.depth, beta_d)
    return scene.radiance * t, t


def backscatter(depth: np.ndarray, backlight, atten) -> np.ndarray:
    """Veiling light B = B_inf * (1 - exp(-atten_c * z)).

    `atten` is beta_b in reference mode or the forward-aware g_b in proposed
    mode; the caller picks.
    """
    b_inf = _channel_vec(backlight, "backlight")
    if np.any(b_inf < 0) or np.any(b_inf > 1):
        raise DomainError("backlight must lie in [0, 1] per channel")
    a = _channel_vec(atten, "atten")
    if np.any(a <= 0):
        raise DomainError("backscatter attenuation must be > 0 per channel")
    z = np.asarray(depth, dtype=np.float64)
    return b_inf * (1.0 - np.exp(-z[..., None] * a))


def forward_weight(depth: np.ndarray, g_d, beta_d) -> np.ndarray:
    """Forward-scattering weight w = exp(-g_c * z) - exp(-beta_c * z), >= 0."""
    g = _channel_vec(g_d, "g_d")
    beta = _channel_vec(beta_d, "beta_d")
    if np.any(g > beta * (1 + 1e-12)):
        raise ParametrizationError(
            f"forward attenuation {g} exceeds beta {beta}; requires g <= 1")
    z = np.asarray(depth, dtype=np.float64)[..., None]
    w = np.exp(-z * g) - np.exp(-z * beta)
    # exact zeros at g == beta; the floor guards rounding at g ~ beta
    return np.maximum(w, 0.0)


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian, truncated at radius ceil(3*sigma), min width 1."""
    if sigma <= 0:
        return np.array([1.0])
    radius = int(math.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return k / k.sum()


def _blur_uniform(image: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian blur at one sigma, replicate-padded edges."""
    if sigma <= 0:
        return image.copy()
    k = gaussian_kernel_1d(sigma)
    out = convolve1d(image, k, axis=0, mode="nearest")
    return convolve1d(out, k, axis=1, mode="nearest")


def _sigma_levels(sigma_map: np.ndarray, max_levels: int) -> np.ndarray:
    """Pick blur levels: exact unique sigmas when few, else uniform in sigma."""
    unique = np.unique(sigma_map)
    if unique.size <= max_levels:
        return unique
    return np.linspace(float(unique[0]), float(unique[-1]), max_levels)


def variable_blur(image: np.ndarray, depth: np.ndarray, phi: float,
                  pixel_scale: float = 1.0,
                  max_levels: int = MAX_BLUR_LEVELS) -> np.ndarray:
    """Depth-variable Gaussian blur with sigma(x) = pixel_scale * phi * z(x).

    Sigma is quantized into at most `max_levels` levels (uniform in sigma,
    or the exact values when there are few); the image is blurred once per
    level and each pixel linearly blends the two bracketing levels. phi = 0
    returns the input bit-exactly.
    """
    if phi < 0:
        raise DomainError(f"blur constant phi must be >= 0, got {phi}")
    if pixel_scale <= 0:
        raise DomainError(f"pixel scale must be > 0, got {pixel_scale}")
    img = np.asarray(image, dtype=np.float64)
    z = np.asarray(depth, dtype=np.float64)
    if img.ndim != 3 or img.shape[:2] != z.shape:
        raise DimensionError(
            f"image {img.shape} and depth {z.shape} dimensions do not match")
    if phi == 0:
        return img.copy()

    sigma_map = pixel_scale * phi * z
    levels = _sigma_levels(sigma_map, max_levels)
    if levels.size == 1:
        return _blur_uniform(img, float(levels[0]))

    idx = np.searchsorted(levels, sigma_map, side="right")
    idx = np.clip(idx, 1, levels.size - 1)
    lo, hi = levels[idx - 1], levels[idx]
    t = (sigma_map - lo) / (hi - lo)

    # Accumulate per-level contributions instead of stacking all blurred
    # copies; keeps memory at two images regardless of level count. Each
    # level only blurs the bounding box of its contributing pixels, expanded
    # by the kernel radius so every tap lands on real pixels (or the true
    # image border), which leaves the arithmetic identical to a full blur.
    h, w = z.shape
    out = np.zeros_like(img)
    for j, sigma in enumerate(levels):
        coeff = np.zeros(z.shape)
        low_mask = idx - 1 == j
        high_mask = idx == j
        coeff[low_mask] += 1.0 - t[low_mask]
        coeff[high_mask] += t[high_mask]
        rows = np.flatnonzero(coeff.any(axis=1))
        if rows.size == 0:
            continue
        cols = np.flatnonzero(coeff.any(axis=0))
        radius = int(math.ceil(3.0 * float(sigma)))
        y0, y1 = max(rows[0] - radius, 0), min(rows[-1] + radius + 1, h)
        x0, x1 = max(cols[0] - radius, 0), min(cols[-1] + radius + 1, w)
        blurred = _blur_uniform(img[y0:y1, x0:x1], float(sigma))
        out[y0:y1, x0:x1] += blurred * coeff[y0:y1, x0:x1, None]
    return out


def forward_scatter(scene: ScenePair, g_d, beta_d, phi: float,
                    pixel_scale: float = 1.0) -> np.ndarray:
    """Forward-scattered term: blur of the weighted latent scene.

    The weight multiplies the latent scene J (the true source of the
    scattered light) before blurring, not the other way around.
    """
    w = forward_weight(scene.depth, g_d, beta_d)
    return variable_blur(w * scene.radiance, scene.depth, phi, pixel_scale)
