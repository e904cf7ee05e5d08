"""Spectral curves, Jerlov water classes, and per-channel effective coefficients.

Wavelength-resolved quantities (water coefficients, camera response, surface
illuminant) are carried as piecewise-linear curves on a shared grid and
collapsed into per-channel scalars with response-and-illuminant weighted
trapezoidal means. The canonical working grid is the visible band 400-700 nm
at 10 nm; collapse integrals refine the ingredients to a 1 nm grid so the
trapezoid discretization error is negligible against a brute-force oracle.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import io as aio
from .errors import (
    DegenerateResponseError,
    DimensionError,
    DomainError,
    SpectralRangeError,
)

WORKING_GRID_NM = np.arange(400.0, 701.0, 10.0)
COLLAPSE_STEP_NM = 1.0

JERLOV_NAMES = ("I", "IA", "IB", "II", "III", "1C", "3C", "5C", "7C", "9C")
OCEANIC_NAMES = ("I", "IA", "IB", "II", "III")
COASTAL_NAMES = ("1C", "3C", "5C", "7C", "9C")

DATA_DIR_ENV = "AQUASYNTH_DATA_DIR"


def _data_dir() -> Path:
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override)
    return Path(resources.files("aquasynth") / "data")


@dataclass(eq=False)
class SpectralCurve:
    """A wavelength-sampled non-negative function (1/m, response, or radiance).

    The curve is identified with its piecewise-linear interpolant; queries
    outside the sampled support are errors, never extrapolated.
    """

    wavelengths_nm: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.wavelengths_nm = np.asarray(self.wavelengths_nm, dtype=np.float64)
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.wavelengths_nm.ndim != 1 or self.values.ndim != 1:
            raise DimensionError("curve arrays must be 1-D")
        if self.wavelengths_nm.size < 2:
            raise DomainError("curve needs at least 2 samples")
        if self.wavelengths_nm.shape != self.values.shape:
            raise DimensionError("wavelengths and values must have equal length")
        if np.any(np.diff(self.wavelengths_nm) <= 0):
            raise DomainError("wavelengths must be strictly ascending")
        if not np.all(np.isfinite(self.wavelengths_nm)):
            raise DomainError("wavelengths must be finite")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0):
            raise DomainError("curve values must be finite and >= 0")

    @property
    def support(self) -> tuple[float, float]:
        return float(self.wavelengths_nm[0]), float(self.wavelengths_nm[-1])

    def same_grid(self, other: "SpectralCurve") -> bool:
        return np.array_equal(self.wavelengths_nm, other.wavelengths_nm)


def flat_curve(grid: np.ndarray, value: float = 1.0) -> SpectralCurve:
    grid = np.asarray(grid, dtype=np.float64)
    return SpectralCurve(grid, np.full(grid.shape, float(value)))


def sample_values(curve: SpectralCurve, grid) -> np.ndarray:
    """Interpolate curve values at the given wavelengths (any count >= 1)."""
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise DimensionError("sample grid must be a non-empty 1-D array")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise DomainError("sample grid must be strictly ascending")
    lo, hi = curve.support
    if grid[0] < lo or grid[-1] > hi:
        raise SpectralRangeError(
            f"grid [{grid[0]:g}, {grid[-1]:g}] nm outside curve support [{lo:g}, {hi:g}] nm")
    return np.interp(grid, curve.wavelengths_nm, curve.values)


def resample(curve: SpectralCurve, grid) -> SpectralCurve:
    """Linearly interpolate a curve onto a new grid inside its support."""
    grid = np.asarray(grid, dtype=np.float64)
    return SpectralCurve(grid, sample_values(curve, grid))


def value_at(curve: SpectralCurve, wavelength_nm: float) -> float:
    return float(sample_values(curve, np.array([wavelength_nm]))[0])


def ambient_light(e0: SpectralCurve, kd: SpectralCurve, d: float) -> SpectralCurve:
    """Downwelling ambient light at vertical depth d: E(d) = E(0) * exp(-K_d * d)."""
    if d < 0:
        raise DomainError(f"vertical depth must be >= 0, got {d}")
    if not e0.same_grid(kd):
        raise DimensionError("illuminant and K_d must share a wavelength grid")
    return SpectralCurve(e0.wavelengths_nm, e0.values * np.exp(-kd.values * d))


@dataclass(eq=False)
class WaterType:
    """One Jerlov class: absorption, scattering, and K_d on a shared grid.

    Beam attenuation is always derived as a + b, never stored.
    """

    name: str
    absorption: SpectralCurve
    scattering: SpectralCurve
    diffuse_downwelling: SpectralCurve

    def __post_init__(self):
        if self.name not in JERLOV_NAMES:
            raise DomainError(f"unknown water type {self.name!r}, expected one of {JERLOV_NAMES}")
        if not (self.absorption.same_grid(self.scattering)
                and self.absorption.same_grid(self.diffuse_downwelling)):
            raise DimensionError("water curves must share one wavelength grid")

    @property
    def grid(self) -> np.ndarray:
        return self.absorption.wavelengths_nm

    def beam_attenuation(self) -> SpectralCurve:
        """beta(lambda) = a(lambda) + b(lambda)."""
        return SpectralCurve(self.grid, self.absorption.values + self.scattering.values)

    def forward_attenuation(self, g: float) -> SpectralCurve:
        """Effective attenuation of the direct-plus-forward signal: a + g * b."""
        if not 0 < g <= 1:
            raise DomainError(f"scattering retention fraction g must be in (0, 1], got {g}")
        return SpectralCurve(self.grid, self.absorption.values + g * self.scattering.values)


@dataclass(eq=False)
class CameraResponse:
    """Per-channel spectral sensitivity on a shared grid (R, G, B order)."""

    red: SpectralCurve
    green: SpectralCurve
    blue: SpectralCurve

    def __post_init__(self):
        if not (self.red.same_grid(self.green) and self.red.same_grid(self.blue)):
            raise DimensionError("response channels must share a wavelength grid")
        for name, ch in self.items():
            if not np.any(ch.values > 0):
                raise DegenerateResponseError(f"{name} channel response is identically zero")

    @property
    def grid(self) -> np.ndarray:
        return self.red.wavelengths_nm

    def items(self):
        return (("red", self.red), ("green", self.green), ("blue", self.blue))


@dataclass(eq=False)
class ChannelCoefficients:
    """Per-channel effective scalars driving the image formation terms.

    beta_d / beta_b attenuate the direct signal and the backscatter volume;
    g_d / g_b are their forward-scattering-aware counterparts (a + g*b
    collapsed). Backlights are the saturation veil values for the reference
    (b*E/beta) and proposed (mu*b*E/(a+g*b)) formulations, normalized so the
    surface illuminant maps to channel value 1. `scatter` is the collapsed
    scattering coefficient, used to size the blur constant.
    """

    beta_d: np.ndarray
    beta_b: np.ndarray
    g_d: np.ndarray
    g_b: np.ndarray
    backlight_ref: np.ndarray
    backlight_prop: np.ndarray
    scatter: np.ndarray

    def __post_init__(self):
        for field_name in ("beta_d", "beta_b", "g_d", "g_b",
                           "backlight_ref", "backlight_prop", "scatter"):
            arr = np.asarray(getattr(self, field_name), dtype=np.float64)
            if arr.shape != (3,):
                raise DimensionError(f"{field_name} must have 3 channel entries")
            if not np.all(np.isfinite(arr)):
                raise DomainError(f"{field_name} must be finite")
            setattr(self, field_name, arr)
        for field_name in ("beta_d", "beta_b", "g_d", "g_b"):
            if np.any(getattr(self, field_name) <= 0):
                raise DomainError(f"{field_name} must be > 0 for physical water")
        if np.any(self.g_d > self.beta_d * (1 + 1e-12)):
            raise DomainError("g_d must not exceed beta_d (requires g <= 1)")
        for field_name in ("backlight_ref", "backlight_prop"):
            bl = getattr(self, field_name)
            if np.any(bl < 0) or np.any(bl > 1):
                raise DomainError(f"{field_name} must lie in [0, 1]")

    def backlight(self, mode: str) -> np.ndarray:
        if mode == "reference":
            return self.backlight_ref
        if mode == "proposed":
            return self.backlight_prop
        raise DomainError(f"unknown mode {mode!r}")

    def backscatter_attenuation(self, mode: str) -> np.ndarray:
        return self.beta_b if mode == "reference" else self.g_b


def _trapz(values: np.ndarray, grid: np.ndarray) -> float:
    return float(np.trapezoid(values, grid))


def channel_coefficient(curve: SpectralCurve, response: CameraResponse,
                        weight: SpectralCurve) -> np.ndarray:
    """Collapse a spectral curve to 3 channel scalars.

    Per channel c: integral(S_c * weight * curve) / integral(S_c * weight),
    trapezoidal on the shared grid. A weighted mean, so the result always
    lies within [min(curve), max(curve)].
    """
    if not (curve.same_grid(weight) and curve.same_grid(response.red)):
        raise DimensionError("curve, weight and response must share one wavelength grid")
    grid = curve.wavelengths_nm
    out = np.empty(3)
    for i, (name, ch) in enumerate(response.items()):
        norm = _trapz(ch.values * weight.values, grid)
        if norm <= 0:
            raise DegenerateResponseError(
                f"{name} channel: response-weight normalization integral is not positive")
        out[i] = _trapz(ch.values * weight.values * curve.values, grid) / norm
    return out


def channel_radiance(spectrum: SpectralCurve, response: CameraResponse,
                     white: SpectralCurve) -> np.ndarray:
    """Collapse a radiance spectrum to channel values, white-normalized.

    Per channel c: integral(S_c * spectrum) / integral(S_c * white); the
    white reference (surface illuminant) maps to exactly 1 per channel.
    """
    if not (spectrum.same_grid(white) and spectrum.same_grid(response.red)):
        raise DimensionError("spectrum, white and response must share one wavelength grid")
    grid = spectrum.wavelengths_nm
    out = np.empty(3)
    for i, (name, ch) in enumerate(response.items()):
        norm = _trapz(ch.values * white.values, grid)
        if norm <= 0:
            raise DegenerateResponseError(
                f"{name} channel: white normalization integral is not positive")
        out[i] = _trapz(ch.values * spectrum.values, grid) / norm
    return out


def _collapse_grid(grid: np.ndarray) -> np.ndarray:
    lo, hi = grid[0], grid[-1]
    n = int(round((hi - lo) / COLLAPSE_STEP_NM))
    return np.linspace(lo, hi, n + 1)


def effective_coefficients(water: WaterType, response: CameraResponse, d: float,
                           g: float, mu: float,
                           e0: SpectralCurve | None = None) -> ChannelCoefficients:
    """Collapse a water type into the full per-channel coefficient set.

    Attenuations (beta, a + g*b, b) are E(d)-and-response weighted means;
    backlights are white-normalized channel radiances of the veil spectra
    b*E/beta (reference) and mu*b*E/(a+g*b) (proposed), clamped to [0, 1].
    Ingredients are refined to a 1 nm grid before integrating.
    """
    if not 0 < g <= 1:
        raise DomainError(f"g must be in (0, 1], got {g}")
    if not 0 < mu <= 1:
        raise DomainError(f"mu must be in (0, 1], got {mu}")
    if d < 0:
        raise DomainError(f"vertical depth must be >= 0, got {d}")

    fine = _collapse_grid(water.grid)
    a = resample(water.absorption, fine)
    b = resample(water.scattering, fine)
    kd = resample(water.diffuse_downwelling, fine)
    resp = CameraResponse(resample(response.red, fine),
                          resample(response.green, fine),
                          resample(response.blue, fine))
    if e0 is None:
        e0f = flat_curve(fine)
    else:
        e0f = resample(e0, fine)

    e_depth = ambient_light(e0f, kd, d)
    beta = SpectralCurve(fine, a.values + b.values)
    fwd = SpectralCurve(fine, a.values + g * b.values)

    beta_d = channel_coefficient(beta, resp, e_depth)
    g_d = channel_coefficient(fwd, resp, e_depth)
    scatter = channel_coefficient(b, resp, e_depth)

    veil_ref = SpectralCurve(fine, b.values * e_depth.values / beta.values)
    veil_prop = SpectralCurve(fine, mu * b.values * e_depth.values / fwd.values)
    backlight_ref = np.clip(channel_radiance(veil_ref, resp, e0f), 0.0, 1.0)
    backlight_prop = np.clip(channel_radiance(veil_prop, resp, e0f), 0.0, 1.0)

    return ChannelCoefficients(
        beta_d=beta_d, beta_b=beta_d.copy(), g_d=g_d, g_b=g_d.copy(),
        backlight_ref=backlight_ref, backlight_prop=backlight_prop,
        scatter=scatter)


def load_water_type(name: str, data_dir=None) -> WaterType:
    """Load a bundled Jerlov class, resampled onto the working grid.

    `data_dir` (or the AQUASYNTH_DATA_DIR env var) overrides the bundled
    table location.
    """
    if name not in JERLOV_NAMES:
        raise DomainError(f"unknown water type {name!r}, expected one of {JERLOV_NAMES}")
    base = Path(data_dir) if data_dir is not None else _data_dir()
    grid, a, b, kd = aio.read_water_csv(base / f"jerlov_{name}.csv")
    return WaterType(
        name=name,
        absorption=resample(SpectralCurve(grid, a), WORKING_GRID_NM),
        scattering=resample(SpectralCurve(grid, b), WORKING_GRID_NM),
        diffuse_downwelling=resample(SpectralCurve(grid, kd), WORKING_GRID_NM),
    )


def load_illuminant(path) -> SpectralCurve:
    """Load a surface illuminant E(0, lambda) from a ``wavelength_nm,value`` CSV."""
    grid, values = aio.read_curve_csv(path)
    return resample(SpectralCurve(grid, values), WORKING_GRID_NM)


def load_camera_response(path=None, data_dir=None) -> CameraResponse:
    """Load an RGB response CSV (bundled Nikon D90 model by default)."""
    if path is None:
        base = Path(data_dir) if data_dir is not None else _data_dir()
        path = base / "nikon_d90.csv"
    grid, r, g, b = aio.read_response_csv(path)
    return CameraResponse(
        red=resample(SpectralCurve(grid, r), WORKING_GRID_NM),
        green=resample(SpectralCurve(grid, g), WORKING_GRID_NM),
        blue=resample(SpectralCurve(grid, b), WORKING_GRID_NM),
    )
