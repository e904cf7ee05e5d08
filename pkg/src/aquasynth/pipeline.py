"""Full synthesis of the degraded image in reference and proposed modes.

The composite image is the sum of direct transmission, forward scattering,
and backscatter, computed in linear light and re-encoded afterwards.
Reference mode reproduces the prior-art model: no forward term, backscatter
attenuated by beta_b, veil b*E/beta, no field modulation. Proposed mode adds
the forward term with effective attenuation a + g*b, matches the backscatter
attenuation to it, scales the veil by mu, and lets a Gaussian random field
perturb the depth map.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from . import io as aio
from .depth import DepthScaling, scale_depth
from .errors import ConfigError, DomainError, NumericalFaultError
from .field import FieldConfig, generate_grf, modulate_depth
from .optics import (
    ScenePair,
    TermStack,
    backscatter,
    direct_transmission,
    forward_scatter,
)
from .spectra import (
    JERLOV_NAMES,
    CameraResponse,
    ChannelCoefficients,
    WaterType,
    effective_coefficients,
    load_camera_response,
    load_water_type,
)

MODES = ("reference", "proposed")


@dataclass
class DegradationConfig:
    """Everything that determines one synthesis besides the scene itself."""

    water: str | None = None
    mode: str = "reference"
    d: float = 1.0
    scaling: DepthScaling | None = None
    g: float = 0.2
    mu: float = 0.3
    phi_factor: float = 0.3
    blur_pixel_scale: float = 1.0
    field: FieldConfig | None = None
    invert_depth: bool = False
    coefficient_override: np.ndarray | None = None
    backlight_override: np.ndarray | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 0 < self.g <= 1:
            raise ConfigError(f"g must be in (0, 1], got {self.g}")
        if not 0 < self.mu <= 1:
            raise ConfigError(f"mu must be in (0, 1], got {self.mu}")
        if self.phi_factor <= 0:
            raise ConfigError(f"phi_factor must be > 0, got {self.phi_factor}")
        if self.blur_pixel_scale <= 0:
            raise ConfigError(f"blur_pixel_scale must be > 0, got {self.blur_pixel_scale}")
        if self.d < 0:
            raise ConfigError(f"d must be >= 0, got {self.d}")
        if self.coefficient_override is not None:
            arr = np.asarray(self.coefficient_override, dtype=np.float64).reshape(-1)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)) or np.any(arr <= 0):
                raise ConfigError("coefficient_override must be 3 positive finite values")
            self.coefficient_override = arr
            if self.mode == "proposed":
                raise ConfigError(
                    "coefficient_override bypasses the spectral collapse and only "
                    "supports mode=reference")
        elif self.water is None:
            raise ConfigError("water is required unless coefficient_override is given")
        if self.water is not None and self.water not in JERLOV_NAMES:
            raise ConfigError(
                f"water must be one of {JERLOV_NAMES}, got {self.water!r}")
        if self.backlight_override is not None:
            arr = np.asarray(self.backlight_override, dtype=np.float64).reshape(-1)
            if arr.shape != (3,) or not np.all(np.isfinite(arr)) \
                    or np.any(arr < 0) or np.any(arr > 1):
                raise ConfigError("backlight_override must be 3 values in [0, 1]")
            self.backlight_override = arr
            if self.coefficient_override is None:
                raise ConfigError("backlight_override requires coefficient_override")
        if self.invert_depth and self.scaling is None:
            raise ConfigError("invert_depth requires a depth scaling (z_min/z_max)")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0 or self.seed >= 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @classmethod
    def from_mapping(cls, mapping: Mapping) -> "DegradationConfig":
        """Build and validate a config from plain keys (JSON / kwargs style).

        Accepted keys: water, mode, d, z_min, z_max, gamma, g, mu,
        phi_factor, blur_pixel_scale, field, invert_depth,
        coefficient_override, seed. Unknown keys are errors.
        """
        m = dict(mapping)
        kwargs = {}
        for key in ("water", "mode", "d", "g", "mu", "phi_factor",
                    "blur_pixel_scale", "invert_depth", "seed"):
            if key in m:
                kwargs[key] = m.pop(key)

        if ("z_min" in m) != ("z_max" in m):
            raise ConfigError("z_min and z_max must be given together")
        if "z_min" in m:
            kwargs["scaling"] = DepthScaling(
                z_min=_number(m.pop("z_min"), "z_min"),
                z_max=_number(m.pop("z_max"), "z_max"),
                gamma=_number(m.pop("gamma", 1.0), "gamma"))
        elif "gamma" in m:
            raise ConfigError("gamma requires z_min and z_max")

        if "field" in m:
            fm = m.pop("field")
            if fm is not None:
                if not isinstance(fm, Mapping):
                    raise ConfigError("field must be a mapping or null")
                fm = dict(fm)
                enabled = fm.pop("enabled", True)
                fc_kwargs = {}
                for key in ("exponent", "lo", "hi", "seed"):
                    if key in fm:
                        fc_kwargs[key] = fm.pop(key)
                if fm:
                    raise ConfigError(f"unknown field keys: {sorted(fm)}")
                kwargs["field"] = FieldConfig(**fc_kwargs) if enabled else None

        if "coefficient_override" in m:
            ov = m.pop("coefficient_override")
            if ov is not None:
                if isinstance(ov, Mapping):
                    ov = dict(ov)
                    kwargs["coefficient_override"] = ov.pop("beta")
                    if "backlight" in ov:
                        kwargs["backlight_override"] = ov.pop("backlight")
                    if ov:
                        raise ConfigError(f"unknown coefficient_override keys: {sorted(ov)}")
                else:
                    kwargs["coefficient_override"] = ov
        if m:
            raise ConfigError(f"unknown config keys: {sorted(m)}")
        try:
            return cls(**kwargs)
        except (DomainError, TypeError) as exc:
            raise ConfigError(str(exc)) from exc


def _number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be a number, got {value!r}")
    return float(value)


def build_coefficients(cfg: DegradationConfig,
                       response: CameraResponse | None = None,
                       water: WaterType | None = None) -> ChannelCoefficients:
    """Resolve the per-channel coefficient set for a config.

    Either the spectral collapse of the selected water type, or the
    override path: beta_d = beta_b = override, reference backlight rescaled
    by the override attenuation (or taken verbatim from backlight_override).
    """
    if cfg.coefficient_override is None:
        water = water if water is not None else load_water_type(cfg.water)
        response = response if response is not None else load_camera_response()
        return effective_coefficients(water, response, cfg.d, cfg.g, cfg.mu)

    beta = cfg.coefficient_override
    if cfg.backlight_override is not None:
        backlight = cfg.backlight_override
    else:
        if water is None and cfg.water is not None:
            water = load_water_type(cfg.water)
        if water is None:
            raise ConfigError(
                "coefficient_override without backlight_override needs a water type "
                "to derive the veil")
        response = response if response is not None else load_camera_response()
        spectral = effective_coefficients(water, response, cfg.d, 1.0, 1.0)
        # Veil source b*E collapses to backlight_ref * beta_d; rescaling by the
        # override attenuation keeps the source term while swapping beta.
        backlight = np.clip(spectral.backlight_ref * spectral.beta_d / beta, 0.0, 1.0)
    return ChannelCoefficients(
        beta_d=beta, beta_b=beta.copy(), g_d=beta.copy(), g_b=beta.copy(),
        backlight_ref=backlight, backlight_prop=backlight.copy(),
        scatter=np.zeros(3))


def _prepare_depth(scene: ScenePair, cfg: DegradationConfig) -> np.ndarray:
    rel = scene.depth
    if cfg.scaling is None:
        return rel
    if cfg.invert_depth:
        rel = -rel
    return scale_depth(rel, cfg.scaling)


def _field_seed(cfg: DegradationConfig) -> int:
    if cfg.field is not None and cfg.field.seed is not None:
        return cfg.field.seed
    return cfg.seed


def _modulated_depth(z: np.ndarray, cfg: DegradationConfig) -> np.ndarray:
    if cfg.mode != "proposed" or cfg.field is None:
        return z
    fcfg = replace(cfg.field, seed=_field_seed(cfg))
    grf = generate_grf(z.shape[0], z.shape[1], fcfg)
    out = modulate_depth(z, grf)
    if cfg.scaling is not None:
        # modulation happens after metric scaling, so values may exceed z_max
        # by at most the field's upper bound
        assert out.max() <= cfg.scaling.z_max * cfg.field.hi * (1 + 1e-12)
    return out


def compute_terms(scene: ScenePair, cfg: DegradationConfig,
                  response: CameraResponse | None = None,
                  water: WaterType | None = None) -> TermStack:
    """Evaluate D, F, B in linear light for one scene and config."""
    coeffs = build_coefficients(cfg, response=response, water=water)
    linear = aio.srgb_to_linear(scene.radiance)
    z = _modulated_depth(_prepare_depth(scene, cfg), cfg)
    lin_scene = ScenePair(linear, z)

    direct, _ = direct_transmission(lin_scene, coeffs.beta_d)
    if cfg.mode == "proposed":
        phi = cfg.phi_factor * float(np.mean(coeffs.scatter))
        forward = forward_scatter(lin_scene, coeffs.g_d, coeffs.beta_d, phi,
                                  cfg.blur_pixel_scale)
    else:
        forward = np.zeros_like(direct)
    back = backscatter(z, coeffs.backlight(cfg.mode),
                       coeffs.backscatter_attenuation(cfg.mode))

    for name, term in (("direct", direct), ("forward", forward), ("backscatter", back)):
        if not np.all(np.isfinite(term)):
            raise NumericalFaultError(f"non-finite values in the {name} term")
    return TermStack(direct=direct, forward=forward, backscatter=back)


def synthesize(scene: ScenePair, cfg: DegradationConfig,
               response: CameraResponse | None = None,
               water: WaterType | None = None) -> np.ndarray:
    """Degrade one scene; returns the gamma-encoded H x W x 3 image in [0, 1].

    Deterministic for a fixed (scene, config, seed). Terms are summed in
    linear light and clamped only after summation.
    """
    stack = compute_terms(scene, cfg, response=response, water=water)
    total = stack.total()
    if not np.all(np.isfinite(total)):
        raise NumericalFaultError("non-finite values in the composite image")
    return aio.linear_to_srgb(np.clip(total, 0.0, 1.0))


def synthesize_pair(scene: ScenePair, cfg: DegradationConfig,
                    response: CameraResponse | None = None,
                    water: WaterType | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Run both modes on one scene with shared depth scaling and seed.

    Returns (reference image, proposed image).
    """
    ref = synthesize(scene, replace(cfg, mode="reference"),
                     response=response, water=water)
    prop = synthesize(scene, replace(cfg, mode="proposed"),
                      response=response, water=water)
    return ref, prop


def term_report(scene: ScenePair, cfg: DegradationConfig,
                response: CameraResponse | None = None,
                water: WaterType | None = None) -> tuple[TermStack, dict]:
    """Return the separated terms plus per-term mean/max summary statistics."""
    stack = compute_terms(scene, cfg, response=response, water=water)
    stats = {
        name: {"mean": float(term.mean()), "max": float(term.max())}
        for name, term in (("direct", stack.direct),
                           ("forward", stack.forward),
                           ("backscatter", stack.backscatter))
    }
    return stack, stats
