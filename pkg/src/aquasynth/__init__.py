"""Physically based underwater image degradation engine.

Turns clean images plus depth maps into synthetic turbid-water imagery:
direct transmission, small-angle forward scattering, and backscatter are
evaluated per channel from Jerlov-class spectral coefficients collapsed
through a camera response, with optional Gaussian-random-field medium
inhomogeneity.
"""

__version__ = "0.1.0"

from .depth import DepthScaling, load_depth, scale_depth
from .errors import (
    AquasynthError,
    ConfigError,
    CsvFormatError,
    DecodeError,
    DegenerateDepthError,
    DegenerateResponseError,
    DimensionError,
    DomainError,
    NumericalFaultError,
    ParametrizationError,
    SpectralRangeError,
)
from .field import FieldConfig, generate_grf, modulate_depth
from .optics import (
    ScenePair,
    TermStack,
    backscatter,
    direct_transmission,
    forward_scatter,
    forward_weight,
    variable_blur,
)
from .pipeline import (
    DegradationConfig,
    build_coefficients,
    synthesize,
    synthesize_pair,
    term_report,
)
from .spectra import (
    JERLOV_NAMES,
    WORKING_GRID_NM,
    CameraResponse,
    ChannelCoefficients,
    SpectralCurve,
    WaterType,
    ambient_light,
    channel_coefficient,
    effective_coefficients,
    load_camera_response,
    load_illuminant,
    load_water_type,
    resample,
)

__all__ = [
    "__version__",
    "AquasynthError", "ConfigError", "CsvFormatError", "DecodeError",
    "DegenerateDepthError", "DegenerateResponseError", "DimensionError",
    "DomainError", "NumericalFaultError", "ParametrizationError",
    "SpectralRangeError",
    "SpectralCurve", "WaterType", "CameraResponse", "ChannelCoefficients",
    "JERLOV_NAMES", "WORKING_GRID_NM",
    "resample", "ambient_light", "channel_coefficient", "effective_coefficients",
    "load_water_type", "load_camera_response", "load_illuminant",
    "ScenePair", "TermStack", "direct_transmission", "backscatter",
    "forward_weight", "forward_scatter", "variable_blur",
    "FieldConfig", "generate_grf", "modulate_depth",
    "DepthScaling", "scale_depth", "load_depth",
    "DegradationConfig", "build_coefficients", "synthesize",
    "synthesize_pair", "term_report",
]
