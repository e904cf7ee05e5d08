"""Thin in-process bindings for ML data-augmentation pipelines.

Exposes the degradation engine as three array-in/array-out callables with
no physics of its own: configs are plain mappings validated by the core (the
schema lives in exactly one place), images exchange as numpy arrays without
copies when the dtype already matches, and core exceptions propagate
untouched. Heavy array work happens inside numpy/scipy kernels, which drop
the interpreter lock, so concurrent host threads can overlap calls.

The uint8-in/uint8-out convention matches file-based use: uint8 inputs are
decoded from full scale and results re-quantized with the same round-half-up
rule the CLI applies when writing PNGs.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

from aquasynth import __version__ as _core_version
from aquasynth.cli import run_batch
from aquasynth.errors import DomainError
from aquasynth.io import quantize_u8
from aquasynth.optics import ScenePair
from aquasynth.pipeline import DegradationConfig
from aquasynth.pipeline import synthesize as _synthesize
from aquasynth.pipeline import synthesize_pair as _synthesize_pair

__version__ = _core_version

__all__ = ["synthesize", "synthesize_pair", "batch", "__version__"]


def _as_scene(image: np.ndarray, depth: np.ndarray) -> tuple[ScenePair, bool]:
    img = np.asarray(image)
    if img.dtype == np.uint8:
        scene_img = img.astype(np.float64) / 255.0
        was_uint8 = True
    elif np.issubdtype(img.dtype, np.floating):
        scene_img = np.asarray(img, dtype=np.float64)
        was_uint8 = False
    else:
        raise DomainError(f"image dtype must be uint8 or float, got {img.dtype}")
    z = np.asarray(depth)
    if not np.issubdtype(z.dtype, np.floating) and not np.issubdtype(z.dtype, np.integer):
        raise DomainError(f"depth dtype must be numeric, got {z.dtype}")
    return ScenePair(scene_img, np.asarray(z, dtype=np.float64)), was_uint8


def _encode_like_input(result: np.ndarray, was_uint8: bool) -> np.ndarray:
    return quantize_u8(result) if was_uint8 else result


def synthesize(image: np.ndarray, depth: np.ndarray,
               config: Mapping) -> np.ndarray:
    """Degrade one image; mirrors the CLI pixel-for-pixel on equal configs.

    `image` is H x W x 3 float in [0, 1] or uint8; `depth` is H x W. The
    config mapping takes the same keys as the batch file's per-job
    parameters (water, mode, d, z_min/z_max/gamma, g, mu, phi_factor,
    field, seed, ...). Output dtype follows the input.
    """
    scene, was_uint8 = _as_scene(image, depth)
    cfg = DegradationConfig.from_mapping(config)
    return _encode_like_input(_synthesize(scene, cfg), was_uint8)


def synthesize_pair(image: np.ndarray, depth: np.ndarray,
                    config: Mapping) -> tuple[np.ndarray, np.ndarray]:
    """Run both model modes on one scene; returns (reference, proposed)."""
    scene, was_uint8 = _as_scene(image, depth)
    cfg = DegradationConfig.from_mapping(config)
    ref, prop = _synthesize_pair(scene, cfg)
    return _encode_like_input(ref, was_uint8), _encode_like_input(prop, was_uint8)


def batch(config, jobs: int = 1, dry_run: bool = False) -> dict:
    """Run a whole batch config (mapping or path); returns the manifest."""
    return run_batch(config, jobs=jobs, dry_run=dry_run)
