"""Batch dataset generation: config parsing, job expansion, manifest emission.

A JSON config names an input directory of images (with sibling depth maps),
an output directory, water types, modes, and model parameters. Every
(image, water type, mode) cell is synthesized independently; a manifest
records enough to reproduce each output byte-exactly.

Depth siblings: ``<stem>.pfm`` or ``<stem>.depth.png`` (16-bit grayscale)
next to ``<stem>.png`` / ``<stem>.jpg``.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from . import io as aio
from .depth import load_depth
from .errors import AquasynthError, ConfigError
from .optics import ScenePair
from .pipeline import (
    MODES,
    DegradationConfig,
    synthesize,
    synthesize_pair,
    term_report,
)
from .spectra import JERLOV_NAMES, load_camera_response, load_water_type

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")
SURVEY_WATER_TYPES = ["IA", "IB", "II", "III", "1C", "3C", "5C", "7C", "9C"]

DEFAULT_PARAMS = {
    "g": 0.2,
    "mu": 0.3,
    "phi_factor": 0.3,
    "blur_pixel_scale": 1.0,
    "d": 1.0,
    "z_min": 1.0,
    "z_max": 5.0,
    "gamma": 1.0,
    "invert_depth": False,
    "field": {"exponent": 3.0, "lo": 0.7, "hi": 1.3, "enabled": True},
}

PAIR_GUTTER_PX = 12


# ---------------------------------------------------------------------------
# config loading
# ---------------------------------------------------------------------------

def _expect(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise ConfigError(f"{path}: {message}")


def load_config(source) -> dict:
    """Load and validate a batch config; returns the resolved dict.

    `source` is a path to a JSON file or an already-parsed mapping.
    Violations raise ConfigError with the offending key path.
    """
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})") from exc
    else:
        raw = dict(source)
    _expect(isinstance(raw, dict), "config", "top level must be an object")

    known = {"input", "output", "water_types", "modes", "params", "seed"}
    unknown = set(raw) - known
    _expect(not unknown, "config", f"unknown keys {sorted(unknown)}")
    _expect("input" in raw, "input", "required")
    _expect("output" in raw, "output", "required")
    _expect(isinstance(raw["input"], str), "input", "must be a directory path string")
    _expect(isinstance(raw["output"], str), "output", "must be a directory path string")

    water_types = raw.get("water_types", SURVEY_WATER_TYPES)
    _expect(isinstance(water_types, list) and water_types, "water_types",
            "must be a non-empty list")
    for i, name in enumerate(water_types):
        _expect(name in JERLOV_NAMES, f"water_types[{i}]",
                f"unknown water type {name!r}, expected one of {JERLOV_NAMES}")

    modes = raw.get("modes", list(MODES))
    _expect(isinstance(modes, list) and modes, "modes", "must be a non-empty list")
    for i, mode in enumerate(modes):
        _expect(mode in MODES, f"modes[{i}]", f"unknown mode {mode!r}")

    seed = raw.get("seed", 0)
    _expect(isinstance(seed, int) and not isinstance(seed, bool)
            and 0 <= seed < 2 ** 64, "seed", "must be an unsigned 64-bit integer")

    params = dict(DEFAULT_PARAMS)
    params["field"] = dict(DEFAULT_PARAMS["field"])
    user_params = raw.get("params", {})
    _expect(isinstance(user_params, dict), "params", "must be an object")
    for key, value in user_params.items():
        if key == "field":
            _expect(isinstance(value, dict) or value is None, "params.field",
                    "must be an object or null")
            if value is None:
                params["field"] = {"enabled": False}
            else:
                unknown = set(value) - {"exponent", "lo", "hi", "enabled", "seed"}
                _expect(not unknown, "params.field", f"unknown keys {sorted(unknown)}")
                params["field"].update(value)
        elif key in DEFAULT_PARAMS or key in ("coefficient_override",):
            params[key] = value
        else:
            raise ConfigError(f"params.{key}: unknown parameter")

    # Surface per-job validation problems now, for every requested mode.
    try:
        for mode in modes:
            _job_config(params, water_types[0], mode, seed)
    except ConfigError as exc:
        raise ConfigError(f"params: {exc}") from exc

    return {
        "input": raw["input"],
        "output": raw["output"],
        "water_types": list(water_types),
        "modes": list(modes),
        "params": params,
        "seed": seed,
    }


def _job_config(params: dict, water: str, mode: str, field_seed: int) -> DegradationConfig:
    mapping = {k: v for k, v in params.items() if k != "field"}
    field = params.get("field")
    if field is not None and field.get("enabled", True):
        mapping["field"] = {k: v for k, v in field.items() if k != "enabled"}
        mapping["field"]["seed"] = field_seed
    mapping.update(water=water, mode=mode, seed=field_seed)
    return DegradationConfig.from_mapping(mapping)


def config_hash(resolved: dict) -> str:
    blob = json.dumps(resolved, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


# ---------------------------------------------------------------------------
# input discovery
# ---------------------------------------------------------------------------

@dataclass
class SceneFiles:
    stem: str
    image: Path
    depth: Path
    index: int


def discover_scenes(input_dir) -> list[SceneFiles]:
    """Find (image, depth) pairs; missing depth maps abort with the stems listed."""
    input_dir = Path(input_dir)
    if not input_dir.is_dir():
        raise ConfigError(f"input: directory {input_dir} does not exist")
    images = sorted(p for p in input_dir.iterdir()
                    if p.suffix.lower() in IMAGE_SUFFIXES
                    and not p.name.lower().endswith(".depth.png"))
    if not images:
        raise ConfigError(f"input: no images found in {input_dir}")
    scenes = []
    missing = []
    for idx, image in enumerate(images):
        pfm = image.with_suffix(".pfm")
        png16 = image.with_name(image.stem + ".depth.png")
        if pfm.exists():
            depth = pfm
        elif png16.exists():
            depth = png16
        else:
            missing.append(image.stem)
            continue
        scenes.append(SceneFiles(stem=image.stem, image=image, depth=depth, index=idx))
    if missing:
        raise ConfigError(f"input: missing depth maps for stems {missing}")
    return scenes


def _scene_seed(dataset_seed: int, image_index: int) -> int:
    return int(np.random.SeedSequence((dataset_seed, image_index))
               .generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# batch execution
# ---------------------------------------------------------------------------

def _entry_params(cfg: DegradationConfig) -> dict:
    params = {
        "g": cfg.g, "mu": cfg.mu, "phi_factor": cfg.phi_factor,
        "blur_pixel_scale": cfg.blur_pixel_scale, "d": cfg.d,
        "invert_depth": cfg.invert_depth,
    }
    if cfg.scaling is not None:
        params.update(z_min=cfg.scaling.z_min, z_max=cfg.scaling.z_max,
                      gamma=cfg.scaling.gamma)
    if cfg.field is not None:
        params["field"] = {"exponent": cfg.field.exponent, "lo": cfg.field.lo,
                           "hi": cfg.field.hi, "seed": cfg.field.seed}
    else:
        params["field"] = None
    if cfg.coefficient_override is not None:
        params["coefficient_override"] = list(map(float, cfg.coefficient_override))
    return params


def run_batch(config, jobs: int = 1, dry_run: bool = False,
              emit_terms: bool = False, progress=None) -> dict:
    """Synthesize every (image, water type, mode) cell; returns the manifest.

    Outputs land under ``<output>/<water>/<mode>/<stem>.png``. In dry-run
    mode the config and inputs are validated and the plan returned with zero
    writes. `progress`, when given, is called as progress(done, total, entry)
    after each cell.
    """
    resolved = load_config(config)
    scenes = discover_scenes(resolved["input"])
    out_root = Path(resolved["output"])

    response = load_camera_response()
    waters = {name: load_water_type(name) for name in resolved["water_types"]}

    cells = []
    for scene in scenes:
        for water in resolved["water_types"]:
            for mode in resolved["modes"]:
                cells.append((scene, water, mode))

    manifest = {
        "tool": "aquasynth",
        "version": __version__,
        "kind": "batch",
        "seed": resolved["seed"],
        "config_hash": config_hash(resolved),
        "config_resolved": resolved,
        "entries": [],
        "failures": 0,
    }

    if dry_run:
        for scene, water, mode in cells:
            cfg = _job_config(resolved["params"], water, mode,
                              _scene_seed(resolved["seed"], scene.index))
            manifest["entries"].append({
                "output": str(Path(water) / mode / f"{scene.stem}.png"),
                "image": str(scene.image), "depth": str(scene.depth),
                "water": water, "mode": mode, "seed": cfg.seed,
                "params": _entry_params(cfg), "ok": True, "planned": True,
            })
        return manifest

    loaded = {s.stem: ScenePair(aio.load_image(s.image),
                                load_depth(s.depth))
              for s in scenes}

    def run_cell(cell):
        scene, water, mode = cell
        rel_out = Path(water) / mode / f"{scene.stem}.png"
        cfg = _job_config(resolved["params"], water, mode,
                          _scene_seed(resolved["seed"], scene.index))
        entry = {
            "output": str(rel_out), "image": str(scene.image),
            "depth": str(scene.depth), "water": water, "mode": mode,
            "seed": cfg.seed, "params": _entry_params(cfg), "ok": True,
        }
        try:
            image = synthesize(loaded[scene.stem], cfg,
                               response=response, water=waters[water])
            out_path = out_root / rel_out
            out_path.parent.mkdir(parents=True, exist_ok=True)
            aio.save_image(out_path, image)
            if emit_terms:
                stack, _ = term_report(loaded[scene.stem], cfg,
                                       response=response, water=waters[water])
                written = aio.emit_term_grid(
                    stack, out_path.with_name(f"{scene.stem}_terms.png"))
                entry["terms"] = str(written.relative_to(out_root))
        except (AquasynthError, OSError) as exc:
            entry["ok"] = False
            entry["error"] = f"{type(exc).__name__}: {exc}"
        return entry

    entries = _execute(run_cell, cells, jobs, progress)
    manifest["entries"] = entries
    manifest["failures"] = sum(1 for e in entries if not e["ok"])
    out_root.mkdir(parents=True, exist_ok=True)
    _write_manifest(out_root / "manifest.json", manifest)
    return manifest


def _execute(run_cell, cells, jobs: int, progress) -> list[dict]:
    entries = []
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        for entry in pool.map(run_cell, cells):
            entries.append(entry)
            if progress is not None:
                progress(len(entries), len(cells), entry)
    entries.sort(key=lambda e: e["output"])
    return entries


def run_pairs(config, jobs: int = 1, dry_run: bool = False, progress=None) -> dict:
    """Emit side-by-side reference/proposed pairs with a seeded answer key.

    Every (image, water type) cell becomes one composite; left/right order
    is a seeded balanced shuffle recorded in the manifest.
    """
    resolved = load_config(config)
    scenes = discover_scenes(resolved["input"])
    out_root = Path(resolved["output"])

    response = load_camera_response()
    waters = {name: load_water_type(name) for name in resolved["water_types"]}

    cells = [(scene, water) for scene in scenes for water in resolved["water_types"]]

    # Balanced assignment: half "proposed on the left", half mirrored, then a
    # seeded shuffle. Counts differ by at most 1 for odd batches.
    sides = ["proposed" if i % 2 == 0 else "reference" for i in range(len(cells))]
    rng = np.random.default_rng(np.random.SeedSequence((resolved["seed"], 0x5EED)))
    rng.shuffle(sides)

    manifest = {
        "tool": "aquasynth",
        "version": __version__,
        "kind": "pairs",
        "seed": resolved["seed"],
        "config_hash": config_hash(resolved),
        "config_resolved": resolved,
        "entries": [],
        "failures": 0,
    }

    if dry_run:
        for (scene, water), left in zip(cells, sides):
            manifest["entries"].append({
                "output": str(Path("pairs") / water / f"{scene.stem}.png"),
                "image": str(scene.image), "water": water,
                "left": left,
                "right": "reference" if left == "proposed" else "proposed",
                "ok": True, "planned": True,
            })
        return manifest

    loaded = {s.stem: ScenePair(aio.load_image(s.image), load_depth(s.depth))
              for s in scenes}

    def run_cell(args):
        (scene, water), left = args
        rel_out = Path("pairs") / water / f"{scene.stem}.png"
        cfg = _job_config(resolved["params"], water, "proposed",
                          _scene_seed(resolved["seed"], scene.index))
        entry = {
            "output": str(rel_out), "image": str(scene.image),
            "depth": str(scene.depth), "water": water, "seed": cfg.seed,
            "left": left, "right": "reference" if left == "proposed" else "proposed",
            "params": _entry_params(cfg), "ok": True,
        }
        try:
            ref, prop = synthesize_pair(loaded[scene.stem], cfg,
                                        response=response, water=waters[water])
            first, second = (prop, ref) if left == "proposed" else (ref, prop)
            gutter = np.ones((first.shape[0], PAIR_GUTTER_PX, 3))
            composite = np.concatenate([first, gutter, second], axis=1)
            out_path = out_root / rel_out
            out_path.parent.mkdir(parents=True, exist_ok=True)
            aio.save_image(out_path, composite)
        except (AquasynthError, OSError) as exc:
            entry["ok"] = False
            entry["error"] = f"{type(exc).__name__}: {exc}"
        return entry

    entries = _execute(run_cell, list(zip(cells, sides)), jobs, progress)
    manifest["entries"] = entries
    manifest["failures"] = sum(1 for e in entries if not e["ok"])
    out_root.mkdir(parents=True, exist_ok=True)
    _write_manifest(out_root / "manifest.json", manifest)
    return manifest


def _write_manifest(path: Path, manifest: dict) -> None:
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="aquasynth",
        description="Generate synthetic turbid-water imagery from images + depth maps.")
    parser.add_argument("--config", required=True, help="JSON batch config path")
    parser.add_argument("--jobs", type=int, default=1, help="parallel job cap")
    parser.add_argument("--dry-run", action="store_true",
                        help="expand and validate only; writes nothing")
    parser.add_argument("--emit-terms", action="store_true",
                        help="also write D/F/B term grids per output")
    parser.add_argument("--pairs", action="store_true",
                        help="emit randomized reference/proposed pairs instead")
    args = parser.parse_args(argv)

    def progress(done, total, entry):
        status = "ok" if entry["ok"] else f"FAILED ({entry['error']})"
        print(f"[{done}/{total}] {entry['output']}: {status}")

    try:
        if args.pairs:
            manifest = run_pairs(args.config, jobs=args.jobs,
                                 dry_run=args.dry_run, progress=progress)
        else:
            manifest = run_batch(args.config, jobs=args.jobs, dry_run=args.dry_run,
                                 emit_terms=args.emit_terms, progress=progress)
    except AquasynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    n = len(manifest["entries"])
    if args.dry_run:
        print(f"dry run: {n} outputs planned, nothing written")
        return 0
    failures = manifest["failures"]
    print(f"{n - failures}/{n} outputs written to {manifest['config_resolved']['output']}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
