#!/usr/bin/env python
"""Regenerate the bundled water-type and camera-response CSV tables.

The ten Jerlov-class tables (absorption a, scattering b, diffuse downwelling
attenuation K_d, all in 1/m, 400-700 nm at 5 nm) are built from standard
bio-optical parametrizations:

* pure-water absorption: Pope & Fry style tabulation, interpolated,
* pure-seawater scattering: power law ~ lambda^-4.32,
* chlorophyll absorption: Bricaud/Morel style a_ph(440) = 0.06 * Chl^0.65
  with a two-peak normalized pigment shape,
* CDOM and mineral absorption: exponentials in wavelength,
* particle scattering: Chl- and mineral-driven power laws,
* K_d: Kirk's relation K_d = sqrt(a^2 + 0.256 a b) / mu0, mu0 = 0.86.

Constituent concentrations grow strictly from clear oceanic type I to the
most turbid coastal type 9C, which makes a(lambda) and b(lambda) increase
strictly pointwise across the type ordering. The generator asserts that, plus
an upper bound on b/a used by the backlight saturation analysis.

Run from the repository root:

    python tools/generate_spectral_data.py
"""

from __future__ import annotations

import pathlib

import numpy as np

OUT_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "aquasynth" / "data"

GRID_NM = np.arange(400.0, 700.0 + 2.5, 5.0)

# Pure-water absorption (1/m), 400-700 nm at 10 nm.
WATER_ABS_NM = np.arange(400.0, 701.0, 10.0)
WATER_ABS = np.array([
    0.00663, 0.00473, 0.00454, 0.00495, 0.00635, 0.00922, 0.00979, 0.01060,
    0.01270, 0.01500, 0.02040, 0.03250, 0.04090, 0.04340, 0.04740, 0.05650,
    0.06190, 0.06950, 0.08960, 0.13510, 0.22240, 0.26440, 0.27550, 0.29160,
    0.31080, 0.34000, 0.41000, 0.43900, 0.46500, 0.51600, 0.62400,
])

# Per-type constituents: (chlorophyll mg/m^3, extra CDOM a_g(440) 1/m,
# suspended mineral g/m^3). Strictly increasing through the sequence so the
# derived a and b curves dominate pointwise in type order.
TYPE_PARAMS = {
    "I":   (0.03,  0.0005, 0.000),
    "IA":  (0.10,  0.0020, 0.002),
    "IB":  (0.30,  0.0060, 0.006),
    "II":  (0.90,  0.0200, 0.020),
    "III": (1.80,  0.0600, 0.070),
    "1C":  (2.20,  0.1000, 0.200),
    "3C":  (3.50,  0.1800, 0.450),
    "5C":  (5.50,  0.3000, 0.850),
    "7C":  (8.50,  0.5000, 1.500),
    "9C":  (13.0,  0.8000, 2.600),
}

MU0 = 0.86          # mean cosine of the refracted solar beam
KIRK_G = 0.256      # Kirk (1984) scattering contribution to K_d


def pigment_shape(lam):
    """Normalized phytoplankton absorption shape, peaks near 440 and 675 nm."""
    blue = np.exp(-((lam - 440.0) ** 2) / (2.0 * 32.0 ** 2))
    red = 0.38 * np.exp(-((lam - 675.0) ** 2) / (2.0 * 13.0 ** 2))
    shoulder = 0.12 * np.exp(-((lam - 490.0) ** 2) / (2.0 * 40.0 ** 2))
    return blue + red + shoulder


def absorption(lam, chl, cdom440, mineral):
    a_w = np.interp(lam, WATER_ABS_NM, WATER_ABS)
    a_ph = 0.06 * chl ** 0.65 * pigment_shape(lam)
    a_g = cdom440 * np.exp(-0.014 * (lam - 440.0))
    a_m = 0.042 * mineral * np.exp(-0.009 * (lam - 440.0))
    return a_w + a_ph + a_g + a_m


def scattering(lam, chl, mineral):
    b_w = 0.0031 * (500.0 / lam) ** 4.32
    b_ph = 0.30 * chl ** 0.62 * (550.0 / lam) ** 0.8
    b_m = 0.35 * mineral * (550.0 / lam) ** 0.8
    return b_w + b_ph + b_m


def kd(a, b):
    return np.sqrt(a ** 2 + KIRK_G * a * b) / MU0


def camera_response(lam):
    """Modeled DSLR RGB spectral response, peak-normalized to the green channel."""
    r = 0.78 * np.exp(-((lam - 598.0) ** 2) / (2.0 * 43.0 ** 2))
    r += 0.055 * np.exp(-((lam - 455.0) ** 2) / (2.0 * 22.0 ** 2))
    g = 1.00 * np.exp(-((lam - 532.0) ** 2) / (2.0 * 48.0 ** 2))
    b = 0.82 * np.exp(-((lam - 465.0) ** 2) / (2.0 * 33.0 ** 2))
    b += 0.030 * np.exp(-((lam - 560.0) ** 2) / (2.0 * 30.0 ** 2))
    return r, g, b


def main():
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    prev_a = prev_b = None
    for name, (chl, cdom, mineral) in TYPE_PARAMS.items():
        a = absorption(GRID_NM, chl, cdom, mineral)
        b = scattering(GRID_NM, chl, mineral)
        k = kd(a, b)
        if prev_a is not None:
            assert np.all(a > prev_a), f"absorption not pointwise increasing at {name}"
            assert np.all(b > prev_b), f"scattering not pointwise increasing at {name}"
        assert np.all(b / a < 10.0), f"b/a bound exceeded for {name}: {np.max(b / a):.2f}"
        prev_a, prev_b = a, b

        path = OUT_DIR / f"jerlov_{name}.csv"
        with path.open("w", encoding="utf-8") as fh:
            fh.write("wavelength_nm,a,b,kd\n")
            for row in zip(GRID_NM, a, b, k):
                fh.write("{:.1f},{:.6f},{:.6f},{:.6f}\n".format(*row))
        print(f"wrote {path} (a 550nm {np.interp(550, GRID_NM, a):.4f}, "
              f"b 550nm {np.interp(550, GRID_NM, b):.4f})")

    r, g, b = camera_response(GRID_NM)
    path = OUT_DIR / "nikon_d90.csv"
    with path.open("w", encoding="utf-8") as fh:
        fh.write("wavelength_nm,r,g,b\n")
        for row in zip(GRID_NM, r, g, b):
            fh.write("{:.1f},{:.6f},{:.6f},{:.6f}\n".format(*row))
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
