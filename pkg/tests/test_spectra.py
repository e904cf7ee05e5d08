import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aquasynth.errors import (
    DegenerateResponseError,
    DomainError,
    SpectralRangeError,
)
from aquasynth.spectra import (
    JERLOV_NAMES,
    WORKING_GRID_NM,
    CameraResponse,
    SpectralCurve,
    ambient_light,
    channel_coefficient,
    effective_coefficients,
    flat_curve,
    load_water_type,
    resample,
    sample_values,
    value_at,
)

from oracles import collapse_channels, interp_to


def make_response(grid):
    """Synthetic smooth response on the given grid."""
    r = np.exp(-((grid - 600.0) ** 2) / (2 * 40.0 ** 2))
    g = np.exp(-((grid - 530.0) ** 2) / (2 * 45.0 ** 2))
    b = np.exp(-((grid - 465.0) ** 2) / (2 * 35.0 ** 2))
    return CameraResponse(SpectralCurve(grid, r), SpectralCurve(grid, g),
                          SpectralCurve(grid, b))


class TestSpectralCurve:
    def test_requires_ascending_wavelengths(self):
        with pytest.raises(DomainError):
            SpectralCurve([500.0, 400.0], [1.0, 1.0])

    def test_requires_two_samples(self):
        with pytest.raises(DomainError):
            SpectralCurve([500.0], [1.0])

    def test_rejects_negative_values(self):
        with pytest.raises(DomainError):
            SpectralCurve([400.0, 500.0], [1.0, -0.1])

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            SpectralCurve([400.0, 500.0], [1.0, np.nan])


class TestResample:
    def test_constant_curve_single_point(self):
        curve = SpectralCurve([400.0, 700.0], [1.0, 1.0])
        assert sample_values(curve, [550.0]) == pytest.approx([1.0])
        assert value_at(curve, 550.0) == 1.0

    def test_linear_midweight(self):
        curve = SpectralCurve([400.0, 700.0], [0.0, 3.0])
        assert value_at(curve, 500.0) == pytest.approx(1.0)

    def test_outside_support_is_error(self):
        curve = SpectralCurve([400.0, 700.0], [1.0, 1.0])
        with pytest.raises(SpectralRangeError):
            resample(curve, [390.0, 500.0])
        with pytest.raises(SpectralRangeError):
            value_at(curve, 701.0)

    def test_length_matches_grid(self):
        curve = SpectralCurve([400.0, 550.0, 700.0], [1.0, 2.0, 0.5])
        out = resample(curve, np.linspace(420, 680, 27))
        assert out.values.shape == (27,)

    def test_jerlov_10nm_matches_fine_interpolation_oracle(self):
        water = load_water_type("I")
        raw_grid = np.arange(400.0, 700.1, 5.0)
        # reconstruct the native curve from the bundled CSV
        from aquasynth import io as aio
        from aquasynth.spectra import _data_dir
        grid, a, _, _ = aio.read_water_csv(_data_dir() / "jerlov_I.csv")
        fine = np.arange(400.0, 700.1, 1.0)
        oracle_fine = interp_to(grid, a, fine)
        oracle_at_working = interp_to(fine, oracle_fine, WORKING_GRID_NM)
        np.testing.assert_allclose(water.absorption.values, oracle_at_working,
                                   atol=1e-9)
        assert raw_grid.shape == grid.shape


class TestAmbientLight:
    def test_zero_depth_identity(self):
        grid = np.array([400.0, 550.0, 700.0])
        e0 = SpectralCurve(grid, [1.0, 0.8, 0.6])
        kd = SpectralCurve(grid, [0.1, 0.2, 0.3])
        out = ambient_light(e0, kd, 0.0)
        np.testing.assert_array_equal(out.values, e0.values)

    def test_transparent_medium(self):
        grid = np.array([400.0, 550.0, 700.0])
        e0 = SpectralCurve(grid, [1.0, 0.8, 0.6])
        kd = SpectralCurve(grid, [0.0, 0.0, 0.0])
        out = ambient_light(e0, kd, 25.0)
        np.testing.assert_array_equal(out.values, e0.values)

    def test_scalar_exponential(self):
        grid = np.array([400.0, 550.0, 700.0])
        e0 = flat_curve(grid)
        kd = SpectralCurve(grid, [0.07, 0.07, 0.07])
        out = ambient_light(e0, kd, 1.0)
        # frozen scalar oracle: exp(-0.07 * 1)
        assert value_at(out, 550.0) == pytest.approx(0.9323938199059483, abs=1e-12)

    def test_negative_depth_is_error(self):
        grid = np.array([400.0, 700.0])
        with pytest.raises(DomainError):
            ambient_light(flat_curve(grid), flat_curve(grid, 0.1), -0.5)


class TestChannelCoefficient:
    def test_constant_curve_returns_constant(self):
        grid = WORKING_GRID_NM
        resp = make_response(grid)
        curve = flat_curve(grid, 0.73)
        out = channel_coefficient(curve, resp, flat_curve(grid))
        np.testing.assert_allclose(out, 0.73, rtol=1e-12)

    def test_delta_response_picks_curve_value(self):
        grid = WORKING_GRID_NM
        spike = np.zeros_like(grid)
        spike[10] = 1.0  # 500 nm
        resp = CameraResponse(*(SpectralCurve(grid, spike) for _ in range(3)))
        curve = SpectralCurve(grid, np.linspace(1.0, 4.0, grid.size))
        out = channel_coefficient(curve, resp, flat_curve(grid))
        expected = curve.values[10]
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    def test_brute_force_oracle_3c(self, water_3c, response):
        """D90 response, 3C beta, weight E(1m): fine-grid trapezoid oracle."""
        d = 1.0
        fine = np.linspace(400.0, 700.0, 301)
        beta = resample(water_3c.beam_attenuation(), fine)
        kd = resample(water_3c.diffuse_downwelling, fine)
        weight = ambient_light(flat_curve(fine), kd, d)
        resp = CameraResponse(resample(response.red, fine),
                              resample(response.green, fine),
                              resample(response.blue, fine))
        got = channel_coefficient(beta, resp, weight)

        wg = WORKING_GRID_NM
        fine_oracle = np.linspace(400.0, 700.0, 301)
        # E(d) evaluates the exponential on the fine grid from interpolated K_d
        kd_fine = interp_to(wg, water_3c.diffuse_downwelling.values, fine_oracle)
        expected = collapse_channels(
            wg, water_3c.beam_attenuation().values,
            wg, [response.red.values, response.green.values, response.blue.values],
            fine_oracle, np.exp(-kd_fine * d))
        np.testing.assert_allclose(got, expected, rtol=1e-6)
        # frozen oracle output (regenerate data -> update)
        np.testing.assert_allclose(
            expected, [0.99109588, 0.99593125, 1.1640797], rtol=1e-6)

    def test_zero_normalization_is_error(self):
        grid = WORKING_GRID_NM
        resp = make_response(grid)
        with pytest.raises(DegenerateResponseError):
            channel_coefficient(flat_curve(grid), resp, flat_curve(grid, 0.0))

    @given(lo=st.floats(0.01, 2.0), spread=st.floats(0.01, 3.0),
           seed=st.integers(0, 2 ** 16))
    @settings(max_examples=60, deadline=None)
    def test_weighted_mean_containment(self, lo, spread, seed):
        grid = WORKING_GRID_NM
        local = np.random.default_rng(seed)
        values = local.uniform(lo, lo + spread, grid.size)
        curve = SpectralCurve(grid, values)
        out = channel_coefficient(curve, make_response(grid), flat_curve(grid))
        assert np.all(out >= values.min() - 1e-12)
        assert np.all(out <= values.max() + 1e-12)


class TestEffectiveCoefficients:
    def test_g_one_collapses_to_beta(self, water_3c, response):
        coeffs = effective_coefficients(water_3c, response, d=1.0, g=1.0, mu=0.5)
        np.testing.assert_allclose(coeffs.g_d, coeffs.beta_d, atol=1e-12)

    def test_mode_degenerate_backlights_match(self, water_3c, response):
        coeffs = effective_coefficients(water_3c, response, d=1.0, g=1.0, mu=1.0)
        np.testing.assert_array_equal(coeffs.backlight_prop, coeffs.backlight_ref)

    def test_9c_end_to_end_oracle(self, water_9c, response):
        """All coefficient vectors vs an independent pointwise spectral pipeline."""
        d, g, mu = 1.0, 0.2, 0.3
        coeffs = effective_coefficients(water_9c, response, d, g, mu)

        wg = WORKING_GRID_NM
        fine = np.linspace(400.0, 700.0, 301)
        a = interp_to(wg, water_9c.absorption.values, fine)
        b = interp_to(wg, water_9c.scattering.values, fine)
        kd = interp_to(wg, water_9c.diffuse_downwelling.values, fine)
        e0 = np.ones_like(fine)
        ed = e0 * np.exp(-kd * d)
        beta, fwd = a + b, a + g * b
        chans = [interp_to(wg, c.values, fine)
                 for c in (response.red, response.green, response.blue)]

        from oracles import trapezoid

        def coll(curve):
            return np.array([trapezoid(s * ed * curve, fine)
                             / trapezoid(s * ed, fine) for s in chans])

        def rad(spec):
            return np.array([trapezoid(s * spec, fine)
                             / trapezoid(s * e0, fine) for s in chans])

        np.testing.assert_allclose(coeffs.beta_d, coll(beta), rtol=1e-9)
        np.testing.assert_allclose(coeffs.beta_b, coll(beta), rtol=1e-9)
        np.testing.assert_allclose(coeffs.g_d, coll(fwd), rtol=1e-9)
        np.testing.assert_allclose(coeffs.g_b, coll(fwd), rtol=1e-9)
        np.testing.assert_allclose(coeffs.scatter, coll(b), rtol=1e-9)
        np.testing.assert_allclose(coeffs.backlight_ref,
                                   np.clip(rad(b * ed / beta), 0, 1), rtol=1e-9)
        np.testing.assert_allclose(coeffs.backlight_prop,
                                   np.clip(rad(mu * b * ed / fwd), 0, 1), rtol=1e-9)
        # frozen oracle values (d=1, g=0.2, mu=0.3)
        np.testing.assert_allclose(
            coeffs.beta_d, [2.59667813, 2.81164596, 3.39482516], rtol=1e-6)
        np.testing.assert_allclose(
            coeffs.backlight_prop, [0.44401228, 0.39749142, 0.18196654], rtol=1e-6)

    def test_jerlov_attenuation_ordering(self, response):
        """Coastal types attenuate more; strict per-channel ordering."""
        betas = [effective_coefficients(load_water_type(name), response,
                                        1.0, 0.2, 0.3).beta_d
                 for name in JERLOV_NAMES]
        for weaker, stronger in zip(betas[:-1], betas[1:]):
            assert np.all(stronger > weaker)

    def test_g_monotonicity(self, water_3c, response):
        gs = [0.1, 0.3, 0.5, 0.8, 1.0]
        g_ds = [effective_coefficients(water_3c, response, 1.0, g, 0.3).g_d
                for g in gs]
        for lo, hi in zip(g_ds[:-1], g_ds[1:]):
            assert np.all(hi > lo)

    def test_mu_monotonicity(self, water_3c, response):
        mus = [0.1, 0.3, 0.6, 1.0]
        bls = [effective_coefficients(water_3c, response, 1.0, 0.2, mu).backlight_prop
               for mu in mus]
        for lo, hi in zip(bls[:-1], bls[1:]):
            assert np.all(hi >= lo)

    def test_invalid_fractions(self, water_3c, response):
        with pytest.raises(DomainError):
            effective_coefficients(water_3c, response, 1.0, 0.0, 0.3)
        with pytest.raises(DomainError):
            effective_coefficients(water_3c, response, 1.0, 1.5, 0.3)
        with pytest.raises(DomainError):
            effective_coefficients(water_3c, response, 1.0, 0.2, 0.0)
        with pytest.raises(DomainError):
            effective_coefficients(water_3c, response, -1.0, 0.2, 0.3)


class TestWaterType:
    def test_beta_is_sum_of_a_and_b(self, water_3c):
        beta = water_3c.beam_attenuation()
        np.testing.assert_array_equal(
            beta.values, water_3c.absorption.values + water_3c.scattering.values)

    def test_all_types_load_on_working_grid(self):
        for name in JERLOV_NAMES:
            water = load_water_type(name)
            np.testing.assert_array_equal(water.grid, WORKING_GRID_NM)
            assert water.absorption.same_grid(water.diffuse_downwelling)

    def test_unknown_type_rejected(self):
        with pytest.raises(DomainError):
            load_water_type("4D")


def test_response_loads_and_is_positive(response):
    np.testing.assert_array_equal(response.grid, WORKING_GRID_NM)
    for _, channel in response.items():
        assert np.any(channel.values > 0)


def test_user_illuminant_shifts_collapse(tmp_path, water_3c, response):
    from aquasynth.spectra import load_illuminant

    path = tmp_path / "e0.csv"
    rows = ["wavelength_nm,value"]
    # red-heavy illuminant pulls the weighted means toward long wavelengths
    rows += [f"{lam:.1f},{0.1 + 0.9 * (lam - 400.0) / 300.0:.6f}"
             for lam in np.arange(400.0, 701.0, 10.0)]
    path.write_text("\n".join(rows) + "\n")
    e0 = load_illuminant(path)
    flat = effective_coefficients(water_3c, response, 1.0, 0.2, 0.3)
    tilted = effective_coefficients(water_3c, response, 1.0, 0.2, 0.3, e0=e0)
    assert not np.allclose(flat.beta_d, tilted.beta_d)


def test_data_dir_env_override(tmp_path, monkeypatch):
    import shutil
    from aquasynth.spectra import _data_dir

    src = _data_dir()
    shutil.copy(src / "jerlov_I.csv", tmp_path / "jerlov_I.csv")
    monkeypatch.setenv("AQUASYNTH_DATA_DIR", str(tmp_path))
    water = load_water_type("I")
    assert water.name == "I"
    with pytest.raises(FileNotFoundError):
        load_water_type("9C")
