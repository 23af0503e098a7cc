import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

import config
from dsp.filters import (
    emphasize_beats,
    integrate_twice,
    magnitude,
    moving_mean,
    odd_window,
    remove_gravity,
    separate_bands,
)
from dsp.settings import PipelineConfig, load_pipeline_config
from errors import ConfigFileError, DataError, InsufficientDataError, ParameterError
from signal_model.scenario import PhysioScenario
from signal_model.synth import displacement_of
from signal_model.trace import AccelSample, AccelTrace

FS = 100.0


def _z_trace(az: np.ndarray) -> AccelTrace:
    zeros = np.zeros(az.size)
    return AccelTrace(0.0, FS, zeros, zeros, az)


def _amplitude(t: np.ndarray, x: np.ndarray, omega: float) -> float:
    """Least-squares sinusoid amplitude with an offset and a slope in the model."""
    design = np.column_stack([np.sin(omega * t), np.cos(omega * t), np.ones(t.size), t])
    coef, *_ = np.linalg.lstsq(design, x, rcond=None)
    return float(math.hypot(coef[0], coef[1]))


class MagnitudeTests(unittest.TestCase):
    def test_pythagorean(self):
        self.assertEqual(magnitude(AccelSample(0.0, 3.0, 4.0, 0.0)), 5.0)
        self.assertEqual(magnitude(AccelSample(0.0, 0.0, 0.0, 0.0)), 0.0)

    def test_rotation_invariant(self):
        self.assertAlmostEqual(magnitude(AccelSample(0.0, 1.0, 2.0, 2.0)), 3.0)
        self.assertAlmostEqual(magnitude(AccelSample(0.0, -2.0, 1.0, 2.0)), 3.0)

    def test_non_finite(self):
        with self.assertRaises(DataError):
            magnitude(AccelSample(0.0, math.nan, 0.0, 0.0))


class MovingMeanTests(unittest.TestCase):
    def test_linear_passes_through(self):
        x = 0.5 * np.arange(50.0) + 3.0
        np.testing.assert_allclose(moving_mean(x, 11), x, atol=1e-12)

    def test_odd_window(self):
        self.assertEqual(odd_window(2.0, 100.0), 201)
        self.assertEqual(odd_window(0.25, 100.0), 25)
        self.assertEqual(odd_window(0.001, 100.0), 1)


class RemoveGravityTests(unittest.TestCase):
    def setUp(self):
        self.cfg = PipelineConfig()

    def test_constant_gravity(self):
        dynamic = remove_gravity(_z_trace(np.full(600, config.STANDARD_GRAVITY)), self.cfg)
        np.testing.assert_allclose(dynamic, 0.0, atol=1e-12)

    def test_zero_trace(self):
        np.testing.assert_array_equal(remove_gravity(_z_trace(np.zeros(600)), self.cfg), np.zeros(600))

    def test_recovers_one_hertz_sinusoid(self):
        t = np.arange(2000) / FS
        wave = 0.5 * np.sin(2 * math.pi * t)
        dynamic = remove_gravity(_z_trace(config.STANDARD_GRAVITY + wave), self.cfg)
        interior = slice(100, -100)
        self.assertLess(np.max(np.abs(dynamic[interior] - wave[interior])), 0.05 * 0.5)

    def test_pulse_stronger_than_gravity_keeps_its_sign(self):
        t = np.arange(600) / FS
        g = config.STANDARD_GRAVITY
        pulse = np.where(np.abs(t - 3.0) < 0.05, -2 * g * np.cos(math.pi * (t - 3.0) / 0.1) ** 2, 0.0)
        dynamic = remove_gravity(_z_trace(g + pulse), self.cfg)
        expected = pulse - moving_mean(pulse, odd_window(self.cfg.gravity_window, FS))
        np.testing.assert_allclose(dynamic, expected, atol=1e-9)
        self.assertLess(dynamic[300], -1.5 * g)

    def test_accepts_sample_sequences(self):
        samples = [AccelSample(i / FS, 0.0, 0.0, 9.8) for i in range(300)]
        np.testing.assert_allclose(remove_gravity(samples, self.cfg), 0.0, atol=1e-12)

    def test_too_short(self):
        with self.assertRaises(InsufficientDataError):
            remove_gravity(_z_trace(np.full(150, 9.8)), self.cfg)


class IntegrateTwiceTests(unittest.TestCase):
    def test_constant_acceleration_from_rest(self):
        displacement = integrate_twice(np.full(101, 2.0), FS, drift_mode="none")
        self.assertAlmostEqual(displacement[-1], 1.0, delta=1e-3)

    def test_zero_acceleration(self):
        for mode in ("linear", "moving_mean", "none"):
            with self.subTest(mode=mode):
                np.testing.assert_array_equal(integrate_twice(np.zeros(500), FS, drift_mode=mode), np.zeros(500))

    def test_recovers_breathing_amplitude(self):
        amplitude, omega = 0.005, 2 * math.pi * 0.25
        t = np.arange(2000) / FS
        displacement = integrate_twice(-amplitude * omega**2 * np.sin(omega * t), FS, PipelineConfig())
        guard = int(PipelineConfig().integration_detrend_window * FS)
        recovered = _amplitude(t[guard:-guard], displacement[guard:-guard], omega)
        self.assertAlmostEqual(recovered, amplitude, delta=0.1 * amplitude)

    def test_matches_generator_displacement_shape(self):
        scenario = PhysioScenario(duration=20.0, c2=0.0, resp_rate=0.25, resp_amplitude=0.005, resp_phase=0.1)
        t = np.arange(2000) / FS
        truth = np.array([displacement_of(scenario, v) for v in t])
        omega = 2 * math.pi * 0.25
        accel = -0.005 * omega**2 * np.sin(omega * t + 2 * math.pi * 0.1)
        displacement = integrate_twice(accel, FS)
        corr = np.corrcoef(displacement[100:-100], truth[100:-100])[0, 1]
        self.assertGreater(corr, 0.95)

    def test_bad_sample_rate(self):
        with self.assertRaises(ParameterError):
            integrate_twice(np.zeros(10), 0.0)

    def test_unknown_drift_mode(self):
        with self.assertRaises(ParameterError):
            integrate_twice(np.zeros(10), FS, drift_mode="spline")


class SeparateBandsTests(unittest.TestCase):
    def setUp(self):
        self.cfg = PipelineConfig()
        self.t = np.arange(3000) / FS
        self.interior = slice(500, -500)

    def test_breathing_sinusoid_stays_in_resp(self):
        x = 0.01 * np.sin(2 * math.pi * 0.25 * self.t)
        resp, heart = separate_bands(x, FS, self.cfg)
        self.assertLess(np.max(np.abs(resp[self.interior] - x[self.interior])), 0.05 * 0.01)
        self.assertLess(np.max(np.abs(heart[self.interior])), 0.05 * 0.01)

    def test_zero_input(self):
        resp, heart = separate_bands(np.zeros(3000), FS, self.cfg)
        np.testing.assert_array_equal(resp, 0.0)
        np.testing.assert_array_equal(heart, 0.0)

    def test_superposition_is_split(self):
        base = dict(duration=30.0, resp_rate=0.25, resp_amplitude=0.01, heart_rate=2.0, heart_impulse_width=0.25)
        breathing = PhysioScenario(c1=1.0, c2=0.0, **base)
        pulses = PhysioScenario(c1=0.0, c2=1.0, heart_impulse_amplitude=0.002, **base)
        d_resp = np.array([displacement_of(breathing, v) for v in self.t])
        d_heart = np.array([displacement_of(pulses, v) for v in self.t])

        resp, heart = separate_bands(d_resp + d_heart, FS, self.cfg)

        w = self.interior
        offset = d_heart[w].mean()
        heart_ac = d_heart[w] - offset
        resp_err = np.sqrt(np.mean((resp[w] - d_resp[w] - offset) ** 2)) / np.sqrt(np.mean(d_resp[w] ** 2))
        heart_err = np.sqrt(np.mean((heart[w] - heart_ac) ** 2)) / np.sqrt(np.mean(heart_ac**2))
        self.assertLess(resp_err, 0.1)
        self.assertLess(heart_err, 0.1)

    def test_too_short(self):
        with self.assertRaises(InsufficientDataError):
            separate_bands(np.zeros(500), FS, self.cfg)

    def test_band_above_nyquist(self):
        with self.assertRaises(ParameterError):
            separate_bands(np.zeros(3000), 15.0, self.cfg)


class EmphasizeBeatsTests(unittest.TestCase):
    def setUp(self):
        self.cfg = PipelineConfig()
        self.t = np.arange(3000) / FS
        self.interior = slice(500, -500)

    def test_slow_heart_band_content_is_removed(self):
        x = 0.01 * np.sin(2 * math.pi * 0.8 * self.t)
        out = emphasize_beats(x, FS, self.cfg)
        self.assertLess(np.max(np.abs(out[self.interior])), 0.05 * 0.01)

    def test_fast_content_passes(self):
        x = 0.01 * np.sin(2 * math.pi * 6.0 * self.t)
        out = emphasize_beats(x, FS, self.cfg)
        self.assertLess(np.max(np.abs(out[self.interior] - x[self.interior])), 0.05 * 0.01)

    def test_cutoff_at_band_edge_is_identity(self):
        x = np.sin(2 * math.pi * 0.8 * self.t)
        out = emphasize_beats(x, FS, self.cfg.with_changes(beat_highpass=0.0))
        np.testing.assert_array_equal(out, x)
        self.assertIsNot(out, x)


class PipelineConfigTests(unittest.TestCase):
    def test_defaults(self):
        cfg = PipelineConfig()
        self.assertEqual(cfg.hop, cfg.window)
        self.assertEqual(cfg.edge_guard, 0.5)
        self.assertEqual(cfg.with_changes(window=10.4).hop, 10.4)

    def test_invariants(self):
        with self.assertRaises(ParameterError):
            PipelineConfig(heart_band=(0.5, 10.0))
        with self.assertRaises(ParameterError):
            PipelineConfig(drift_mode="cubic")
        with self.assertRaises(ParameterError):
            PipelineConfig(window=5.0, hop=6.0)
        with self.assertRaises(ParameterError):
            PipelineConfig(gravity_window=0.0)
        with self.assertRaises(ParameterError):
            PipelineConfig(beat_highpass=10.0)
        with self.assertRaises(ParameterError):
            PipelineConfig(beat_highpass=-1.0)

    def test_digest_changes_with_values(self):
        self.assertEqual(PipelineConfig().digest(), PipelineConfig().digest())
        self.assertNotEqual(PipelineConfig().digest(), PipelineConfig(peak_threshold_k=3.0).digest())

    def test_config_files(self):
        self.assertEqual(load_pipeline_config(None), PipelineConfig())
        self.assertEqual(load_pipeline_config(config.CONFIG_DIR / "default.toml"), PipelineConfig())
        running = load_pipeline_config(config.CONFIG_DIR / "running.toml")
        self.assertEqual((running.window, running.hop), (10.4, 10.4))

    def test_unknown_key_in_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "cfg.toml"
            path.write_text("window = 7.2\nbogus = 1\n")
            with self.assertRaises(ConfigFileError) as ctx:
                load_pipeline_config(path)
        self.assertEqual(ctx.exception.line, 2)


if __name__ == "__main__":
    unittest.main()
