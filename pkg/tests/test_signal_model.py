import math
import tempfile
import unittest
from pathlib import Path

import numpy as np

import config
from errors import ConfigFileError, DataError, OutOfRangeError, ParameterError
from signal_model.scenario import EventKind, EventMark, PhysioScenario, load_scenario
from signal_model.synth import acceleration_of, displacement_of, ground_truth, heart_centers, synthesize_trace
from signal_model.trace import AccelSample, AccelTrace

REST = config.SCENARIO_DIR / "rest.toml"


def _write(directory: str, text: str) -> Path:
    path = Path(directory) / "scenario.toml"
    path.write_text(text, encoding="utf-8")
    return path


class ScenarioTests(unittest.TestCase):
    def test_presets_load(self):
        for name in ("rest", "breath_hold", "running", "cough"):
            with self.subTest(name=name):
                scenario = load_scenario(config.SCENARIO_DIR / f"{name}.toml")
                self.assertGreater(scenario.duration, 0)

    def test_unknown_key_reports_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write(tmp, "duration = 7.2\nheart_rat = 1.2\n")
            with self.assertRaises(ConfigFileError) as ctx:
                load_scenario(path)
        self.assertEqual(ctx.exception.line, 2)
        self.assertIn("heart_rat", str(ctx.exception))

    def test_invalid_value_reports_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write(tmp, "sample_rate = 100.0\nduration = -1.0\n")
            with self.assertRaises(ConfigFileError) as ctx:
                load_scenario(path)
        self.assertEqual(ctx.exception.line, 2)

    def test_syntax_error_reports_line(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = _write(tmp, "duration = 7.2\nheart_rate = = 1\n")
            with self.assertRaises(ConfigFileError) as ctx:
                load_scenario(path)
        self.assertEqual(ctx.exception.line, 2)

    def test_missing_file(self):
        with self.assertRaises(ConfigFileError):
            load_scenario(Path("/nonexistent/scenario.toml"))

    def test_orientation_must_be_unit(self):
        with self.assertRaises(ParameterError):
            PhysioScenario(duration=1.0, orientation=(0.0, 0.0, 2.0))
        tilted = PhysioScenario(duration=1.0, orientation=(0.0, math.sqrt(0.5), math.sqrt(0.5)))
        self.assertAlmostEqual(sum(v * v for v in tilted.orientation), 1.0)

    def test_overlapping_impulses_rejected(self):
        with self.assertRaises(ParameterError):
            PhysioScenario(duration=5.0, heart_rate=4.0, heart_impulse_width=0.3)

    def test_event_validation(self):
        with self.assertRaises(ParameterError):
            PhysioScenario(duration=5.0, events=[("breath_hold", 4.0, 2.0)])
        with self.assertRaises(ParameterError):
            PhysioScenario(duration=10.0, events=[("breath_hold", 1.0, 3.0), ("breath_hold", 2.0, 1.0)])
        with self.assertRaises(ParameterError):
            PhysioScenario(duration=10.0, events=[("heart_beat", 1.0)])

    def test_events_are_sorted(self):
        scenario = PhysioScenario(duration=10.0, events=[("cough", 6.0), ("breath_hold", 1.0, 2.0)])
        self.assertEqual([e.kind for e in scenario.events], [EventKind.BREATH_HOLD, EventKind.COUGH])

    def test_digest_tracks_parameters(self):
        scenario = load_scenario(REST)
        self.assertEqual(scenario.digest(), load_scenario(REST).digest())
        self.assertNotEqual(scenario.digest(), scenario.with_changes(noise_std=0.01).digest())


class SynthesizeTraceTests(unittest.TestCase):
    def test_rest_truth_counts(self):
        scenario = load_scenario(REST)
        trace, truth = synthesize_trace(scenario, 0)
        kinds = [m.kind for m in truth]
        self.assertEqual(len(trace), 720)
        self.assertEqual(kinds.count(EventKind.HEART_BEAT), 4)
        self.assertEqual(kinds.count(EventKind.BREATH), 1)

    def test_zero_input(self):
        scenario = PhysioScenario(
            duration=2.0, resp_amplitude=0.0, heart_impulse_amplitude=0.0, gravity_included=False
        )
        trace, _ = synthesize_trace(scenario, 1)
        self.assertFalse(np.any(trace.xyz()))

    def test_gravity_on_z(self):
        scenario = PhysioScenario(duration=1.0, resp_amplitude=0.0, heart_impulse_amplitude=0.0)
        trace, _ = synthesize_trace(scenario, 0)
        np.testing.assert_array_equal(trace.az, np.full(100, config.STANDARD_GRAVITY))
        self.assertFalse(np.any(trace.ax) or np.any(trace.ay))

    def test_respiration_peak_acceleration(self):
        scenario = PhysioScenario(duration=8.0, resp_amplitude=0.005, resp_rate=0.25, c1=1.0, c2=0.0)
        t = np.linspace(0.0, 8.0, 8001)
        peak = np.max(np.abs(acceleration_of(scenario, t)))
        self.assertAlmostEqual(peak, 0.005 * (2 * math.pi * 0.25) ** 2, places=6)
        self.assertAlmostEqual(peak, 0.01234, places=5)

    def test_acceleration_matches_finite_differences(self):
        scenario = load_scenario(config.SCENARIO_DIR / "cough.toml")
        h = 1e-5
        for t in (0.3, 0.855, 2.0, 3.1, 5.85, 5.87, 6.9):
            d = [displacement_of(scenario, t + k * h) for k in (-1, 0, 1)]
            numeric = (d[0] - 2 * d[1] + d[2]) / h**2
            analytic = float(acceleration_of(scenario, np.array([t]))[0])
            self.assertAlmostEqual(numeric, analytic, delta=1e-6 + 1e-6 * abs(analytic), msg=f"t={t}")

    def test_same_seed_is_bit_identical(self):
        scenario = load_scenario(REST).with_changes(noise_std=0.05)
        first, _ = synthesize_trace(scenario, 11)
        second, _ = synthesize_trace(scenario, 11)
        other, _ = synthesize_trace(scenario, 12)
        np.testing.assert_array_equal(first.xyz(), second.xyz())
        self.assertFalse(np.array_equal(first.xyz(), other.xyz()))

    def test_superposition(self):
        scenario = load_scenario(config.SCENARIO_DIR / "cough.toml").with_changes(gravity_included=False)
        both, _ = synthesize_trace(scenario, 0)
        lung, _ = synthesize_trace(scenario.with_changes(c2=0.0), 0)
        heart, _ = synthesize_trace(scenario.with_changes(c1=0.0), 0)
        np.testing.assert_allclose(lung.xyz() + heart.xyz(), both.xyz(), rtol=0, atol=1e-12)

    def test_orientation_keeps_energy(self):
        scenario = load_scenario(REST).with_changes(gravity_included=False)
        upright, _ = synthesize_trace(scenario, 0)
        tilted, _ = synthesize_trace(scenario.with_changes(orientation=(0.6, 0.0, 0.8)), 0)
        energy = np.sum(upright.xyz() ** 2)
        self.assertAlmostEqual(np.sum(tilted.xyz() ** 2) / energy, 1.0, delta=1e-9)

    def test_default_onset_gives_rounded_beat_count(self):
        for duration, rate in ((7.2, 1.1), (7.2, 4 / 7.2), (10.0, 1.26), (10.0, 1.24)):
            with self.subTest(duration=duration, rate=rate):
                scenario = PhysioScenario(duration=duration, heart_rate=rate)
                beats = [m for m in ground_truth(scenario) if m.kind is EventKind.HEART_BEAT]
                self.assertEqual(len(beats), round(duration * rate))
                self.assertAlmostEqual(beats[0].start, 0.5 / rate)

    def test_breath_hold_freezes_respiration(self):
        scenario = load_scenario(config.SCENARIO_DIR / "breath_hold.toml").with_changes(c2=0.0)
        t = np.arange(230, 670) / 100.0
        np.testing.assert_array_equal(acceleration_of(scenario, t), np.zeros(t.size))
        self.assertAlmostEqual(displacement_of(scenario, 3.0), displacement_of(scenario, 6.0))

    def test_no_breaths_during_hold(self):
        scenario = load_scenario(config.SCENARIO_DIR / "breath_hold.toml")
        truth = ground_truth(scenario)
        breaths = [m.start for m in truth if m.kind is EventKind.BREATH]
        self.assertEqual(breaths, [])
        self.assertIn(EventMark(EventKind.BREATH_HOLD, 2.25, 4.5), truth)

    def test_skin_temperature_ramp(self):
        scenario = load_scenario(config.SCENARIO_DIR / "running.toml")
        trace, _ = synthesize_trace(scenario, 0)
        self.assertAlmostEqual(trace.skin_temp[0], 33.0)
        self.assertGreater(trace.skin_temp[-1], 33.5)


class DisplacementTests(unittest.TestCase):
    def test_impulse_peak(self):
        scenario = PhysioScenario(duration=5.0, c1=0.0, heart_rate=1.0, heart_impulse_amplitude=0.004)
        for center in heart_centers(scenario):
            self.assertAlmostEqual(displacement_of(scenario, float(center)), scenario.c2 * 0.004)

    def test_zero_amplitudes(self):
        scenario = PhysioScenario(duration=3.0, resp_amplitude=0.0, heart_impulse_amplitude=0.0)
        self.assertEqual({displacement_of(scenario, t) for t in (0.0, 1.3, 3.0)}, {0.0})

    def test_quarter_period_is_maximum(self):
        scenario = PhysioScenario(duration=8.0, c2=0.0, resp_rate=0.25, resp_amplitude=0.005)
        grid = max(displacement_of(scenario, t) for t in np.linspace(0.0, 4.0, 4001))
        self.assertAlmostEqual(displacement_of(scenario, 1.0), 0.005)
        self.assertAlmostEqual(grid, 0.005, places=9)

    def test_out_of_range(self):
        scenario = PhysioScenario(duration=3.0)
        with self.assertRaises(OutOfRangeError):
            displacement_of(scenario, 3.5)
        with self.assertRaises(OutOfRangeError):
            displacement_of(scenario, -0.1)


class AccelTraceTests(unittest.TestCase):
    def test_csv_keeps_schema_and_missing_context(self):
        trace = AccelTrace(0.0, 50.0, [0.1, 0.2, 0.3], [0.0, 0.0, 0.0], [9.8, 9.81, 9.79])
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "trace.csv"
            trace.to_csv(path)
            self.assertEqual(path.read_text().splitlines()[0], "t,ax,ay,az,temp,pressure")
            loaded = AccelTrace.from_csv(path)
        self.assertEqual(loaded.sample_rate, 50.0)
        np.testing.assert_allclose(loaded.az, trace.az)
        self.assertIsNone(loaded[0].skin_temp)

    def test_bad_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "trace.csv"
            path.write_text("time,x,y,z\n0,1,2,3\n")
            with self.assertRaises(DataError):
                AccelTrace.from_csv(path)

    def test_non_uniform_samples(self):
        samples = [AccelSample(t, 0.0, 0.0, 9.8) for t in (0.0, 0.01, 0.03)]
        with self.assertRaises(DataError):
            AccelTrace.from_samples(samples, sample_rate=100.0)

    def test_slicing(self):
        trace = AccelTrace(1.0, 10.0, np.arange(10.0), np.zeros(10), np.ones(10))
        part = trace[2:5]
        self.assertEqual(len(part), 3)
        self.assertAlmostEqual(part.t0, 1.2)
        self.assertEqual(part[0].ax, 2.0)
        self.assertAlmostEqual(trace[-1].t, 1.9)


if __name__ == "__main__":
    unittest.main()
