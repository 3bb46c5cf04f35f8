# coding=utf-8
# Copyright 2026 The dpolar Team. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


import contextlib
import io
import json
import os
import tempfile
import unittest
from unittest.mock import patch

from dpolar.construction import construct_channel_code
from dpolar.experiment import (
    PRESETS,
    ber_slope,
    describe_configs,
    ebn0_at_ber,
    get_preset,
    normalize_document,
    parse_ebn0_grid,
    resolve_code_lengths,
    resolve_experiment,
    run_stem,
    run_sweep,
)
from dpolar.simulate import BerPoint, run_point
from dpolar.utils import RESULT_COLUMNS, ConfigError, FrameError


slow = unittest.skipUnless(os.getenv("RUN_SLOW", "0") == "1", "long Monte Carlo check, set RUN_SLOW=1 to run it")

SMALL = {"name": "small", "ns": 4, "k": 2, "nc": 4, "p": 0.07, "high_entropy_set": [1, 3], "information_set": [2, 4]}


def without_env_seed():
    environment = {key: value for key, value in os.environ.items() if key != "DPOLAR_SEED"}
    return patch.dict(os.environ, environment, clear=True)


def measure_curves(document, stop_ber=None):
    """
    BER curve of every run of an experiment document, walking the grid upwards. A curve stops at its first point
    below `stop_ber`, or runs the whole grid when `stop_ber` is `None`.
    """
    with without_env_seed():
        configs = resolve_experiment(document)
    curves, finished = {}, set()
    for config in configs:
        stem = run_stem(config)
        if stem in finished:
            continue
        ebn0_db = config.ebn0_grid_db[0]
        point = run_point(config, ebn0_db, workers=os.cpu_count() or 1, progress=False)
        curves.setdefault(stem, []).append((ebn0_db, point.ber))
        if stop_ber is not None and point.ber < stop_ber:
            finished.add(stem)
    return curves


class ResolveTester(unittest.TestCase):
    def test_code_lengths(self):
        self.assertEqual(resolve_code_lengths({"ns": 512, "rs": 0.6, "rate": 0.5}), (512, 307, 1024))
        self.assertEqual(resolve_code_lengths({"ns": 512, "rs": 0.5, "rate": 0.5}), (512, 256, 1024))
        self.assertEqual(resolve_code_lengths({"ns": 1024, "rs": 0.5, "rate": 1.0}), (1024, 512, 1024))
        self.assertEqual(resolve_code_lengths({"ns": 64, "k": 40, "nc": 128, "rs": 0.1}), (64, 40, 128))

    def test_invalid_documents(self):
        invalid = {
            "rate": {"ns": 512, "rs": 0.6, "rate": 0.3},
            "nc": {"ns": 512, "rs": 0.6, "nc": 1000},
            "ns": {"ns": 500, "rs": 0.6, "rate": 0.5},
            "k": {"ns": 64, "k": 60, "nc": 32},
            "rs": {"ns": 64, "rs": 1.5, "nc": 128},
        }
        for key, document in invalid.items():
            with self.assertRaises(ConfigError) as context:
                resolve_code_lengths(document)
            self.assertEqual(context.exception.key, key)

        with without_env_seed():
            for key, value in (("p", 0.5), ("p", 0.0), ("seed", -1), ("ebn0", []), ("max_frames", 0)):
                with self.assertRaises(ConfigError) as context:
                    resolve_experiment({**SMALL, key: value})
                self.assertEqual(context.exception.key, key)

            with self.assertRaises(ConfigError) as context:
                resolve_experiment({**SMALL, "runs": [{"decoder": "bp", "list_size": 4}]})
            self.assertEqual(context.exception.key, "decoders")

            with self.assertRaises(ConfigError) as context:
                resolve_experiment({**SMALL, "high_entropy_set": [1, 1]})
            self.assertEqual(context.exception.key, "high_entropy_set")

    def test_unknown_keys_and_aliases(self):
        with self.assertRaises(ConfigError) as context:
            normalize_document({"ns": 4, "colour": "blue"})
        self.assertEqual(context.exception.key, "colour")
        self.assertRaises(ConfigError, normalize_document, [1, 2])

        document = normalize_document({"N_s": 512, "R_s": 0.6, "R": 0.5, "L": [8], "EbN0_dB": [1.0]})
        self.assertEqual(document, {"ns": 512, "rs": 0.6, "rate": 0.5, "list_sizes": [8], "ebn0": [1.0]})

    def test_ebn0_grid(self):
        self.assertEqual(parse_ebn0_grid("0:1:0.25"), (0.0, 0.25, 0.5, 0.75, 1.0))
        self.assertEqual(parse_ebn0_grid("0:1:0.3"), (0.0, 0.3, 0.6, 0.9))
        self.assertEqual(parse_ebn0_grid("1, 2"), (1.0, 2.0))
        self.assertEqual(parse_ebn0_grid(1.5), (1.5,))
        self.assertEqual(parse_ebn0_grid([3, "4"]), (3.0, 4.0))
        for value in ("1:0:1", "0:1:0", "a,b", "", []):
            self.assertRaises(ConfigError, parse_ebn0_grid, value)

    def test_presets(self):
        self.assertRaises(ConfigError, get_preset, "no_such_preset")
        preset = get_preset("n512_lists")
        preset["ns"] = 2
        self.assertEqual(PRESETS["n512_lists"]["ns"], 512)

        expected = {"toy": 12, "n512_lists": 52, "n512_sources": 102, "n1024_rate1": 32}
        with without_env_seed():
            for name, count in expected.items():
                configs = resolve_experiment(get_preset(name))
                self.assertEqual(len(configs), count, name)

            toy = resolve_experiment(get_preset("toy"))
        self.assertEqual(toy[0].source.H, (1, 3))
        self.assertEqual(toy[0].channel.A, (2, 4))
        self.assertEqual({(config.decoder, config.list_size) for config in toy}, {("jscl", 16), ("sep_scl", 16)})
        self.assertEqual(toy[0].max_frames, 100000)

    def test_scenarios(self):
        with without_env_seed():
            configs = resolve_experiment(get_preset("n512_sources"))
            self.assertEqual(
                [config.name for config in configs[::34]],
                ["n512_sources_p0.07_rs0.6", "n512_sources_p0.07_rs0.5", "n512_sources_p0.04_rs0.5"],
            )
            self.assertEqual([configs[i].source.K for i in (0, 34, 68)], [307, 256, 256])
            self.assertEqual([configs[i].source.p for i in (0, 34, 68)], [0.07, 0.07, 0.04])

            document = get_preset("n1024_rate1")
            document["scenarios"] = [{"name": "twice", "p": 0.07}, {"name": "twice", "p": 0.04}]
            with self.assertRaises(ConfigError) as context:
                resolve_experiment(document)
            self.assertEqual(context.exception.key, "name")

    def test_channel_code_design(self):
        document = {"ns": 64, "k": 40, "nc": 128, "p": 0.07, "ebn0": [0.0, 3.0], "list_sizes": [4]}
        with without_env_seed():
            configs = resolve_experiment(document)
            for config in configs:
                ebn0_db = config.ebn0_grid_db[0]
                self.assertEqual(config.channel, construct_channel_code(7, 40, ebn0_db, rate=0.5))

            configs = resolve_experiment({**document, "design_snr_db": 2.0})
        self.assertEqual(configs[0].channel, configs[1].channel)
        self.assertEqual(configs[0].channel, construct_channel_code(7, 40, 2.0, rate=0.5))

    def test_runs(self):
        document = {**SMALL, "decoders": ["jscl", "sep_scl"], "list_sizes": [2, 4]}
        with without_env_seed():
            configs = resolve_experiment(document)
        self.assertEqual(
            [(config.decoder, config.list_size) for config in configs],
            [("jscl", 2), ("jscl", 4), ("sep_scl", 2), ("sep_scl", 4)],
        )
        self.assertEqual(run_stem(configs[1]), "small_jscl_L4")

    def test_seed_precedence(self):
        document = {**SMALL, "seed": 3}
        with without_env_seed():
            self.assertEqual(resolve_experiment(document)[0].base_seed, 3)
            self.assertEqual(resolve_experiment(SMALL)[0].base_seed, 0)
        with patch.dict(os.environ, {"DPOLAR_SEED": "9"}):
            self.assertEqual(resolve_experiment(document)[0].base_seed, 9)
            self.assertEqual(resolve_experiment(document, seed=4)[0].base_seed, 4)
        with patch.dict(os.environ, {"DPOLAR_SEED": "nine"}):
            self.assertRaises(ConfigError, resolve_experiment, document)

    def test_describe(self):
        with without_env_seed():
            document = get_preset("n512_lists")
            document["ebn0"] = [1.0]
            lines = describe_configs(resolve_experiment(document))
        self.assertEqual(len(lines), 1)
        self.assertIn("N_s=512, K=307, N_c=1024", lines[0])
        self.assertIn("R=0.5000", lines[0])


class RunSweepTester(unittest.TestCase):
    def resolve(self):
        with without_env_seed():
            return resolve_experiment(self.document())

    def document(self):
        return {**SMALL, "ebn0": [0.0, 1.0], "list_sizes": [2], "max_frames": 20}

    def test_outputs(self):
        configs = self.resolve()
        with tempfile.TemporaryDirectory() as tmp_dir:
            with contextlib.redirect_stdout(io.StringIO()) as output:
                self.assertEqual(run_sweep(configs, tmp_dir, progress=False, document=self.document()), 0)
            self.assertIn("small_jscl_L2 @ 0 dB", output.getvalue())

            with open(os.path.join(tmp_dir, "small_jscl_L2.csv"), "r", encoding="utf-8") as f:
                lines = f.read().splitlines()
            self.assertEqual(lines[0], ",".join(RESULT_COLUMNS))
            self.assertEqual(len(lines), 3)
            self.assertTrue(lines[1].startswith("0.0,20,"))

            with open(os.path.join(tmp_dir, "small_jscl_L2.dat"), "r", encoding="utf-8") as f:
                plot = f.read().splitlines()
            self.assertEqual(plot[0], "# ebn0_db ber")
            self.assertEqual([line.split()[0] for line in plot[1:]], ["0", "1"])

            with open(os.path.join(tmp_dir, "experiment.json"), "r", encoding="utf-8") as f:
                sidecar = json.load(f)
            self.assertIn("dpolar_version", sidecar)
            self.assertEqual(sidecar["experiment"]["seed"], 0)
            self.assertEqual(len(sidecar["resolved"]), 2)
            self.assertEqual(sidecar["resolved"][0]["source"]["indices"], [1, 3])
            self.assertEqual(sidecar["resolved"][1]["ebn0_db"], 1.0)

    def test_resume(self):
        configs = self.resolve()
        point = BerPoint(
            ebn0_db=1.0, frames_run=20, bit_errors=0, frame_errors=0, wall_time=0.1, low_confidence=True,
            source_length=4,
        )
        with tempfile.TemporaryDirectory() as tmp_dir:
            with contextlib.redirect_stdout(io.StringIO()):
                run_sweep(configs[:1], tmp_dir, progress=False)
                with patch("dpolar.experiment.run_point", return_value=point) as mock_run:
                    run_sweep(configs, tmp_dir, progress=False)
            self.assertEqual(mock_run.call_count, 1)
            self.assertEqual(mock_run.call_args[0][1], 1.0)

            with contextlib.redirect_stdout(io.StringIO()):
                with patch("dpolar.experiment.run_point", return_value=point) as mock_run:
                    run_sweep(configs, tmp_dir, resume=False, progress=False)
            self.assertEqual(mock_run.call_count, 2)

    def test_resume_keeps_fine_grid_points(self):
        document = {**SMALL, "ebn0": [12.3456789], "list_sizes": [2], "max_frames": 20}
        with without_env_seed():
            configs = resolve_experiment(document)
        with tempfile.TemporaryDirectory() as tmp_dir:
            with contextlib.redirect_stdout(io.StringIO()):
                run_sweep(configs, tmp_dir, progress=False)
                with patch("dpolar.experiment.run_point") as mock_run:
                    run_sweep(configs, tmp_dir, progress=False)
            self.assertEqual(mock_run.call_count, 0)

            with open(os.path.join(tmp_dir, "small_jscl_L2.csv"), "r", encoding="utf-8") as f:
                lines = f.read().splitlines()
        self.assertEqual(len(lines), 2)
        self.assertTrue(lines[1].startswith("12.3456789,"))

    def test_failure_is_recorded(self):
        configs = self.resolve()
        error = FrameError("Frame 3 at 0 dB failed", frame_seed={"base_seed": 0, "ebn0_db": 0.0, "frame_index": 3})
        with tempfile.TemporaryDirectory() as tmp_dir:
            with patch("dpolar.experiment.run_point", side_effect=error):
                self.assertRaises(FrameError, run_sweep, configs, tmp_dir, progress=False)
            with open(os.path.join(tmp_dir, "failure.json"), "r", encoding="utf-8") as f:
                failure = json.load(f)
            self.assertFalse(os.path.exists(os.path.join(tmp_dir, "small_jscl_L2.csv")))
        self.assertEqual(failure["frame_seed"]["frame_index"], 3)


class CurveTester(unittest.TestCase):
    def test_ebn0_at_ber(self):
        points = [(0.0, 1e-2), (1.0, 1e-3), (2.0, 1e-5)]
        self.assertAlmostEqual(ebn0_at_ber(points, 1e-4), 1.5)
        self.assertAlmostEqual(ebn0_at_ber(points, 1e-2), 0.0)
        self.assertAlmostEqual(ebn0_at_ber(list(reversed(points)), 1e-3), 1.0)
        self.assertIsNone(ebn0_at_ber(points, 1e-6))
        self.assertEqual(ebn0_at_ber([(0.0, 1e-3), (1.0, 0.0)], 1e-4), 1.0)

    def test_ber_slope(self):
        self.assertAlmostEqual(ber_slope([(0.0, 1e-1), (1.0, 1e-3), (2.0, 1e-5)]), -2.0)
        self.assertAlmostEqual(ber_slope([(0.0, 1e-2), (1.0, 1e-4), (2.0, 1e-4), (3.0, 1e-4)]), 0.0)
        self.assertAlmostEqual(ber_slope([(0.0, 1e-1), (3.0, 1e-4)], span_db=0.5), -1.0)
        self.assertIsNone(ber_slope([(0.0, 1e-2), (1.0, 0.0)]))


class PresetTrendTester(unittest.TestCase):
    @slow
    def test_joint_decoding_beats_separate_decoding(self):
        document = get_preset("n512_lists")
        document.update({"target_frame_errors": 50, "max_frames": 200_000})
        curves = measure_curves(document, stop_ber=1e-4)
        crossings = {stem: ebn0_at_ber(points, 1e-4) for stem, points in curves.items()}
        self.assertNotIn(None, crossings.values(), curves)

        separate = crossings["n512_lists_sep_scl_L32"]
        gains = [separate - crossings[f"n512_lists_jscl_L{list_size}"] for list_size in (4, 8, 32)]
        self.assertGreater(gains[0], 0.0)
        # a longer list never gives a worse crossing, up to Monte Carlo noise
        self.assertGreater(gains[1], gains[0] - 0.1)
        self.assertGreater(gains[2], gains[1] - 0.1)

    @slow
    def test_source_scenarios_and_error_floor(self):
        document = get_preset("n512_sources")
        document.update({"target_frame_errors": 50, "max_frames": 100_000})
        document["runs"] = [{"decoder": "jscl", "list_size": 32}]
        floor_name = "n512_sources_p0.07_rs0.5"
        others = [scenario for scenario in document["scenarios"] if scenario["name"] != floor_name]
        curves = measure_curves({**document, "scenarios": others}, stop_ber=1e-2)
        floor = [scenario for scenario in document["scenarios"] if scenario["name"] == floor_name]
        curves.update(measure_curves({**document, "ebn0": "-3:1:0.5", "scenarios": floor}))

        crossings = {stem.rsplit("_jscl", 1)[0]: ebn0_at_ber(points, 1e-2) for stem, points in curves.items()}
        self.assertNotIn(None, crossings.values(), curves)
        # a lower source rate leaves more channel redundancy, a lower p makes the source easier to compress
        self.assertLess(crossings[floor_name], crossings["n512_sources_p0.07_rs0.6"])
        self.assertLess(crossings["n512_sources_p0.04_rs0.5"], crossings[floor_name] + 0.1)

        # flat over the two dB at the top of the grid
        slope = ber_slope(curves[f"{floor_name}_jscl_L32"], span_db=2.0)
        self.assertIsNotNone(slope)
        self.assertLess(abs(slope), 0.5)
