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


import os
import tempfile
import unittest

import numpy as np
from dpolar.polar import (
    ChannelCodeSpec,
    SourceCodeSpec,
    assemble_channel_input,
    channel_encode,
    check_bits,
    code_spec_from_dict,
    compress_source,
    load_code_spec,
    polar_transform,
    polar_transform_matrix,
    save_code_spec,
)


class PolarTransformTester(unittest.TestCase):
    def test_small_examples(self):
        self.assertEqual(polar_transform([1, 0]).tolist(), [1, 0])
        self.assertEqual(polar_transform([0, 1]).tolist(), [1, 1])
        self.assertEqual(polar_transform([1, 1]).tolist(), [0, 1])
        self.assertEqual(polar_transform([0, 0, 0, 1]).tolist(), [1, 1, 1, 1])
        self.assertEqual(polar_transform([1, 0, 1, 1]).tolist(), [1, 1, 0, 1])
        self.assertEqual(polar_transform([0, 1, 0, 0]).tolist(), [1, 1, 0, 0])

    def test_matches_kronecker_power(self):
        rng = np.random.default_rng(0)
        for n in range(0, 7):
            matrix = polar_transform_matrix(n).astype(np.int64)
            for _ in range(20):
                u = rng.integers(0, 2, size=2**n)
                expected = (u @ matrix) % 2
                self.assertEqual(polar_transform(u).tolist(), expected.tolist())

    def test_involution_and_linearity(self):
        rng = np.random.default_rng(1)
        for n in range(1, 11):
            u = rng.integers(0, 2, size=2**n).astype(np.uint8)
            v = rng.integers(0, 2, size=2**n).astype(np.uint8)
            self.assertTrue(np.array_equal(polar_transform(polar_transform(u)), u))
            self.assertTrue(np.array_equal(polar_transform(u ^ v), polar_transform(u) ^ polar_transform(v)))

    def test_does_not_modify_input(self):
        u = np.array([1, 0, 1, 1], dtype=np.uint8)
        polar_transform(u)
        self.assertEqual(u.tolist(), [1, 0, 1, 1])

    def test_rejects_bad_words(self):
        self.assertRaises(ValueError, polar_transform, [1, 0, 1])
        self.assertRaises(ValueError, polar_transform, [])
        self.assertRaises(ValueError, polar_transform, [0, 2])
        self.assertRaises(ValueError, check_bits, [[0, 1], [1, 0]])
        self.assertRaises(ValueError, check_bits, [0, 1], "s", 4)


class CodeSpecTester(unittest.TestCase):
    def test_source_spec_validation(self):
        spec = SourceCodeSpec(n_s=2, K=2, H=(1, 3), p=0.07)
        self.assertEqual(spec.N, 4)
        self.assertEqual(spec.low_entropy, (2, 4))
        self.assertAlmostEqual(spec.rate, 0.5)
        self.assertAlmostEqual(spec.prior_llr, np.log(0.93 / 0.07))

        self.assertRaises(ValueError, SourceCodeSpec, n_s=2, K=2, H=(3, 1), p=0.07)
        self.assertRaises(ValueError, SourceCodeSpec, n_s=2, K=2, H=(1, 5), p=0.07)
        self.assertRaises(ValueError, SourceCodeSpec, n_s=2, K=3, H=(1, 2), p=0.07)
        self.assertRaises(ValueError, SourceCodeSpec, n_s=2, K=2, H=(1, 3), p=0.5)
        self.assertRaises(ValueError, SourceCodeSpec, n_s=2, K=2, H=(1, 3), p=0.0)

    def test_channel_spec_frozen_values(self):
        spec = ChannelCodeSpec(n_c=2, K=2, A=(2, 4))
        self.assertEqual(spec.frozen_values, (0, 0))
        self.assertEqual(spec.frozen_positions.tolist(), [0, 2])
        self.assertEqual(spec.frozen_map(), {0: 0, 2: 0})

        spec = ChannelCodeSpec(n_c=2, K=2, A=(2, 4), frozen_values=(1, 0))
        self.assertEqual(spec.frozen_map(), {0: 1, 2: 0})
        self.assertRaises(ValueError, ChannelCodeSpec, n_c=2, K=2, A=(2, 4), frozen_values=(1,))
        self.assertRaises(ValueError, ChannelCodeSpec, n_c=2, K=0, A=())

        full = ChannelCodeSpec(n_c=1, K=2, A=(1, 2))
        self.assertEqual(full.frozen_values, ())

    def test_json_files(self):
        source = SourceCodeSpec(n_s=2, K=2, H=(1, 3), p=0.07)
        channel = ChannelCodeSpec(n_c=3, K=2, A=(4, 8), frozen_values=(0, 1, 0, 0, 0, 0))
        self.assertEqual(
            source.to_dict(), {"kind": "source", "n": 2, "K": 2, "indices": [1, 3], "frozen": [], "p": 0.07}
        )
        self.assertIsNone(channel.to_dict()["p"])
        with tempfile.TemporaryDirectory() as tmp_dir:
            for spec in (source, channel):
                path = os.path.join(tmp_dir, f"{spec.to_dict()['kind']}.json")
                save_code_spec(spec, path)
                self.assertEqual(load_code_spec(path), spec)
        self.assertRaises(ValueError, code_spec_from_dict, {"kind": "bch"})


class EncodingTester(unittest.TestCase):
    def test_compress_source(self):
        spec = SourceCodeSpec(n_s=2, K=2, H=(1, 3), p=0.07)
        self.assertEqual(compress_source([1, 0, 1, 1], spec).tolist(), [1, 0])
        self.assertRaises(ValueError, compress_source, [1, 0, 1], spec)

    def test_channel_encode(self):
        spec = ChannelCodeSpec(n_c=2, K=2, A=(2, 4))
        self.assertEqual(assemble_channel_input([1, 0], spec).tolist(), [0, 1, 0, 0])
        self.assertEqual(channel_encode([1, 0], spec).tolist(), [1, 1, 0, 0])
        self.assertRaises(ValueError, channel_encode, [1, 0, 1], spec)

    def test_channel_encode_with_frozen_ones(self):
        spec = ChannelCodeSpec(n_c=2, K=2, A=(2, 4), frozen_values=(1, 1))
        u = assemble_channel_input([1, 0], spec)
        self.assertEqual(u.tolist(), [1, 1, 1, 0])
        self.assertEqual(channel_encode([1, 0], spec).tolist(), polar_transform(u).tolist())

    def test_encoding_is_linear_in_the_information_bits(self):
        rng = np.random.default_rng(2)
        spec = ChannelCodeSpec(n_c=5, K=12, A=tuple(sorted(rng.choice(np.arange(1, 33), 12, replace=False))))
        matrix = polar_transform_matrix(5).astype(np.int64)
        for _ in range(20):
            c_h = rng.integers(0, 2, size=12)
            expected = (c_h @ matrix[spec.positions]) % 2
            self.assertEqual(channel_encode(c_h, spec).tolist(), expected.tolist())
