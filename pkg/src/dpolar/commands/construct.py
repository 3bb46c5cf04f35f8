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

import argparse
import json
import os

from dpolar.commands.sweep import add_code_arguments, document_from_args
from dpolar.construction import bit_channel_means, channel_initial_mean
from dpolar.experiment import resolve_experiment
from dpolar.polar import polar_transform_matrix, save_code_spec


def construct_command(args):
    document = document_from_args(args)
    if args.ebn0 is not None:
        document["ebn0"] = [args.ebn0]
    configs = resolve_experiment(document, seed=args.seed)
    source = configs[0].source
    channel = configs[0].channel
    if args.design_snr is None and args.ebn0 is None and "information_set" not in document:
        print(f"No --design-snr given, the channel code is designed at {configs[0].ebn0_grid_db[0]:g} dB.")

    if args.out_dir is not None:
        os.makedirs(args.out_dir, exist_ok=True)
        save_code_spec(source, os.path.join(args.out_dir, "source_code.json"))
        save_code_spec(channel, os.path.join(args.out_dir, "channel_code.json"))
        print(f"Code specs written to {args.out_dir}.")
    else:
        print(json.dumps({"source": source.to_dict(), "channel": channel.to_dict()}, indent=2))

    if args.means:
        design = args.design_snr if args.design_snr is not None else configs[0].ebn0_grid_db[0]
        means = bit_channel_means(channel.n_c, channel_initial_mean(design, configs[0].rate))
        for index, mean in enumerate(means, start=1):
            print(f"{index} {mean:.6g}")

    if args.matrix:
        # the rows indexed by A generate the channel code
        for row in polar_transform_matrix(channel.n_c):
            print("".join(str(int(b)) for b in row))
    return 0


def construct_command_parser(subparsers=None):
    if subparsers is not None:
        parser = subparsers.add_parser("construct")
    else:
        parser = argparse.ArgumentParser("dpolar construct command")

    add_code_arguments(parser)
    parser.add_argument("--ebn0", type=float, help="Eb/N0 to design the channel code at, if --design-snr is unset.")
    parser.add_argument(
        "--out-dir", type=str, dest="out_dir", help="Write source_code.json and channel_code.json here."
    )
    parser.add_argument("--means", action="store_true", help="Also print the GA mean of every channel bit-channel.")
    parser.add_argument(
        "--matrix", action="store_true", help="Also print the polar transform matrix of length N_c, one row per line."
    )
    if subparsers is not None:
        parser.set_defaults(func=construct_command)
    return parser
