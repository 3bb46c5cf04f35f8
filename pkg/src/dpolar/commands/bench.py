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

from dpolar.commands.sweep import add_code_arguments, document_from_args
from dpolar.commands.trellis import TRELLIS_DEFAULTS
from dpolar.experiment import resolve_experiment
from dpolar.simulate import benchmark_decoder


def bench_command(args):
    document = document_from_args(args, defaults=TRELLIS_DEFAULTS)
    document["ebn0"] = [args.ebn0]
    document["decoders"] = args.decoder
    document["list_sizes"] = [args.list_sizes[0]]
    document.pop("runs", None)
    configs = resolve_experiment(document, seed=args.seed)

    print(f"{'decoder':>8} {'L':>4} {'ms/frame':>10} {'x previous':>10}")
    for config in configs:
        timings = benchmark_decoder(config, args.ebn0, frames=args.frames, list_sizes=args.list_sizes)
        previous = None
        for list_size, seconds in timings:
            ratio = "" if previous is None else f"{seconds / previous:.2f}"
            print(f"{config.decoder:>8} {list_size:>4} {seconds * 1000:>10.2f} {ratio:>10}")
            previous = seconds
    return 0


def bench_command_parser(subparsers=None):
    if subparsers is not None:
        parser = subparsers.add_parser("bench")
    else:
        parser = argparse.ArgumentParser("dpolar bench command")

    add_code_arguments(parser)
    parser.add_argument(
        "--list-sizes", type=int, nargs="+", dest="list_sizes", default=[1, 2, 4, 8, 16, 32], help="List sizes L."
    )
    parser.add_argument(
        "--decoder", type=str, nargs="+", choices=["jscl", "sep_scl"], default=["jscl"], help="Decoders to time."
    )
    parser.add_argument("--ebn0", type=float, default=2.0, help="Eb/N0 of the timed frames, in dB.")
    parser.add_argument("--frames", type=int, default=20, help="Frames decoded per list size.")
    if subparsers is not None:
        parser.set_defaults(func=bench_command)
    return parser
