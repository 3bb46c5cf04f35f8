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

from dpolar.commands.sweep import add_code_arguments, document_from_args
from dpolar.experiment import resolve_experiment
from dpolar.trellis import build_trellis, trellis_records


TRELLIS_DEFAULTS = {"p": 0.07, "ebn0": [0.0]}


def format_index_set(indices):
    return "{" + ",".join(str(i) for i in indices) + "}"


def trellis_command(args):
    document = document_from_args(args, defaults=TRELLIS_DEFAULTS)
    document.setdefault("ebn0", TRELLIS_DEFAULTS["ebn0"])
    config = resolve_experiment(document, seed=args.seed)[0]
    trellis = build_trellis(config.source, config.channel)

    print(f"H={format_index_set(config.source.H)}, A={format_index_set(config.channel.A)}")
    print(f"J={format_index_set(trellis.J)}, W={format_index_set(trellis.W)}")
    print(f"N={trellis.N} (N_s={trellis.N_s}, N_c={trellis.N_c}, K={trellis.K})")
    if args.dump_trellis:
        print(json.dumps(trellis_records(trellis), indent=2))
    return 0


def trellis_command_parser(subparsers=None):
    if subparsers is not None:
        parser = subparsers.add_parser("trellis")
    else:
        parser = argparse.ArgumentParser("dpolar trellis command")

    add_code_arguments(parser)
    parser.add_argument(
        "--dump-trellis",
        action="store_true",
        dest="dump_trellis",
        help="Print the (kind, i_c, i_s) record of every level.",
    )
    if subparsers is not None:
        parser.set_defaults(func=trellis_command)
    return parser
