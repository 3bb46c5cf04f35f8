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

import numpy as np

from dpolar.commands.sweep import add_code_arguments, document_from_args
from dpolar.commands.trellis import TRELLIS_DEFAULTS
from dpolar.decoding import make_decoder
from dpolar.experiment import resolve_experiment
from dpolar.polar import channel_encode, compress_source
from dpolar.simulate import channel_pass, frame_seeds, generate_source
from dpolar.trellis import trellis_records


def format_bits(bits):
    return "".join(str(int(b)) for b in bits)


def decode_command(args):
    document = document_from_args(args, defaults=TRELLIS_DEFAULTS)
    document["ebn0"] = [args.ebn0]
    document["decoders"] = [args.decoder]
    document["list_sizes"] = [args.list_size]
    document.pop("runs", None)
    config = resolve_experiment(document, seed=args.seed)[0]

    source_seed, noise_seed = frame_seeds(config.base_seed, args.ebn0, args.frame)
    s = generate_source(config.source.N, config.source.p, source_seed)
    c_h = compress_source(s, config.source)
    x = channel_encode(c_h, config.channel)
    llrs = channel_pass(x, args.ebn0, config.rate, noise_seed, noiseless=args.noiseless)

    decoder = make_decoder(
        config.decoder, config.source, config.channel, config.list_size, min_sum=config.min_sum, trace=args.trace
    )
    result = decoder.decode(llrs)
    errors = int(np.count_nonzero(result.bits != s))

    if args.dump_trellis and config.decoder == "jscl":
        print(json.dumps(trellis_records(decoder.trellis), indent=2))
    print(f"frame {args.frame} @ {args.ebn0:g} dB, base seed {config.base_seed}")
    print(f"s     = {format_bits(s)}")
    print(f"c_H   = {format_bits(c_h)}")
    print(f"s_hat = {format_bits(result.bits)}")
    print(f"bit errors: {errors}, metric: {result.metric:.6f}")
    print(f"metric terms: {result.channel_terms} channel, {result.source_terms} source")
    if args.trace:
        for record in result.trace:
            print(json.dumps(record))
    return 0


def decode_command_parser(subparsers=None):
    if subparsers is not None:
        parser = subparsers.add_parser("decode")
    else:
        parser = argparse.ArgumentParser("dpolar decode command")

    add_code_arguments(parser)
    parser.add_argument("--ebn0", type=float, default=2.0, help="Eb/N0 of the frame, in dB.")
    parser.add_argument("--frame", type=int, default=0, help="Index of the frame to regenerate.")
    parser.add_argument("--decoder", type=str, choices=["jscl", "sep_scl"], default="jscl", help="Decoder to run.")
    parser.add_argument("--list-size", type=int, dest="list_size", default=8, help="List size L.")
    parser.add_argument("--noiseless", action="store_true", help="Feed saturated noise-free LLRs.")
    parser.add_argument("--trace", action="store_true", help="Print the surviving metrics at every level.")
    parser.add_argument(
        "--dump-trellis", action="store_true", dest="dump_trellis", help="Print the compound trellis (J-SCL only)."
    )
    if subparsers is not None:
        parser.set_defaults(func=decode_command)
    return parser
