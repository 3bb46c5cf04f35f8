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
import os

from dpolar.experiment import describe_configs, get_preset, normalize_document, resolve_experiment, run_sweep
from dpolar.utils import ConfigError, get_env_workers, read_experiment_document


# flag name -> document key, for the flags that map one to one
FLAG_KEYS = {
    "ns": "ns",
    "rs": "rs",
    "k": "k",
    "rate": "rate",
    "nc": "nc",
    "p": "p",
    "list_sizes": "list_sizes",
    "decoder": "decoders",
    "ebn0": "ebn0",
    "max_frames": "max_frames",
    "target_errors": "target_frame_errors",
    "design_snr": "design_snr_db",
    "high_entropy_set": "high_entropy_set",
    "information_set": "information_set",
}


def add_code_arguments(parser):
    """
    The flags that describe a D-Polar system, shared by all the commands.
    """
    parser.add_argument("--config", type=str, help="YAML/JSON experiment document, or a results sidecar to re-run.")
    parser.add_argument("--preset", type=str, help="Named experiment: toy, n512_lists, n512_sources or n1024_rate1.")
    parser.add_argument("--ns", type=int, help="Source block length N_s (a power of two).")
    parser.add_argument("--rs", type=float, help="Compression rate R_s; K is N_s * R_s rounded.")
    parser.add_argument("--k", type=int, help="Number of high-entropy / information bits K (overrides --rs).")
    parser.add_argument("--rate", type=float, help="Overall rate R; the codeword length is N_s / R.")
    parser.add_argument("--nc", type=int, help="Codeword length N_c (overrides --rate).")
    parser.add_argument("--p", type=float, help="Probability of a one in the source, in (0, 0.5).")
    parser.add_argument(
        "--design-snr",
        type=float,
        dest="design_snr",
        help="Design Eb/N0 of the channel code, in dB. By default the code is designed at every simulated point.",
    )
    parser.add_argument(
        "--high-entropy-set", type=int, nargs="+", dest="high_entropy_set", help="Explicit 1-based set H."
    )
    parser.add_argument(
        "--information-set", type=int, nargs="+", dest="information_set", help="Explicit 1-based set A."
    )
    parser.add_argument("--min-sum", action="store_true", dest="min_sum", help="Use the min-sum check-node update.")
    parser.add_argument("--seed", type=int, help="Base seed (overrides the document and DPOLAR_SEED).")


def document_from_args(args, defaults=None):
    """
    Builds the experiment document of a command: the preset or the `--config` file, then every flag that was given.
    """
    if getattr(args, "config", None) is not None and getattr(args, "preset", None) is not None:
        raise ConfigError("pass either --config or --preset, not both.", key="config")
    if getattr(args, "config", None) is not None:
        document = normalize_document(read_experiment_document(args.config))
    elif getattr(args, "preset", None) is not None:
        document = normalize_document(get_preset(args.preset))
    else:
        document = dict(defaults or {})

    for flag, key in FLAG_KEYS.items():
        value = getattr(args, flag, None)
        if value is None:
            continue
        if flag in ("ns", "rs", "k", "rate", "nc"):
            # a length or rate flag replaces the way the document derived it
            for related in {"ns": (), "rs": ("k",), "k": ("rs",), "rate": ("nc",), "nc": ("rate",)}[flag]:
                document.pop(related, None)
        if flag in ("list_sizes", "decoder"):
            document.pop("runs", None)
        document[key] = value
    if getattr(args, "min_sum", False):
        document["min_sum"] = True
    return document


def sweep_command(args):
    document = document_from_args(args)
    configs = resolve_experiment(document, seed=args.seed)
    for line in describe_configs(configs):
        print(line)
    workers = args.workers if args.workers is not None else get_env_workers(default=os.cpu_count() or 1)
    target_ber = float(document.get("target_ber", 1e-4))
    return run_sweep(
        configs,
        args.out_dir,
        workers=workers,
        resume=not args.no_resume,
        progress=not args.quiet,
        document=document,
        target_ber=target_ber,
    )


def sweep_command_parser(subparsers=None):
    if subparsers is not None:
        parser = subparsers.add_parser("sweep")
    else:
        parser = argparse.ArgumentParser("dpolar sweep command")

    add_code_arguments(parser)
    parser.add_argument("--list-sizes", type=int, nargs="+", dest="list_sizes", help="List sizes L to simulate.")
    parser.add_argument(
        "--decoder", type=str, nargs="+", choices=["jscl", "sep_scl"], help="Decoders to simulate (default: jscl)."
    )
    parser.add_argument(
        "--ebn0",
        type=str,
        help="Eb/N0 points in dB: a comma-separated list or a 'start:stop:step' range (both ends included).",
    )
    parser.add_argument("--max-frames", type=int, dest="max_frames", help="Frame cap per point.")
    parser.add_argument(
        "--target-errors", type=int, dest="target_errors", help="Frame errors after which a point stops (default 100)."
    )
    parser.add_argument(
        "--workers", type=int, help="Worker processes (defaults to DPOLAR_WORKERS, then the CPU count)."
    )
    parser.add_argument("--out-dir", type=str, dest="out_dir", default="./results/", help="Where results are written.")
    parser.add_argument("--no-resume", action="store_true", dest="no_resume", help="Re-run points already on disk.")
    parser.add_argument("--quiet", action="store_true", help="Hide the progress bars.")
    if subparsers is not None:
        parser.set_defaults(func=sweep_command)
    return parser
