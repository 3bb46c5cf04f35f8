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

import logging
import sys
from argparse import ArgumentParser

from dpolar.commands.bench import bench_command_parser
from dpolar.commands.construct import construct_command_parser
from dpolar.commands.decode import decode_command_parser
from dpolar.commands.sweep import sweep_command_parser
from dpolar.commands.trellis import trellis_command_parser
from dpolar.utils import ConfigError, ConsistencyError, FrameError


def main(argv=None):
    parser = ArgumentParser("dpolar CLI tool", usage="dpolar <command> [<args>]")
    parser.add_argument("--verbose", action="store_true", help="Log debug messages.")
    subparsers = parser.add_subparsers(help="dpolar command helpers")

    # Register commands
    sweep_command_parser(subparsers=subparsers)
    construct_command_parser(subparsers=subparsers)
    trellis_command_parser(subparsers=subparsers)
    decode_command_parser(subparsers=subparsers)
    bench_command_parser(subparsers=subparsers)

    # Let's go
    args = parser.parse_args(argv)

    if not hasattr(args, "func"):
        parser.print_help()
        sys.exit(1)

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    # Run
    try:
        code = args.func(args)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        sys.exit(2)
    except FrameError as e:
        print(f"Simulation failed: {e}\nReproduce with frame seed {e.frame_seed}", file=sys.stderr)
        sys.exit(3)
    except (ConsistencyError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(3)
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
