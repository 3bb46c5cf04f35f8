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
"""Experiment presets and resolution, resumable BER sweeps with their output files, and BER curve analysis."""

import copy
import itertools
import math
import os

import numpy as np

from .construction import construct_channel_code, construct_source_code
from .decoding import DECODERS
from .polar import ChannelCodeSpec, SourceCodeSpec, is_power_of_two
from .simulate import SimConfig, run_point
from .utils import (
    ConfigError,
    FrameError,
    append_result_row,
    get_env_seed,
    point_key,
    read_result_rows,
    write_json,
    write_plot_file,
)


_LIST_32 = [{"decoder": "jscl", "list_size": 32}, {"decoder": "sep_scl", "list_size": 32}]

PRESETS = {
    "toy": {
        "name": "toy",
        "ns": 4,
        "k": 2,
        "nc": 4,
        "p": 0.07,
        "high_entropy_set": [1, 3],
        "information_set": [2, 4],
        "runs": [{"decoder": "jscl", "list_size": 16}, {"decoder": "sep_scl", "list_size": 16}],
        "ebn0": [0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
        "max_frames": 100000,
    },
    "n512_lists": {
        "name": "n512_lists",
        "ns": 512,
        "rs": 0.6,
        "rate": 0.5,
        "p": 0.07,
        "runs": [
            {"decoder": "jscl", "list_size": 4},
            {"decoder": "jscl", "list_size": 8},
            {"decoder": "jscl", "list_size": 32},
            {"decoder": "sep_scl", "list_size": 32},
        ],
        # the waterfall of the N_s = 512, R = 1/2 codes sits between -3 and -1 dB
        "ebn0": "-3:0:0.25",
    },
    "n512_sources": {
        "name": "n512_sources",
        "ns": 512,
        "rate": 0.5,
        "runs": _LIST_32,
        # two more dB so the top of the grid lies on the R_s = 0.5, p = 0.07 error floor
        "ebn0": "-3:1:0.25",
        "scenarios": [
            {"name": "n512_sources_p0.07_rs0.6", "p": 0.07, "rs": 0.6},
            {"name": "n512_sources_p0.07_rs0.5", "p": 0.07, "rs": 0.5},
            {"name": "n512_sources_p0.04_rs0.5", "p": 0.04, "rs": 0.5},
        ],
    },
    "n1024_rate1": {
        "name": "n1024_rate1",
        "ns": 1024,
        "rs": 0.5,
        "rate": 1.0,
        "runs": _LIST_32,
        "ebn0": "-2:1.5:0.5",
        "scenarios": [{"name": "n1024_rate1_p0.07", "p": 0.07}, {"name": "n1024_rate1_p0.04", "p": 0.04}],
    },
}

_KEY_ALIASES = {
    "n_s": "ns",
    "r_s": "rs",
    "r": "rate",
    "n_c": "nc",
    "h": "high_entropy_set",
    "a": "information_set",
    "l": "list_sizes",
    "ebn0_db": "ebn0",
    "base_seed": "seed",
    "decoder": "decoders",
}
KNOWN_KEYS = {
    "name",
    "ns",
    "rs",
    "k",
    "rate",
    "nc",
    "p",
    "list_sizes",
    "decoders",
    "runs",
    "ebn0",
    "seed",
    "max_frames",
    "target_frame_errors",
    "design_snr_db",
    "min_sum",
    "high_entropy_set",
    "information_set",
    "frozen",
    "batch_size",
    "target_ber",
    "scenarios",
}


def normalize_document(document):
    """
    Lower-cases the keys of an experiment document, maps the aliases (`N_s`, `R_s`, `R`, `N_c`, ...) to their
    canonical name and rejects unknown keys.
    """
    if not isinstance(document, dict):
        raise ConfigError(f"an experiment document must be a mapping, got {type(document).__name__}.")
    normalized = {}
    for key, value in document.items():
        name = str(key).lower()
        name = _KEY_ALIASES.get(name, name)
        if name not in KNOWN_KEYS:
            raise ConfigError(f"unknown key, expected one of {sorted(KNOWN_KEYS)}.", key=str(key))
        normalized[name] = value
    return normalized


def get_preset(name):
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}, expected one of {sorted(PRESETS)}.", key="preset")
    return copy.deepcopy(PRESETS[name])


def parse_ebn0_grid(value):
    """
    Accepts a list of values, a single value, a comma-separated string or a `"start:stop:step"` string (both ends
    included).
    """
    if isinstance(value, str) and ":" in value:
        try:
            start, stop, step = (float(v) for v in value.split(":"))
        except ValueError:
            raise ConfigError(f"expected 'start:stop:step', got {value!r}.", key="ebn0")
        if step <= 0 or stop < start:
            raise ConfigError(f"expected an increasing range, got {value!r}.", key="ebn0")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 6) for i in range(count))
    if isinstance(value, str):
        value = [v for v in value.replace(" ", ",").split(",") if v]
    values = value if isinstance(value, (list, tuple)) else [value]
    try:
        grid = tuple(float(v) for v in values)
    except (TypeError, ValueError):
        raise ConfigError(f"expected numbers, got {value!r}.", key="ebn0")
    if len(grid) == 0:
        raise ConfigError("the Eb/N0 grid is empty.", key="ebn0")
    return grid


def _positive_int(document, key, default=None):
    value = document.get(key, default)
    if value is None:
        raise ConfigError("is required.", key=key)
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
        raise ConfigError(f"must be a positive integer, got {value!r}.", key=key)
    return int(value)


def _fraction(document, key, low, high, closed_high=True):
    value = document.get(key)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"must be a number, got {value!r}.", key=key)
    if not (low < value < high or (closed_high and value == high)):
        raise ConfigError(f"must be in ({low}, {high}{']' if closed_high else ')'}, got {value}.", key=key)
    return value


def _runs(document):
    if "runs" in document:
        runs = []
        for run in document["runs"]:
            if not isinstance(run, dict) or "decoder" not in run or "list_size" not in run:
                raise ConfigError("every run needs a `decoder` and a `list_size`.", key="runs")
            runs.append((run["decoder"], _positive_int(run, "list_size")))
    else:
        decoders = document.get("decoders", ["jscl"])
        decoders = [decoders] if isinstance(decoders, str) else list(decoders)
        list_sizes = document.get("list_sizes", [32])
        list_sizes = [list_sizes] if isinstance(list_sizes, (int, np.integer)) else list(list_sizes)
        runs = [
            (decoder, _positive_int({"list_sizes": size}, "list_sizes"))
            for decoder, size in itertools.product(decoders, list_sizes)
        ]
    for decoder, _ in runs:
        if decoder not in DECODERS:
            raise ConfigError(f"unknown decoder {decoder!r}, expected one of {sorted(DECODERS)}.", key="decoders")
    if not runs:
        raise ConfigError("no decoder runs requested.", key="runs")
    return runs


def resolve_code_lengths(document):
    """
    Resolves `(N_s, K, N_c)` from an experiment document. `K` is `k`, or `N_s * R_s` rounded half up. `N_c` is `nc`,
    or `N_s / R` with `R` the overall rate; it must be a power of two.
    """
    source_length = _positive_int(document, "ns")
    if not is_power_of_two(source_length):
        raise ConfigError(f"must be a power of two, got {source_length}.", key="ns")

    if "k" in document:
        K = _positive_int(document, "k")
    elif "rs" in document:
        K = int(math.floor(source_length * _fraction(document, "rs", 0.0, 1.0) + 0.5))
    else:
        raise ConfigError("either `k` or `rs` is required.", key="k")
    if not 1 <= K <= source_length:
        raise ConfigError(f"must be between 1 and N_s={source_length}, got {K}.", key="k")

    if "nc" in document:
        code_length = _positive_int(document, "nc")
        if not is_power_of_two(code_length):
            raise ConfigError(f"must be a power of two, got {code_length}.", key="nc")
    elif "rate" in document:
        rate = _fraction(document, "rate", 0.0, float("inf"), closed_high=False)
        exact = source_length / rate
        code_length = int(round(exact))
        if abs(exact - code_length) > 1e-9 * exact or not is_power_of_two(code_length):
            raise ConfigError(
                f"N_s / R = {source_length} / {rate} = {exact:g} is not a power of two, so no channel code has this "
                "rate.",
                key="rate",
            )
    else:
        raise ConfigError("either `nc` or `rate` is required.", key="nc")
    if K > code_length:
        raise ConfigError(f"K={K} does not fit in a channel code of length N_c={code_length}.", key="k")
    return source_length, K, code_length


def _resolve_scenario(document):
    name = str(document.get("name", "dpolar"))
    source_length, K, code_length = resolve_code_lengths(document)
    n_s, n_c = source_length.bit_length() - 1, code_length.bit_length() - 1
    p = _fraction(document, "p", 0.0, 0.5, closed_high=False)
    grid = parse_ebn0_grid(document.get("ebn0", [1.0]))
    runs = _runs(document)
    rate = source_length / code_length

    seed = document.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
        raise ConfigError(f"must be a non-negative integer, got {seed!r}.", key="seed")
    settings = {
        "max_frames": _positive_int(document, "max_frames", 10**8),
        "target_frame_errors": _positive_int(document, "target_frame_errors", 100),
        "batch_size": _positive_int(document, "batch_size", 64),
        "min_sum": bool(document.get("min_sum", False)),
        "base_seed": int(seed),
    }

    try:
        if "high_entropy_set" in document:
            source = SourceCodeSpec(n_s=n_s, K=K, H=tuple(document["high_entropy_set"]), p=p)
        else:
            source = construct_source_code(n_s, K, p)
    except ValueError as e:
        raise ConfigError(str(e), key="high_entropy_set") from e

    frozen = document.get("frozen")
    design_snr_db = document.get("design_snr_db")
    try:
        if "information_set" in document:
            fixed = ChannelCodeSpec(n_c=n_c, K=K, A=tuple(document["information_set"]), frozen_values=frozen)
        elif design_snr_db is not None:
            fixed = construct_channel_code(n_c, K, float(design_snr_db), rate=rate, frozen_values=frozen)
        else:
            fixed = None
    except ValueError as e:
        raise ConfigError(str(e), key="information_set") from e

    configs = []
    for ebn0_db in grid:
        # without a fixed code the channel code is designed at the simulated point
        channel = fixed or construct_channel_code(n_c, K, ebn0_db, rate=rate, frozen_values=frozen)
        for decoder, list_size in runs:
            configs.append(
                SimConfig(
                    source=source,
                    channel=channel,
                    list_size=list_size,
                    decoder=decoder,
                    ebn0_grid_db=(ebn0_db,),
                    name=name,
                    **settings,
                )
            )
    return configs


def resolve_experiment(document, seed=None):
    """
    Resolves an experiment document into one [`SimConfig`] per scenario, decoder run and Eb/N0 point.

    The base seed is `seed` if given, else `DPOLAR_SEED` if set, else the one of the document. A document may hold
    `scenarios`, a list of partial documents each merged over the top-level keys.

    Args:
        document (`dict`): The experiment document.
        seed (`int`, *optional*): Base seed overriding every other source.

    Returns:
        `List[SimConfig]`: The configurations, in scenario, point then run order.

    Raises:
        [`ConfigError`]: If the document cannot be resolved.
    """
    document = normalize_document(document)
    seed = seed if seed is not None else get_env_seed()
    if seed is not None:
        document["seed"] = seed
    scenarios = document.pop("scenarios", None) or [{}]
    configs, names = [], set()
    for scenario in scenarios:
        merged = {**document, **normalize_document(scenario)}
        configs_of_scenario = _resolve_scenario(merged)
        name = configs_of_scenario[0].name
        if name in names:
            raise ConfigError(f"two scenarios are named {name!r}.", key="name")
        names.add(name)
        configs.extend(configs_of_scenario)
    return configs


def run_stem(config):
    return f"{config.name}_{config.decoder}_L{config.list_size}"


def describe_configs(configs):
    """One line per scenario with its lengths and effective rates."""
    lines, seen = [], set()
    for config in configs:
        if config.name in seen:
            continue
        seen.add(config.name)
        source, channel = config.source, config.channel
        lines.append(
            f"{config.name}: N_s={source.N}, K={source.K}, N_c={channel.N}, p={source.p:g}, "
            f"R_s={source.rate:.4f}, R_c={channel.rate:.4f}, R={channel.rate / source.rate:.4f}"
        )
    return lines


def config_record(config):
    return {
        "name": config.name,
        "decoder": config.decoder,
        "list_size": config.list_size,
        "ebn0_db": config.ebn0_grid_db[0],
        "base_seed": config.base_seed,
        "source": config.source.to_dict(),
        "channel": config.channel.to_dict(),
    }


def ebn0_at_ber(points, target_ber):
    """
    Eb/N0 at which a BER curve crosses `target_ber`, interpolating `log10(BER)` linearly between the two points that
    bracket it.

    Args:
        points (`List[Tuple[float, float]]`): `(Eb/N0 in dB, BER)` pairs.
        target_ber (`float`): The BER to reach.

    Returns:
        `Optional[float]`: The interpolated Eb/N0, or `None` if the curve never crosses the target.
    """
    points = sorted((float(e), float(b)) for e, b in points)
    for (e1, b1), (e2, b2) in zip(points, points[1:]):
        if b1 >= target_ber > b2:
            if b2 <= 0:
                return e2
            t = (math.log10(b1) - math.log10(target_ber)) / (math.log10(b1) - math.log10(b2))
            return e1 + t * (e2 - e1)
    for e, b in points:
        if b == target_ber:
            return e
    return None


def ber_slope(points, span_db=1.0):
    """
    Slope, in decades per dB, of a least-squares line through `log10(BER)` over the last `span_db` of the curve. A
    slope close to zero at high Eb/N0 reveals an error floor.
    """
    points = sorted((float(e), float(b)) for e, b in points if float(b) > 0)
    if len(points) < 2:
        return None
    last = points[-1][0]
    tail = [(e, b) for e, b in points if e >= last - span_db]
    if len(tail) < 2:
        tail = points[-2:]
    ebn0 = np.array([e for e, _ in tail])
    log_ber = np.log10([b for _, b in tail])
    slope, _ = np.polyfit(ebn0, log_ber, 1)
    return float(slope)


def _report_gains(curves, target_ber):
    if not curves:
        return
    crossings = {stem: ebn0_at_ber(points, target_ber) for stem, points in curves.items()}
    print(f"Eb/N0 at BER={target_ber:g}:")
    for stem, crossing in crossings.items():
        print(f"  {stem}: {'not reached' if crossing is None else f'{crossing:.2f} dB'}")
    reference_stem = next(iter(crossings))
    reference = crossings[reference_stem]
    if reference is None:
        return
    for stem, crossing in crossings.items():
        if stem != reference_stem and crossing is not None:
            print(f"  gain of {stem} over {reference_stem}: {reference - crossing:+.2f} dB")


def run_sweep(configs, output_dir, workers=1, resume=True, progress=True, document=None, target_ber=1e-4):
    """
    Runs a list of configurations and streams the results to `output_dir`:

    - `<name>_<decoder>_L<L>.csv`: one row per Eb/N0 point, appended and flushed as soon as the point is done;
    - `<name>_<decoder>_L<L>.dat`: the two-column `ebn0_db ber` plot file;
    - `experiment.json`: the dpolar version, the experiment document and every resolved code.

    Points already present in a results file are skipped when `resume` is set.

    Returns:
        `int`: 0 on success.
    """
    from . import __version__

    os.makedirs(output_dir, exist_ok=True)
    experiment = dict(document or {})
    if configs:
        experiment["seed"] = configs[0].base_seed
    sidecar = {
        "dpolar_version": __version__,
        "experiment": experiment,
        "resolved": [config_record(config) for config in configs],
    }
    write_json(os.path.join(output_dir, "experiment.json"), sidecar)

    stems = []
    for config in configs:
        stem = run_stem(config)
        if stem not in stems:
            stems.append(stem)
        csv_path = os.path.join(output_dir, f"{stem}.csv")
        done = read_result_rows(csv_path) if resume else {}
        for ebn0_db in config.ebn0_grid_db:
            if point_key(ebn0_db) in done:
                print(f"Skipping {stem} @ {ebn0_db:g} dB, already in {csv_path}.")
                continue
            try:
                point = run_point(config, ebn0_db, workers=workers, progress=progress)
            except FrameError as e:
                write_json(os.path.join(output_dir, "failure.json"), {"error": str(e), "frame_seed": e.frame_seed})
                raise
            append_result_row(csv_path, point.to_row())
            print(
                f"{stem} @ {ebn0_db:g} dB: BER={point.ber:.3e} FER={point.fer:.3e} "
                f"({point.frame_errors} frame errors in {point.frames_run} frames"
                f"{', low confidence' if point.low_confidence else ''})"
            )

    curves = {}
    for stem in stems:
        rows = list(read_result_rows(os.path.join(output_dir, f"{stem}.csv")).values())
        write_plot_file(os.path.join(output_dir, f"{stem}.dat"), rows)
        curves[stem] = [(row["ebn0_db"], row["ber"]) for row in rows]
    _report_gains(curves, target_ber)
    return 0
