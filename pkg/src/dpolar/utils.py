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

import csv
import json
import os

import yaml
from packaging import version as package_version


RESULT_COLUMNS = ["ebn0_db", "frames", "bit_errors", "frame_errors", "ber", "fer", "low_confidence", "seconds"]


class ConfigError(ValueError):
    """
    Raised when an experiment document or the command line flags cannot be resolved into runnable experiments.

    Args:
        message (`str`): What is wrong.
        key (`str`, *optional*): The offending configuration key.
    """

    def __init__(self, message, key=None):
        super().__init__(f"{key}: {message}" if key is not None else message)
        self.message = message
        self.key = key

    def __reduce__(self):
        return (ConfigError, (self.message, self.key))


class ConsistencyError(RuntimeError):
    """Raised when a trellis or a decoder state is internally inconsistent."""


class FrameError(RuntimeError):
    """
    Raised when one simulated frame fails. Carries the seed that reproduces the frame.
    """

    def __init__(self, message, frame_seed=None):
        super().__init__(message)
        self.frame_seed = frame_seed

    def __reduce__(self):
        return (FrameError, (self.args[0], self.frame_seed))


def get_env_seed():
    """
    Returns the base seed set through `DPOLAR_SEED`, or `None` if the variable is unset.
    """
    value = os.getenv("DPOLAR_SEED")
    if value is None or value.strip() == "":
        return None
    try:
        seed = int(value)
    except ValueError:
        raise ConfigError(f"must be a non-negative integer, got {value!r}.", key="DPOLAR_SEED")
    if seed < 0:
        raise ConfigError(f"must be a non-negative integer, got {value!r}.", key="DPOLAR_SEED")
    return seed


def get_env_workers(default=1):
    value = os.getenv("DPOLAR_WORKERS")
    if value is None or value.strip() == "":
        return default
    try:
        workers = int(value)
    except ValueError:
        raise ConfigError(f"must be a positive integer, got {value!r}.", key="DPOLAR_WORKERS")
    if workers < 1:
        raise ConfigError(f"must be a positive integer, got {value!r}.", key="DPOLAR_WORKERS")
    return workers


def check_sidecar_version(sidecar_version, current_version):
    """
    Refuses sidecars written by a newer dpolar, whose documents may hold keys this version does not know.
    """
    try:
        written = package_version.parse(str(sidecar_version))
    except package_version.InvalidVersion:
        raise ConfigError(f"is not a valid version: {sidecar_version!r}.", key="dpolar_version")
    if package_version.parse(current_version).release < written.release:
        raise ConfigError(
            f"the file was written by dpolar {sidecar_version}, which is newer than the installed {current_version}.",
            key="dpolar_version",
        )


def read_experiment_document(path):
    """
    Reads an experiment document (YAML or JSON). A results sidecar is accepted as well: its `experiment` entry is
    returned after the version it was written with has been checked.
    """
    from . import __version__

    if not os.path.isfile(path):
        raise ConfigError(f"no such file: {path}.", key="config")
    with open(path, "r", encoding="utf-8") as f:
        try:
            document = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path} is not valid YAML/JSON ({e}).", key="config") from e
    if not isinstance(document, dict):
        raise ConfigError(f"{path} must hold a mapping at the top level.", key="config")
    if "dpolar_version" in document:
        check_sidecar_version(document["dpolar_version"], __version__)
        document = document.get("experiment")
        if not isinstance(document, dict):
            raise ConfigError(f"{path} has no `experiment` entry.", key="config")
    return document


def write_json(path, content):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(content, f, indent=2)
        f.write("\n")


def point_key(ebn0_db):
    """Identity of one sweep point inside a results file."""
    return round(float(ebn0_db), 6)


def read_result_rows(csv_path):
    """
    Returns the rows already written to a results file, keyed by point identity. Missing files give no rows.
    """
    if not os.path.isfile(csv_path):
        return {}
    with open(csv_path, "r", encoding="utf-8", newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != RESULT_COLUMNS:
            raise ConfigError(
                f"{csv_path} does not have the expected header {','.join(RESULT_COLUMNS)}.", key="out_dir"
            )
        return {point_key(row["ebn0_db"]): row for row in reader}


def append_result_row(csv_path, row):
    """
    Appends one row to a results file, writing the header first if the file is new. The row is flushed right away
    so an interrupted sweep keeps every finished point.
    """
    is_new = not os.path.isfile(csv_path) or os.path.getsize(csv_path) == 0
    with open(csv_path, "a", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=RESULT_COLUMNS)
        if is_new:
            writer.writeheader()
        writer.writerow(row)
        f.flush()


def write_plot_file(plot_path, rows):
    """
    Writes the two-column `ebn0_db ber` file used for plotting, sorted by Eb/N0.
    """
    points = sorted((float(row["ebn0_db"]), float(row["ber"])) for row in rows)
    with open(plot_path, "w", encoding="utf-8") as f:
        f.write("# ebn0_db ber\n")
        for ebn0_db, ber in points:
            f.write(f"{ebn0_db:g} {ber:.6e}\n")
