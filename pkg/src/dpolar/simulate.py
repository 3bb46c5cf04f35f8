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
"""
Monte Carlo BER/FER estimation of a D-Polar system over BPSK + AWGN.

Every frame owns its random streams: the source word and the channel noise are drawn from two Philox generators
seeded from `(base_seed, Eb/N0, frame index)`. Frames are scheduled in fixed-size batches and their outcomes are
consumed in frame order, so the counts of a point do not depend on the number of workers.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from tqdm import tqdm

from .decoding import LLR_MAX, make_decoder
from .polar import ChannelCodeSpec, SourceCodeSpec, channel_encode, check_compatible, compress_source
from .utils import ConsistencyError, FrameError


@dataclass
class SimConfig:
    """
    Everything needed to simulate one decoder on one code pair.

    Args:
        source ([`SourceCodeSpec`]): The source code, which also carries the source probability `p`.
        channel ([`ChannelCodeSpec`]): The channel code.
        list_size (`int`): The list size `L`.
        decoder (`str`, *optional*, defaults to `"jscl"`): `"jscl"` or `"sep_scl"`.
        ebn0_grid_db (`Tuple[float]`, *optional*): The Eb/N0 points, in dB.
        max_frames (`int`, *optional*, defaults to 10**8): Hard cap on the frames simulated at one point.
        target_frame_errors (`int`, *optional*, defaults to 100): A point stops once this many frames failed.
        base_seed (`int`, *optional*, defaults to 0): Seed every frame stream derives from.
        min_sum (`bool`, *optional*, defaults to `False`): Use the min-sum check-node update.
        batch_size (`int`, *optional*, defaults to 64): Frames scheduled together.
        noiseless (`bool`, *optional*, defaults to `False`): Skip the noise and feed saturated LLRs.
        name (`str`, *optional*): Scenario name, used for the output files.
    """

    source: SourceCodeSpec
    channel: ChannelCodeSpec
    list_size: int
    decoder: str = "jscl"
    ebn0_grid_db: tuple = ()
    max_frames: int = 10**8
    target_frame_errors: int = 100
    base_seed: int = 0
    min_sum: bool = False
    batch_size: int = 64
    noiseless: bool = False
    name: str = "dpolar"

    def __post_init__(self):
        check_compatible(self.source, self.channel)
        if self.list_size < 1:
            raise ValueError(f"The list size must be at least 1, supplied value was {self.list_size}.")
        if self.max_frames < 1 or self.target_frame_errors < 1 or self.batch_size < 1:
            raise ValueError("`max_frames`, `target_frame_errors` and `batch_size` must all be positive.")
        self.ebn0_grid_db = tuple(float(e) for e in self.ebn0_grid_db)

    @property
    def rate(self):
        """Overall rate `R = N_s / N_c` (source symbols per channel use)."""
        return self.source.N / self.channel.N


@dataclass
class BerPoint:
    """
    Result of one Eb/N0 point.

    Args:
        ebn0_db (`float`): The Eb/N0, in dB.
        frames_run (`int`): Frames simulated.
        bit_errors (`int`): Source bits decoded wrongly.
        frame_errors (`int`): Frames with at least one wrong source bit.
        wall_time (`float`): Seconds spent on the point.
        low_confidence (`bool`): Whether the point stopped on `max_frames` before reaching the error target.
    """

    ebn0_db: float
    frames_run: int
    bit_errors: int
    frame_errors: int
    wall_time: float
    low_confidence: bool
    source_length: int = 1

    @property
    def ber(self):
        return self.bit_errors / (self.frames_run * self.source_length) if self.frames_run else 0.0

    @property
    def fer(self):
        return self.frame_errors / self.frames_run if self.frames_run else 0.0

    def counts(self):
        return (self.frames_run, self.bit_errors, self.frame_errors, self.low_confidence)

    def to_row(self):
        return {
            "ebn0_db": repr(float(self.ebn0_db)),
            "frames": self.frames_run,
            "bit_errors": self.bit_errors,
            "frame_errors": self.frame_errors,
            "ber": f"{self.ber:.6e}",
            "fer": f"{self.fer:.6e}",
            "low_confidence": int(self.low_confidence),
            "seconds": f"{self.wall_time:.3f}",
        }


def noise_variance(ebn0_db, rate):
    """
    `σ² = 1 / (2 R 10^(Eb/N0 / 10))` for unit-energy BPSK at `R` source bits per channel use.
    """
    if rate <= 0:
        raise ValueError(f"The rate must be positive, supplied value was {rate}.")
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def make_generator(seed):
    return np.random.Generator(np.random.Philox(seed))


def generate_source(N_s, p, seed):
    """
    Draws `N_s` i.i.d. Bernoulli(`p`) bits.

    Args:
        N_s (`int`): Number of bits.
        p (`float`): Probability of a one, in (0, 0.5).
        seed (`int` or `np.random.SeedSequence`): Seed of the Philox stream.
    """
    if not 0.0 < p < 0.5:
        raise ValueError(f"`p` must be in (0, 0.5), supplied value was {p}.")
    if N_s < 1:
        raise ValueError(f"`N_s` must be positive, supplied value was {N_s}.")
    return (make_generator(seed).random(N_s) < p).astype(np.uint8)


def bpsk_modulate(x):
    return 1.0 - 2.0 * np.asarray(x, dtype=np.float64)


def add_awgn(symbols, sigma2, seed):
    return symbols + math.sqrt(sigma2) * make_generator(seed).standard_normal(symbols.shape)


def channel_pass(x, ebn0_db, rate, seed, noiseless=False):
    """
    BPSK (`0 -> +1`) over AWGN at `Eb/N0 = ebn0_db`, returning the channel LLRs `2y / σ²` saturated at `±LLR_MAX`.

    Args:
        x (`np.ndarray`): The codeword.
        ebn0_db (`float`): Eb/N0, in dB.
        rate (`float`): Source bits per channel use, used to calibrate the noise variance.
        seed (`int` or `np.random.SeedSequence`): Seed of the noise stream.
        noiseless (`bool`, *optional*, defaults to `False`): Return `±LLR_MAX` without drawing any noise.
    """
    symbols = bpsk_modulate(x)
    if noiseless:
        return symbols * LLR_MAX
    sigma2 = noise_variance(ebn0_db, rate)
    y = add_awgn(symbols, sigma2, seed)
    return np.clip(2.0 * y / sigma2, -LLR_MAX, LLR_MAX)


def frame_seeds(base_seed, ebn0_db, frame_index):
    """
    The source and noise seeds of one frame. They only depend on the base seed, the point and the frame index.
    """
    point = int(round(ebn0_db * 1000)) % 2**32
    root = np.random.SeedSequence([int(base_seed), point, int(frame_index)])
    source_seed, noise_seed = root.spawn(2)
    return source_seed, noise_seed


class FrameSimulator:
    """
    Simulates single frames of one configuration at one Eb/N0. Every worker process owns one simulator, hence one
    decoder.
    """

    def __init__(self, config, ebn0_db):
        self.config = config
        self.ebn0_db = float(ebn0_db)
        self.decoder = make_decoder(
            config.decoder, config.source, config.channel, config.list_size, min_sum=config.min_sum
        )

    def __call__(self, frame_index):
        config = self.config
        source_seed, noise_seed = frame_seeds(config.base_seed, self.ebn0_db, frame_index)
        s = generate_source(config.source.N, config.source.p, source_seed)
        x = channel_encode(compress_source(s, config.source), config.channel)
        llrs = channel_pass(x, self.ebn0_db, config.rate, noise_seed, noiseless=config.noiseless)
        try:
            s_hat = self.decoder.decode(llrs).bits
        except ConsistencyError as e:
            seed = {"base_seed": config.base_seed, "ebn0_db": self.ebn0_db, "frame_index": int(frame_index)}
            raise FrameError(f"Frame {frame_index} at {self.ebn0_db:g} dB failed: {e}", frame_seed=seed) from e
        bit_errors = int(np.count_nonzero(s_hat != s))
        return bit_errors, bit_errors > 0


_worker_simulator = None


def _init_worker(config, ebn0_db):
    global _worker_simulator
    _worker_simulator = FrameSimulator(config, ebn0_db)


def _simulate_in_worker(frame_index):
    return _worker_simulator(frame_index)


def run_point(config, ebn0_db, workers=1, progress=True):
    """
    Simulates one Eb/N0 point until `target_frame_errors` frames failed or `max_frames` frames were run.

    Frames are processed in batches of `config.batch_size` and their outcomes are scanned in frame order; the point
    stops exactly at the frame that reaches the error target, whatever the number of workers.

    Args:
        config ([`SimConfig`]): What to simulate.
        ebn0_db (`float`): The Eb/N0, in dB.
        workers (`int`, *optional*, defaults to 1): Number of worker processes; 1 runs in this process.
        progress (`bool`, *optional*, defaults to `True`): Whether to show a progress bar.

    Returns:
        [`BerPoint`]: The counts of the point.
    """
    if workers < 1:
        raise ValueError(f"`workers` must be positive, supplied value was {workers}.")
    start = time.perf_counter()
    frames_run = bit_errors = frame_errors = 0
    executor = None
    if workers > 1:
        executor = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(config, ebn0_db))
        simulate = _simulate_in_worker
    else:
        simulate = FrameSimulator(config, ebn0_db)

    description = f"{config.decoder} L={config.list_size} @ {ebn0_db:g} dB"
    try:
        with tqdm(total=config.max_frames, desc=description, unit="frame", disable=not progress, leave=False) as bar:
            next_frame = 0
            while frame_errors < config.target_frame_errors and next_frame < config.max_frames:
                batch = range(next_frame, min(next_frame + config.batch_size, config.max_frames))
                outcomes = executor.map(simulate, batch) if executor is not None else map(simulate, batch)
                for frame_bit_errors, failed in outcomes:
                    frames_run += 1
                    bit_errors += frame_bit_errors
                    frame_errors += failed
                    if frame_errors >= config.target_frame_errors:
                        break
                next_frame = batch.stop
                bar.update(frames_run - bar.n)
                bar.set_postfix(frame_errors=frame_errors)
    finally:
        if executor is not None:
            executor.shutdown(cancel_futures=True)

    point = BerPoint(
        ebn0_db=float(ebn0_db),
        frames_run=frames_run,
        bit_errors=bit_errors,
        frame_errors=frame_errors,
        wall_time=time.perf_counter() - start,
        low_confidence=frame_errors < config.target_frame_errors,
        source_length=config.source.N,
    )
    logging.debug(
        f"{description}: {frames_run} frames, {bit_errors} bit errors, {frame_errors} frame errors in "
        f"{point.wall_time:.1f}s"
    )
    return point


def run_sweep_points(config, workers=1, progress=True):
    """Runs every point of `config.ebn0_grid_db`, in order."""
    return [run_point(config, ebn0_db, workers=workers, progress=progress) for ebn0_db in config.ebn0_grid_db]


def benchmark_decoder(config, ebn0_db, frames=20, list_sizes=None):
    """
    Average decoding time per frame for several list sizes, on the same frames.

    Returns:
        `List[Tuple[int, float]]`: `(L, seconds per frame)` pairs.
    """
    list_sizes = list_sizes or [config.list_size]
    inputs = []
    for frame_index in range(frames):
        source_seed, noise_seed = frame_seeds(config.base_seed, ebn0_db, frame_index)
        s = generate_source(config.source.N, config.source.p, source_seed)
        x = channel_encode(compress_source(s, config.source), config.channel)
        inputs.append(channel_pass(x, ebn0_db, config.rate, noise_seed, noiseless=config.noiseless))

    timings = []
    for list_size in list_sizes:
        decoder = make_decoder(config.decoder, config.source, config.channel, list_size, min_sum=config.min_sum)
        start = time.perf_counter()
        for llrs in tqdm(inputs, desc=f"{config.decoder} L={list_size}", leave=False):
            decoder.decode(llrs)
        timings.append((list_size, (time.perf_counter() - start) / max(frames, 1)))
    return timings
