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
Gaussian-approximation (GA) construction of the two polar codes.

The LLR of every bit-channel is modelled as a consistent Gaussian `N(m, 2m)` and only its mean `m` is tracked. One
polarization step maps a mean `m` to the pair

    minus(m) = phi^{-1}(1 - (1 - phi(m))**2)
    plus(m)  = 2 * m

with the two-segment approximation

    phi(x) = exp(-0.4527 * x**0.86 + 0.0218)                     for 0 < x < 10
    phi(x) = sqrt(pi / x) * exp(-x / 4) * (1 - 10 / (7 * x))     for x >= 10
    phi(0) = 1

The second segment is evaluated in the log domain, so large means never underflow. Its inverse has no closed form and
is found with `scipy.optimize.brentq`.
"""

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .polar import ChannelCodeSpec, SourceCodeSpec


GA_SWITCH = 10.0
_A, _B, _C = 0.4527, 0.86, 0.0218


def _log_phi_upper(x):
    return 0.5 * math.log(math.pi / x) - x / 4.0 + math.log1p(-10.0 / (7.0 * x))


# Values of phi below this threshold are inverted on the upper segment.
_UPPER_SEGMENT_START = math.exp(_log_phi_upper(GA_SWITCH))


def ga_phi(x):
    """
    The GA mean-evolution function `phi` (see the module docstring).
    """
    x = float(x)
    if x < 0:
        raise ValueError(f"`phi` is only defined for non-negative means, supplied value was {x}.")
    if x == 0:
        return 1.0
    if x < GA_SWITCH:
        return math.exp(-_A * x**_B + _C)
    return math.exp(_log_phi_upper(x))


def _ga_phi_inverse_log(log_y):
    if log_y >= 0:
        return 0.0
    if log_y > math.log(_UPPER_SEGMENT_START):
        return max(((_C - log_y) / _A) ** (1.0 / _B), 0.0)
    # log(phi) < -x / 4 on the upper segment, so the root lies below -4 * log_y
    upper = max(GA_SWITCH, -4.0 * log_y) + 1.0
    return brentq(lambda x: _log_phi_upper(x) - log_y, GA_SWITCH, upper, xtol=1e-12)


def ga_phi_inverse(y):
    """
    Inverse of [`ga_phi`]: closed form on the first segment, `brentq` on the second.
    """
    y = float(y)
    if not 0 < y <= 1:
        raise ValueError(f"`phi^-1` is only defined on (0, 1], supplied value was {y}.")
    return _ga_phi_inverse_log(math.log(y))


def ga_check_node_mean(mean):
    """
    Mean of the degraded ("minus") bit-channel built from two copies of a channel of mean `mean`.
    """
    if mean <= 0:
        return 0.0
    if mean < GA_SWITCH:
        phi = ga_phi(mean)
        return ga_phi_inverse(1.0 - (1.0 - phi) ** 2)
    # 1 - (1 - phi)**2 = phi * (2 - phi), kept in the log domain
    log_phi = _log_phi_upper(mean)
    return _ga_phi_inverse_log(log_phi + math.log(2.0 - math.exp(log_phi)))


def bit_channel_means(n, initial_mean):
    """
    Runs `n` GA polarization steps from a channel (or source) of LLR mean `initial_mean`.

    Args:
        n (`int`): Number of polarization steps, the block length is `2**n`.
        initial_mean (`float`): Mean of the stage-0 LLRs.

    Returns:
        `np.ndarray`: The `2**n` bit-channel means in natural index order (0-based).
    """
    if n < 0:
        raise ValueError(f"`n` must be non-negative, supplied value was {n}.")
    if initial_mean < 0:
        raise ValueError(f"The initial mean must be non-negative, supplied value was {initial_mean}.")
    means = np.array([float(initial_mean)])
    for _ in range(n):
        evolved = np.empty(2 * means.size)
        evolved[0::2] = [ga_check_node_mean(m) for m in means]
        evolved[1::2] = 2.0 * means
        means = evolved
    return means


def channel_initial_mean(design_snr_db, rate):
    """
    Mean `2 / sigma^2 = 4 * R * 10^(Eb/N0 / 10)` of the channel LLRs of BPSK over AWGN at the design Eb/N0.
    """
    if rate <= 0:
        raise ValueError(f"The rate must be positive, supplied value was {rate}.")
    return 4.0 * rate * 10.0 ** (design_snr_db / 10.0)


def source_initial_mean(p):
    """
    GA mean assigned to a Bernoulli(`p`) source: twice its constant prior LLR `ln((1 - p) / p)`.
    """
    if not 0.0 < p < 0.5:
        raise ValueError(f"`p` must be in (0, 0.5), supplied value was {p}.")
    return 2.0 * math.log((1.0 - p) / p)


@lru_cache(maxsize=64)
def _ranked_channel_indices(n_c, design_snr_db, rate):
    means = bit_channel_means(n_c, channel_initial_mean(design_snr_db, rate))
    indices = np.arange(means.size)
    # ascending mean, ties broken by ascending index
    return tuple(int(i) for i in np.lexsort((indices, means))), tuple(float(m) for m in means)


def construct_channel_code(n_c, K, design_snr_db, rate=None, frozen_values=None):
    """
    Builds the channel code whose information set `A` holds the `K` most reliable bit-channels under GA at the design
    Eb/N0. Ties go to the larger index.

    Args:
        n_c (`int`): Log2 of the codeword length.
        K (`int`): Size of the information set.
        design_snr_db (`float`): Design Eb/N0, in dB.
        rate (`float`, *optional*):
            The rate used to turn Eb/N0 into a noise variance. Defaults to `K / N_c`; a D-Polar system passes its
            overall rate `R = N_s / N_c`.
        frozen_values (`Tuple[int]`, *optional*): Frozen bits, all zeros by default.

    Returns:
        [`ChannelCodeSpec`]: The constructed code.
    """
    size = 2**n_c
    if not 1 <= K <= size:
        raise ValueError(f"`K` must be between 1 and {size}, supplied value was {K}.")
    if rate is None:
        rate = K / size
    order, _ = _ranked_channel_indices(int(n_c), float(design_snr_db), float(rate))
    information_set = sorted(i + 1 for i in order[size - K :])
    return ChannelCodeSpec(n_c=n_c, K=K, A=tuple(information_set), frozen_values=frozen_values)


def construct_source_code(n_s, K, p):
    """
    Builds the source code whose high-entropy set `H` holds the `K` least reliable (highest entropy) source
    bit-channels under GA. Ties go to the smaller index.

    Args:
        n_s (`int`): Log2 of the source block length.
        K (`int`): Size of the high-entropy set.
        p (`float`): Source probability of a one, in (0, 0.5).

    Returns:
        [`SourceCodeSpec`]: The constructed code.
    """
    size = 2**n_s
    if not 1 <= K <= size:
        raise ValueError(f"`K` must be between 1 and {size}, supplied value was {K}.")
    means = bit_channel_means(n_s, source_initial_mean(p))
    order = np.lexsort((np.arange(size), means))
    high_entropy_set = sorted(int(i) + 1 for i in order[:K])
    return SourceCodeSpec(n_s=n_s, K=K, H=tuple(high_entropy_set), p=p)
