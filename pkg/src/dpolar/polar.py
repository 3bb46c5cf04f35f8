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
GF(2) polar transforms, the two code parameter vectors of a D-Polar system and the two encoding steps of the
transmitter (source compression, then channel encoding).

All index sets are stored 1-based, as they appear in experiment documents and trellis dumps. The `positions`
properties give the 0-based numpy view used by the array code.
"""

import json
import math
from dataclasses import dataclass

import numpy as np


def is_power_of_two(value):
    return isinstance(value, (int, np.integer)) and value > 0 and (value & (value - 1)) == 0


def check_bits(bits, name="bits", length=None):
    """
    Returns `bits` as a flat `uint8` array after checking it is a non-empty binary word.

    Args:
        bits (array-like of `int`): The word to check.
        name (`str`, *optional*, defaults to `"bits"`): Name used in the error messages.
        length (`int`, *optional*): If provided, the exact length the word must have.
    """
    array = np.asarray(bits)
    if array.ndim != 1 or array.size == 0:
        raise ValueError(f"`{name}` must be a non-empty 1-D binary word, got shape {array.shape}.")
    if not np.all((array == 0) | (array == 1)):
        raise ValueError(f"`{name}` must only contain 0 and 1.")
    if length is not None and array.size != length:
        raise ValueError(f"`{name}` must have length {length}, supplied length was {array.size}.")
    return array.astype(np.uint8)


def polar_transform(u):
    """
    Computes `u · F^{⊗n}` over GF(2) in natural (non bit-reversed) order, with `F = [[1, 0], [1, 1]]`.

    The n-stage butterfly XORs the second half of every block of size `2 * span` into its first half, for
    `span = 1, 2, ..., N / 2`. The transform is an involution.

    Args:
        u (array-like of `int`): Binary word whose length is a power of two.

    Returns:
        `np.ndarray`: The transformed word (`uint8`).
    """
    x = check_bits(u, "u").copy()
    size = x.size
    if not is_power_of_two(size):
        raise ValueError(f"The polar transform needs a power-of-two length, supplied length was {size}.")
    span = 1
    while span < size:
        blocks = x.reshape(-1, 2, span)
        blocks[:, 0, :] ^= blocks[:, 1, :]
        span *= 2
    return x


def polar_transform_matrix(n):
    """
    Materializes `F^{⊗n}` as a `(2**n, 2**n)` `uint8` matrix. Only meant for small `n` (oracles and debugging).
    """
    if n < 0:
        raise ValueError(f"`n` must be non-negative, supplied value was {n}.")
    kernel = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    matrix = np.ones((1, 1), dtype=np.uint8)
    for _ in range(n):
        matrix = np.kron(matrix, kernel)
    return matrix


def _check_index_set(indices, size, count, name):
    indices = tuple(int(i) for i in indices)
    if len(indices) != count:
        raise ValueError(f"`{name}` must hold exactly {count} indices, got {len(indices)}.")
    if any(b <= a for a, b in zip(indices, indices[1:])):
        raise ValueError(f"`{name}` must be strictly increasing, got {list(indices)}.")
    if count > 0 and (indices[0] < 1 or indices[-1] > size):
        raise ValueError(f"`{name}` must only hold indices in 1..{size}, got {list(indices)}.")
    return indices


def _log2_length(n, name):
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError(f"`{name}` must be a non-negative integer, supplied value was {n}.")
    return 2 ** int(n)


@dataclass(frozen=True)
class SourceCodeSpec:
    """
    Parameter vector `(N_s, K, H)` of a source polar code for a Bernoulli(`p`) source.

    Args:
        n_s (`int`): Log2 of the source block length.
        K (`int`): Size of the high-entropy set.
        H (`Tuple[int]`): The high-entropy set, 1-based and strictly increasing.
        p (`float`): Probability of a one in the source, in (0, 0.5).
    """

    n_s: int
    K: int
    H: tuple
    p: float

    def __post_init__(self):
        size = _log2_length(self.n_s, "n_s")
        if not 1 <= self.K <= size:
            raise ValueError(f"`K` must be between 1 and {size}, supplied value was {self.K}.")
        object.__setattr__(self, "H", _check_index_set(self.H, size, self.K, "H"))
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"`p` must be in (0, 0.5), supplied value was {self.p}.")

    @property
    def N(self):
        return 2**self.n_s

    @property
    def rate(self):
        """Compression rate `R_s = K / N_s`."""
        return self.K / self.N

    @property
    def positions(self):
        return np.array(self.H, dtype=np.int64) - 1

    @property
    def low_entropy(self):
        """The complement of `H` in 1..N_s (1-based, increasing)."""
        high = set(self.H)
        return tuple(i for i in range(1, self.N + 1) if i not in high)

    @property
    def prior_llr(self):
        """Stage-0 LLR of every source symbol: `ln((1 - p) / p)`."""
        return math.log((1.0 - self.p) / self.p)

    def to_dict(self):
        return {"kind": "source", "n": self.n_s, "K": self.K, "indices": list(self.H), "frozen": [], "p": self.p}

    @classmethod
    def from_dict(cls, data):
        return cls(n_s=int(data["n"]), K=int(data["K"]), H=tuple(data["indices"]), p=float(data["p"]))


@dataclass(frozen=True)
class ChannelCodeSpec:
    """
    Parameter vector `(N_c, K, A, u_{A^c})` of a channel polar code.

    Args:
        n_c (`int`): Log2 of the codeword length.
        K (`int`): Size of the information set.
        A (`Tuple[int]`): The information set, 1-based and strictly increasing.
        frozen_values (`Tuple[int]`, *optional*):
            The frozen bits, in increasing index order of the complement of `A`. Defaults to all zeros.
    """

    n_c: int
    K: int
    A: tuple
    frozen_values: tuple = None

    def __post_init__(self):
        size = _log2_length(self.n_c, "n_c")
        if not 1 <= self.K <= size:
            raise ValueError(f"`K` must be between 1 and {size}, supplied value was {self.K}.")
        object.__setattr__(self, "A", _check_index_set(self.A, size, self.K, "A"))
        if self.frozen_values is None:
            frozen = (0,) * (size - self.K)
        elif size == self.K:
            if len(self.frozen_values) != 0:
                raise ValueError("A rate-1 channel code has no frozen bits.")
            frozen = ()
        else:
            frozen = tuple(int(b) for b in check_bits(self.frozen_values, "frozen_values", size - self.K))
        object.__setattr__(self, "frozen_values", frozen)

    @property
    def N(self):
        return 2**self.n_c

    @property
    def rate(self):
        """Channel coding rate `R_c = K / N_c`."""
        return self.K / self.N

    @property
    def positions(self):
        return np.array(self.A, dtype=np.int64) - 1

    @property
    def frozen_positions(self):
        mask = np.ones(self.N, dtype=bool)
        mask[self.positions] = False
        return np.flatnonzero(mask)

    def frozen_map(self):
        """Maps every frozen 0-based position to its known bit."""
        return {int(i): bit for i, bit in zip(self.frozen_positions, self.frozen_values)}

    def to_dict(self):
        return {
            "kind": "channel",
            "n": self.n_c,
            "K": self.K,
            "indices": list(self.A),
            "frozen": list(self.frozen_values),
            "p": None,
        }

    @classmethod
    def from_dict(cls, data):
        frozen = data.get("frozen")
        return cls(n_c=int(data["n"]), K=int(data["K"]), A=tuple(data["indices"]), frozen_values=frozen or None)


def check_compatible(source, channel):
    """Both codes of one system share `K`: the information bits carry the high-entropy bits."""
    if source.K != channel.K:
        raise ValueError(
            f"The source and channel codes must share K, got K={source.K} for the source and K={channel.K} for the "
            "channel."
        )


def code_spec_from_dict(data):
    kind = data.get("kind")
    if kind == "source":
        return SourceCodeSpec.from_dict(data)
    elif kind == "channel":
        return ChannelCodeSpec.from_dict(data)
    raise ValueError(f"Unknown code spec kind {kind!r}, expected 'source' or 'channel'.")


def save_code_spec(spec, path):
    with open(path, "w", encoding="utf-8") as f:
        json.dump(spec.to_dict(), f, indent=2)


def load_code_spec(path):
    with open(path, "r", encoding="utf-8") as f:
        return code_spec_from_dict(json.load(f))


def compress_source(s, spec):
    """
    Source encoding: computes `c = s · G_{N_s}` and returns `c_H`, in increasing index order of `H`.

    Args:
        s (array-like of `int`): The source word, of length `N_s`.
        spec ([`SourceCodeSpec`]): The source code.
    """
    s = check_bits(s, "s", spec.N)
    return polar_transform(s)[spec.positions]


def assemble_channel_input(c_h, spec):
    """Builds `u` with `u_A = c_H` and `u_{A^c}` set to the frozen values."""
    c_h = check_bits(c_h, "c_H", spec.K)
    u = np.zeros(spec.N, dtype=np.uint8)
    u[spec.positions] = c_h
    if spec.K < spec.N:
        u[spec.frozen_positions] = spec.frozen_values
    return u


def channel_encode(c_h, spec):
    """
    Channel encoding `x = c_H G(A) ⊕ u_{A^c} G(A^c)`, i.e. the polar transform of the assembled `u`.

    Args:
        c_h (array-like of `int`): The compressed word, of length `K`.
        spec ([`ChannelCodeSpec`]): The channel code.
    """
    return polar_transform(assemble_channel_input(c_h, spec))
