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
The compound trellis of a D-Polar system: the channel and source decoding trellises merged into one sequence of
`N = N_s + N_c - K` levels. A level is one of

- `frozen`: a frozen channel bit, only the channel trellis moves;
- `jsc`: a joint source-channel bit `c_{h_i} = u_{a_i}`, both trellises move;
- `low_entropy`: a low-entropy source bit, only the source trellis moves.
"""

from dataclasses import dataclass

from .polar import check_compatible
from .utils import ConsistencyError


FROZEN = "frozen"
JSC = "jsc"
LOW_ENTROPY = "low_entropy"
NODE_KINDS = (FROZEN, JSC, LOW_ENTROPY)


def build_jw_sets(source, channel):
    """
    Positions of the joint source-channel nodes (`J`) and of the low-entropy nodes (`W`) in the compound trellis.

    A JSC node sits after every channel level up to `a_i` and every low-entropy source level before `h_i`:
    `j_i = a_i + (h_i - i)`. A low-entropy node `h^c_i` preceded by `e` high-entropy source bits sits after the
    `a_e - e` frozen channel levels before `a_e`: `w_i = h^c_i + a_e - e` (zero shift when `e = 0`).

    Args:
        source ([`SourceCodeSpec`]): The source code.
        channel ([`ChannelCodeSpec`]): The channel code.

    Returns:
        `Tuple[Tuple[int], Tuple[int]]`: `J` (size `K`) and `W` (size `N_s - K`), both 1-based and increasing.
    """
    check_compatible(source, channel)

    jsc_nodes = []
    shift, previous = 0, 0
    for a, h in zip(channel.A, source.H):
        shift += h - previous - 1
        previous = h
        jsc_nodes.append(a + shift)

    low_entropy_nodes = []
    high_before, previous = 0, 0
    for h_c in source.low_entropy:
        high_before += h_c - previous - 1
        previous = h_c
        # the frozen channel levels before a_e telescope to a_e - e
        frozen_before = channel.A[high_before - 1] - high_before if high_before > 0 else 0
        low_entropy_nodes.append(h_c + frozen_before)

    return tuple(jsc_nodes), tuple(low_entropy_nodes)


def merge_schedule(source, channel):
    """
    Merges the two decoding schedules by walking them directly: the low-entropy source bits before `h_1` come first,
    then the channel schedule where every information bit `a_i` becomes the JSC node `(a_i, h_i)` immediately followed
    by the low-entropy source bits between `h_i` and `h_{i+1}` (or the end of the source block).

    Returns:
        `List[Tuple[str, Optional[int], Optional[int]]]`: One `(kind, i_c, i_s)` triple per level, 1-based.
    """
    check_compatible(source, channel)
    information = set(channel.A)
    high_entropy = source.H + (source.N + 1,)
    levels = [(LOW_ENTROPY, None, i_s) for i_s in range(1, high_entropy[0])]
    rank = 0
    for i_c in range(1, channel.N + 1):
        if i_c not in information:
            levels.append((FROZEN, i_c, None))
            continue
        h = high_entropy[rank]
        levels.append((JSC, i_c, h))
        levels.extend((LOW_ENTROPY, None, i_s) for i_s in range(h + 1, high_entropy[rank + 1]))
        rank += 1
    return levels


@dataclass(frozen=True)
class CompoundTrellis:
    """
    The compound trellis of one (source, channel) pair.

    Args:
        N_s (`int`): Source block length.
        N_c (`int`): Codeword length.
        K (`int`): Shared size of `H` and `A`.
        J (`Tuple[int]`): Levels of the JSC nodes, 1-based.
        W (`Tuple[int]`): Levels of the low-entropy nodes, 1-based.
        kinds (`Tuple[str]`): The node kind of every level.
        level_map (`Tuple[Tuple[Optional[int], Optional[int]]]`):
            For every level, the 1-based channel and source sub-levels it advances (`None` when a trellis does not
            move).
    """

    N_s: int
    N_c: int
    K: int
    J: tuple
    W: tuple
    kinds: tuple
    level_map: tuple

    @property
    def N(self):
        return len(self.kinds)

    def level(self, phi):
        """`(kind, i_c, i_s)` of the 1-based level `phi`."""
        if not 1 <= phi <= self.N:
            raise IndexError(f"Level {phi} is out of range 1..{self.N}.")
        i_c, i_s = self.level_map[phi - 1]
        return self.kinds[phi - 1], i_c, i_s


def build_trellis(source, channel):
    """
    Builds the compound trellis of a (source, channel) pair and checks it against a direct merge of the two decoding
    schedules.

    Raises:
        `ValueError`: If the two codes do not share `K`.
        [`ConsistencyError`]: If the node sets are inconsistent, naming the first offending level.
    """
    jsc_nodes, low_entropy_nodes = build_jw_sets(source, channel)
    size = source.N + channel.N - source.K

    kinds = [FROZEN] * size
    for kind, nodes in ((JSC, jsc_nodes), (LOW_ENTROPY, low_entropy_nodes)):
        for node in nodes:
            if not 1 <= node <= size:
                raise ConsistencyError(f"Level {node} of a {kind} node is outside the trellis (1..{size}).")
            if kinds[node - 1] != FROZEN:
                raise ConsistencyError(f"Level {node} is claimed by both a jsc and a low_entropy node.")
            kinds[node - 1] = kind

    level_map = []
    i_c = i_s = 0
    for kind in kinds:
        if kind != LOW_ENTROPY:
            i_c += 1
        if kind != FROZEN:
            i_s += 1
        level_map.append((i_c if kind != LOW_ENTROPY else None, i_s if kind != FROZEN else None))

    expected = merge_schedule(source, channel)
    for phi, (kind, (i_c, i_s), reference) in enumerate(zip(kinds, level_map, expected), start=1):
        if (kind, i_c, i_s) != reference:
            raise ConsistencyError(
                f"Level {phi} is ({kind}, i_c={i_c}, i_s={i_s}) but merging the decoding schedules gives "
                f"({reference[0]}, i_c={reference[1]}, i_s={reference[2]})."
            )

    return CompoundTrellis(
        N_s=source.N,
        N_c=channel.N,
        K=source.K,
        J=jsc_nodes,
        W=low_entropy_nodes,
        kinds=tuple(kinds),
        level_map=tuple(level_map),
    )


def trellis_records(trellis):
    """
    One JSON-friendly record per level, as written by `dpolar trellis --dump-trellis`.
    """
    return [
        {"level": level, "kind": kind, "i_c": i_c, "i_s": i_s}
        for level, (kind, (i_c, i_s)) in enumerate(zip(trellis.kinds, trellis.level_map), start=1)
    ]
