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
Successive cancellation (SC) and list decoding of polar trellises.

LLRs follow the `ln(P(0) / P(1))` convention and are saturated at `±LLR_MAX`. One generic list engine walks a
schedule of levels; each level advances the channel trellis, the source trellis, or both, and either splits every
path on the decoded bit or extends it with a known bit. The joint decoder (J-SCL), the channel SCL decoder and the
source stage of the separate decoder are three schedules run through the same engine.
"""

import copy
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from .polar import check_compatible, polar_transform
from .trellis import FROZEN, LOW_ENTROPY, build_jw_sets, build_trellis
from .utils import ConsistencyError


LLR_MAX = 40.0

INFORMATION = "information"
HIGH_ENTROPY = "high_entropy"

COPY_MODES = ("cow", "deep")


def f_op(alpha, beta, min_sum=False):
    """
    Check-node update `ln((e^(α+β) + 1) / (e^α + e^β))`, computed as

        sign(α) sign(β) min(|α|, |β|) + ln(1 + e^-|α+β|) - ln(1 + e^-|α-β|)

    which never overflows. With `min_sum=True` only the first term is kept.

    Args:
        alpha (`float` or `np.ndarray`): First input LLR(s).
        beta (`float` or `np.ndarray`): Second input LLR(s).
        min_sum (`bool`, *optional*, defaults to `False`): Whether to use the min-sum approximation.
    """
    alpha = np.clip(alpha, -LLR_MAX, LLR_MAX)
    beta = np.clip(beta, -LLR_MAX, LLR_MAX)
    result = np.sign(alpha) * np.sign(beta) * np.minimum(np.abs(alpha), np.abs(beta))
    if min_sum:
        return result
    return result + np.log1p(np.exp(-np.abs(alpha + beta))) - np.log1p(np.exp(-np.abs(alpha - beta)))


def g_op(alpha, beta, u):
    """
    Variable-node update `(-1)^u α + β`, saturated at `±LLR_MAX`. `u` is the partial sum of the left child.
    """
    return np.clip(np.where(u, -alpha, alpha) + beta, -LLR_MAX, LLR_MAX)


def _softplus_penalty(llr, v):
    # ln(1 + e^{-(1 - 2v) λ}): zero when v agrees with the sign of λ
    return float(np.logaddexp(0.0, (2 * v - 1) * llr))


def phi_metric(mu, llr, v):
    """
    Path metric update `μ + ln(1 + e^{-(1 - 2v) λ})`.

    Args:
        mu (`float`): Metric of the parent path.
        llr (`float`): LLR of the decided bit.
        v (`int`): The decided bit.
    """
    return mu + _softplus_penalty(llr, v)


def phi_tilde_metric(mu, channel_llr, source_llr, v):
    """
    Joint path metric update of a JSC node, where the same bit is decided in the channel and the source trellis.
    Equals `phi_metric(phi_metric(mu, channel_llr, v), source_llr, v)`.
    """
    return mu + _softplus_penalty(channel_llr, v) + _softplus_penalty(source_llr, v)


def _trailing_zeros(value):
    return (value & -value).bit_length() - 1


class SCState:
    """
    Staged LLR and partial-sum memory of one SC decoder walking one polar trellis, in natural order.

    `llrs[d]` holds the `N / 2**d` LLRs of the current node at depth `d` (depth 0 is the channel or source
    observation, depth `n` a single bit). `partials[d]` holds the re-encoded bits of the finished left child at depth
    `d`. Every update binds a new array, so a shallow copy of the two stage lists shares all untouched stages between
    paths.

    Sub-levels are 0-based and must be visited in order: `decision_llr(i)` then `commit(i, bit)`.

    Args:
        observations (`np.ndarray`): The stage-0 LLRs; the length must be a power of two.
        min_sum (`bool`, *optional*, defaults to `False`): Whether the check-node update uses min-sum.
    """

    def __init__(self, observations, min_sum=False):
        observations = np.clip(np.asarray(observations, dtype=np.float64), -LLR_MAX, LLR_MAX)
        size = observations.size
        if size == 0 or size & (size - 1):
            raise ValueError(f"The stage-0 LLRs need a power-of-two length, supplied length was {size}.")
        self.n = size.bit_length() - 1
        self.N = size
        self.min_sum = min_sum
        self.llrs = [observations] + [None] * self.n
        self.partials = [None] * (self.n + 1)
        self.codeword = None
        self.next_index = 0
        self._llr_ready = False

    def decision_llr(self, i):
        """
        LLR of bit `i` given the bits committed so far.
        """
        if i != self.next_index:
            raise ConsistencyError(f"Sub-level {i} was requested but the next one is {self.next_index}.")
        if i >= self.N:
            raise ConsistencyError(f"Sub-level {i} is past the end of a trellis of length {self.N}.")
        if i == 0:
            start = 1
        else:
            depth = self.n - _trailing_zeros(i)
            parent = self.llrs[depth - 1]
            half = parent.size // 2
            self.llrs[depth] = g_op(parent[:half], parent[half:], self.partials[depth])
            start = depth + 1
        for depth in range(start, self.n + 1):
            parent = self.llrs[depth - 1]
            half = parent.size // 2
            self.llrs[depth] = f_op(parent[:half], parent[half:], self.min_sum)
        self._llr_ready = True
        return float(self.llrs[self.n][0])

    def commit(self, i, bit):
        """
        Fixes bit `i` and propagates the partial sums of every subtree it completes.
        """
        if i != self.next_index or not self._llr_ready:
            raise ConsistencyError(f"Sub-level {i} was committed before its LLR was computed.")
        partial = np.array([bit], dtype=np.uint8)
        depth = self.n
        while depth > 0 and (i >> (self.n - depth)) & 1:
            partial = np.concatenate((self.partials[depth] ^ partial, partial))
            depth -= 1
        if depth > 0:
            self.partials[depth] = partial
        else:
            self.codeword = partial
        self.next_index += 1
        self._llr_ready = False

    def clone(self, deep=False):
        if deep:
            return copy.deepcopy(self)
        other = copy.copy(self)
        other.llrs = list(self.llrs)
        other.partials = list(self.partials)
        return other


def _sc_recurse(llrs, frozen, decisions, min_sum):
    if llrs.size == 1:
        i = len(decisions)
        bit = frozen[i] if i in frozen else int(llrs[0] < 0)
        decisions.append(bit)
        return np.array([bit], dtype=np.uint8)
    half = llrs.size // 2
    left = _sc_recurse(f_op(llrs[:half], llrs[half:], min_sum), frozen, decisions, min_sum)
    right = _sc_recurse(g_op(llrs[:half], llrs[half:], left), frozen, decisions, min_sum)
    return np.concatenate((left ^ right, right))


def sc_decode(y_llrs, channel, min_sum=False):
    """
    Plain recursive SC decoding of a channel code. Used as the reference the list decoder with `L = 1` must match.

    Returns:
        `np.ndarray`: The decoded `u`, of length `N_c`.
    """
    llrs = _check_llrs(y_llrs, channel.N)
    decisions = []
    _sc_recurse(llrs, channel.frozen_map(), decisions, min_sum)
    return np.array(decisions, dtype=np.uint8)


Level = namedtuple("Level", ["kind", "channel", "source", "known"])
Level.__doc__ = "One decoding level: the 0-based channel and source sub-levels it advances, and its known bit if any."


def jscl_schedule(trellis, channel):
    """The levels of the compound trellis, with the frozen bits of the channel code as known bits."""
    frozen = channel.frozen_map()
    schedule = []
    for kind, (i_c, i_s) in zip(trellis.kinds, trellis.level_map):
        channel_index = None if i_c is None else i_c - 1
        source_index = None if i_s is None else i_s - 1
        known = frozen[channel_index] if kind == FROZEN else None
        schedule.append(Level(kind, channel_index, source_index, known))
    return schedule


def channel_schedule(channel):
    frozen = channel.frozen_map()
    return [
        Level(FROZEN, i, None, frozen[i]) if i in frozen else Level(INFORMATION, i, None, None)
        for i in range(channel.N)
    ]


def source_schedule(source, c_h):
    """Source-only levels where the high-entropy bits are known (`c_h`) and the low-entropy ones are decoded."""
    known = dict(zip((int(i) for i in source.positions), (int(b) for b in c_h)))
    return [
        Level(HIGH_ENTROPY, None, i, known[i]) if i in known else Level(LOW_ENTROPY, None, i, None)
        for i in range(source.N)
    ]


class DecoderPath:
    """
    One candidate path of the list decoder.

    Args:
        channel ([`SCState`], *optional*): The state of the channel trellis.
        source ([`SCState`], *optional*): The state of the source trellis.
        index (`int`, *optional*, defaults to 0): Creation index, used to break metric ties.
    """

    def __init__(self, channel=None, source=None, index=0):
        self.channel = channel
        self.source = source
        self.jpm = 0.0
        self.index = index
        # decided bits as a shared chain of (bit, previous) pairs
        self._tail = None
        self.length = 0

    @property
    def decisions(self):
        bits = np.empty(self.length, dtype=np.uint8)
        node = self._tail
        for position in range(self.length - 1, -1, -1):
            bits[position], node = node
        return bits

    def clone(self, deep=False):
        other = copy.copy(self)
        if self.channel is not None:
            other.channel = self.channel.clone(deep)
        if self.source is not None:
            other.source = self.source.clone(deep)
        return other

    def extend(self, level, bit, jpm, index):
        if level.channel is not None:
            self.channel.commit(level.channel, bit)
        if level.source is not None:
            self.source.commit(level.source, bit)
        self.jpm = jpm
        self.index = index
        self._tail = (bit, self._tail)
        self.length += 1


@dataclass
class DecodeResult:
    """
    Output of one list decoding run.

    Args:
        bits (`np.ndarray`): The decoder output (`ŝ` for the source decoders, `û_A` for the channel decoder).
        metric (`float`): Path metric of the selected path.
        decisions (`np.ndarray`): Every bit decided along the selected path, in level order.
        final_metrics (`List[float]`): Metrics of all the surviving paths, in list order.
        trace (`List[dict]`): Per-level records, only filled when tracing is enabled.
        channel_terms (`int`): Number of levels whose metric update used a channel LLR.
        source_terms (`int`): Number of levels whose metric update used a source LLR.
    """

    bits: np.ndarray
    metric: float
    decisions: np.ndarray
    final_metrics: list
    trace: list = field(default_factory=list)
    channel_terms: int = 0
    source_terms: int = 0


class ListDecoder:
    """
    Generic successive cancellation list engine over a schedule of [`Level`].

    At every level the LLRs of all paths are computed first. Each path then yields one candidate per admissible bit
    (two when the bit is unknown). When more than `list_size` candidates exist, they are ranked by `(metric, creation
    index)` and the worst are dropped; the 0-child keeps its parent's index and every 1-child gets a fresh one. A
    parent is cloned only when both of its children survive.

    Args:
        list_size (`int`): Maximum number of surviving paths, at least 1.
        min_sum (`bool`, *optional*, defaults to `False`): Use the min-sum check-node update.
        copy_mode (`str`, *optional*, defaults to `"cow"`):
            `"cow"` shares untouched stages between cloned paths, `"deep"` copies the whole state on every clone.
        trace (`bool`, *optional*, defaults to `False`): Record the surviving metrics at every level.
    """

    def __init__(self, list_size, min_sum=False, copy_mode="cow", trace=False):
        if int(list_size) < 1:
            raise ValueError(f"The list size must be at least 1, supplied value was {list_size}.")
        if copy_mode not in COPY_MODES:
            raise ValueError(f"`copy_mode` must be one of {COPY_MODES}, supplied value was {copy_mode!r}.")
        self.list_size = int(list_size)
        self.min_sum = min_sum
        self.copy_mode = copy_mode
        self.trace = trace

    def run(self, schedule, channel_llrs=None, source_llrs=None):
        """
        Decodes one frame.

        Args:
            schedule (`List[Level]`): The levels to walk.
            channel_llrs (`np.ndarray`, *optional*): Stage-0 LLRs of the channel trellis.
            source_llrs (`np.ndarray`, *optional*): Stage-0 LLRs of the source trellis.

        Returns:
            `Tuple[DecoderPath, List[DecoderPath], DecodeResult]`: The best path, all surviving paths and a result
            whose `bits` are left for the caller to fill.
        """
        channel_state = None if channel_llrs is None else SCState(channel_llrs, self.min_sum)
        source_state = None if source_llrs is None else SCState(source_llrs, self.min_sum)
        paths = [DecoderPath(channel_state, source_state, index=0)]
        next_index = 1
        deep = self.copy_mode == "deep"
        trace, channel_terms, source_terms = [], 0, 0

        for phi, level in enumerate(schedule, start=1):
            if (level.channel is not None and channel_state is None) or (
                level.source is not None and source_state is None
            ):
                raise ConsistencyError(f"Level {phi} advances a trellis that has no observations.")
            channel_terms += level.channel is not None
            source_terms += level.source is not None

            candidates = []
            for path in paths:
                channel_llr = None if level.channel is None else path.channel.decision_llr(level.channel)
                source_llr = None if level.source is None else path.source.decision_llr(level.source)
                bits = (0, 1) if level.known is None else (level.known,)
                for bit in bits:
                    if channel_llr is not None and source_llr is not None:
                        jpm = phi_tilde_metric(path.jpm, channel_llr, source_llr, bit)
                    else:
                        jpm = phi_metric(path.jpm, channel_llr if source_llr is None else source_llr, bit)
                    if bit == 1 and level.known is None:
                        index, next_index = next_index, next_index + 1
                    else:
                        index = path.index
                    candidates.append((jpm, index, path, bit))

            if len(candidates) > self.list_size:
                candidates.sort(key=lambda candidate: (candidate[0], candidate[1]))
                candidates = candidates[: self.list_size]

            # claim parents first so every clone is taken before its parent moves on
            claimed = set()
            owners = []
            for _, _, parent, _ in candidates:
                if id(parent) in claimed:
                    owners.append(parent.clone(deep))
                else:
                    claimed.add(id(parent))
                    owners.append(parent)
            for owner, (jpm, index, _, bit) in zip(owners, candidates):
                owner.extend(level, bit, jpm, index)
            paths = owners

            if self.trace:
                trace.append(
                    {
                        "phi": phi,
                        "kind": level.kind,
                        "i_c": None if level.channel is None else level.channel + 1,
                        "i_s": None if level.source is None else level.source + 1,
                        "surviving_jpms": [path.jpm for path in paths],
                    }
                )

        best = min(paths, key=lambda path: (path.jpm, path.index))
        result = DecodeResult(
            bits=None,
            metric=best.jpm,
            decisions=best.decisions,
            final_metrics=[path.jpm for path in paths],
            trace=trace,
            channel_terms=channel_terms,
            source_terms=source_terms,
        )
        return best, paths, result


def _check_llrs(y_llrs, length):
    llrs = np.asarray(y_llrs, dtype=np.float64)
    if llrs.ndim != 1 or llrs.size != length:
        raise ValueError(f"Expected {length} channel LLRs, got an array of shape {llrs.shape}.")
    if np.isnan(llrs).any():
        raise ValueError("The channel LLRs contain NaN.")
    return np.clip(llrs, -LLR_MAX, LLR_MAX)


def source_prior_llrs(source):
    return np.full(source.N, min(source.prior_llr, LLR_MAX))


class SCLDecoder:
    """
    Successive cancellation list decoder of a channel polar code.

    Args:
        channel ([`ChannelCodeSpec`]): The channel code.
        list_size (`int`): The list size `L`.
        min_sum (`bool`, *optional*, defaults to `False`): Use the min-sum check-node update.
        copy_mode (`str`, *optional*, defaults to `"cow"`): See [`ListDecoder`].
        trace (`bool`, *optional*, defaults to `False`): Record per-level traces.
    """

    def __init__(self, channel, list_size, min_sum=False, copy_mode="cow", trace=False):
        self.channel = channel
        self.engine = ListDecoder(list_size, min_sum=min_sum, copy_mode=copy_mode, trace=trace)
        self.schedule = channel_schedule(channel)

    def decode(self, y_llrs):
        """`bits` of the result is `û_A`."""
        llrs = _check_llrs(y_llrs, self.channel.N)
        _, _, result = self.engine.run(self.schedule, channel_llrs=llrs)
        result.bits = result.decisions[self.channel.positions]
        return result


class JointSCLDecoder:
    """
    Joint source-channel list decoder (J-SCL) of a D-Polar system: list decoding over the compound trellis, where
    channel and source LLRs are combined at every JSC node.

    Args:
        source ([`SourceCodeSpec`]): The source code.
        channel ([`ChannelCodeSpec`]): The channel code.
        list_size (`int`): The list size `L`.
        trellis ([`CompoundTrellis`], *optional*): The compound trellis, built from the two codes if not provided.
        min_sum (`bool`, *optional*, defaults to `False`): Use the min-sum check-node update.
        copy_mode (`str`, *optional*, defaults to `"cow"`): See [`ListDecoder`].
        trace (`bool`, *optional*, defaults to `False`): Record per-level traces.
    """

    def __init__(self, source, channel, list_size, trellis=None, min_sum=False, copy_mode="cow", trace=False):
        check_compatible(source, channel)
        if trellis is None:
            trellis = build_trellis(source, channel)
        elif (trellis.N_s, trellis.N_c, trellis.K) != (source.N, channel.N, source.K):
            raise ValueError(
                f"The trellis was built for N_s={trellis.N_s}, N_c={trellis.N_c}, K={trellis.K}, not for "
                f"N_s={source.N}, N_c={channel.N}, K={source.K}."
            )
        elif (trellis.J, trellis.W) != build_jw_sets(source, channel):
            raise ValueError(
                f"The trellis has J={list(trellis.J)}, W={list(trellis.W)}, which do not match H={list(source.H)} and "
                f"A={list(channel.A)}."
            )
        self.source = source
        self.channel = channel
        self.trellis = trellis
        self.engine = ListDecoder(list_size, min_sum=min_sum, copy_mode=copy_mode, trace=trace)
        self.schedule = jscl_schedule(trellis, channel)
        self.source_llrs = source_prior_llrs(source)
        self._source_levels = np.array([level.source is not None for level in self.schedule])

    def decode(self, y_llrs):
        """`bits` of the result is `ŝ = v̂_{J∪W} · G_{N_s}`."""
        llrs = _check_llrs(y_llrs, self.channel.N)
        _, _, result = self.engine.run(self.schedule, channel_llrs=llrs, source_llrs=self.source_llrs)
        result.bits = polar_transform(result.decisions[self._source_levels])
        return result


class SeparateSCLDecoder:
    """
    Separate decoding baseline: channel SCL recovers `ĉ_H`, then a source list decoder fills in the low-entropy bits
    with `ĉ_H` as known bits.

    Args:
        source ([`SourceCodeSpec`]): The source code.
        channel ([`ChannelCodeSpec`]): The channel code.
        list_size (`int`): The list size of both stages.
        min_sum (`bool`, *optional*, defaults to `False`): Use the min-sum check-node update.
        copy_mode (`str`, *optional*, defaults to `"cow"`): See [`ListDecoder`].
        trace (`bool`, *optional*, defaults to `False`): Record per-level traces of the source stage.
    """

    def __init__(self, source, channel, list_size, min_sum=False, copy_mode="cow", trace=False):
        check_compatible(source, channel)
        self.source = source
        self.channel_decoder = SCLDecoder(channel, list_size, min_sum=min_sum, copy_mode=copy_mode)
        self.engine = ListDecoder(list_size, min_sum=min_sum, copy_mode=copy_mode, trace=trace)
        self.source_llrs = source_prior_llrs(source)

    def decode(self, y_llrs):
        """`bits` of the result is `ŝ`; the metric is the one of the source stage."""
        c_h = self.channel_decoder.decode(y_llrs).bits
        return self.decode_source(c_h)

    def decode_source(self, c_h):
        _, _, result = self.engine.run(source_schedule(self.source, c_h), source_llrs=self.source_llrs)
        result.bits = polar_transform(result.decisions)
        return result


DECODERS = {"jscl": JointSCLDecoder, "sep_scl": SeparateSCLDecoder}


def make_decoder(name, source, channel, list_size, **kwargs):
    """
    Builds one of the two D-Polar decoders by name (`"jscl"` or `"sep_scl"`).
    """
    if name not in DECODERS:
        raise ValueError(f"Unknown decoder {name!r}, expected one of {sorted(DECODERS)}.")
    return DECODERS[name](source, channel, list_size, **kwargs)


def jscl_decode(y_llrs, trellis, source, channel, list_size, min_sum=False):
    """
    Joint source-channel list decoding of one frame.

    Args:
        y_llrs (`np.ndarray`): The `N_c` channel LLRs.
        trellis ([`CompoundTrellis`]): The compound trellis of the two codes.
        source ([`SourceCodeSpec`]): The source code.
        channel ([`ChannelCodeSpec`]): The channel code.
        list_size (`int`): The list size `L`.
        min_sum (`bool`, *optional*, defaults to `False`): Use the min-sum check-node update.

    Returns:
        `Tuple[np.ndarray, float]`: The source estimate `ŝ` and the metric of the selected path.
    """
    result = JointSCLDecoder(source, channel, list_size, trellis=trellis, min_sum=min_sum).decode(y_llrs)
    return result.bits, result.metric


def scl_decode(y_llrs, channel, list_size, min_sum=False):
    """
    Channel SCL decoding of one frame.

    Returns:
        `Tuple[np.ndarray, float]`: `û_A` and the metric of the selected path.
    """
    result = SCLDecoder(channel, list_size, min_sum=min_sum).decode(y_llrs)
    return result.bits, result.metric


def sep_scl_decode(y_llrs, source, channel, list_size, min_sum=False):
    """
    Separate decoding of one frame (channel SCL, then source list decoding). Returns `ŝ`.
    """
    return SeparateSCLDecoder(source, channel, list_size, min_sum=min_sum).decode(y_llrs).bits

