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

# flake8: noqa
# There's no way to ignore "F401 '...' imported but unused" warnings in this
# module, but to preserve other warnings. So, don't check this module at all.

__version__ = "0.1.0.dev0"

from .construction import construct_channel_code, construct_source_code
from .decoding import (
    JointSCLDecoder,
    ListDecoder,
    SCLDecoder,
    SeparateSCLDecoder,
    f_op,
    g_op,
    jscl_decode,
    phi_metric,
    phi_tilde_metric,
    sc_decode,
    scl_decode,
    sep_scl_decode,
)
from .experiment import ber_slope, ebn0_at_ber, resolve_experiment, run_sweep
from .polar import ChannelCodeSpec, SourceCodeSpec, channel_encode, compress_source, polar_transform
from .simulate import BerPoint, SimConfig, channel_pass, generate_source, run_point
from .trellis import CompoundTrellis, build_jw_sets, build_trellis
from .utils import ConfigError, ConsistencyError, FrameError
