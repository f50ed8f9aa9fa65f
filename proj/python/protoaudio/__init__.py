# Copyright 2026 The protoaudio Authors.
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

"""Few-shot audio classification with prototypical networks."""

from ._core import (
    SAMPLE_RATE_HZ,
    ProtoaudioError,
    classify,
    evaluate,
    gen_synthetic_corpus,
    hz_to_mel,
    load_manifest,
    load_wav,
    log_mel,
    make_splits,
    mel_to_hz,
    prototypes,
    select_subset,
    train,
    write_wav,
)

__all__ = [
    "SAMPLE_RATE_HZ",
    "ProtoaudioError",
    "classify",
    "evaluate",
    "gen_synthetic_corpus",
    "hz_to_mel",
    "load_manifest",
    "load_wav",
    "log_mel",
    "make_splits",
    "mel_to_hz",
    "prototypes",
    "select_subset",
    "train",
    "write_wav",
]
