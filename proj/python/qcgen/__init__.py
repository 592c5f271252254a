# Copyright 2026 The qcgen Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Quantum circuit compilation with a graph generative model."""

import json

from ._core import (
    Circuit,
    CheckpointMismatch,
    CorruptDataError,
    Generator,
    MissingFileError,
    Predictor,
    UndefinedCorrelation,
    VocabularyMismatch,
    filter_candidates,
    fine_tune,
    lhst_cost,
    lhst_grad,
    oracle_compile,
    pearson,
    random_structure,
    random_target,
)
from . import _core


def compile(target, generator, predictor=None, **options):
    """Runs the candidate search for one target and returns the report as a dict."""
    return json.loads(_core.compile_json(target, generator, predictor, **options))


def load_dataset(path):
    """Returns (manifest, records) with circuits as JSON objects."""
    data = json.loads(_core.load_dataset_json(path))
    return data["manifest"], data["records"]


__all__ = [
    "Circuit",
    "CheckpointMismatch",
    "CorruptDataError",
    "Generator",
    "MissingFileError",
    "Predictor",
    "UndefinedCorrelation",
    "VocabularyMismatch",
    "compile",
    "filter_candidates",
    "fine_tune",
    "lhst_cost",
    "lhst_grad",
    "load_dataset",
    "oracle_compile",
    "pearson",
    "random_structure",
    "random_target",
]
