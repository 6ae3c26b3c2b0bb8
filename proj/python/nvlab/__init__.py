# Copyright 2026 The nvlab Authors
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

"""Newsvendor decision experiments backed by the nvlab C++ core."""

import os
from pathlib import Path

_assets = Path(__file__).resolve().parent / "assets"
if _assets.is_dir():
    os.environ.setdefault("NVLAB_ASSET_DIR", str(_assets))

from ._nvlab import (  # noqa: E402
    AmbiguousDecisionError,
    AssetError,
    ConfigError,
    IntegrityError,
    InvalidScenarioError,
    NvlabError,
    TemplateError,
    TransportError,
    classify_adjustments,
    derive_seed,
    expected_profit,
    extract_order,
    mas,
    ols,
    optimal_quantity,
    profit,
    profit_efficiency,
    prompt_hash,
    quartile_thresholds,
    report,
    sample_demands,
    simulate,
    validate_prompts,
)

__all__ = [
    "AmbiguousDecisionError",
    "AssetError",
    "ConfigError",
    "IntegrityError",
    "InvalidScenarioError",
    "NvlabError",
    "TemplateError",
    "TransportError",
    "classify_adjustments",
    "derive_seed",
    "expected_profit",
    "extract_order",
    "mas",
    "ols",
    "optimal_quantity",
    "profit",
    "profit_efficiency",
    "prompt_hash",
    "quartile_thresholds",
    "report",
    "sample_demands",
    "simulate",
    "validate_prompts",
]
