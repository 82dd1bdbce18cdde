# Copyright 2022 DeepMind Technologies Limited
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
"""All the important shortcuts to ease configuration of runs."""

from typing import Text, List
from ml_collections import config_dict


def apply_presets(config: config_dict.ConfigDict,
                  unique_presets: List[Text]) -> config_dict.ConfigDict:
  """Applies the defined presets."""

  all_presets = {
      # Select construction family
      'f7': f7_preset,
      'f5': f5_preset,
      # Budgets
      'quick': quick_preset,
      'exhaustive': exhaustive_preset,
  }

  for preset in unique_presets:
    if preset in all_presets:
      all_presets[preset](config)
    else:
      raise ValueError(f'Invalid preset value `{preset}`')

  return config


def f7_preset(config: config_dict.ConfigDict) -> config_dict.ConfigDict:
  """The 7-tuple family (no cyclic triangle, no degree 5 star)."""
  config.family = 'f7'
  return config


def f5_preset(config: config_dict.ConfigDict) -> config_dict.ConfigDict:
  """The 5-tuple family (in-triangle free)."""
  config.family = 'f5'
  return config


def quick_preset(config: config_dict.ConfigDict) -> config_dict.ConfigDict:
  """Small budgets for smoke runs."""
  config.budget.max_nodes = 50_000
  config.budget.time_limit_ms = 10_000
  config.limits.longest_path_max_vertices = 16
  config.limits.exact_chi_max_vertices = 12
  return config


def exhaustive_preset(
    config: config_dict.ConfigDict) -> config_dict.ConfigDict:
  """Lifts node and time limits; size limits stay."""
  config.budget.max_nodes = 0
  config.budget.time_limit_ms = 0
  config.limits.exact_chi_max_vertices = 120
  return config
