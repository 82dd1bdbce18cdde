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
"""Config for search budgets, size limits and the shift-digraph families."""
import collections
import dataclasses

from ml_collections import config_dict

import presets

TOOL_VERSION = '0.1.0'


@dataclasses.dataclass
class Construction:
  """For all important information that is construction-family specific.

  Attributes:
    name: unique name of the family, also the `gen`/`verify` target.
    k: tuple length of the shift digraph.
    head: length of the prefix/suffix shared by back arcs and by Z arcs.
    min_n: smallest admissible index range.
    partition_bound: number of tournaments covering every neighbourhood.
    divisor: chi(G_n) / divisor lower bounds the dichromatic number.
    triangle_free: no cyclic triangle at all (else only X, X, Y triangles).
  """
  name: str
  k: int
  head: int
  min_n: int
  partition_bound: int
  divisor: int
  triangle_free: bool


# 7-tuple family: no cyclic triangle and no induced oriented star of degree 5
F7 = Construction('f7', 7, 4, 8, 4, 3, True)

# 5-tuple family: in-triangle free, cyclic triangles use two X arcs
F5 = Construction('f5', 5, 3, 6, 3, 2, False)

constructions = {
    'f7': F7,
    'f5': F5,
}


def get_config(preset=''):
  """Return config object for the command-line tool."""
  config = get_default_config()

  # E.g. '/tmp/f7_9.txt'
  config.in_path = config_dict.placeholder(str)
  config.out_path = config_dict.placeholder(str)

  if preset:
    unique_presets = list(collections.OrderedDict.fromkeys(preset.split(',')))
    config = presets.apply_presets(config, unique_presets)

  return config


def get_default_config():
  """Return config object with the default budgets and limits."""
  config = config_dict.ConfigDict()

  config.seed = 42
  # Construction selected by the `f7`/`f5` presets
  config.family = ''

  config.budget = config_dict.ConfigDict(
      dict(
          max_nodes=5_000_000,
          time_limit_ms=0,  # 0 disables the wall clock limit
      ))

  config.limits = config_dict.ConfigDict(
      dict(
          longest_path_max_vertices=22,
          hero_max_vertices=9,
          max_construction_vertices=1_000_000,
          pattern_max_vertices=10,
          # Exact dichromatic numbers of constructions up to this order
          exact_chi_max_vertices=40,
      ))

  config.report = config_dict.ConfigDict(
      dict(schema_version=1, tool_version=TOOL_VERSION))

  return config
