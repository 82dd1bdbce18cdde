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
"""Misc utils covering search budgets, bit-row helpers and check records."""
import math
import os
import time
from typing import Any, Iterable, Iterator, NamedTuple, Optional, Tuple

import numba

# set the threading layer before any parallel target compilation
numba.config.THREADING_LAYER = 'safe'
_THREADS_ENV = 'DICHROMA_THREADS'
if os.environ.get(_THREADS_ENV):
  numba.set_num_threads(
      min(max(int(os.environ[_THREADS_ENV]), 1), numba.config.NUMBA_NUM_THREADS))
else:
  numba.set_num_threads(max(int(3 / 4 * numba.get_num_threads()), 1))

# Search-node limit if the caller does not pass one.
DEFAULT_MAX_NODES = 5_000_000
# Wall clock limit (ms) of budgets opened without one; 0 disables it.
_default_time_limit_ms = 0


def set_default_time_limit_ms(time_limit_ms: int):
  global _default_time_limit_ms
  _default_time_limit_ms = max(int(time_limit_ms or 0), 0)


class BudgetExceeded(RuntimeError):
  """An exact search ran out of budget before deciding.

  Attributes:
    what: name of the quantity that was searched for.
    lower: best proven lower bound (or None if nothing was proven).
    upper: best known upper bound (or None).
    nodes_explored: number of search nodes spent.
  """

  def __init__(self,
               what: str,
               lower: Optional[int] = None,
               upper: Optional[int] = None,
               nodes_explored: int = 0):
    self.what = what
    self.lower = lower
    self.upper = upper
    self.nodes_explored = nodes_explored
    super().__init__(
        f'Budget exceeded computing {what} after {nodes_explored} nodes '
        f'(bounds: [{lower}, {upper}])')


class SearchBudget:
  """Counts search nodes and wall time against configured limits."""

  def __init__(self,
               what: str,
               max_nodes: Optional[int] = None,
               time_limit_ms: Optional[int] = None):
    self.what = what
    self.max_nodes = DEFAULT_MAX_NODES if max_nodes is None else max_nodes
    self.time_limit_ms = (
        _default_time_limit_ms if time_limit_ms is None else time_limit_ms)
    self.nodes = 0
    self.lower: Optional[int] = None
    self.upper: Optional[int] = None
    self._start = time.monotonic()

  def tick(self, count: int = 1):
    self.nodes += count
    if self.max_nodes and self.nodes > self.max_nodes:
      raise self.exceeded()
    # Only poll the clock every 1024 nodes.
    if self.time_limit_ms and not self.nodes & 1023:
      if (time.monotonic() - self._start) * 1000 > self.time_limit_ms:
        raise self.exceeded()

  def exceeded(self) -> BudgetExceeded:
    return BudgetExceeded(self.what, self.lower, self.upper, self.nodes)


def as_budget(budget: Optional[SearchBudget], what: str,
              max_nodes: Optional[int]) -> SearchBudget:
  """Reuses a shared budget or opens a fresh one."""
  if budget is not None:
    return budget
  return SearchBudget(what, max_nodes)


def iter_bits(mask: int) -> Iterator[int]:
  """Yields the set bit positions of `mask` in increasing order."""
  while mask:
    low = mask & -mask
    yield low.bit_length() - 1
    mask ^= low


def popcount(mask: int) -> int:
  return bin(mask).count('1')


def to_mask(vertices: Iterable[int]) -> int:
  mask = 0
  for v in vertices:
    mask |= 1 << v
  return mask


def from_mask(mask: int) -> Tuple[int, ...]:
  return tuple(iter_bits(mask))


def lowest_bit(mask: int) -> int:
  return (mask & -mask).bit_length() - 1


def ramsey_upper(a: int, b: int) -> int:
  """Erdos-Szekeres bound: R(a, b) <= C(a + b - 2, a - 1)."""
  if a < 1 or b < 1:
    raise ValueError(f'Ramsey parameters must be positive, got ({a}, {b}).')
  return math.comb(a + b - 2, a - 1)


class CheckResult(NamedTuple):
  """Outcome of one verification check.

  Attributes:
    claim: identifier of the checked property (e.g. `5.2`).
    status: one of `pass`, `fail`, `skipped`.
    witness: JSON-serializable evidence; required for `fail`.
    elapsed_ms: wall time spent.
  """
  claim: str
  status: str
  witness: Any = None
  elapsed_ms: float = 0.


class Stopwatch:
  """Context manager measuring elapsed milliseconds."""

  def __enter__(self):
    self._start = time.monotonic()
    self.elapsed_ms = 0.
    return self

  def __exit__(self, *exc):
    self.elapsed_ms = round((time.monotonic() - self._start) * 1000, 3)
    return False
