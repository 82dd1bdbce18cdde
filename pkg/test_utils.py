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
"""Brute-force oracles and random instances shared by the tests.

The oracles deliberately avoid the library's bitmask machinery.
"""
import itertools
from typing import Iterator, List, Optional, Sequence, Tuple

from hypothesis import HealthCheck
from hypothesis import settings
from hypothesis import strategies as st
import networkx as nx
import numpy as np

# pylint: disable=g-bad-import-order
import digraph

PROPERTY_SETTINGS = settings(
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow])


def _is_acyclic(d: digraph.Digraph, vertices: Sequence[int]) -> bool:
  graph = nx.DiGraph()
  graph.add_nodes_from(vertices)
  graph.add_edges_from((u, v) for u, v in d.arcs()
                       if u in graph and v in graph)
  return nx.is_directed_acyclic_graph(graph)


def set_partitions(items: Sequence[int]) -> Iterator[List[List[int]]]:
  if not items:
    yield []
    return
  first, rest = items[0], items[1:]
  for partition in set_partitions(rest):
    for i in range(len(partition)):
      yield partition[:i] + [[first] + partition[i]] + partition[i + 1:]
    yield [[first]] + partition


def bell_dichromatic_number(d: digraph.Digraph,
                            vertices: Optional[Sequence[int]] = None) -> int:
  """Fewest blocks of a partition into acyclic sets, by enumeration."""
  vertices = list(range(d.n)) if vertices is None else list(vertices)
  acyclic = {}

  def is_acyclic_block(block: List[int]) -> bool:
    key = frozenset(block)
    if key not in acyclic:
      acyclic[key] = _is_acyclic(d, block)
    return acyclic[key]

  return min(
      len(p)
      for p in set_partitions(vertices)
      if all(is_acyclic_block(block) for block in p))


def naive_find(d: digraph.Digraph,
               pattern: digraph.Digraph,
               induced: bool = True) -> Optional[Tuple[int, ...]]:
  """First injective map (in itertools order) that is an embedding."""
  for image in itertools.permutations(range(d.n), pattern.n):
    ok = True
    for a, b in itertools.permutations(range(pattern.n), 2):
      arc = d.has_arc(image[a], image[b])
      if pattern.has_arc(a, b) and not arc:
        ok = False
      elif induced and arc and not pattern.has_arc(a, b):
        ok = False
      if not ok:
        break
    if ok:
      return image
  return None


def brute_force_pmct_size(d: digraph.Digraph) -> int:
  """min |K + P| over every maximum tournament K and sink-source path P."""
  graph = nx.DiGraph()
  graph.add_nodes_from(range(d.n))
  graph.add_edges_from(d.arcs())
  undirected = graph.to_undirected()
  omega = max(len(c) for c in nx.find_cliques(undirected))
  best = None
  for clique in itertools.combinations(range(d.n), omega):
    if not all(undirected.has_edge(u, v)
               for u, v in itertools.combinations(clique, 2)):
      continue
    sub = graph.subgraph(clique)
    if nx.is_strongly_connected(sub):
      return omega
    condensed = nx.condensation(sub)
    order = list(nx.topological_sort(condensed))
    sources = condensed.nodes[order[0]]['members']
    sinks = condensed.nodes[order[-1]]['members']
    for s in sinks:
      for t in sources:
        allowed = (set(range(d.n)) - set(clique)) | {s, t}
        try:
          length = nx.shortest_path_length(graph.subgraph(allowed), s, t)
        except nx.NetworkXNoPath:
          continue
        size = omega + length - 1
        best = size if best is None else min(best, size)
  return best


def all_digraphs(n: int) -> Iterator[digraph.Digraph]:
  """Every digraph without 2-cycles on n labelled vertices."""
  pairs = list(itertools.combinations(range(n), 2))
  for states in itertools.product(range(3), repeat=len(pairs)):
    arcs = []
    for (u, v), state in zip(pairs, states):
      if state == 1:
        arcs.append((u, v))
      elif state == 2:
        arcs.append((v, u))
    yield digraph.from_edge_list(n, arcs)


def all_tournaments(n: int) -> Iterator[digraph.Digraph]:
  pairs = list(itertools.combinations(range(n), 2))
  for bits in itertools.product((False, True), repeat=len(pairs)):
    yield digraph.from_edge_list(
        n, [(v, u) if flip else (u, v) for (u, v), flip in zip(pairs, bits)])


def random_digraph(rng: np.random.Generator, n: int,
                   density: float = 0.5) -> digraph.Digraph:
  arcs = []
  for u, v in itertools.combinations(range(n), 2):
    if rng.random() < density:
      arcs.append((u, v) if rng.random() < 0.5 else (v, u))
  return digraph.from_edge_list(n, arcs)


def random_strong_digraph(rng: np.random.Generator, n: int,
                          density: float = 0.5) -> digraph.Digraph:
  """Random arcs around the Hamiltonian cycle 0->1->...->n-1->0; n >= 3."""
  cycle = [(i, (i + 1) % n) for i in range(n)]
  taken = {frozenset(arc) for arc in cycle}
  arcs = list(cycle)
  for u, v in itertools.combinations(range(n), 2):
    if frozenset((u, v)) not in taken and rng.random() < density:
      arcs.append((u, v) if rng.random() < 0.5 else (v, u))
  return digraph.from_edge_list(n, arcs)



@st.composite
def digraphs(draw, min_n: int = 0, max_n: int = 7) -> digraph.Digraph:
  n = draw(st.integers(min_value=min_n, max_value=max_n))
  pairs = list(itertools.combinations(range(n), 2))
  states = draw(
      st.lists(st.integers(0, 2), min_size=len(pairs), max_size=len(pairs)))
  arcs = [(u, v) if s == 1 else (v, u)
          for (u, v), s in zip(pairs, states)
          if s]
  return digraph.from_edge_list(n, arcs)


@st.composite
def acyclic_digraphs(draw, min_n: int = 1, max_n: int = 9) -> digraph.Digraph:
  """Arcs only from lower to higher id, then relabelled by a permutation."""
  n = draw(st.integers(min_value=min_n, max_value=max_n))
  pairs = list(itertools.combinations(range(n), 2))
  keep = draw(st.lists(st.booleans(), min_size=len(pairs),
                       max_size=len(pairs)))
  perm = draw(st.permutations(list(range(n))))
  return digraph.from_edge_list(
      n, [(perm[u], perm[v]) for (u, v), k in zip(pairs, keep) if k])
