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
"""Simple digraphs on dense integer ids with bit-row adjacency.

Every digraph is finite and simple: no loops and at most one of `uv`, `vu`.
Out- and in-adjacency are stored as one Python int per vertex ("bit-row"), so
neighbourhood unions and intersections are single integer operations.
"""
import heapq
import os
import re
from typing import (Dict, Iterable, List, Mapping, NamedTuple, Optional,
                    Sequence, Tuple)

from absl import logging
import graphviz
import networkx as nx
import numpy as np

# pylint: disable=g-bad-import-order
import utils

VertexSet = Tuple[int, ...]
Arc = Tuple[int, int]


class DigraphError(ValueError):
  """Base class for malformed digraph input."""


class SelfLoop(DigraphError):

  def __init__(self, arc: Arc):
    self.arc = arc
    super().__init__(f'Self-loop {arc[0]}->{arc[1]} is not allowed.')


class DuplicateOppositeArc(DigraphError):

  def __init__(self, arc: Arc):
    self.arc = arc
    super().__init__(
        f'Arc {arc[0]}->{arc[1]} is listed together with its reverse.')


class VertexOutOfRange(DigraphError):

  def __init__(self, arc: Arc, n: int):
    self.arc = arc
    self.n = n
    super().__init__(f'Arc {arc[0]}->{arc[1]} leaves the vertex range [0, {n}).')


class EdgeListParseError(DigraphError):

  def __init__(self, line_no: int, message: str):
    self.line_no = line_no
    super().__init__(f'Line {line_no}: {message}')


class Digraph:
  """Immutable simple digraph on vertices `0..n-1`."""

  __slots__ = ('_n', '_out', '_in', '_hash')

  def __init__(self, n: int, out_rows: Sequence[int]):
    if len(out_rows) != n:
      raise ValueError(f'Expected {n} out-rows, got {len(out_rows)}.')
    full = (1 << n) - 1
    in_rows = [0] * n
    for u, row in enumerate(out_rows):
      if row & ~full:
        v = max(utils.iter_bits(row))
        raise VertexOutOfRange((u, v), n)
      if (row >> u) & 1:
        raise SelfLoop((u, u))
      for v in utils.iter_bits(row):
        in_rows[v] |= 1 << u
    for u in range(n):
      clash = out_rows[u] & in_rows[u]
      if clash:
        raise DuplicateOppositeArc((u, utils.lowest_bit(clash)))
    self._n = n
    self._out = tuple(out_rows)
    self._in = tuple(in_rows)
    self._hash = None

  @property
  def n(self) -> int:
    return self._n

  @property
  def full_mask(self) -> int:
    return (1 << self._n) - 1

  def out_row(self, v: int) -> int:
    return self._out[v]

  def in_row(self, v: int) -> int:
    return self._in[v]

  def nbr_row(self, v: int) -> int:
    return self._out[v] | self._in[v]

  def has_arc(self, u: int, v: int) -> bool:
    return bool((self._out[u] >> v) & 1)

  def adjacent(self, u: int, v: int) -> bool:
    return bool((self.nbr_row(u) >> v) & 1)

  def successors(self, v: int) -> VertexSet:
    return utils.from_mask(self._out[v])

  def predecessors(self, v: int) -> VertexSet:
    return utils.from_mask(self._in[v])

  def arcs(self) -> List[Arc]:
    return [(u, v) for u in range(self._n) for v in utils.iter_bits(self._out[u])]

  @property
  def num_arcs(self) -> int:
    return sum(utils.popcount(row) for row in self._out)

  def out_degree(self, v: int) -> int:
    return utils.popcount(self._out[v])

  def in_degree(self, v: int) -> int:
    return utils.popcount(self._in[v])

  def adjacency_matrix(self) -> np.ndarray:
    matrix = np.zeros((self._n, self._n), dtype=np.bool_)
    for u, v in self.arcs():
      matrix[u, v] = True
    return matrix

  def __eq__(self, other) -> bool:
    if not isinstance(other, Digraph):
      return NotImplemented
    return self._n == other._n and self._out == other._out

  def __hash__(self) -> int:
    if self._hash is None:
      self._hash = hash((self._n, self._out))
    return self._hash

  def __repr__(self) -> str:
    return f'Digraph(n={self._n}, arcs={self.arcs()})'


class InducedSubgraph(NamedTuple):
  """An induced subdigraph; `vertices[i]` is the host id of local vertex i."""
  graph: Digraph
  vertices: VertexSet

  def lift(self, local: Iterable[int]) -> VertexSet:
    return tuple(sorted(self.vertices[v] for v in local))


class Condensation(NamedTuple):
  """Strongly connected components in topological order.

  Attributes:
    components: the components; arcs of `dag` go from lower to higher index.
    dag: the acyclic digraph on components.
  """
  components: List[VertexSet]
  dag: Digraph


class Annotations(NamedTuple):
  """Extra data carried by `#` comments of the edge-list format."""
  arc_classes: Dict[Arc, str]
  labels: Dict[int, Tuple[int, ...]]
  meta: Dict[str, str]


def from_edge_list(n: int, arcs: Iterable[Arc]) -> Digraph:
  """Builds a digraph with exactly the listed arcs."""
  rows = [0] * n
  for u, v in arcs:
    if not (0 <= u < n and 0 <= v < n):
      raise VertexOutOfRange((u, v), n)
    if u == v:
      raise SelfLoop((u, v))
    if (rows[v] >> u) & 1:
      raise DuplicateOppositeArc((u, v))
    rows[u] |= 1 << v
  return Digraph(n, rows)


def vertex_set(d: Digraph, vertices: Iterable[int]) -> VertexSet:
  """Validates and canonicalizes a vertex set of `d`."""
  result = tuple(sorted(set(vertices)))
  if result and (result[0] < 0 or result[-1] >= d.n):
    raise ValueError(f'Vertex set {result} is not within [0, {d.n}).')
  return result


def mask_of(d: Digraph, vertices: Iterable[int]) -> int:
  return utils.to_mask(vertex_set(d, vertices))


def out_neighbors_mask(d: Digraph, mask: int) -> int:
  result = 0
  for s in utils.iter_bits(mask):
    result |= d.out_row(s)
  return result & ~mask


def in_neighbors_mask(d: Digraph, mask: int) -> int:
  result = 0
  for s in utils.iter_bits(mask):
    result |= d.in_row(s)
  return result & ~mask


def neighbors_mask(d: Digraph, mask: int) -> int:
  return out_neighbors_mask(d, mask) | in_neighbors_mask(d, mask)


def non_neighbors_mask(d: Digraph, mask: int) -> int:
  result = d.full_mask
  for s in utils.iter_bits(mask):
    result &= ~d.nbr_row(s)
  return result & ~mask


def out_neighbors(d: Digraph, vertices: Iterable[int]) -> VertexSet:
  """N+(S): vertices outside S with an in-neighbour in S."""
  return utils.from_mask(out_neighbors_mask(d, mask_of(d, vertices)))


def in_neighbors(d: Digraph, vertices: Iterable[int]) -> VertexSet:
  """N-(S): vertices outside S with an out-neighbour in S."""
  return utils.from_mask(in_neighbors_mask(d, mask_of(d, vertices)))


def non_neighbors(d: Digraph, vertices: Iterable[int]) -> VertexSet:
  """N0(S): vertices outside S adjacent to no member of S."""
  return utils.from_mask(non_neighbors_mask(d, mask_of(d, vertices)))


def neighbors(d: Digraph, vertices: Iterable[int]) -> VertexSet:
  return utils.from_mask(neighbors_mask(d, mask_of(d, vertices)))


def closed_neighborhood(d: Digraph, vertices: Iterable[int]) -> VertexSet:
  mask = mask_of(d, vertices)
  return utils.from_mask(mask | neighbors_mask(d, mask))


def induced_mask(d: Digraph, mask: int) -> InducedSubgraph:
  members = utils.from_mask(mask)
  index = {v: i for i, v in enumerate(members)}
  rows = []
  for v in members:
    rows.append(utils.to_mask(index[w] for w in utils.iter_bits(d.out_row(v) & mask)))
  return InducedSubgraph(Digraph(len(members), rows), members)


def induced(d: Digraph, vertices: Iterable[int]) -> InducedSubgraph:
  """D[S] together with the map back to the host ids."""
  return induced_mask(d, mask_of(d, vertices))


def is_acyclic_mask(d: Digraph, mask: int) -> bool:
  """Whether D[mask] has no directed cycle (peels sources repeatedly)."""
  remaining = mask
  while remaining:
    sources = 0
    for v in utils.iter_bits(remaining):
      if not d.in_row(v) & remaining:
        sources |= 1 << v
    if not sources:
      return False
    remaining &= ~sources
  return True


def is_acyclic(d: Digraph) -> bool:
  return is_acyclic_mask(d, d.full_mask)


def topological_order(d: Digraph) -> Optional[List[int]]:
  """Smallest-id-first topological order, or None if `d` has a cycle."""
  indegree = [d.in_degree(v) for v in range(d.n)]
  heap = [v for v in range(d.n) if not indegree[v]]
  heapq.heapify(heap)
  order = []
  while heap:
    u = heapq.heappop(heap)
    order.append(u)
    for v in utils.iter_bits(d.out_row(u)):
      indegree[v] -= 1
      if not indegree[v]:
        heapq.heappush(heap, v)
  if len(order) != d.n:
    return None
  return order


def to_networkx(d: Digraph, mask: Optional[int] = None) -> nx.DiGraph:
  mask = d.full_mask if mask is None else mask
  graph = nx.DiGraph()
  graph.add_nodes_from(utils.iter_bits(mask))
  graph.add_edges_from(
      (u, v) for u in utils.iter_bits(mask)
      for v in utils.iter_bits(d.out_row(u) & mask))
  return graph


def underlying_graph(d: Digraph, mask: Optional[int] = None) -> nx.Graph:
  return to_networkx(d, mask).to_undirected()


def scc_condensation(d: Digraph) -> Condensation:
  """SCC decomposition with components in a deterministic topological order."""
  graph = to_networkx(d)
  condensed = nx.condensation(graph)
  members = {c: tuple(sorted(condensed.nodes[c]['members'])) for c in condensed}
  order = list(
      nx.lexicographical_topological_sort(condensed, key=lambda c: members[c][0]))
  position = {c: i for i, c in enumerate(order)}
  dag = from_edge_list(
      len(order), [(position[a], position[b]) for a, b in condensed.edges])
  return Condensation([members[c] for c in order], dag)


def strong_components_mask(d: Digraph, mask: int) -> List[int]:
  """Strongly connected components of D[mask] as masks, in topological order."""
  sub = induced_mask(d, mask)
  return [
      utils.to_mask(sub.vertices[v] for v in comp)
      for comp in scc_condensation(sub.graph).components
  ]


def is_strongly_connected(d: Digraph) -> bool:
  if d.n == 0:
    return False
  return nx.is_strongly_connected(to_networkx(d))


def is_tournament(d: Digraph, mask: Optional[int] = None) -> bool:
  mask = d.full_mask if mask is None else mask
  return all(
      (d.nbr_row(v) | (1 << v)) & mask == mask for v in utils.iter_bits(mask))


def maximum_cliques(d: Digraph, mask: Optional[int] = None) -> List[VertexSet]:
  """All maximum cliques of the underlying graph of D[mask], sorted."""
  graph = underlying_graph(d, mask)
  if not graph:
    return []
  cliques = [tuple(sorted(c)) for c in nx.find_cliques(graph)]
  omega = max(len(c) for c in cliques)
  return sorted(c for c in cliques if len(c) == omega)


def underlying_clique_number(d: Digraph, mask: Optional[int] = None) -> int:
  """omega of the underlying undirected graph (Bron-Kerbosch with pivoting)."""
  graph = underlying_graph(d, mask)
  return max((len(c) for c in nx.find_cliques(graph)), default=0)


def edgeless(n: int) -> Digraph:
  return Digraph(n, [0] * n)


def transitive_tournament(k: int) -> Digraph:
  """TT_k with arcs i->j for all i < j."""
  return Digraph(k, [((1 << k) - 1) & ~((1 << (i + 1)) - 1) for i in range(k)])


def directed_path(m: int) -> Digraph:
  return from_edge_list(m, [(i, i + 1) for i in range(m - 1)])


def directed_cycle(m: int) -> Digraph:
  if m < 3:
    raise ValueError(f'A directed cycle in a simple digraph needs 3 vertices, '
                     f'got {m}.')
  return from_edge_list(m, [(i, (i + 1) % m) for i in range(m)])


def disjoint_union(d1: Digraph, d2: Digraph) -> Digraph:
  shift = d1.n
  return Digraph(d1.n + d2.n,
                 [d1.out_row(v) for v in range(d1.n)] +
                 [d2.out_row(v) << shift for v in range(d2.n)])


def copies(r: int, d: Digraph) -> Digraph:
  """rD: disjoint union of r copies of `d`."""
  result = edgeless(0)
  for _ in range(r):
    result = disjoint_union(result, d)
  return result


def join_forward(d1: Digraph, d2: Digraph) -> Digraph:
  """D1 => D2: disjoint union plus every arc from the D1 side to the D2 side."""
  second = ((1 << d2.n) - 1) << d1.n
  return Digraph(d1.n + d2.n,
                 [d1.out_row(v) | second for v in range(d1.n)] +
                 [d2.out_row(v) << d1.n for v in range(d2.n)])


def triangle_join(d1: Digraph, d2: Digraph, d3: Digraph) -> Digraph:
  """Delta(D1, D2, D3): complete one-way joins 1->2, 2->3 and 3->1."""
  n1, n2, n3 = d1.n, d2.n, d3.n
  part2 = ((1 << n2) - 1) << n1
  part3 = ((1 << n3) - 1) << (n1 + n2)
  part1 = (1 << n1) - 1
  rows = [d1.out_row(v) | part2 for v in range(n1)]
  rows += [(d2.out_row(v) << n1) | part3 for v in range(n2)]
  rows += [(d3.out_row(v) << (n1 + n2)) | part1 for v in range(n3)]
  return Digraph(n1 + n2 + n3, rows)


def reverse(d: Digraph) -> Digraph:
  return Digraph(d.n, [d.in_row(v) for v in range(d.n)])


_CLASS_RE = re.compile(r'^#class\s+(\d+)\s+(\d+)\s+(\S+)\s*$')
_LABEL_RE = re.compile(r'^#label\s+(\d+)\s+([\d,]+)\s*$')
_META_RE = re.compile(r'^#meta\s+([\w.-]+)=(\S*)\s*$')


def parse_edge_list(text: str) -> Tuple[Digraph, Annotations]:
  """Parses "n m" followed by m "u v" lines; `#` starts a comment."""
  annotations = Annotations({}, {}, {})
  header = None
  arcs = []
  for line_no, raw in enumerate(text.splitlines(), start=1):
    line = raw.strip()
    if not line:
      continue
    if line.startswith('#'):
      if match := _CLASS_RE.match(line):
        u, v, cls = int(match[1]), int(match[2]), match[3]
        annotations.arc_classes[(u, v)] = cls
      elif match := _LABEL_RE.match(line):
        annotations.labels[int(match[1])] = tuple(
            int(x) for x in match[2].split(','))
      elif match := _META_RE.match(line):
        annotations.meta[match[1]] = match[2]
      continue
    line = line.split('#', 1)[0]
    fields = line.split()
    if len(fields) != 2:
      raise EdgeListParseError(line_no, f'expected two integers, got `{raw}`')
    try:
      a, b = int(fields[0]), int(fields[1])
    except ValueError as e:
      raise EdgeListParseError(line_no, f'not an integer pair: `{raw}`') from e
    if header is None:
      header = (a, b)
    else:
      arcs.append((a, b))
  if header is None:
    raise EdgeListParseError(0, 'missing "n m" header')
  n, m = header
  if n < 0 or m != len(arcs):
    raise EdgeListParseError(0, f'header announces {m} arcs, found {len(arcs)}')
  d = from_edge_list(n, arcs)
  for (u, v), cls in annotations.arc_classes.items():
    if not (0 <= u < n and 0 <= v < n) or not d.has_arc(u, v):
      raise EdgeListParseError(0, f'#class names a missing arc {u}->{v} ({cls})')
  return d, annotations


def format_edge_list(d: Digraph,
                     annotations: Optional[Annotations] = None) -> str:
  """Deterministic text form; annotations go into `#` comment blocks."""
  lines = []
  if annotations is not None:
    for key in sorted(annotations.meta):
      lines.append(f'#meta {key}={annotations.meta[key]}')
  lines.append(f'{d.n} {d.num_arcs}')
  lines.extend(f'{u} {v}' for u, v in d.arcs())
  if annotations is not None:
    for (u, v) in sorted(annotations.arc_classes):
      lines.append(f'#class {u} {v} {annotations.arc_classes[(u, v)]}')
    for v in sorted(annotations.labels):
      lines.append(f'#label {v} {",".join(map(str, annotations.labels[v]))}')
  return '\n'.join(lines) + '\n'


def load(path: str) -> Tuple[Digraph, Annotations]:
  with open(os.path.expanduser(path), 'r') as f:
    return parse_edge_list(f.read())


def save(path: str, d: Digraph, annotations: Optional[Annotations] = None):
  path = os.path.expanduser(path)
  with open(path, 'w') as f:
    f.write(format_edge_list(d, annotations))
  logging.info('Wrote %d arcs to %s', d.num_arcs, path)


def to_dot(d: Digraph,
           name: str = 'D',
           arc_classes: Optional[Mapping[Arc, str]] = None,
           labels: Optional[Mapping[int, Sequence[int]]] = None) -> str:
  """DOT source with arc direction preserved."""
  graph = graphviz.Digraph(name=name)
  for v in range(d.n):
    if labels and v in labels:
      graph.node(str(v), label=f'{v}: ({",".join(map(str, labels[v]))})')
    else:
      graph.node(str(v))
  for u, v in d.arcs():
    if arc_classes and (u, v) in arc_classes:
      graph.edge(str(u), str(v), label=arc_classes[(u, v)])
    else:
      graph.edge(str(u), str(v))
  return graph.source
