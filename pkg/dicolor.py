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
"""Exact dichromatic number, dicoloring verification and classical bounds."""
import collections
from typing import Any, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

from absl import logging
import networkx as nx
import numba
import numpy as np

# pylint: disable=g-bad-import-order
import digraph
import utils

Digraph = digraph.Digraph


class PartialColoring(ValueError):

  def __init__(self, missing: Sequence[int]):
    self.missing = tuple(missing)
    super().__init__(f'Coloring is not total, no valid color for vertices '
                     f'{list(self.missing)}.')


class Dicoloring(NamedTuple):
  """Vertex colors; every color class induces an acyclic subdigraph.

  Attributes:
    colors: `colors[v]` is the color index of vertex v.
    k: number of colors; all colors are smaller than k.
  """
  colors: Tuple[int, ...]
  k: int


class BoundReport(NamedTuple):
  """An interval for the dichromatic number.

  Attributes:
    lower: proven lower bound.
    lower_witness: how the lower bound was certified (a tag, e.g.
      `exhausted:k=2` when every 2-dicoloring was refuted by search).
    upper: upper bound.
    coloring: a dicoloring with `upper` colors.
  """
  lower: int
  lower_witness: str
  upper: int
  coloring: Dicoloring


class DichromaticResult(NamedTuple):
  chi: int
  colors: Tuple[int, ...]
  nodes_explored: int


class ChromaticResult(NamedTuple):
  value: int
  coloring: Dict[Hashable, int]
  nodes_explored: int


def make_dicoloring(colors: Sequence[int]) -> Dicoloring:
  """Relabels colors to 0..k-1 in order of first appearance."""
  relabel = {}
  compact = []
  for c in colors:
    if c not in relabel:
      relabel[c] = len(relabel)
    compact.append(relabel[c])
  return Dicoloring(tuple(compact), len(relabel))


def color_classes(colors: Sequence[int]) -> Dict[int, int]:
  """Maps each color to the bit mask of its class."""
  classes = collections.defaultdict(int)
  for v, c in enumerate(colors):
    classes[c] |= 1 << v
  return dict(classes)


def verify_dicoloring(d: Digraph,
                      f: Union[Dicoloring, Sequence[Optional[int]]]) -> bool:
  """True iff no directed cycle of `d` is monochromatic under `f`."""
  colors = f.colors if isinstance(f, Dicoloring) else tuple(f)
  missing = [
      v for v in range(d.n)
      if v >= len(colors) or colors[v] is None or colors[v] < 0
  ]
  if missing or len(colors) != d.n:
    raise PartialColoring(missing or range(d.n, len(colors)))
  if isinstance(f, Dicoloring) and any(c >= f.k for c in colors):
    return False
  return all(
      digraph.is_acyclic_mask(d, mask) for mask in color_classes(colors).values())


def _degeneracy_order(d: Digraph, mask: int) -> List[int]:
  """Reverse of a smallest-last elimination order of the underlying graph."""
  remaining = mask
  removed = []
  while remaining:
    v = min(
        utils.iter_bits(remaining),
        key=lambda u: (utils.popcount(d.nbr_row(u) & remaining), u))
    removed.append(v)
    remaining &= ~(1 << v)
  return removed[::-1]


def closes_cycle(d: Digraph, v: int, class_mask: int) -> bool:
  """Whether adding v to an acyclic class creates a directed cycle through v."""
  targets = d.in_row(v) & class_mask
  frontier = d.out_row(v) & class_mask
  if not targets or not frontier:
    return False
  seen = frontier
  while frontier:
    if frontier & targets:
      return True
    reach = 0
    for u in utils.iter_bits(frontier):
      reach |= d.out_row(u)
    frontier = reach & class_mask & ~seen
    seen |= frontier
  return False


class DichromaticSolver:
  """Backtracking k-dicolorability search over D[mask].

  Vertices are colored in degeneracy order; a vertex may only open the next
  unused color, which fixes the first vertex's color and removes color
  permutations. Each placement is checked by a reachability test inside the
  target class, so classes stay acyclic throughout.
  """

  def __init__(self,
               d: Digraph,
               mask: Optional[int] = None,
               max_nodes: Optional[int] = None,
               budget: Optional[utils.SearchBudget] = None):
    self._d = d
    self._mask = d.full_mask if mask is None else mask
    self._order = _degeneracy_order(d, self._mask)
    self.budget = utils.as_budget(budget, 'dichromatic number', max_nodes)

  def greedy(self,
             order: Optional[Sequence[int]] = None
            ) -> Tuple[int, Dict[int, int]]:
    classes = []
    colors = {}
    for v in self._order if order is None else order:
      for c, cls in enumerate(classes):
        if not closes_cycle(self._d, v, cls):
          classes[c] |= 1 << v
          colors[v] = c
          break
      else:
        classes.append(1 << v)
        colors[v] = len(classes) - 1
    return len(classes), colors

  def colorable(self, k: int) -> Optional[Dict[int, int]]:
    """A k-dicoloring of D[mask] as {vertex: color}, or None."""
    if k <= 0:
      return {} if not self._mask else None
    order = self._order
    classes = [0] * k
    colors = {}

    def assign(i: int, used: int) -> bool:
      if i == len(order):
        return True
      self.budget.tick()
      v = order[i]
      bit = 1 << v
      for c in range(min(used + 1, k)):
        if closes_cycle(self._d, v, classes[c]):
          continue
        classes[c] |= bit
        colors[v] = c
        if assign(i + 1, max(used, c + 1)):
          return True
        classes[c] &= ~bit
      return False

    if assign(0, 0):
      return colors
    return None

  def solve(self) -> DichromaticResult:
    """Iterative deepening on k between 2 and the greedy bound."""
    d = self._d
    colors = [-1] * d.n
    if not self._mask:
      return DichromaticResult(0, tuple(colors), self.budget.nodes)
    if digraph.is_acyclic_mask(d, self._mask):
      for v in utils.iter_bits(self._mask):
        colors[v] = 0
      return DichromaticResult(1, tuple(colors), self.budget.nodes)
    upper, best = self.greedy()
    self.budget.lower, self.budget.upper = 2, upper
    for k in range(2, upper):
      found = self.colorable(k)
      if found is not None:
        best = found
        upper = k
        break
      self.budget.lower = k + 1
    for v, c in best.items():
      colors[v] = c
    logging.debug('chi_dir=%d on %d vertices after %d nodes', upper,
                  utils.popcount(self._mask), self.budget.nodes)
    return DichromaticResult(upper, tuple(colors), self.budget.nodes)


def solve_dichromatic(d: Digraph,
                      mask: Optional[int] = None,
                      max_nodes: Optional[int] = None,
                      budget: Optional[utils.SearchBudget] = None
                     ) -> DichromaticResult:
  return DichromaticSolver(d, mask, max_nodes, budget).solve()


def dichromatic_number(d: Digraph,
                       max_nodes: Optional[int] = None
                      ) -> Tuple[int, Dicoloring]:
  """Exact chi_dir(D) together with a witnessing dicoloring."""
  result = solve_dichromatic(d, max_nodes=max_nodes)
  return result.chi, Dicoloring(result.colors, result.chi)


def dichromatic_number_of_subset(d: Digraph,
                                 vertices: Iterable[int],
                                 max_nodes: Optional[int] = None) -> int:
  return solve_dichromatic(d, digraph.mask_of(d, vertices), max_nodes).chi


def dichromatic_of_mask(d: Digraph,
                        mask: int,
                        max_nodes: Optional[int] = None) -> int:
  return solve_dichromatic(d, mask, max_nodes).chi


def is_dicolorable(d: Digraph,
                   k: int,
                   mask: Optional[int] = None,
                   max_nodes: Optional[int] = None) -> bool:
  """Decides chi_dir(D[mask]) <= k."""
  mask = d.full_mask if mask is None else mask
  if utils.popcount(mask) <= k:
    return True
  if k <= 0:
    return False
  if digraph.is_acyclic_mask(d, mask):
    return True
  return DichromaticSolver(d, mask, max_nodes).colorable(k) is not None


def greedy_dicoloring(d: Digraph,
                      order: Optional[Sequence[int]] = None) -> Dicoloring:
  """First-fit dicoloring along `order` (default: degeneracy order)."""
  if order is not None and sorted(order) != list(range(d.n)):
    raise ValueError(f'Invalid order {list(order)}.')
  _, colors = DichromaticSolver(d).greedy(order)
  return make_dicoloring([colors[v] for v in range(d.n)])


def bound_report(d: Digraph, max_nodes: Optional[int] = None) -> BoundReport:
  """Exact value when the budget allows it, else the interval reached."""
  solver = DichromaticSolver(d, max_nodes=max_nodes)
  try:
    result = solver.solve()
  except utils.BudgetExceeded as e:
    upper, colors = solver.greedy()
    coloring = make_dicoloring([colors[v] for v in range(d.n)])
    return BoundReport(e.lower or 1, f'exhausted:k={(e.lower or 1) - 1}', upper,
                       coloring)
  if result.chi <= 1:
    witness = 'acyclic' if result.chi else 'empty'
  else:
    witness = f'exhausted:k={result.chi - 1}'
  return BoundReport(result.chi, witness, result.chi,
                     Dicoloring(result.colors, result.chi))


@numba.njit
def _longest_path_vertices(adjacency: np.ndarray) -> int:
  """Vertex count of a longest directed path, by DP over vertex subsets."""
  n = adjacency.shape[0]
  reach = np.zeros((1 << n, n), dtype=np.bool_)
  for v in range(n):
    reach[1 << v, v] = True
  best = 1
  for mask in range(1, 1 << n):
    size = 0
    rest = mask
    while rest:
      rest &= rest - 1
      size += 1
    for v in range(n):
      if not reach[mask, v]:
        continue
      if size > best:
        best = size
      for w in range(n):
        if adjacency[v, w] and not (mask >> w) & 1:
          reach[mask | (1 << w), w] = True
  return best


def gallai_roy_bound(d: Digraph, max_vertices: int = 22) -> int:
  """Number of vertices on a longest directed path (not necessarily induced).

  Args:
    d: the digraph.
    max_vertices: the subset DP is refused above this size on cyclic inputs.

  Returns:
    L such that chi(underlying(d)) <= L.
  """
  if d.n == 0:
    return 0
  if digraph.is_acyclic(d):
    return nx.dag_longest_path_length(digraph.to_networkx(d)) + 1
  if d.n > max_vertices:
    raise utils.BudgetExceeded('longest directed path', lower=None, upper=d.n)
  return int(_longest_path_vertices(d.adjacency_matrix()))


def chromatic_number(graph: nx.Graph,
                     max_nodes: Optional[int] = None) -> ChromaticResult:
  """Exact chromatic number by DSATUR branch and bound.

  The maximum clique gives the starting k; the networkx DSATUR greedy coloring
  gives the incumbent.

  Args:
    graph: an undirected networkx graph with sortable nodes.
    max_nodes: search-node limit.

  Returns:
    The chromatic number and an optimal coloring keyed by node.
  """
  nodes = sorted(graph.nodes)
  n = len(nodes)
  if not n:
    return ChromaticResult(0, {}, 0)
  index = {node: i for i, node in enumerate(nodes)}
  adjacency = [0] * n
  for a, b in graph.edges:
    if a != b:
      adjacency[index[a]] |= 1 << index[b]
      adjacency[index[b]] |= 1 << index[a]
  degree = [utils.popcount(row) for row in adjacency]

  lower = max(len(c) for c in nx.find_cliques(graph))
  greedy = nx.greedy_color(graph, strategy='DSATUR')
  upper = max(greedy.values()) + 1
  budget = utils.SearchBudget('chromatic number', max_nodes)
  budget.lower, budget.upper = lower, upper

  def k_colorable(k: int) -> Optional[List[int]]:
    colors = [-1] * n
    seen_colors = [0] * n

    def search(colored: int, used: int) -> bool:
      if colored == n:
        return True
      budget.tick()
      v = max((u for u in range(n) if colors[u] < 0),
              key=lambda u: (utils.popcount(seen_colors[u]), degree[u], -u))
      for c in range(min(used + 1, k)):
        if (seen_colors[v] >> c) & 1:
          continue
        colors[v] = c
        changed = []
        for u in utils.iter_bits(adjacency[v]):
          if colors[u] < 0 and not (seen_colors[u] >> c) & 1:
            seen_colors[u] |= 1 << c
            changed.append(u)
        if search(colored + 1, max(used, c + 1)):
          return True
        for u in changed:
          seen_colors[u] &= ~(1 << c)
      colors[v] = -1
      return False

    return colors if search(0, 0) else None

  for k in range(lower, upper):
    found = k_colorable(k)
    if found is not None:
      return ChromaticResult(k, {nodes[i]: c for i, c in enumerate(found)},
                             budget.nodes)
    budget.lower = k + 1
  return ChromaticResult(upper, dict(greedy), budget.nodes)


def chromatic_number_undirected(d: Digraph,
                                max_nodes: Optional[int] = None) -> int:
  return chromatic_number(digraph.underlying_graph(d), max_nodes).value


def clique_cover_partition(d: Digraph,
                           mask: Optional[int] = None,
                           max_nodes: Optional[int] = None
                          ) -> Tuple[digraph.VertexSet, ...]:
  """Fewest tournaments covering D[mask], by coloring the complement."""
  mask = d.full_mask if mask is None else mask
  complement = nx.complement(digraph.underlying_graph(d, mask))
  cover = chromatic_number(complement, max_nodes)
  classes = collections.defaultdict(list)
  for v, color in cover.coloring.items():
    classes[color].append(v)
  return tuple(tuple(sorted(m)) for _, m in sorted(classes.items()))


def is_k_local(d: Digraph, k: int, max_nodes: Optional[int] = None) -> bool:
  """Every out-neighbourhood has chi_dir <= k."""
  return all(
      is_dicolorable(d, k, d.out_row(v), max_nodes) for v in range(d.n))


def is_k_colocal(d: Digraph, k: int, max_nodes: Optional[int] = None) -> bool:
  """Every in-neighbourhood has chi_dir <= k."""
  return all(is_dicolorable(d, k, d.in_row(v), max_nodes) for v in range(d.n))


def maximum_stable_set(d: Digraph,
                       mask: Optional[int] = None,
                       max_nodes: Optional[int] = None) -> digraph.VertexSet:
  """A maximum stable set of the underlying graph of D[mask]."""
  graph = digraph.underlying_graph(d, mask)
  if not graph:
    return ()
  budget = utils.SearchBudget('independence number', max_nodes)
  best = ()
  for clique in nx.find_cliques(nx.complement(graph)):
    budget.tick()
    if len(clique) > len(best) or (len(clique) == len(best) and
                                   sorted(clique) < list(best)):
      best = tuple(sorted(clique))
    budget.lower = len(best)
  return best


def independence_number(d: Digraph, max_nodes: Optional[int] = None) -> int:
  return len(maximum_stable_set(d, max_nodes=max_nodes))


def as_json(result: DichromaticResult) -> Dict[str, Any]:
  return {
      'chi_dir': result.chi,
      'coloring': list(result.colors),
      'nodes_explored': result.nodes_explored
  }
