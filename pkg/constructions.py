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
"""Shift-digraph counterexample families and verifiers for their claims.

A vertex is a strictly increasing k-tuple over [n] (1-based). With head
length h = (k + 1) / 2 the arc classes are

  X:  u -> v if v is u shifted by one position (v_i = u_{i+1}),
  Y:  u -> v if the first h entries of u are the last h entries of v,
  Z1: u -> v if u < v in the total order and both share their first h entries,
  Z2: u -> v if u < v in the total order and both share their last h entries.

The mark m(v) = v_h increases along X and decreases along Y.
"""
import collections
import itertools
import math
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from absl import logging
import networkx as nx
import numpy as np
import tqdm

# pylint: disable=g-bad-import-order
import config
import dicolor
import digraph
import patterns
import utils

Digraph = digraph.Digraph
BadParameter = patterns.BadParameter
# 1-based strictly increasing tuple
ShiftVertex = Tuple[int, ...]

X, Y, Z1, Z2 = 'X', 'Y', 'Z1', 'Z2'
ARC_CLASSES = (X, Y, Z1, Z2)
SHIFT = 'shift'
LEX = 'lex'

MAX_VERTICES = 1_000_000


class LabeledConstruction(NamedTuple):
  """A construction together with everything needed to verify it.

  Attributes:
    digraph: the digraph; vertex i carries `labels[i]`.
    labels: the shift tuples, in lexicographic order for generated instances.
    arc_classes: class of every arc, one of X, Y, Z1, Z2.
    k: tuple length.
    n: index range.
    order: `lex`, `random:<seed>` or `custom`.
    family: name of the family (`f7`, `f5`, `f<k>` or `shift`).
    rank: position of each vertex in the total order; None if unknown (e.g.
      when read back from a file).
  """
  digraph: Digraph
  labels: Tuple[ShiftVertex, ...]
  arc_classes: Dict[digraph.Arc, str]
  k: int
  n: int
  order: str
  family: str
  rank: Optional[Tuple[int, ...]]

  @property
  def head(self) -> int:
    return head_length(self.k)


class PartitionResult(NamedTuple):
  """Outcome of the neighbourhood partition check.

  Attributes:
    ok: N(v) splits into at most `max_parts` tournaments.
    parts: the tournaments, if `ok`.
    stable_set: a maximum stable set of N(v) if not `ok`; its size exceeds
      `max_parts` whenever the stable set alone explains the violation.
    clique_cover: fewest tournaments needed, if computed.
  """
  ok: bool
  parts: Tuple[digraph.VertexSet, ...] = ()
  stable_set: digraph.VertexSet = ()
  clique_cover: Optional[int] = None


class TriangleProfile(NamedTuple):
  triangle: Tuple[int, int, int]
  classes: Tuple[str, ...]


def head_length(k: int) -> int:
  return (k + 1) // 2


def back_edge_family(k: int) -> config.Construction:
  """The registered family for k, or the generic odd-k back-edge family."""
  for family in config.constructions.values():
    if family.k == k:
      return family
  if k < 3 or not k % 2:
    raise BadParameter(f'Back-edge constructions need odd k >= 3, got {k}.')
  head = head_length(k)
  return config.Construction(f'f{k}', k, head, k + 1, 4, head - 1, False)


def _family(name_or_family: Union[str, config.Construction]
           ) -> config.Construction:
  if isinstance(name_or_family, config.Construction):
    return name_or_family
  if name_or_family in config.constructions:
    return config.constructions[name_or_family]
  if name_or_family.startswith('f') and name_or_family[1:].isdigit():
    return back_edge_family(int(name_or_family[1:]))
  raise BadParameter(f'Unknown construction `{name_or_family}`.')


def _check_size(k: int, n: int, max_vertices: int):
  if k < 1 or n < k + 1:
    raise BadParameter(f'Shift tuples need k >= 1 and n >= k + 1, got '
                       f'k={k}, n={n}.')
  count = math.comb(n, k)
  if count > max_vertices:
    raise BadParameter(f'C({n}, {k}) = {count} vertices exceeds the limit of '
                       f'{max_vertices}.')


def shift_tuples(k: int, n: int) -> List[ShiftVertex]:
  return list(itertools.combinations(range(1, n + 1), k))


def _shift_arcs(labels: Sequence[ShiftVertex],
                n: int) -> List[Tuple[int, int]]:
  index = {t: i for i, t in enumerate(labels)}
  arcs = []
  for i, u in enumerate(labels):
    for x in range(u[-1] + 1, n + 1):
      arcs.append((i, index[u[1:] + (x,)]))
  return arcs


def shift_graph(k: int, n: int, max_vertices: int = MAX_VERTICES) -> nx.Graph:
  """The undirected k-tuple shift graph on [n]; nodes are the tuples."""
  _check_size(k, n, max_vertices)
  labels = shift_tuples(k, n)
  graph = nx.Graph()
  graph.add_nodes_from(labels)
  graph.add_edges_from((labels[a], labels[b]) for a, b in _shift_arcs(labels, n))
  return graph


def shift_digraph(k: int,
                  n: int,
                  max_vertices: int = MAX_VERTICES) -> LabeledConstruction:
  """Shift graph oriented from each tuple to its shifts (X arcs only)."""
  _check_size(k, n, max_vertices)
  labels = tuple(shift_tuples(k, n))
  arcs = _shift_arcs(labels, n)
  return LabeledConstruction(
      digraph.from_edge_list(len(labels), arcs), labels,
      {arc: X for arc in arcs}, k, n, LEX, SHIFT, tuple(range(len(labels))))


def _resolve_order(order: Union[None, str, Sequence[int]],
                   size: int) -> Tuple[str, Tuple[int, ...]]:
  """Order name and rank of every vertex."""
  if order is None or order == LEX:
    return LEX, tuple(range(size))
  if isinstance(order, str):
    name, _, seed = order.partition(':')
    if name != 'random' or not seed.lstrip('-').isdigit():
      raise BadParameter(f'Invalid order `{order}`, expected lex or '
                         'random:<seed>.')
    perm = np.random.default_rng(int(seed)).permutation(size)
    return order, tuple(int(p) for p in perm)
  rank = tuple(int(r) for r in order)
  if sorted(rank) != list(range(size)):
    raise BadParameter('A custom order must rank every vertex exactly once.')
  return 'custom', rank


def build_family(family: Union[str, config.Construction],
                 n: int,
                 order: Union[None, str, Sequence[int]] = LEX,
                 max_vertices: int = MAX_VERTICES) -> LabeledConstruction:
  """Builds the back-edge construction F_n of a family.

  Args:
    family: `f7`, `f5`, `f<k>` for another odd k, or a registered record.
    n: index range, at least `family.min_n`.
    order: `lex`, `random:<seed>` or an explicit rank per vertex.
    max_vertices: refuse larger instances.

  Returns:
    The construction with vertices in lexicographic tuple order.
  """
  family = _family(family)
  k, head = family.k, family.head
  if n < family.min_n:
    raise BadParameter(f'{family.name} needs n >= {family.min_n}, got {n}.')
  _check_size(k, n, max_vertices)
  labels = tuple(shift_tuples(k, n))
  order_name, rank = _resolve_order(order, len(labels))

  arc_classes = {arc: X for arc in _shift_arcs(labels, n)}
  by_prefix = collections.defaultdict(list)
  by_suffix = collections.defaultdict(list)
  for i, t in enumerate(labels):
    by_prefix[t[:head]].append(i)
    by_suffix[t[k - head:]].append(i)
  for i, u in enumerate(labels):
    for j in by_suffix.get(u[:head], ()):
      arc_classes[(i, j)] = Y
  for cls, groups in ((Z1, by_prefix), (Z2, by_suffix)):
    for group in groups.values():
      for a, b in itertools.combinations(group, 2):
        arc = (a, b) if rank[a] < rank[b] else (b, a)
        arc_classes.setdefault(arc, cls)

  d = digraph.from_edge_list(len(labels), sorted(arc_classes))
  logging.info('Built %s(n=%d, order=%s): %d vertices, %d arcs', family.name, n,
               order_name, d.n, d.num_arcs)
  return LabeledConstruction(d, labels, arc_classes, k, n, order_name,
                             family.name, rank)


def build_f7(n: int,
             order: Union[None, str, Sequence[int]] = LEX,
             max_vertices: int = MAX_VERTICES) -> LabeledConstruction:
  return build_family(config.F7, n, order, max_vertices)


def build_f5(n: int,
             order: Union[None, str, Sequence[int]] = LEX,
             max_vertices: int = MAX_VERTICES) -> LabeledConstruction:
  return build_family(config.F5, n, order, max_vertices)


def mark(c: LabeledConstruction, v: int) -> int:
  """The coordinate m(v), the middle entry of the tuple."""
  return c.labels[v][c.head - 1]


def to_annotations(c: LabeledConstruction) -> digraph.Annotations:
  meta = {'construction': c.family, 'k': str(c.k), 'n': str(c.n),
          'order': c.order}
  return digraph.Annotations(
      dict(c.arc_classes), {v: t for v, t in enumerate(c.labels)}, meta)


def construction_from_annotations(
    d: Digraph, annotations: digraph.Annotations) -> LabeledConstruction:
  """Rebuilds a construction from an annotated edge list alone."""
  labels = []
  for v in range(d.n):
    if v not in annotations.labels:
      raise BadParameter(f'Vertex {v} has no #label line.')
    labels.append(tuple(annotations.labels[v]))
  meta = annotations.meta
  k = int(meta.get('k', len(labels[0]) if labels else 0))
  n = int(meta.get('n', max((t[-1] for t in labels), default=0)))
  for v, t in enumerate(labels):
    if len(t) != k or list(t) != sorted(set(t)) or t[0] < 1 or t[-1] > n:
      raise BadParameter(f'Label of vertex {v} is not an increasing {k}-tuple '
                         f'over [{n}]: {t}.')
  missing = [arc for arc in d.arcs() if arc not in annotations.arc_classes]
  if missing:
    raise BadParameter(f'Arcs without #class: {missing[:5]}.')
  bad = {cls for cls in annotations.arc_classes.values()
         if cls not in ARC_CLASSES}
  if bad:
    raise BadParameter(f'Unknown arc classes {sorted(bad)}.')
  return LabeledConstruction(d, tuple(labels), dict(annotations.arc_classes), k,
                             n, meta.get('order', LEX),
                             meta.get('construction', 'file'), None)


def _arc_class_of(c: LabeledConstruction, u: int, v: int) -> Optional[str]:
  return c.arc_classes.get((u, v))


def _neighbourhood_groups(c: LabeledConstruction, v: int) -> Dict[str, int]:
  """N(v) split into shift-in, shift-out, back-out (A), back-in (B), M, N."""
  d = c.digraph
  groups = {name: 0 for name in ('Xin', 'Xout', 'A', 'B', 'M', 'N')}
  for u in utils.iter_bits(d.nbr_row(v)):
    if d.has_arc(u, v):
      cls = _arc_class_of(c, u, v)
      key = {X: 'Xin', Y: 'B', Z1: 'M', Z2: 'N'}[cls]
    else:
      cls = _arc_class_of(c, v, u)
      key = {X: 'Xout', Y: 'A', Z1: 'M', Z2: 'N'}[cls]
    groups[key] |= 1 << u
  return groups


def _is_clique(d: Digraph, mask: int) -> bool:
  return digraph.is_tournament(d, mask)


def verify_neighborhood_tournament_partition(
    c: LabeledConstruction,
    v: int,
    max_parts: int,
    max_nodes: Optional[int] = None) -> PartitionResult:
  """Covers N(v) by at most `max_parts` tournaments.

  Tries the grouping {shift-in, shift-out, prefix-sharing plus back-out,
  back-in plus suffix-sharing} first (shift-in and shift-out merged when
  they are complete to each other), then an exact clique cover.

  Args:
    c: the construction.
    v: the vertex.
    max_parts: number of tournaments allowed.
    max_nodes: budget of the exact clique cover.

  Returns:
    The partition, or a maximum stable set of N(v) as the violation.
  """
  d = c.digraph
  nbrs = d.nbr_row(v)
  if not nbrs:
    return PartitionResult(True, (), (), 0)
  groups = _neighbourhood_groups(c, v)
  shift = groups['Xin'] | groups['Xout']
  parts = [shift] if _is_clique(d, shift) else [groups['Xin'], groups['Xout']]
  parts += [groups['M'] | groups['A'], groups['B'] | groups['N']]
  parts = [p for p in parts if p]
  if len(parts) <= max_parts and all(_is_clique(d, p) for p in parts):
    return PartitionResult(True, tuple(utils.from_mask(p) for p in parts))

  cover = dicolor.clique_cover_partition(d, nbrs, max_nodes)
  if len(cover) <= max_parts:
    return PartitionResult(True, cover, clique_cover=len(cover))
  stable = dicolor.maximum_stable_set(d, nbrs, max_nodes)
  return PartitionResult(False, (), stable, len(cover))


def verify_no_cyclic_triangle(
    c: Union[LabeledConstruction, Digraph]) -> Optional[Tuple[int, int, int]]:
  """First cyclic triangle (u, v, w) with u smallest, or None."""
  d = c.digraph if isinstance(c, LabeledConstruction) else c
  for u in range(d.n):
    higher = ~((1 << (u + 1)) - 1)
    for v in utils.iter_bits(d.out_row(u) & higher):
      closing = d.out_row(v) & d.in_row(u) & higher
      if closing:
        return (u, v, utils.lowest_bit(closing))
  return None


def cyclic_triangles(d: Digraph) -> List[Tuple[int, int, int]]:
  triangles = []
  for u in range(d.n):
    higher = ~((1 << (u + 1)) - 1)
    for v in utils.iter_bits(d.out_row(u) & higher):
      for w in utils.iter_bits(d.out_row(v) & d.in_row(u) & higher):
        triangles.append((u, v, w))
  return triangles


def verify_triangle_profile_f5(
    c: LabeledConstruction) -> Optional[TriangleProfile]:
  """Every cyclic triangle uses two X arcs and one Y arc."""
  for u, v, w in cyclic_triangles(c.digraph):
    classes = (c.arc_classes.get((u, v)), c.arc_classes.get((v, w)),
               c.arc_classes.get((w, u)))
    if sorted(classes, key=str) != [X, X, Y]:
      return TriangleProfile((u, v, w), classes)
  return None


def dichromatic_lower_bound_via_gallai_roy(c: LabeledConstruction,
                                           max_nodes: Optional[int] = None
                                          ) -> int:
  """ceil(chi(G_n) / (h - 1)).

  A color class of the X and Y arcs cannot hold h consecutive shifts (the back
  arc closes them into a cycle), so its longest X path has at most h - 1
  vertices and the class is (h - 1)-colorable in the shift graph.

  Args:
    c: a back-edge construction.
    max_nodes: budget of the exact chromatic number.

  Returns:
    The lower bound on the dichromatic number.
  """
  divisor = c.head - 1
  if divisor < 1:
    raise BadParameter(f'No back-edge bound for k={c.k}.')
  chi = dicolor.chromatic_number(shift_graph(c.k, c.n), max_nodes).value
  return -(-chi // divisor)


def _class_digraph(c: LabeledConstruction, classes: Sequence[str]) -> Digraph:
  return digraph.from_edge_list(
      c.digraph.n, [arc for arc, cls in c.arc_classes.items() if cls in classes])


def verify_class_acyclicity(c: LabeledConstruction) -> Optional[str]:
  """Name of the first arc class set that is not acyclic, or None.

  Also reports `partition` when some arc has no class (or a class names a
  missing arc) and `order` when a Z arc runs against the total order.
  """
  arcs = set(c.digraph.arcs())
  if arcs != set(c.arc_classes):
    return 'partition'
  for name, classes in (('X', (X,)), ('Y', (Y,)), ('Z', (Z1, Z2))):
    if not digraph.is_acyclic(_class_digraph(c, classes)):
      return name
  if c.rank is not None:
    for (u, v), cls in c.arc_classes.items():
      if cls in (Z1, Z2) and c.rank[u] > c.rank[v]:
        return 'order'
  return None


def verify_mark_monotone(c: LabeledConstruction) -> Optional[digraph.Arc]:
  """First X arc not increasing m, or Y arc not decreasing it."""
  for (u, v), cls in sorted(c.arc_classes.items()):
    if cls == X and not mark(c, u) < mark(c, v):
      return (u, v)
    if cls == Y and not mark(c, u) > mark(c, v):
      return (u, v)
  return None


def verify_star_free(c: Union[LabeledConstruction, Digraph],
                     degree: int = 5,
                     max_nodes: Optional[int] = None
                    ) -> Optional[Tuple[patterns.Pattern, patterns.Embedding]]:
  """No induced oriented star of `degree` leaves, over every in/out split."""
  d = c.digraph if isinstance(c, LabeledConstruction) else c
  result = patterns.free_of_all(d, patterns.star_orientations(degree), max_nodes)
  if result.free:
    return None
  return result.pattern, result.embedding


def verify_no_in_triangle(
    c: Union[LabeledConstruction, Digraph],
    max_nodes: Optional[int] = None
) -> Optional[Tuple[patterns.Pattern, patterns.Embedding]]:
  """Neither the in-triangle nor the out-triangle is a subgraph."""
  d = c.digraph if isinstance(c, LabeledConstruction) else c
  for tag in (patterns.InTriangle(), patterns.OutTriangle()):
    pattern = patterns.build(tag)
    embedding = patterns.find_subgraph(d, pattern, max_nodes)
    if embedding is not None:
      return pattern, embedding
  return None


def _triangle_check(c: LabeledConstruction) -> utils.CheckResult:
  family = _family_or_none(c)
  if family is not None and family.triangle_free:
    triangle = verify_no_cyclic_triangle(c)
    if triangle is None:
      return utils.CheckResult('5.3', 'pass')
    return utils.CheckResult('5.3', 'fail', {'triangle': list(triangle)})
  profile = verify_triangle_profile_f5(c)
  if profile is None:
    return utils.CheckResult('5.3', 'pass')
  return utils.CheckResult('5.3', 'fail', {
      'triangle': list(profile.triangle),
      'classes': list(profile.classes)
  })


def _family_or_none(c: LabeledConstruction) -> Optional[config.Construction]:
  try:
    family = _family(c.family)
  except BadParameter:
    return None
  return family if family.k == c.k else None


def _partition_check(c: LabeledConstruction, max_parts: int,
                     max_nodes: Optional[int]) -> utils.CheckResult:
  for v in tqdm.tqdm(range(c.digraph.n), desc='5.2', leave=False):
    result = verify_neighborhood_tournament_partition(c, v, max_parts,
                                                      max_nodes)
    if not result.ok:
      return utils.CheckResult(
          '5.2', 'fail', {
              'vertex': v,
              'label': list(c.labels[v]),
              'stable_set': list(result.stable_set),
              'clique_cover': result.clique_cover
          })
  return utils.CheckResult('5.2', 'pass', {'max_parts': max_parts})


def _lower_bound_check(c: LabeledConstruction, exact_limit: int,
                       max_nodes: Optional[int]) -> utils.CheckResult:
  lower = dichromatic_lower_bound_via_gallai_roy(c, max_nodes)
  if c.digraph.n > exact_limit:
    return utils.CheckResult('5.1', 'skipped', {'lower_bound': lower})
  chi, coloring = dicolor.dichromatic_number(c.digraph, max_nodes)
  witness = {'lower_bound': lower, 'chi_dir': chi,
             'coloring': list(coloring.colors)}
  return utils.CheckResult('5.1', 'pass' if lower <= chi else 'fail', witness)


def _classes_check(c: LabeledConstruction) -> utils.CheckResult:
  failing = verify_class_acyclicity(c)
  if failing is None and c.rank is not None:
    arc = verify_mark_monotone(c)
    if arc is not None:
      return utils.CheckResult('classes', 'fail', {'arc': list(arc)})
  if failing is None:
    return utils.CheckResult('classes', 'pass')
  return utils.CheckResult('classes', 'fail', {'class': failing})


def _pattern_check(c: LabeledConstruction,
                   max_nodes: Optional[int]) -> utils.CheckResult:
  family = _family_or_none(c)
  if family is not None and family.triangle_free:
    claim, hit = 'star-free', verify_star_free(c, 5, max_nodes)
  else:
    claim, hit = 'it-free', verify_no_in_triangle(c, max_nodes)
  if hit is None:
    return utils.CheckResult(claim, 'pass')
  pattern, embedding = hit
  return utils.CheckResult(claim, 'fail', {
      'pattern': patterns.format_tag(pattern.tag),
      'embedding': list(embedding)
  })


def claim_suite(
    c: LabeledConstruction,
    exact_limit: int = 40,
    max_nodes: Optional[int] = None
) -> List[Tuple[str, Callable[[], utils.CheckResult]]]:
  """The checks of a construction as (claim id, thunk) pairs, cheap first."""
  family = _family_or_none(c)
  max_parts = family.partition_bound if family is not None else 4
  return [
      ('classes', lambda: _classes_check(c)),
      ('5.3', lambda: _triangle_check(c)),
      ('5.2', lambda: _partition_check(c, max_parts, max_nodes)),
      ('star-free' if family is not None and family.triangle_free else
       'it-free', lambda: _pattern_check(c, max_nodes)),
      ('5.1', lambda: _lower_bound_check(c, exact_limit, max_nodes)),
  ]


def verify_claims(c: LabeledConstruction,
                  exact_limit: int = 40,
                  max_nodes: Optional[int] = None) -> List[utils.CheckResult]:
  """Runs the claim suite; `BudgetExceeded` propagates."""
  results = []
  for claim, check in claim_suite(c, exact_limit, max_nodes):
    with utils.Stopwatch() as watch:
      result = check()
    results.append(result._replace(elapsed_ms=watch.elapsed_ms))
    logging.info('Claim %s: %s', claim, result.status)
  return results
