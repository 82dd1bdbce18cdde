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
"""Constructive dicolorings (nice sets, broom-free pipeline) and bag chains.

Everything works on vertex masks of a host digraph, so recursion on induced
subdigraphs never relabels vertices.
"""
import collections
import itertools
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from absl import logging
import networkx as nx

# pylint: disable=g-bad-import-order
import dicolor
import digraph
import patterns
import utils

Digraph = digraph.Digraph
VertexSet = digraph.VertexSet
# {vertex: color} over some vertex subset
PartialColors = Dict[int, int]
Colorer = Callable[[Digraph, int], PartialColors]

FIRST_IN = 'first_in'
FIRST_OUT = 'first_out'
NOT_OURS = 'not-ours'
PARTITION_DICHI = 'partition-dichi'
K_POLICY = 'ramsey_upper(max(r, s), omega + 1)'


class BadPartition(ValueError):
  pass


class OracleFailure(RuntimeError):
  """A nice-set oracle returned a certificate that does not check out."""

  def __init__(self, reason: str, certificate: Any = None):
    self.reason = reason
    self.certificate = certificate
    super().__init__(f'Nice-set oracle failed: {reason}')


class ColorBudgetBug(RuntimeError):
  """A construction used more colors than its proven bound."""


class NotStronglyConnected(ValueError):
  pass


class PmctNotFound(RuntimeError):
  """No maximum tournament admits a sink-to-source path avoiding it."""

  def __init__(self, vertices: VertexSet, tournaments: Sequence[VertexSet]):
    self.vertices = vertices
    self.tournaments = tuple(tournaments)
    super().__init__(f'No closing path on {list(vertices)}.')


class NicenessViolated(ValueError):

  def __init__(self, vertex: int, in_outside: VertexSet,
               out_outside: VertexSet, k: int):
    self.vertex = vertex
    self.in_outside = in_outside
    self.out_outside = out_outside
    self.k = k
    super().__init__(
        f'Vertex {vertex} has {len(in_outside)} in- and {len(out_outside)} '
        f'out-neighbours outside the set, both above k={k}.')


class UncoveredVertex(ValueError):

  def __init__(self, vertex: int, mode: str):
    self.vertex = vertex
    super().__init__(f'Vertex {vertex} has no path neighbour for {mode}.')


class FreenessViolated(ValueError):

  def __init__(self, pattern: patterns.Pattern, embedding: patterns.Embedding):
    self.pattern = pattern
    self.embedding = embedding
    super().__init__(f'Input contains {patterns.format_tag(pattern.tag)} at '
                     f'{list(embedding)}.')


class NotAcyclic(ValueError):
  pass


class NiceSetCertificate(NamedTuple):
  """S with a split S1/S2: S1 has <= k outside in-, S2 <= k outside out-nbrs."""
  S: VertexSet
  S1: VertexSet
  S2: VertexSet
  k: int


class Pmct(NamedTuple):
  """Path-minimizing closed tournament.

  Attributes:
    K: a tournament on omega(D) vertices.
    P: empty if K is strongly connected, else a directed path from a sink
      vertex of K to a source vertex of K whose interior avoids K.
    C: K together with the vertices of P.
  """
  K: VertexSet
  P: Tuple[int, ...]
  C: VertexSet


class BagChain(NamedTuple):
  bags: Tuple[VertexSet, ...]
  c: int
  beta: int


class ZoneAssignment(NamedTuple):
  """Zone index (0..t) of every vertex outside the chain."""
  zones: Dict[int, int]
  t: int

  def members(self, i: int) -> VertexSet:
    return tuple(sorted(v for v, z in self.zones.items() if z == i))


class FirstLastPartition(NamedTuple):
  a_minus: VertexSet
  a_plus: VertexSet
  b_minus: VertexSet
  b_plus: VertexSet


class BroomFreeColoring(NamedTuple):
  """Result of the broom-free pipeline.

  Attributes:
    coloring: a dicoloring of the whole input.
    trace: one record per recursion level on a strongly connected part.
    bound: the color bound b(omega) for the input's clique number.
    k_policy: how the niceness constant k was derived from omega.
  """
  coloring: dicolor.Dicoloring
  trace: List[Dict[str, Any]]
  bound: int
  k_policy: str


class LayeredCheck(NamedTuple):
  ok: bool
  failed: Optional[str]
  chi: Optional[int]
  bound: Optional[int]
  m: Optional[int] = None
  m_prime: Optional[int] = None


def _compact(colors: PartialColors) -> PartialColors:
  relabel = {}
  for v in sorted(colors):
    relabel.setdefault(colors[v], len(relabel))
  return {v: relabel[c] for v, c in colors.items()}


def _num_colors(colors: PartialColors) -> int:
  return len(set(colors.values()))


def is_valid_on(d: Digraph, colors: PartialColors) -> bool:
  """Whether a partial coloring is a dicoloring of the colored vertices."""
  classes = collections.defaultdict(int)
  for v, c in colors.items():
    classes[c] |= 1 << v
  return all(digraph.is_acyclic_mask(d, m) for m in classes.values())


def exact_colorer(max_nodes: Optional[int] = None) -> Colorer:
  """Colors D[mask] optimally with the exact solver."""

  def colorer(d: Digraph, mask: int) -> PartialColors:
    result = dicolor.solve_dichromatic(d, mask, max_nodes)
    return {v: result.colors[v] for v in utils.iter_bits(mask)}

  return colorer


def verify_nice_set(d: Digraph,
                    cert: NiceSetCertificate,
                    mask: Optional[int] = None) -> bool:
  """Checks the certificate inside D[mask] (default: all of D)."""
  mask = d.full_mask if mask is None else mask
  s, s1, s2 = (utils.to_mask(x) for x in (cert.S, cert.S1, cert.S2))
  if s1 & s2 or s1 | s2 != s:
    raise BadPartition(f'S1 and S2 must partition S, got {cert}.')
  if not s or s & ~mask:
    return False
  outside = mask & ~s
  return (all(utils.popcount(d.in_row(v) & outside) <= cert.k
              for v in utils.iter_bits(s1)) and
          all(utils.popcount(d.out_row(v) & outside) <= cert.k
              for v in utils.iter_bits(s2)))


def nice_certificate(d: Digraph, s_mask: int, mask: int,
                     k: int) -> NiceSetCertificate:
  """Puts each vertex of S on the in-side if it can, else on the out-side."""
  outside = mask & ~s_mask
  s1, s2 = [], []
  for v in utils.iter_bits(s_mask):
    in_out = d.in_row(v) & outside
    out_out = d.out_row(v) & outside
    if utils.popcount(in_out) <= k:
      s1.append(v)
    elif utils.popcount(out_out) <= k:
      s2.append(v)
    else:
      raise NicenessViolated(v, utils.from_mask(in_out),
                             utils.from_mask(out_out), k)
  return NiceSetCertificate(utils.from_mask(s_mask), tuple(s1), tuple(s2), k)


def extend_coloring_over_nice_set(d: Digraph, cert: NiceSetCertificate,
                                  inner: PartialColors,
                                  outside: PartialColors,
                                  c: int) -> PartialColors:
  """Colors S on top of a coloring of the outside (one product step).

  A color is read as (m, inner) with width 2c: S1 takes inner colors from
  [0, c) and S2 from [c, 2c); m(v) avoids the first coordinates of the
  outside in-neighbours (S1) or out-neighbours (S2).

  Args:
    d: the host digraph.
    cert: the nice set; S must be disjoint from `outside`.
    inner: dicoloring of D[S] with colors in [0, c).
    outside: dicoloring of the vertices outside S.
    c: palette width of `inner`.

  Returns:
    Colors of the vertices of S.
  """
  width = 2 * c
  result = {}
  for side, offset, row in ((cert.S1, 0, d.in_row), (cert.S2, c, d.out_row)):
    for v in side:
      taken = {outside[u] // width for u in utils.iter_bits(row(v))
               if u in outside}
      m = next(i for i in itertools.count() if i not in taken)
      result[v] = m * width + offset + inner[v]
  return result


def _nice_set_colors(d: Digraph, mask: int,
                     oracle: Callable[[Digraph, int], NiceSetCertificate],
                     c: Optional[int], k: int,
                     colorer: Colorer) -> Tuple[PartialColors, int]:
  """Peels nice sets off D[mask], then colors them innermost first."""
  levels = []
  remaining = mask
  while remaining:
    cert = oracle(d, remaining)
    s_mask = utils.to_mask(cert.S)
    if not s_mask or s_mask & ~remaining:
      raise OracleFailure('S must be a nonempty subset of the current digraph',
                          cert)
    if cert.k > k:
      raise OracleFailure(f'certificate uses k={cert.k} > {k}', cert)
    try:
      nice = verify_nice_set(d, cert, remaining)
    except BadPartition as e:
      raise OracleFailure(str(e), cert) from e
    if not nice:
      raise OracleFailure(f'S is not {cert.k}-nice', cert)
    inner = {}
    for part in (cert.S1, cert.S2):
      if part:
        inner.update(_compact(colorer(d, utils.to_mask(part))))
    levels.append((cert, inner))
    remaining &= ~s_mask

  widest = max((max(inner.values()) + 1 for _, inner in levels if inner),
               default=1)
  if c is None:
    c = widest
  elif widest > c:
    raise OracleFailure(f'S needs {widest} colors, more than c={c}')
  colors = {}
  for cert, inner in reversed(levels):
    colors.update(extend_coloring_over_nice_set(d, cert, inner, colors, c))
  return colors, c


def color_via_nice_sets(d: Digraph,
                        oracle: Callable[[Digraph, int], NiceSetCertificate],
                        c: Optional[int],
                        k: int,
                        colorer: Optional[Colorer] = None,
                        max_nodes: Optional[int] = None) -> dicolor.Dicoloring:
  """Dicolors D with at most 2c(k + 1) colors from a nice-set oracle.

  Args:
    d: the digraph.
    oracle: maps (D, mask) to a k-nice set of D[mask] with chi_dir <= c; it
      is called on every digraph left after removing earlier sets.
    c: promised dichromatic number of every returned set (None: measured).
    k: niceness bound.
    colorer: colors D[S1] and D[S2]; the exact solver by default.
    max_nodes: budget of the default colorer.

  Returns:
    The dicoloring.
  """
  colorer = colorer or exact_colorer(max_nodes)
  colors, c = _nice_set_colors(d, d.full_mask, oracle, c, k, colorer)
  raw = [colors[v] for v in range(d.n)]
  if raw and (max(raw) >= 2 * c * (k + 1) or not is_valid_on(d, colors)):
    raise ColorBudgetBug(f'Nice-set product broke its bound 2c(k+1) with '
                         f'c={c}, k={k}.')
  return dicolor.make_dicoloring(raw)


def _pmct_candidates(d: Digraph, mask: int, clique: VertexSet):
  """(key, Pmct) pairs of the shortest closing paths for one clique."""
  kmask = utils.to_mask(clique)
  components = digraph.strong_components_mask(d, kmask)
  if len(components) == 1:
    yield (len(clique), clique, clique, ()), Pmct(clique, (), clique)
    return
  sources, sinks = components[0], components[-1]
  allowed = mask & ~kmask
  best = None
  found = []
  for s in utils.iter_bits(sinks):
    for t in utils.iter_bits(sources):
      graph = digraph.to_networkx(d, allowed | (1 << s) | (1 << t))
      try:
        length = nx.shortest_path_length(graph, s, t)
      except nx.NetworkXNoPath:
        continue
      if best is None or length < best:
        best, found = length, [(s, t)]
      elif length == best:
        found.append((s, t))
  for s, t in found:
    graph = digraph.to_networkx(d, allowed | (1 << s) | (1 << t))
    for path in nx.all_shortest_paths(graph, s, t):
      closed = tuple(sorted(set(clique) | set(path)))
      yield (len(closed), closed, clique, tuple(path)), Pmct(
          clique, tuple(path), closed)


def find_pmct(d: Digraph, mask: Optional[int] = None) -> Pmct:
  """The PMCT of D[mask] minimizing |C|, ties broken lexicographically.

  A strongly connected maximum tournament always wins, since it closes with
  the empty path.

  Args:
    d: the host digraph.
    mask: restrict to D[mask]; must be strongly connected.

  Returns:
    The PMCT.
  """
  mask = d.full_mask if mask is None else mask
  if not digraph.is_strongly_connected(digraph.induced_mask(d, mask).graph):
    raise NotStronglyConnected(
        f'PMCT needs a strongly connected digraph, got {utils.from_mask(mask)}.')
  best_key, best = None, None
  cliques = digraph.maximum_cliques(d, mask)
  for clique in cliques:
    for key, candidate in _pmct_candidates(d, mask, clique):
      if best_key is None or key < best_key:
        best_key, best = key, candidate
  if best is None:
    raise PmctNotFound(utils.from_mask(mask), cliques)
  return best


def broom_neighborhood_split(
    d: Digraph,
    pmct: Pmct,
    mask: Optional[int] = None) -> Tuple[VertexSet, VertexSet, VertexSet]:
  """(X, Z, Y): X sees C both ways, Z = N(C) - X, Y = N(X) - N[C]."""
  mask = d.full_mask if mask is None else mask
  c_mask = utils.to_mask(pmct.C)
  n_c = digraph.neighbors_mask(d, c_mask) & mask
  x_mask = 0
  for v in utils.iter_bits(n_c):
    if d.in_row(v) & c_mask and d.out_row(v) & c_mask:
      x_mask |= 1 << v
  y_mask = digraph.neighbors_mask(d, x_mask) & mask & ~(c_mask | n_c)
  return (utils.from_mask(x_mask), utils.from_mask(n_c & ~x_mask),
          utils.from_mask(y_mask))


def _broom_leaves(broom: patterns.Pattern) -> int:
  patterns.classify_broom_type(broom)
  return broom.tag.r


def niceness_constant(omega: int, r: int, s: int) -> int:
  return utils.ramsey_upper(max(r, s, 1), omega + 1)


def verify_ncx_nice(d: Digraph,
                    pmct: Pmct,
                    b: patterns.Pattern,
                    b_prime: patterns.Pattern,
                    k: Optional[int] = None,
                    mask: Optional[int] = None) -> NiceSetCertificate:
  """Certifies that N[C + X] is k-nice in D[mask].

  Args:
    d: the host digraph, free of both brooms.
    pmct: a PMCT of D[mask].
    b: first broom.
    b_prime: second broom.
    k: niceness bound; defaults to ramsey_upper(max(r, s), omega + 1).
    mask: restrict to D[mask].

  Returns:
    The certificate.
  """
  mask = d.full_mask if mask is None else mask
  if k is None:
    k = niceness_constant(
        digraph.underlying_clique_number(d, mask), _broom_leaves(b),
        _broom_leaves(b_prime))
  x_set, _, _ = broom_neighborhood_split(d, pmct, mask)
  core = utils.to_mask(pmct.C) | utils.to_mask(x_set)
  s_mask = core | (digraph.neighbors_mask(d, core) & mask)
  return nice_certificate(d, s_mask, mask, k)


def x_neighbourhood_oracle(
    x_set: Sequence[int],
    k: int) -> Callable[[Digraph, int], NiceSetCertificate]:
  """Nice sets N(x) within what is left of Y, for the first x that sees it."""

  def oracle(d: Digraph, ymask: int) -> NiceSetCertificate:
    x = next((x for x in x_set if d.nbr_row(x) & ymask), None)
    if x is None:
      raise OracleFailure(
          f'no vertex of X={list(x_set)} sees {list(utils.from_mask(ymask))}')
    return nice_certificate(d, d.nbr_row(x) & ymask, ymask, k)

  return oracle


def partition_first_last(d: Digraph,
                         path: Sequence[int],
                         excluded: Sequence[int] = (),
                         mask: Optional[int] = None) -> FirstLastPartition:
  """Splits N(path) - excluded by its first and by its last path neighbour.

  A- / A+: the first neighbour is an in- / out-neighbour.
  B+ / B-: the last neighbour is an out- / in-neighbour.

  Args:
    d: the host digraph.
    path: the path vertices in path order.
    excluded: vertices left out.
    mask: restrict to D[mask].

  Returns:
    The four sets.
  """
  mask = d.full_mask if mask is None else mask
  path_mask = utils.to_mask(path)
  candidates = (digraph.neighbors_mask(d, path_mask) & mask &
                ~utils.to_mask(excluded))
  a_minus, a_plus, b_minus, b_plus = [], [], [], []
  for v in utils.iter_bits(candidates):
    touching = [i for i, p in enumerate(path) if d.adjacent(v, p)]
    first, last = path[touching[0]], path[touching[-1]]
    (a_minus if d.has_arc(first, v) else a_plus).append(v)
    (b_plus if d.has_arc(v, last) else b_minus).append(v)
  return FirstLastPartition(
      tuple(a_minus), tuple(a_plus), tuple(b_minus), tuple(b_plus))


def layer_decomposition(d: Digraph, path: Sequence[int],
                        vertices: Sequence[int], mode: str) -> List[VertexSet]:
  """Layer i holds the vertices whose first path in-neighbour (`first_in`) or
  first path out-neighbour (`first_out`) is path[i]; 0-based."""
  if mode not in (FIRST_IN, FIRST_OUT):
    raise ValueError(f'Invalid mode {mode}.')
  layers = [[] for _ in path]
  for v in sorted(vertices):
    for i, p in enumerate(path):
      if (d.has_arc(p, v) if mode == FIRST_IN else d.has_arc(v, p)):
        layers[i].append(v)
        break
    else:
      raise UncoveredVertex(v, mode)
  return [tuple(layer) for layer in layers]


def residue_classes(layers: Sequence[Sequence[int]],
                    modulus: int) -> List[VertexSet]:
  """Class i is the union of the layers j with j = i mod `modulus`."""
  if modulus not in (3, 5):
    raise ValueError(f'Invalid modulus {modulus}, expected 3 or 5.')
  classes = [[] for _ in range(modulus)]
  for j, layer in enumerate(layers):
    classes[j % modulus].extend(layer)
  return [tuple(sorted(c)) for c in classes]


def broom_free_bound(omega: int, r: int, s: int) -> int:
  """b(1) = 1, b(w) = 2(w(g + 1) + g(6k + 25) + 2)(k + 1) with g = b(w - 1)."""
  if omega <= 0:
    return 0
  bound = 1
  for w in range(2, omega + 1):
    k = niceness_constant(w, r, s)
    bound = 2 * (w * (bound + 1) + bound * (6 * k + 25) + 2) * (k + 1)
  return bound


class _Palettes:
  """Disjoint palettes for the parts of one nice set."""

  def __init__(self):
    self.colors: PartialColors = {}
    self.size = 0
    self.spans: List[Dict[str, Any]] = []

  def add(self, name: str, colors: PartialColors):
    if not colors:
      return
    colors = _compact(colors)
    width = max(colors.values()) + 1
    for v, c in colors.items():
      self.colors[v] = self.size + c
    self.spans.append({
        'part': name,
        'start': self.size,
        'size': width,
        'vertices': len(colors)
    })
    self.size += width


def _path_index(path: Sequence[int], pick: str, row: Callable[[int], int],
                target: int) -> Optional[int]:
  indices = [i for i, p in enumerate(path) if row(p) & target]
  if not indices:
    return None
  return indices[0] if pick == 'min' else indices[-1]


class BroomFreeColorer:
  """The recursive pipeline for digraphs without two opposing brooms.

  Strongly connected parts are colored through the nice set N[C + X] of a
  PMCT C; the set itself is colored with disjoint palettes for N[K], the
  path, the path neighbourhood (split by broom types) and Y, and the rest of
  the digraph recursively.
  """

  def __init__(self,
               d: Digraph,
               first_type: int,
               second_type: int,
               r: int,
               s: int,
               max_nodes: Optional[int] = None):
    self._d = d
    self._first = first_type
    self._second = second_type
    self._r = r
    self._s = s
    self._max_nodes = max_nodes
    self._memo: Dict[int, PartialColors] = {}
    self.trace: List[Dict[str, Any]] = []

  def color(self, mask: int, depth: int = 0) -> PartialColors:
    if mask not in self._memo:
      self._memo[mask] = self._color(mask, depth)
    return dict(self._memo[mask])

  def _exact(self, mask: int) -> PartialColors:
    return exact_colorer(self._max_nodes)(self._d, mask)

  def _color(self, mask: int, depth: int) -> PartialColors:
    d = self._d
    if not mask:
      return {}
    if digraph.is_acyclic_mask(d, mask):
      return {v: 0 for v in utils.iter_bits(mask)}
    components = digraph.strong_components_mask(d, mask)
    if len(components) > 1:
      colors = {}
      for component in components:
        colors.update(self.color(component, depth))
      return colors
    return self._color_strong(mask, depth)

  def _color_strong(self, mask: int, depth: int) -> PartialColors:
    d = self._d
    omega = digraph.underlying_clique_number(d, mask)
    k = niceness_constant(omega, self._r, self._s)
    try:
      pmct = find_pmct(d, mask)
    except PmctNotFound as e:
      logging.warning('%s Coloring the part exactly.', e)
      return self._exact(mask)
    x_set, z_set, y_set = broom_neighborhood_split(d, pmct, mask)
    core = utils.to_mask(pmct.C) | utils.to_mask(x_set)
    s_mask = core | (digraph.neighbors_mask(d, core) & mask)
    cert = nice_certificate(d, s_mask, mask, k)
    level = {
        'depth': depth,
        'vertices': list(utils.iter_bits(mask)),
        'omega': omega,
        'k': k,
        'pmct': {'K': list(pmct.K), 'P': list(pmct.P), 'C': list(pmct.C)},
        'X': list(x_set),
        'Y': list(y_set),
        'Z': list(z_set),
        'nice_set': {'S': list(cert.S), 'S1': list(cert.S1),
                     'S2': list(cert.S2)},
        'case': None,
        'layers': [],
    }
    palettes = self._color_nice_set(mask, s_mask, pmct, x_set, y_set, k, level)
    level['palettes'] = palettes.spans
    level['nice_set_colors'] = palettes.size
    logging.debug('Level %d: %d vertices, omega=%d, |S|=%d, %d palette colors',
                  depth, utils.popcount(mask), omega, len(cert.S),
                  palettes.size)
    self.trace.append(level)

    rest = self.color(mask & ~s_mask, depth + 1)
    colors = dict(rest)
    colors.update(
        extend_coloring_over_nice_set(d, cert, palettes.colors, rest,
                                      palettes.size))
    return colors

  def _color_nice_set(self, mask: int, s_mask: int, pmct: Pmct,
                      x_set: VertexSet, y_set: VertexSet, k: int,
                      level: Dict[str, Any]) -> _Palettes:
    d = self._d
    palettes = _Palettes()
    k_mask = utils.to_mask(pmct.K)
    uncolored = s_mask & ~k_mask

    for c in pmct.K:
      palettes.add(f'K:{c}', {c: 0})
      part = d.nbr_row(c) & uncolored
      palettes.add(f'N({c})', self.color(part))
      uncolored &= ~part

    path_part = utils.to_mask(pmct.P) & uncolored
    if path_part:
      palettes.add('P', self._color_path(pmct.P, path_part))
      uncolored &= ~path_part

    if pmct.P:
      uncolored = self._color_path_neighbourhood(mask, pmct.P, uncolored, k,
                                                 palettes, level)

    y_part = utils.to_mask(y_set) & uncolored
    if y_part:
      palettes.add(
          'Y', self._nice_recursion(y_part, x_neighbourhood_oracle(x_set, k),
                                    k))
      uncolored &= ~y_part

    if uncolored:
      logging.warning('Vertices %s of the nice set fell through every part.',
                      utils.from_mask(uncolored))
      palettes.add('rest', self.color(uncolored))
    return palettes

  def _color_path(self, path: Sequence[int], part: int) -> PartialColors:
    colors = {v: i % 2 for i, v in enumerate(path) if part >> v & 1}
    if not is_valid_on(self._d, colors):
      logging.warning('Alternating coloring of the PMCT path is not a '
                      'dicoloring; using the exact solver.')
      return self._exact(part)
    return colors

  def _nice_recursion(self, part: int,
                      oracle: Callable[[Digraph, int], NiceSetCertificate],
                      k: int) -> PartialColors:
    try:
      colors, _ = _nice_set_colors(self._d, part, oracle, None, k,
                                   lambda _, m: self.color(m))
    except NicenessViolated as e:
      logging.warning('%s Coloring the part directly.', e)
      return self.color(part)
    return colors

  def _bullet(self, path: Sequence[int], part: int, bullet: int,
              k: int) -> PartialColors:
    """Nice-set recursion with S = N+-(v_i) for the extreme path index i."""
    d = self._d
    pick = 'min' if bullet in (1, 2) else 'max'
    row = d.out_row if bullet in (1, 3) else d.in_row

    def oracle(dd: Digraph, ymask: int) -> NiceSetCertificate:
      i = _path_index(path, pick, row, ymask)
      if i is None:
        return nice_certificate(dd, ymask, ymask, k)
      return nice_certificate(dd, row(path[i]) & ymask, ymask, k)

    return self._nice_recursion(part, oracle, k)

  def _color_path_neighbourhood(self, mask: int, path: Sequence[int],
                                uncolored: int, k: int, palettes: _Palettes,
                                level: Dict[str, Any]) -> int:
    d = self._d
    if len(path) <= 4:
      for p in path:
        part = d.nbr_row(p) & uncolored
        palettes.add(f'N(P:{p})', self.color(part))
        uncolored &= ~part
      return uncolored

    for q in tuple(path[:2]) + tuple(path[-2:]):
      part = d.nbr_row(q) & uncolored
      palettes.add(f'N(Q:{q})', self.color(part))
      uncolored &= ~part
    inner = list(path[2:-2])
    region = digraph.neighbors_mask(d, utils.to_mask(inner)) & uncolored
    split = partition_first_last(d, inner, (), region)
    a_minus, a_plus, b_minus, b_plus = (
        utils.to_mask(x) for x in split)
    case = (self._first, self._second)
    level['case'] = f'{case[0]}/{case[1]}'

    if case == (1, 2):
      palettes.add('A-', self._bullet(inner, a_minus, 1, k))
      palettes.add('A+', self._bullet(inner, a_plus, 2, k))
    elif case == (3, 4):
      palettes.add('B-', self._bullet(inner, b_minus, 3, k))
      palettes.add('B+', self._bullet(inner, b_plus, 4, k))
    elif case == (3, 2):
      palettes.add('A+', self._bullet(inner, a_plus, 2, k))
      palettes.add('B-', self._bullet(inner, b_minus & ~a_plus, 3, k))
      rest = region & ~(a_plus | b_minus)
      layers = layer_decomposition(d, inner, utils.from_mask(rest), FIRST_IN)
      level['layers'] = [list(layer) for layer in layers]
      for i, cls in enumerate(residue_classes(layers, 3)):
        palettes.add(f'C{i}', self._color_residue_class(layers, i, 3, cls))
    else:
      palettes.add('A-', self._bullet(inner, a_minus, 1, k))
      palettes.add('B+', self._bullet(inner, b_plus & ~a_minus, 4, k))
      rest = region & ~(a_minus | b_plus)
      layers = layer_decomposition(d, inner, utils.from_mask(rest), FIRST_OUT)
      level['layers'] = [list(layer) for layer in layers]
      omega = digraph.underlying_clique_number(d, mask)
      for i, cls in enumerate(residue_classes(layers, 5)):
        for name, part in self._split_by_tournaments(cls, omega):
          palettes.add(f'C{i}:{name}', self.color(part))
    return uncolored & ~region

  def _color_residue_class(self, layers: Sequence[VertexSet], i: int,
                           modulus: int, cls: VertexSet) -> PartialColors:
    """One palette for all layers of a class; each layer colored alone."""
    colors = {}
    for j in range(i, len(layers), modulus):
      colors.update(_compact(self.color(utils.to_mask(layers[j]))))
    if not is_valid_on(self._d, colors):
      logging.warning('Residue class %d is not layer-separated; coloring it '
                      'as a whole.', i)
      return self.color(utils.to_mask(cls))
    return colors

  def _split_by_tournaments(self, cls: VertexSet,
                            omega: int) -> List[Tuple[str, int]]:
    """Sink vertices, source vertices and the rest of omega-tournaments."""
    d = self._d
    cls_mask = utils.to_mask(cls)
    sinks = sources = 0
    if digraph.underlying_clique_number(d, cls_mask) == omega:
      for clique in digraph.maximum_cliques(d, cls_mask):
        components = digraph.strong_components_mask(d, utils.to_mask(clique))
        if len(components) > 1:
          sources |= components[0]
          sinks |= components[-1]
    sources &= ~sinks
    return [('sinks', sinks), ('sources', sources),
            ('rest', cls_mask & ~(sinks | sources))]


def dicolor_broom_free(d: Digraph,
                       b: patterns.Pattern,
                       b_prime: patterns.Pattern,
                       t: Optional[int] = None,
                       max_nodes: Optional[int] = None,
                       check_freeness: bool = True) -> BroomFreeColoring:
  """Dicolors a digraph without induced copies of two opposing brooms.

  Args:
    d: the digraph.
    b: a broom.
    b_prime: a broom whose middle arc points the other way.
    t: if given, the input is expected to be TT_t-free; only recorded.
    max_nodes: budget of exact subcalls and of the freeness check.
    check_freeness: search both brooms first.

  Returns:
    The coloring with its per-level trace and the color bound.
  """
  first, second = patterns.classify_broom_type(b), patterns.classify_broom_type(
      b_prime)
  if not patterns.opposing(b, b_prime):
    raise patterns.NotValidOrientation(
        f'{patterns.format_tag(b.tag)} and {patterns.format_tag(b_prime.tag)} '
        'are not opposing.')
  if first in (2, 4):
    first, second = second, first
    b, b_prime = b_prime, b
  if check_freeness:
    hit = patterns.free_of_all(d, [b, b_prime], max_nodes)
    if not hit.free:
      raise FreenessViolated(hit.pattern, hit.embedding)

  r, s = b.tag.r, b_prime.tag.r
  omega = digraph.underlying_clique_number(d)
  bound = broom_free_bound(omega, r, s)
  colorer = BroomFreeColorer(d, first, second, r, s, max_nodes)
  colors = colorer.color(d.full_mask)
  coloring = dicolor.make_dicoloring([colors[v] for v in range(d.n)])
  if not dicolor.verify_dicoloring(d, coloring):
    raise ColorBudgetBug('Broom-free pipeline produced an invalid coloring.')
  if coloring.k > bound:
    raise ColorBudgetBug(f'{coloring.k} colors exceed the bound {bound} for '
                         f'omega={omega}.')
  logging.info('Broom-free coloring: %d colors (bound %d, omega %d, t=%s)',
               coloring.k, bound, omega, t)
  return BroomFreeColoring(coloring, colorer.trace, bound, K_POLICY)


def _disjoint(bags: Sequence[Sequence[int]]) -> bool:
  seen = set()
  for bag in bags:
    if seen & set(bag):
      return False
    seen |= set(bag)
  return True


def verify_bag_chain(d: Digraph,
                     chain: BagChain,
                     mode: str = 'eq',
                     max_nodes: Optional[int] = None) -> bool:
  """Checks bag values and both neighbour conditions of a (c, beta)-chain.

  Args:
    d: the digraph.
    chain: the bags, in chain order.
    mode: `eq` requires chi_dir(bag) == beta, `ge` only >= beta.
    max_nodes: budget of every exact subcall.

  Returns:
    Whether the chain is valid.
  """
  if mode not in ('eq', 'ge'):
    raise ValueError(f'Invalid mode {mode}.')
  if not _disjoint(chain.bags):
    raise BadPartition('Bags of a chain must be disjoint.')
  masks = [utils.to_mask(bag) for bag in chain.bags]
  for bag in masks:
    chi = dicolor.dichromatic_of_mask(d, bag, max_nodes)
    if chi < chain.beta or (mode == 'eq' and chi != chain.beta):
      return False
  for i, bag in enumerate(masks):
    for v in utils.iter_bits(bag):
      if i > 0 and not dicolor.is_dicolorable(
          d, chain.c, d.out_row(v) & masks[i - 1], max_nodes):
        return False
      if i + 1 < len(masks) and not dicolor.is_dicolorable(
          d, chain.c, d.in_row(v) & masks[i + 1], max_nodes):
        return False
  return True


def extend_bag_chain_greedy(d: Digraph,
                            c: int,
                            beta: int,
                            seed: Sequence[int],
                            mode: str = 'eq',
                            max_nodes: Optional[int] = None,
                            max_length: Optional[int] = None) -> BagChain:
  """Appends greedily grown bags after `seed` until no bag reaches beta.

  Each new bag takes vertices in increasing order whenever both neighbour
  conditions against the previous bag still hold; in `eq` mode it is then
  trimmed until its dichromatic number is exactly beta.

  Args:
    d: the digraph.
    c: neighbour bound.
    beta: bag value.
    seed: the first bag.
    mode: `eq` or `ge`, as in `verify_bag_chain`.
    max_nodes: budget of every exact subcall.
    max_length: stop at this many bags.

  Returns:
    The chain, starting with `seed`.
  """
  if mode not in ('eq', 'ge'):
    raise ValueError(f'Invalid mode {mode}.')
  seed_mask = digraph.mask_of(d, seed)
  chi = dicolor.dichromatic_of_mask(d, seed_mask, max_nodes)
  if chi < beta or (mode == 'eq' and chi != beta):
    raise ValueError(f'Seed bag has chi_dir {chi}, expected {beta}.')
  masks = [seed_mask]
  used = seed_mask
  while max_length is None or len(masks) < max_length:
    previous = masks[-1]
    bag = 0
    for v in utils.iter_bits(d.full_mask & ~used):
      if not dicolor.is_dicolorable(d, c, d.out_row(v) & previous, max_nodes):
        continue
      grown = bag | (1 << v)
      if all(
          dicolor.is_dicolorable(d, c, d.in_row(u) & grown, max_nodes)
          for u in utils.iter_bits(d.in_row(v) & previous)):
        bag = grown
    if dicolor.dichromatic_of_mask(d, bag, max_nodes) < beta:
      break
    if mode == 'eq':
      for v in sorted(utils.iter_bits(bag), reverse=True):
        if dicolor.dichromatic_of_mask(d, bag & ~(1 << v), max_nodes) >= beta:
          bag &= ~(1 << v)
    masks.append(bag)
    used |= bag
    logging.debug('Bag %d: %s', len(masks), utils.from_mask(bag))
  return BagChain(tuple(utils.from_mask(m) for m in masks), c, beta)


def zone_partition(d: Digraph,
                   chain: BagChain,
                   c: int,
                   max_nodes: Optional[int] = None) -> ZoneAssignment:
  """Zone i (1-based) is the last bag where chi_dir(N-(v) & B_i) > c."""
  masks = [utils.to_mask(bag) for bag in chain.bags]
  outside = d.full_mask
  for m in masks:
    outside &= ~m
  zones = {}
  for v in utils.iter_bits(outside):
    zones[v] = 0
    for i in range(len(masks), 0, -1):
      if not dicolor.is_dicolorable(d, c, d.in_row(v) & masks[i - 1],
                                    max_nodes):
        zones[v] = i
        break
  return ZoneAssignment(zones, len(masks))


def zone_residue_classes(zones: ZoneAssignment,
                         modulus: int = 3) -> List[VertexSet]:
  """Class i is the union of the zones j with j = i mod `modulus`."""
  classes = [[] for _ in range(modulus)]
  for v, z in sorted(zones.zones.items()):
    classes[z % modulus].append(v)
  return [tuple(c) for c in classes]


def red_blue_split(
    d: Digraph,
    beta: int,
    max_nodes: Optional[int] = None
) -> Tuple[VertexSet, VertexSet, VertexSet]:
  """beta-red (chi_dir(N+) <= beta), beta-blue (chi_dir(N-) <= beta) and the
  rest; red takes precedence."""
  red, blue, rest = [], [], []
  for v in range(d.n):
    if dicolor.is_dicolorable(d, beta, d.out_row(v), max_nodes):
      red.append(v)
    elif dicolor.is_dicolorable(d, beta, d.in_row(v), max_nodes):
      blue.append(v)
    else:
      rest.append(v)
  return tuple(red), tuple(blue), tuple(rest)


def two_bag_chain(d: Digraph,
                  u: int,
                  c: int,
                  max_nodes: Optional[int] = None) -> Tuple[BagChain, bool]:
  """The chain (N-(u), N+(u)) with beta the smaller bag value, and whether
  it is a valid chain in `ge` mode."""
  first, second = d.in_row(u), d.out_row(u)
  beta = min(
      dicolor.dichromatic_of_mask(d, first, max_nodes),
      dicolor.dichromatic_of_mask(d, second, max_nodes))
  chain = BagChain((utils.from_mask(first), utils.from_mask(second)), c, beta)
  return chain, verify_bag_chain(d, chain, 'ge', max_nodes)


def _check_parts(d: Digraph, parts: Sequence[Sequence[int]]) -> List[int]:
  masks = [utils.to_mask(p) for p in parts]
  union = 0
  for m in masks:
    if union & m:
      raise BadPartition('Parts overlap.')
    union |= m
  if union != d.full_mask:
    raise BadPartition(
        f'Parts miss vertices {utils.from_mask(d.full_mask & ~union)}.')
  return masks


def check_not_ours(d: Digraph,
                   parts: Sequence[Sequence[int]],
                   k: int,
                   max_nodes: Optional[int] = None) -> LayeredCheck:
  """Part values <= k and back arcs spanning <= k give chi_dir(D) <= 2k."""
  masks = _check_parts(d, parts)
  position = {}
  for i, m in enumerate(masks):
    for v in utils.iter_bits(m):
      position[v] = i
  for i, m in enumerate(masks):
    if not dicolor.is_dicolorable(d, k, m, max_nodes):
      return LayeredCheck(False, f'part {i} has chi_dir > {k}', None, 2 * k)
  for u, v in d.arcs():
    j, i = position[u], position[v]
    if i < j:
      span = 0
      for m in masks[i + 1:j + 1]:
        span |= m
      if not dicolor.is_dicolorable(d, k, span, max_nodes):
        return LayeredCheck(False, f'back arc {u}->{v} spans chi_dir > {k}',
                            None, 2 * k)
  chi = dicolor.dichromatic_of_mask(d, d.full_mask, max_nodes)
  if chi > 2 * k:
    return LayeredCheck(False, 'conclusion', chi, 2 * k)
  return LayeredCheck(True, None, chi, 2 * k)


def check_partition_dichi(d: Digraph,
                          parts: Sequence[Sequence[int]],
                          m_prime: Optional[int] = None,
                          max_nodes: Optional[int] = None) -> LayeredCheck:
  """Forward/backward neighbourhood bounds give chi_dir <= 6(m + m') + 2.

  m is measured as the largest chi_dir of a non-neighbourhood; m' is
  measured from the hypotheses when not given.

  Args:
    d: the digraph.
    parts: an ordered partition of V(D).
    m_prime: the hypothesis bound.
    max_nodes: budget of every exact subcall.

  Returns:
    The check; `failed` names the first violated hypothesis.
  """
  masks = _check_parts(d, parts)
  chi_of = lambda mask: dicolor.dichromatic_of_mask(d, mask, max_nodes)
  m = max((chi_of(digraph.non_neighbors_mask(d, 1 << v)) for v in range(d.n)),
          default=0)
  measured = []
  for i, mask in enumerate(masks):
    earlier = sum(masks[:i])
    later = sum(masks[i + 1:])
    measured.append((f'part {i}', chi_of(mask)))
    for v in utils.iter_bits(mask):
      measured.append((f'N+({v}) in earlier parts', chi_of(d.out_row(v) &
                                                           earlier)))
      measured.append((f'N-({v}) in later parts', chi_of(d.in_row(v) & later)))
  if m_prime is None:
    m_prime = max((value for _, value in measured), default=0)
  bound = 6 * (m + m_prime) + 2
  for name, value in measured:
    if value > m_prime:
      return LayeredCheck(False, f'{name} has chi_dir {value} > {m_prime}',
                          None, bound, m, m_prime)
  chi = chi_of(d.full_mask)
  if chi > bound:
    return LayeredCheck(False, 'conclusion', chi, bound, m, m_prime)
  return LayeredCheck(True, None, chi, bound, m, m_prime)


def layered_partition_check(d: Digraph,
                            parts: Sequence[Sequence[int]],
                            k: int,
                            lemma: str = NOT_OURS,
                            max_nodes: Optional[int] = None) -> LayeredCheck:
  """Hypotheses and conclusion of one of the two layered-partition lemmas."""
  if lemma == NOT_OURS:
    return check_not_ours(d, parts, k, max_nodes)
  if lemma == PARTITION_DICHI:
    return check_partition_dichi(d, parts, k, max_nodes)
  raise ValueError(f'Invalid lemma {lemma}.')


def dominates(d: Digraph, b: Sequence[int], s: Sequence[int]) -> bool:
  """Every vertex of S outside B has an in-neighbour in B."""
  b_mask = digraph.mask_of(d, b)
  return all(d.in_row(v) & b_mask
             for v in utils.iter_bits(digraph.mask_of(d, s) & ~b_mask))


def minimal_dominating_set(d: Digraph, s: Sequence[int]) -> VertexSet:
  """Drops vertices of S in increasing order while the rest dominates S."""
  s = digraph.vertex_set(d, s)
  b = list(s)
  for v in s:
    candidate = [u for u in b if u != v]
    if dominates(d, candidate, s):
      b = candidate
  return tuple(b)


def source_layer(d: Digraph, s: Sequence[int]) -> VertexSet:
  """Vertices of an acyclic S with no in-neighbour in S."""
  mask = digraph.mask_of(d, s)
  if not digraph.is_acyclic_mask(d, mask):
    raise NotAcyclic(f'D[{utils.from_mask(mask)}] has a directed cycle.')
  return tuple(v for v in utils.iter_bits(mask) if not d.in_row(v) & mask)
