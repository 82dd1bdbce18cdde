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
"""Pattern zoo, induced/non-induced pattern search and the hero grammar."""
import dataclasses
import re
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

from absl import logging

# pylint: disable=g-bad-import-order
import digraph
import utils

Digraph = digraph.Digraph
# `embedding[i]` is the host vertex of pattern vertex i.
Embedding = Tuple[int, ...]

FWD, BWD = 'fwd', 'bwd'
IN, OUT = 'in', 'out'


class BadParameter(ValueError):
  """A constructor received parameters outside its domain."""


class NotATournament(ValueError):
  pass


class NotValidOrientation(ValueError):
  pass


class TagParseError(ValueError):

  def __init__(self, text: str, reason: str):
    self.text = text
    super().__init__(f'Cannot parse pattern tag `{text}`: {reason}')


@dataclasses.dataclass(frozen=True)
class TT:
  k: int


@dataclasses.dataclass(frozen=True)
class DirPath:
  m: int


@dataclasses.dataclass(frozen=True)
class OrientedPath:
  """Path with one `->` or `<-` token per edge, read left to right."""
  arrows: str


@dataclasses.dataclass(frozen=True)
class Star:
  """Center 0, then `in_leaves` leaves pointing at it, then `out_leaves`."""
  in_leaves: int
  out_leaves: int


@dataclasses.dataclass(frozen=True)
class Broom:
  """Path v1 v2 v3 plus r leaves at v3 (vertices 0, 1, 2, then 3..r+2).

  Attributes:
    r: number of leaves.
    dir12: `fwd` for v1->v2, `bwd` for v2->v1.
    dir23: `fwd` for v2->v3, `bwd` for v3->v2.
    leaf_dir: `out` for v3->w, `in` for w->v3 (the same for every leaf).
  """
  r: int
  dir12: str
  dir23: str
  leaf_dir: str


@dataclasses.dataclass(frozen=True)
class CyclicTriangle:
  pass


@dataclasses.dataclass(frozen=True)
class InTriangle:
  """Cyclic triangle 0->1->2->0 with vertex 3 in-complete from it."""


@dataclasses.dataclass(frozen=True)
class OutTriangle:
  """Cyclic triangle 0->1->2->0 with vertex 3 out-complete to it."""


@dataclasses.dataclass(frozen=True)
class RK1Plus:
  r: int
  inner: 'Tag'


@dataclasses.dataclass(frozen=True)
class DeltaJoin:
  parts: Tuple['Tag', ...]


@dataclasses.dataclass(frozen=True)
class ForwardJoin:
  left: 'Tag'
  right: 'Tag'


@dataclasses.dataclass(frozen=True)
class Raw:
  name: str


Tag = Union[TT, DirPath, OrientedPath, Star, Broom, CyclicTriangle, InTriangle,
            OutTriangle, RK1Plus, DeltaJoin, ForwardJoin, Raw]


class Pattern(NamedTuple):
  graph: Digraph
  tag: Tag


_ARROWS_RE = re.compile(r'^(?:->|<-)+$')


def _positive(name: str, value: int, minimum: int = 1):
  if value < minimum:
    raise BadParameter(f'{name} must be at least {minimum}, got {value}.')


def build(tag: Tag) -> Pattern:
  """Builds the digraph described by `tag` with its canonical numbering."""
  if isinstance(tag, TT):
    _positive('TT order', tag.k)
    graph = digraph.transitive_tournament(tag.k)
  elif isinstance(tag, DirPath):
    _positive('path length', tag.m)
    graph = digraph.directed_path(tag.m)
  elif isinstance(tag, OrientedPath):
    if not _ARROWS_RE.match(tag.arrows):
      raise BadParameter(f'Invalid arrow string `{tag.arrows}`.')
    tokens = [tag.arrows[i:i + 2] for i in range(0, len(tag.arrows), 2)]
    graph = digraph.from_edge_list(
        len(tokens) + 1, [(i, i + 1) if t == '->' else (i + 1, i)
                          for i, t in enumerate(tokens)])
  elif isinstance(tag, Star):
    _positive('in-leaves', tag.in_leaves, 0)
    _positive('out-leaves', tag.out_leaves, 0)
    _positive('star degree', tag.in_leaves + tag.out_leaves)
    arcs = [(1 + i, 0) for i in range(tag.in_leaves)]
    arcs += [(0, 1 + tag.in_leaves + i) for i in range(tag.out_leaves)]
    graph = digraph.from_edge_list(1 + tag.in_leaves + tag.out_leaves, arcs)
  elif isinstance(tag, Broom):
    _positive('broom leaves', tag.r)
    if tag.dir12 not in (FWD, BWD) or tag.dir23 not in (FWD, BWD):
      raise BadParameter(f'Broom directions must be fwd/bwd: {tag}.')
    if tag.leaf_dir not in (IN, OUT):
      raise BadParameter(f'Broom leaf direction must be in/out: {tag}.')
    arcs = [(0, 1) if tag.dir12 == FWD else (1, 0),
            (1, 2) if tag.dir23 == FWD else (2, 1)]
    for i in range(tag.r):
      arcs.append((2, 3 + i) if tag.leaf_dir == OUT else (3 + i, 2))
    graph = digraph.from_edge_list(3 + tag.r, arcs)
  elif isinstance(tag, CyclicTriangle):
    graph = digraph.directed_cycle(3)
  elif isinstance(tag, InTriangle):
    graph = digraph.from_edge_list(4, [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3),
                                       (2, 3)])
  elif isinstance(tag, OutTriangle):
    graph = digraph.from_edge_list(4, [(0, 1), (1, 2), (2, 0), (3, 0), (3, 1),
                                       (3, 2)])
  elif isinstance(tag, RK1Plus):
    _positive('r', tag.r, 0)
    graph = digraph.disjoint_union(
        digraph.edgeless(tag.r), build(tag.inner).graph)
  elif isinstance(tag, DeltaJoin):
    if len(tag.parts) != 3:
      raise BadParameter(f'A Delta-join has three parts, got {len(tag.parts)}.')
    graph = digraph.triangle_join(*(build(p).graph for p in tag.parts))
  elif isinstance(tag, ForwardJoin):
    graph = digraph.join_forward(build(tag.left).graph, build(tag.right).graph)
  elif isinstance(tag, Raw):
    raise BadParameter(f'Raw pattern `{tag.name}` carries no construction.')
  else:
    raise BadParameter(f'Unknown tag {tag!r}.')
  return Pattern(graph, tag)


def raw_pattern(graph: Digraph, name: str = 'raw') -> Pattern:
  return Pattern(graph, Raw(name))


def _split_top_level(text: str) -> List[str]:
  parts, depth, current = [], 0, []
  for ch in text:
    if ch == '(':
      depth += 1
    elif ch == ')':
      depth -= 1
      if depth < 0:
        raise TagParseError(text, 'unbalanced parentheses')
    if ch == ',' and not depth:
      parts.append(''.join(current).strip())
      current = []
    else:
      current.append(ch)
  if depth:
    raise TagParseError(text, 'unbalanced parentheses')
  parts.append(''.join(current).strip())
  return parts


def _strip_parens(text: str) -> str:
  text = text.strip()
  while text.startswith('(') and text.endswith(')'):
    inner = text[1:-1]
    try:
      _split_top_level(inner)
    except TagParseError:
      break
    # `(a),(b)` must not lose its outer pair of parentheses.
    depth = 0
    closes_early = False
    for i, ch in enumerate(text):
      depth += ch == '('
      depth -= ch == ')'
      if not depth and i < len(text) - 1:
        closes_early = True
        break
    if closes_early:
      break
    text = inner.strip()
  return text


def _keyword_args(text: str, args: List[str]) -> Dict[str, str]:
  result = {}
  for arg in args:
    key, sep, value = arg.partition('=')
    if not sep:
      raise TagParseError(text, f'expected key=value, got `{arg}`')
    result[key.strip()] = value.strip()
  return result


def _int(text: str, value: str) -> int:
  try:
    return int(value)
  except ValueError as e:
    raise TagParseError(text, f'`{value}` is not an integer') from e


def _delta_part(text: str) -> Tag:
  text = _strip_parens(text)
  if text.isdigit():
    return TT(int(text))
  return parse_tag(text)


def parse_tag(text: str) -> Tag:
  """Parses the CLI tag syntax, e.g. `broom:r=3,v12=fwd,v23=bwd,leaf=in`."""
  source = text
  text = _strip_parens(text)
  name, _, rest = text.partition(':')
  name = name.strip().lower()
  args = _split_top_level(rest) if rest else []
  try:
    if name in ('c3', 'cyclic'):
      return CyclicTriangle()
    if name == 'it':
      return InTriangle()
    if name == 'ot':
      return OutTriangle()
    if name == 'k1':
      return TT(1)
    if name == 'tt':
      return TT(_int(source, args[0]))
    if name == 'dirpath':
      return DirPath(_int(source, args[0]))
    if name == 'path':
      if not _ARROWS_RE.match(rest.strip()):
        raise TagParseError(source, 'path needs a sequence of -> and <-')
      return OrientedPath(rest.strip())
    if name == 'star':
      kw = _keyword_args(source, args)
      return Star(_int(source, kw.get('in', '0')), _int(source, kw.get('out', '0')))
    if name == 'broom':
      kw = _keyword_args(source, args)
      return Broom(
          _int(source, kw.get('r', '1')), kw.get('v12', FWD), kw.get('v23', FWD),
          kw.get('leaf', OUT))
    if name == 'delta':
      return DeltaJoin(tuple(_delta_part(p) for p in args))
    if name == 'join':
      if len(args) != 2:
        raise TagParseError(source, 'join takes exactly two parts')
      return ForwardJoin(_delta_part(args[0]), _delta_part(args[1]))
    if name == 'rk1':
      if len(args) != 2:
        raise TagParseError(source, 'rk1 takes r and an inner pattern')
      return RK1Plus(_int(source, args[0]), _delta_part(args[1]))
  except IndexError as e:
    raise TagParseError(source, 'missing argument') from e
  raise TagParseError(source, f'unknown pattern `{name}`')


def format_tag(tag: Tag) -> str:
  """Inverse of `parse_tag`."""

  def part(t: Tag) -> str:
    if isinstance(t, TT):
      return str(t.k)
    return f'({format_tag(t)})'

  if isinstance(tag, TT):
    return f'tt:{tag.k}'
  if isinstance(tag, DirPath):
    return f'dirpath:{tag.m}'
  if isinstance(tag, OrientedPath):
    return f'path:{tag.arrows}'
  if isinstance(tag, Star):
    return f'star:in={tag.in_leaves},out={tag.out_leaves}'
  if isinstance(tag, Broom):
    return (f'broom:r={tag.r},v12={tag.dir12},v23={tag.dir23},'
            f'leaf={tag.leaf_dir}')
  if isinstance(tag, CyclicTriangle):
    return 'c3'
  if isinstance(tag, InTriangle):
    return 'it'
  if isinstance(tag, OutTriangle):
    return 'ot'
  if isinstance(tag, RK1Plus):
    return f'rk1:{tag.r},({format_tag(tag.inner)})'
  if isinstance(tag, DeltaJoin):
    return 'delta:' + ','.join(part(p) for p in tag.parts)
  if isinstance(tag, ForwardJoin):
    return f'join:{part(tag.left)},{part(tag.right)}'
  if isinstance(tag, Raw):
    return f'raw:{tag.name}'
  raise BadParameter(f'Unknown tag {tag!r}.')


def _flip(direction: str) -> str:
  return {FWD: BWD, BWD: FWD, IN: OUT, OUT: IN}[direction]


def reverse_tag(tag: Tag) -> Tag:
  """Tag of the arc-reversed pattern (up to isomorphism)."""
  if isinstance(tag, (TT, DirPath, CyclicTriangle)):
    return tag
  if isinstance(tag, OrientedPath):
    return OrientedPath(''.join(
        '<-' if tag.arrows[i:i + 2] == '->' else '->'
        for i in range(0, len(tag.arrows), 2)))
  if isinstance(tag, Star):
    return Star(tag.out_leaves, tag.in_leaves)
  if isinstance(tag, Broom):
    return Broom(tag.r, _flip(tag.dir12), _flip(tag.dir23), _flip(tag.leaf_dir))
  if isinstance(tag, InTriangle):
    return OutTriangle()
  if isinstance(tag, OutTriangle):
    return InTriangle()
  if isinstance(tag, RK1Plus):
    return RK1Plus(tag.r, reverse_tag(tag.inner))
  if isinstance(tag, DeltaJoin):
    first, second, third = tag.parts
    return DeltaJoin((reverse_tag(first), reverse_tag(third),
                      reverse_tag(second)))
  if isinstance(tag, ForwardJoin):
    return ForwardJoin(reverse_tag(tag.right), reverse_tag(tag.left))
  if isinstance(tag, Raw):
    return Raw(f'{tag.name}^R')
  raise BadParameter(f'Unknown tag {tag!r}.')


def reverse_pattern(pattern: Pattern) -> Pattern:
  return Pattern(digraph.reverse(pattern.graph), reverse_tag(pattern.tag))


def star_orientations(degree: int) -> List[Pattern]:
  """Every in/out split of an oriented star with `degree` leaves."""
  return [build(Star(a, degree - a)) for a in range(degree + 1)]


class _Matcher:
  """Backtracking pattern search rooted at the rarest pattern vertex."""

  def __init__(self, host: Digraph, pattern: Digraph, induced: bool,
               budget: utils.SearchBudget):
    self._host = host
    self._pattern = pattern
    self._induced = induced
    self._budget = budget
    feasible = []
    for p in range(pattern.n):
      out_p, in_p = pattern.out_degree(p), pattern.in_degree(p)
      feasible.append(
          utils.to_mask(h for h in range(host.n)
                        if host.out_degree(h) >= out_p and
                        host.in_degree(h) >= in_p))
    self._feasible = feasible
    self._order = self._search_order()

  def _search_order(self) -> List[int]:
    pattern = self._pattern
    rarity = [utils.popcount(m) for m in self._feasible]
    degree = [utils.popcount(pattern.nbr_row(p)) for p in range(pattern.n)]
    order = []
    placed = 0
    remaining = set(range(pattern.n))
    while remaining:
      p = min(
          remaining,
          key=lambda q: (-utils.popcount(pattern.nbr_row(q) & placed), rarity[q],
                         -degree[q], q))
      order.append(p)
      placed |= 1 << p
      remaining.remove(p)
    return order

  def run(self) -> Optional[Embedding]:
    pattern, host = self._pattern, self._host
    image = [-1] * pattern.n

    def extend(i: int, used: int) -> bool:
      if i == len(self._order):
        return True
      self._budget.tick()
      p = self._order[i]
      candidates = self._feasible[p] & ~used
      for q in self._order[:i]:
        h = image[q]
        if pattern.has_arc(q, p):
          candidates &= host.out_row(h)
        elif pattern.has_arc(p, q):
          candidates &= host.in_row(h)
        elif self._induced:
          candidates &= ~host.nbr_row(h)
        if not candidates:
          return False
      for h in utils.iter_bits(candidates):
        image[p] = h
        if extend(i + 1, used | (1 << h)):
          return True
      image[p] = -1
      return False

    if extend(0, 0):
      return tuple(image)
    return None


def _search(d: Digraph, pattern: Pattern, induced: bool,
            max_nodes: Optional[int]) -> Optional[Embedding]:
  if pattern.graph.n > d.n:
    return None
  budget = utils.SearchBudget(f'embedding of {format_tag(pattern.tag)}',
                              max_nodes)
  return _Matcher(d, pattern.graph, induced, budget).run()


def find_induced(d: Digraph,
                 pattern: Pattern,
                 max_nodes: Optional[int] = None) -> Optional[Embedding]:
  """An induced copy of `pattern` in `d`, or None."""
  return _search(d, pattern, True, max_nodes)


def find_subgraph(d: Digraph,
                  pattern: Pattern,
                  max_nodes: Optional[int] = None) -> Optional[Embedding]:
  """A (not necessarily induced) copy of `pattern` in `d`, or None."""
  return _search(d, pattern, False, max_nodes)


def is_free(d: Digraph, pattern: Pattern,
            max_nodes: Optional[int] = None) -> bool:
  return find_induced(d, pattern, max_nodes) is None


def is_embedding(d: Digraph, pattern: Pattern, embedding: Embedding,
                 induced: bool = True) -> bool:
  """Checks an embedding arc by arc (and non-arc by non-arc if induced)."""
  q = pattern.graph
  if len(embedding) != q.n or len(set(embedding)) != q.n:
    return False
  for a in range(q.n):
    for b in range(q.n):
      if a == b:
        continue
      host_arc = d.has_arc(embedding[a], embedding[b])
      if q.has_arc(a, b) and not host_arc:
        return False
      if induced and host_arc and not q.has_arc(a, b):
        return False
  return True


class FreenessResult(NamedTuple):
  free: bool
  pattern: Optional[Pattern] = None
  embedding: Optional[Embedding] = None


def free_of_all(d: Digraph,
                patterns: Sequence[Pattern],
                max_nodes: Optional[int] = None) -> FreenessResult:
  """Induced freeness against every pattern; reports the first violation."""
  for pattern in patterns:
    embedding = find_induced(d, pattern, max_nodes)
    if embedding is not None:
      logging.debug('Found %s at %s', format_tag(pattern.tag), embedding)
      return FreenessResult(False, pattern, embedding)
  return FreenessResult(True)


K1_RULE = 'K1'
JOIN_RULE = 'join'
# Delta(1, H1, m): apex -> H1 -> transitive part -> apex.
DELTA_LEFT_RULE = 'delta_left'
# Delta(1, m, H1): apex -> transitive part -> H1 -> apex.
DELTA_RIGHT_RULE = 'delta_right'


@dataclasses.dataclass(frozen=True)
class HeroDerivation:
  """A derivation of a tournament in the hero grammar.

  Attributes:
    rule: one of `K1`, `join`, `delta_left`, `delta_right`.
    vertices: the derived vertex set.
    children: sub-derivations; (left, right) for `join`, (H1,) for the Delta
      rules, empty for `K1`.
    apex: the singleton part of a Delta rule.
    transitive: the transitive part of a Delta rule.
  """
  rule: str
  vertices: digraph.VertexSet
  children: Tuple['HeroDerivation', ...] = ()
  apex: Optional[int] = None
  transitive: digraph.VertexSet = ()

  def to_json(self):
    node = {'rule': self.rule, 'vertices': list(self.vertices)}
    if self.rule in (DELTA_LEFT_RULE, DELTA_RIGHT_RULE):
      node['apex'] = self.apex
      node['transitive'] = list(self.transitive)
    if self.children:
      node['children'] = [c.to_json() for c in self.children]
    return node


def _all_arcs(h: Digraph, sources: int, targets: int) -> bool:
  return all(h.out_row(u) & targets == targets
             for u in utils.iter_bits(sources))


def is_hero_in_tournaments(h: Digraph,
                           max_vertices: int = 9) -> Optional[HeroDerivation]:
  """A derivation of `h` from K1 by => and Delta(1, H1, m) / Delta(1, m, H1).

  Joins are only tried at condensation cuts. For strongly connected inputs,
  the apex of a Delta rule determines both other parts (its out- and
  in-neighbourhood), so every apex is tried.

  Args:
    h: a tournament.
    max_vertices: larger inputs raise `BudgetExceeded`.

  Returns:
    A derivation tree, or None if `h` is not a hero in tournaments.
  """
  if not digraph.is_tournament(h):
    raise NotATournament(f'Hero recognition needs a tournament, got {h}.')
  if h.n > max_vertices:
    raise utils.BudgetExceeded('hero derivation', upper=max_vertices)
  if not h.n:
    return None
  memo: Dict[int, Optional[HeroDerivation]] = {}

  def derive(mask: int) -> Optional[HeroDerivation]:
    if mask in memo:
      return memo[mask]
    memo[mask] = result = _derive(mask)
    return result

  def _derive(mask: int) -> Optional[HeroDerivation]:
    vertices = utils.from_mask(mask)
    if len(vertices) == 1:
      return HeroDerivation(K1_RULE, vertices)
    components = digraph.strong_components_mask(h, mask)
    if len(components) > 1:
      left = 0
      for comp in components[:-1]:
        left |= comp
        left_der = derive(left)
        if left_der is None:
          continue
        right_der = derive(mask & ~left)
        if right_der is not None:
          return HeroDerivation(JOIN_RULE, vertices, (left_der, right_der))
      return None
    for apex in vertices:
      out = h.out_row(apex) & mask
      into = h.in_row(apex) & mask
      if not out or not into:
        continue
      if _all_arcs(h, out, into) and digraph.is_acyclic_mask(h, into):
        child = derive(out)
        if child is not None:
          return HeroDerivation(DELTA_LEFT_RULE, vertices, (child,), apex,
                                utils.from_mask(into))
      if _all_arcs(h, out, into) and digraph.is_acyclic_mask(h, out):
        child = derive(into)
        if child is not None:
          return HeroDerivation(DELTA_RIGHT_RULE, vertices, (child,), apex,
                                utils.from_mask(out))
    return None

  return derive(h.full_mask)


def verify_derivation(h: Digraph, derivation: HeroDerivation) -> bool:
  """Re-checks every node of a derivation against `h`."""
  mask = utils.to_mask(derivation.vertices)
  if not mask:
    return False
  if derivation.rule == K1_RULE:
    return len(derivation.vertices) == 1 and not derivation.children
  if derivation.rule == JOIN_RULE:
    if len(derivation.children) != 2:
      return False
    left = utils.to_mask(derivation.children[0].vertices)
    right = utils.to_mask(derivation.children[1].vertices)
    if left & right or left | right != mask or not left or not right:
      return False
    return (_all_arcs(h, left, right) and
            all(verify_derivation(h, c) for c in derivation.children))
  if derivation.rule in (DELTA_LEFT_RULE, DELTA_RIGHT_RULE):
    if len(derivation.children) != 1 or derivation.apex is None:
      return False
    apex = 1 << derivation.apex
    child = utils.to_mask(derivation.children[0].vertices)
    trans = utils.to_mask(derivation.transitive)
    if (apex & child or apex & trans or child & trans or not child or
        not trans or apex | child | trans != mask):
      return False
    if not digraph.is_acyclic_mask(h, trans):
      return False
    if derivation.rule == DELTA_LEFT_RULE:
      cyclic = (_all_arcs(h, apex, child) and _all_arcs(h, child, trans) and
                _all_arcs(h, trans, apex))
    else:
      cyclic = (_all_arcs(h, apex, trans) and _all_arcs(h, trans, child) and
                _all_arcs(h, child, apex))
    return cyclic and verify_derivation(h, derivation.children[0])
  return False


def mirror_derivation(derivation: HeroDerivation) -> HeroDerivation:
  """The derivation of the arc-reversed tournament on the same vertex ids."""
  children = tuple(mirror_derivation(c) for c in derivation.children)
  if derivation.rule == JOIN_RULE:
    return dataclasses.replace(derivation, children=children[::-1])
  if derivation.rule == DELTA_LEFT_RULE:
    return dataclasses.replace(
        derivation, rule=DELTA_RIGHT_RULE, children=children)
  if derivation.rule == DELTA_RIGHT_RULE:
    return dataclasses.replace(
        derivation, rule=DELTA_LEFT_RULE, children=children)
  return derivation


_BROOM_TYPES = {(FWD, FWD): 1, (FWD, BWD): 2, (BWD, FWD): 3, (BWD, BWD): 4}


def classify_broom_type(pattern: Pattern) -> int:
  """Broom type from the orientation of v1v2 and v2v3.

  Type 1: v1->v2, v2->v3; type 2: v1->v2, v3->v2; type 3: v2->v1, v2->v3;
  type 4: v2->v1, v3->v2. The leaf direction does not matter.

  Args:
    pattern: a broom with a uniform leaf direction.

  Returns:
    The type in 1..4.
  """
  tag = pattern.tag
  if not isinstance(tag, Broom):
    raise NotValidOrientation(f'Not a broom: {tag!r}.')
  try:
    expected = build(tag).graph
  except BadParameter as e:
    raise NotValidOrientation(str(e)) from e
  if expected != pattern.graph:
    raise NotValidOrientation(
        f'Graph does not match {format_tag(tag)} (mixed leaf directions?).')
  return _BROOM_TYPES[(tag.dir12, tag.dir23)]


def opposing(first: Pattern, second: Pattern) -> bool:
  """Valid brooms whose middle arcs v2v3 point in opposite directions."""
  return (classify_broom_type(first) in (1, 3)) != (
      classify_broom_type(second) in (1, 3))
