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
"""Tests for decomposition."""
import itertools

from absl.testing import absltest
from absl.testing import parameterized
from hypothesis import given
from hypothesis import strategies as st
import networkx as nx
import numpy as np

# pylint: disable=g-bad-import-order
import constructions
import decomposition
import dicolor
import digraph
import patterns
import test_utils
import utils

C3 = digraph.directed_cycle(3)
C4 = digraph.directed_cycle(4)
# Transitive triangle 0->1->2 closed into a cycle by the path 2->3->4->0.
TT3_WITH_PATH = digraph.from_edge_list(5, [(0, 1), (0, 2), (1, 2), (2, 3),
                                           (3, 4), (4, 0)])


def broom(dir12, dir23, r=1, leaf=patterns.OUT):
  return patterns.build(patterns.Broom(r, dir12, dir23, leaf))


BROOM_PAIRS = {
    (1, 2): (broom('fwd', 'fwd'), broom('fwd', 'bwd')),
    (3, 4): (broom('bwd', 'fwd'), broom('bwd', 'bwd')),
    (3, 2): (broom('bwd', 'fwd'), broom('fwd', 'bwd')),
    (1, 4): (broom('fwd', 'fwd'), broom('bwd', 'bwd')),
}


def three_leaf_brooms(first_type, second_type):
  return tuple(
      broom(b.tag.dir12, b.tag.dir23, r=3)
      for b in BROOM_PAIRS[(first_type, second_type)])


def min_in_degree_oracle(k):
  """Singleton nice sets: a vertex with fewest in-neighbours left."""

  def oracle(d, mask):
    v = min(utils.iter_bits(mask),
            key=lambda u: (utils.popcount(d.in_row(u) & mask), u))
    return decomposition.nice_certificate(d, 1 << v, mask, k)

  return oracle


def whole_set_oracle(d, mask):
  return decomposition.nice_certificate(d, mask, mask, 0)


@st.composite
def strong_digraphs(draw, min_n=3, max_n=7):
  """Random arcs around a forced Hamiltonian cycle 0->1->...->n-1->0."""
  n = draw(st.integers(min_value=min_n, max_value=max_n))
  cycle = {(i, i + 1) for i in range(n - 1)} | {(0, n - 1)}
  pairs = [p for p in itertools.combinations(range(n), 2) if p not in cycle]
  states = draw(
      st.lists(st.integers(0, 2), min_size=len(pairs), max_size=len(pairs)))
  arcs = [(i, i + 1) for i in range(n - 1)] + [(n - 1, 0)]
  arcs += [(u, v) if s == 1 else (v, u)
           for (u, v), s in zip(pairs, states)
           if s]
  return digraph.from_edge_list(n, arcs)


def planted_nice_sets(rng, max_n=30):
  """Consecutive blocks of 1..6 vertices, each k-nice in the blocks after it.

  Args:
    rng: numpy generator.
    max_n: largest vertex count.

  Returns:
    The digraph, one certificate per block in peeling order, and k.
  """
  n = int(rng.integers(5, max_n + 1))
  k = int(rng.integers(0, 4))
  starts = [0]
  while starts[-1] < n:
    starts.append(min(n, starts[-1] + int(rng.integers(1, 7))))
  block = {}
  for i, (a, b) in enumerate(zip(starts, starts[1:])):
    for v in range(a, b):
      block[v] = i
  in_side = [bool(x) for x in rng.random(n) < 0.5]
  budget = [k] * n
  arcs = []
  for u, v in itertools.combinations(range(n), 2):
    if block[u] == block[v]:
      if rng.random() < 0.5:
        arcs.append((u, v) if rng.random() < 0.5 else (v, u))
      continue
    if rng.random() >= 0.3:
      continue
    arc = (u, v) if rng.random() < 0.5 else (v, u)
    # u sits in the earlier block; only arcs on its limited side count.
    if (arc == (v, u)) == in_side[u]:
      if not budget[u]:
        continue
      budget[u] -= 1
    arcs.append(arc)
  certs = []
  for a, b in zip(starts, starts[1:]):
    members = tuple(range(a, b))
    certs.append(
        decomposition.NiceSetCertificate(
            members, tuple(v for v in members if in_side[v]),
            tuple(v for v in members if not in_side[v]), k))
  return digraph.from_edge_list(n, arcs), certs, k


def planted_oracle(certs):

  def oracle(d, mask):
    del d
    return next(c for c in certs if utils.to_mask(c.S) & mask)

  return oracle


# TT4 on 0..3 closed by the path 3->4->5->6->7->8->0. The detours 5->9->6
# and 6->11->7 leave the inner path 5, 6, 7 and rejoin it further on;
# 7->10->5 jumps back. No vertex has four pairwise non-adjacent
# neighbours, so the digraph has no 3-broom of any orientation.
DETOURED_PATH = digraph.from_edge_list(
    12, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5),
         (5, 6), (6, 7), (7, 8), (8, 0), (5, 9), (9, 6), (7, 10), (10, 5),
         (6, 11), (11, 7)])


def closed_path_digraph(rng):
  """TT4 on 0..3, a path 3 -> ... -> 0 of 5 to 7 vertices, and detours.

  Every extra vertex x has in-neighbours at path positions >= t and
  out-neighbours at positions <= t + 2 for some t, and extras are pairwise
  non-adjacent, so no path from 3 back to 0 beats the closing path and TT4
  stays the only maximum clique.

  Args:
    rng: numpy generator.

  Returns:
    A digraph on at most 12 vertices.
  """
  length = int(rng.integers(4, 7))
  path = [3] + list(range(4, 3 + length)) + [0]
  n = 3 + length + int(rng.integers(1, 4 if length > 4 else 5))
  arcs = [(u, v) for u, v in itertools.combinations(range(4), 2)]
  arcs += list(zip(path, path[1:]))
  for x in range(3 + length, n):
    t = int(rng.integers(0, length + 1))
    for j in range(max(0, t - 2), min(length, t + 4) + 1):
      if rng.random() >= 0.35:
        continue
      if j < t or (j <= t + 2 and rng.random() < 0.5):
        arcs.append((x, path[j]))
      else:
        arcs.append((path[j], x))
  return digraph.from_edge_list(n, arcs)


class NiceSetTest(parameterized.TestCase):

  @parameterized.parameters((1, True), (0, False))
  def test_opposite_corners_of_a_four_cycle(self, k, expected):
    cert = decomposition.NiceSetCertificate((0, 2), (0, 2), (), k)
    self.assertEqual(decomposition.verify_nice_set(C4, cert), expected)

  def test_split_must_partition_the_set(self):
    cert = decomposition.NiceSetCertificate((0, 2), (0,), (0, 2), 1)
    with self.assertRaises(decomposition.BadPartition):
      decomposition.verify_nice_set(C4, cert)

  def test_empty_or_foreign_set_is_not_nice(self):
    empty = decomposition.NiceSetCertificate((), (), (), 1)
    self.assertFalse(decomposition.verify_nice_set(C4, empty))
    cert = decomposition.NiceSetCertificate((0, 3), (0, 3), (), 1)
    self.assertFalse(decomposition.verify_nice_set(C4, cert, mask=0b0111))

  def test_certificate_puts_vertices_on_the_in_side_first(self):
    d = digraph.from_edge_list(4, [(1, 0), (2, 0), (0, 3)])
    cert = decomposition.nice_certificate(d, 0b0001, d.full_mask, 1)
    self.assertEqual((cert.S1, cert.S2), ((), (0,)))
    with self.assertRaises(decomposition.NicenessViolated) as ctx:
      decomposition.nice_certificate(d, 0b0001, d.full_mask, 0)
    self.assertEqual(ctx.exception.vertex, 0)
    self.assertEqual(ctx.exception.in_outside, (1, 2))

  def test_four_cycle_with_singletons(self):
    coloring = decomposition.color_via_nice_sets(C4, min_in_degree_oracle(1),
                                                 1, 1)
    self.assertTrue(dicolor.verify_dicoloring(C4, coloring))
    self.assertLessEqual(coloring.k, 4)

  def test_sources_of_acyclic_digraph_give_one_color(self):
    d = digraph.transitive_tournament(6)
    coloring = decomposition.color_via_nice_sets(d, min_in_degree_oracle(0),
                                                 1, 0)
    self.assertEqual(coloring.k, 1)

  def test_whole_set_keeps_the_exact_coloring(self):
    d = constructions.build_f5(7).digraph
    coloring = decomposition.color_via_nice_sets(d, whole_set_oracle, None, 0)
    self.assertTrue(dicolor.verify_dicoloring(d, coloring))
    self.assertEqual(coloring.k, dicolor.dichromatic_number(d)[0])

  def test_f5_with_singletons(self):
    d = constructions.build_f5(6).digraph
    coloring = decomposition.color_via_nice_sets(d, min_in_degree_oracle(d.n),
                                                 1, d.n)
    self.assertTrue(dicolor.verify_dicoloring(d, coloring))

  def test_bad_oracles(self):
    with self.assertRaises(decomposition.OracleFailure):
      decomposition.color_via_nice_sets(
          C3, lambda d, mask: decomposition.NiceSetCertificate((), (), (), 0),
          1, 0)
    with self.assertRaises(decomposition.OracleFailure) as ctx:
      decomposition.color_via_nice_sets(
          C4, lambda d, mask: decomposition.NiceSetCertificate(
              utils.from_mask(mask & 0b0101), utils.from_mask(mask & 0b0101),
              (), 0), 1, 0)
    self.assertIsNotNone(ctx.exception.certificate)
    with self.assertRaises(decomposition.OracleFailure):
      decomposition.color_via_nice_sets(C3, whole_set_oracle, 1, 0)
    with self.assertRaises(decomposition.OracleFailure):
      decomposition.color_via_nice_sets(C3, min_in_degree_oracle(2), 1, 1)

  @given(test_utils.digraphs(min_n=1, max_n=7))
  @test_utils.PROPERTY_SETTINGS
  def test_product_stays_within_its_bound(self, d):
    k = max(utils.popcount(d.in_row(v)) for v in range(d.n))
    coloring = decomposition.color_via_nice_sets(d, min_in_degree_oracle(k), 1,
                                                 k)
    self.assertTrue(dicolor.verify_dicoloring(d, coloring))
    self.assertLessEqual(coloring.k, 2 * (k + 1))

  def test_certificate_of_a_random_set(self):
    rng = np.random.default_rng(0)
    for _ in range(20):
      d = test_utils.random_digraph(rng, int(rng.integers(3, 9)), 0.4)
      s_mask = int(rng.integers(1, 1 << d.n))
      k = max(
          min(utils.popcount(d.in_row(v) & ~s_mask),
              utils.popcount(d.out_row(v) & ~s_mask))
          for v in utils.iter_bits(s_mask))
      cert = decomposition.nice_certificate(d, s_mask, d.full_mask, k)
      self.assertTrue(decomposition.verify_nice_set(d, cert))
      self.assertEqual(utils.to_mask(cert.S), s_mask)

  def test_planted_nice_sets(self):
    rng = np.random.default_rng(1)
    for _ in range(200):
      d, certs, k = planted_nice_sets(rng)
      c = max(dicolor.dichromatic_number_of_subset(d, cert.S)
              for cert in certs)
      coloring = decomposition.color_via_nice_sets(d, planted_oracle(certs), c,
                                                   k)
      self.assertTrue(dicolor.verify_dicoloring(d, coloring))
      self.assertLessEqual(coloring.k, 2 * c * (k + 1))

  def test_x_neighbourhood_oracle(self):
    d = digraph.from_edge_list(5, [(0, 1), (1, 2), (2, 0), (0, 3), (4, 1)])
    oracle = decomposition.x_neighbourhood_oracle((0, 1), 1)
    self.assertEqual(oracle(d, 0b11000).S, (3,))
    self.assertEqual(oracle(d, 0b10000).S, (4,))
    with self.assertRaises(decomposition.OracleFailure):
      decomposition.x_neighbourhood_oracle((2,), 1)(d, 0b11000)


class PmctTest(parameterized.TestCase):

  def test_strongly_connected_tournament_closes_itself(self):
    self.assertEqual(
        decomposition.find_pmct(C3),
        decomposition.Pmct((0, 1, 2), (), (0, 1, 2)))
    delta = digraph.triangle_join(digraph.edgeless(1), digraph.edgeless(1),
                                  digraph.transitive_tournament(2))
    self.assertEqual(decomposition.find_pmct(delta).K, (0, 1, 2, 3))

  def test_transitive_triangle_needs_a_path(self):
    pmct = decomposition.find_pmct(TT3_WITH_PATH)
    self.assertEqual(pmct.K, (0, 1, 2))
    self.assertEqual(pmct.P, (2, 3, 4, 0))
    self.assertEqual(pmct.C, (0, 1, 2, 3, 4))

  def test_not_strongly_connected(self):
    with self.assertRaises(decomposition.NotStronglyConnected):
      decomposition.find_pmct(digraph.transitive_tournament(3))

  def test_mask(self):
    d = digraph.join_forward(digraph.transitive_tournament(2), C3)
    self.assertEqual(decomposition.find_pmct(d, 0b11100).C, (2, 3, 4))

  def test_no_closing_path(self):
    # Every path from the sink 2 back to the source 0 runs through 1.
    d = digraph.from_edge_list(7, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4),
                                   (4, 1), (1, 5), (5, 6), (6, 0)])
    with self.assertRaises(decomposition.PmctNotFound) as ctx:
      decomposition.find_pmct(d)
    self.assertEqual(ctx.exception.vertices, tuple(range(7)))
    self.assertEqual(ctx.exception.tournaments, ((0, 1, 2),))
    self.assertIsNone(test_utils.brute_force_pmct_size(d))

  def test_random_corpus_matches_brute_force(self):
    rng = np.random.default_rng(2)
    for _ in range(1000):
      d = test_utils.random_strong_digraph(rng, int(rng.integers(3, 8)),
                                           float(rng.uniform(0.2, 0.8)))
      expected = test_utils.brute_force_pmct_size(d)
      if expected is None:
        with self.assertRaises(decomposition.PmctNotFound):
          decomposition.find_pmct(d)
        continue
      pmct = decomposition.find_pmct(d)
      self.assertLen(pmct.C, expected, msg=d)
      self.assertTrue(digraph.is_tournament(d, utils.to_mask(pmct.K)))

  @given(strong_digraphs())
  @test_utils.PROPERTY_SETTINGS
  def test_matches_brute_force(self, d):
    expected = test_utils.brute_force_pmct_size(d)
    if expected is None:
      with self.assertRaises(decomposition.PmctNotFound):
        decomposition.find_pmct(d)
      return
    pmct = decomposition.find_pmct(d)
    self.assertLen(pmct.C, expected)
    self.assertTrue(digraph.is_tournament(d, utils.to_mask(pmct.K)))
    self.assertLen(pmct.K, digraph.underlying_clique_number(d))
    for u, v in zip(pmct.P, pmct.P[1:]):
      self.assertTrue(d.has_arc(u, v))

  def test_neighbourhood_split(self):
    d = digraph.from_edge_list(5, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 1),
                                   (3, 4)])
    pmct = decomposition.find_pmct(d, 0b00111)
    self.assertEqual(pmct.C, (0, 1, 2))
    self.assertEqual(
        decomposition.broom_neighborhood_split(d, pmct), ((3,), (), (4,)))
    one_way = digraph.from_edge_list(4, [(0, 1), (1, 2), (2, 0), (0, 3)])
    self.assertEqual(
        decomposition.broom_neighborhood_split(one_way, pmct), ((), (3,), ()))

  def test_ncx_is_nice(self):
    d = digraph.from_edge_list(4, [(0, 1), (1, 2), (2, 0), (0, 3), (3, 1)])
    first, second = BROOM_PAIRS[(1, 2)]
    cert = decomposition.verify_ncx_nice(d, decomposition.find_pmct(d), first,
                                         second)
    self.assertEqual(cert.S, (0, 1, 2, 3))
    self.assertTrue(decomposition.verify_nice_set(d, cert))

  @parameterized.parameters((3, 1, 1, 1), (2, 2, 3, 6), (2, 3, 1, 6))
  def test_niceness_constant(self, omega, r, s, expected):
    self.assertEqual(decomposition.niceness_constant(omega, r, s), expected)

  def test_broom_free_bound(self):
    self.assertEqual(decomposition.broom_free_bound(0, 1, 1), 0)
    self.assertEqual(decomposition.broom_free_bound(1, 3, 3), 1)
    self.assertEqual(decomposition.broom_free_bound(2, 1, 1), 148)


class LayerTest(parameterized.TestCase):

  # Path 0->1->2; 3 sees 0 and 2, 4 sees only 1.
  PATH_D = digraph.from_edge_list(5, [(0, 1), (1, 2), (0, 3), (3, 2), (4, 1)])

  def test_first_and_last_neighbours(self):
    split = decomposition.partition_first_last(self.PATH_D, (0, 1, 2))
    self.assertEqual(split, decomposition.FirstLastPartition((3,), (4,), (),
                                                             (3, 4)))
    excluded = decomposition.partition_first_last(self.PATH_D, (0, 1, 2), (4,))
    self.assertEqual(excluded.a_plus, ())

  def test_layers(self):
    layers = decomposition.layer_decomposition(self.PATH_D, (0, 1, 2), (3, 4),
                                               decomposition.FIRST_OUT)
    self.assertEqual(layers, [(), (4,), (3,)])
    self.assertEqual(
        decomposition.layer_decomposition(self.PATH_D, (0, 1, 2), (3,),
                                          decomposition.FIRST_IN),
        [(3,), (), ()])
    with self.assertRaises(decomposition.UncoveredVertex) as ctx:
      decomposition.layer_decomposition(self.PATH_D, (0, 1, 2), (3, 4),
                                        decomposition.FIRST_IN)
    self.assertEqual(ctx.exception.vertex, 4)
    with self.assertRaises(ValueError):
      decomposition.layer_decomposition(self.PATH_D, (0, 1, 2), (3,), 'last')

  def test_residue_classes(self):
    layers = [(0,), (1,), (2,), (3,), (4,)]
    self.assertEqual(
        decomposition.residue_classes(layers, 3), [(0, 3), (1, 4), (2,)])
    self.assertEqual(
        decomposition.residue_classes(layers, 5), [(0,), (1,), (2,), (3,),
                                                   (4,)])
    with self.assertRaises(ValueError):
      decomposition.residue_classes(layers, 4)


class BroomFreeTest(parameterized.TestCase):

  def test_cyclic_triangle(self):
    first, second = BROOM_PAIRS[(1, 2)]
    result = decomposition.dicolor_broom_free(C3, first, second, t=4)
    self.assertTrue(dicolor.verify_dicoloring(C3, result.coloring))
    self.assertBetween(result.coloring.k, 2, 3)
    self.assertLen(result.trace, 1)
    self.assertEqual(result.trace[0]['pmct']['C'], [0, 1, 2])
    self.assertEqual(result.trace[0]['pmct']['P'], [])
    self.assertEqual(result.k_policy, decomposition.K_POLICY)

  def test_acyclic_input_uses_one_color(self):
    first, second = BROOM_PAIRS[(3, 4)]
    result = decomposition.dicolor_broom_free(
        digraph.transitive_tournament(5), first, second)
    self.assertEqual(result.coloring.k, 1)
    self.assertEmpty(result.trace)

  def test_brooms_are_swapped_into_place(self):
    first, second = BROOM_PAIRS[(1, 2)]
    result = decomposition.dicolor_broom_free(C3, second, first)
    self.assertTrue(dicolor.verify_dicoloring(C3, result.coloring))

  def test_rejects_brooms_that_are_not_opposing(self):
    with self.assertRaises(patterns.NotValidOrientation):
      decomposition.dicolor_broom_free(C3, broom('fwd', 'fwd'),
                                       broom('bwd', 'fwd'))

  def test_rejects_inputs_with_a_broom(self):
    first, second = BROOM_PAIRS[(1, 2)]
    with self.assertRaises(decomposition.FreenessViolated) as ctx:
      decomposition.dicolor_broom_free(TT3_WITH_PATH, first, second)
    self.assertTrue(
        patterns.is_embedding(TT3_WITH_PATH, ctx.exception.pattern,
                              ctx.exception.embedding))

  @parameterized.parameters(*BROOM_PAIRS)
  def test_random_broom_free_digraphs(self, first_type, second_type):
    first, second = BROOM_PAIRS[(first_type, second_type)]
    rng = np.random.default_rng(first_type * 10 + second_type)
    candidates = [
        test_utils.random_digraph(rng, int(rng.integers(4, 8)), 1.0)
        for _ in range(3)
    ]
    candidates += [
        test_utils.random_digraph(rng, int(rng.integers(5, 9)), 0.85)
        for _ in range(40)
    ]
    colored = 0
    for d in candidates:
      if not patterns.free_of_all(d, [first, second]).free:
        continue
      result = decomposition.dicolor_broom_free(
          d, first, second, check_freeness=False)
      self.assertTrue(dicolor.verify_dicoloring(d, result.coloring))
      self.assertLessEqual(result.coloring.k, result.bound)
      self.assertGreaterEqual(result.coloring.k,
                              dicolor.dichromatic_number(d)[0])
      colored += 1
    self.assertGreaterEqual(colored, 3)

  @parameterized.parameters(
      (1, 2, []),
      (3, 4, []),
      (3, 2, [[9], [11], []]),
      (1, 4, [[10], [], []]),
  )
  def test_long_closing_path_splits_its_neighbourhood(self, first_type,
                                                      second_type, layers):
    first, second = three_leaf_brooms(first_type, second_type)
    d = DETOURED_PATH
    result = decomposition.dicolor_broom_free(d, first, second)
    self.assertTrue(dicolor.verify_dicoloring(d, result.coloring))
    self.assertLessEqual(result.coloring.k, result.bound)
    (level,) = result.trace
    self.assertEqual(level['pmct']['P'], [3, 4, 5, 6, 7, 8, 0])
    self.assertEqual(level['X'], [9, 10, 11])
    self.assertEqual(level['case'], f'{first_type}/{second_type}')
    self.assertEqual(level['layers'], layers)

  @parameterized.parameters(*BROOM_PAIRS)
  def test_closed_path_corpus(self, first_type, second_type):
    first, second = three_leaf_brooms(first_type, second_type)
    case = f'{first_type}/{second_type}'
    rng = np.random.default_rng(first_type * 10 + second_type)
    colored = attempts = 0
    while colored < 75 and attempts < 3000:
      attempts += 1
      d = closed_path_digraph(rng)
      if not patterns.free_of_all(d, [first, second]).free:
        continue
      result = decomposition.dicolor_broom_free(
          d, first, second, check_freeness=False)
      self.assertTrue(dicolor.verify_dicoloring(d, result.coloring))
      self.assertLessEqual(result.coloring.k, result.bound)
      self.assertGreaterEqual(result.coloring.k,
                              dicolor.dichromatic_number(d)[0])
      dispatched = [level for level in result.trace if level['case']]
      self.assertNotEmpty(dispatched, msg=d)
      for level in dispatched:
        self.assertEqual(level['case'], case)
        if case in ('3/2', '1/4'):
          self.assertLen(level['layers'], len(level['pmct']['P']) - 4)
        else:
          self.assertEmpty(level['layers'])
      colored += 1
    self.assertEqual(colored, 75)



class BagChainTest(parameterized.TestCase):

  JOINED = digraph.join_forward(C3, C3)

  def test_two_triangles(self):
    chain = decomposition.BagChain(((0, 1, 2), (3, 4, 5)), 0, 2)
    self.assertTrue(decomposition.verify_bag_chain(self.JOINED, chain))
    backwards = decomposition.BagChain(((3, 4, 5), (0, 1, 2)), 1, 2)
    self.assertFalse(decomposition.verify_bag_chain(self.JOINED, backwards))
    self.assertTrue(
        decomposition.verify_bag_chain(self.JOINED, backwards._replace(c=2)))

  def test_single_bag(self):
    chain = decomposition.BagChain(((0, 1, 2),), 0, 2)
    self.assertTrue(decomposition.verify_bag_chain(C3, chain))
    self.assertFalse(
        decomposition.verify_bag_chain(C3, chain._replace(beta=1)))
    self.assertTrue(
        decomposition.verify_bag_chain(C3, chain._replace(beta=1), mode='ge'))

  def test_invalid_chains(self):
    with self.assertRaises(decomposition.BadPartition):
      decomposition.verify_bag_chain(
          self.JOINED, decomposition.BagChain(((0, 1), (1, 2)), 1, 1))
    with self.assertRaises(ValueError):
      decomposition.verify_bag_chain(
          C3, decomposition.BagChain(((0, 1, 2),), 1, 2), mode='le')

  def test_greedy_extension(self):
    chain = decomposition.extend_bag_chain_greedy(self.JOINED, 0, 2, (0, 1, 2))
    self.assertEqual(chain.bags, ((0, 1, 2), (3, 4, 5)))
    self.assertTrue(decomposition.verify_bag_chain(self.JOINED, chain))
    short = decomposition.extend_bag_chain_greedy(
        self.JOINED, 0, 2, (0, 1, 2), max_length=1)
    self.assertLen(short.bags, 1)
    with self.assertRaises(ValueError):
      decomposition.extend_bag_chain_greedy(self.JOINED, 0, 2, (0, 1))

  def test_zones(self):
    arcs = list(self.JOINED.arcs())
    arcs += [(3, 6), (4, 6), (5, 6)]  # zone 2
    arcs += [(0, 7), (1, 7), (2, 7)]  # zone 1
    arcs += [(0, 8), (1, 8), (2, 8), (3, 8), (4, 8), (5, 8)]  # zone 2
    arcs += [(0, 9)]  # zone 0
    d = digraph.from_edge_list(10, arcs)
    chain = decomposition.BagChain(((0, 1, 2), (3, 4, 5)), 1, 2)
    zones = decomposition.zone_partition(d, chain, 1)
    self.assertEqual(zones.t, 2)
    self.assertEqual(zones.zones, {6: 2, 7: 1, 8: 2, 9: 0})
    self.assertEqual(zones.members(2), (6, 8))
    self.assertEqual(
        decomposition.zone_residue_classes(zones), [(9,), (7,), (6, 8)])

  def test_two_bag_chain(self):
    arcs = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
    arcs += [(v, 6) for v in (0, 1, 2)] + [(6, v) for v in (3, 4, 5)]
    d = digraph.from_edge_list(7, arcs)
    chain, valid = decomposition.two_bag_chain(d, 6, 0)
    self.assertEqual(chain.bags, ((0, 1, 2), (3, 4, 5)))
    self.assertEqual(chain.beta, 2)
    self.assertTrue(valid)

  def test_red_blue_split(self):
    path = digraph.directed_path(3)
    self.assertEqual(
        decomposition.red_blue_split(path, 0), ((2,), (0,), (1,)))
    self.assertEqual(
        decomposition.red_blue_split(C3, 1), ((0, 1, 2), (), ()))


class LayeredCheckTest(parameterized.TestCase):

  def test_single_part(self):
    result = decomposition.check_not_ours(C3, [(0, 1, 2)], 2)
    self.assertEqual(result, decomposition.LayeredCheck(True, None, 2, 4))

  def test_part_value_violation(self):
    result = decomposition.check_not_ours(C3, [(0, 1, 2)], 1)
    self.assertFalse(result.ok)
    self.assertStartsWith(result.failed, 'part 0')

  def test_back_arc_violation(self):
    d = digraph.from_edge_list(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    result = decomposition.layered_partition_check(d, [(3,), (0, 1), (2,)], 1)
    self.assertFalse(result.ok)
    self.assertEqual(result.failed, 'back arc 2->3 spans chi_dir > 1')

  def test_partition_must_cover(self):
    with self.assertRaises(decomposition.BadPartition):
      decomposition.check_not_ours(C3, [(0, 1)], 2)
    with self.assertRaises(ValueError):
      decomposition.layered_partition_check(C3, [(0, 1, 2)], 2, lemma='other')

  def test_partition_dichi_hypothesis(self):
    result = decomposition.layered_partition_check(
        C3, [(0, 1, 2)], 1, lemma=decomposition.PARTITION_DICHI)
    self.assertFalse(result.ok)
    self.assertEqual(result.failed, 'part 0 has chi_dir 2 > 1')

  @given(test_utils.digraphs(min_n=1, max_n=6), st.data())
  @test_utils.PROPERTY_SETTINGS
  def test_partition_dichi_conclusion_holds(self, d, data):
    cuts = data.draw(st.sets(st.integers(1, max(d.n - 1, 1))))
    bounds = [0] + sorted(c for c in cuts if c < d.n) + [d.n]
    parts = [tuple(range(a, b)) for a, b in zip(bounds, bounds[1:])]
    result = decomposition.check_partition_dichi(d, parts)
    self.assertTrue(result.ok, msg=result)
    self.assertLessEqual(result.chi, result.bound)
    self.assertEqual(result.bound, 6 * (result.m + result.m_prime) + 2)

  def test_partition_dichi_random_corpus(self):
    rng = np.random.default_rng(4)
    for _ in range(100):
      n = int(rng.integers(1, 11))
      d = test_utils.random_digraph(rng, n, rng.uniform(0.2, 0.8))
      cuts = []
      if n > 1:
        cuts = sorted(set(rng.integers(1, n, size=rng.integers(0, n))))
      bounds = [0] + [int(c) for c in cuts] + [n]
      parts = [tuple(range(a, b)) for a, b in zip(bounds, bounds[1:])]
      result = decomposition.check_partition_dichi(d, parts)
      self.assertTrue(result.ok, msg=(d, parts, result))
      self.assertLessEqual(result.chi, result.bound)
      self.assertEqual(result.bound, 6 * (result.m + result.m_prime) + 2)


class DominationTest(parameterized.TestCase):

  def test_out_star(self):
    star = digraph.from_edge_list(5, [(0, v) for v in range(1, 5)])
    self.assertEqual(decomposition.minimal_dominating_set(star, range(5)), (0,))

  def test_stable_set_dominates_only_itself(self):
    self.assertEqual(
        decomposition.minimal_dominating_set(digraph.edgeless(4), range(4)),
        (0, 1, 2, 3))

  def test_transitive_triangle(self):
    tt3 = digraph.transitive_tournament(3)
    self.assertEqual(decomposition.minimal_dominating_set(tt3, range(3)), (0,))
    self.assertEqual(decomposition.source_layer(tt3, range(3)), (0,))
    self.assertTrue(decomposition.dominates(tt3, (0,), (0, 1, 2)))
    self.assertFalse(decomposition.dominates(tt3, (1,), (0, 1, 2)))

  def test_source_layer_needs_acyclic_set(self):
    with self.assertRaises(decomposition.NotAcyclic):
      decomposition.source_layer(C3, range(3))

  @given(test_utils.acyclic_digraphs())
  @test_utils.PROPERTY_SETTINGS
  def test_minimal_dominating_set(self, d):
    vertices = range(d.n)
    b = decomposition.minimal_dominating_set(d, vertices)
    self.assertTrue(decomposition.dominates(d, b, vertices))
    self.assertContainsSubset(decomposition.source_layer(d, vertices), b)
    for v in b:
      self.assertFalse(
          decomposition.dominates(d, [u for u in b if u != v], vertices))

  @given(test_utils.acyclic_digraphs())
  @test_utils.PROPERTY_SETTINGS
  def test_path_free_sets_are_dominated_by_their_sources(self, d):
    closure = nx.transitive_closure_dag(digraph.to_networkx(d))
    d = digraph.from_edge_list(d.n, list(closure.edges))
    self.assertIsNone(
        patterns.find_induced(d, patterns.build(patterns.DirPath(3))))
    b = decomposition.minimal_dominating_set(d, range(d.n))
    self.assertEqual(b, decomposition.source_layer(d, range(d.n)))
    self.assertLessEqual(len(b), dicolor.independence_number(d))

  def test_path_free_random_corpus(self):
    rng = np.random.default_rng(5)
    for _ in range(500):
      n = int(rng.integers(1, 10))
      order = rng.permutation(n)
      dag = nx.DiGraph()
      dag.add_nodes_from(range(n))
      dag.add_edges_from((int(order[u]), int(order[v]))
                         for u, v in itertools.combinations(range(n), 2)
                         if rng.random() < 0.3)
      d = digraph.from_edge_list(n, list(nx.transitive_closure_dag(dag).edges))
      sources = decomposition.source_layer(d, range(n))
      self.assertTrue(all(not d.adjacent(u, v)
                          for u, v in itertools.combinations(sources, 2)))
      self.assertTrue(decomposition.dominates(d, sources, range(n)))
      b = decomposition.minimal_dominating_set(d, range(n))
      self.assertLessEqual(len(b), dicolor.independence_number(d), msg=d)


if __name__ == '__main__':
  absltest.main()
