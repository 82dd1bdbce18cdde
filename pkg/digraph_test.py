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
"""Tests for digraph."""
import os

from absl.testing import absltest
from absl.testing import parameterized
from hypothesis import given
import networkx as nx

# pylint: disable=g-bad-import-order
import constructions
import digraph
import test_utils

C3 = digraph.directed_cycle(3)


class DigraphTest(parameterized.TestCase):

  def test_cyclic_triangle_from_edge_list(self):
    d = digraph.from_edge_list(3, [(0, 1), (1, 2), (2, 0)])
    self.assertEqual(d, C3)
    self.assertEqual(d.num_arcs, 3)
    self.assertEqual(d.successors(0), (1,))
    self.assertEqual(d.predecessors(0), (2,))

  @parameterized.named_parameters(
      ('self_loop', [(1, 1)], digraph.SelfLoop),
      ('opposite', [(0, 1), (1, 0)], digraph.DuplicateOppositeArc),
      ('out_of_range', [(0, 3)], digraph.VertexOutOfRange),
  )
  def test_invalid_arcs(self, arcs, error):
    with self.assertRaises(error):
      digraph.from_edge_list(3, arcs)

  def test_neighbourhoods_of_cyclic_triangle(self):
    self.assertEqual(digraph.out_neighbors(C3, [0]), (1,))
    self.assertEqual(digraph.in_neighbors(C3, [0]), (2,))
    self.assertEqual(digraph.non_neighbors(C3, [0]), ())
    self.assertEqual(digraph.closed_neighborhood(C3, [0]), (0, 1, 2))

  def test_induced_keeps_host_ids(self):
    sub = digraph.induced(C3, [0, 1])
    self.assertEqual(sub.graph.arcs(), [(0, 1)])
    self.assertEqual(sub.lift([1]), (1,))

  def test_strong_components_in_topological_order(self):
    d = digraph.join_forward(C3, C3)
    condensation = digraph.scc_condensation(d)
    self.assertEqual(condensation.components, [(0, 1, 2), (3, 4, 5)])
    self.assertEqual(condensation.dag.arcs(), [(0, 1)])
    self.assertLen(digraph.scc_condensation(C3).components, 1)

  @parameterized.named_parameters(
      ('tt4', digraph.transitive_tournament(4), True),
      ('c3', C3, False),
      ('c4', digraph.directed_cycle(4), False),
  )
  def test_is_acyclic(self, d, expected):
    self.assertEqual(digraph.is_acyclic(d), expected)
    self.assertEqual(digraph.topological_order(d) is not None, expected)

  def test_clique_numbers(self):
    self.assertEqual(
        digraph.underlying_clique_number(digraph.transitive_tournament(5)), 5)
    self.assertEqual(digraph.underlying_clique_number(digraph.edgeless(2)), 1)
    f7 = constructions.build_f7(8)
    self.assertEqual(digraph.underlying_clique_number(f7.digraph), 4)

  def test_pattern_algebra(self):
    self.assertEqual(
        digraph.join_forward(digraph.edgeless(1), digraph.edgeless(1)).arcs(),
        [(0, 1)])
    self.assertEqual(
        digraph.join_forward(
            digraph.transitive_tournament(2), digraph.edgeless(1)),
        digraph.transitive_tournament(3))
    hero = digraph.join_forward(C3, digraph.transitive_tournament(2))
    self.assertEqual((hero.n, hero.num_arcs), (5, 10))
    self.assertEqual(
        digraph.triangle_join(*[digraph.edgeless(1)] * 3), C3)
    delta = digraph.triangle_join(digraph.edgeless(1), digraph.edgeless(1),
                                  digraph.transitive_tournament(2))
    self.assertEqual(delta.n, 4)
    self.assertTrue(digraph.is_strongly_connected(delta))
    triple = digraph.copies(3, C3)
    self.assertEqual((triple.n, triple.num_arcs), (9, 9))

  def test_edge_list_with_annotations(self):
    d = digraph.from_edge_list(3, [(0, 1), (1, 2)])
    annotations = digraph.Annotations({(0, 1): 'X', (1, 2): 'Y'}, {
        0: (1, 2),
        1: (1, 3),
        2: (2, 3)
    }, {'construction': 'shift'})
    text = digraph.format_edge_list(d, annotations)
    parsed, parsed_annotations = digraph.parse_edge_list(text)
    self.assertEqual(parsed, d)
    self.assertEqual(parsed_annotations, annotations)

  @parameterized.named_parameters(
      ('bad_pair', '2 1\n0 x\n'),
      ('missing_header', '# nothing\n'),
      ('count_mismatch', '3 2\n0 1\n'),
      ('unknown_class_arc', '2 1\n0 1\n#class 1 0 X\n'),
  )
  def test_parse_errors(self, text):
    with self.assertRaises(digraph.DigraphError):
      digraph.parse_edge_list(text)

  def test_save_and_load(self):
    path = os.path.join(absltest.get_default_test_tmpdir(), 'c3.el')
    digraph.save(path, C3)
    loaded, _ = digraph.load(path)
    self.assertEqual(loaded, C3)

  def test_dot_keeps_direction(self):
    source = digraph.to_dot(C3, arc_classes={(0, 1): 'X'})
    self.assertIn('0 -> 1', source)
    self.assertIn('label=X', source)

  @given(test_utils.digraphs())
  @test_utils.PROPERTY_SETTINGS
  def test_reversal_invariants(self, d):
    r = digraph.reverse(d)
    self.assertEqual(digraph.reverse(r), d)
    self.assertEqual(digraph.is_acyclic(r), digraph.is_acyclic(d))
    self.assertEqual(
        digraph.underlying_clique_number(r), digraph.underlying_clique_number(d))
    for v in range(d.n):
      self.assertEqual(digraph.out_neighbors(r, [v]),
                       digraph.in_neighbors(d, [v]))

  @given(test_utils.digraphs())
  @test_utils.PROPERTY_SETTINGS
  def test_condensation_matches_networkx(self, d):
    condensation = digraph.scc_condensation(d)
    expected = {
        frozenset(c)
        for c in nx.strongly_connected_components(digraph.to_networkx(d))
    }
    self.assertEqual({frozenset(c) for c in condensation.components}, expected)
    self.assertTrue(digraph.is_acyclic(condensation.dag))
    for a, b in condensation.dag.arcs():
      self.assertLess(a, b)
    self.assertEqual(
        digraph.is_acyclic(d),
        nx.is_directed_acyclic_graph(digraph.to_networkx(d)))


if __name__ == '__main__':
  absltest.main()
