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
"""Generates, verifies and colors digraphs from the command line.

Usage:
  dichroma.py gen f7|f5|shift --n N [--k K] [--order lex|random[:SEED]]
  dichroma.py verify f7|f5 --n N [--all]
  dichroma.py verify file|nice-set|bag-chain --in F [--cert C] [--chain C]
  dichroma.py exact chi_dir|chi|omega|alpha|gallai_roy --in F
  dichroma.py pattern --in F --find TAG [--induced]
  dichroma.py color broomfree --b TAG --bprime TAG --in F [--trace F]
  dichroma.py pmct --in F

Exit codes: 0 every check passed, 1 a check failed, 2 usage error, 3 a
search budget ran out (the partial report is still written).
"""
import json
import os
import sys
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple

from absl import app
from absl import flags
from absl import logging
from ml_collections import config_dict

# pylint: disable=g-bad-import-order
import config as config_lib
import constructions
import decomposition
import dicolor
import digraph
import patterns
import utils

_N = flags.DEFINE_integer('n', None, 'Index range of the construction.')
_K = flags.DEFINE_integer('k', 2, 'Tuple length of `gen shift`.')
_ORDER = flags.DEFINE_string(
    'order', constructions.LEX,
    'Vertex order of the Z arcs: `lex`, `random` (uses --seed) or '
    '`random:SEED`.')
_ALL = flags.DEFINE_boolean(
    'all', False, 'Also run the class and pattern checks in `verify`.')
_IN = flags.DEFINE_string('in', None, 'Edge-list file to read.')
_OUT = flags.DEFINE_string('out', None,
                           'Edge-list file to write (default: stdout).')
_FIND = flags.DEFINE_string('find', None, 'Pattern tag, e.g. `delta:1,1,1`.')
_INDUCED = flags.DEFINE_boolean('induced', True,
                                'Induced (else plain) subgraph search.')
_EXPECT_FREE = flags.DEFINE_boolean(
    'expect_free', False, 'Fail the `pattern` check when a copy is found.')
_B = flags.DEFINE_string('b', None, 'First broom, e.g. `broom:r=1`.')
_BPRIME = flags.DEFINE_string('bprime', None, 'Opposing broom.')
_T = flags.DEFINE_integer('t', None, 'Forbidden transitive tournament size.')
_TRACE = flags.DEFINE_string('trace', None, 'Where to write the level trace.')
_COLORING_OUT = flags.DEFINE_string('coloring_out', None,
                                    'Where to write the coloring as JSON.')
_CERT = flags.DEFINE_string('cert', None, 'Nice-set certificate (JSON).')
_CHAIN = flags.DEFINE_string('chain', None, 'Bag chain (JSON).')
_MAX_NODES = flags.DEFINE_integer(
    'max_nodes', None, 'Search-node limit of every exact search (0: none).')
_TIME_LIMIT_MS = flags.DEFINE_integer(
    'time_limit_ms', None, 'Wall clock limit of every exact search (0: none).')
_SEED = flags.DEFINE_integer('seed', None, 'Seed of randomized orders.')
_PRESET = flags.DEFINE_string('preset', '', 'Comma separated config presets.')
_REPORT = flags.DEFINE_string('report', None,
                              'Where to write the JSON report (default: '
                              'stdout).')

GEN = 'gen'
VERIFY = 'verify'
EXACT = 'exact'
PATTERN = 'pattern'
COLOR = 'color'
PMCT = 'pmct'
COMMANDS = (GEN, VERIFY, EXACT, PATTERN, COLOR, PMCT)
EXACT_TARGETS = ('chi_dir', 'chi', 'omega', 'alpha', 'gallai_roy')

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

Check = Callable[[], utils.CheckResult]


class Report(NamedTuple):
  """Machine-readable outcome of one invocation."""
  command: List[str]
  checks: List[utils.CheckResult]
  tool_version: str
  schema_version: int
  seed: Optional[int]

  def to_json(self) -> Dict[str, Any]:
    return {
        'command': list(self.command),
        'checks': [c._asdict() for c in self.checks],
        'tool_version': self.tool_version,
        'schema_version': self.schema_version,
        'seed': self.seed,
    }

  @classmethod
  def from_json(cls, data: Dict[str, Any]) -> 'Report':
    return cls(
        list(data['command']),
        [utils.CheckResult(**c) for c in data['checks']],
        data['tool_version'], data['schema_version'], data['seed'])

  @property
  def exit_code(self) -> int:
    return EXIT_FAIL if any(c.status == 'fail' for c in self.checks) else (
        EXIT_PASS)


class Settings(NamedTuple):
  config: config_dict.ConfigDict
  max_nodes: int
  seed: int


def _usage(message: str) -> app.UsageError:
  return app.UsageError(message, exitcode=EXIT_USAGE)


def _settings() -> Settings:
  try:
    config = config_lib.get_config(_PRESET.value)
  except ValueError as e:
    raise _usage(str(e)) from e
  if _MAX_NODES.value is not None:
    config.budget.max_nodes = _MAX_NODES.value
  if _TIME_LIMIT_MS.value is not None:
    config.budget.time_limit_ms = _TIME_LIMIT_MS.value
  if _SEED.value is not None:
    config.seed = _SEED.value
  config.in_path = _IN.value
  config.out_path = _OUT.value
  utils.set_default_time_limit_ms(config.budget.time_limit_ms)
  return Settings(config, config.budget.max_nodes, config.seed)


def _load_input(settings: Settings) -> Tuple[digraph.Digraph,
                                             digraph.Annotations]:
  if not settings.config.in_path:
    raise _usage('This command needs --in.')
  try:
    return digraph.load(settings.config.in_path)
  except (OSError, digraph.DigraphError) as e:
    raise _usage(f'Cannot read {settings.config.in_path}: {e}') from e


def _read_json(path: Optional[str], flag: str) -> Dict[str, Any]:
  if not path:
    raise _usage(f'This command needs --{flag}.')
  try:
    with open(os.path.expanduser(path), 'r') as f:
      return json.load(f)
  except (OSError, ValueError) as e:
    raise _usage(f'Cannot read --{flag} {path}: {e}') from e


def _write_json(path: str, data: Any, what: str):
  path = os.path.expanduser(path)
  with open(path, 'w') as f:
    json.dump(data, f, indent=2, sort_keys=True)
  logging.info('Wrote %s to %s', what, path)


def _parse_pattern(text: Optional[str], flag: str,
                   settings: Settings) -> patterns.Pattern:
  if not text:
    raise _usage(f'This command needs --{flag}.')
  try:
    pattern = patterns.build(patterns.parse_tag(text))
  except (patterns.TagParseError, patterns.BadParameter) as e:
    raise _usage(str(e)) from e
  if pattern.graph.n > settings.config.limits.pattern_max_vertices:
    raise _usage(f'Pattern `{text}` has {pattern.graph.n} vertices, more than '
                 f'{settings.config.limits.pattern_max_vertices}.')
  return pattern


def _order(settings: Settings) -> str:
  if _ORDER.value == 'random':
    return f'random:{settings.seed}'
  return _ORDER.value


def cmd_gen(target: str, settings: Settings) -> List[Tuple[str, Check]]:
  """Builds a construction and writes its annotated edge list."""
  if _N.value is None:
    raise _usage('gen needs --n.')
  limit = settings.config.limits.max_construction_vertices
  try:
    if target == constructions.SHIFT:
      c = constructions.shift_digraph(_K.value, _N.value, limit)
    else:
      c = constructions.build_family(target, _N.value, _order(settings), limit)
  except patterns.BadParameter as e:
    raise _usage(str(e)) from e

  annotations = constructions.to_annotations(c)
  if settings.config.out_path:
    digraph.save(settings.config.out_path, c.digraph, annotations)
  else:
    sys.stdout.write(digraph.format_edge_list(c.digraph, annotations))

  def check() -> utils.CheckResult:
    counts = {cls: 0 for cls in constructions.ARC_CLASSES}
    for cls in c.arc_classes.values():
      counts[cls] += 1
    return utils.CheckResult('gen', 'pass', {
        'construction': c.family,
        'vertices': c.digraph.n,
        'arcs': c.digraph.num_arcs,
        'classes': counts,
        'order': c.order,
    })

  return [('gen', check)]


def _nice_set_check(d: digraph.Digraph, data: Dict[str, Any]) -> Check:

  def check() -> utils.CheckResult:
    try:
      cert = decomposition.NiceSetCertificate(
          tuple(data['S']), tuple(data['S1']), tuple(data['S2']),
          int(data['k']))
    except (KeyError, TypeError, ValueError) as e:
      raise _usage(f'Malformed certificate: {e}') from e
    try:
      ok = decomposition.verify_nice_set(d, cert)
    except decomposition.BadPartition as e:
      return utils.CheckResult('nice-set', 'fail', {'reason': str(e)})
    if ok:
      return utils.CheckResult('nice-set', 'pass', {'k': cert.k})
    outside = d.full_mask & ~utils.to_mask(cert.S)
    violations = [v for v in cert.S1
                  if utils.popcount(d.in_row(v) & outside) > cert.k]
    violations += [v for v in cert.S2
                   if utils.popcount(d.out_row(v) & outside) > cert.k]
    return utils.CheckResult('nice-set', 'fail', {
        'empty': not cert.S,
        'vertices': violations,
    })

  return check


def _bag_chain_check(d: digraph.Digraph, data: Dict[str, Any],
                     max_nodes: int) -> Check:

  def check() -> utils.CheckResult:
    try:
      chain = decomposition.BagChain(
          tuple(tuple(bag) for bag in data['bags']), int(data['c']),
          int(data['beta']))
      mode = data.get('mode', 'eq')
    except (KeyError, TypeError, ValueError) as e:
      raise _usage(f'Malformed chain: {e}') from e
    try:
      ok = decomposition.verify_bag_chain(d, chain, mode, max_nodes)
    except (ValueError, decomposition.BadPartition) as e:
      return utils.CheckResult('bag-chain', 'fail', {'reason': str(e)})
    if not ok:
      return utils.CheckResult('bag-chain', 'fail', {
          'bags': [list(b) for b in chain.bags],
          'mode': mode
      })
    zones = decomposition.zone_partition(d, chain, chain.c, max_nodes)
    return utils.CheckResult('bag-chain', 'pass', {
        'mode': mode,
        'zones': [[v, z] for v, z in sorted(zones.zones.items())]
    })

  return check


def cmd_verify(target: str, settings: Settings) -> List[Tuple[str, Check]]:
  """The claim suite of a construction, or a certificate check."""
  max_nodes = settings.max_nodes
  exact_limit = settings.config.limits.exact_chi_max_vertices
  if target == 'nice-set':
    d, _ = _load_input(settings)
    return [('nice-set', _nice_set_check(d, _read_json(_CERT.value, 'cert')))]
  if target == 'bag-chain':
    d, _ = _load_input(settings)
    return [('bag-chain',
             _bag_chain_check(d, _read_json(_CHAIN.value, 'chain'), max_nodes))]
  if target == 'file':
    d, annotations = _load_input(settings)
    try:
      c = constructions.construction_from_annotations(d, annotations)
    except patterns.BadParameter as e:
      raise _usage(str(e)) from e
  else:
    if _N.value is None:
      raise _usage('verify needs --n (or `verify file --in F`).')
    try:
      c = constructions.build_family(
          target, _N.value, _order(settings),
          settings.config.limits.max_construction_vertices)
    except patterns.BadParameter as e:
      raise _usage(str(e)) from e
  suite = constructions.claim_suite(c, exact_limit, max_nodes)
  if not _ALL.value:
    suite = [(claim, check) for claim, check in suite
             if claim in ('5.1', '5.2', '5.3')]
  return suite


def cmd_exact(target: str, settings: Settings) -> List[Tuple[str, Check]]:
  """One exact value of the input digraph with its witness."""
  if target not in EXACT_TARGETS:
    raise _usage(f'Invalid exact target `{target}`, expected one of '
                 f'{", ".join(EXACT_TARGETS)}.')
  d, _ = _load_input(settings)
  max_nodes = settings.max_nodes

  def check() -> utils.CheckResult:
    if target == 'chi_dir':
      result = dicolor.solve_dichromatic(d, max_nodes=max_nodes)
      if not dicolor.verify_dicoloring(
          d, dicolor.Dicoloring(result.colors, result.chi)):
        return utils.CheckResult(target, 'fail', dicolor.as_json(result))
      return utils.CheckResult(target, 'pass', dicolor.as_json(result))
    if target == 'chi':
      result = dicolor.chromatic_number(digraph.underlying_graph(d), max_nodes)
      return utils.CheckResult(target, 'pass', {
          'chi': result.value,
          'coloring': [result.coloring[v] for v in range(d.n)],
          'nodes_explored': result.nodes_explored
      })
    if target == 'omega':
      cliques = digraph.maximum_cliques(d)
      return utils.CheckResult(target, 'pass', {
          'omega': len(cliques[0]) if cliques else 0,
          'clique': list(cliques[0]) if cliques else []
      })
    if target == 'alpha':
      stable = dicolor.maximum_stable_set(d, max_nodes=max_nodes)
      return utils.CheckResult(target, 'pass', {
          'alpha': len(stable),
          'stable_set': list(stable)
      })
    longest = dicolor.gallai_roy_bound(
        d, settings.config.limits.longest_path_max_vertices)
    return utils.CheckResult(target, 'pass', {'longest_path_vertices': longest})

  return [(target, check)]


def cmd_pattern(settings: Settings) -> List[Tuple[str, Check]]:
  """Searches one pattern in the input digraph."""
  d, _ = _load_input(settings)
  pattern = _parse_pattern(_FIND.value, 'find', settings)
  induced = _INDUCED.value

  def check() -> utils.CheckResult:
    find = patterns.find_induced if induced else patterns.find_subgraph
    embedding = find(d, pattern, settings.max_nodes)
    witness = {
        'pattern': patterns.format_tag(pattern.tag),
        'induced': induced,
        'found': embedding is not None,
        'embedding': list(embedding) if embedding is not None else None,
    }
    failed = _EXPECT_FREE.value and embedding is not None
    return utils.CheckResult('pattern', 'fail' if failed else 'pass', witness)

  return [('pattern', check)]


def cmd_color(target: str, settings: Settings) -> List[Tuple[str, Check]]:
  """Runs the broom-free pipeline and writes its coloring and trace."""
  if target != 'broomfree':
    raise _usage(f'Invalid coloring algorithm `{target}`, expected broomfree.')
  d, _ = _load_input(settings)
  b = _parse_pattern(_B.value, 'b', settings)
  b_prime = _parse_pattern(_BPRIME.value, 'bprime', settings)
  try:
    if not patterns.opposing(b, b_prime):
      raise _usage('--b and --bprime must be opposing brooms.')
  except patterns.NotValidOrientation as e:
    raise _usage(str(e)) from e

  def check() -> utils.CheckResult:
    try:
      result = decomposition.dicolor_broom_free(d, b, b_prime, _T.value,
                                                settings.max_nodes)
    except decomposition.FreenessViolated as e:
      return utils.CheckResult('broomfree', 'fail', {
          'pattern': patterns.format_tag(e.pattern.tag),
          'embedding': list(e.embedding)
      })
    except decomposition.NicenessViolated as e:
      return utils.CheckResult('broomfree', 'fail', {
          'vertex': e.vertex,
          'in_outside': list(e.in_outside),
          'out_outside': list(e.out_outside),
          'k': e.k
      })
    if _TRACE.value:
      _write_json(_TRACE.value, {
          'bound': result.bound,
          'k_policy': result.k_policy,
          'levels': result.trace
      }, 'trace')
    if _COLORING_OUT.value:
      _write_json(_COLORING_OUT.value, {
          'k': result.coloring.k,
          'colors': list(result.coloring.colors)
      }, 'coloring')
    return utils.CheckResult('broomfree', 'pass', {
        'colors': result.coloring.k,
        'bound': result.bound,
        'omega': digraph.underlying_clique_number(d),
        'k_policy': result.k_policy,
        'levels': len(result.trace),
        't': _T.value,
    })

  return [('broomfree', check)]


def cmd_pmct(settings: Settings) -> List[Tuple[str, Check]]:
  """The PMCT of a strongly connected input and its X / Z / Y split."""
  d, _ = _load_input(settings)

  def check() -> utils.CheckResult:
    try:
      pmct = decomposition.find_pmct(d)
    except decomposition.NotStronglyConnected:
      components = digraph.scc_condensation(d).components
      return utils.CheckResult('pmct', 'fail', {
          'components': [list(c) for c in components]
      })
    except decomposition.PmctNotFound as e:
      return utils.CheckResult('pmct', 'fail', {
          'vertices': list(e.vertices),
          'tournaments': [list(k) for k in e.tournaments]
      })
    x_set, z_set, y_set = decomposition.broom_neighborhood_split(d, pmct)
    return utils.CheckResult('pmct', 'pass', {
        'K': list(pmct.K),
        'P': list(pmct.P),
        'C': list(pmct.C),
        'X': list(x_set),
        'Z': list(z_set),
        'Y': list(y_set),
    })

  return [('pmct', check)]


def _suite(argv: Sequence[str],
           settings: Settings) -> List[Tuple[str, Check]]:
  command = argv[1]
  target = argv[2] if len(argv) > 2 else None
  if len(argv) > 3:
    raise _usage('Too many command-line arguments.')
  if command in (GEN, VERIFY, EXACT, COLOR) and target is None:
    if command == VERIFY and settings.config.family:
      target = settings.config.family
    else:
      raise _usage(f'`{command}` needs a target.')
  if command == GEN:
    return cmd_gen(target, settings)
  if command == VERIFY:
    return cmd_verify(target, settings)
  if command == EXACT:
    return cmd_exact(target, settings)
  if command == PATTERN:
    return cmd_pattern(settings)
  if command == COLOR:
    return cmd_color(target, settings)
  return cmd_pmct(settings)


def run_checks(suite: Sequence[Tuple[str, Check]]
              ) -> Tuple[List[utils.CheckResult], bool]:
  """Runs checks in order; stops at the first exhausted budget."""
  results = []
  for claim, check in suite:
    try:
      with utils.Stopwatch() as watch:
        result = check()
    except utils.BudgetExceeded as e:
      logging.warning('Check %s stopped: %s', claim, e)
      results.append(
          utils.CheckResult(claim, 'skipped', {
              'budget_exceeded': e.what,
              'lower': e.lower,
              'upper': e.upper,
              'nodes_explored': e.nodes_explored
          }))
      return results, True
    results.append(result._replace(elapsed_ms=watch.elapsed_ms))
    logging.info('Check %s: %s', claim, result.status)
  return results, False


def write_report(report: Report, path: Optional[str]):
  if path:
    _write_json(path, report.to_json(), 'report')
  else:
    sys.stdout.write(json.dumps(report.to_json(), indent=2, sort_keys=True))
    sys.stdout.write('\n')


def main(argv: Sequence[str]) -> int:
  if len(argv) < 2 or argv[1] not in COMMANDS:
    raise _usage(f'Expected a subcommand: {" | ".join(COMMANDS)}.')
  settings = _settings()
  suite = _suite(argv, settings)
  results, exhausted = run_checks(suite)
  report = Report(
      list(argv[1:]), results, settings.config.report.tool_version,
      settings.config.report.schema_version, settings.seed)
  # `gen` prints the edge list itself, so its report needs --report.
  if argv[1] != GEN or _REPORT.value:
    write_report(report, _REPORT.value)
  if exhausted:
    return EXIT_BUDGET
  return report.exit_code


if __name__ == '__main__':
  app.run(main)
