"""pytest wiring: absltest binaries parse absl flags in main(); do it here."""

from absl import flags


def pytest_configure(config):
  del config
  if not flags.FLAGS.is_parsed():
    flags.FLAGS.mark_as_parsed()
