import os
import sys

from absl import flags

os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

# pytest bypasses absltest's flag parsing; --test_tmpdir and friends keep
# their defaults.
if not flags.FLAGS.is_parsed():
  flags.FLAGS.mark_as_parsed()
