import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from support import write_sweep_tree


@pytest.fixture()
def sweep_tree(tmp_path):
    report = write_sweep_tree(tmp_path)
    return tmp_path, report
