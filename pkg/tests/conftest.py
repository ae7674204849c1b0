import os
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from edgeaudit.graphs import Graph, load_edge_list

DATA_DIR = Path(__file__).parent / "data"
FACEBOOK2_ENV = "EDGEAUDIT_FACEBOOK2"
FACEBOOK2_DEFAULT = DATA_DIR / "facebook_combined.txt"


def facebook2_path() -> Path | None:
    env = os.environ.get(FACEBOOK2_ENV)
    if env and Path(env).exists():
        return Path(env)
    if FACEBOOK2_DEFAULT.exists():
        return FACEBOOK2_DEFAULT
    return None


@pytest.fixture(scope="session")
def facebook2() -> Graph:
    """The 4,039-node / 88,234-edge Facebook ego-network edge list.

    Not bundled with the repository; place the SNAP `facebook_combined.txt`
    file at tests/data/ or point EDGEAUDIT_FACEBOOK2 at it.
    """
    path = facebook2_path()
    if path is None:
        pytest.skip(
            "Facebook2 dataset not available: put facebook_combined.txt under "
            f"tests/data/ or set ${FACEBOOK2_ENV}"
        )
    g = load_edge_list(path)
    if (g.node_count, g.edge_count) != (4039, 88234):
        pytest.skip(
            f"file at {path} has {g.node_count} nodes / {g.edge_count} edges; "
            "expected the 4039 / 88234 Facebook ego-network"
        )
    return g
