import json
from pathlib import Path

import numpy as np
import pytest

from rasterpack import _kernels
from rasterpack.raster import PixelShape

INSTANCES = Path(__file__).resolve().parent.parent / "instances"

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the JIT kernels once so timed tests measure search, not numba."""
    _kernels.warmup()


def rect(l: int, w: int) -> PixelShape:
    return PixelShape.from_local_cells(
        np.array([(x, y) for x in range(l) for y in range(w)], dtype=np.int64))


# Five dominoes in a width-2 strip: the optimal length (the area bound) needs
# at least one piece rotated, so the level construction alone cannot reach it
# and the run exercises real search before terminating at the lower bound.
MINI_INSTANCE = {
    "name": "mini",
    "container_width": 2.0,
    "shapes": [
        {"id": "dom", "count": 5, "orientations": [0, 90],
         "polygon": [[0, 0], [2, 0], [2, 1], [0, 1]]},
    ],
}


@pytest.fixture
def mini_instance_path(tmp_path):
    p = tmp_path / "mini.json"
    p.write_text(json.dumps(MINI_INSTANCE))
    return p
