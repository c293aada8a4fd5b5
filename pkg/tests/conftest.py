from pathlib import Path

import pytest

from fdtc.fiber import FiberGraph, load_fiber
from fdtc.monodromy import load_monodromy

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def example_graph() -> FiberGraph:
    return load_fiber(DATA / "worked_g2_fiber.json")


@pytest.fixture
def worked():
    return load_monodromy(DATA / "worked_g2.json")


@pytest.fixture
def amph_datum():
    return load_monodromy(DATA / "amphidrome_g2.json")


@pytest.fixture
def smooth_datum():
    return load_monodromy(DATA / "smooth_map.json")


def graph(vertices, edges, genus=None) -> FiberGraph:
    """Build a graph from (id, mult, genus[, piece_genus]) tuples."""
    verts = []
    for v in vertices:
        item = {"id": v[0], "mult": v[1], "genus": v[2]}
        if len(v) > 3:
            item["piece_genus"] = v[3]
        verts.append(item)
    data = {"vertices": verts, "edges": [list(e) for e in edges]}
    if genus is not None:
        data["genus"] = genus
    return FiberGraph.from_json(data)


@pytest.fixture
def elliptic_pair() -> FiberGraph:
    return graph([("a", 1, 1), ("b", 1, 1)], [("a", "b")])


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
