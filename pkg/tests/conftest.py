import time

import pytest

from shadowloc.experiment import SweepConfig, run_sweep
from shadowloc.geometry import Point2
from shadowloc.graph import NodeRecord, build_unit_disk_graph

# Four-node scene: n1, n2, n3 form the kernel, n4 hears n1 and n2 only.
# Its mirror hypothesis (0.4, 0.4) would put n3 within range, so it is ruled out.
SCENE_RHO = 0.25
SCENE_POS = [Point2(0.3, 0.5), Point2(0.5, 0.5), Point2(0.4, 0.3), Point2(0.4, 0.6)]
SCENE_TRUE_HYP = Point2(0.4, 0.6)
SCENE_MIRROR_HYP = Point2(0.4, 0.4)

_ACCEPTANCE_LINES = []


def record_criterion(name, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" -- {detail}" if detail else "")
    _ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


@pytest.fixture
def scene_graph():
    nodes = [NodeRecord(k, p, k < 3) for k, p in enumerate(SCENE_POS)]
    return build_unit_disk_graph(nodes, SCENE_RHO)


@pytest.fixture(scope="session")
def default_sweep():
    t0 = time.perf_counter()
    res = run_sweep(SweepConfig(runs=50, base_seed=0))
    res.elapsed = time.perf_counter() - t0
    return res


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
