"""Monte-Carlo comparison of shadow-edge localization against TNC.

Each (rho, N, run) cell draws an independent uniform instance in the unit
square, closes it once with trilateration only (TNC) and once with shadow
edges, and records the localized fractions and edge counts.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .engine import Mode, propagate
from .errors import EmptyGraph, KernelPlacementFailed
from .geometry import EPS_COLLINEAR, Point2, cross, distance
from .graph import NetworkGraph, NodeRecord, build_unit_disk_graph

KERNEL_ATTEMPTS = 10_000
_BATCH = 500

DEFAULT_RHO_GRID = tuple(round(0.10 + 0.05 * k, 10) for k in range(9))
DEFAULT_N_GRID = tuple(range(10, 101, 10))


@dataclass(frozen=True)
class SweepConfig:
    rho_grid: Sequence[float] = DEFAULT_RHO_GRID
    n_grid: Sequence[int] = DEFAULT_N_GRID
    runs: int = 50
    base_seed: int = 0
    mode: str = "both"

    def __post_init__(self):
        rho_grid = tuple(float(r) for r in self.rho_grid)
        n_grid = tuple(int(n) for n in self.n_grid)
        if not rho_grid or not n_grid:
            raise ValueError("grids must be non-empty")
        if any(b <= a for a, b in zip(rho_grid, rho_grid[1:])) or any(b <= a for a, b in zip(n_grid, n_grid[1:])):
            raise ValueError("grids must be strictly increasing")
        if not all(0 < r <= math.sqrt(2) + 1e-12 for r in rho_grid):
            raise ValueError("rho values must lie in (0, sqrt(2)]")
        if not all(n > 3 for n in n_grid):
            raise ValueError("network sizes must exceed 3")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.mode not in ("both", "tnc", "shadow"):
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "rho_grid", rho_grid)
        object.__setattr__(self, "n_grid", n_grid)


@dataclass(frozen=True)
class RunMetrics:
    rho: float
    n: int
    run_index: int
    pct_tnc: float
    pct_shadow: float
    shadow_edge_count: int
    regular_edge_count: int


@dataclass(frozen=True)
class SkippedRun:
    rho: float
    n: int
    run_index: int
    reason: str


@dataclass(frozen=True)
class CellSummary:
    rho: float
    n: int
    runs: int
    pct_tnc: float
    pct_shadow: float
    difference: float
    ratio: float
    shadow_edges: float
    regular_edges: float
    shadow_fraction: float


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list[RunMetrics] = field(default_factory=list)
    skipped: list[SkippedRun] = field(default_factory=list)
    cells: list[CellSummary] = field(default_factory=list)

    def cell(self, rho: float, n: int) -> CellSummary:
        for c in self.cells:
            if c.n == n and math.isclose(c.rho, rho, abs_tol=1e-9):
                return c
        raise KeyError((rho, n))


def instance_seed(base_seed: int, rho: float, n: int, run: int) -> int:
    """Seed for one cell run, keyed on the cell *values* rather than grid positions."""
    rho_key = int(round(rho * 1_000_000))
    ss = np.random.SeedSequence([base_seed & 0xFFFFFFFFFFFFFFFF, rho_key, n, run])
    return int(ss.generate_state(1, np.uint64)[0])


def _valid_triple(t: np.ndarray, rho: float) -> bool:
    a, b, c = (Point2(float(x), float(y)) for x, y in t)
    return (
        distance(a, b) <= rho
        and distance(b, c) <= rho
        and distance(a, c) <= rho
        and abs(cross(a, b, c)) > EPS_COLLINEAR
    )


def place_kernel(rng: np.random.Generator, rho: float, attempts: int = KERNEL_ATTEMPTS) -> np.ndarray:
    """First uniform triple that is pairwise within ``rho`` and non-collinear."""
    done = 0
    while done < attempts:
        m = min(_BATCH, attempts - done)
        tri = rng.random((m, 3, 2))
        d01 = np.hypot(*(tri[:, 0] - tri[:, 1]).T)
        d12 = np.hypot(*(tri[:, 1] - tri[:, 2]).T)
        d02 = np.hypot(*(tri[:, 0] - tri[:, 2]).T)
        # loose vectorized filter; the scalar predicate has the final word
        ok = np.flatnonzero((d01 <= rho + 1e-12) & (d12 <= rho + 1e-12) & (d02 <= rho + 1e-12))
        for k in ok:
            if _valid_triple(tri[k], rho):
                return tri[k]
        done += m
    raise KernelPlacementFailed(f"no valid kernel triple in {attempts} attempts at rho={rho}")


def generate_instance(n: int, rho: float, seed: int) -> NetworkGraph:
    """Random unit-disk instance with ``n`` nodes; ids 0..2 are the kernel.

    Non-kernel positions and the kernel triple come from two independent
    child streams of ``seed``, so resampling the triple never moves the other
    nodes.
    """
    if n <= 3:
        raise ValueError("n must exceed 3")
    if not rho > 0:
        raise ValueError("rho must be positive")
    body_ss, kernel_ss = np.random.SeedSequence(seed).spawn(2)
    body = np.random.default_rng(body_ss).random((n - 3, 2))
    tri = place_kernel(np.random.default_rng(kernel_ss), rho)

    nodes = [NodeRecord(k, Point2(float(tri[k, 0]), float(tri[k, 1])), True) for k in range(3)]
    nodes += [NodeRecord(k + 3, Point2(float(x), float(y)), False) for k, (x, y) in enumerate(body)]
    return build_unit_disk_graph(nodes, rho)


def run_instance(g: NetworkGraph, mode: str = "both") -> tuple[float, float, int, int]:
    """Localized fractions under TNC and shadow closure plus edge counts."""
    pct_tnc = pct_shadow = float("nan")
    shadow_edges = 0
    if mode in ("both", "tnc"):
        pct_tnc = propagate(g.copy(), Mode.TNC).localized_fraction()
    if mode in ("both", "shadow"):
        sh = propagate(g.copy(), Mode.SHADOW)
        pct_shadow = sh.localized_fraction()
        shadow_edges = len(sh.shadow_edges)
    return pct_tnc, pct_shadow, shadow_edges, len(g.regular_edges)


def _run_cell(args) -> list:
    rho, n, runs, base_seed, mode = args
    out = []
    for run in range(runs):
        try:
            g = generate_instance(n, rho, instance_seed(base_seed, rho, n, run))
        except KernelPlacementFailed as exc:
            out.append(SkippedRun(rho, n, run, str(exc)))
            continue
        pt, ps, se, re_ = run_instance(g, mode)
        out.append(RunMetrics(rho, n, run, pt, ps, se, re_))
    return out


def shadow_edge_fraction(m: RunMetrics) -> float:
    total = m.shadow_edge_count + m.regular_edge_count
    if total <= 0:
        raise EmptyGraph("no edges in this run")
    return m.shadow_edge_count / total


def ratio(pct_shadow: float, pct_tnc: float) -> float:
    """Shadow/TNC ratio with 0/0 -> 1 and x/0 -> inf."""
    if pct_tnc == 0:
        return 1.0 if pct_shadow == 0 else math.inf
    return pct_shadow / pct_tnc


def summarize(rows: Iterable[RunMetrics]) -> list[CellSummary]:
    groups: dict[tuple[float, int], list[RunMetrics]] = {}
    for r in sorted(rows, key=lambda r: (r.rho, r.n, r.run_index)):
        groups.setdefault((r.rho, r.n), []).append(r)
    cells = []
    for (rho, n), rs in groups.items():
        k = len(rs)
        pt = math.fsum(r.pct_tnc for r in rs) / k
        ps = math.fsum(r.pct_shadow for r in rs) / k
        fr = [shadow_edge_fraction(r) for r in rs if r.shadow_edge_count + r.regular_edge_count > 0]
        cells.append(
            CellSummary(
                rho=rho,
                n=n,
                runs=k,
                pct_tnc=pt,
                pct_shadow=ps,
                difference=math.fsum(r.pct_shadow - r.pct_tnc for r in rs) / k,
                ratio=ratio(ps, pt),
                shadow_edges=math.fsum(r.shadow_edge_count for r in rs) / k,
                regular_edges=math.fsum(r.regular_edge_count for r in rs) / k,
                shadow_fraction=math.fsum(fr) / len(fr) if fr else float("nan"),
            )
        )
    return cells


def run_sweep(cfg: SweepConfig, jobs: int = 1, progress: Optional[callable] = None) -> SweepResult:
    """Evaluate every (rho, N, run) cell; output does not depend on ``jobs``."""
    tasks = [(rho, n, cfg.runs, cfg.base_seed, cfg.mode) for rho in cfg.rho_grid for n in cfg.n_grid]
    results = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for chunk in ex.map(_run_cell, tasks):
                results.extend(chunk)
                if progress:
                    progress()
    else:
        for t in tasks:
            results.extend(_run_cell(t))
            if progress:
                progress()

    res = SweepResult(config=cfg)
    res.rows = sorted((r for r in results if isinstance(r, RunMetrics)), key=lambda r: (r.rho, r.n, r.run_index))
    res.skipped = sorted((r for r in results if isinstance(r, SkippedRun)), key=lambda r: (r.rho, r.n, r.run_index))
    res.cells = summarize(res.rows)
    return res


def best_improvement_cell(cells: Sequence[CellSummary]) -> CellSummary:
    return max(cells, key=lambda c: (c.difference, -c.rho, -c.n))
