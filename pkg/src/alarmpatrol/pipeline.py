"""Anytime resolution flow and the random instance generator.

With no false alarms the defender's best pre-signal policy is to park the
resources on a covering placement and respond to signals from there, so the
pipeline (1) computes the minimum number of resources, (2) enumerates
covering placements of exactly that size by local-search moves, and (3) runs
the selected signal-response oracles on each placement, keeping per-oracle
incumbents and a utility-versus-time trace.  Interrupting at any point leaves
a valid report.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .mincover import (
    CoveringPlacement,
    MinCoverResult,
    min_cover,
    overlap_metrics,
    OverlapMetrics,
)
from .model import AlarmSystem, PatrollingSetting, all_pairs_distances, build_alarm, build_setting
from .oracles import SignalResponse, respond
from .seeding import stream


class BudgetTooSmall(RuntimeError):
    """The time budget expired before the placement step could finish."""


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs of the random urban-style instance generator.

    All vertices are targets, edges are unit cost and mean degree is steered
    toward ``avg_degree`` by adding random edges on top of a random spanning
    tree.  Deadlines default to the size schedule 3 / 4 / 5 for up to 40 / 80 /
    more targets; values are uniform in (0, 1].  One signal covers every
    target, the computational worst case.
    """

    n_targets: int
    seed: int = 0
    avg_degree: float = 3.0
    deadline: int | None = None


def deadline_for(n_targets: int) -> int:
    if n_targets <= 40:
        return 3
    if n_targets <= 80:
        return 4
    return 5


def generate_instance(params: GeneratorParams) -> tuple[PatrollingSetting, AlarmSystem]:
    """Deterministic instance for a seed: connected graph, all vertices targets."""
    n = params.n_targets
    if n < 1:
        raise ValueError("n_targets must be positive")
    rng = stream(params.seed, "gen", n)
    ids = [f"v{i}" for i in range(n)]

    edges: set[tuple[int, int]] = set()
    for k in range(1, n):
        edges.add((rng.randrange(k), k))
    wanted = min(max(n - 1, math.ceil(params.avg_degree * n / 2)), n * (n - 1) // 2)
    while len(edges) < wanted:
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u == v:
            continue
        edges.add((min(u, v), max(u, v)))

    d = params.deadline if params.deadline is not None else deadline_for(n)
    targets = [(ids[i], 1.0 - rng.random(), d) for i in range(n)]
    setting = build_setting(ids, [(ids[u], ids[v]) for u, v in sorted(edges)], targets)
    alarm = build_alarm(setting, [("s0", {vid: 1.0 for vid in ids})])
    return setting, alarm


def enumerate_placements(
    setting: PatrollingSetting,
    dist: np.ndarray,
    m: int,
    *,
    initial: CoveringPlacement | None = None,
    seed: int = 0,
    perturb_attempts: int = 200,
    systematic_cap: int = 2_000_000,
) -> Iterator[CoveringPlacement]:
    """Yield distinct covering placements of exactly ``m`` positions.

    Sweeps the swap neighborhood (exchange one placed vertex for an unplaced
    one, keeping coverage) breadth-first, restarts from randomly perturbed
    incumbents when it dries up, and finally falls back to a systematic scan
    of the remaining vertex combinations when their number is tractable; only
    then is true exhaustion guaranteed.  Never repeats a placement.
    """
    n = setting.n
    if not 0 < m <= n:
        raise ValueError(f"cannot place {m} distinct resources on {n} vertices")
    bit = {t: i for i, t in enumerate(setting.targets)}
    full = (1 << len(bit)) - 1
    masks = []
    for v in range(n):
        mask = 0
        row = dist[v]
        for t in setting.targets:
            if row[t] <= setting.deadline[t]:
                mask |= 1 << bit[t]
        masks.append(mask)

    def covering(positions: tuple[int, ...]) -> bool:
        got = 0
        for p in positions:
            got |= masks[p]
        return got == full

    if initial is None:
        start = list(min_cover(setting, dist, "greedy+ls").placement.positions)
    else:
        start = list(initial.positions)
    if len(start) > m:
        raise ValueError("initial placement larger than requested size")
    for v in range(n):
        if len(start) == m:
            break
        if v not in start:
            start.append(v)
    first = tuple(sorted(start))
    if not covering(first):
        raise ValueError("no covering placement of the requested size found")

    rng = stream(seed, "enumerate")
    visited: set[tuple[int, ...]] = {first}
    order: list[tuple[int, ...]] = [first]
    queue: list[tuple[int, ...]] = [first]
    yield CoveringPlacement(first)

    sweep = None
    if math.comb(n, m) <= systematic_cap:
        sweep = itertools.combinations(range(n), m)

    while True:
        while queue:
            base = queue.pop(0)
            inside = set(base)
            for p in base:
                for q in range(n):
                    if q in inside:
                        continue
                    cand = tuple(sorted(inside - {p} | {q}))
                    if cand in visited or not covering(cand):
                        continue
                    visited.add(cand)
                    order.append(cand)
                    queue.append(cand)
                    yield CoveringPlacement(cand)

        found = False
        for _ in range(perturb_attempts):
            base = order[rng.randrange(len(order))]
            cand = list(base)
            for _ in range(2):
                out_i = rng.randrange(m)
                repl = rng.randrange(n)
                if repl not in cand:
                    cand[out_i] = repl
            tup = tuple(sorted(set(cand)))
            if len(tup) == m and tup not in visited and covering(tup):
                visited.add(tup)
                order.append(tup)
                queue.append(tup)
                yield CoveringPlacement(tup)
                found = True
                break
        if found:
            continue

        if sweep is not None:
            for combo in sweep:
                if combo not in visited and covering(combo):
                    visited.add(combo)
                    order.append(combo)
                    queue.append(combo)
                    yield CoveringPlacement(combo)
                    found = True
                    break
            else:
                return
        if not found:
            return


@dataclass(frozen=True)
class ResolutionConfig:
    """Run parameters for the full resolution flow."""

    time_budget: float = 3600.0
    oracles: tuple[str, ...] = ("FC", "PC", "NC")
    mincover_method: str = "auto"
    mincover_budget: float | None = None
    beam_width: int = 100_000
    seed: int = 0
    max_placements: int | None = None
    resources_per_position: int = 1
    fc_mode: str = "exact"
    pc_restarts: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.time_budget <= 0:
            raise ValueError("time budget must be positive")
        if not self.oracles:
            raise ValueError("select at least one oracle")
        for s in self.oracles:
            if s.upper() not in ("FC", "PC", "NC"):
                raise ValueError(f"unknown oracle {s!r}")
        object.__setattr__(self, "oracles", tuple(s.upper() for s in self.oracles))
        if self.resources_per_position < 1:
            raise ValueError("resources_per_position must be >= 1")


@dataclass(frozen=True)
class TraceEntry:
    elapsed: float
    seq: int
    placement_index: int
    oracle: str
    value: float


@dataclass(frozen=True)
class PlacementEval:
    positions: tuple[int, ...]
    metrics: OverlapMetrics
    values: dict[str, float]


@dataclass(frozen=True)
class BestEntry:
    placement_index: int
    positions: tuple[int, ...]
    value: float


@dataclass
class ResolutionReport:
    m: int
    mincover: MinCoverResult
    placements: list[PlacementEval] = field(default_factory=list)
    best: dict[str, BestEntry] = field(default_factory=dict)
    trace: list[TraceEntry] = field(default_factory=list)
    placements_evaluated: int = 0
    exhausted: bool = False
    timed_out_oracles: int = 0


def resolve(
    setting: PatrollingSetting, alarm: AlarmSystem, config: ResolutionConfig
) -> ResolutionReport:
    """Run the full anytime flow under a wall-clock budget."""
    t0 = time.monotonic()
    budget = config.time_budget
    dist = all_pairs_distances(setting)

    mc_budget = config.mincover_budget
    if mc_budget is None:
        mc_budget = min(budget / 4.0, 30.0)
    mc = min_cover(setting, dist, config.mincover_method, time_budget=mc_budget)
    if time.monotonic() - t0 >= budget:
        raise BudgetTooSmall("time budget exhausted during the placement step")

    m = len(mc.placement)
    k = config.resources_per_position
    report = ResolutionReport(m=m, mincover=mc)
    route_cache: dict = {}
    deadline = t0 + budget
    seq = 0

    def run_oracle(scheme: str, positions: Sequence[int]) -> SignalResponse:
        return respond(
            setting,
            dist,
            alarm,
            positions,
            scheme,
            route_cache=route_cache,
            beam_width=config.beam_width,
            fc_mode=config.fc_mode,
            pc_restarts=config.pc_restarts,
            seed=config.seed,
            deadline=deadline,
        )

    gen = enumerate_placements(setting, dist, m, initial=mc.placement, seed=config.seed)
    exhausted = True
    for idx, placement in enumerate(gen):
        if time.monotonic() >= deadline or (
            config.max_placements is not None and idx >= config.max_placements
        ):
            exhausted = False
            break
        resources = [p for p in placement.positions for _ in range(k)]
        metrics = overlap_metrics(placement, setting, dist)
        values: dict[str, float] = {}

        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                futures = {
                    scheme: pool.submit(run_oracle, scheme, resources)
                    for scheme in config.oracles
                }
                responses = {s: f.result() for s, f in futures.items()}
        else:
            responses = {}
            for scheme in config.oracles:
                if time.monotonic() >= deadline:
                    exhausted = False
                    break
                responses[scheme] = run_oracle(scheme, resources)

        for scheme in config.oracles:
            resp = responses.get(scheme)
            if resp is None:
                continue
            values[scheme] = resp.value
            report.trace.append(
                TraceEntry(
                    elapsed=time.monotonic() - t0,
                    seq=seq,
                    placement_index=idx,
                    oracle=scheme,
                    value=resp.value,
                )
            )
            seq += 1
            for res in resp.per_signal.values():
                if res.diagnostics.timed_out:
                    report.timed_out_oracles += 1
            cur = report.best.get(scheme)
            if cur is None or resp.value > cur.value:
                report.best[scheme] = BestEntry(
                    placement_index=idx,
                    positions=placement.positions,
                    value=resp.value,
                )
        report.placements.append(
            PlacementEval(positions=placement.positions, metrics=metrics, values=values)
        )
        report.placements_evaluated += 1
        if len(values) < len(config.oracles):
            exhausted = False
            break
    report.exhausted = exhausted
    return report
