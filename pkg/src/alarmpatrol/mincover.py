"""Minimum covering placements.

The general problem maps directly onto SET-COVER: the targets are the
universe and every vertex contributes its coverage set.  This module provides
the greedy approximation with a local-search cleanup, an exact depth-first
branch-and-bound, the linear-time-ish dynamic program for trees (with a
cycle reduction on top of it), and the overlap indicators used to profile a
placement.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import PatrollingSetting, coverage_set

INF = math.inf


class Infeasible(ValueError):
    """The candidate sets cannot cover the universe."""


class NotATree(ValueError):
    pass


class NotACycle(ValueError):
    pass


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe of targets plus one candidate set per useful vertex."""

    universe: frozenset[int]
    sets: dict[int, frozenset[int]]


@dataclass(frozen=True)
class CoveringPlacement:
    """Distinct vertices placing every target within its deadline of a resource."""

    positions: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("placement positions must be distinct")
        object.__setattr__(self, "positions", tuple(sorted(self.positions)))

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class CoverageProfile:
    """Subtree summary used by the tree recursion.

    Either the subtree is covered and ``cov`` is the distance from the parent
    to the closest resource inside it, or it still needs a resource within
    ``uncov`` of the parent.  Both fields infinite encodes a subtree with no
    targets and no resources (only possible with non-target vertices).
    """

    cov: float
    uncov: float


@dataclass(frozen=True)
class MinCoverResult:
    placement: CoveringPlacement
    optimal: bool
    method: str


def to_set_cover(setting: PatrollingSetting, dist: np.ndarray) -> SetCoverInstance:
    """SET-COVER instance whose candidate sets are the vertex coverage sets."""
    sets: dict[int, frozenset[int]] = {}
    for v in range(setting.n):
        cov = coverage_set(setting, dist, v)
        if cov:
            sets[v] = frozenset(cov)
    return SetCoverInstance(universe=frozenset(setting.targets), sets=sets)


def is_covering(
    positions: Sequence[int], setting: PatrollingSetting, dist: np.ndarray
) -> bool:
    """Definition check: every target within deadline of some position."""
    pos = list(positions)
    return all(
        any(dist[p][t] <= setting.deadline[t] for p in pos) for t in setting.targets
    )


def _bits(instance: SetCoverInstance) -> tuple[dict[int, int], dict[int, int], int]:
    """Bitmask encoding of the instance: element bit map, per-vertex masks, universe."""
    bit = {t: i for i, t in enumerate(sorted(instance.universe))}
    masks = {}
    for v in sorted(instance.sets):
        m = 0
        for t in instance.sets[v]:
            if t in bit:
                m |= 1 << bit[t]
        masks[v] = m
    full = (1 << len(bit)) - 1
    return bit, masks, full


def greedy_cover(instance: SetCoverInstance) -> CoveringPlacement:
    """Chvatal's rule: repeatedly take the set covering most uncovered targets.

    Ties break on the lowest vertex index for reproducibility.  The result is
    within H(|universe|) of the optimum.
    """
    _, masks, full = _bits(instance)
    order = sorted(masks)
    chosen: list[int] = []
    uncovered = full
    while uncovered:
        best_v, best_gain = -1, 0
        for v in order:
            gain = (masks[v] & uncovered).bit_count()
            if gain > best_gain:
                best_v, best_gain = v, gain
        if best_v < 0:
            raise Infeasible("candidate sets do not cover the universe")
        chosen.append(best_v)
        uncovered &= ~masks[best_v]
    return CoveringPlacement(tuple(chosen))


def local_search_improve(
    placement: CoveringPlacement, instance: SetCoverInstance
) -> CoveringPlacement:
    """Shrink a covering placement to a fixed point of two moves.

    Move (a) drops a position whose targets are all covered by the others;
    move (b) replaces a pair of positions by a single vertex whose coverage
    set contains everything only that pair was contributing.
    """
    _, masks, full = _bits(instance)
    pos = sorted(set(placement.positions))
    candidates = sorted(masks)

    def mask_of(v: int) -> int:
        return masks.get(v, 0)

    changed = True
    while changed:
        changed = False
        for p in list(pos):
            rest = 0
            for q in pos:
                if q != p:
                    rest |= mask_of(q)
            if rest & full == full:
                pos.remove(p)
                changed = True
                break
        if changed:
            continue
        done = False
        for i in range(len(pos)):
            for j in range(i + 1, len(pos)):
                p, q = pos[i], pos[j]
                others = 0
                for r in pos:
                    if r != p and r != q:
                        others |= mask_of(r)
                exclusive = full & ~others
                for v in candidates:
                    if v in pos and v != p and v != q:
                        continue
                    if masks[v] & exclusive == exclusive:
                        pos = sorted(set(pos) - {p, q} | {v})
                        changed = True
                        done = True
                        break
                if done:
                    break
            if done:
                break
    return CoveringPlacement(tuple(pos))


def exact_cover(
    instance: SetCoverInstance, time_budget: float | None = None
) -> MinCoverResult:
    """Minimum-cardinality cover by depth-first branch and bound.

    Branches include/exclude the vertex with the highest marginal coverage
    (lowest index on ties), starts from the greedy + local-search incumbent,
    and prunes with the counting bound ceil(uncovered / best set size).  The
    search is deterministic; on budget expiry the incumbent is returned with
    ``optimal=False``.
    """
    _, masks, full = _bits(instance)
    incumbent = local_search_improve(greedy_cover(instance), instance)
    best = list(incumbent.positions)
    best_size = len(best)
    deadline = None if time_budget is None else time.monotonic() + float(time_budget)
    nodes = 0
    timed_out = deadline is not None and time.monotonic() > deadline

    def search(chosen: list[int], uncovered: int, candidates: list[int]) -> None:
        nonlocal best, best_size, nodes, timed_out
        if timed_out:
            return
        nodes += 1
        if deadline is not None and nodes % 512 == 0 and time.monotonic() > deadline:
            timed_out = True
            return
        if not uncovered:
            if len(chosen) < best_size:
                best = list(chosen)
                best_size = len(chosen)
            return
        if len(chosen) + 1 >= best_size:
            return
        best_v, best_gain, union = -1, 0, 0
        for v in candidates:
            gain = (masks[v] & uncovered).bit_count()
            union |= masks[v]
            if gain > best_gain:
                best_v, best_gain = v, gain
        if union & uncovered != uncovered:
            return
        if len(chosen) + math.ceil(uncovered.bit_count() / best_gain) >= best_size:
            return
        rest = [v for v in candidates if v != best_v]
        chosen.append(best_v)
        search(chosen, uncovered & ~masks[best_v], rest)
        chosen.pop()
        search(chosen, uncovered, rest)

    search([], full, sorted(masks))
    return MinCoverResult(
        placement=CoveringPlacement(tuple(best)),
        optimal=not timed_out,
        method="exact",
    )


def _tree_cover(
    adj: Sequence[Sequence[int]], root: int, dl: Sequence[float]
) -> list[int]:
    """Bottom-up coverage-profile recursion over a tree.

    ``dl[v]`` is the deadline for target vertices and infinity otherwise.
    Returns the placed vertices; the caller owns validation.  Profiles are
    relative to each vertex's parent: a covered subtree reports the distance
    to its closest resource, an uncovered one reports how close to the parent
    a resource must be placed.  When the root itself still reports a finite
    demand there is no parent left to absorb it, so a resource goes on the
    root.
    """
    n = len(adj)
    parent = [-2] * n
    order = [root]
    parent[root] = -1
    for u in order:
        for v in adj[u]:
            if parent[v] == -2:
                parent[v] = u
                order.append(v)

    cov = [INF] * n
    unc = [INF] * n
    placed: list[int] = []
    for v in reversed(order):
        min_cov = INF
        min_unc = INF
        for u in adj[v]:
            if parent[u] == v:
                min_cov = min(min_cov, cov[u])
                min_unc = min(min_unc, unc[u])
        bound = min(min_unc, dl[v])
        if bound >= min_cov:
            cov[v], unc[v] = min_cov + 1, INF
        elif bound - 1 >= 0:
            cov[v], unc[v] = INF, bound - 1
        else:
            placed.append(v)
            cov[v], unc[v] = 1, INF
    if unc[root] != INF:
        placed.append(root)
    return placed


def _deadline_vector(setting: PatrollingSetting) -> list[float]:
    return [setting.deadline.get(v, INF) for v in range(setting.n)]


def tree_min_cover(setting: PatrollingSetting, root: int = 0) -> CoveringPlacement:
    """Minimum covering placement on a tree; the size is root-independent."""
    if len(setting.edges) != setting.n - 1:
        raise NotATree("graph is not a tree")
    placed = _tree_cover(setting.adj, root, _deadline_vector(setting))
    return CoveringPlacement(tuple(placed))


def cycle_min_cover(setting: PatrollingSetting) -> CoveringPlacement:
    """Minimum covering placement on a simple cycle.

    Deleting any edge yields a path whose distances dominate the cycle's, so
    each of the n path solutions stays feasible on the cycle; the smallest one
    over all deletions is optimal.
    """
    n = setting.n
    if n < 3 or len(setting.edges) != n or any(len(a) != 2 for a in setting.adj):
        raise NotACycle("graph is not a simple cycle")
    dl = _deadline_vector(setting)
    best: list[int] | None = None
    for u, v in setting.edges:
        adj = [tuple(x for x in setting.adj[w] if not {w, x} == {u, v}) for w in range(n)]
        placed = _tree_cover(adj, u, dl)
        if best is None or len(placed) < len(best):
            best = placed
    assert best is not None
    return CoveringPlacement(tuple(best))


def _is_tree(setting: PatrollingSetting) -> bool:
    return len(setting.edges) == setting.n - 1


def _is_cycle(setting: PatrollingSetting) -> bool:
    return (
        setting.n >= 3
        and len(setting.edges) == setting.n
        and all(len(a) == 2 for a in setting.adj)
    )


def min_cover(
    setting: PatrollingSetting,
    dist: np.ndarray,
    method: str = "auto",
    time_budget: float | None = None,
) -> MinCoverResult:
    """Dispatch over the covering-placement methods.

    ``auto`` uses the polynomial algorithms when the topology allows and falls
    back to the exact branch-and-bound under the time budget (whose timeout
    incumbent is already at least as good as greedy + local search).
    """
    if method == "auto":
        if _is_tree(setting):
            return MinCoverResult(tree_min_cover(setting), True, "tree")
        if _is_cycle(setting):
            return MinCoverResult(cycle_min_cover(setting), True, "cycle")
        return exact_cover(to_set_cover(setting, dist), time_budget)
    if method == "tree":
        return MinCoverResult(tree_min_cover(setting), True, "tree")
    if method == "cycle":
        return MinCoverResult(cycle_min_cover(setting), True, "cycle")
    if method == "exact":
        return exact_cover(to_set_cover(setting, dist), time_budget)
    if method == "greedy":
        return MinCoverResult(greedy_cover(to_set_cover(setting, dist)), False, "greedy")
    if method == "greedy+ls":
        instance = to_set_cover(setting, dist)
        return MinCoverResult(
            local_search_improve(greedy_cover(instance), instance), False, "greedy+ls"
        )
    raise ValueError(f"unknown mincover method {method!r}")


@dataclass(frozen=True)
class OverlapMetrics:
    """Extra-covering count and its per-target / normalized forms."""

    eta: int
    tau: float
    tau_hat: float


def overlap_metrics(
    placement: CoveringPlacement, setting: PatrollingSetting, dist: np.ndarray
) -> OverlapMetrics:
    """Count coverings beyond one per target for a placement.

    eta sums |coverage_set(p)| over positions minus |T|; tau divides by |T|;
    tau_hat normalizes by (|T|-m)(m-1) and is 0 by convention when m <= 1 or
    m = |T| (degenerate denominator).
    """
    n_targets = len(setting.targets)
    m = len(placement)
    eta = sum(len(coverage_set(setting, dist, p)) for p in placement.positions) - n_targets
    tau = eta / n_targets if n_targets else 0.0
    if m <= 1 or n_targets == m:
        tau_hat = 0.0
    else:
        tau_hat = eta / ((n_targets - m) * (m - 1))
    return OverlapMetrics(eta=eta, tau=tau, tau_hat=tau_hat)
