"""Covering routes: what one resource can still protect after a signal.

A covering route visits targets of the active signal's support, each by its
deadline, starting from the resource's placement vertex.  Only the set of
visited targets matters to the response games, so route generation keeps one
best representative (minimal completion time) per maximal covered set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .model import PatrollingSetting


@dataclass(frozen=True)
class CoveringRoute:
    """Ordered target visits with arrival times respecting deadlines.

    Empty ``visits`` encodes staying at the start vertex and protecting
    nothing; it is kept in every route set so a resource always has at least
    one action.
    """

    start: int
    visits: tuple[int, ...]
    arrivals: tuple[int, ...]
    covered: frozenset[int] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "covered", frozenset(self.visits))


@dataclass(frozen=True)
class JointRoute:
    """One covering route per resource, index-aligned with the placement."""

    routes: tuple[CoveringRoute, ...]
    covered: frozenset[int] = field(init=False)

    def __post_init__(self) -> None:
        cov: set[int] = set()
        for r in self.routes:
            cov |= r.covered
        object.__setattr__(self, "covered", frozenset(cov))


@dataclass(frozen=True)
class RouteSet:
    """Routes available to one resource under one signal.

    ``complete`` is False when the beam-limited search had to drop states and
    the set may be missing maximal routes.
    """

    routes: tuple[CoveringRoute, ...]
    start: int
    complete: bool


def covers(route: CoveringRoute, t: int) -> bool:
    return t in route.covered


def joint_covers(jr: JointRoute, t: int) -> bool:
    return t in jr.covered


def covering_routes(
    setting: PatrollingSetting,
    dist: np.ndarray,
    start: int,
    support: Iterable[int],
    *,
    beam_width: int = 100_000,
    exact_limit: int = 20,
) -> RouteSet:
    """All maximal non-dominated covering routes from ``start``.

    Dynamic program over (covered set, last target) states keeping the minimal
    completion time per state; a state expands to any unvisited support target
    reachable by its deadline.  Arrival times include the initial leg from the
    start vertex, otherwise a "covered" target could be unreachable by its
    deadline.  Routes whose covered set is contained in another's are dropped;
    the stay-at-start route is always present in addition (as the singleton
    visit when the start is itself a support target).

    When more than ``exact_limit`` support targets are reachable the per-level
    state set is truncated to ``beam_width`` entries and the result is flagged
    incomplete if anything was actually dropped.
    """
    D = dist.tolist()
    dl = setting.deadline
    support_set = set(support)
    d_start = D[start]
    reach = sorted(t for t in support_set if d_start[t] <= dl[t])
    k = len(reach)

    if start in support_set:
        sentinel = CoveringRoute(start, (start,), (0,))
    else:
        sentinel = CoveringRoute(start, (), ())
    if k == 0:
        return RouteSet(routes=(sentinel,), start=start, complete=True)

    d_rows = [D[t] for t in reach]
    dl_local = [dl[t] for t in reach]

    # state (mask over reach, last local index) -> (completion time, parent state)
    best: dict[tuple[int, int], tuple[int, tuple[int, int] | None]] = {}
    level: dict[tuple[int, int], tuple[int, tuple[int, int] | None]] = {}
    for j, t in enumerate(reach):
        level[(1 << j, j)] = (int(d_start[t]), None)
    complete = True
    while level:
        best.update(level)
        nxt: dict[tuple[int, int], tuple[int, tuple[int, int] | None]] = {}
        for key in sorted(level):
            mask, last = key
            tm = level[key][0]
            row = d_rows[last]
            for j in range(k):
                if mask >> j & 1:
                    continue
                nt = tm + row[reach[j]]
                if nt > dl_local[j]:
                    continue
                nk = (mask | (1 << j), j)
                cur = nxt.get(nk)
                if cur is None or nt < cur[0]:
                    nxt[nk] = (nt, key)
        if k > exact_limit and len(nxt) > beam_width:
            keep = sorted(nxt.items(), key=lambda kv: (kv[1][0], kv[0]))[:beam_width]
            nxt = dict(keep)
            complete = False
        level = nxt

    # Best representative per covered set, then keep only maximal sets.
    per_mask: dict[int, tuple[int, int]] = {}
    for (mask, last), (tm, _) in best.items():
        cur = per_mask.get(mask)
        if cur is None or (tm, last) < cur:
            per_mask[mask] = (tm, last)
    maximal: list[int] = []
    for mask in sorted(per_mask, key=lambda m: (-m.bit_count(), m)):
        if not any(mask & m == mask for m in maximal):
            maximal.append(mask)

    routes = []
    for mask in sorted(maximal):
        _, last = per_mask[mask]
        chain: list[int] = []
        key: tuple[int, int] | None = (mask, last)
        while key is not None:
            chain.append(key[1])
            key = best[key][1]
        chain.reverse()
        visits = tuple(reach[j] for j in chain)
        arrivals = [int(d_start[visits[0]])]
        for a, b in zip(visits, visits[1:]):
            arrivals.append(arrivals[-1] + int(D[a][b]))
        routes.append(CoveringRoute(start, visits, tuple(arrivals)))
    routes.sort(key=lambda r: r.visits)

    out = [sentinel] + [r for r in routes if r.visits != sentinel.visits]
    return RouteSet(routes=tuple(out), start=start, complete=complete)
