"""Signal response oracles under full, partial and no coordination.

Given a covering placement and per-resource covering-route sets for one
signal, each oracle returns signal-response strategies and the defender's
expected utility:

* NC: every resource solves its own zero-sum game on the targets it can
  reach; the attacker then best-responds to the product distribution.
* PC: team maxmin approximated by alternating best responses, one LP per
  resource per round, updating the resource with the largest improvement;
  the value is monotone non-decreasing and the scheme supports random
  restarts.
* FC: exact maxmin over joint routes via row generation, alternating a
  constant-sum game LP with a best-response search (branch and bound, or an
  LP relaxation with sampling in heuristic mode).

Multiple signals are handled by solving one independent response game per
signal and aggregating with the attacker committing to a target before the
signal realizes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .games import MatrixGame, MixedStrategy, solve_zero_sum
from .lp import LinearProgram, lp_solve
from .model import AlarmSystem, PatrollingSetting
from .routes import CoveringRoute, JointRoute, RouteSet, covering_routes
from .seeding import stream

CONVERGENCE_EPS = 1e-7


@dataclass
class OracleDiagnostics:
    iterations: int = 0
    routes_generated: int = 0
    wall_time: float = 0.0
    optimal: bool = True
    timed_out: bool = False
    trace: tuple[float, ...] = ()
    extra: dict = field(default_factory=dict)


@dataclass
class OracleResult:
    """Strategies plus defender value for one signal under one scheme."""

    scheme: str
    value: float
    diagnostics: OracleDiagnostics
    per_resource: tuple[MixedStrategy, ...] | None = None
    joint: MixedStrategy | None = None


def _payoff_matrix(
    covered: Sequence[frozenset[int]], targets: Sequence[int], value: Mapping[int, float]
) -> np.ndarray:
    """Defender utility 1 - (1 - I(r,t)) * pi(t) for each action/target pair."""
    U = np.ones((len(covered), len(targets)))
    for i, cov in enumerate(covered):
        for j, t in enumerate(targets):
            if t not in cov:
                U[i, j] -= value[t]
    return U


def _marginal_coverage(strategy: MixedStrategy, t: int) -> float:
    return sum(p for r, p in strategy.probs.items() if t in r.covered)


def evaluate_profile(
    strategies: MixedStrategy | Sequence[MixedStrategy],
    setting: PatrollingSetting,
    support: Iterable[int],
) -> float:
    """Defender value when the attacker observes the strategies and best-responds.

    Accepts either one joint strategy over ``JointRoute`` actions or a
    sequence of independent per-resource strategies over ``CoveringRoute``.
    """
    targets = sorted(support)
    if not targets:
        return 1.0
    worst = 0.0
    if isinstance(strategies, MixedStrategy):
        for t in targets:
            uncov = 1.0 - _marginal_coverage(strategies, t)
            worst = max(worst, setting.value[t] * uncov)
    else:
        for t in targets:
            uncov = 1.0
            for sigma in strategies:
                uncov *= 1.0 - _marginal_coverage(sigma, t)
            worst = max(worst, setting.value[t] * uncov)
    return 1.0 - worst


def nc_sro(
    route_sets: Sequence[RouteSet],
    setting: PatrollingSetting,
    dist: np.ndarray,
    support: Sequence[int],
) -> OracleResult:
    """Independent resources: one restricted zero-sum game per resource.

    Resource i plays its maxmin on the targets it can reach by their
    deadlines; the overall value prices the attacker's best response to the
    product of the resulting marginals.
    """
    t0 = time.perf_counter()
    strategies: list[MixedStrategy] = []
    for rs in route_sets:
        restricted = [t for t in support if dist[rs.start][t] <= setting.deadline[t]]
        if not restricted:
            strategies.append(MixedStrategy.pure(rs.routes[0]))
            continue
        game = MatrixGame(
            _payoff_matrix([r.covered for r in rs.routes], restricted, setting.value),
            row_actions=tuple(rs.routes),
            col_actions=tuple(restricted),
        )
        row, _, _ = solve_zero_sum(game)
        strategies.append(row)
    value = evaluate_profile(strategies, setting, support)
    diag = OracleDiagnostics(
        iterations=len(route_sets),
        routes_generated=sum(len(rs.routes) for rs in route_sets),
        wall_time=time.perf_counter() - t0,
    )
    return OracleResult("NC", value, diag, per_resource=tuple(strategies))


def _weight_bits(w: Sequence[float], mask: int) -> float:
    total = 0.0
    while mask:
        low = mask & -mask
        total += w[low.bit_length() - 1]
        mask ^= low
    return total


def best_response_ilp(
    route_sets: Sequence[RouteSet],
    attacker: MixedStrategy,
    setting: PatrollingSetting,
    mode: str = "exact",
    *,
    deadline: float | None = None,
    rng=None,
) -> tuple[JointRoute, float, bool]:
    """Joint route maximizing 1 - sum_t sigma(t) pi(t) (1 - y_t).

    Exact mode runs a depth-first branch and bound over per-resource route
    choices with a greedy incumbent and suffix-union upper bounds; the
    subproblem is NP-hard in general so it honors ``deadline`` and may return
    a non-optimal incumbent (flagged False).  Heuristic mode solves the LP
    relaxation and samples one route per resource from the fractional
    solution.
    """
    targets = sorted(t for t in attacker.probs if attacker.probs[t] > 0.0)
    w = [attacker.prob(t) * setting.value[t] for t in targets]
    total_w = sum(w)
    bit = {t: i for i, t in enumerate(targets)}

    if mode == "heuristic":
        if rng is None:
            rng = stream(0, "best-response")
        xs, _, objective = _relaxed_best_response(route_sets, targets, w)
        choice = [_sample_index(x, rng) for x in xs]
        jr = JointRoute(tuple(rs.routes[c] for rs, c in zip(route_sets, choice)))
        return jr, objective, False
    if mode != "exact":
        raise ValueError(f"unknown best-response mode {mode!r}")

    masks: list[list[int]] = []
    orders: list[list[int]] = []
    for rs in route_sets:
        ms = []
        for r in rs.routes:
            m = 0
            for t in r.covered:
                if t in bit:
                    m |= 1 << bit[t]
            ms.append(m)
        masks.append(ms)
        orders.append(
            sorted(range(len(ms)), key=lambda i: (-_weight_bits(w, ms[i]), i))
        )
    n_res = len(route_sets)
    suffix = [0] * (n_res + 1)
    for i in range(n_res - 1, -1, -1):
        union = 0
        for m in masks[i]:
            union |= m
        suffix[i] = suffix[i + 1] | union

    # Greedy incumbent: each resource takes the best marginal route in turn.
    choice = []
    cur = 0
    for i in range(n_res):
        best_j = min(
            orders[i], key=lambda j: (-_weight_bits(w, masks[i][j] & ~cur), j)
        )
        choice.append(best_j)
        cur |= masks[i][best_j]
    best_choice = list(choice)
    best_w = _weight_bits(w, cur)

    nodes = 0
    timed_out = False

    def search(i: int, cur_mask: int, cur_w: float, picked: list[int]) -> None:
        nonlocal best_choice, best_w, nodes, timed_out
        if timed_out:
            return
        nodes += 1
        if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
            timed_out = True
            return
        if i == n_res:
            if cur_w > best_w + 1e-12:
                best_w = cur_w
                best_choice = list(picked)
            return
        if cur_w + _weight_bits(w, suffix[i] & ~cur_mask) <= best_w + 1e-12:
            return
        for j in orders[i]:
            picked.append(j)
            gain = _weight_bits(w, masks[i][j] & ~cur_mask)
            search(i + 1, cur_mask | masks[i][j], cur_w + gain, picked)
            picked.pop()

    search(0, 0, 0.0, [])
    jr = JointRoute(tuple(rs.routes[c] for rs, c in zip(route_sets, best_choice)))
    objective = 1.0 - total_w + best_w
    return jr, objective, not timed_out


def _relaxed_best_response(
    route_sets: Sequence[RouteSet], targets: Sequence[int], w: Sequence[float]
) -> tuple[list[np.ndarray], np.ndarray, float]:
    """LP relaxation of the best-response program (x in [0,1]).

    Relaxing the protection indicators y is always valid; this additionally
    relaxes the route-selection variables and returns them per resource along
    with the relaxed objective.
    """
    sizes = [len(rs.routes) for rs in route_sets]
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    n_x = int(offsets[-1])
    n_t = len(targets)
    n_vars = n_x + n_t

    c = np.zeros(n_vars)
    c[n_x:] = w

    rows_ub = []
    b_ub = []
    for j, t in enumerate(targets):
        row = np.zeros(n_vars)
        for i, rs in enumerate(route_sets):
            for k, r in enumerate(rs.routes):
                if t in r.covered:
                    row[offsets[i] + k] = -1.0
        row[n_x + j] = 1.0
        rows_ub.append(row)
        b_ub.append(0.0)
    for j in range(n_t):
        row = np.zeros(n_vars)
        row[n_x + j] = 1.0
        rows_ub.append(row)
        b_ub.append(1.0)

    rows_eq = []
    for i in range(len(route_sets)):
        row = np.zeros(n_vars)
        row[offsets[i] : offsets[i + 1]] = 1.0
        rows_eq.append(row)

    sol = lp_solve(
        LinearProgram(
            c=c,
            A_ub=np.array(rows_ub),
            b_ub=np.array(b_ub),
            A_eq=np.array(rows_eq),
            b_eq=np.ones(len(rows_eq)),
        )
    )
    if sol.status != "optimal":
        raise ArithmeticError(f"best-response relaxation status {sol.status}")
    xs = [sol.x[offsets[i] : offsets[i + 1]] for i in range(len(route_sets))]
    y = sol.x[n_x:]
    objective = 1.0 - float(sum(w)) + float(sol.objective)
    return xs, y, objective


def _sample_index(probs: np.ndarray, rng) -> int:
    total = float(probs.sum())
    u = rng.random() * total
    acc = 0.0
    for i, p in enumerate(probs):
        acc += float(p)
        if u <= acc:
            return i
    return len(probs) - 1


def fc_sro(
    route_sets: Sequence[RouteSet],
    setting: PatrollingSetting,
    dist: np.ndarray,
    support: Sequence[int],
    *,
    mode: str = "exact",
    initial: Sequence[JointRoute] | None = None,
    seed: int = 0,
    deadline: float | None = None,
    heuristic_cap: int = 100,
) -> OracleResult:
    """Full coordination: maxmin over joint covering routes by row generation.

    Starting from an initial joint route (by default the most likely route of
    each resource's NC strategy), alternately solves the constant-sum game
    restricted to the current joint-route set and a best response against the
    attacker's minmax strategy; stops when the best response is already a row.
    In exact mode the converged value is the exact FC maxmin over the full
    joint space.  Heuristic mode replaces the exact best response with the LP
    relaxation plus sampling and stops once the relaxed response is pure and
    inside the current equilibrium support (or after ``heuristic_cap``
    rounds, since sampling can cycle).
    """
    t0 = time.perf_counter()
    if mode not in ("exact", "heuristic"):
        raise ValueError(f"unknown FC mode {mode!r}")
    targets = sorted(support)
    if not targets:
        # Signal with empty support: nothing to protect, nothing to attack.
        jr = JointRoute(tuple(rs.routes[0] for rs in route_sets))
        diag = OracleDiagnostics(
            routes_generated=1, wall_time=time.perf_counter() - t0
        )
        return OracleResult("FC", 1.0, diag, joint=MixedStrategy.pure(jr))

    if initial:
        rows: list[JointRoute] = []
        for jr in initial:
            if jr not in rows:
                rows.append(jr)
    else:
        nc = nc_sro(route_sets, setting, dist, support)
        picks = []
        for rs, sigma in zip(route_sets, nc.per_resource):
            picks.append(
                max(rs.routes, key=lambda r: (sigma.prob(r), -rs.routes.index(r)))
            )
        rows = [JointRoute(tuple(picks))]
    row_set = set(rows)

    rng = stream(seed, "fc-heuristic")
    trace: list[float] = []
    log: list[dict] = []
    optimal = False
    timed_out = False
    iterations = 0
    row_strategy: MixedStrategy | None = None
    value = 0.0

    while True:
        iterations += 1
        game = MatrixGame(
            _payoff_matrix([jr.covered for jr in rows], targets, setting.value),
            row_actions=tuple(rows),
            col_actions=tuple(targets),
        )
        row_strategy, attacker, value = solve_zero_sum(game)
        trace.append(value)
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break

        if mode == "exact":
            br, _, ok = best_response_ilp(
                route_sets, attacker, setting, "exact", deadline=deadline
            )
            if not ok:
                timed_out = True
                break
            if br in row_set:
                optimal = True
                break
            rows.append(br)
            row_set.add(br)
        else:
            w = [attacker.prob(t) * setting.value[t] for t in targets]
            xs, _, frac_obj = _relaxed_best_response(route_sets, targets, w)
            integral = all(
                np.all((x < 1e-7) | (x > 1.0 - 1e-7)) for x in xs
            )
            sampled = [_sample_index(x, rng) for x in xs]
            jr = JointRoute(
                tuple(rs.routes[c] for rs, c in zip(route_sets, sampled))
            )
            log.append(
                {
                    "fractional_objective": frac_obj,
                    "integral": integral,
                    "sampled_in_rows": jr in row_set,
                }
            )
            if integral:
                pure = JointRoute(
                    tuple(
                        rs.routes[int(np.argmax(x))]
                        for rs, x in zip(route_sets, xs)
                    )
                )
                if row_strategy.prob(pure) > 0.0:
                    break
                jr = pure
            if jr not in row_set:
                rows.append(jr)
                row_set.add(jr)
            if iterations >= heuristic_cap:
                break

    diag = OracleDiagnostics(
        iterations=iterations,
        routes_generated=len(rows),
        wall_time=time.perf_counter() - t0,
        optimal=optimal,
        timed_out=timed_out,
        trace=tuple(trace),
        extra={"heuristic_log": log} if log else {},
    )
    return OracleResult("FC", value, diag, joint=row_strategy)


def _random_simplex(size: int, rng) -> np.ndarray:
    draws = np.array([rng.expovariate(1.0) for _ in range(size)])
    return draws / draws.sum()


def pc_sro(
    route_sets: Sequence[RouteSet],
    setting: PatrollingSetting,
    dist: np.ndarray,
    support: Sequence[int],
    *,
    restarts: int = 0,
    initial: Sequence[MixedStrategy] | None = None,
    seed: int = 0,
    max_iterations: int = 200,
    eps: float = CONVERGENCE_EPS,
) -> OracleResult:
    """Partial coordination (team maxmin) by iterated per-resource LPs.

    Fixing all strategies but one makes the team program linear in the free
    resource; each round solves those m LPs and commits the resource with the
    largest improvement, which makes the value trace non-strictly monotone.
    Starts from the NC solution by default and optionally repeats from random
    strategy profiles, keeping the best run.
    """
    t0 = time.perf_counter()
    targets = sorted(support)
    m = len(route_sets)
    pi = np.array([setting.value[t] for t in targets])
    indicators = []
    for rs in route_sets:
        I = np.zeros((len(rs.routes), len(targets)))
        for i, r in enumerate(rs.routes):
            for j, t in enumerate(targets):
                if t in r.covered:
                    I[i, j] = 1.0
        indicators.append(I)

    def value_of(profile: list[np.ndarray]) -> float:
        if not targets:
            return 1.0
        uncov = np.ones(len(targets))
        for I, x in zip(indicators, profile):
            uncov *= np.clip(1.0 - I.T @ x, 0.0, 1.0)
        return 1.0 - float(np.max(pi * uncov))

    def response_lp(i: int, weights: np.ndarray) -> tuple[np.ndarray, float]:
        # minimize v  s.t.  v >= w_t (1 - sum_r I[r,t] x_r), sum x = 1
        n_r = indicators[i].shape[0]
        c = np.zeros(n_r + 1)
        c[-1] = -1.0
        A_ub = np.hstack(
            [-indicators[i].T * weights[:, None], -np.ones((len(targets), 1))]
        )
        b_ub = -weights
        A_eq = np.hstack([np.ones((1, n_r)), np.zeros((1, 1))])
        sol = lp_solve(
            LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=np.ones(1))
        )
        if sol.status != "optimal":
            raise ArithmeticError(f"team response LP status {sol.status}")
        return sol.x[:n_r], float(sol.x[-1])

    def run(profile: list[np.ndarray]) -> tuple[list[np.ndarray], float, list[float], bool]:
        val = value_of(profile)
        hist = [val]
        converged = False
        for _ in range(max_iterations):
            if not targets:
                converged = True
                break
            best_i, best_val, best_x = -1, val, None
            for i in range(m):
                uncov_others = np.ones(len(targets))
                for j in range(m):
                    if j != i:
                        uncov_others *= np.clip(
                            1.0 - indicators[j].T @ profile[j], 0.0, 1.0
                        )
                weights = pi * uncov_others
                x_new, v = response_lp(i, weights)
                cand = 1.0 - v
                if cand > best_val + eps:
                    best_i, best_val, best_x = i, cand, x_new
            if best_i < 0:
                converged = True
                break
            profile[best_i] = best_x
            val = value_of(profile)
            hist.append(val)
        return profile, val, hist, converged

    if initial is not None:
        start = [
            np.array([sigma.prob(r) for r in rs.routes])
            for rs, sigma in zip(route_sets, initial)
        ]
    else:
        nc = nc_sro(route_sets, setting, dist, support)
        start = [
            np.array([sigma.prob(r) for r in rs.routes])
            for rs, sigma in zip(route_sets, nc.per_resource)
        ]

    profiles = [start] + [
        [_random_simplex(len(rs.routes), stream(seed, "pc-restart", k, i)) for i, rs in enumerate(route_sets)]
        for k in range(restarts)
    ]
    best_profile, best_val, best_hist = None, -1.0, []
    traces: list[tuple[float, ...]] = []
    all_converged = True
    for prof in profiles:
        final, val, hist, converged = run([x.copy() for x in prof])
        traces.append(tuple(hist))
        all_converged &= converged
        if val > best_val:
            best_profile, best_val, best_hist = final, val, hist

    strategies = tuple(
        MixedStrategy.from_weights(rs.routes, x)
        for rs, x in zip(route_sets, best_profile)
    )
    diag = OracleDiagnostics(
        iterations=len(best_hist) - 1,
        routes_generated=sum(len(rs.routes) for rs in route_sets),
        wall_time=time.perf_counter() - t0,
        optimal=all_converged,
        trace=tuple(best_hist),
        extra={"traces": traces},
    )
    return OracleResult("PC", best_val, diag, per_resource=strategies)


@dataclass
class SignalResponse:
    """Per-signal oracle results plus the aggregate value over the alarm system."""

    scheme: str
    value: float
    per_signal: dict[str, OracleResult]
    route_sets: dict[str, tuple[RouteSet, ...]]


def uncovered_probability(result: OracleResult, t: int) -> float:
    """Probability that target ``t`` stays unprotected under an oracle's strategies."""
    if result.joint is not None:
        return 1.0 - sum(
            p for jr, p in result.joint.probs.items() if t in jr.covered
        )
    uncov = 1.0
    for sigma in result.per_resource:
        uncov *= 1.0 - _marginal_coverage(sigma, t)
    return uncov


def aggregate_value(
    setting: PatrollingSetting,
    alarm: AlarmSystem,
    per_signal: Mapping[str, OracleResult],
) -> float:
    """Attacker picks the target before the signal realizes; signals stay exogenous."""
    worst = 0.0
    for t in setting.targets:
        u = sum(
            alarm.prob[s][t] * uncovered_probability(per_signal[s], t)
            for s in alarm.target_support(t)
        )
        worst = max(worst, setting.value[t] * u)
    return 1.0 - worst


def respond(
    setting: PatrollingSetting,
    dist: np.ndarray,
    alarm: AlarmSystem,
    positions: Sequence[int],
    scheme: str,
    *,
    route_cache: dict | None = None,
    beam_width: int = 100_000,
    fc_mode: str = "exact",
    pc_restarts: int = 0,
    seed: int = 0,
    deadline: float | None = None,
) -> SignalResponse:
    """Solve one response game per signal for a placement and aggregate.

    ``positions`` lists one start vertex per resource; repeats are allowed so
    several patrollers can share a guard post (they then share the post's
    route set).
    """
    scheme = scheme.upper()
    if scheme not in ("FC", "PC", "NC"):
        raise ValueError(f"unknown coordination scheme {scheme!r}")
    cache = route_cache if route_cache is not None else {}
    per_signal: dict[str, OracleResult] = {}
    rsets: dict[str, tuple[RouteSet, ...]] = {}
    for s in alarm.signals:
        support = alarm.signal_support(s)
        sets = []
        for p in positions:
            key = (p, s, beam_width)
            if key not in cache:
                cache[key] = covering_routes(
                    setting, dist, p, support, beam_width=beam_width
                )
            sets.append(cache[key])
        sets = tuple(sets)
        rsets[s] = sets
        if scheme == "NC":
            per_signal[s] = nc_sro(sets, setting, dist, support)
        elif scheme == "PC":
            per_signal[s] = pc_sro(
                sets, setting, dist, support, restarts=pc_restarts, seed=seed
            )
        else:
            per_signal[s] = fc_sro(
                sets,
                setting,
                dist,
                support,
                mode=fc_mode,
                seed=seed,
                deadline=deadline,
            )
    value = aggregate_value(setting, alarm, per_signal)
    return SignalResponse(
        scheme=scheme, value=value, per_signal=per_signal, route_sets=rsets
    )
