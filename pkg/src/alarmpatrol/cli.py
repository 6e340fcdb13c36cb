"""Batch command-line front end.

Subcommands: ``gen`` (instance generation), ``mincover``, ``routes``, ``sro``
(one oracle on one placement), ``resolve`` (full pipeline) and ``bench``
(batch over sizes and seeds with an aggregate CSV).  Exit codes: 0 success,
2 invalid input, 3 an exact computation timed out and an incumbent was
written.  All randomness flows from ``--seed``; result files are byte
reproducible for a fixed seed in single-worker mode, wall-clock timing lives
in CSV sidecars.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import fileio
from .mincover import min_cover, overlap_metrics
from .model import ModelError, all_pairs_distances
from .oracles import respond
from .pipeline import (
    BudgetTooSmall,
    GeneratorParams,
    ResolutionConfig,
    generate_instance,
    resolve,
)
from .routes import covering_routes

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_TIMEOUT = 3


def parse_duration(text: str) -> float:
    """Accept plain seconds or s/m/h suffixed durations ("90", "60s", "1.5m")."""
    text = text.strip().lower()
    factor = 1.0
    if text.endswith("ms"):
        factor, text = 1e-3, text[:-2]
    elif text.endswith("s"):
        text = text[:-1]
    elif text.endswith("m"):
        factor, text = 60.0, text[:-1]
    elif text.endswith("h"):
        factor, text = 3600.0, text[:-1]
    try:
        value = float(text) * factor
    except ValueError:
        raise ValueError(f"cannot parse duration {text!r}") from None
    if value <= 0:
        raise ValueError("duration must be positive")
    return value


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip() != ""]


def _parse_seeds(text: str) -> list[int]:
    if "," in text:
        return _parse_int_list(text)
    return list(range(int(text)))


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_gen(args) -> int:
    params = GeneratorParams(
        n_targets=args.targets,
        seed=args.seed,
        avg_degree=args.avg_degree,
        deadline=args.deadline,
    )
    setting, alarm = generate_instance(params)
    out = _out_dir(args)
    manifest = fileio.make_manifest(
        "gen",
        {
            "targets": args.targets,
            "avg_degree": args.avg_degree,
            "deadline": args.deadline,
        },
        args.seed,
        None,
        ["instance.json"],
    )
    fileio.save_instance(setting, alarm, out / "instance.json", manifest)
    print(f"wrote {out / 'instance.json'} ({setting.n} targets)")
    return EXIT_OK


def cmd_mincover(args) -> int:
    setting, _ = fileio.load_instance(args.instance)
    dist = all_pairs_distances(setting)
    budget = parse_duration(args.budget) if args.budget else None
    result = min_cover(setting, dist, args.method, time_budget=budget)
    metrics = overlap_metrics(result.placement, setting, dist)
    out = _out_dir(args)
    manifest = fileio.make_manifest(
        "mincover",
        {"method": args.method, "budget": args.budget},
        args.seed,
        Path(args.instance),
        ["placement.json"],
    )
    payload = fileio.placement_payload(result, setting, metrics)
    payload["manifest"] = manifest
    fileio.write_json(out / "placement.json", payload)
    print(f"m={len(result.placement)} method={result.method} optimal={result.optimal}")
    timed_out = result.method == "exact" and not result.optimal
    return EXIT_TIMEOUT if timed_out else EXIT_OK


def cmd_routes(args) -> int:
    setting, alarm = fileio.load_instance(args.instance)
    dist = all_pairs_distances(setting)
    start = setting.index_of(args.start)
    signals = [args.signal] if args.signal else list(alarm.signals)
    per_signal = {}
    for s in signals:
        support = alarm.signal_support(s)
        rs = covering_routes(setting, dist, start, support, beam_width=args.beam_width)
        per_signal[s] = fileio.route_set_payload(rs, setting)
    out = _out_dir(args)
    manifest = fileio.make_manifest(
        "routes",
        {"start": args.start, "signal": args.signal, "beam_width": args.beam_width},
        args.seed,
        Path(args.instance),
        ["routes.json"],
    )
    payload = {"start": args.start, "signals": per_signal, "manifest": manifest}
    fileio.write_json(out / "routes.json", payload)
    total = sum(len(v["routes"]) for v in per_signal.values())
    print(f"wrote {out / 'routes.json'} ({total} routes)")
    return EXIT_OK


def _placement_indices(args, setting) -> list[int]:
    if args.placement_file:
        payload = json.loads(Path(args.placement_file).read_text(encoding="utf-8"))
        ids = payload["positions"]
    else:
        ids = [x for x in args.placement.split(",") if x]
    return [setting.index_of(v) for v in ids]


def cmd_sro(args) -> int:
    setting, alarm = fileio.load_instance(args.instance)
    dist = all_pairs_distances(setting)
    positions = _placement_indices(args, setting)
    deadline = time.monotonic() + parse_duration(args.budget) if args.budget else None
    response = respond(
        setting,
        dist,
        alarm,
        positions,
        args.oracle,
        beam_width=args.beam_width,
        fc_mode=args.fc_mode,
        pc_restarts=args.restarts,
        seed=args.seed,
        deadline=deadline,
    )
    out = _out_dir(args)
    manifest = fileio.make_manifest(
        "sro",
        {
            "oracle": args.oracle.upper(),
            "fc_mode": args.fc_mode,
            "restarts": args.restarts,
            "placement": [setting.ids[p] for p in positions],
        },
        args.seed,
        Path(args.instance),
        ["result.json"],
    )
    payload = fileio.response_payload(response, positions, setting)
    payload["manifest"] = manifest
    fileio.write_json(out / "result.json", payload)
    print(f"{response.scheme} value={response.value:.6f}")
    timed_out = any(
        r.diagnostics.timed_out for r in response.per_signal.values()
    )
    return EXIT_TIMEOUT if timed_out else EXIT_OK


def _resolve_config(args) -> ResolutionConfig:
    return ResolutionConfig(
        time_budget=parse_duration(args.budget),
        oracles=tuple(s.strip().upper() for s in args.oracles.split(",") if s.strip()),
        mincover_method=args.mincover_method,
        beam_width=args.beam_width,
        seed=args.seed,
        max_placements=args.max_placements,
        resources_per_position=args.resources_per_position,
        fc_mode=args.fc_mode,
        pc_restarts=args.restarts,
        workers=args.workers,
    )


def _config_echo(config: ResolutionConfig) -> dict:
    return {
        "time_budget": config.time_budget,
        "oracles": list(config.oracles),
        "mincover_method": config.mincover_method,
        "beam_width": config.beam_width,
        "max_placements": config.max_placements,
        "resources_per_position": config.resources_per_position,
        "fc_mode": config.fc_mode,
        "pc_restarts": config.pc_restarts,
        "workers": config.workers,
    }


def cmd_resolve(args) -> int:
    setting, alarm = fileio.load_instance(args.instance)
    config = _resolve_config(args)
    report = resolve(setting, alarm, config)
    out = _out_dir(args)
    manifest = fileio.make_manifest(
        "resolve",
        _config_echo(config),
        args.seed,
        Path(args.instance),
        ["report.json", "trace.csv"],
    )
    payload = fileio.report_payload(report, setting)
    payload["manifest"] = manifest
    fileio.write_json(out / "report.json", payload)
    (out / "trace.csv").write_text(fileio.trace_csv(report, manifest), encoding="utf-8")
    for scheme, entry in sorted(report.best.items()):
        print(f"{scheme}: value={entry.value:.6f} placement={list(setting.ids_of(entry.positions))}")
    print(
        f"placements={report.placements_evaluated} exhausted={report.exhausted}"
    )
    degraded = report.timed_out_oracles > 0 or (
        report.mincover.method == "exact" and not report.mincover.optimal
    )
    return EXIT_TIMEOUT if degraded else EXIT_OK


def aggregate_bench(runs: list[tuple[int, int, Path]]) -> str:
    """Build the aggregate CSV purely from stored per-run report files."""
    lines = ["n_targets,seed,m,eta,tau,tau_hat,oracle,value,placements_evaluated"]
    for n, seed, run_dir in sorted(runs):
        payload = json.loads((run_dir / "report.json").read_text(encoding="utf-8"))
        for oracle in sorted(payload["best"]):
            entry = payload["best"][oracle]
            metrics = payload["placements"][entry["placement_index"]]["metrics"]
            lines.append(
                ",".join(
                    [
                        str(n),
                        str(seed),
                        str(payload["m"]),
                        str(metrics["eta"]),
                        repr(metrics["tau"]),
                        repr(metrics["tau_hat"]),
                        oracle,
                        repr(entry["value"]),
                        str(payload["placements_evaluated"]),
                    ]
                )
            )
    return "\n".join(lines) + "\n"


def cmd_bench(args) -> int:
    sizes = _parse_int_list(args.sizes)
    seeds = _parse_seeds(args.seeds)
    out = _out_dir(args)
    worst = EXIT_OK
    runs: list[tuple[int, int, Path]] = []
    timings: list[tuple[int, int, float]] = []
    for n in sizes:
        for seed in seeds:
            run_dir = out / f"run_t{n}_s{seed}"
            run_dir.mkdir(parents=True, exist_ok=True)
            setting, alarm = generate_instance(
                GeneratorParams(n_targets=n, seed=seed, deadline=args.deadline)
            )
            gen_manifest = fileio.make_manifest(
                "bench/gen", {"targets": n, "deadline": args.deadline}, seed, None, ["instance.json"]
            )
            fileio.save_instance(setting, alarm, run_dir / "instance.json", gen_manifest)
            config = ResolutionConfig(
                time_budget=parse_duration(args.budget),
                oracles=tuple(s.strip().upper() for s in args.oracles.split(",") if s.strip()),
                seed=seed,
                max_placements=args.max_placements,
                fc_mode=args.fc_mode,
                pc_restarts=args.restarts,
            )
            t0 = time.monotonic()
            report = resolve(setting, alarm, config)
            elapsed = time.monotonic() - t0
            manifest = fileio.make_manifest(
                "bench/resolve",
                _bench_echo(config, n),
                seed,
                run_dir / "instance.json",
                ["report.json"],
            )
            payload = fileio.report_payload(report, setting)
            payload["manifest"] = manifest
            fileio.write_json(run_dir / "report.json", payload)
            runs.append((n, seed, run_dir))
            timings.append((n, seed, elapsed))
            if report.timed_out_oracles:
                worst = EXIT_TIMEOUT
            print(f"t={n} seed={seed}: placements={report.placements_evaluated}")
    (out / "bench.csv").write_text(aggregate_bench(runs), encoding="utf-8")
    timing_lines = ["n_targets,seed,time_ms"]
    for n, seed, elapsed in timings:
        timing_lines.append(f"{n},{seed},{elapsed * 1000.0:.3f}")
    (out / "bench_timing.csv").write_text("\n".join(timing_lines) + "\n", encoding="utf-8")
    print(f"wrote {out / 'bench.csv'}")
    return worst


def _bench_echo(config: ResolutionConfig, n: int) -> dict:
    echo = {
        "targets": n,
        "time_budget": config.time_budget,
        "oracles": list(config.oracles),
        "max_placements": config.max_placements,
        "fc_mode": config.fc_mode,
        "pc_restarts": config.pc_restarts,
    }
    return echo


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alarmpatrol",
        description="Covering placements and alarm-response strategies for patrolling games",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="root random seed")

    p = sub.add_parser("gen", help="generate a random instance")
    common(p)
    p.add_argument("--targets", type=int, required=True)
    p.add_argument("--avg-degree", type=float, default=3.0)
    p.add_argument("--deadline", type=int, default=None)

    p = sub.add_parser("mincover", help="minimum covering placement")
    common(p)
    p.add_argument("--instance", required=True)
    p.add_argument(
        "--method",
        default="auto",
        choices=["exact", "greedy", "greedy+ls", "tree", "cycle", "auto"],
    )
    p.add_argument("--budget", default=None, help="time budget, e.g. 30s")

    p = sub.add_parser("routes", help="covering routes from a start vertex")
    common(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--start", required=True, help="start vertex id")
    p.add_argument("--signal", default=None, help="restrict to one signal id")
    p.add_argument("--beam-width", type=int, default=100_000)

    p = sub.add_parser("sro", help="one signal-response oracle on one placement")
    common(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--placement", default=None, help="comma-separated vertex ids")
    p.add_argument("--placement-file", default=None, help="placement.json from mincover")
    p.add_argument("--oracle", required=True, choices=["fc", "pc", "nc", "FC", "PC", "NC"])
    p.add_argument("--fc-mode", default="exact", choices=["exact", "heuristic"])
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--budget", default=None)
    p.add_argument("--beam-width", type=int, default=100_000)

    p = sub.add_parser("resolve", help="full anytime resolution flow")
    common(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--oracles", default="fc,pc,nc")
    p.add_argument("--budget", default="60m")
    p.add_argument("--mincover-method", default="auto")
    p.add_argument("--max-placements", type=int, default=None)
    p.add_argument("--resources-per-position", type=int, default=1)
    p.add_argument("--fc-mode", default="exact", choices=["exact", "heuristic"])
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--beam-width", type=int, default=100_000)

    p = sub.add_parser("bench", help="batch runs over sizes and seeds")
    common(p)
    p.add_argument("--sizes", required=True, help="comma-separated target counts")
    p.add_argument("--seeds", required=True, help="count or comma-separated seeds")
    p.add_argument("--budget", default="60s")
    p.add_argument("--oracles", default="fc,pc,nc")
    p.add_argument("--max-placements", type=int, default=None)
    p.add_argument("--deadline", type=int, default=None)
    p.add_argument("--fc-mode", default="exact", choices=["exact", "heuristic"])
    p.add_argument("--restarts", type=int, default=0)

    return parser


_HANDLERS = {
    "gen": cmd_gen,
    "mincover": cmd_mincover,
    "routes": cmd_routes,
    "sro": cmd_sro,
    "resolve": cmd_resolve,
    "bench": cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sro" and not (args.placement or args.placement_file):
        print("sro needs --placement or --placement-file", file=sys.stderr)
        return EXIT_INVALID
    try:
        return _HANDLERS[args.command](args)
    except (ModelError, fileio.FileFormatError, BudgetTooSmall, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
