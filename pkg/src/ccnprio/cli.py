"""Command-line entry point: run, replicate, report, validate."""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from ccnprio import metrics
from ccnprio.sim.engine import Simulation
from ccnprio.sim.log import EventLog
from ccnprio.sim.scenario import InvalidScenario, load_scenario

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

log = logging.getLogger("ccnprio")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class UsageError(Exception):
    pass


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def _summary(m: metrics.RunMetrics) -> str:
    lines = [f"satisfaction_ratio\t{m.satisfaction_ratio:.4f}"]
    lines.append("counts\t" + " ".join(f"{k}={v:g}" for k, v in m.counts.items()))
    lines.append("priority\tqueuing_delay_s\tretrieval_delay_s")
    for p in reversed(m.priorities):
        lines.append(f"{p}\t{_fmt(m.queuing_delay[p])}\t{_fmt(m.retrieval_delay[p])}")
    return "\n".join(lines)


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    sim = Simulation(scenario, args.seed)
    event_log = sim.run()
    if args.log_out:
        event_log.write(args.log_out)
        log.info("wrote %d records to %s", len(event_log), args.log_out)
    print(sim.router.priorities.to_text() if sim.router.priorities else "priority table never installed")
    print(_summary(metrics.online_metrics(sim, args.exclude_joiners)))
    if args.dump_tables:
        print(sim.router.dump_tables(), end="")
    return EXIT_OK


def cmd_replicate(args) -> int:
    scenario = load_scenario(args.scenario)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    runs = []
    for seed in range(args.first_seed, args.first_seed + args.seeds):
        sim = Simulation(scenario, seed)
        sim.run().write(out / f"run_seed{seed:04d}.tsv")
        runs.append(metrics.online_metrics(sim, args.exclude_joiners))
    print(f"{len(runs)} runs written to {out}")
    print(_summary(metrics.aggregate(runs)))
    return EXIT_OK


def _metric_row(label, seed, m: metrics.RunMetrics) -> list:
    row = [label, seed, *(_count(m.counts[k]) for k in ("generated", *metrics.OUTCOMES))]
    row.append(f"{m.satisfaction_ratio:.6f}")
    row += [_fmt(m.queuing_delay[p]) for p in m.priorities]
    row += [_fmt(m.retrieval_delay[p]) for p in m.priorities]
    return row


def _count(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.2f}"


def cmd_report(args) -> int:
    paths = sorted(Path(args.logs).glob("*.tsv")) if Path(args.logs).is_dir() else []
    if not paths:
        raise UsageError(f"no logs found in {args.logs}")
    logs = [(p, EventLog.read(p)) for p in paths]
    runs = [metrics.run_metrics(lg, args.exclude_joiners) for _, lg in logs]
    agg = metrics.aggregate(runs)
    levels = agg.priorities
    header = ["run", "seed", "generated", *metrics.OUTCOMES, "satisfaction"]
    header += [f"queuing_delay_p{p}" for p in levels] + [f"retrieval_delay_p{p}" for p in levels]
    rows = [_metric_row(p.stem, lg.meta.get("seed", ""), m) for (p, lg), m in zip(logs, runs)]
    rows.append(_metric_row("mean", "", agg))
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
    if args.plots:
        _write_plots(Path(args.plots), logs, runs, agg)
    print(_summary(agg))
    return EXIT_OK


def _write_plots(out: Path, logs, runs, agg: metrics.RunMetrics) -> None:
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "timeline.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["run", "interest_id", "priority", "forwarded_at", "first_chunk_at"])
        for path, lg in logs:
            for iid, prio, fwd, first in metrics.timeline_rows(lg):
                w.writerow([path.stem, iid, prio, _fmt(fwd), _fmt(first)])
    for fname, attr in (("queuing_delay_by_priority.csv", "queuing_delay"), ("retrieval_delay_by_priority.csv", "retrieval_delay")):
        with open(out / fname, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["priority", f"mean_{attr}_s", "runs_sampled"])
            for p in agg.priorities:
                sampled = sum(getattr(m, attr)[p] is not None for m in runs)
                w.writerow([p, _fmt(getattr(agg, attr)[p]), sampled])


def cmd_validate(args) -> int:
    scenario = load_scenario(args.scenario)
    table = scenario.priority_table()
    print(f"scenario {scenario.name}: {len(scenario.consumers)} consumers, "
          f"{len(scenario.publishers)} publishers, {len(scenario.fib)} FIB routes")
    print(table.to_text(), end="")
    print("ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccnprio", description="Content-priority interest forwarding simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run one seeded simulation")
    p.add_argument("--scenario", default="default", help="TOML path or built-in name")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--log-out", type=Path)
    p.add_argument("--dump-tables", action="store_true", help="print final CS/PIT/FIB contents")
    p.add_argument("--exclude-joiners", action="store_true", help="leave tie joiners out of queuing delay")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("replicate", help="run several seeds and write one log per seed")
    p.add_argument("--scenario", default="default")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--first-seed", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--exclude-joiners", action="store_true")
    p.set_defaults(func=cmd_replicate)

    p = sub.add_parser("report", help="metrics CSV and plot tables from a directory of logs")
    p.add_argument("--logs", type=Path, required=True)
    p.add_argument("--csv", type=Path)
    p.add_argument("--plots", type=Path)
    p.add_argument("--exclude-joiners", action="store_true")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("validate", help="check a scenario without running it")
    p.add_argument("--scenario", default="default")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvalidScenario, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except metrics.DomainMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
