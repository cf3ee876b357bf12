"""Queuing delay, retrieval delay and satisfaction ratio from run logs.

The log is the source of truth: every quantity here can be recomputed
from a persisted log and matches what the simulator tracked online.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import fmean

from ccnprio.sim.log import EventLog

OUTCOMES = ("satisfied", "expired", "dropped", "pending")
QUEUED_ACTIONS = ("forwarded", "aggregated")


class EmptyLog(ValueError):
    """No interests were generated in the run."""


class DomainMismatch(ValueError):
    """Runs disagree on the set of priority levels."""


@dataclass
class RunMetrics:
    priorities: tuple[int, ...]
    queuing_delay: dict[int, float | None]
    retrieval_delay: dict[int, float | None]
    satisfaction_ratio: float
    counts: dict[str, float] = field(default_factory=dict)


def _mean(xs: list[float]) -> float | None:
    return fmean(xs) if xs else None


def _by_level(samples: dict[int, list[float]]) -> dict[int, float]:
    return {p: fmean(v) for p, v in sorted(samples.items()) if v}


def priority_levels(log: EventLog) -> tuple[int, ...]:
    return tuple(sorted(int(r.get("priority")) for r in log.of_kind("table_entry")))


def queuing_delay_by_priority(log: EventLog, exclude_joiners: bool = False) -> dict[int, float]:
    """Mean time from reaching the head of its queue to being selected."""
    samples: dict[int, list[float]] = {}
    for r in log.of_kind("interest_selected"):
        f = r.fields()
        if f["action"] not in QUEUED_ACTIONS or (exclude_joiners and f["role"] == "tie"):
            continue
        samples.setdefault(int(f["prio"]), []).append(r.time - float(f["edge"]))
    return _by_level(samples)


def retrieval_delay_by_priority(log: EventLog) -> dict[int, float]:
    """Mean time from forwarding to the first chunk reaching the router."""
    sent = {}
    for r in log.of_kind("interest_forwarded"):
        sent[r.get("iid")] = r.time
    samples: dict[int, list[float]] = {}
    for r in log.of_kind("retrieved"):
        f = r.fields()
        samples.setdefault(int(f["prio"]), []).append(r.time - sent[f["iid"]])
    return _by_level(samples)


def outcome_counts(log: EventLog) -> dict[str, int]:
    generated = {r.get("iid") for r in log.of_kind("interest_generated")}
    satisfied = {r.get("iid") for r in log.of_kind("satisfied")}
    expired = {r.get("iid") for r in log.of_kind("interest_expired")}
    dropped = {r.get("iid") for r in log.of_kind("interest_dropped", "no_route")}
    counts = {
        "generated": len(generated),
        "satisfied": len(satisfied),
        "expired": len(expired),
        "dropped": len(dropped),
    }
    counts["pending"] = len(generated - satisfied - expired - dropped)
    return counts


def satisfaction_ratio(log: EventLog) -> float:
    counts = outcome_counts(log)
    if counts["generated"] == 0:
        raise EmptyLog("no interests generated")
    return counts["satisfied"] / counts["generated"]


def _assemble(levels, queuing, retrieval, counts) -> RunMetrics:
    if counts["generated"] == 0:
        raise EmptyLog("no interests generated")
    return RunMetrics(
        tuple(levels),
        {p: queuing.get(p) for p in levels},
        {p: retrieval.get(p) for p in levels},
        counts["satisfied"] / counts["generated"],
        dict(counts),
    )


def run_metrics(log: EventLog, exclude_joiners: bool = False) -> RunMetrics:
    return _assemble(
        priority_levels(log),
        queuing_delay_by_priority(log, exclude_joiners),
        retrieval_delay_by_priority(log),
        outcome_counts(log),
    )


def online_metrics(sim, exclude_joiners: bool = False) -> RunMetrics:
    """Same metrics from the simulator's own interest records."""
    queuing: dict[int, list[float]] = {}
    retrieval: dict[int, list[float]] = {}
    counts = {"generated": len(sim.interests), **{k: 0 for k in OUTCOMES}}
    for i in sim.interests:
        counts[i.outcome or "pending"] += 1
        if i.action in QUEUED_ACTIONS and not (exclude_joiners and i.role == "tie"):
            queuing.setdefault(i.priority, []).append(i.selected_at - i.edge_arrival_at)
        if i.action == "forwarded" and i.first_chunk_at is not None:
            retrieval.setdefault(i.priority, []).append(i.first_chunk_at - i.forwarded_at)
    levels = sorted(sim.router.priorities.entries.values()) if sim.router.priorities else []
    return _assemble(levels, _by_level(queuing), _by_level(retrieval), counts)


def aggregate(runs: list[RunMetrics]) -> RunMetrics:
    """Mean over runs; a level's delay averages only the runs that sampled it."""
    if not runs:
        raise ValueError("aggregate needs at least one run")
    levels = runs[0].priorities
    for m in runs[1:]:
        if m.priorities != levels:
            raise DomainMismatch(f"priority levels {m.priorities} differ from {levels}")

    def per_level(attr: str) -> dict[int, float | None]:
        out = {}
        for p in levels:
            vals = [getattr(m, attr)[p] for m in runs if getattr(m, attr)[p] is not None]
            out[p] = _mean(vals)
        return out

    keys = runs[0].counts.keys()
    return RunMetrics(
        levels,
        per_level("queuing_delay"),
        per_level("retrieval_delay"),
        fmean(m.satisfaction_ratio for m in runs),
        {k: fmean(m.counts[k] for m in runs) for k in keys},
    )


def timeline_rows(log: EventLog) -> list[tuple[int, int, float, float | None]]:
    """(interest_id, priority, forwarded_at, first_chunk_at) per forwarded interest."""
    first = {r.get("iid"): r.time for r in log.of_kind("retrieved")}
    rows = []
    for r in log.of_kind("interest_forwarded"):
        f = r.fields()
        rows.append((int(f["iid"]), int(f["prio"]), r.time, first.get(f["iid"])))
    return rows


def starvation_audit(log: EventLog, threshold: int = 25) -> list[str]:
    """Problems with counters recorded after each cycle; empty when clean."""
    problems = []
    for r in log.of_kind("scheduler_cycle"):
        f = r.fields()
        counters = dict(kv.split(":") for kv in f["counters"].split(",") if kv)
        for face, c in counters.items():
            if int(c) > threshold:
                problems.append(f"t={r.time}: face {face} counter {c} > {threshold}")
        if f["mode"] == "forced" and int(counters[str(r.face)]) != 0:
            problems.append(f"t={r.time}: forced service of face {r.face} left counter {counters[str(r.face)]}")
    return problems
