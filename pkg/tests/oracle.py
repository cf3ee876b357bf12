"""Brute-force reference for the priority check pointer.

Works on plain dicts and strings and shares no code with
``ccnprio.scheduler``. Every rule is replayed literally on each step.
"""

from __future__ import annotations

import math
import random

from ccnprio.names import parse_name
from ccnprio.packets import Interest
from ccnprio.priority import PriorityTable
from ccnprio.scheduler import Scheduler, StarvationConfig


class OracleConflict(Exception):
    pass


def oracle_level(table: dict[str, int], name: str):
    best_len, best = -1, (None, 0)
    for prefix, level in table.items():
        if name == prefix or name.startswith(prefix + "/"):
            n = prefix.count("/")
            if n > best_len:
                best_len, best = n, (prefix, level)
    return best


def _remove_head(q, now):
    head = q["items"].pop(0)
    if q["items"]:
        q["items"][0]["edge"] = now
    return head


def oracle_enqueue(state, face, item, now):
    q = state["queues"][face]
    q["items"].append(item)
    if len(q["items"]) == 1:
        item["edge"] = now


def oracle_step(state, table, rng, now):
    t = state["threshold"]
    queues = state["queues"]
    nonempty = [f for f in sorted(queues) if queues[f]["items"]]
    if not nonempty:
        return None

    if not state["forced"]:
        due = [f for f in nonempty if queues[f]["counter"] >= t]
        due.sort(key=lambda f: (queues[f]["reached"] if queues[f]["reached"] is not None else -math.inf, f))
        state["forced"] = due
    while state["forced"]:
        f = state["forced"].pop(0)
        if not queues[f]["items"]:
            continue
        for g in nonempty:
            if g in state["forced"]:
                continue
            q = queues[g]
            if g == f:
                q["counter"] = 0
                q["reached"] = None
            elif q["counter"] < t:
                q["counter"] += 1
                if q["counter"] == t:
                    q["reached"] = now
        head = _remove_head(queues[f], now)
        return ("forced", f, head["iid"], (), len(state["forced"]))

    levels = {}
    prefixes_at = {}
    for f in nonempty:
        prefix, level = oracle_level(table, queues[f]["items"][0]["name"])
        levels[f] = level
        prefixes_at.setdefault(level, set()).add(prefix)
    for level, ps in prefixes_at.items():
        if len(ps) > 1:
            raise OracleConflict(level)

    top = max(levels.values())
    cands = [f for f in nonempty if levels[f] == top]

    def edge_key(f):
        e = queues[f]["items"][0]["edge"]
        return (-math.inf if e is None else e, f)

    lead = min(cands, key=edge_key)
    lead_name = queues[lead]["items"][0]["name"]
    group = [f for f in cands if queues[f]["items"][0]["name"] == lead_name]
    if len(group) > 1:
        pick = group[rng.randrange(len(group))]
    else:
        pick = group[0]

    for g in nonempty:
        q = queues[g]
        if g in group:
            q["counter"] = 0
            q["reached"] = None
        elif q["counter"] < t:
            q["counter"] += 1
            if q["counter"] == t:
                q["reached"] = now

    head = _remove_head(queues[pick], now)
    joiners = []
    for g in group:
        if g != pick:
            joiners.append((g, _remove_head(queues[g], now)["iid"]))
    return ("priority", pick, head["iid"], tuple(joiners), 0)


# -- random instances ---------------------------------------------------------

PREFIXES = ["/d/h/cancer", "/d/h/heart", "/d/b/tx", "/d/b/svc", "/d/w/mp4", "/d/w/bmp", "/d/w", "/d"]


def random_table(rng: random.Random) -> dict[str, int]:
    chosen = rng.sample(PREFIXES, rng.randint(1, len(PREFIXES)))
    levels = rng.sample(range(1, 40), len(chosen))
    return dict(zip(chosen, levels))


def random_name(rng: random.Random, table: dict[str, int]) -> str:
    r = rng.random()
    if r < 0.1:
        return "/other/x"
    prefix = rng.choice(list(table))
    if r < 0.4:
        return prefix  # exact names make ties likely
    return f"{prefix}/obj{rng.randrange(3)}"


def random_instance(rng: random.Random):
    threshold = rng.choice([1, 2, 3, 5, 25])
    table = random_table(rng)
    faces = rng.sample(range(0, 20), rng.randint(0, 8))
    state = {"threshold": threshold, "queues": {}, "forced": []}
    iid = 0
    shared = random_name(rng, table)
    for f in faces:
        items = []
        for k in range(rng.randint(0, 5)):
            name = shared if (k == 0 and rng.random() < 0.4) else random_name(rng, table)
            items.append({"iid": iid, "name": name, "edge": None})
            iid += 1
        if items:
            items[0]["edge"] = rng.choice([0.0, 0.5, 1.0, rng.uniform(0, 1)])
        counter = rng.randint(0, threshold)
        reached = rng.choice([None, rng.uniform(0, 1), 0.5]) if counter == threshold else None
        state["queues"][f] = {"items": items, "counter": counter, "reached": reached}
    return state, table, iid


def build_scheduler(state, table):
    """Implementation objects equivalent to an oracle state."""
    sched = Scheduler(sorted(state["queues"]), StarvationConfig(state["threshold"]))
    for f, q in state["queues"].items():
        impl = sched.queues[f]
        for item in q["items"]:
            impl.items.append(Interest(parse_name(item["name"]), f, 0.0, edge_arrival_at=item["edge"], iid=item["iid"]))
        impl.counter = q["counter"]
        impl.reached_at = q["reached"]
    sched.forced_pending = list(state["forced"])
    ptable = PriorityTable({parse_name(p): v for p, v in table.items()}, agreed=True)
    return sched, ptable


def as_tuple(decision):
    if decision is None:
        return None
    face, interest = decision.forwarded
    joiners = tuple((f, i.iid) for f, i in decision.pit_joiners)
    return (decision.mode, face, interest.iid, joiners, decision.forced_faces_pending)


def compare_instance(seed: int, max_steps: int = 40) -> int:
    """Replay one random instance through both paths; returns steps compared.

    Raises AssertionError on the first diverging decision.
    """
    rng = random.Random(seed)
    state, table, next_iid = random_instance(rng)
    sched, ptable = build_scheduler(state, table)
    rng_impl = random.Random(seed * 7919 + 1)
    rng_ref = random.Random(seed * 7919 + 1)
    now = 1.0
    steps = 0
    for _ in range(max_steps):
        now += 0.01
        if state["queues"] and rng.random() < 0.3:
            face = rng.choice(sorted(state["queues"]))
            name = random_name(rng, table)
            oracle_enqueue(state, face, {"iid": next_iid, "name": name, "edge": None}, now)
            sched.enqueue(face, Interest(parse_name(name), face, 0.0, iid=next_iid), now)
            next_iid += 1
        try:
            expected = oracle_step(state, table, rng_ref, now)
        except OracleConflict:
            expected = "conflict"
        try:
            got = as_tuple(sched.select_next(ptable, rng_impl, now))
        except Exception as exc:  # noqa: BLE001
            got = "conflict" if type(exc).__name__ == "PriorityConflict" else repr(exc)
        assert got == expected, f"seed {seed} step {steps}: {got} != {expected}"
        if expected is None or expected == "conflict":
            break
        for f, q in state["queues"].items():
            impl = sched.queues[f]
            assert impl.counter == q["counter"], f"seed {seed}: counter of face {f}"
            assert [i.iid for i in impl.items] == [it["iid"] for it in q["items"]]
        steps += 1
    return steps
