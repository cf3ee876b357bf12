"""Discrete-event run of the prototype network: consumers, one router, publishers."""

from __future__ import annotations

import heapq
import logging
import random
from dataclasses import dataclass, field

from ccnprio.packets import DataChunk, Interest
from ccnprio.priority import AgreementSession, propagate
from ccnprio.router import Fib, Router
from ccnprio.scheduler import StarvationConfig
from ccnprio.sim.catalog import generate_workload
from ccnprio.sim.log import EventLog
from ccnprio.sim.network import Link, Publisher, Response
from ccnprio.sim.scenario import Scenario

logger = logging.getLogger(__name__)

EVENT_KINDS = (
    "interest_generated",
    "interest_arrives",
    "scheduler_cycle",
    "interest_forwarded",
    "chunk_sent",
    "chunk_arrives",
    "pit_expiry_sweep",
    "announce_msg",
    "table_installed",
)


@dataclass(order=True, frozen=True)
class Event:
    time: float
    sequence: int
    kind: str = field(compare=False)
    payload: object = field(compare=False, default=None)


class EventQueue:
    """Min-heap of events ordered by (time, insertion sequence)."""

    def __init__(self) -> None:
        self._heap: list[Event] = []
        self._seq = 0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, time: float, kind: str, payload=None) -> Event:
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        ev = Event(time, self._seq, kind, payload)
        self._seq += 1
        heapq.heappush(self._heap, ev)
        return ev

    def pop(self) -> Event:
        return heapq.heappop(self._heap)

    def peek_time(self) -> float | None:
        return self._heap[0].time if self._heap else None


def _faces(faces) -> str:
    return ",".join(str(f) for f in sorted(faces))


class Simulation:
    def __init__(self, scenario: Scenario, seed: int | None = None):
        s = scenario
        self.scenario = s
        self.seed = s.seed if seed is None else seed
        r = s.router
        self.router = Router(
            [c.face for c in s.consumers],
            Fib(dict(s.fib)),
            r.cs_capacity,
            r.pit_timeout,
            StarvationConfig(r.starvation_threshold),
        )
        self.cycle_cost = r.cycle_cost
        self.consumer_links = {
            c.face: Link(c.link.bandwidth, c.link.propagation_delay, c.link.buffer_capacity) for c in s.consumers
        }
        self.publishers: dict[int, Publisher] = {}
        self._by_pid: dict[str, Publisher] = {}
        for p in s.publishers:
            mk = lambda: Link(p.link.bandwidth, p.link.propagation_delay, p.link.buffer_capacity)  # noqa: E731
            pub = Publisher(p.pid, p.face, list(p.contents), p.base_latency, p.read_rate, mk(), mk())
            self.publishers[p.face] = pub
            self._by_pid[p.pid] = pub
        self.expected_table = s.priority_table()
        self.rng_sched = random.Random(f"scheduler:{self.seed}")
        self.rng_size = random.Random(f"sizes:{self.seed}")
        self.events = EventQueue()
        self.log = EventLog(meta={"scenario": s.name, "seed": str(self.seed)})
        self.interests: list[Interest] = []
        self.busy = False
        self.installed_at: float | None = None
        self.session = AgreementSession(p.announcement() for p in s.publishers)
        self.clock = 0.0
        self._ran = False

    # -- setup -------------------------------------------------------------

    def _control_delay(self, src: str, dst: str) -> float:
        size = self.scenario.router.control_size
        return self._by_pid[src].uplink.latency(size) + self._by_pid[dst].downlink.latency(size)

    def _start_initialization(self) -> None:
        if len(self.session.members) == 1:
            self.session.start_solo()
            pub = self._by_pid[self.session.members[0]]
            self.events.schedule(pub.uplink.latency(self.scenario.router.control_size), "table_installed")
            return
        for msg in self.session.opening_messages():
            self.events.schedule(self._control_delay(msg[1], msg[2]), "announce_msg", msg)

    def _load_workload(self) -> None:
        s = self.scenario
        if s.explicit_workload is not None:
            items = s.explicit_workload
        else:
            items = generate_workload(
                self.seed, s.count, s.duration, [c.face for c in s.consumers], s.catalog
            ).interests
        for iid, item in enumerate(items):
            interest = Interest(item.name, item.face, item.time, iid=iid)
            interest.priority = self.expected_table.lookup(item.name)
            self.interests.append(interest)
            self.events.schedule(item.time, "interest_generated", interest)

    # -- main loop ---------------------------------------------------------

    def run(self) -> EventLog:
        if self._ran:
            raise RuntimeError("a Simulation runs once; build a new one")
        self._ran = True
        self._start_initialization()
        self._load_workload()
        horizon = self.scenario.horizon
        handlers = {
            "interest_generated": self._on_generated,
            "interest_arrives": self._on_interest_arrives,
            "scheduler_cycle": self._on_cycle,
            "interest_forwarded": self._on_interest_at_publisher,
            "chunk_sent": self._on_chunk_sent,
            "chunk_arrives": self._on_chunk_arrives,
            "pit_expiry_sweep": self._on_sweep,
            "announce_msg": self._on_announce,
            "table_installed": self._on_table_installed,
        }
        while self.events:
            if horizon is not None and self.events.peek_time() > horizon:
                break
            ev = self.events.pop()
            self.clock = ev.time
            handlers[ev.kind](ev.time, ev.payload)
        for interest in self.interests:
            if interest.outcome is None:
                interest.outcome = "pending"
        return self.log

    # -- initialization phase ---------------------------------------------

    def _on_announce(self, now: float, msg) -> None:
        phase, src, dst = msg
        self.log.append(now, "announce_msg", phase=phase, src=src, dst=dst)
        was_complete = self.session.complete
        for follow in self.session.receive(phase, src, dst):
            self.events.schedule(now + self._control_delay(follow[1], follow[2]), "announce_msg", follow)
        if self.session.complete and not was_complete:
            hop = self._by_pid[dst].uplink.latency(self.scenario.router.control_size)
            self.events.schedule(now + hop, "table_installed")

    def _on_table_installed(self, now: float, _payload) -> None:
        propagate(self.session.table, [self.router], start=now)
        self.installed_at = now
        for prefix, level in self.router.priorities.rows():
            self.log.append(now, "table_entry", name=prefix, priority=level)
        self.log.append(now, "table_installed", entries=len(self.router.priorities.entries))
        self._kick(now)

    # -- consumer side -----------------------------------------------------

    def _on_generated(self, now: float, interest: Interest) -> None:
        self.log.append(now, "interest_generated", interest.origin_face, interest.name,
                        iid=interest.iid, prio=interest.priority)
        arrival = self.consumer_links[interest.origin_face].transmit(self.scenario.router.interest_size, now)
        if arrival is None:
            interest.outcome = "dropped"
            self.log.append(now, "interest_dropped", interest.origin_face, interest.name,
                            iid=interest.iid, where="uplink")
            return
        self.events.schedule(arrival, "interest_arrives", interest)

    def _on_interest_arrives(self, now: float, interest: Interest) -> None:
        face = interest.origin_face
        action = self.router.on_interest_arrival(face, interest, now)
        self.log.append(now, "interest_arrives", face, interest.name, iid=interest.iid)
        if action.kind == "serve_from_cs":
            self.log.append(now, "cs_hit", face, interest.name, iid=interest.iid)
            self._satisfy(interest, now)
            return
        self.log.append(now, "enqueued", face, interest.name, iid=interest.iid, depth=len(self.router.scheduler.queue(face)))
        self._kick(now)

    def _satisfy(self, interest: Interest, now: float) -> None:
        if interest.outcome is not None:
            return
        interest.outcome = "satisfied"
        interest.first_chunk_at = now
        self.log.append(now, "satisfied", interest.origin_face, interest.name, iid=interest.iid)

    # -- processing edge ---------------------------------------------------

    def _kick(self, now: float) -> None:
        if self.busy or self.router.priorities is None or not self.router.scheduler.has_work():
            return
        self.busy = True
        self.events.schedule(now + self.cycle_cost, "scheduler_cycle")

    def _on_cycle(self, now: float, _payload) -> None:
        self.busy = False
        decision, dispositions = self.router.run_cycle(self.rng_sched, now)
        if decision is not None:
            counters = ",".join(f"{q.face}:{q.counter}" for q in self.router.scheduler.queues.values())
            self.log.append(now, "scheduler_cycle", decision.forwarded[0], mode=decision.mode,
                            joiners=len(decision.pit_joiners), forced_pending=decision.forced_faces_pending,
                            counters=counters)
        for d in dispositions:
            self._dispose(d, now)
        self._kick(now)

    def _dispose(self, d, now: float) -> None:
        i = d.interest
        i.selected_at = now
        i.role = d.role
        i.action = d.action
        self.log.append(now, "interest_selected", d.face, i.name, iid=i.iid, prio=i.priority,
                        role=d.role, action=d.action, edge=repr(i.edge_arrival_at))
        if d.action == "cs_hit":
            self._satisfy(i, now)
        elif d.action == "no_route":
            i.outcome = "dropped"
            self.log.append(now, "no_route", d.face, i.name, iid=i.iid)
            logger.debug("no route for %s", i.name)
        elif d.action == "forwarded":
            i.forwarded_at = now
            self.log.append(now, "interest_forwarded", d.out_face, i.name, iid=i.iid, prio=i.priority)
            self.events.schedule(d.entry.expiry, "pit_expiry_sweep")
            pub = self.publishers[d.out_face]
            arrival = pub.downlink.transmit(self.scenario.router.interest_size, now)
            if arrival is None:
                self.log.append(now, "link_drop", d.out_face, i.name, packet="interest")
            else:
                self.events.schedule(arrival, "interest_forwarded", (pub, i))

    def _on_sweep(self, now: float, _payload) -> None:
        for entry in self.router.pit.expire(now):
            self.log.append(now, "pit_expired", None, entry.name, faces=_faces(entry.faces))
            for i in entry.interests:
                if i.outcome is None:
                    i.outcome = "expired"
                    self.log.append(now, "interest_expired", i.origin_face, i.name, iid=i.iid)

    # -- publisher side ----------------------------------------------------

    def _on_interest_at_publisher(self, now: float, payload) -> None:
        pub, interest = payload
        resp = pub.respond(interest.name, now, self.rng_size)
        if resp is None:
            self.log.append(now, "no_content", pub.face, interest.name, iid=interest.iid)
            return
        self.log.append(now, "publisher_respond", pub.face, interest.name, size=resp.size,
                        chunks=resp.chunk_count, first_emit=repr(resp.first_emit))
        for k in range(resp.chunk_count):
            self.events.schedule(resp.emit_time(k), "chunk_sent", (pub, resp, k))

    def _on_chunk_sent(self, now: float, payload) -> None:
        pub, resp, k = payload
        resp: Response
        chunk = DataChunk(resp.content_name, k, resp.chunk_count, resp.payload(k), resp.size)
        arrival = pub.uplink.transmit(chunk.payload_size, now)
        if arrival is None:
            self.log.append(now, "link_drop", pub.face, resp.content_name, packet="chunk", idx=k)
            return
        self.events.schedule(arrival, "chunk_arrives", (pub.face, chunk))

    def _on_chunk_arrives(self, now: float, payload) -> None:
        face, chunk = payload
        action = self.router.on_data_arrival(face, chunk, now)
        if action.kind == "discard":
            self.log.append(now, "chunk_arrives", face, chunk.content_name, idx=chunk.chunk_index,
                            count=chunk.chunk_count, result="discard", reason=action.reason)
            return
        entry = action.entry
        self.log.append(now, "chunk_arrives", face, chunk.content_name, idx=chunk.chunk_index,
                        count=chunk.chunk_count, result="deliver", faces=_faces(action.faces))
        if entry.chunks_received == 1:
            creator = entry.interests[0]
            self.log.append(now, "retrieved", face, entry.name, iid=creator.iid, prio=creator.priority)
        for i in entry.interests:
            self._satisfy(i, now)
        if action.cached is not None:
            self.log.append(now, "cached", None, action.cached.name, size=action.cached.size)


def run(scenario: Scenario, seed: int | None = None) -> EventLog:
    return Simulation(scenario, seed).run()
