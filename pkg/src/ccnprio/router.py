"""Content Store, Pending Interest Table and FIB of a CCN router."""

from __future__ import annotations

import random
from collections import OrderedDict
from dataclasses import dataclass, field

from ccnprio.names import ContentName, is_prefix_of
from ccnprio.packets import DataChunk, FaceId, Interest
from ccnprio.priority import PriorityTable
from ccnprio.scheduler import Scheduler, SchedulerDecision, StarvationConfig, UnknownFace

DEFAULT_CS_CAPACITY = 64
DEFAULT_PIT_TIMEOUT = 4.0

__all__ = [
    "ContentRecord",
    "ContentStore",
    "Disposition",
    "Fib",
    "Pit",
    "PitEntry",
    "Router",
    "UnknownFace",
]


@dataclass(frozen=True)
class ContentRecord:
    name: ContentName
    size: int
    inserted_at: float = 0.0


class ContentStore:
    """Bounded LRU cache of whole content objects."""

    def __init__(self, capacity: int = DEFAULT_CS_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._entries: OrderedDict[ContentName, ContentRecord] = OrderedDict()

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, name: ContentName) -> bool:
        return name in self._entries

    def names(self) -> list[ContentName]:
        """Stored names, least recently used first."""
        return list(self._entries)

    def peek(self, name: ContentName) -> ContentRecord | None:
        rec = self._entries.get(name)
        if rec is not None:
            return rec
        for stored, rec in self._entries.items():
            if is_prefix_of(name, stored):
                return rec
        return None

    def lookup(self, name: ContentName) -> ContentRecord | None:
        rec = self.peek(name)
        if rec is not None:
            self._entries.move_to_end(rec.name)
        return rec

    def insert(self, record: ContentRecord) -> ContentRecord | None:
        if record.name in self._entries:
            self._entries[record.name] = record
            self._entries.move_to_end(record.name)
            return None
        self._entries[record.name] = record
        if len(self._entries) > self.capacity:
            return self._entries.popitem(last=False)[1]
        return None


@dataclass
class PitEntry:
    name: ContentName
    faces: set[FaceId]
    expiry: float
    created_at: float = 0.0
    interests: list[Interest] = field(default_factory=list)
    chunks_received: int = 0
    first_chunk_at: float | None = None


class Pit:
    def __init__(self) -> None:
        self._entries: dict[ContentName, PitEntry] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries.values())

    def find(self, name: ContentName) -> PitEntry | None:
        return self._entries.get(name)

    def add_face(
        self, name: ContentName, face: FaceId, now: float, timeout: float
    ) -> tuple[str, PitEntry]:
        """Record ``face`` as waiting for ``name``; returns ("created" | "aggregated", entry)."""
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        entry = self._entries.get(name)
        if entry is not None:
            entry.faces.add(face)
            return "aggregated", entry
        entry = PitEntry(name, {face}, now + timeout, created_at=now)
        self._entries[name] = entry
        return "created", entry

    def match_data(self, data_name: ContentName) -> PitEntry | None:
        """Longest pending name that is a prefix of ``data_name``."""
        comps = data_name.components
        for k in range(len(comps), 0, -1):
            entry = self._entries.get(ContentName(comps[:k]))
            if entry is not None:
                return entry
        return None

    def remove(self, name: ContentName) -> PitEntry | None:
        return self._entries.pop(name, None)

    def expire(self, now: float) -> list[PitEntry]:
        gone = [e for e in self._entries.values() if e.expiry <= now]
        for e in gone:
            del self._entries[e.name]
        return gone


class Fib:
    def __init__(self, entries: dict[ContentName, FaceId] | None = None):
        self._routes: dict[tuple[str, ...], FaceId] = {}
        for prefix, face in (entries or {}).items():
            self.add(prefix, face)

    def __len__(self) -> int:
        return len(self._routes)

    def add(self, prefix: ContentName, face: FaceId) -> None:
        if prefix.components in self._routes:
            raise ValueError(f"duplicate FIB prefix {prefix}")
        self._routes[prefix.components] = face

    def entries(self) -> list[tuple[ContentName, FaceId]]:
        return [(ContentName(c), f) for c, f in self._routes.items()]

    def lpm(self, name: ContentName) -> FaceId | None:
        comps = name.components
        for k in range(len(comps), 0, -1):
            face = self._routes.get(comps[:k])
            if face is not None:
                return face
        return None


@dataclass(frozen=True)
class ArrivalAction:
    kind: str  # "serve_from_cs" or "enqueue"
    record: ContentRecord | None = None


@dataclass(frozen=True)
class DataAction:
    kind: str  # "discard" or "deliver"
    reason: str | None = None
    faces: frozenset[FaceId] = frozenset()
    entry: PitEntry | None = None
    cached: ContentRecord | None = None


@dataclass(frozen=True)
class Disposition:
    """What happened to one interest taken off the processing edge."""

    face: FaceId
    interest: Interest
    role: str  # "forward" or "tie"
    action: str  # "forwarded", "aggregated", "cs_hit", "no_route"
    out_face: FaceId | None = None
    entry: PitEntry | None = None
    record: ContentRecord | None = None


class Router:
    def __init__(
        self,
        consumer_faces=(),
        fib: Fib | None = None,
        cs_capacity: int = DEFAULT_CS_CAPACITY,
        pit_timeout: float = DEFAULT_PIT_TIMEOUT,
        starvation: StarvationConfig | None = None,
    ):
        self.cs = ContentStore(cs_capacity)
        self.pit = Pit()
        self.fib = fib or Fib()
        self.pit_timeout = pit_timeout
        self.scheduler = Scheduler(consumer_faces, starvation)
        self.priorities: PriorityTable | None = None

    def on_interest_arrival(self, face: FaceId, interest: Interest, now: float) -> ArrivalAction:
        queue = self.scheduler.queue(face)  # raises UnknownFace
        record = self.cs.lookup(interest.name)
        if record is not None:
            return ArrivalAction("serve_from_cs", record)
        self.scheduler.enqueue(queue.face, interest, now)
        return ArrivalAction("enqueue")

    def run_cycle(
        self, rng: random.Random, now: float
    ) -> tuple[SchedulerDecision | None, list[Disposition]]:
        """Select from the processing edge and record PIT state for the result.

        The forwarded interest is handled first, so tie joiners land in the
        PIT entry it created.
        """
        decision = self.scheduler.select_next(self.priorities, rng, now)
        if decision is None:
            return None, []
        out = []
        for n, (face, interest) in enumerate(decision.served):
            out.append(self._dispose(face, interest, "forward" if n == 0 else "tie", now))
        return decision, out

    def _dispose(self, face: FaceId, interest: Interest, role: str, now: float) -> Disposition:
        record = self.cs.lookup(interest.name)
        if record is not None:
            return Disposition(face, interest, role, "cs_hit", record=record)
        entry = self.pit.find(interest.name)
        if entry is not None:
            self.pit.add_face(interest.name, face, now, self.pit_timeout)
            entry.interests.append(interest)
            return Disposition(face, interest, role, "aggregated", entry=entry)
        out_face = self.fib.lpm(interest.name)
        if out_face is None:
            return Disposition(face, interest, role, "no_route")
        _, entry = self.pit.add_face(interest.name, face, now, self.pit_timeout)
        entry.interests.append(interest)
        return Disposition(face, interest, role, "forwarded", out_face=out_face, entry=entry)

    def on_data_arrival(self, face: FaceId, chunk: DataChunk, now: float) -> DataAction:
        # content validation is a no-op here
        if self.cs.peek(chunk.content_name) is not None:
            return DataAction("discard", reason="duplicate")
        entry = self.pit.match_data(chunk.name)
        if entry is None:
            return DataAction("discard", reason="unsolicited")
        entry.chunks_received += 1
        if entry.first_chunk_at is None:
            entry.first_chunk_at = now
        cached = None
        if chunk.is_final:
            self.pit.remove(entry.name)
            # only a complete train can be reassembled
            if entry.chunks_received >= chunk.chunk_count:
                cached = ContentRecord(chunk.content_name, chunk.content_size, now)
                self.cs.insert(cached)
        return DataAction("deliver", faces=frozenset(entry.faces), entry=entry, cached=cached)

    def dump_tables(self) -> str:
        """Tab-separated rows for every CS, PIT and FIB entry."""
        rows = ["table\tname\tvalue"]
        for name in self.cs.names():
            rows.append(f"cs\t{name}\tsize={self.cs.peek(name).size}")
        for e in self.pit:
            faces = ",".join(str(f) for f in sorted(e.faces))
            rows.append(f"pit\t{e.name}\tfaces={faces};expiry={e.expiry!r}")
        for prefix, f in self.fib.entries():
            rows.append(f"fib\t{prefix}\tface={f}")
        return "\n".join(rows) + "\n"
