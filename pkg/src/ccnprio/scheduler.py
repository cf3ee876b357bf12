"""Per-consumer interest queues and the priority check pointer.

Each consumer face owns a FIFO queue at the router. Once per processing
cycle the check pointer looks at the head interest of every non-empty
queue and forwards the one naming the highest-priority content. Heads that
ask for exactly the same name as the winner are folded into its PIT entry
instead of being forwarded again; which of them is forwarded is drawn with
``rng.randrange(k)`` over the tied heads ordered by face.

Every queue carries a starvation counter. It counts cycles in which some
other queue was served while this one waited. A queue whose counter reaches
the threshold is force-served: priority checking pauses for as many cycles
as there are such queues, and they are served one by one in the order
their counters reached the threshold (face id breaks ties). The set of
queues in a suspension is frozen when the suspension starts.

When several heads share the top priority without naming the same content
(two objects under one announced prefix), the head that reached the edge
first wins, then the lowest face.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from ccnprio.packets import FaceId, Interest
from ccnprio.priority import PriorityConflict, PriorityTable

DEFAULT_STARVATION_THRESHOLD = 25


class UnknownFace(KeyError):
    pass


class EmptyQueue(LookupError):
    pass


@dataclass(frozen=True)
class StarvationConfig:
    threshold: int = DEFAULT_STARVATION_THRESHOLD

    def __post_init__(self) -> None:
        if self.threshold < 1:
            raise ValueError("starvation threshold must be >= 1")


@dataclass
class InterestQueue:
    face: FaceId
    items: deque = field(default_factory=deque)
    counter: int = 0
    reached_at: float | None = None

    def __len__(self) -> int:
        return len(self.items)

    @property
    def head(self) -> Interest | None:
        return self.items[0] if self.items else None


@dataclass(frozen=True)
class SchedulerDecision:
    mode: str  # "priority" or "forced"
    forwarded: tuple[FaceId, Interest] | None
    pit_joiners: tuple[tuple[FaceId, Interest], ...] = ()
    forced_faces_pending: int = 0

    @property
    def served(self) -> list[tuple[FaceId, Interest]]:
        out = [self.forwarded] if self.forwarded else []
        return out + list(self.pit_joiners)


def _reach_key(q: InterestQueue) -> tuple[float, FaceId]:
    return (-math.inf if q.reached_at is None else q.reached_at, q.face)


def _edge_key(q: InterestQueue) -> tuple[float, FaceId]:
    t = q.items[0].edge_arrival_at
    return (-math.inf if t is None else t, q.face)


class Scheduler:
    def __init__(self, faces=(), config: StarvationConfig | None = None):
        self.config = config or StarvationConfig()
        self.queues: dict[FaceId, InterestQueue] = {}
        self.forced_pending: list[FaceId] = []
        for f in faces:
            self.add_queue(f)

    def add_queue(self, face: FaceId) -> InterestQueue:
        if face in self.queues:
            raise ValueError(f"face {face} already has a queue")
        self.queues[face] = InterestQueue(face)
        self.queues = dict(sorted(self.queues.items()))
        return self.queues[face]

    def queue(self, face: FaceId) -> InterestQueue:
        try:
            return self.queues[face]
        except KeyError:
            raise UnknownFace(face) from None

    def __len__(self) -> int:
        return sum(len(q) for q in self.queues.values())

    def has_work(self) -> bool:
        return any(q.items for q in self.queues.values())

    def enqueue(self, face: FaceId, interest: Interest, now: float) -> None:
        q = self.queue(face)
        q.items.append(interest)
        if len(q.items) == 1:
            interest.edge_arrival_at = now

    def drop_head(self, face: FaceId, now: float) -> Interest:
        q = self.queue(face)
        if not q.items:
            raise EmptyQueue(face)
        head = q.items.popleft()
        if q.items:
            q.items[0].edge_arrival_at = now
        return head

    def _bump(self, queues, served: set[FaceId], now: float) -> None:
        t = self.config.threshold
        for q in queues:
            if q.face in served:
                q.counter = 0
                q.reached_at = None
            elif q.counter < t:
                q.counter += 1
                if q.counter == t:
                    q.reached_at = now

    def select_next(
        self,
        priorities: PriorityTable | None,
        rng: random.Random,
        now: float,
    ) -> SchedulerDecision | None:
        if priorities is None or not priorities.agreed:
            return None
        waiting = [q for q in self.queues.values() if q.items]
        if not waiting:
            return None

        if not self.forced_pending:
            due = [q for q in waiting if q.counter >= self.config.threshold]
            self.forced_pending = [q.face for q in sorted(due, key=_reach_key)]
        while self.forced_pending:
            face = self.forced_pending.pop(0)
            if not self.queues[face].items:
                continue
            pending = set(self.forced_pending)
            others = [q for q in waiting if q.face not in pending]
            self._bump(others, {face}, now)
            interest = self.drop_head(face, now)
            return SchedulerDecision("forced", (face, interest), (), len(self.forced_pending))

        heads = []
        owners: dict[int, set] = {}
        for q in waiting:
            prefix, level = priorities.match(q.items[0].name)
            heads.append((level, q))
            owners.setdefault(level, set()).add(prefix)
        for level, prefixes in owners.items():
            if len(prefixes) > 1:
                names = ", ".join(sorted(str(p) for p in prefixes))
                raise PriorityConflict(f"priority {level} shared by {names}")

        top = max(level for level, _ in heads)
        best = [q for level, q in heads if level == top]
        lead = min(best, key=_edge_key)
        group = [q for q in best if q.items[0].name == lead.items[0].name]
        pick = group[rng.randrange(len(group))] if len(group) > 1 else group[0]

        self._bump(waiting, {q.face for q in group}, now)
        forwarded = (pick.face, self.drop_head(pick.face, now))
        joiners = tuple((q.face, self.drop_head(q.face, now)) for q in group if q is not pick)
        return SchedulerDecision("priority", forwarded, joiners, 0)
