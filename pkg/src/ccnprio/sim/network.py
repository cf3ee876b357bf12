"""Point-to-point links and publisher response timing."""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from ccnprio.names import ContentName
from ccnprio.sim.catalog import ContentType


@dataclass
class Link:
    """One direction of a link: a FIFO single server with a packet buffer.

    The buffer counts packets still being serialized or waiting to be.
    """

    bandwidth: float  # bits per second
    propagation_delay: float
    buffer_capacity: int
    busy_until: float = 0.0
    drops: int = 0
    _departures: deque = field(default_factory=deque, repr=False)

    def __post_init__(self) -> None:
        if self.bandwidth <= 0 or self.propagation_delay <= 0 or self.buffer_capacity <= 0:
            raise ValueError("link bandwidth, delay and buffer must be positive")

    def serialization(self, size: int) -> float:
        return size * 8 / self.bandwidth

    def latency(self, size: int) -> float:
        """Idle-link delivery delay for ``size`` bytes."""
        return self.serialization(size) + self.propagation_delay

    def backlog(self, now: float) -> int:
        while self._departures and self._departures[0] <= now:
            self._departures.popleft()
        return len(self._departures)

    def transmit(self, size: int, now: float) -> float | None:
        """Arrival time at the far end, or None when the buffer is full."""
        if self.backlog(now) >= self.buffer_capacity:
            self.drops += 1
            return None
        start = max(now, self.busy_until)
        self.busy_until = start + self.serialization(size)
        self._departures.append(self.busy_until)
        return self.busy_until + self.propagation_delay


@dataclass(frozen=True)
class Response:
    content_name: ContentName
    size: int
    chunk_size: int
    first_emit: float
    pace: float

    @property
    def chunk_count(self) -> int:
        return math.ceil(self.size / self.chunk_size)

    def payload(self, index: int) -> int:
        if index < self.chunk_count - 1:
            return self.chunk_size
        return self.size - self.chunk_size * (self.chunk_count - 1)

    def emit_time(self, index: int) -> float:
        return self.first_emit + index * self.pace


@dataclass
class Publisher:
    pid: str
    face: int
    contents: list[ContentType]
    base_latency: float
    read_rate: float  # bytes per second
    uplink: Link  # publisher -> router
    downlink: Link  # router -> publisher

    def hosts(self, name: ContentName) -> ContentType | None:
        best = None
        for ctype in self.contents:
            if ctype.covers(name) and (best is None or len(ctype.prefix) > len(best.prefix)):
                best = ctype
        return best

    def response_latency(self, size: int) -> float:
        return self.base_latency + size / self.read_rate

    def respond(self, name: ContentName, now: float, rng: random.Random) -> Response | None:
        """Draw the object size and time its chunk train; None for unhosted names."""
        ctype = self.hosts(name)
        if ctype is None:
            return None
        size = ctype.sizes.draw(rng)
        return Response(
            name,
            size,
            ctype.chunk_size,
            first_emit=now + self.response_latency(size),
            pace=self.uplink.serialization(ctype.chunk_size),
        )
