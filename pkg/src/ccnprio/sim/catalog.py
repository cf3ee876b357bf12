"""Content types, their size classes, and interest workloads."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ccnprio.names import ContentName, is_prefix_of


@dataclass(frozen=True)
class SizeDistribution:
    kind: str  # "uniform", "loguniform" or "fixed"
    low: int
    high: int

    def __post_init__(self) -> None:
        if self.kind not in ("uniform", "loguniform", "fixed"):
            raise ValueError(f"unknown size distribution {self.kind!r}")
        if self.low <= 0 or self.high < self.low:
            raise ValueError(f"bad size range {self.low}..{self.high}")

    def draw(self, rng: random.Random) -> int:
        if self.kind == "fixed" or self.low == self.high:
            return self.low
        if self.kind == "uniform":
            return rng.randint(self.low, self.high)
        return int(round(math.exp(rng.uniform(math.log(self.low), math.log(self.high)))))

    @property
    def mean(self) -> float:
        if self.kind == "fixed" or self.low == self.high:
            return float(self.low)
        if self.kind == "uniform":
            return (self.low + self.high) / 2
        return (self.high - self.low) / math.log(self.high / self.low)


@dataclass(frozen=True)
class ContentType:
    prefix: ContentName
    priority: int
    sizes: SizeDistribution
    chunk_size: int = 4096
    objects: int = 1

    def __post_init__(self) -> None:
        if self.chunk_size <= 0 or self.objects < 1:
            raise ValueError(f"{self.prefix}: chunk_size and objects must be positive")

    def covers(self, name: ContentName) -> bool:
        return is_prefix_of(self.prefix, name)

    def object_name(self, k: int) -> ContentName:
        return self.prefix.child(f"obj{k}")


@dataclass(frozen=True)
class WorkloadItem:
    time: float
    face: int
    name: ContentName


@dataclass(frozen=True)
class Workload:
    interests: tuple[WorkloadItem, ...]
    seed: object
    count: int
    duration: float


def generate_workload(seed, count: int, duration: float, consumers, catalog) -> Workload:
    """Uniform generation times, consumer, content type and object.

    ``consumers`` is a sequence of face ids, ``catalog`` a sequence of
    :class:`ContentType`.
    """
    if count < 1 or duration <= 0 or not consumers or not catalog:
        raise ValueError("need count >= 1, duration > 0, consumers and catalog")
    rng = random.Random(f"workload:{seed}")
    faces = list(consumers)
    types = list(catalog)
    items = []
    for _ in range(count):
        t = rng.uniform(0.0, duration)
        if t >= duration:  # uniform() may return the upper bound
            t = math.nextafter(duration, 0.0)
        face = rng.choice(faces)
        ctype = rng.choice(types)
        name = ctype.object_name(rng.randrange(ctype.objects))
        items.append(WorkloadItem(t, face, name))
    items.sort(key=lambda it: it.time)
    return Workload(tuple(items), seed, count, duration)
