"""Scenario files: topology, catalog, priorities and workload in TOML."""

from __future__ import annotations

import copy
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from ccnprio.names import ContentName, MalformedName, parse_name
from ccnprio.priority import Announcement, PriorityConflict, PriorityTable, agree
from ccnprio.sim.catalog import ContentType, SizeDistribution, WorkloadItem


class InvalidScenario(ValueError):
    pass


@dataclass(frozen=True)
class LinkSpec:
    bandwidth: float
    propagation_delay: float
    buffer_capacity: int


@dataclass(frozen=True)
class ConsumerSpec:
    cid: str
    face: int
    link: LinkSpec


@dataclass(frozen=True)
class PublisherSpec:
    pid: str
    face: int
    link: LinkSpec
    base_latency: float
    read_rate: float
    contents: tuple[ContentType, ...]

    def announcement(self) -> Announcement:
        return Announcement(self.pid, tuple((c.prefix, c.priority) for c in self.contents))


@dataclass(frozen=True)
class RouterSpec:
    cs_capacity: int = 64
    pit_timeout: float = 4.0
    cycle_cost: float = 1e-4
    starvation_threshold: int = 25
    interest_size: int = 100
    control_size: int = 100


@dataclass(frozen=True)
class Scenario:
    name: str
    seed: int
    horizon: float | None
    count: int
    duration: float
    router: RouterSpec
    consumers: tuple[ConsumerSpec, ...]
    publishers: tuple[PublisherSpec, ...]
    fib: tuple[tuple[ContentName, int], ...]
    explicit_workload: tuple[WorkloadItem, ...] | None = None
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def catalog(self) -> list[ContentType]:
        return [c for p in self.publishers for c in p.contents]

    def priority_table(self) -> PriorityTable:
        return agree([p.announcement() for p in self.publishers])

    def with_overrides(self, **changes) -> Scenario:
        """Re-parse with top-level or ``section.key`` values replaced."""
        raw = copy.deepcopy(self.raw)
        for key, value in changes.items():
            node = raw
            *path, leaf = key.split(".")
            for part in path:
                node = node.setdefault(part, {})
            node[leaf] = value
        return from_dict(raw)


def _link(d: dict, where: str) -> LinkSpec:
    try:
        spec = LinkSpec(float(d["bandwidth"]), float(d["propagation_delay"]), int(d["buffer_capacity"]))
    except KeyError as exc:
        raise InvalidScenario(f"{where}: missing link field {exc.args[0]}") from None
    if spec.bandwidth <= 0 or spec.propagation_delay <= 0 or spec.buffer_capacity <= 0:
        raise InvalidScenario(f"{where}: link parameters must be positive")
    return spec


def _name(text: str, where: str) -> ContentName:
    try:
        return parse_name(text)
    except MalformedName as exc:
        raise InvalidScenario(f"{where}: {exc}") from None


def _content(d: dict, where: str) -> ContentType:
    try:
        size = d["size"]
        sizes = SizeDistribution(size.get("dist", "uniform"), int(size["low"]), int(size.get("high", size["low"])))
        return ContentType(
            _name(d["prefix"], where),
            int(d["priority"]),
            sizes,
            int(d.get("chunk_size", 4096)),
            int(d.get("objects", 1)),
        )
    except KeyError as exc:
        raise InvalidScenario(f"{where}: missing field {exc.args[0]}") from None
    except ValueError as exc:
        if isinstance(exc, InvalidScenario):
            raise
        raise InvalidScenario(f"{where}: {exc}") from None


def from_dict(raw: dict) -> Scenario:
    """Build and validate a scenario from parsed TOML."""
    r = raw.get("router", {})
    router = RouterSpec(
        int(r.get("cs_capacity", 64)),
        float(r.get("pit_timeout", 4.0)),
        float(r.get("cycle_cost", 1e-4)),
        int(r.get("starvation_threshold", 25)),
        int(r.get("interest_size", 100)),
        int(r.get("control_size", 100)),
    )
    consumers = tuple(
        ConsumerSpec(str(c.get("id", f"C{i + 1}")), int(c["face"]), _link(c, f"consumer {i + 1}"))
        for i, c in enumerate(raw.get("consumers", []))
    )
    publishers = []
    for i, p in enumerate(raw.get("publishers", [])):
        where = f"publisher {p.get('id', i + 1)}"
        try:
            publishers.append(
                PublisherSpec(
                    str(p.get("id", f"P{i + 1}")),
                    int(p["face"]),
                    _link(p, where),
                    float(p.get("base_latency", 0.002)),
                    float(p["read_rate"]),
                    tuple(_content(c, where) for c in p.get("content", [])),
                )
            )
        except KeyError as exc:
            raise InvalidScenario(f"{where}: missing field {exc.args[0]}") from None
    fib = tuple((_name(e["prefix"], "fib"), int(e["face"])) for e in raw.get("fib", []))
    if not fib:
        fib = tuple((c.prefix, p.face) for p in publishers for c in p.contents)

    wl = raw.get("workload", {})
    explicit = None
    if "interests" in wl:
        explicit = tuple(
            sorted(
                (WorkloadItem(float(e["time"]), int(e["face"]), _name(e["name"], "workload")) for e in wl["interests"]),
                key=lambda it: it.time,
            )
        )
    horizon = raw.get("horizon")
    scenario = Scenario(
        name=str(raw.get("name", "scenario")),
        seed=int(raw.get("seed", 1)),
        horizon=None if horizon is None else float(horizon),
        count=len(explicit) if explicit is not None else int(wl.get("count", 100)),
        duration=float(wl.get("duration", 10.0)),
        router=router,
        consumers=consumers,
        publishers=tuple(publishers),
        fib=fib,
        explicit_workload=explicit,
        raw=copy.deepcopy(raw),
    )
    validate(scenario)
    return scenario


def validate(s: Scenario) -> None:
    """Raise :class:`InvalidScenario` on any structural problem."""
    if not s.consumers:
        raise InvalidScenario("at least one consumer is required")
    if not s.publishers:
        raise InvalidScenario("at least one publisher is required")
    faces = [c.face for c in s.consumers] + [p.face for p in s.publishers]
    if len(set(faces)) != len(faces):
        raise InvalidScenario(f"face ids must be unique, got {faces}")
    if any(f < 0 for f in faces):
        raise InvalidScenario("face ids must be non-negative")
    upstream = {p.face for p in s.publishers}
    seen = set()
    for prefix, face in s.fib:
        if face not in upstream:
            raise InvalidScenario(f"FIB entry {prefix} points at dangling face {face}")
        if prefix in seen:
            raise InvalidScenario(f"duplicate FIB prefix {prefix}")
        seen.add(prefix)
    for p in s.publishers:
        if not p.contents:
            raise InvalidScenario(f"publisher {p.pid} hosts no content")
        if p.read_rate <= 0 or p.base_latency < 0:
            raise InvalidScenario(f"publisher {p.pid}: read_rate must be positive, base_latency non-negative")
        try:
            p.announcement()
        except ValueError as exc:
            raise InvalidScenario(str(exc)) from None
    try:
        table = s.priority_table()
    except PriorityConflict as exc:
        raise InvalidScenario(f"priority conflict: {exc}") from None
    hosted = {c.prefix for c in s.catalog}
    if set(table.entries) != hosted:
        raise InvalidScenario("catalog and priority table cover different prefixes")
    r = s.router
    if r.cs_capacity < 1 or r.pit_timeout <= 0 or r.cycle_cost <= 0 or r.starvation_threshold < 1:
        raise InvalidScenario("router parameters must be positive")
    if r.interest_size <= 0 or r.control_size <= 0:
        raise InvalidScenario("packet sizes must be positive")
    if s.count < 1 or s.duration <= 0:
        raise InvalidScenario("workload needs count >= 1 and duration > 0")
    if s.horizon is not None and s.horizon <= 0:
        raise InvalidScenario("horizon must be positive")
    consumer_faces = {c.face for c in s.consumers}
    for item in s.explicit_workload or ():
        if item.face not in consumer_faces:
            raise InvalidScenario(f"workload interest at {item.time} uses unknown consumer face {item.face}")
        if item.time < 0:
            raise InvalidScenario("workload times must be non-negative")


def builtin_scenarios() -> list[str]:
    root = resources.files("ccnprio") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def read_raw(source: str | Path) -> dict:
    path = Path(source)
    try:
        if path.suffix != ".toml" and not path.exists():
            text = (resources.files("ccnprio") / "scenarios" / f"{source}.toml").read_text(encoding="utf-8")
        else:
            text = path.read_text(encoding="utf-8")
    except (FileNotFoundError, OSError) as exc:
        raise InvalidScenario(f"cannot read scenario {source}: {exc}") from None
    try:
        return tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise InvalidScenario(f"{source}: {exc}") from None


def load_scenario(source: str | Path = "default") -> Scenario:
    """Load a scenario from a TOML path or a built-in name such as ``default``."""
    return from_dict(read_raw(source))
