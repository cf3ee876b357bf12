"""Publisher priority announcements, agreement, and downstream propagation.

Publishers announce the prefixes they host together with a priority level.
The levels are agreed in two rounds: every publisher proposes its own
entries to every other publisher, and once a publisher holds all proposals
it merges them and acknowledges the merged table to everyone. The agreed
table is then handed down the router chain hop by hop.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from ccnprio.names import ContentName

UNMATCHED_PRIORITY = 0


class PriorityConflict(ValueError):
    """Two prefixes share a level, or one prefix carries two levels."""


@dataclass(frozen=True)
class Announcement:
    publisher_id: str
    entries: tuple[tuple[ContentName, int], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        seen = set()
        for prefix, level in self.entries:
            if not isinstance(level, int) or level <= 0:
                raise ValueError(f"{self.publisher_id}: priority must be a positive integer, got {level!r}")
            if prefix in seen:
                raise ValueError(f"{self.publisher_id}: duplicate prefix {prefix}")
            seen.add(prefix)


@dataclass
class PriorityTable:
    """Prefix to priority map; a larger number means a higher priority."""

    entries: dict[ContentName, int] = field(default_factory=dict)
    agreed: bool = False

    def __post_init__(self) -> None:
        self._by_components = {p.components: v for p, v in self.entries.items()}

    def match(self, name: ContentName) -> tuple[ContentName | None, int]:
        """Longest announced prefix covering ``name`` and its level."""
        comps = name.components
        table = self._by_components
        for k in range(len(comps), 0, -1):
            level = table.get(comps[:k])
            if level is not None:
                return ContentName(comps[:k]), level
        return None, UNMATCHED_PRIORITY

    def lookup(self, name: ContentName) -> int:
        return self.match(name)[1]

    def levels(self) -> list[int]:
        return sorted(self.entries.values())

    def copy(self) -> PriorityTable:
        return PriorityTable(dict(self.entries), self.agreed)

    def rows(self) -> list[tuple[str, int]]:
        """(prefix, priority) rows, highest priority first."""
        return [(str(p), v) for p, v in sorted(self.entries.items(), key=lambda kv: -kv[1])]

    def to_text(self) -> str:
        lines = ["prefix\tpriority"]
        lines += [f"{p}\t{v}" for p, v in self.rows()]
        return "\n".join(lines) + "\n"


def _check_distinct(entries: dict[ContentName, int]) -> None:
    owner: dict[int, ContentName] = {}
    for prefix, level in entries.items():
        if level in owner and owner[level] != prefix:
            raise PriorityConflict(f"priority {level} claimed by both {owner[level]} and {prefix}")
        owner[level] = prefix


def agree(announcements: Sequence[Announcement]) -> PriorityTable:
    """Merge announcements into one agreed table.

    Raises :class:`PriorityConflict` when the union would give two prefixes
    the same level or one prefix two different levels.
    """
    if not announcements:
        raise ValueError("agreement needs at least one announcement")
    merged: dict[ContentName, int] = {}
    for ann in announcements:
        for prefix, level in ann.entries:
            if prefix in merged and merged[prefix] != level:
                raise PriorityConflict(f"{prefix} announced with priorities {merged[prefix]} and {level}")
            merged[prefix] = level
    _check_distinct(merged)
    # canonical order so that tables agreed from permuted inputs compare and print identically
    ordered = dict(sorted(merged.items(), key=lambda kv: (-kv[1], kv[0].components)))
    return PriorityTable(ordered, agreed=True)


def lookup_priority(table: PriorityTable, name: ContentName) -> int:
    """Level of the longest matching prefix, or 0 when nothing matches."""
    return table.lookup(name)


def propagate(
    table: PriorityTable,
    router_chain: Sequence[object],
    start: float = 0.0,
    hop_delays: Sequence[float] | float = 0.0,
) -> list[float]:
    """Install copies of ``table`` on each router, upstream to downstream.

    ``hop_delays[i]`` is the delay of the hop that reaches router ``i``.
    Each router gets its own copy in a ``priorities`` attribute. Returns
    the installation time per router.
    """
    if not table.agreed:
        raise ValueError("only an agreed table can be propagated")
    if isinstance(hop_delays, (int, float)):
        hop_delays = [float(hop_delays)] * len(router_chain)
    if len(hop_delays) != len(router_chain):
        raise ValueError("need one hop delay per router")
    times = []
    now = start
    for router, delay in zip(router_chain, hop_delays):
        now += delay
        router.priorities = table.copy()
        times.append(now)
    return times


class AgreementSession:
    """Bookkeeping for the propose/acknowledge exchange between publishers.

    The simulator delivers messages; this class only tracks who has heard
    what and says which messages to send next.
    """

    def __init__(self, announcements: Iterable[Announcement]):
        self.announcements = {a.publisher_id: a for a in announcements}
        if not self.announcements:
            raise ValueError("agreement needs at least one publisher")
        self.members = sorted(self.announcements)
        self._proposals = {p: {p} for p in self.members}
        self._acks = {p: {p} for p in self.members}
        self.table: PriorityTable | None = None

    def opening_messages(self) -> list[tuple[str, str, str]]:
        """(phase, src, dst) proposals every publisher sends first."""
        return [("propose", s, d) for s in self.members for d in self.members if s != d]

    def receive(self, phase: str, src: str, dst: str) -> list[tuple[str, str, str]]:
        """Deliver one message; return follow-up messages from ``dst``."""
        if phase == "propose":
            heard = self._proposals[dst]
            before = len(heard)
            heard.add(src)
            if len(heard) == len(self.members) and before < len(heard):
                return self._merge_and_ack(dst)
            return []
        if phase == "ack":
            self._acks[dst].add(src)
            return []
        raise ValueError(f"unknown phase {phase!r}")

    def _merge_and_ack(self, pub: str) -> list[tuple[str, str, str]]:
        table = agree([self.announcements[p] for p in self.members])
        if self.table is None:
            self.table = table
        return [("ack", pub, d) for d in self.members if d != pub]

    def start_solo(self) -> None:
        """A lone publisher agrees with itself immediately."""
        if len(self.members) == 1:
            self.table = agree(list(self.announcements.values()))

    @property
    def complete(self) -> bool:
        if self.table is None:
            return False
        return all(len(self._acks[p]) == len(self.members) for p in self.members)
