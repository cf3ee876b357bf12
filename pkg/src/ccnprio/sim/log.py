"""Append-only run log with a fixed tab-separated text form.

Columns: time, kind, face, name, detail. Times are written with ``repr``
so that a log read back from disk reproduces every float exactly. The
detail column holds ``key=value`` pairs joined by ``;``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

COLUMNS = ("time", "kind", "face", "name", "detail")
EMPTY = "-"


@dataclass(frozen=True, slots=True)
class LogRecord:
    time: float
    kind: str
    face: int | None = None
    name: str | None = None
    detail: str = ""

    def fields(self) -> dict[str, str]:
        if not self.detail:
            return {}
        return dict(kv.split("=", 1) for kv in self.detail.split(";"))

    def get(self, key: str, default=None):
        return self.fields().get(key, default)

    def to_line(self) -> str:
        face = EMPTY if self.face is None else str(self.face)
        name = self.name or EMPTY
        return "\t".join((repr(self.time), self.kind, face, name, self.detail or EMPTY))

    @classmethod
    def from_line(cls, line: str) -> LogRecord:
        parts = line.rstrip("\n").split("\t")
        if len(parts) != len(COLUMNS):
            raise ValueError(f"expected {len(COLUMNS)} columns, got {len(parts)}: {line!r}")
        t, kind, face, name, detail = parts
        return cls(
            float(t),
            kind,
            None if face == EMPTY else int(face),
            None if name == EMPTY else name,
            "" if detail == EMPTY else detail,
        )


def detail(**kv) -> str:
    return ";".join(f"{k}={v}" for k, v in kv.items())


class EventLog:
    def __init__(self, records=None, meta: dict | None = None):
        self.records: list[LogRecord] = list(records or [])
        self.meta: dict[str, str] = dict(meta or {})

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def append(self, time: float, kind: str, face=None, name=None, **kv) -> None:
        self.records.append(LogRecord(time, kind, face, None if name is None else str(name), detail(**kv)))

    def of_kind(self, *kinds: str) -> list[LogRecord]:
        return [r for r in self.records if r.kind in kinds]

    def to_tsv(self) -> str:
        head = [f"# {k}={v}" for k, v in self.meta.items()]
        lines = head + ["\t".join(COLUMNS)] + [r.to_line() for r in self.records]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> EventLog:
        meta = {}
        records = []
        header_seen = False
        for line in text.splitlines():
            if not line:
                continue
            if line.startswith("# "):
                k, _, v = line[2:].partition("=")
                meta[k] = v
                continue
            if not header_seen:
                if tuple(line.split("\t")) != COLUMNS:
                    raise ValueError(f"bad log header: {line!r}")
                header_seen = True
                continue
            records.append(LogRecord.from_line(line))
        if not header_seen:
            raise ValueError("log has no header row")
        return cls(records, meta)

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_tsv(), encoding="utf-8")

    @classmethod
    def read(cls, path: str | Path) -> EventLog:
        return cls.from_tsv(Path(path).read_text(encoding="utf-8"))
