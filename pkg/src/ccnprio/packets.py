"""Interest and data packets exchanged between consumers, router and publishers."""

from __future__ import annotations

from dataclasses import dataclass

from ccnprio.names import ContentName

FaceId = int


@dataclass(slots=True, eq=False)
class Interest:
    name: ContentName
    origin_face: FaceId
    created_at: float
    edge_arrival_at: float | None = None
    iid: int = -1
    # bookkeeping filled in as the interest moves through the router
    priority: int = 0
    selected_at: float | None = None
    forwarded_at: float | None = None
    role: str | None = None
    action: str | None = None
    first_chunk_at: float | None = None
    outcome: str | None = None

    def __post_init__(self) -> None:
        if self.created_at < 0:
            raise ValueError("created_at must be non-negative")

    def __repr__(self) -> str:
        return f"Interest(#{self.iid} {self.name} face={self.origin_face})"


@dataclass(frozen=True, slots=True)
class DataChunk:
    content_name: ContentName
    chunk_index: int
    chunk_count: int
    payload_size: int
    content_size: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.chunk_index < self.chunk_count:
            raise ValueError(f"chunk index {self.chunk_index} outside 0..{self.chunk_count - 1}")
        if self.payload_size <= 0:
            raise ValueError("payload_size must be positive")

    @property
    def name(self) -> ContentName:
        return self.content_name.child("chunk", str(self.chunk_index))

    @property
    def is_final(self) -> bool:
        return self.chunk_index == self.chunk_count - 1
