"""Hierarchical content names and component-wise prefix matching."""

from __future__ import annotations

from dataclasses import dataclass

SEPARATOR = "/"


class MalformedName(ValueError):
    """Raised when text cannot be parsed as a content name."""


@dataclass(frozen=True, order=True, slots=True)
class ContentName:
    components: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.components:
            raise MalformedName("a name needs at least one component")
        for part in self.components:
            if not isinstance(part, str) or not part or SEPARATOR in part:
                raise MalformedName(f"bad name component {part!r}")

    def __str__(self) -> str:
        return SEPARATOR + SEPARATOR.join(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def child(self, *parts: str) -> ContentName:
        return ContentName(self.components + tuple(parts))

    def prefixes(self):
        """Yield every prefix of this name, longest first."""
        for k in range(len(self.components), 0, -1):
            yield ContentName(self.components[:k])


def parse_name(text: str) -> ContentName:
    """Parse the canonical ``/a/b/c`` form.

    >>> parse_name("/data/bank/transactions").components
    ('data', 'bank', 'transactions')
    """
    if not isinstance(text, str) or not text.startswith(SEPARATOR):
        raise MalformedName(f"name must start with '/': {text!r}")
    parts = text[1:].split(SEPARATOR)
    if any(not p for p in parts):
        raise MalformedName(f"empty segment in {text!r}")
    return ContentName(tuple(parts))


def is_prefix_of(prefix: ContentName, name: ContentName) -> bool:
    n = len(prefix.components)
    return n <= len(name.components) and name.components[:n] == prefix.components
