"""Content-priority interest forwarding for a simulated CCN router."""

from ccnprio.names import ContentName, MalformedName, is_prefix_of, parse_name
from ccnprio.priority import Announcement, PriorityConflict, PriorityTable, agree, lookup_priority

__all__ = [
    "Announcement",
    "ContentName",
    "MalformedName",
    "PriorityConflict",
    "PriorityTable",
    "agree",
    "is_prefix_of",
    "lookup_priority",
    "parse_name",
]

__version__ = "0.1.0"
