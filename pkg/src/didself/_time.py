from __future__ import annotations

import time
from datetime import datetime, timezone
from typing import Union

Instant = Union[int, float, datetime]


def to_epoch(at: Instant | None) -> int:
    """Whole seconds since the epoch; ``None`` means now. Naive datetimes are UTC."""
    if at is None:
        return int(time.time())
    if isinstance(at, datetime):
        if at.tzinfo is None:
            at = at.replace(tzinfo=timezone.utc)
        return int(at.timestamp())
    if isinstance(at, bool) or not isinstance(at, (int, float)):
        raise TypeError(f"not a time instant: {at!r}")
    return int(at)


def to_datetime(at: Instant) -> datetime:
    return datetime.fromtimestamp(to_epoch(at), tz=timezone.utc)


def parse_instant(text: str) -> int:
    """Epoch seconds from an integer string or an ISO 8601 timestamp ('Z' allowed)."""
    text = text.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return to_epoch(datetime.fromisoformat(text))
