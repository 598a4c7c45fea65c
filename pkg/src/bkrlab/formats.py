"""Event files.

Binary: ``b"BKR1"``, then d and s_1..s_d as little-endian uint32, then the
bits packed LSB-first (bit k in byte k//8 at position k%8), zero padded.

Text: first non-comment line ``shape: s1,s2,...``; every further line is a
pattern string (digits and '*') or a comma separated point ``3,12,0``.
'#' starts a comment.
"""

from __future__ import annotations

import struct
from pathlib import Path

from .config import BKRInputError
from .dyadic import DYADIC_MAGIC, DyadicSet, load_dyadic
from .space import Event, SpaceShape, event_from_patterns

EVENT_MAGIC = b"BKR1"


def dump_event(a: Event) -> bytes:
    head = EVENT_MAGIC + struct.pack(f"<I{a.shape.d}I", a.shape.d, *a.shape.sizes)
    return head + a.packed()


def load_event(data: bytes) -> Event:
    if data[:4] != EVENT_MAGIC or len(data) < 8:
        raise BKRInputError("not an event file (bad magic)")
    (d,) = struct.unpack("<I", data[4:8])
    end = 8 + 4 * d
    if len(data) < end:
        raise BKRInputError("truncated event header")
    sizes = struct.unpack(f"<{d}I", data[8:end])
    return Event.from_packed(SpaceShape(sizes), data[end:])


def parse_event_text(text: str) -> Event:
    shape = None
    patterns: list[str] = []
    points: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if shape is None:
            if not line.startswith("shape:"):
                raise BKRInputError(f"line {lineno}: expected 'shape: s1,s2,...'")
            shape = SpaceShape.parse(line[len("shape:"):])
            continue
        if "," in line:
            try:
                points.append(tuple(int(t) for t in line.split(",") if t.strip()))
            except ValueError:
                raise BKRInputError(f"line {lineno}: bad point {line!r}") from None
        else:
            patterns.append(line)
    if shape is None:
        raise BKRInputError("missing 'shape:' line")
    a = event_from_patterns(shape, patterns)
    if points:
        a = a | Event.from_points(shape, points)
    return a


def format_event_text(a: Event) -> str:
    """Text form listing every point (patterns are not minimized)."""
    lines = [f"shape: {a.shape}"]
    digits = max(a.shape.sizes, default=1) <= 10
    for p in a.points():
        if digits:
            lines.append("".join(map(str, p)))
        else:
            lines.append(",".join(map(str, p)) + ("," if len(p) == 1 else ""))
    return "\n".join(lines) + "\n"


def read_event(path: str | Path) -> Event:
    """Load a binary or text event file (binary detected by magic)."""
    data = Path(path).read_bytes()
    if data[:4] == EVENT_MAGIC:
        return load_event(data)
    if data[:4] == DYADIC_MAGIC:
        return load_dyadic(data).cells
    try:
        return parse_event_text(data.decode("utf-8"))
    except UnicodeDecodeError:
        raise BKRInputError(f"{path}: neither a binary nor a text event file") from None


def read_dyadic(path: str | Path) -> DyadicSet:
    """Dyadic file, or any event file whose shape is a (2^n,)*d grid."""
    data = Path(path).read_bytes()
    if data[:4] == DYADIC_MAGIC:
        return load_dyadic(data)
    return DyadicSet.from_event(read_event(path))


def write_event(path: str | Path, a: Event) -> None:
    Path(path).write_bytes(dump_event(a))
