"""Size limits and error types shared by every module."""

from __future__ import annotations

import contextlib
import dataclasses
import os


class BKRInputError(ValueError):
    """Malformed or inconsistent input (shape mismatch, bad pattern, ...)."""


class ResourceLimitError(RuntimeError):
    """The request would exceed a configured size or memory cap."""


@dataclasses.dataclass
class Limits:
    max_dims: int = 24
    max_points: int = 2**26
    # bytes allowed for one cylinder table (2^d rows of N booleans)
    max_table_bytes: int = 2**30


def _from_env() -> Limits:
    lim = Limits()
    for field in dataclasses.fields(Limits):
        raw = os.environ.get("BKRLAB_" + field.name.upper())
        if raw:
            setattr(lim, field.name, int(raw))
    return lim


limits = _from_env()


@contextlib.contextmanager
def override_limits(**changes):
    """Temporarily change entries of the global `limits`."""
    old = dataclasses.replace(limits)
    for key, value in changes.items():
        if not hasattr(limits, key):
            raise AttributeError(key)
        setattr(limits, key, value)
    try:
        yield limits
    finally:
        for field in dataclasses.fields(Limits):
            setattr(limits, field.name, getattr(old, field.name))
