"""Utility functions for ctx-sim."""

import hashlib
import itertools
import json
from fractions import Fraction
from numbers import Rational
from pathlib import Path
from typing import Any, FrozenSet, Iterable, Iterator, Tuple

from .errors import BudgetExceeded, FormatError


def parse_rational(value: Any) -> Fraction:
    """Parse an exact rational from "p/q", "p", an int or a Fraction.

    Floats are rejected: they are not exact.
    """
    if isinstance(value, bool):
        raise FormatError(f"not a rational: {value!r}")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "." in text or "e" in text.lower():
            raise FormatError(f"rationals must be written as p/q, got {value!r}")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise FormatError(f"not a rational: {value!r}")
    raise FormatError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Render as "p/q", or "p" for integers."""
    return str(Fraction(value))


def context_key(context: Iterable[str]) -> Tuple[str, ...]:
    """Canonical sort key of a measurement set."""
    return tuple(sorted(context))


def format_context(context: Iterable[str]) -> str:
    return "{" + ",".join(context_key(context)) + "}"


def subsets(items: Iterable[str]) -> Iterator[FrozenSet[str]]:
    """All subsets, ordered by size and then lexicographically."""
    ordered = sorted(items)
    for size in range(len(ordered) + 1):
        for combo in itertools.combinations(ordered, size):
            yield frozenset(combo)


def check_budget(what: str, size: int, budget: int) -> None:
    if size > budget:
        raise BudgetExceeded(what, size, budget)


def file_sha256(path: Path) -> str:
    """Content hash of a file."""
    digest = hashlib.sha256()
    with open(path, 'rb') as f:
        for chunk in iter(lambda: f.read(65536), b''):
            digest.update(chunk)
    return digest.hexdigest()


def canonical_json(data: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
