"""Eventually-constant infinite words over a finite alphabet.

A word is stored exactly as a finite prefix plus one symbol that repeats
forever.  That family is closed under everything this package does to
sequences (shifts, segment rewriting, symbol relabeling), so all sequence
computations stay exact.

Symbols are positive integers; positions are 1-based throughout.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

INFINITY = float("inf")

_TAIL_RE = re.compile(r"^\((\d+)\)\^inf$")

__all__ = ["INFINITY", "ECSeq", "canonicalize", "common_prefix_len", "parse_seq"]


@dataclass(frozen=True, order=True)
class ECSeq:
    """Infinite word ``prefix[1] ... prefix[m] tail tail tail ...``.

    Instances are canonical: the prefix never ends with the tail symbol.
    Two values therefore denote the same infinite word iff they compare
    equal.  Build instances through :func:`canonicalize` (or ``parse_seq``)
    unless the arguments are known to be canonical already.
    """

    prefix: tuple[int, ...]
    tail: int

    def __post_init__(self):
        if self.tail < 1 or any(s < 1 for s in self.prefix):
            raise ValueError("symbols must be positive integers")
        if self.prefix and self.prefix[-1] == self.tail:
            raise ValueError(
                "prefix ends with the tail symbol; use canonicalize()"
            )

    def __getitem__(self, k: int) -> int:
        """Symbol at 1-based position ``k``."""
        if k < 1:
            raise IndexError(f"positions are 1-based, got {k}")
        return self.prefix[k - 1] if k <= len(self.prefix) else self.tail

    def head(self, m: int) -> tuple[int, ...]:
        """First ``m`` symbols as a tuple."""
        if m <= len(self.prefix):
            return self.prefix[:m]
        return self.prefix + (self.tail,) * (m - len(self.prefix))

    def shift(self, k: int = 1) -> "ECSeq":
        """Drop the first ``k`` symbols."""
        if k < 0:
            raise ValueError("shift distance must be >= 0")
        return ECSeq(self.prefix[k:], self.tail)

    def max_symbol(self) -> int:
        return max(self.prefix, default=self.tail)

    def format(self) -> str:
        parts = [str(s) for s in self.prefix]
        parts.append(f"({self.tail})^inf")
        return ".".join(parts)

    def __str__(self) -> str:
        return self.format()


def canonicalize(prefix, tail: int) -> ECSeq:
    """Build the unique canonical representation of ``prefix . tail^inf``.

    Trailing copies of the tail symbol are absorbed into the tail, so the
    results of two calls are equal iff they denote equal infinite words.
    """
    prefix = tuple(prefix)
    m = len(prefix)
    while m > 0 and prefix[m - 1] == tail:
        m -= 1
    return ECSeq(prefix[:m], tail)


def common_prefix_len(x: ECSeq, y: ECSeq) -> int | float:
    """Length of the longest common prefix; INFINITY iff ``x == y``.

    For distinct canonical words the first disagreement happens no later
    than one position past the longer prefix, so the scan below is exact.
    """
    if x == y:
        return INFINITY
    m = max(len(x.prefix), len(y.prefix)) + 1
    for k in range(1, m + 1):
        if x[k] != y[k]:
            return k - 1
    raise AssertionError("distinct canonical words must disagree in range")


def parse_seq(text: str, n: int | None = None) -> ECSeq:
    """Parse ``1.3.(2)^inf`` (dots or whitespace between symbols).

    The final token must be ``(t)^inf``.  When ``n`` is given, symbols are
    checked against the alphabet ``1..n``.
    """
    tokens = [t for t in re.split(r"[.\s]+", text.strip()) if t]
    if not tokens:
        raise ValueError("empty sequence text")
    m = _TAIL_RE.match(tokens[-1])
    if m is None:
        raise ValueError(f"sequence must end with '(t)^inf', got {tokens[-1]!r}")
    tail = int(m.group(1))
    try:
        prefix = tuple(int(t) for t in tokens[:-1])
    except ValueError as exc:
        raise ValueError(f"bad symbol in {text!r}") from exc
    if tail < 1 or any(s < 1 for s in prefix):
        raise ValueError("symbols must be positive integers")
    if n is not None and (tail > n or any(s > n for s in prefix)):
        raise ValueError(f"symbol out of range 1..{n} in {text!r}")
    return canonicalize(prefix, tail)
