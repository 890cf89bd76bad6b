"""Count and frequency series value types, plus their CSV forms.

A :class:`CountSeries` holds yearly token counts of two competing variants
(``count_a`` is the variant whose frequency is tracked).  A
:class:`FrequencySeries` is what the increment test consumes: time points,
relative frequencies strictly inside (0, 1) and the token total behind each
point.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .errors import DuplicateYear, NegativeCount, ParseError, ValidationError

COUNT_HEADER = ("year", "count_a", "count_b")
FREQUENCY_HEADER = ("t", "v", "tokens")


class CountRecord(NamedTuple):
    year: int
    count_a: int
    count_b: int

    @property
    def total(self) -> int:
        return self.count_a + self.count_b


@dataclass(frozen=True)
class CountSeries:
    records: tuple[CountRecord, ...]
    label_a: str = "a"
    label_b: str = "b"

    def __post_init__(self):
        recs = tuple(CountRecord(int(y), int(a), int(b)) for y, a, b in self.records)
        object.__setattr__(self, "records", recs)
        if not recs:
            raise ValidationError("count series needs at least one record")
        for prev, cur in zip(recs, recs[1:]):
            if cur.year == prev.year:
                raise DuplicateYear(f"duplicate year {cur.year}")
            if cur.year < prev.year:
                raise ValidationError("years must be strictly increasing")
        for r in recs:
            if r.count_a < 0 or r.count_b < 0:
                raise NegativeCount(f"negative count in year {r.year}")
        if not any(r.total > 0 for r in recs):
            raise ValidationError("count series has no tokens")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], label_a: str = "a",
                  label_b: str = "b") -> "CountSeries":
        """Build from unsorted ``(year, count_a, count_b)`` rows."""
        rows = sorted((tuple(r) for r in rows), key=lambda r: r[0])
        return cls(tuple(CountRecord(*r) for r in rows), label_a, label_b)

    @property
    def years(self) -> list[int]:
        return [r.year for r in self.records]

    def occupied(self) -> list[CountRecord]:
        """Records with at least one token."""
        return [r for r in self.records if r.total > 0]

    def __len__(self) -> int:
        return len(self.records)


def total_tokens(cs: CountSeries) -> int:
    """Total number of tokens of both variants over the whole series."""
    return sum(r.total for r in cs.records)


@dataclass(frozen=True)
class FrequencySeries:
    t: tuple[float, ...]
    v: tuple[float, ...]
    token_total: tuple[int, ...]

    def __post_init__(self):
        t = tuple(float(x) for x in self.t)
        v = tuple(float(x) for x in self.v)
        m = tuple(int(x) for x in self.token_total)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "token_total", m)
        if not (len(t) == len(v) == len(m)):
            raise ValidationError("t, v and token_total must have equal length")
        if len(t) < 2:
            raise ValidationError("frequency series needs at least 2 points")
        for a, b in zip(t, t[1:]):
            if not b > a:
                raise ValidationError("time points must be strictly increasing")
        for x in v:
            if not (0.0 < x < 1.0) or math.isnan(x):
                raise ValidationError(f"frequency {x!r} outside the open interval (0, 1)")
        for x in m:
            if x < 1:
                raise ValidationError("token totals must be positive")

    @classmethod
    def from_points(cls, points: Iterable[tuple[float, float]],
                    token_total: Sequence[int] | None = None) -> "FrequencySeries":
        pts = list(points)
        if token_total is None:
            token_total = [1] * len(pts)
        return cls(tuple(p[0] for p in pts), tuple(p[1] for p in pts), tuple(token_total))

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.t, self.v))

    def flipped(self) -> "FrequencySeries":
        """The same series seen from the other variant (v -> 1 - v)."""
        return FrequencySeries(self.t, tuple(1.0 - x for x in self.v), self.token_total)

    def __len__(self) -> int:
        return len(self.t)


def _rows(text: str):
    # universal newlines handle both LF and CRLF
    for lineno, line in enumerate(io.StringIO(text, newline=None), start=1):
        line = line.strip()
        if line:
            yield lineno, [f.strip() for f in line.split(",")]


def _check_header(rows, expected: tuple[str, ...]):
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise ParseError("empty input", 1) from None
    if tuple(h.lower() for h in header) != expected:
        raise ParseError(f"expected header {','.join(expected)}", lineno)


def parse_counts_csv(text: str, label_a: str = "a", label_b: str = "b") -> CountSeries:
    rows = _rows(text)
    _check_header(rows, COUNT_HEADER)
    parsed = []
    seen: set[int] = set()
    for lineno, fields in rows:
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", lineno)
        try:
            year, a, b = (int(f) for f in fields)
        except ValueError:
            raise ParseError("non-integer field", lineno) from None
        if a < 0 or b < 0:
            raise NegativeCount("negative count", lineno)
        if year in seen:
            raise DuplicateYear(f"line {lineno}: duplicate year {year}")
        seen.add(year)
        parsed.append((year, a, b))
    if not parsed:
        raise ParseError("no data rows")
    return CountSeries.from_rows(parsed, label_a, label_b)


def emit_counts_csv(cs: CountSeries) -> str:
    lines = [",".join(COUNT_HEADER)]
    lines += [f"{r.year},{r.count_a},{r.count_b}" for r in cs.records]
    return "\n".join(lines) + "\n"


def parse_frequency_csv(text: str) -> FrequencySeries:
    rows = _rows(text)
    _check_header(rows, FREQUENCY_HEADER)
    t, v, m = [], [], []
    for lineno, fields in rows:
        if len(fields) != 3:
            raise ParseError(f"expected 3 fields, got {len(fields)}", lineno)
        try:
            t.append(float(fields[0]))
            v.append(float(fields[1]))
            m.append(int(fields[2]))
        except ValueError:
            raise ParseError("malformed number", lineno) from None
    return FrequencySeries(tuple(t), tuple(v), tuple(m))


def emit_frequency_csv(fs: FrequencySeries) -> str:
    lines = [",".join(FREQUENCY_HEADER)]
    lines += [f"{t!r},{v!r},{m}" for t, v, m in zip(fs.t, fs.v, fs.token_total)]
    return "\n".join(lines) + "\n"
