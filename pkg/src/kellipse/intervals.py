"""Exact 1D interval-union algebra.

Endpoints are int/Fraction (or +-math.inf); open/closed flags are tracked per
endpoint so unions of fixed-point sets and radius sets stay exact even for
discontinuous piecewise maps. Infinite endpoints are always open.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

NEG_INF = -math.inf
POS_INF = math.inf


def _fmt(x) -> str:
    if x == NEG_INF:
        return "-inf"
    if x == POS_INF:
        return "inf"
    if isinstance(x, Fraction) and x.denominator == 1:
        return str(x.numerator)
    return str(x)


@dataclass(frozen=True)
class Interval:
    lo: object
    hi: object
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if self.lo == NEG_INF and not self.lo_open:
            object.__setattr__(self, "lo_open", True)
        if self.hi == POS_INF and not self.hi_open:
            object.__setattr__(self, "hi_open", True)

    @classmethod
    def point(cls, x) -> "Interval":
        return cls(x, x)

    @property
    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi and not (self.lo_open or self.hi_open)

    def contains(self, x) -> bool:
        above = x > self.lo or (x == self.lo and not self.lo_open)
        below = x < self.hi or (x == self.hi and not self.hi_open)
        return above and below

    def contains_interval(self, other: "Interval") -> bool:
        if other.is_empty:
            return True
        lo_ok = self.lo < other.lo or (self.lo == other.lo and (not self.lo_open or other.lo_open))
        hi_ok = other.hi < self.hi or (other.hi == self.hi and (not self.hi_open or other.hi_open))
        return lo_ok and hi_ok

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def __str__(self) -> str:
        if self.is_point:
            return "{" + _fmt(self.lo) + "}"
        lb = "(" if self.lo_open else "["
        rb = ")" if self.hi_open else "]"
        return f"{lb}{_fmt(self.lo)}, {_fmt(self.hi)}{rb}"


def _touches(a: Interval, b: Interval) -> bool:
    """Whether a (ending first) overlaps or abuts b with no gap."""
    if b.lo < a.hi:
        return True
    if b.lo == a.hi:
        return not (a.hi_open and b.lo_open)
    return False


@dataclass(frozen=True)
class IntervalUnion:
    """A normalized (sorted, disjoint, merged) union of intervals."""

    parts: tuple = ()

    @classmethod
    def of(cls, intervals) -> "IntervalUnion":
        items = [iv for iv in intervals if not iv.is_empty]
        items.sort(key=lambda iv: (iv.lo, iv.lo_open))
        merged: list[Interval] = []
        for iv in items:
            if merged and _touches(merged[-1], iv):
                last = merged[-1]
                if iv.hi > last.hi or (iv.hi == last.hi and not iv.hi_open):
                    merged[-1] = Interval(last.lo, iv.hi, last.lo_open, iv.hi_open)
            else:
                merged.append(iv)
        return cls(tuple(merged))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @property
    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, x) -> bool:
        return any(p.contains(x) for p in self.parts)

    def contains_interval(self, iv: Interval) -> bool:
        # parts are maximal, so containment must happen within a single part
        return any(p.contains_interval(iv) for p in self.parts)

    def intersect(self, other: "IntervalUnion") -> "IntervalUnion":
        out = []
        for a in self.parts:
            for b in other.parts:
                c = a.intersect(b)
                if not c.is_empty:
                    out.append(c)
        return IntervalUnion.of(out)

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion.of(list(self.parts) + list(other.parts))

    def with_point(self, x) -> "IntervalUnion":
        return IntervalUnion.of(list(self.parts) + [Interval.point(x)])

    def without_point(self, x) -> "IntervalUnion":
        out = []
        for p in self.parts:
            if not p.contains(x):
                out.append(p)
                continue
            left = Interval(p.lo, x, p.lo_open, True)
            right = Interval(x, p.hi, True, p.hi_open)
            out.extend(iv for iv in (left, right) if not iv.is_empty)
        return IntervalUnion(tuple(out))

    def __str__(self) -> str:
        if not self.parts:
            return "{}"
        return " U ".join(str(p) for p in self.parts)
