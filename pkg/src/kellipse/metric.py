"""Points, Minkowski metrics, and metric spaces (continuum, finite, or mixed).

Coordinates may be int, float, or Fraction. Exact types are preserved through
distance computations wherever the metric allows (L1, Linf, and any metric in
dimension 1), so that finite-space and 1D analyses stay rational end to end.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TAU_EQ",
    "Point",
    "as_point",
    "Metric",
    "distance",
    "Membership",
    "Space",
    "sample_points",
    "AxiomViolation",
    "AxiomReport",
    "verify_metric_axioms",
]

TAU_EQ = 1e-9   # point-coincidence tolerance on continuum spaces
P_MIN = 1.0
P_MAX = 64.0    # larger p overflows double powers; reject at construction


class Point(tuple):
    """An n-dimensional coordinate tuple (n >= 1, all coordinates finite)."""

    __slots__ = ()

    def __new__(cls, coords: Iterable):
        pt = super().__new__(cls, coords)
        if len(pt) == 0:
            raise ValueError("a point needs at least one coordinate")
        for c in pt:
            if isinstance(c, (int, Fraction)) and not isinstance(c, bool):
                continue
            if not isinstance(c, float) or not math.isfinite(c):
                raise ValueError(f"coordinate {c!r} is not a finite real")
        return pt

    @property
    def dim(self) -> int:
        return len(self)

    def __repr__(self) -> str:
        return "Point(" + ", ".join(str(c) for c in self) + ")"


def as_point(value) -> Point:
    """Coerce a scalar, sequence, or Point into a Point."""
    if isinstance(value, Point):
        return value
    if isinstance(value, (int, float, Fraction)) and not isinstance(value, bool):
        return Point((value,))
    return Point(value)


@dataclass(frozen=True)
class Metric:
    """A Minkowski metric: L1, L2, Linf, or general Lp with p in [1, 64]."""

    kind: str                 # "l1" | "l2" | "linf" | "lp"
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("l1", "l2", "linf", "lp"):
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "lp":
            if self.p is None:
                raise ValueError("lp metric requires an exponent p")
            p = float(self.p)
            if not math.isfinite(p) or not (P_MIN <= p <= P_MAX):
                raise ValueError(f"lp exponent must lie in [{P_MIN}, {P_MAX}], got {self.p}")
        elif self.p is not None:
            raise ValueError(f"metric kind {self.kind!r} takes no exponent")

    @classmethod
    def l1(cls) -> "Metric":
        return cls("l1")

    @classmethod
    def l2(cls) -> "Metric":
        return cls("l2")

    @classmethod
    def linf(cls) -> "Metric":
        return cls("linf")

    @classmethod
    def lp(cls, p) -> "Metric":
        return cls("lp", float(p))

    @property
    def label(self) -> str:
        if self.kind == "lp":
            return f"Lp({self.p:g})"
        return {"l1": "L1", "l2": "L2", "linf": "Linf"}[self.kind]

    def distance(self, a: Sequence, b: Sequence):
        """Distance between two points; exact for L1/Linf and in dimension 1.

        Lp uses the max-factored form m * (sum((|d|/m)^p))^(1/p) so large
        exponents do not overflow.
        """
        if len(a) != len(b):
            raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
        diffs = [abs(x - y) for x, y in zip(a, b)]
        if len(diffs) == 1:
            return diffs[0]       # every Minkowski metric coincides on the line
        if self.kind == "l1":
            return sum(diffs)
        if self.kind == "linf":
            return max(diffs)
        if self.kind == "l2":
            return math.sqrt(sum(float(d) * float(d) for d in diffs))
        m = float(max(diffs))
        if m == 0.0:
            return 0.0
        s = sum((float(d) / m) ** self.p for d in diffs)
        return m * s ** (1.0 / self.p)

    def distance_field(self, pts: np.ndarray, focus: Sequence) -> np.ndarray:
        """Vectorized distances from every row of `pts` (N, d) to one focus."""
        d = np.abs(np.asarray(pts, dtype=float) - np.asarray(focus, dtype=float))
        if d.ndim == 1:
            d = d[:, None]
        if self.kind == "l1":
            return d.sum(axis=1)
        if self.kind == "linf":
            return d.max(axis=1)
        if self.kind == "l2":
            return np.sqrt((d * d).sum(axis=1))
        m = d.max(axis=1)
        out = np.zeros(len(d))
        ok = m > 0
        scaled = d[ok] / m[ok, None]
        out[ok] = m[ok] * (scaled ** self.p).sum(axis=1) ** (1.0 / self.p)
        return out


def distance(metric: Metric, a, b):
    """Free-function form of Metric.distance."""
    return metric.distance(as_point(a), as_point(b))


@dataclass(frozen=True)
class Membership:
    """A 1D point-set union: isolated coordinates plus closed intervals.

    Interval endpoints may be ``-math.inf`` / ``math.inf``. Used to restrict a
    1D continuum to sets like {-2, -1} U [0, inf).
    """

    isolated: tuple = ()
    intervals: tuple = ()     # (lo, hi) pairs

    def __post_init__(self):
        for lo, hi in self.intervals:
            if lo > hi:
                raise ValueError(f"empty membership interval ({lo}, {hi})")

    def contains(self, x) -> bool:
        if any(x == p for p in self.isolated):
            return True
        return any(lo <= x <= hi for lo, hi in self.intervals)


@dataclass(frozen=True)
class Space:
    """A continuum of a given dimension, or a finite point set, with a metric.

    A 1D continuum may carry a Membership restriction (a mixed space); every
    sampling operation respects it.
    """

    metric: Metric
    dimension: int
    points: tuple | None = None          # Finite variant, None for continuum
    membership: Membership | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.points is not None:
            if not self.points:
                raise ValueError("a finite space needs at least one point")
            for p in self.points:
                if len(p) != self.dimension:
                    raise ValueError(f"point {p} does not match dimension {self.dimension}")
            if self.membership is not None:
                raise ValueError("membership restriction applies to continuum spaces only")
        if self.membership is not None and self.dimension != 1:
            raise ValueError("membership restrictions are supported in dimension 1 only")

    @classmethod
    def continuum(cls, dimension: int, metric: Metric, membership: Membership | None = None) -> "Space":
        return cls(metric=metric, dimension=dimension, membership=membership)

    @classmethod
    def finite(cls, points: Iterable, metric: Metric) -> "Space":
        # deduplicate while keeping first-seen order
        seen: list[Point] = []
        for p in points:
            pt = as_point(p)
            if pt not in seen:
                seen.append(pt)
        if not seen:
            raise ValueError("a finite space needs at least one point")
        return cls(metric=metric, dimension=seen[0].dim, points=tuple(seen))

    @property
    def is_finite(self) -> bool:
        return self.points is not None

    def contains(self, p) -> bool:
        pt = as_point(p)
        if pt.dim != self.dimension:
            return False
        if self.is_finite:
            return pt in self.points
        if self.membership is not None:
            return self.membership.contains(pt[0])
        return True

    def require_member(self, p) -> Point:
        pt = as_point(p)
        if pt.dim != self.dimension:
            raise ValueError(f"point {pt} does not match space dimension {self.dimension}")
        if not self.contains(pt):
            raise ValueError(f"point {pt} is not a member of the space")
        return pt


def sample_points(space: Space, n: int, seed: int, window=None) -> list[Point]:
    """Draw n deterministic points from the space (seeded).

    Continuum spaces sample uniformly in `window` (per-axis (lo, hi), default
    (-10, 10)); finite spaces sample from the point list; membership
    restrictions are honored by sampling each isolated point / interval.
    """
    rng = random.Random(seed)
    if space.is_finite:
        return [rng.choice(space.points) for _ in range(n)]
    if window is None:
        window = [(-10.0, 10.0)] * space.dimension
    if space.membership is not None:
        entries = list(space.membership.isolated) + list(space.membership.intervals)
        lo_w, hi_w = window[0]
        out = []
        for _ in range(n):
            entry = rng.choice(entries)
            if isinstance(entry, tuple):
                lo, hi = entry
                lo = max(float(lo), lo_w) if lo != -math.inf else lo_w
                hi = min(float(hi), hi_w) if hi != math.inf else hi_w
                out.append(Point((rng.uniform(lo, hi),)))
            else:
                out.append(Point((entry,)))
        return out
    return [
        Point(tuple(rng.uniform(lo, hi) for lo, hi in window))
        for _ in range(n)
    ]


@dataclass(frozen=True)
class AxiomViolation:
    axiom: str                # "nonnegativity" | "identity" | "symmetry" | "triangle"
    points: tuple
    amount: float


@dataclass(frozen=True)
class AxiomReport:
    metric: Metric
    sample_count: int
    seed: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_metric_axioms(space: Space, sample_count: int, seed: int = 0,
                         tau_tri: float = 1e-9, window=None) -> AxiomReport:
    """Check the metric axioms on seeded sample triples.

    Violations are report content, not errors: the report lists each
    offending triple with the violated axiom and the violation amount.
    """
    if sample_count < 3:
        raise ValueError("sample_count must be >= 3")
    d = space.metric.distance
    violations: list[AxiomViolation] = []
    samples = sample_points(space, 3 * sample_count, seed, window=window)
    for i in range(sample_count):
        a, b, c = samples[3 * i: 3 * i + 3]
        dab, dba = d(a, b), d(b, a)
        if dab < 0:
            violations.append(AxiomViolation("nonnegativity", (a, b), float(-dab)))
        if dab != dba:
            violations.append(AxiomViolation("symmetry", (a, b), float(abs(dab - dba))))
        if d(a, a) != 0:
            violations.append(AxiomViolation("identity", (a,), float(d(a, a))))
        if dab <= TAU_EQ and max(abs(x - y) for x, y in zip(a, b)) > TAU_EQ:
            violations.append(AxiomViolation("identity", (a, b), float(dab)))
        gap = d(a, c) - (dab + d(b, c))
        if gap > tau_tri:
            violations.append(AxiomViolation("triangle", (a, b, c), float(gap)))
    return AxiomReport(space.metric, sample_count, seed, tuple(violations))
