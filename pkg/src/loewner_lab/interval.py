"""Real intervals with open/closed endpoints, used as scalar-function domains."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Interval:
    lo: float = -math.inf
    hi: float = math.inf
    closed_lo: bool = False
    closed_hi: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.closed_lo:
            return False
        if x == self.hi and not self.closed_hi:
            return False
        return True

    def interior_contains(self, x: float) -> bool:
        return self.lo < x < self.hi

    def is_bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo:
            lo, clo = self.lo, self.closed_lo
        elif self.lo < other.lo:
            lo, clo = other.lo, other.closed_lo
        else:
            lo, clo = self.lo, self.closed_lo and other.closed_lo
        if self.hi < other.hi:
            hi, chi = self.hi, self.closed_hi
        elif self.hi > other.hi:
            hi, chi = other.hi, other.closed_hi
        else:
            hi, chi = self.hi, self.closed_hi and other.closed_hi
        return Interval(lo, hi, clo, chi)

    def __str__(self):
        left = "[" if self.closed_lo else "("
        right = "]" if self.closed_hi else ")"
        return f"{left}{self.lo}, {self.hi}{right}"

    def to_json(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "closed_lo": self.closed_lo,
            "closed_hi": self.closed_hi,
        }

    @classmethod
    def from_json(cls, obj) -> "Interval":
        if isinstance(obj, (list, tuple)):
            return cls(float(obj[0]), float(obj[1]), True, True)
        return cls(
            float(obj.get("lo", -math.inf)),
            float(obj.get("hi", math.inf)),
            bool(obj.get("closed_lo", False)),
            bool(obj.get("closed_hi", False)),
        )

    @classmethod
    def closed(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, True, True)

    @classmethod
    def open(cls, lo: float, hi: float) -> "Interval":
        return cls(lo, hi, False, False)
