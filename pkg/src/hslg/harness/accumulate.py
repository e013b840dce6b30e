"""Mergeable statistics records for replica-parallel campaigns."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Accumulator"]


@dataclass
class Accumulator:
    """Count / mean / second central moment plus a quantile sketch.

    Merging uses the pairwise update of Chan, Golub and LeVeque, so merges
    are associative and commutative up to floating-point rounding.  The
    sketch keeps exact values until ``capacity`` and then compacts by
    keeping every other order statistic with doubled weight; campaign sizes
    here rarely exceed the capacity, making the quantiles exact.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    capacity: int = 1 << 17
    _values: list = field(default_factory=list, repr=False)
    _weight: int = 1

    def update(self, x: float):
        x = float(x)
        self.count += 1
        d = x - self.mean
        self.mean += d / self.count
        self.m2 += d * (x - self.mean)
        self._values.append(x)
        if len(self._values) > self.capacity:
            self._compact()

    def update_many(self, xs):
        for x in np.asarray(xs, dtype=float).ravel():
            self.update(x)

    def _compact(self):
        self._values.sort()
        self._values = self._values[:: 2]
        self._weight *= 2

    def merge(self, other: "Accumulator") -> "Accumulator":
        if other.count == 0:
            return self
        if self.count == 0:
            self.count = other.count
            self.mean = other.mean
            self.m2 = other.m2
            self._values = list(other._values)
            self._weight = other._weight
            return self
        n1, n2 = self.count, other.count
        d = other.mean - self.mean
        n = n1 + n2
        self.mean += d * n2 / n
        self.m2 += other.m2 + d * d * n1 * n2 / n
        self.count = n
        if self._weight == other._weight:
            self._values.extend(other._values)
        else:
            # align weights by compacting the finer sketch
            a, b = self, other
            va, wa = list(a._values), a._weight
            vb, wb = list(b._values), b._weight
            while wa < wb:
                va.sort()
                va = va[::2]
                wa *= 2
            while wb < wa:
                vb.sort()
                vb = vb[::2]
                wb *= 2
            self._values = va + vb
            self._weight = wa
        while len(self._values) > self.capacity:
            self._compact()
        return self

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def std(self) -> float:
        return math.sqrt(max(self.variance, 0.0))

    def quantile(self, q):
        if not self._values:
            raise ValueError("empty accumulator")
        return float(np.quantile(np.asarray(self._values), q))

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "mean": self.mean,
            "variance": self.variance,
        }
