"""Layerings: strictly increasing cumulative power splits Q1 < ... < QL = P."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

# duplicate-insertion guard, relative to total power
_DUP_TOL = 1e-12


@dataclass(frozen=True)
class Layering:
    """Cumulative layer powers. The total power is the last entry."""

    q: tuple

    def __init__(self, q: Sequence[float]):
        q = tuple(float(v) for v in q)
        if len(q) < 1:
            raise ValueError("a layering needs at least one layer")
        if q[0] <= 0.0:
            raise ValueError("Q1 must be strictly positive")
        for a, b in zip(q[:-1], q[1:]):
            if b <= a:
                raise ValueError("cumulative powers must be strictly increasing")
        object.__setattr__(self, "q", q)

    @property
    def P(self) -> float:
        return self.q[-1]

    def __len__(self) -> int:
        return len(self.q)


def uniform(P: float, K: int) -> Layering:
    """The uniform K-layering (P/K, 2P/K, ..., P)."""
    if P <= 0.0:
        raise ValueError("P must be positive")
    if K < 1:
        raise ValueError("K must be a positive integer")
    return Layering(tuple(P * k / K for k in range(1, K + 1)))


def refine(Q: Layering, q_new: float) -> Layering:
    """Insert one cumulative power, keeping the layering valid."""
    P = Q.P
    if not 0.0 < q_new < P:
        raise ValueError("insertion point must lie strictly inside (0, P)")
    if any(abs(q_new - v) <= _DUP_TOL * P for v in Q.q):
        raise ValueError("insertion point duplicates an existing layer")
    return Layering(tuple(sorted(Q.q + (q_new,))))


def powers(Q: Layering) -> np.ndarray:
    """Per-layer powers P_l = Q_l - Q_{l-1}, all positive, summing to P."""
    return np.diff(np.concatenate(([0.0], np.asarray(Q.q))))


def map_monotone(F: Callable[[float], float], Q: Layering) -> Layering:
    """Elementwise image of the layering under a monotone bijection of [0, P]."""
    image = [float(F(v)) for v in Q.q]
    for a, b in zip(image[:-1], image[1:]):
        if b <= a:
            raise ValueError("mapped layering is not strictly increasing")
    if image[0] <= 0.0:
        raise ValueError("mapped layering has nonpositive first element")
    return Layering(tuple(image))


def parse_layering(text: str, P: float) -> Layering:
    """Parse "uniform:K" or comma-separated cumulative powers."""
    text = text.strip()
    if text.startswith("uniform:"):
        return uniform(P, int(text.split(":", 1)[1]))
    vals = [float(v) for v in text.split(",") if v.strip()]
    Q = Layering(vals)
    if abs(Q.P - P) > 1e-9 * max(P, 1.0):
        raise ValueError(f"layering total {Q.P} does not match power {P}")
    return Q
