"""Small undirected graphs with bitmask adjacency.

Vertex sets throughout the package are integer bitmasks; all graphs here
are desk-scale (n well under 30), so masks are both the fastest and the
simplest representation for independence and coverage tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable


@dataclass(frozen=True)
class Graph:
    n: int
    edges: tuple[tuple[int, int], ...]

    @staticmethod
    def of(n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        """Normalize: endpoints ordered, duplicates dropped, no loops."""
        seen = set()
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) outside vertex range")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            seen.add((min(u, v), max(u, v)))
        return Graph(n, tuple(sorted(seen)))

    @cached_property
    def neighbor_masks(self) -> tuple[int, ...]:
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return tuple(masks)

    @cached_property
    def max_degree(self) -> int:
        return max((m.bit_count() for m in self.neighbor_masks), default=0)

    def neighbors(self, v: int) -> tuple[int, ...]:
        m = self.neighbor_masks[v]
        return tuple(i for i in range(self.n) if m >> i & 1)

    def is_independent(self, mask: int) -> bool:
        rest = mask
        while rest:
            low = rest & -rest
            v = low.bit_length() - 1
            if self.neighbor_masks[v] & mask:
                return False
            rest ^= low
        return True


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def vertices_of(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)
