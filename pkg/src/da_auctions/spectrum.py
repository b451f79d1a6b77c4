"""Spectrum reallocation: interference graphs and channel-packing greedies.

Stations interfere when their broadcast footprints intersect (closed
intervals on a line, closed disks in the plane) or when an explicit
interference graph says so.  The repacking greedy fills k channel classes
in decreasing bid order; its deferred-acceptance scorer gives an active
station its bid while some class can still absorb it and 0 afterwards.

Geometry uses exact rational coordinates, so touching footprints are
detected exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

from .engine import Scorer
from .graphs import Graph, mask_of


class SubroutineFault(RuntimeError):
    """An independent-set subroutine returned a dependent vertex set."""


@dataclass(frozen=True)
class IntervalGeometry:
    """Closed intervals [left, left + length] per station; lengths positive."""

    lefts: tuple[Fraction, ...]
    lengths: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.lefts) != len(self.lengths):
            raise ValueError("one left endpoint and one length per station")
        if any(l <= 0 for l in self.lengths):
            raise ValueError("interval lengths must be positive")

    @property
    def n(self) -> int:
        return len(self.lefts)

    @property
    def gamma(self) -> Fraction:
        return max(self.lengths) / min(self.lengths)


@dataclass(frozen=True)
class DiskGeometry:
    """Closed disks (center, radius) per station; radii positive."""

    xs: tuple[Fraction, ...]
    ys: tuple[Fraction, ...]
    radii: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not len(self.xs) == len(self.ys) == len(self.radii):
            raise ValueError("one center and one radius per station")
        if any(r <= 0 for r in self.radii):
            raise ValueError("disk radii must be positive")

    @property
    def n(self) -> int:
        return len(self.xs)

    @property
    def gamma(self) -> Fraction:
        return max(self.radii) / min(self.radii)


@dataclass(frozen=True)
class ExplicitGeometry:
    """An interference graph given directly, with its max degree as bound."""

    graph: Graph

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def degree_bound(self) -> int:
        return self.graph.max_degree


Geometry = IntervalGeometry | DiskGeometry | ExplicitGeometry


def build_interference_graph(geometry: Geometry) -> Graph:
    """Edge per pair of intersecting footprints; touching counts."""
    if isinstance(geometry, ExplicitGeometry):
        return geometry.graph
    n = geometry.n
    edges = []
    if isinstance(geometry, IntervalGeometry):
        spans = [
            (geometry.lefts[i], geometry.lefts[i] + geometry.lengths[i])
            for i in range(n)
        ]
        for u in range(n):
            for v in range(u + 1, n):
                if spans[u][0] <= spans[v][1] and spans[v][0] <= spans[u][1]:
                    edges.append((u, v))
    else:
        for u in range(n):
            for v in range(u + 1, n):
                dx = geometry.xs[u] - geometry.xs[v]
                dy = geometry.ys[u] - geometry.ys[v]
                reach = geometry.radii[u] + geometry.radii[v]
                if dx * dx + dy * dy <= reach * reach:
                    edges.append((u, v))
    return Graph.of(n, edges)


def claw_bound(geometry: Geometry) -> Fraction:
    """Packing bound tau: the graph is (tau+1)-claw free.

    2 + gamma for intervals, (2 + gamma)^2 for disks, max degree for
    explicit graphs.  The greedy independent-set heuristic is then a
    tau-approximation and the repacking greedy a (1 - e^(-1/tau)) one.
    """
    if isinstance(geometry, IntervalGeometry):
        return 2 + geometry.gamma
    if isinstance(geometry, DiskGeometry):
        return (2 + geometry.gamma) ** 2
    return Fraction(geometry.degree_bound)


@dataclass(frozen=True)
class SpectrumInstance:
    """An interference geometry plus the number of channels to repack into."""

    geometry: Geometry
    channels: int

    def __post_init__(self) -> None:
        if self.channels < 1:
            raise ValueError("need at least one channel")

    @property
    def n(self) -> int:
        return self.geometry.n

    @cached_property
    def graph(self) -> Graph:
        return build_interference_graph(self.geometry)


@dataclass
class ColoringState:
    """k channel classes built so far, each an independent set (as a mask)."""

    class_masks: list[int]
    order: list[int]

    @staticmethod
    def empty(k: int) -> "ColoringState":
        return ColoringState([0] * k, [])

    def fits(self, graph: Graph, v: int) -> bool:
        nm = graph.neighbor_masks[v]
        return any(nm & cm == 0 for cm in self.class_masks)

    def place(self, graph: Graph, v: int) -> int:
        """Put v in the lowest-index class that stays independent."""
        nm = graph.neighbor_masks[v]
        for j, cm in enumerate(self.class_masks):
            if nm & cm == 0:
                self.class_masks[j] = cm | (1 << v)
                self.order.append(v)
                return j
        raise SubroutineFault(f"vertex {v} fits no class")

    def classes(self) -> tuple[frozenset[int], ...]:
        return tuple(
            frozenset(i for i in range(cm.bit_length()) if cm >> i & 1)
            for cm in self.class_masks
        )


def _by_decreasing_weight(weights: Sequence[Fraction]) -> list[int]:
    return sorted(range(len(weights)), key=lambda v: (-weights[v], v))


def greedy_k_colorable(
    graph: Graph, k: int, weights: Sequence[Fraction]
) -> tuple[tuple[int, ...], ColoringState]:
    """Greedy max-weight k-colorable subgraph.

    Vertices are processed in decreasing weight (ties toward the lower
    index) and placed in the lowest-index channel class that stays
    independent; vertices that fit nowhere are skipped.  Zero-weight
    vertices are skipped as well, mirroring the auction engine's stopping
    rule, so the retained set matches the engine trace exactly.
    Returns the retained vertices in processing order plus the coloring.
    """
    state = ColoringState.empty(k)
    retained = []
    for v in _by_decreasing_weight(weights):
        if weights[v] <= 0:
            continue
        if state.fits(graph, v):
            state.place(graph, v)
            retained.append(v)
    return tuple(retained), state


class SpectrumScorer(Scorer):
    """Bid if some channel class can still absorb the station, else 0."""

    def __init__(self, instance: SpectrumInstance) -> None:
        self.instance = instance
        self.graph = instance.graph
        self.state = ColoringState.empty(instance.channels)

    def begin(self, n: int) -> None:
        if n != self.instance.n:
            raise ValueError("bidder count does not match station count")
        self.state = ColoringState.empty(self.instance.channels)

    def score(self, bidder: int, bid: Fraction) -> Fraction:
        if self.state.fits(self.graph, bidder):
            return bid
        return Fraction(0)

    def reject(self, bidder: int, bid: Fraction) -> None:
        self.state.place(self.graph, bidder)


MwisSubroutine = Callable[[Graph, Sequence[Fraction], int], tuple[int, ...]]


def greedy_mwis(
    graph: Graph, weights: Sequence[Fraction], within: int = -1
) -> tuple[int, ...]:
    """Greedy independent set: take vertices in decreasing weight while
    they stay mutually non-adjacent.  ``within`` restricts to a vertex
    mask (-1 means all).  Zero-weight vertices are never taken.
    On (tau+1)-claw-free graphs the result has weight >= OPT / tau.
    """
    if within < 0:
        within = (1 << graph.n) - 1
    chosen_mask = 0
    chosen = []
    for v in _by_decreasing_weight(weights):
        if not within >> v & 1 or weights[v] <= 0:
            continue
        if graph.neighbor_masks[v] & chosen_mask == 0:
            chosen_mask |= 1 << v
            chosen.append(v)
    return tuple(chosen)


def sequential_k_color(
    graph: Graph,
    k: int,
    weights: Sequence[Fraction],
    subroutine: MwisSubroutine = greedy_mwis,
) -> tuple[frozenset[int], tuple[tuple[int, ...], ...]]:
    """Peel k independent sets off the residual graph with a subroutine.

    With the greedy subroutine this selects exactly the same vertex set as
    ``greedy_k_colorable``; the rounds are returned for inspection.
    """
    residual = (1 << graph.n) - 1
    rounds = []
    for _ in range(k):
        picked = subroutine(graph, weights, residual)
        picked_mask = mask_of(picked)
        if picked_mask & ~residual:
            raise SubroutineFault("subroutine picked vertices outside the residual graph")
        if not graph.is_independent(picked_mask):
            raise SubroutineFault("subroutine returned a dependent set")
        rounds.append(tuple(picked))
        residual &= ~picked_mask
    union = frozenset(v for rnd in rounds for v in rnd)
    return union, tuple(rounds)
