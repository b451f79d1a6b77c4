"""Network bandwidth reallocation: primal-dual greedy routing.

Edge duals start at 1/c(e) and are exponentiated along every structure the
greedy commits to; the run halts once the dual mass sum(c(e) * y(e))
reaches e^(C-1) * m, where C > 1 is the minimum capacity.  A firm's score
is bid / (demand * weight of its cheapest connector), so the greedy keeps
grabbing the most valuable-per-dual-cost firm until the halt.

Duals are floats (the update base is irrational); demands and capacities
stay exact rationals so capacity accounting is exact.  Argmax/argmin use
exact float comparison with the lowest-index tie-break.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .engine import Scorer


class DisconnectedTerminals(RuntimeError):
    """A firm's terminals do not lie in one connected component."""


class BudgetError(RuntimeError):
    """Structure enumeration exceeded its cap."""


@dataclass(frozen=True)
class CapacitatedGraph:
    n: int
    edges: tuple[tuple[int, int], ...]
    capacities: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.capacities):
            raise ValueError("one capacity per edge")
        if not self.edges:
            raise ValueError("graph has no edges")
        for u, v in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise ValueError(f"bad edge ({u},{v})")
        if self.min_capacity <= 1:
            raise ValueError("minimum edge capacity must exceed 1")

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def min_capacity(self) -> Fraction:
        return min(self.capacities)

    @cached_property
    def adjacency(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        """Per vertex: (neighbor, edge index) pairs in edge order."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for idx, (u, v) in enumerate(self.edges):
            adj[u].append((v, idx))
            adj[v].append((u, idx))
        return tuple(tuple(a) for a in adj)


@dataclass(frozen=True)
class Firm:
    """Terminals to connect plus a demand in (0, 1]."""

    terminals: tuple[int, ...]
    demand: Fraction

    def __post_init__(self) -> None:
        if len(set(self.terminals)) != len(self.terminals) or len(self.terminals) < 2:
            raise ValueError("terminals must be at least two distinct vertices")
        if not 0 < self.demand <= 1:
            raise ValueError("demand must lie in (0, 1]")


@dataclass(frozen=True)
class NetworkInstance:
    graph: CapacitatedGraph
    firms: tuple[Firm, ...]
    multicast: bool = False

    def __post_init__(self) -> None:
        for f in self.firms:
            if not self.multicast and len(f.terminals) != 2:
                raise ValueError("unicast firms need exactly one terminal pair")
            for t in f.terminals:
                if not 0 <= t < self.graph.n:
                    raise ValueError(f"terminal {t} outside the graph")

    @property
    def n_firms(self) -> int:
        return len(self.firms)


def _dijkstra(
    graph: CapacitatedGraph, y: Sequence[float], source: int
) -> tuple[list[float], list[int]]:
    """Shortest distances under edge weights y plus predecessor edges."""
    dist = [math.inf] * graph.n
    pred_edge = [-1] * graph.n
    dist[source] = 0.0
    heap = [(0.0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, e in graph.adjacency[u]:
            nd = d + y[e]
            if nd < dist[v]:
                dist[v] = nd
                pred_edge[v] = e
                heapq.heappush(heap, (nd, v))
    return dist, pred_edge


def _walk_back(
    graph: CapacitatedGraph, pred_edge: Sequence[int], source: int, sink: int
) -> list[int]:
    edges = []
    v = sink
    while v != source:
        e = pred_edge[v]
        u, w = graph.edges[e]
        edges.append(e)
        v = u if w == v else w
    return edges


def _prune_tree(
    graph: CapacitatedGraph, edge_set: set[int], terminals: Sequence[int]
) -> set[int]:
    """Drop non-terminal leaves until every leaf is a terminal."""
    keep = set(edge_set)
    terminal_set = set(terminals)
    while True:
        degree: dict[int, list[int]] = {}
        for e in keep:
            for v in graph.edges[e]:
                degree.setdefault(v, []).append(e)
        removable = [
            es[0]
            for v, es in degree.items()
            if len(es) == 1 and v not in terminal_set
        ]
        if not removable:
            return keep
        keep.difference_update(removable)


def min_weight_connector(
    graph: CapacitatedGraph,
    y: Sequence[float],
    firm: Firm,
    multicast: bool,
) -> tuple[tuple[int, ...], float]:
    """Cheapest structure connecting the firm's terminals under duals y.

    Unicast is an exact shortest path.  Multicast builds a Steiner tree by
    spanning the metric closure of the terminals and pruning, which is
    within factor 2 of the optimal tree.  The weight is the correctly
    rounded sum of the structure's duals.
    """
    if not multicast:
        s, t = firm.terminals
        dist, pred = _dijkstra(graph, y, s)
        if math.isinf(dist[t]):
            raise DisconnectedTerminals(f"no path between {s} and {t}")
        edges = sorted(_walk_back(graph, pred, s, t))
        return tuple(edges), math.fsum(y[e] for e in edges)

    terminals = firm.terminals
    runs = {t: _dijkstra(graph, y, t) for t in terminals}
    if any(math.isinf(runs[terminals[0]][0][t]) for t in terminals):
        raise DisconnectedTerminals(f"terminals {terminals} are not connected")
    # Prim over the metric closure, rooted at the designated source.
    in_tree = {terminals[0]}
    union: set[int] = set()
    while len(in_tree) < len(terminals):
        best = None
        for t in terminals:
            if t in in_tree:
                continue
            for root in sorted(in_tree):
                d = runs[root][0][t]
                if best is None or (d, root, t) < best:
                    best = (d, root, t)
        assert best is not None
        _, root, t = best
        union.update(_walk_back(graph, runs[root][1], root, t))
        in_tree.add(t)
    tree = _spanning_subtree(graph, union, y)
    pruned = _prune_tree(graph, tree, terminals)
    edges = tuple(sorted(pruned))
    return edges, math.fsum(y[e] for e in edges)


def _spanning_subtree(
    graph: CapacitatedGraph, edge_set: set[int], y: Sequence[float]
) -> set[int]:
    """Cheapest spanning tree of the subgraph formed by ``edge_set``."""
    parent: dict[int, int] = {}

    def find(v: int) -> int:
        while parent.setdefault(v, v) != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    tree = set()
    for e in sorted(edge_set, key=lambda e: (y[e], e)):
        u, v = graph.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            tree.add(e)
    return tree


class RoutingDuals:
    """Edge duals, their mass, and the halt threshold of the routing greedy."""

    def __init__(self, graph: CapacitatedGraph) -> None:
        self.graph = graph
        self.y = [1.0 / float(c) for c in graph.capacities]
        caps = float(graph.min_capacity)
        self.halt_threshold = math.exp(caps - 1.0) * graph.m
        self.version = 0
        self._refresh_mass()

    def _refresh_mass(self) -> None:
        self.mass = math.fsum(
            float(c) * w for c, w in zip(self.graph.capacities, self.y)
        )

    @property
    def halted(self) -> bool:
        return self.mass >= self.halt_threshold

    def absorb(self, edges: Sequence[int], demand: Fraction) -> None:
        """Exponentiate duals along a committed structure."""
        base = self.halt_threshold
        for e in edges:
            exponent = float(demand) / (float(self.graph.capacities[e]) - 1.0)
            self.y[e] *= base ** exponent
        self.version += 1
        self._refresh_mass()


class _RoutingRun:
    """Shared state machine behind the greedy and its auction scorer."""

    def __init__(self, instance: NetworkInstance) -> None:
        self.instance = instance
        self.duals = RoutingDuals(instance.graph)
        self.selections: list[tuple[int, tuple[int, ...]]] = []
        self.mass_trace: list[float] = [self.duals.mass]
        self._connector_cache: dict[int, tuple[int, tuple[int, ...], float]] = {}
        self.infeasible = frozenset(
            i for i, f in enumerate(instance.firms) if not self._connected(f)
        )

    def _connected(self, firm: Firm) -> bool:
        try:
            min_weight_connector(
                self.instance.graph, self.duals.y, firm, self.instance.multicast
            )
        except DisconnectedTerminals:
            return False
        return True

    def connector(self, firm_idx: int) -> tuple[tuple[int, ...], float]:
        hit = self._connector_cache.get(firm_idx)
        if hit is not None and hit[0] == self.duals.version:
            return hit[1], hit[2]
        edges, weight = min_weight_connector(
            self.instance.graph,
            self.duals.y,
            self.instance.firms[firm_idx],
            self.instance.multicast,
        )
        self._connector_cache[firm_idx] = (self.duals.version, edges, weight)
        return edges, weight

    def score(self, firm_idx: int, bid: Fraction) -> float:
        if self.duals.halted or firm_idx in self.infeasible:
            return 0.0
        _, weight = self.connector(firm_idx)
        return float(bid) / (float(self.instance.firms[firm_idx].demand) * weight)

    def select(self, firm_idx: int) -> None:
        edges, _ = self.connector(firm_idx)
        self.selections.append((firm_idx, edges))
        self.duals.absorb(edges, self.instance.firms[firm_idx].demand)
        self.mass_trace.append(self.duals.mass)


@dataclass(frozen=True)
class RoutingOutcome:
    """Structures committed by the greedy, in selection order."""

    selections: tuple[tuple[int, tuple[int, ...]], ...]
    final_duals: tuple[float, ...]
    mass_trace: tuple[float, ...]
    infeasible: frozenset[int]

    @property
    def retained(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.selections)

    def retained_welfare(self, values: Sequence[Fraction]) -> Fraction:
        return sum((values[i] for i in self.retained), start=Fraction(0))


def greedy_routing(
    instance: NetworkInstance, values: Sequence[Fraction]
) -> RoutingOutcome:
    """Primal-dual greedy: repeatedly commit the best value-per-dual-cost firm.

    Stops when the dual mass reaches its halt threshold, when no firm is
    left, or when every remaining score is zero (zero-value and
    disconnected firms are never committed, matching the auction engine's
    stopping rule).
    """
    run = _RoutingRun(instance)
    remaining = list(range(instance.n_firms))
    while remaining and not run.duals.halted:
        best = -1
        best_score = 0.0
        for i in remaining:
            s = run.score(i, values[i])
            if s > best_score:
                best, best_score = i, s
        if best < 0:
            break
        remaining.remove(best)
        run.select(best)
    return RoutingOutcome(
        tuple(run.selections),
        tuple(run.duals.y),
        tuple(run.mass_trace),
        run.infeasible,
    )


class NetworkScorer(Scorer):
    """Bid over demand-scaled cheapest-connector cost; zero once halted."""

    def __init__(self, instance: NetworkInstance) -> None:
        self.instance = instance
        self.run = _RoutingRun(instance)

    def begin(self, n: int) -> None:
        if n != self.instance.n_firms:
            raise ValueError("bidder count does not match firm count")
        self.run = _RoutingRun(self.instance)

    def score(self, bidder: int, bid: Fraction) -> float:
        return self.run.score(bidder, bid)

    def reject(self, bidder: int, bid: Fraction) -> None:
        self.run.select(bidder)


@dataclass(frozen=True)
class CapacityReport:
    loads: tuple[Fraction, ...]
    violations: tuple[int, ...]

    @property
    def feasible(self) -> bool:
        return not self.violations


def check_capacity_feasibility(
    instance: NetworkInstance,
    selections: Sequence[tuple[int, Sequence[int]]],
) -> CapacityReport:
    """Exact per-edge load of the committed structures against capacity."""
    loads = [Fraction(0)] * instance.graph.m
    for firm_idx, edges in selections:
        d = instance.firms[firm_idx].demand
        for e in edges:
            loads[e] += d
    violations = tuple(
        e for e in range(instance.graph.m) if loads[e] > instance.graph.capacities[e]
    )
    return CapacityReport(tuple(loads), violations)


def enumerate_structures(
    instance: NetworkInstance, firm: Firm, max_structures: int = 200_000
) -> list[tuple[int, ...]]:
    """All candidate structures of a firm: simple paths, or Steiner subtrees.

    Exhaustive; meant for the desk-scale oracle and certificates.  Trees
    are edge subsets that form a tree spanning the firm's terminals
    (supersets are never needed under positive duals or for feasibility).
    """
    graph = instance.graph
    out: list[tuple[int, ...]] = []
    if not instance.multicast:
        s, t = firm.terminals

        def extend(v: int, visited: int, edges: list[int]) -> None:
            if len(out) > max_structures:
                raise BudgetError(f"more than {max_structures} paths")
            if v == t:
                out.append(tuple(sorted(edges)))
                return
            for w, e in graph.adjacency[v]:
                if visited >> w & 1:
                    continue
                edges.append(e)
                extend(w, visited | 1 << w, edges)
                edges.pop()

        extend(s, 1 << s, [])
        return out

    needed = set(firm.terminals)
    for size in range(len(needed) - 1, graph.m + 1):
        for combo in itertools.combinations(range(graph.m), size):
            if len(out) > max_structures:
                raise BudgetError(f"more than {max_structures} trees")
            verts = set()
            for e in combo:
                verts.update(graph.edges[e])
            if not needed <= verts or len(combo) != len(verts) - 1:
                continue
            if _spans(graph, combo, verts):
                out.append(combo)
    return out


def _spans(graph: CapacitatedGraph, edge_combo: Sequence[int], verts: set) -> bool:
    """True if the edge set connects all of ``verts`` (tree by edge count)."""
    start = next(iter(verts))
    seen = {start}
    frontier = [start]
    incident: dict[int, list[int]] = {v: [] for v in verts}
    for e in edge_combo:
        u, v = graph.edges[e]
        incident[u].append(v)
        incident[v].append(u)
    while frontier:
        u = frontier.pop()
        for v in incident[u]:
            if v not in seen:
                seen.add(v)
                frontier.append(v)
    return seen == verts


def exact_min_connector_weight(
    instance: NetworkInstance, firm: Firm, y: Sequence[float]
) -> float:
    """Exhaustive minimum dual weight over the firm's structures."""
    structures = enumerate_structures(instance, firm)
    if not structures:
        raise DisconnectedTerminals(f"terminals {firm.terminals} are not connected")
    return min(math.fsum(y[e] for e in s) for s in structures)


def dual_certificate(
    instance: NetworkInstance,
    values: Sequence[Fraction],
    y: Sequence[float],
) -> float:
    """Weak-duality upper bound on the optimal retained welfare.

    Per-firm slacks are set to the smallest feasible value against the
    exact cheapest structure, then every dual constraint is re-checked.
    The bound is sum(c(e) y(e)) + sum(z(i)).
    """
    slacks = []
    for i, firm in enumerate(instance.firms):
        try:
            w = exact_min_connector_weight(instance, firm, y)
        except DisconnectedTerminals:
            slacks.append(0.0)
            continue
        need = float(values[i]) - float(firm.demand) * w
        z = max(0.0, need)
        if z + float(firm.demand) * w < float(values[i]) - 1e-9:
            raise AssertionError("dual constraint violated after slack assignment")
        slacks.append(z)
    mass = math.fsum(float(c) * w for c, w in zip(instance.graph.capacities, y))
    return mass + math.fsum(slacks)
