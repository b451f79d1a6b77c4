"""Seeded random instance generators for the three problem families.

Everything is drawn from one ``random.Random(seed)``, so a fixed seed and
parameter set reproduces the same instance byte for byte.  Values live on
a half-integer grid strictly below the bid-menu top, which keeps truthful
bids well defined; set-cover generation tops orphaned elements up into the
final set so the coverage precondition always holds; network generation
only emits capacities strictly above 1.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random
from typing import Sequence

from .engine import BidSpace
from .graphs import Graph
from .instances import InstanceFile
from .network import CapacitatedGraph, Firm, NetworkInstance
from .setcover import SetCoverInstance
from .spectrum import (
    DiskGeometry,
    ExplicitGeometry,
    IntervalGeometry,
    SpectrumInstance,
)


def _bid_space(rng: Random, n: int, bid_levels: int) -> tuple[BidSpace, tuple[Fraction, ...]]:
    """Integer menus 0..L-1 with caps L-3/2 and half-integer random values."""
    if bid_levels < 2:
        raise ValueError("need at least two bid levels")
    menu = tuple(Fraction(i) for i in range(bid_levels))
    cap = Fraction(2 * bid_levels - 3, 2)
    space = BidSpace((menu,) * n, (cap,) * n)
    values = tuple(Fraction(rng.randrange(0, 2 * bid_levels - 2), 2) for _ in range(n))
    return space, values


def _quarter(rng: Random, lo: int, hi: int) -> Fraction:
    """A random quarter-integer in [lo, hi]."""
    return Fraction(rng.randrange(4 * lo, 4 * hi + 1), 4)


def generate_spectrum(
    seed: int,
    stations: int = 6,
    channels: int = 2,
    geometry: str = "intervals",
    gamma: Fraction = Fraction(1),
    degree_bound: int = 4,
    bid_levels: int = 8,
) -> InstanceFile:
    if gamma < 1:
        raise ValueError("gamma must be at least 1")
    rng = Random(seed)
    gamma = Fraction(gamma)
    if geometry == "intervals":
        lefts = tuple(sorted(_quarter(rng, 0, stations) for _ in range(stations)))
        lengths = tuple(
            1 + (gamma - 1) * Fraction(rng.randrange(0, 5), 4) for _ in range(stations)
        )
        geo = IntervalGeometry(lefts, lengths)
    elif geometry == "disks":
        side = max(2, round(1.1 * stations ** 0.5 * 2))
        xs = tuple(_quarter(rng, 0, side) for _ in range(stations))
        ys = tuple(_quarter(rng, 0, side) for _ in range(stations))
        radii = tuple(
            1 + (gamma - 1) * Fraction(rng.randrange(0, 5), 4) for _ in range(stations)
        )
        geo = DiskGeometry(xs, ys, radii)
    elif geometry == "explicit":
        pairs = [(u, v) for u in range(stations) for v in range(u + 1, stations)]
        rng.shuffle(pairs)
        degree = [0] * stations
        edges = []
        for u, v in pairs:
            if degree[u] < degree_bound and degree[v] < degree_bound and rng.random() < 0.55:
                edges.append((u, v))
                degree[u] += 1
                degree[v] += 1
        geo = ExplicitGeometry(Graph.of(stations, edges))
    else:
        raise ValueError(f"unknown geometry kind {geometry!r}")
    space, values = _bid_space(rng, stations, bid_levels)
    return InstanceFile("spectrum", space, values, None, SpectrumInstance(geo, channels))


def generate_network(
    seed: int,
    firms: int = 4,
    nodes: int = 5,
    extra_edges: int = 2,
    capacity_choices: Sequence[int] = (2, 3),
    multicast: bool = False,
    bid_levels: int = 8,
) -> InstanceFile:
    if any(c <= 1 for c in capacity_choices):
        raise ValueError("capacities must exceed 1")
    if nodes < 2:
        raise ValueError("need at least two nodes")
    rng = Random(seed)
    edges = set()
    for v in range(1, nodes):
        edges.add((rng.randrange(v), v))
    for _ in range(extra_edges):
        u, v = rng.sample(range(nodes), 2)
        edges.add((min(u, v), max(u, v)))
    edge_list = tuple(sorted(edges))
    capacities = tuple(Fraction(rng.choice(list(capacity_choices))) for _ in edge_list)
    graph = CapacitatedGraph(nodes, edge_list, capacities)
    firm_list = []
    for _ in range(firms):
        k = 3 if multicast else 2
        terminals = tuple(rng.sample(range(nodes), k))
        demand = Fraction(rng.choice((1, 2, 3, 4)), 4)
        firm_list.append(Firm(terminals, demand))
    space, values = _bid_space(rng, firms, bid_levels)
    return InstanceFile(
        "network", space, values, None,
        NetworkInstance(graph, tuple(firm_list), multicast),
    )


def generate_setcover(
    seed: int,
    bidders: int = 5,
    elements: int = 4,
    density: float = 0.4,
    bid_levels: int = 8,
) -> InstanceFile:
    if bidders < 1 or elements < 1:
        raise ValueError("need at least one bidder and one element")
    rng = Random(seed)
    sets = []
    for _ in range(bidders - 1):
        s = frozenset(e for e in range(elements) if rng.random() < density)
        if not s:
            s = frozenset({rng.randrange(elements)})
        sets.append(s)
    covered = set().union(*sets) if sets else set()
    orphans = set(range(elements)) - covered
    last = orphans | {e for e in range(elements) if rng.random() < density}
    if not last:
        last = {rng.randrange(elements)}
    sets.append(frozenset(last))
    space, values = _bid_space(rng, bidders, bid_levels)
    return InstanceFile(
        "setcover", space, values, None,
        SetCoverInstance(elements, tuple(sets)),
    )


def generate_instance(problem: str, seed: int, **params) -> InstanceFile:
    if problem == "spectrum":
        return generate_spectrum(seed, **params)
    if problem == "network":
        return generate_network(seed, **params)
    if problem == "setcover":
        return generate_setcover(seed, **params)
    raise ValueError(f"unknown problem {problem!r}")
