"""Exhaustive optima used as ground truth by the test suites.

Every oracle enumerates under an explicit budget and refuses loudly when
the budget would be exceeded; a silent partial answer would poison the
acceptance comparisons.  The primary strategies carry a second,
independent enumeration (`strategy="lex"`) so the oracles can be
cross-checked against themselves.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graphs import Graph, vertices_of
from .network import NetworkInstance, enumerate_structures
from .setcover import SetCoverInstance


class OracleRefusal(RuntimeError):
    """The requested enumeration exceeds the oracle budget."""


@dataclass(frozen=True)
class OracleBudget:
    max_states: int = 2_000_000
    timeout_s: float = 120.0


DEFAULT_BUDGET = OracleBudget()


class _Meter:
    """State counter with an occasional wall-clock check."""

    def __init__(self, budget: OracleBudget) -> None:
        self.budget = budget
        self.count = 0
        self.started = time.monotonic()

    def tick(self, states: int = 1) -> None:
        self.count += states
        if self.count > self.budget.max_states:
            raise OracleRefusal(
                f"{self.count} states exceed budget {self.budget.max_states}"
            )
        if self.count % 4096 < states:
            if time.monotonic() - self.started > self.budget.timeout_s:
                raise OracleRefusal(f"timeout after {self.budget.timeout_s}s")


def is_k_colorable(graph: Graph, mask: int, k: int) -> bool:
    """Backtracking proper coloring of the induced subgraph on ``mask``."""
    verts = vertices_of(mask)
    if len(verts) <= k:
        return True
    # High-degree-first ordering fails earlier on dense subgraphs.
    verts = sorted(
        verts, key=lambda v: -(graph.neighbor_masks[v] & mask).bit_count()
    )
    classes = [0] * k

    def place(idx: int, used: int) -> bool:
        if idx == len(verts):
            return True
        v = verts[idx]
        nm = graph.neighbor_masks[v]
        for j in range(min(used + 1, k)):
            if classes[j] & nm:
                continue
            classes[j] |= 1 << v
            if place(idx + 1, max(used, j + 1)):
                return True
            classes[j] &= ~(1 << v)
        return False

    return place(0, 0)


def _subset_weights(n: int, weights: Sequence[Fraction]) -> list[Fraction]:
    total = [Fraction(0)] * (1 << n)
    for mask in range(1, 1 << n):
        low = mask & -mask
        total[mask] = total[mask ^ low] + weights[low.bit_length() - 1]
    return total


def opt_k_colorable(
    graph: Graph,
    k: int,
    weights: Sequence[Fraction],
    budget: OracleBudget = DEFAULT_BUDGET,
    strategy: str = "weight_sorted",
) -> tuple[frozenset[int], Fraction]:
    """Exact max-weight vertex set whose induced subgraph is k-colorable."""
    n = graph.n
    if n > 14 or (1 << n) > budget.max_states:
        raise OracleRefusal(f"2^{n} subsets exceed the oracle budget")
    meter = _Meter(budget)
    totals = _subset_weights(n, weights)
    if strategy == "weight_sorted":
        # Heaviest subset first; the first colorable one is the optimum.
        for mask in sorted(range(1 << n), key=lambda m: (-totals[m], m)):
            meter.tick()
            if is_k_colorable(graph, mask, k):
                return frozenset(vertices_of(mask)), totals[mask]
        raise AssertionError("the empty set is always k-colorable")
    if strategy != "lex":
        raise ValueError(f"unknown strategy {strategy!r}")
    best_mask, best_val = 0, Fraction(0)
    for mask in range(1 << n):
        meter.tick()
        if totals[mask] > best_val and is_k_colorable(graph, mask, k):
            best_mask, best_val = mask, totals[mask]
    return frozenset(vertices_of(best_mask)), best_val


def opt_mwis(
    graph: Graph,
    weights: Sequence[Fraction],
    budget: OracleBudget = DEFAULT_BUDGET,
    strategy: str = "branch_bound",
) -> tuple[frozenset[int], Fraction]:
    """Exact maximum-weight independent set."""
    n = graph.n
    if n > 20:
        raise OracleRefusal(f"{n} vertices exceed the oracle's hard cap of 20")
    meter = _Meter(budget)
    if strategy == "lex":
        if (1 << n) > budget.max_states:
            raise OracleRefusal(f"2^{n} subsets exceed the oracle budget")
        totals = _subset_weights(n, weights)
        best_mask, best_val = 0, Fraction(0)
        for mask in range(1 << n):
            meter.tick()
            if totals[mask] > best_val and graph.is_independent(mask):
                best_mask, best_val = mask, totals[mask]
        return frozenset(vertices_of(best_mask)), best_val
    if strategy != "branch_bound":
        raise ValueError(f"unknown strategy {strategy!r}")

    order = sorted(range(n), key=lambda v: (-weights[v], v))
    suffix = [Fraction(0)] * (n + 1)
    for idx in range(n - 1, -1, -1):
        w = weights[order[idx]]
        suffix[idx] = suffix[idx + 1] + (w if w > 0 else 0)
    best_mask, best_val = 0, Fraction(0)

    def walk(idx: int, chosen: int, value: Fraction) -> None:
        nonlocal best_mask, best_val
        meter.tick()
        if value > best_val:
            best_mask, best_val = chosen, value
        if idx == n or value + suffix[idx] <= best_val:
            return
        v = order[idx]
        if graph.neighbor_masks[v] & chosen == 0:
            walk(idx + 1, chosen | 1 << v, value + weights[v])
        walk(idx + 1, chosen, value)

    walk(0, 0, Fraction(0))
    return frozenset(vertices_of(best_mask)), best_val


def opt_routing(
    instance: NetworkInstance,
    values: Sequence[Fraction],
    budget: OracleBudget = DEFAULT_BUDGET,
) -> tuple[frozenset[int], Fraction]:
    """Exact best-welfare firm subset that routes feasibly, by backtracking.

    Firm subsets are tried in decreasing welfare, and for each subset every
    unsplittable structure assignment is searched against exact residual
    capacities; the first routable subset is optimal.
    """
    k = instance.n_firms
    if k > 8 or instance.graph.n > 8:
        raise OracleRefusal("routing oracle is capped at 8 firms and 8 vertices")
    meter = _Meter(budget)
    structures = []
    for firm in instance.firms:
        structures.append(enumerate_structures(instance, firm))

    def routable(firms: tuple[int, ...]) -> bool:
        residual = list(instance.graph.capacities)
        # Fewest options first keeps the branching shallow.
        todo = sorted(firms, key=lambda i: len(structures[i]))

        def place(pos: int) -> bool:
            meter.tick()
            if pos == len(todo):
                return True
            i = todo[pos]
            d = instance.firms[i].demand
            for s in structures[i]:
                if all(residual[e] >= d for e in s):
                    for e in s:
                        residual[e] -= d
                    if place(pos + 1):
                        return True
                    for e in s:
                        residual[e] += d
            return False

        return place(0)

    subsets: list[tuple[Fraction, tuple[int, ...]]] = []
    for mask in range(1 << k):
        firms = tuple(i for i in range(k) if mask >> i & 1)
        welfare = sum((values[i] for i in firms), start=Fraction(0))
        subsets.append((welfare, firms))
    subsets.sort(key=lambda p: (-p[0], p[1]))
    for welfare, firms in subsets:
        if any(not structures[i] for i in firms):
            continue
        if routable(firms):
            return frozenset(firms), welfare
    return frozenset(), Fraction(0)


def opt_setcover(
    instance: SetCoverInstance,
    costs: Sequence[Fraction],
    budget: OracleBudget = DEFAULT_BUDGET,
    strategy: str = "branch_bound",
) -> tuple[frozenset[int], Fraction]:
    """Exact minimum-cost cover."""
    k = instance.n_bidders
    if k > 20:
        raise OracleRefusal(f"{k} sets exceed the oracle's hard cap of 20")
    meter = _Meter(budget)
    full = (1 << instance.n_elements) - 1
    if strategy == "lex":
        if (1 << k) > budget.max_states:
            raise OracleRefusal(f"2^{k} subsets exceed the oracle budget")
        best: tuple[frozenset[int], Fraction] | None = None
        for mask in range(1 << k):
            meter.tick()
            chosen = [i for i in range(k) if mask >> i & 1]
            covered = 0
            for i in chosen:
                covered |= instance.masks[i]
            if covered != full:
                continue
            cost = sum((costs[i] for i in chosen), start=Fraction(0))
            if best is None or cost < best[1]:
                best = (frozenset(chosen), cost)
        assert best is not None  # instance invariant: a full cover exists
        return best
    if strategy != "branch_bound":
        raise ValueError(f"unknown strategy {strategy!r}")

    best_choice: frozenset[int] = frozenset(range(k))
    best_cost = sum(costs, start=Fraction(0))

    def walk(i: int, covered: int, chosen: int, cost: Fraction) -> None:
        nonlocal best_choice, best_cost
        meter.tick()
        if cost >= best_cost and covered != full:
            return
        if covered == full:
            if cost < best_cost:
                best_choice = frozenset(j for j in range(k) if chosen >> j & 1)
                best_cost = cost
            return
        if i == k:
            return
        remaining = 0
        for j in range(i, k):
            remaining |= instance.masks[j]
        if covered | remaining != full:
            return
        walk(i + 1, covered | instance.masks[i], chosen | 1 << i, cost + costs[i])
        walk(i + 1, covered, chosen, cost)

    walk(0, 0, 0, Fraction(0))
    return best_choice, best_cost
