"""Cost minimization with set cover constraints, all in exact rationals.

The primal-dual greedy raises one element dual per step, by exactly the
slack of the cheapest still-useful set, which makes that set tight and
selects it.  Its selling-auction scorer gives an active bidder its slack
while the bidder still covers something new and +inf once its whole set is
covered (such requests are honored unconditionally).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

from .engine import INF, AuctionFault, Scorer


@dataclass(frozen=True)
class SetCoverInstance:
    """Universe 0..n_elements-1 plus one element subset per bidder."""

    n_elements: int
    sets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        covered = set()
        for i, s in enumerate(self.sets):
            for e in s:
                if not 0 <= e < self.n_elements:
                    raise ValueError(f"set {i} contains unknown element {e}")
            covered |= s
        if len(covered) != self.n_elements:
            missing = sorted(set(range(self.n_elements)) - covered)
            raise ValueError(f"elements {missing} are covered by no set")

    @property
    def n_bidders(self) -> int:
        return len(self.sets)

    @cached_property
    def frequency(self) -> int:
        """Max number of sets sharing one element; the approximation factor."""
        return max(
            sum(1 for s in self.sets if e in s) for e in range(self.n_elements)
        )

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << e for e in s) for s in self.sets)


@dataclass(frozen=True)
class CoverRun:
    """Selected sets in order, final element duals, and raise associations."""

    selected: tuple[int, ...]
    duals: tuple[Fraction, ...]
    associations: tuple[tuple[int, int], ...]

    def cost(self, costs: Sequence[Fraction]) -> Fraction:
        return sum((costs[i] for i in self.selected), start=Fraction(0))


def _slack(
    instance: SetCoverInstance, costs: Sequence[Fraction], y: Sequence[Fraction], i: int
) -> Fraction:
    return costs[i] - sum((y[e] for e in instance.sets[i]), start=Fraction(0))


def primal_dual_cover(
    instance: SetCoverInstance, costs: Sequence[Fraction]
) -> CoverRun:
    """Raise element duals until sets go tight; collect the tight sets.

    Each step picks the minimum-slack set among those still covering an
    uncovered element (ties toward the lower index) and raises the dual of
    the lowest-indexed uncovered element of that set by the slack.  Dual
    feasibility holds after every step and every selected set is tight.
    """
    y = [Fraction(0)] * instance.n_elements
    covered = 0
    selected: list[int] = []
    associations: list[tuple[int, int]] = []
    unselected = list(range(instance.n_bidders))
    full = (1 << instance.n_elements) - 1
    while covered != full:
        best = -1
        best_slack: Fraction | None = None
        for i in unselected:
            if instance.masks[i] & ~covered == 0:
                continue
            slack = _slack(instance, costs, y, i)
            if best_slack is None or slack < best_slack:
                best, best_slack = i, slack
        if best < 0:
            raise AuctionFault("uncovered element with no useful set left")
        fresh = instance.masks[best] & ~covered
        element = (fresh & -fresh).bit_length() - 1
        assert best_slack is not None
        if best_slack < 0:
            raise AuctionFault("negative slack: dual feasibility was broken")
        y[element] += best_slack
        covered |= instance.masks[best]
        unselected.remove(best)
        selected.append(best)
        associations.append((best, element))
    return CoverRun(tuple(selected), tuple(y), tuple(associations))


class CoverScorer(Scorer):
    """Slack while the bidder still covers something new, else +inf."""

    def __init__(self, instance: SetCoverInstance) -> None:
        self.instance = instance
        self.y = [Fraction(0)] * instance.n_elements
        self.covered = 0
        self.associations: list[tuple[int, int]] = []

    def begin(self, n: int) -> None:
        if n != self.instance.n_bidders:
            raise ValueError("bidder count does not match set count")
        self.y = [Fraction(0)] * self.instance.n_elements
        self.covered = 0
        self.associations = []

    def score(self, bidder: int, bid: Fraction) -> Fraction | float:
        if self.instance.masks[bidder] & ~self.covered == 0:
            return INF
        slack = bid - sum(
            (self.y[e] for e in self.instance.sets[bidder]), start=Fraction(0)
        )
        if slack < 0:
            raise AuctionFault("negative slack observed while duals were feasible")
        return slack

    def reject(self, bidder: int, bid: Fraction) -> None:
        fresh = self.instance.masks[bidder] & ~self.covered
        element = (fresh & -fresh).bit_length() - 1
        slack = bid - sum(
            (self.y[e] for e in self.instance.sets[bidder]), start=Fraction(0)
        )
        self.y[element] += slack
        self.covered |= self.instance.masks[bidder]
        self.associations.append((bidder, element))


def dual_cover_certificate(
    instance: SetCoverInstance, costs: Sequence[Fraction], y: Sequence[Fraction]
) -> Fraction:
    """Weak-duality lower bound sum(y) after an exact feasibility check."""
    for i in range(instance.n_bidders):
        if _slack(instance, costs, y, i) < 0:
            raise AuctionFault(f"dual constraint of set {i} is violated")
    return sum(y, start=Fraction(0))


def is_cover(instance: SetCoverInstance, chosen: Sequence[int]) -> bool:
    covered = 0
    for i in chosen:
        covered |= instance.masks[i]
    return covered == (1 << instance.n_elements) - 1
