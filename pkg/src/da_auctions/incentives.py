"""Exhaustive incentive-property verifiers.

Both verifiers replay the mechanism over enumerated bid profiles and
compare utilities against truthful reporting.  Enumeration is guarded by a
hard budget (in mechanism evaluations); exceeding it raises instead of
silently truncating the search.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .engine import BidSpace, Mechanism, Orientation

DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    """The planned enumeration would exceed the evaluation budget."""


@dataclass(frozen=True)
class Deviation:
    """One profitable unilateral lie."""

    bidder: int
    bid: Fraction
    utility: Fraction
    truthful_utility: Fraction


@dataclass(frozen=True)
class CoalitionDeviation:
    """A joint lie after which every coalition member strictly gains."""

    coalition: tuple[int, ...]
    bids: tuple[Fraction, ...]
    utilities: tuple[Fraction, ...]
    truthful_utilities: tuple[Fraction, ...]


@dataclass
class DeviationReport:
    deviations: list[Deviation] = field(default_factory=list)
    profiles_checked: int = 0

    @property
    def clean(self) -> bool:
        return not self.deviations


@dataclass
class CoalitionReport:
    violations: list[CoalitionDeviation] = field(default_factory=list)
    profiles_checked: int = 0

    @property
    def clean(self) -> bool:
        return not self.violations


class _UtilityOracle:
    """Utility queries against a mechanism, with payment caching.

    Payments are cached per (winner, opponents' bids) only when the
    mechanism declares them independent of the winner's own bid.
    """

    def __init__(
        self,
        mechanism: Mechanism,
        orientation: Orientation,
        values: Sequence[Fraction],
    ) -> None:
        self.mechanism = mechanism
        self.orientation = orientation
        self.values = values
        self._payment_cache: dict[tuple[int, tuple[Fraction, ...]], Fraction] = {}

    def _payment(self, bids: tuple[Fraction, ...], winner: int) -> Fraction:
        if not self.mechanism.payments_ignore_own_bid:
            return self.mechanism.payment(bids, winner)
        key = (winner, bids[:winner] + bids[winner + 1:])
        hit = self._payment_cache.get(key)
        if hit is None:
            hit = self.mechanism.payment(bids, winner)
            self._payment_cache[key] = hit
        return hit

    def utilities(
        self, bids: tuple[Fraction, ...], bidders: Sequence[int]
    ) -> list[Fraction]:
        allocation = self.mechanism.allocate(bids)
        out = []
        for i in bidders:
            if i not in allocation:
                out.append(Fraction(0))
            elif self.orientation is Orientation.PROCUREMENT:
                out.append(self._payment(bids, i) - self.values[i])
            else:
                out.append(self.values[i] - self._payment(bids, i))
        return out


def verify_strategyproof(
    mechanism: Mechanism,
    values: Sequence[Fraction],
    space: BidSpace,
    orientation: Orientation,
    budget: int = DEFAULT_BUDGET,
    opponents: str = "truthful",
) -> DeviationReport:
    """Search for a profitable unilateral deviation from truthful bidding.

    With ``opponents="truthful"`` every other bidder reports its truthful
    bid; ``opponents="all"`` additionally enumerates every opponent
    profile, which is exponential and only sensible for tiny instances.
    An empty report means no enumerated deviation strictly beat truth.
    """
    n = space.n
    menus = space.levels
    if opponents == "truthful":
        planned = sum(len(m) for m in menus) + 1
    elif opponents == "all":
        total = 1
        for m in menus:
            total *= len(m)
        planned = n * total
    else:
        raise ValueError(f"unknown opponents mode {opponents!r}")
    if planned > budget:
        raise BudgetExceeded(f"{planned} evaluations needed, budget is {budget}")

    oracle = _UtilityOracle(mechanism, orientation, values)
    truthful = space.truthful_profile(values)
    report = DeviationReport()

    def check_bidder(i: int, rest: tuple[Fraction, ...]) -> None:
        # rest is a full profile; only slot i gets overwritten below.
        base_profile = rest[:i] + (truthful[i],) + rest[i + 1:]
        (base_u,) = oracle.utilities(base_profile, [i])
        report.profiles_checked += 1
        for b in menus[i]:
            if b == truthful[i]:
                continue
            profile = rest[:i] + (b,) + rest[i + 1:]
            (u,) = oracle.utilities(profile, [i])
            report.profiles_checked += 1
            if u > base_u:
                report.deviations.append(Deviation(i, b, u, base_u))

    if opponents == "truthful":
        for i in range(n):
            check_bidder(i, truthful)
    else:
        for i in range(n):
            other_menus = [menus[j] if j != i else (truthful[i],) for j in range(n)]
            for rest in itertools.product(*other_menus):
                check_bidder(i, rest)
    return report


def verify_wgsp(
    mechanism: Mechanism,
    values: Sequence[Fraction],
    space: BidSpace,
    orientation: Orientation,
    max_coalition: int = 2,
    budget: int = DEFAULT_BUDGET,
) -> CoalitionReport:
    """Search for a coalition deviation making every member strictly gain.

    Enumerates every coalition of size up to ``max_coalition`` and every
    joint bid for its members, holding outsiders at truthful bids.  Weak
    group strategy-proofness holds on the instance iff the report is
    clean.  Size-1 coalitions reduce to the unilateral check.
    """
    n = space.n
    menus = space.levels
    planned = 1
    for size in range(1, max_coalition + 1):
        for coalition in itertools.combinations(range(n), size):
            block = 1
            for i in coalition:
                block *= len(menus[i])
            planned += block
    if planned > budget:
        raise BudgetExceeded(f"{planned} evaluations needed, budget is {budget}")

    oracle = _UtilityOracle(mechanism, orientation, values)
    truthful = space.truthful_profile(values)
    base_u = oracle.utilities(truthful, range(n))
    report = CoalitionReport(profiles_checked=1)

    for size in range(1, max_coalition + 1):
        for coalition in itertools.combinations(range(n), size):
            for joint in itertools.product(*(menus[i] for i in coalition)):
                profile = list(truthful)
                for i, b in zip(coalition, joint):
                    profile[i] = b
                profile_t = tuple(profile)
                if profile_t == truthful:
                    continue
                us = oracle.utilities(profile_t, coalition)
                report.profiles_checked += 1
                if all(u > base_u[i] for i, u in zip(coalition, us)):
                    report.violations.append(
                        CoalitionDeviation(
                            coalition,
                            joint,
                            tuple(us),
                            tuple(base_u[i] for i in coalition),
                        )
                    )
    return report
