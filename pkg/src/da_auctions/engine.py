"""Deferred-acceptance auction engine.

An auction run starts with every bidder active and repeatedly removes the
extremal-scoring active bidder: the highest scorer under the procurement
orientation (stop once every score is 0), the lowest scorer under the
selling orientation (stop once every score is +inf).  Removed bidders keep
their rights or contracts; the surviving "allocated" bidders transact at
threshold payments.

Scores must be nonnegative, nondecreasing in the bidder's own bid, and may
depend only on the bid and on the rejection history; the engine never
exposes active bidders' bids to a scorer.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Sequence, Union

INF = math.inf

#: Scores are exact rationals where the problem allows it and floats where
#: exponentials force reals (network routing); +inf only under Selling.
Score = Union[Fraction, float, int]


class Orientation(Enum):
    PROCUREMENT = "procurement"
    SELLING = "selling"


class AuctionFault(RuntimeError):
    """A scorer broke its contract mid-run (negative score, bad state)."""


@dataclass(frozen=True)
class BidSpace:
    """Per-bidder finite bid menus plus per-bidder value caps.

    Each menu is a strictly increasing, nonempty tuple of nonnegative
    rationals whose top element strictly exceeds the bidder's value cap,
    so a truthful bid always exists.
    """

    levels: tuple[tuple[Fraction, ...], ...]
    caps: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if len(self.levels) != len(self.caps):
            raise ValueError("one bid menu and one cap per bidder")
        for i, menu in enumerate(self.levels):
            if not menu:
                raise ValueError(f"bidder {i}: empty bid menu")
            if any(b < 0 for b in menu):
                raise ValueError(f"bidder {i}: negative bid level")
            if any(a >= b for a, b in zip(menu, menu[1:])):
                raise ValueError(f"bidder {i}: menu not strictly increasing")
            if menu[-1] <= self.caps[i]:
                raise ValueError(
                    f"bidder {i}: max bid {menu[-1]} must exceed value cap {self.caps[i]}"
                )

    @property
    def n(self) -> int:
        return len(self.levels)

    @staticmethod
    def uniform(n: int, menu: Sequence[Fraction], cap: Fraction) -> "BidSpace":
        """Same menu and cap for every bidder."""
        levels = tuple(Fraction(b) for b in menu)
        return BidSpace((levels,) * n, (Fraction(cap),) * n)

    def truthful_bid(self, bidder: int, value: Fraction) -> Fraction:
        """Smallest allowed bid strictly above the bidder's value."""
        if not 0 <= value <= self.caps[bidder]:
            raise ValueError(f"bidder {bidder}: value {value} outside [0, cap]")
        return min(b for b in self.levels[bidder] if b > value)

    def truthful_profile(self, values: Sequence[Fraction]) -> tuple[Fraction, ...]:
        return tuple(self.truthful_bid(i, v) for i, v in enumerate(values))

    def validate_profile(self, bids: Sequence[Fraction]) -> None:
        if len(bids) != self.n:
            raise ValueError("profile length does not match bidder count")
        for i, b in enumerate(bids):
            if b not in self.levels[i]:
                raise ValueError(f"bidder {i}: bid {b} not in menu")


@dataclass(frozen=True)
class BidProfile:
    """A validated bid vector, one entry per bidder."""

    bids: tuple[Fraction, ...]

    @property
    def n(self) -> int:
        return len(self.bids)

    @staticmethod
    def of(space: BidSpace, bids: Sequence[Fraction]) -> "BidProfile":
        space.validate_profile(bids)
        return BidProfile(tuple(bids))


class Scorer(ABC):
    """Scoring oracle driving one auction family.

    The engine calls ``begin`` once per run, ``score`` for every active
    bidder in every round, and ``reject`` when a bidder leaves the active
    set.  Helper state may change only inside ``reject``.
    """

    @abstractmethod
    def begin(self, n: int) -> None:
        """Reset helper state for a fresh run over bidders 0..n-1."""

    @abstractmethod
    def score(self, bidder: int, bid: Fraction) -> Score:
        """Score an active bidder against the current helper state."""

    @abstractmethod
    def reject(self, bidder: int, bid: Fraction) -> None:
        """Record that a bidder just left the active set."""


@dataclass(frozen=True)
class AuctionOutcome:
    """Final active set, rejection trace, and welfare of the rejected.

    ``trace`` lists (bidder, score at rejection) in rejection order; the
    rejected bidders are the ones who retain their rights, and
    ``retained_welfare`` sums their bids.
    """

    allocation: frozenset[int]
    trace: tuple[tuple[int, Score], ...]
    retained_welfare: Fraction

    @property
    def retained(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.trace)


def run_auction(
    scorer: Scorer, bids: Sequence[Fraction], orientation: Orientation
) -> AuctionOutcome:
    """Run one deferred-acceptance auction; payments are computed separately.

    Deterministic: score ties are broken toward the lowest bidder index.
    """
    n = len(bids)
    scorer.begin(n)
    active = list(range(n))
    trace: list[tuple[int, Score]] = []
    procurement = orientation is Orientation.PROCUREMENT
    while active:
        chosen = -1
        chosen_score: Score | None = None
        for i in active:
            s = scorer.score(i, bids[i])
            if s < 0:
                raise AuctionFault(f"negative score {s} for bidder {i}")
            if procurement:
                if s > 0 and (chosen_score is None or s > chosen_score):
                    chosen, chosen_score = i, s
            else:
                if s < INF and (chosen_score is None or s < chosen_score):
                    chosen, chosen_score = i, s
        if chosen_score is None:
            break
        active.remove(chosen)
        trace.append((chosen, chosen_score))
        scorer.reject(chosen, bids[chosen])
    welfare = sum((bids[i] for i, _ in trace), start=Fraction(0))
    return AuctionOutcome(frozenset(active), tuple(trace), welfare)


def _wins(
    scorer: Scorer,
    bids: Sequence[Fraction],
    winner: int,
    orientation: Orientation,
    trial_bid: Fraction,
) -> bool:
    trial = list(bids)
    trial[winner] = trial_bid
    return winner in run_auction(scorer, trial, orientation).allocation


def threshold_payment(
    scorer: Scorer,
    bids: Sequence[Fraction],
    winner: int,
    orientation: Orientation,
    space: BidSpace,
    method: str = "bisect",
) -> Fraction:
    """Threshold payment of an allocated bidder.

    Procurement pays the maximum own bid that keeps the winner allocated,
    selling charges the minimum.  ``method="bisect"`` exploits that the
    winning bids form an interval of the menu (see
    ``verify_allocation_monotone``); ``method="scan"`` re-runs the auction
    for every menu entry and is the oracle the tests compare against.
    """
    base = run_auction(scorer, bids, orientation)
    if winner not in base.allocation:
        raise ValueError(f"bidder {winner} is not allocated at the given bids")
    levels = space.levels[winner]
    if method == "scan":
        winning = [b for b in levels if _wins(scorer, bids, winner, orientation, b)]
        if not winning:
            raise AuctionFault("winner lost at every own bid despite winning the run")
        return max(winning) if orientation is Orientation.PROCUREMENT else min(winning)
    if method != "bisect":
        raise ValueError(f"unknown payment method {method!r}")

    cur = levels.index(bids[winner])
    if orientation is Orientation.PROCUREMENT:
        # Winning bids are downward closed; find the top of the interval.
        lo, hi = cur, len(levels) - 1
        if lo == hi or _wins(scorer, bids, winner, orientation, levels[hi]):
            return levels[hi]
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _wins(scorer, bids, winner, orientation, levels[mid]):
                lo = mid
            else:
                hi = mid
        return levels[lo]
    # Selling: winning bids are upward closed; find the bottom.
    lo, hi = 0, cur
    if lo == hi or _wins(scorer, bids, winner, orientation, levels[lo]):
        return levels[lo]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _wins(scorer, bids, winner, orientation, levels[mid]):
            hi = mid
        else:
            lo = mid
    return levels[hi]


def verify_allocation_monotone(
    scorer: Scorer,
    bids: Sequence[Fraction],
    bidder: int,
    orientation: Orientation,
    space: BidSpace,
) -> bool:
    """Check that the bidder's winning bids form an interval of the menu.

    Procurement requires a downward-closed winning set (a prefix of the
    ascending menu), selling an upward-closed one.  Full scan; quadratic in
    the menu size times the auction cost.
    """
    flags = [
        _wins(scorer, bids, bidder, orientation, b) for b in space.levels[bidder]
    ]
    if orientation is Orientation.PROCUREMENT:
        flags.reverse()
    # Upward closed iff no winning bid is followed by a losing one.
    return all(flags[i] <= flags[i + 1] for i in range(len(flags) - 1))


class Mechanism(ABC):
    """Allocation plus payments, the interface the incentive verifiers drive.

    ``payments_ignore_own_bid`` declares that a winner's payment does not
    depend on their own bid (true for threshold payment rules); verifiers
    use it to cache payment queries.
    """

    payments_ignore_own_bid: bool = False

    @abstractmethod
    def allocate(self, bids: Sequence[Fraction]) -> frozenset[int]:
        ...

    @abstractmethod
    def payment(self, bids: Sequence[Fraction], winner: int) -> Fraction:
        ...


class DAMechanism(Mechanism):
    """A deferred-acceptance auction packaged with its threshold payments."""

    payments_ignore_own_bid = True

    def __init__(
        self,
        scorer: Scorer,
        space: BidSpace,
        orientation: Orientation,
        payment_method: str = "bisect",
    ) -> None:
        self.scorer = scorer
        self.space = space
        self.orientation = orientation
        self.payment_method = payment_method

    def run(self, bids: Sequence[Fraction]) -> AuctionOutcome:
        return run_auction(self.scorer, bids, self.orientation)

    def allocate(self, bids: Sequence[Fraction]) -> frozenset[int]:
        return self.run(bids).allocation

    def payment(self, bids: Sequence[Fraction], winner: int) -> Fraction:
        return threshold_payment(
            self.scorer, bids, winner, self.orientation, self.space,
            method=self.payment_method,
        )

    def utility(self, bids: Sequence[Fraction], bidder: int, value: Fraction) -> Fraction:
        """Quasi-linear utility relative to keeping the right or contract."""
        if bidder not in self.allocate(bids):
            return Fraction(0)
        p = self.payment(bids, bidder)
        if self.orientation is Orientation.PROCUREMENT:
            return p - value
        return value - p
