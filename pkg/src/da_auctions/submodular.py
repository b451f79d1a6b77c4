"""Monotone submodular maximization under a cardinality budget.

The greedy here supports an approximate argmax: any picker that returns an
element whose marginal is within a 1/alpha factor of the best marginal
still yields a (1 - e^(-1/alpha)) fraction of the optimum.  Values stay
exact rationals; the e^(-1/alpha) constant is the only float involved and
it only appears inside the final bound comparison.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Callable, Sequence


class BudgetExceeded(RuntimeError):
    """Exhaustive enumeration would exceed its state budget."""


class PickerContractError(RuntimeError):
    """An approximate picker returned an element below its declared factor."""


@dataclass(frozen=True)
class SetFunctionOracle:
    """A set function f over ground elements 0..size-1 with f(empty) = 0."""

    size: int
    fn: Callable[[frozenset[int]], Fraction]

    def value(self, subset: frozenset[int]) -> Fraction:
        return self.fn(subset)

    def marginal(self, subset: frozenset[int], element: int) -> Fraction:
        return self.fn(subset | {element}) - self.fn(subset)


@dataclass(frozen=True)
class CoverageFunction:
    """Union-of-weighted-items coverage; monotone submodular by construction.

    ``member_items[g]`` lists the items covered by ground element g and
    ``item_weights`` carries one nonnegative weight per item.
    """

    item_weights: tuple[Fraction, ...]
    member_items: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        for items in self.member_items:
            for e in items:
                if not 0 <= e < len(self.item_weights):
                    raise ValueError(f"item {e} has no weight")

    def oracle(self) -> SetFunctionOracle:
        masks = [sum(1 << e for e in items) for items in self.member_items]
        weights = self.item_weights

        def f(subset: frozenset[int]) -> Fraction:
            covered = 0
            for g in subset:
                covered |= masks[g]
            total = Fraction(0)
            while covered:
                low = covered & -covered
                total += weights[low.bit_length() - 1]
                covered ^= low
            return total

        return SetFunctionOracle(len(self.member_items), f)


class ExactPicker:
    """Plain argmax with the lowest-index tie-break."""

    alpha = Fraction(1)

    def __call__(self, marginals: Sequence[tuple[int, Fraction]]) -> int:
        return max(marginals, key=lambda p: (p[1], -p[0]))[0]


class SecondBestPicker:
    """Deliberately weak picker used to exercise the alpha-approximate bound.

    Takes the second-best marginal whenever it is within the declared
    factor of the best, otherwise falls back to the best.
    """

    def __init__(self, alpha: Fraction) -> None:
        if alpha < 1:
            raise ValueError("alpha must be >= 1")
        self.alpha = Fraction(alpha)

    def __call__(self, marginals: Sequence[tuple[int, Fraction]]) -> int:
        ranked = sorted(marginals, key=lambda p: (-p[1], p[0]))
        if len(ranked) >= 2 and ranked[1][1] * self.alpha >= ranked[0][1]:
            return ranked[1][0]
        return ranked[0][0]


@dataclass(frozen=True)
class GreedyTrace:
    """Selected elements plus f after every iteration (f(S_0)..f(S_k))."""

    selected: tuple[int, ...]
    values: tuple[Fraction, ...]

    @property
    def achieved(self) -> Fraction:
        return self.values[-1]


def greedy_cardinality_max(
    oracle: SetFunctionOracle, k: int, picker=None
) -> GreedyTrace:
    """Greedy maximization of a monotone submodular f with |S| <= k.

    The picker must honor its declared ``alpha``: the chosen marginal must
    be at least the best marginal divided by alpha.  That contract is
    re-checked each iteration (the exact best is known here) and a
    violation raises PickerContractError.
    """
    if k < 1:
        raise ValueError("cardinality budget must be >= 1")
    if picker is None:
        picker = ExactPicker()
    alpha = Fraction(picker.alpha)
    chosen: list[int] = []
    current = frozenset()
    values = [oracle.value(current)]
    for _ in range(min(k, oracle.size)):
        candidates = [g for g in range(oracle.size) if g not in current]
        marginals = [(g, oracle.marginal(current, g)) for g in candidates]
        best = max(m for _, m in marginals)
        pick = picker(marginals)
        picked_marginal = dict(marginals)[pick]
        if picked_marginal * alpha < best:
            raise PickerContractError(
                f"picked marginal {picked_marginal} below best {best} / alpha {alpha}"
            )
        chosen.append(pick)
        current = current | {pick}
        values.append(oracle.value(current))
    return GreedyTrace(tuple(chosen), tuple(values))


def brute_force_max(
    oracle: SetFunctionOracle, k: int, max_subsets: int = 2_000_000
) -> tuple[frozenset[int], Fraction]:
    """Exact maximum of f over subsets of size at most k."""
    total = sum(math.comb(oracle.size, j) for j in range(min(k, oracle.size) + 1))
    if total > max_subsets:
        raise BudgetExceeded(f"{total} subsets exceed cap {max_subsets}")
    best_set: frozenset[int] = frozenset()
    best_val = oracle.value(best_set)
    for j in range(1, min(k, oracle.size) + 1):
        for combo in itertools.combinations(range(oracle.size), j):
            s = frozenset(combo)
            v = oracle.value(s)
            if v > best_val:
                best_set, best_val = s, v
    return best_set, best_val


def approx_bound(alpha) -> float:
    """The guarantee constant 1 - e^(-1/alpha)."""
    return 1.0 - math.exp(-1.0 / float(alpha))


def meets_approx_bound(
    optimum: Fraction, achieved: Fraction, alpha, rel_tol: float = 1e-12
) -> bool:
    """achieved >= (1 - e^(-1/alpha)) * optimum, up to rel_tol on the constant."""
    if optimum == 0:
        return achieved >= 0
    return float(achieved) >= approx_bound(alpha) * (1.0 - rel_tol) * float(optimum)


def greedy_gap_claims_hold(
    trace: GreedyTrace, optimum: Fraction, alpha: Fraction, k: int
) -> bool:
    """Per-iteration accounting of the alpha-approximate greedy, exactly.

    Checks, in exact rational arithmetic, that every step closes at least a
    1/(alpha*k) fraction of the remaining gap to the optimum and that the
    remaining gap therefore decays geometrically.
    """
    alpha = Fraction(alpha)
    vals = trace.values
    for j in range(len(vals) - 1):
        gain = vals[j + 1] - vals[j]
        if gain * alpha * k < optimum - vals[j]:
            return False
    decay = 1 - 1 / (alpha * k)
    for j in range(1, len(vals)):
        if optimum - vals[j] > decay ** j * optimum:
            return False
    return True


def spot_check_properties(
    oracle: SetFunctionOracle, rng: Random, rounds: int = 50
) -> list[str]:
    """Randomized monotonicity / diminishing-returns / normalization check.

    Returns human-readable violation descriptions; empty means the sampled
    triples were consistent with a monotone submodular f, f(empty) = 0.
    """
    problems = []
    if oracle.value(frozenset()) != 0:
        problems.append("f(empty set) != 0")
    ground = list(range(oracle.size))
    if not ground:
        return problems
    for _ in range(rounds):
        small = frozenset(g for g in ground if rng.random() < 0.3)
        big = small | frozenset(g for g in ground if rng.random() < 0.3)
        if oracle.value(small) > oracle.value(big):
            problems.append(f"monotonicity fails on {sorted(small)} vs {sorted(big)}")
        outside = [g for g in ground if g not in big]
        if outside:
            i = rng.choice(outside)
            if oracle.marginal(small, i) < oracle.marginal(big, i):
                problems.append(
                    f"diminishing returns fail for {i} on {sorted(small)} vs {sorted(big)}"
                )
    return problems
