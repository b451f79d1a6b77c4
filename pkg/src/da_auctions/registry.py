"""One adapter per problem family, keyed by the instance file's problem tag.

Each family bundles the auction scorer, its orientation, the direct greedy
it implements, the matching brute-force oracle, and the family's proven
welfare (or cost) guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .engine import Orientation, Scorer
from .network import NetworkInstance, NetworkScorer, greedy_routing
from .oracles import (
    DEFAULT_BUDGET,
    OracleBudget,
    opt_k_colorable,
    opt_routing,
    opt_setcover,
)
from .setcover import SetCoverInstance, CoverScorer, primal_dual_cover
from .spectrum import SpectrumInstance, SpectrumScorer, claw_bound, greedy_k_colorable


@dataclass(frozen=True)
class ProblemFamily:
    name: str
    orientation: Orientation
    make_scorer: Callable[..., Scorer]
    greedy_retained: Callable[..., tuple[int, ...]]
    oracle: Callable[..., tuple[frozenset[int], Fraction]]
    ratio_bound: Callable[..., tuple[float, dict[str, str]]]


def _spectrum_greedy(payload: SpectrumInstance, weights) -> tuple[int, ...]:
    return greedy_k_colorable(payload.graph, payload.channels, weights)[0]


def _spectrum_oracle(payload: SpectrumInstance, weights, budget: OracleBudget):
    return opt_k_colorable(payload.graph, payload.channels, weights, budget)


def _spectrum_ratio(payload: SpectrumInstance) -> tuple[float, dict[str, str]]:
    alpha = claw_bound(payload.geometry)
    return 1.0 - math.exp(-1.0 / float(alpha)), {"alpha": str(alpha)}


def _network_greedy(payload: NetworkInstance, values) -> tuple[int, ...]:
    return greedy_routing(payload, values).retained


def _network_ratio(payload: NetworkInstance) -> tuple[float, dict[str, str]]:
    # gamma = 2 reflects the metric-closure Steiner subroutine used here.
    gamma = 2.0 if payload.multicast else 1.0
    c = float(payload.graph.min_capacity)
    m = payload.graph.m
    bound = 1.0 / ((math.e * gamma * c / (c - 1.0)) * m ** (1.0 / (c - 1.0)))
    return bound, {
        "gamma": str(gamma),
        "min_capacity": str(payload.graph.min_capacity),
        "edges": str(m),
    }


def _setcover_greedy(payload: SetCoverInstance, costs) -> tuple[int, ...]:
    return primal_dual_cover(payload, costs).selected


def _setcover_ratio(payload: SetCoverInstance) -> tuple[float, dict[str, str]]:
    return 1.0 / payload.frequency, {"frequency": str(payload.frequency)}


FAMILIES: dict[str, ProblemFamily] = {
    "spectrum": ProblemFamily(
        "spectrum",
        Orientation.PROCUREMENT,
        SpectrumScorer,
        _spectrum_greedy,
        _spectrum_oracle,
        _spectrum_ratio,
    ),
    "network": ProblemFamily(
        "network",
        Orientation.PROCUREMENT,
        NetworkScorer,
        _network_greedy,
        lambda payload, values, budget: opt_routing(payload, values, budget),
        _network_ratio,
    ),
    "setcover": ProblemFamily(
        "setcover",
        Orientation.SELLING,
        CoverScorer,
        _setcover_greedy,
        lambda payload, costs, budget: opt_setcover(payload, costs, budget),
        _setcover_ratio,
    ),
}


def family(name: str) -> ProblemFamily:
    try:
        return FAMILIES[name]
    except KeyError:
        raise KeyError(f"no problem family named {name!r}") from None
