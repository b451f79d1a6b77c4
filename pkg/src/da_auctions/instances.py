"""Instance files: one JSON document per auction run.

Every number is carried as a decimal or num/den string and parsed into an
exact rational, except that network capacities and demands may use decimal
notation freely (they stay rational too).  Unknown fields are rejected so
a typo cannot silently change an experiment.  Serialization is canonical:
parse(serialize(x)) == x and equal inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .engine import BidSpace
from .graphs import Graph
from .network import CapacitatedGraph, Firm, NetworkInstance
from .setcover import SetCoverInstance
from .spectrum import (
    DiskGeometry,
    ExplicitGeometry,
    IntervalGeometry,
    SpectrumInstance,
)

PROBLEMS = ("spectrum", "network", "setcover")

Payload = SpectrumInstance | NetworkInstance | SetCoverInstance


class InstanceError(ValueError):
    """The document does not describe a valid instance."""


@dataclass(frozen=True)
class InstanceFile:
    problem: str
    space: BidSpace
    values: tuple[Fraction, ...] | None
    bids: tuple[Fraction, ...] | None
    payload: Payload

    @property
    def n_bidders(self) -> int:
        return self.space.n

    def effective_bids(self) -> tuple[Fraction, ...]:
        """Explicit bids if present, else the truthful bids of the values."""
        if self.bids is not None:
            return self.bids
        if self.values is None:
            raise InstanceError("instance carries neither bids nor values")
        return self.space.truthful_profile(self.values)


def _fraction(raw: Any, where: str) -> Fraction:
    if isinstance(raw, bool) or not isinstance(raw, str):
        raise InstanceError(f"{where}: numbers must be strings, got {raw!r}")
    try:
        return Fraction(raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise InstanceError(f"{where}: bad number {raw!r}: {exc}") from None


def _fractions(raw: Any, where: str) -> tuple[Fraction, ...]:
    if not isinstance(raw, list):
        raise InstanceError(f"{where}: expected a list")
    return tuple(_fraction(x, f"{where}[{i}]") for i, x in enumerate(raw))


def _take(doc: Any, where: str, required: Sequence[str], optional: Sequence[str] = ()):
    if not isinstance(doc, dict):
        raise InstanceError(f"{where}: expected an object")
    unknown = set(doc) - set(required) - set(optional)
    if unknown:
        raise InstanceError(f"{where}: unknown fields {sorted(unknown)}")
    missing = [k for k in required if k not in doc]
    if missing:
        raise InstanceError(f"{where}: missing fields {missing}")
    return doc


def _int(raw: Any, where: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise InstanceError(f"{where}: expected an integer")
    return raw


def _edge_list(raw: Any, where: str) -> list[tuple[int, int]]:
    if not isinstance(raw, list):
        raise InstanceError(f"{where}: expected a list of [u, v] pairs")
    edges = []
    for i, pair in enumerate(raw):
        if not isinstance(pair, list) or len(pair) != 2:
            raise InstanceError(f"{where}[{i}]: expected [u, v]")
        edges.append((_int(pair[0], f"{where}[{i}]"), _int(pair[1], f"{where}[{i}]")))
    return edges


def _parse_geometry(doc: Any):
    kind = _take(doc, "geometry", ["kind"], ["left", "length", "x", "y", "radius",
                                             "nodes", "edges"]).get("kind")
    if kind == "intervals":
        _take(doc, "geometry", ["kind", "left", "length"])
        return IntervalGeometry(
            _fractions(doc["left"], "geometry.left"),
            _fractions(doc["length"], "geometry.length"),
        )
    if kind == "disks":
        _take(doc, "geometry", ["kind", "x", "y", "radius"])
        return DiskGeometry(
            _fractions(doc["x"], "geometry.x"),
            _fractions(doc["y"], "geometry.y"),
            _fractions(doc["radius"], "geometry.radius"),
        )
    if kind == "explicit":
        _take(doc, "geometry", ["kind", "nodes", "edges"])
        n = _int(doc["nodes"], "geometry.nodes")
        return ExplicitGeometry(Graph.of(n, _edge_list(doc["edges"], "geometry.edges")))
    raise InstanceError(f"geometry.kind: unknown kind {kind!r}")


def _parse_payload(problem: str, doc: Any) -> Payload:
    if problem == "spectrum":
        _take(doc, "spectrum", ["geometry", "channels"])
        return SpectrumInstance(
            _parse_geometry(doc["geometry"]), _int(doc["channels"], "channels")
        )
    if problem == "network":
        _take(doc, "network", ["nodes", "edges", "capacities", "routing", "firms"])
        graph = CapacitatedGraph(
            _int(doc["nodes"], "network.nodes"),
            tuple(_edge_list(doc["edges"], "network.edges")),
            _fractions(doc["capacities"], "network.capacities"),
        )
        routing = doc["routing"]
        if routing not in ("unicast", "multicast"):
            raise InstanceError(f"network.routing: unknown mode {routing!r}")
        firms = []
        for i, fdoc in enumerate(doc["firms"]):
            _take(fdoc, f"network.firms[{i}]", ["terminals", "demand"])
            terminals = tuple(
                _int(t, f"network.firms[{i}].terminals") for t in fdoc["terminals"]
            )
            firms.append(
                Firm(terminals, _fraction(fdoc["demand"], f"network.firms[{i}].demand"))
            )
        return NetworkInstance(graph, tuple(firms), routing == "multicast")
    if problem == "setcover":
        _take(doc, "setcover", ["elements", "sets"])
        sets = []
        for i, raw in enumerate(doc["sets"]):
            if not isinstance(raw, list):
                raise InstanceError(f"setcover.sets[{i}]: expected a list")
            sets.append(frozenset(_int(e, f"setcover.sets[{i}]") for e in raw))
        return SetCoverInstance(_int(doc["elements"], "setcover.elements"), tuple(sets))
    raise InstanceError(f"problem: unknown problem {problem!r}")


def _payload_bidders(payload: Payload) -> int:
    if isinstance(payload, SpectrumInstance):
        return payload.n
    if isinstance(payload, NetworkInstance):
        return payload.n_firms
    return payload.n_bidders


def parse_instance(text: str) -> InstanceFile:
    doc = json.loads(text)
    _take(doc, "document", ["problem", "bid_spaces"],
          ["values", "bids", *PROBLEMS])
    problem = doc["problem"]
    if problem not in PROBLEMS:
        raise InstanceError(f"problem: unknown problem {problem!r}")
    if problem not in doc:
        raise InstanceError(f"document: missing the {problem!r} payload")
    extra_payloads = [p for p in PROBLEMS if p != problem and p in doc]
    if extra_payloads:
        raise InstanceError(f"document: stray payloads {extra_payloads}")

    spaces_doc = _take(doc["bid_spaces"], "bid_spaces", ["levels", "caps"])
    if not isinstance(spaces_doc["levels"], list):
        raise InstanceError("bid_spaces.levels: expected a list of lists")
    levels = tuple(
        _fractions(menu, f"bid_spaces.levels[{i}]")
        for i, menu in enumerate(spaces_doc["levels"])
    )
    caps = _fractions(spaces_doc["caps"], "bid_spaces.caps")
    try:
        space = BidSpace(levels, caps)
    except ValueError as exc:
        raise InstanceError(f"bid_spaces: {exc}") from None

    try:
        payload = _parse_payload(problem, doc[problem])
    except ValueError as exc:
        raise InstanceError(str(exc)) from None

    if _payload_bidders(payload) != space.n:
        raise InstanceError(
            f"bid_spaces describe {space.n} bidders but the payload has "
            f"{_payload_bidders(payload)}"
        )

    values = bids = None
    if "values" in doc:
        values = _fractions(doc["values"], "values")
        if len(values) != space.n:
            raise InstanceError("values: wrong length")
        for i, v in enumerate(values):
            if not 0 <= v <= space.caps[i]:
                raise InstanceError(f"values[{i}]: {v} outside [0, cap]")
    if "bids" in doc:
        bids = _fractions(doc["bids"], "bids")
        try:
            space.validate_profile(bids)
        except ValueError as exc:
            raise InstanceError(f"bids: {exc}") from None
    return InstanceFile(problem, space, values, bids, payload)


def load_instance(path: str) -> InstanceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())


def _frac_str(x: Fraction) -> str:
    return str(x)


def _geometry_doc(geometry) -> dict:
    if isinstance(geometry, IntervalGeometry):
        return {
            "kind": "intervals",
            "left": [_frac_str(x) for x in geometry.lefts],
            "length": [_frac_str(x) for x in geometry.lengths],
        }
    if isinstance(geometry, DiskGeometry):
        return {
            "kind": "disks",
            "x": [_frac_str(x) for x in geometry.xs],
            "y": [_frac_str(x) for x in geometry.ys],
            "radius": [_frac_str(x) for x in geometry.radii],
        }
    return {
        "kind": "explicit",
        "nodes": geometry.graph.n,
        "edges": [[u, v] for u, v in geometry.graph.edges],
    }


def _payload_doc(payload: Payload) -> dict:
    if isinstance(payload, SpectrumInstance):
        return {"geometry": _geometry_doc(payload.geometry), "channels": payload.channels}
    if isinstance(payload, NetworkInstance):
        return {
            "nodes": payload.graph.n,
            "edges": [[u, v] for u, v in payload.graph.edges],
            "capacities": [_frac_str(c) for c in payload.graph.capacities],
            "routing": "multicast" if payload.multicast else "unicast",
            "firms": [
                {
                    "terminals": list(f.terminals),
                    "demand": _frac_str(f.demand),
                }
                for f in payload.firms
            ],
        }
    return {
        "elements": payload.n_elements,
        "sets": [sorted(s) for s in payload.sets],
    }


def serialize_instance(inst: InstanceFile) -> str:
    doc: dict[str, Any] = {
        "problem": inst.problem,
        "bid_spaces": {
            "levels": [[_frac_str(b) for b in menu] for menu in inst.space.levels],
            "caps": [_frac_str(c) for c in inst.space.caps],
        },
    }
    if inst.values is not None:
        doc["values"] = [_frac_str(v) for v in inst.values]
    if inst.bids is not None:
        doc["bids"] = [_frac_str(b) for b in inst.bids]
    doc[inst.problem] = _payload_doc(inst.payload)
    return json.dumps(doc, indent=2) + "\n"


def save_instance(inst: InstanceFile, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(inst))
