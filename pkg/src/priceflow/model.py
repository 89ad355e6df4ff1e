"""Problem instances: links, sources, routing incidence, and validation.

A network is a set of capacitated links and a set of sources, each with a
fixed path (the ordered set of links it crosses), a strictly concave
utility, and closed rate bounds.  Validation produces an immutable,
densely indexed instance on which all downstream vector arithmetic runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

#: Bounds applied when a source does not specify its own.  The lower bound
#: is kept strictly positive so weighted-log utilities stay finite and the
#: rate response is well defined at zero price.
DEFAULT_RATE_BOUNDS = (1e-6, 1e6)

LOG_WEIGHTED = "log-weighted"


class NetworkError(ValueError):
    """An inconsistent network description."""


@dataclass(frozen=True)
class LinkSpec:
    """A capacitated link."""

    id: str
    capacity: float


@dataclass(frozen=True)
class UtilitySpec:
    """Source utility.  Only weighted log, ``weight * log(rate)``, is supported."""

    kind: str = LOG_WEIGHTED
    weight: float = 1.0


@dataclass(frozen=True)
class SourceSpec:
    """A source: fixed path over link ids, utility, and rate bounds [m, M]."""

    id: str
    path: tuple[str, ...]
    utility: UtilitySpec = field(default_factory=UtilitySpec)
    rate_bounds: tuple[float, float] = DEFAULT_RATE_BOUNDS

    def __post_init__(self):
        object.__setattr__(self, "path", tuple(self.path))
        object.__setattr__(self, "rate_bounds", tuple(self.rate_bounds))


@dataclass(frozen=True)
class NetworkSpec:
    """A full problem description, prior to validation."""

    links: tuple[LinkSpec, ...]
    sources: tuple[SourceSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "sources", tuple(self.sources))


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class ValidatedNetwork:
    """An immutable, densely indexed problem instance.

    Arrays are read-only; the instance is safe to share across concurrent
    tasks.  Link ``l`` and source ``s`` refer to dense indices assigned in
    declaration order.
    """

    spec: NetworkSpec
    link_ids: tuple[str, ...]
    source_ids: tuple[str, ...]
    capacities: np.ndarray  # (L,)
    weights: np.ndarray  # (S,)
    rate_min: np.ndarray  # (S,)
    rate_max: np.ndarray  # (S,)
    routing: np.ndarray  # (L, S), entries in {0.0, 1.0}

    @property
    def num_links(self) -> int:
        return len(self.link_ids)

    @property
    def num_sources(self) -> int:
        return len(self.source_ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ValidatedNetwork):
            return NotImplemented
        return (
            self.link_ids == other.link_ids
            and self.source_ids == other.source_ids
            and np.array_equal(self.capacities, other.capacities)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.rate_min, other.rate_min)
            and np.array_equal(self.rate_max, other.rate_max)
            and np.array_equal(self.routing, other.routing)
        )


def _positive_finite(value, what: str) -> float:
    v = float(value)
    if not math.isfinite(v) or v <= 0.0:
        raise NetworkError(f"{what} must be positive and finite, got {value!r}")
    return v


def validate_network(spec: NetworkSpec | ValidatedNetwork) -> ValidatedNetwork:
    """Check a network description and return the dense immutable instance.

    Validating an already validated instance returns it unchanged, so the
    operation is idempotent.

    Raises
    ------
    NetworkError
        On duplicate ids, unknown or repeated links in a path, empty paths,
        nonpositive capacities or weights, or rate bounds with m >= M.
    """
    if isinstance(spec, ValidatedNetwork):
        return spec

    if not spec.links:
        raise NetworkError("network needs at least one link")
    if not spec.sources:
        raise NetworkError("network needs at least one source")

    link_index: dict[str, int] = {}
    for link in spec.links:
        if link.id in link_index:
            raise NetworkError(f"duplicate link id {link.id!r}")
        _positive_finite(link.capacity, f"capacity of link {link.id!r}")
        link_index[link.id] = len(link_index)

    L, S = len(spec.links), len(spec.sources)
    routing = np.zeros((L, S))
    seen_sources: set[str] = set()
    weights = np.empty(S)
    rate_min = np.empty(S)
    rate_max = np.empty(S)

    for s, src in enumerate(spec.sources):
        if src.id in seen_sources:
            raise NetworkError(f"duplicate source id {src.id!r}")
        seen_sources.add(src.id)
        if not src.path:
            raise NetworkError(f"source {src.id!r} has an empty path")
        for link_id in src.path:
            if link_id not in link_index:
                raise NetworkError(f"source {src.id!r}: unknown link {link_id!r}")
            if routing[link_index[link_id], s]:
                raise NetworkError(f"source {src.id!r}: link {link_id!r} repeated in path")
            routing[link_index[link_id], s] = 1.0
        if src.utility.kind != LOG_WEIGHTED:
            raise NetworkError(
                f"source {src.id!r}: unsupported utility kind {src.utility.kind!r}"
            )
        weights[s] = _positive_finite(src.utility.weight, f"weight of source {src.id!r}")
        m, M = (float(b) for b in src.rate_bounds)
        if not (0.0 <= m < M < math.inf):
            raise NetworkError(
                f"source {src.id!r}: rate bounds must satisfy 0 <= m < M < inf, "
                f"got [{m}, {M}]"
            )
        rate_min[s] = m
        rate_max[s] = M

    return ValidatedNetwork(
        spec=spec,
        link_ids=tuple(l.id for l in spec.links),
        source_ids=tuple(s.id for s in spec.sources),
        capacities=_frozen(np.array([l.capacity for l in spec.links], dtype=float)),
        weights=_frozen(weights),
        rate_min=_frozen(rate_min),
        rate_max=_frozen(rate_max),
        routing=_frozen(routing),
    )


def routing_matrix(net: ValidatedNetwork) -> np.ndarray:
    """Binary routing incidence R, shape (L, S): R[l, s] = 1 iff link l is on
    the path of source s.  Every column sums to at least 1."""
    return net.routing


def from_dict(doc: dict) -> NetworkSpec:
    """Build a :class:`NetworkSpec` from a plain dict (the JSON config shape)."""
    try:
        links = tuple(
            LinkSpec(id=str(d["id"]), capacity=d["capacity"]) for d in doc["links"]
        )
        sources = []
        for d in doc["sources"]:
            util = d.get("utility", {})
            sources.append(
                SourceSpec(
                    id=str(d["id"]),
                    path=tuple(str(x) for x in d["path"]),
                    utility=UtilitySpec(
                        kind=util.get("kind", LOG_WEIGHTED),
                        weight=util.get("weight", 1.0),
                    ),
                    rate_bounds=tuple(d.get("rate_bounds", DEFAULT_RATE_BOUNDS)),
                )
            )
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed network document: {exc}") from exc
    return NetworkSpec(links=links, sources=tuple(sources))


def to_dict(spec: NetworkSpec) -> dict:
    """Inverse of :func:`from_dict`, with all defaults made explicit."""
    return {
        "links": [{"id": l.id, "capacity": l.capacity} for l in spec.links],
        "sources": [
            {
                "id": s.id,
                "path": list(s.path),
                "utility": {"kind": s.utility.kind, "weight": s.utility.weight},
                "rate_bounds": list(s.rate_bounds),
            }
            for s in spec.sources
        ],
    }
