"""Shared fixtures: small reference networks with hand-checkable optima."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

import priceflow as pf

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")

BOUNDS = (0.001, 100.0)

# Optimum of the 3-link / 5-source chain, exact by symmetry: the first link
# carries the long flow plus two short ones, the other links one short each.
CHAIN5_X = np.array([0.2, 0.4, 0.8, 0.8, 0.4])
CHAIN5_P = np.array([2.5, 1.25, 1.25])

# 4-source variant (one short flow per link): p = 4/3 on every link.
CHAIN4_X = np.array([0.25, 0.75, 0.75, 0.75])
CHAIN4_P = np.array([4.0 / 3.0] * 3)


def build_chain5() -> pf.ValidatedNetwork:
    links = tuple(pf.LinkSpec(f"l{i}", 1.0) for i in range(3))
    sources = (
        pf.SourceSpec("long", ("l0", "l1", "l2"), pf.UtilitySpec(), BOUNDS),
        pf.SourceSpec("a0", ("l0",), pf.UtilitySpec(), BOUNDS),
        pf.SourceSpec("a1", ("l1",), pf.UtilitySpec(), BOUNDS),
        pf.SourceSpec("a2", ("l2",), pf.UtilitySpec(), BOUNDS),
        pf.SourceSpec("b0", ("l0",), pf.UtilitySpec(), BOUNDS),
    )
    return pf.validate_network(pf.NetworkSpec(links=links, sources=sources))


def build_chain4() -> pf.ValidatedNetwork:
    links = tuple(pf.LinkSpec(f"l{i}", 1.0) for i in range(3))
    sources = (
        pf.SourceSpec("long", ("l0", "l1", "l2"), pf.UtilitySpec(), BOUNDS),
        pf.SourceSpec("a0", ("l0",), pf.UtilitySpec(), BOUNDS),
        pf.SourceSpec("a1", ("l1",), pf.UtilitySpec(), BOUNDS),
        pf.SourceSpec("a2", ("l2",), pf.UtilitySpec(), BOUNDS),
    )
    return pf.validate_network(pf.NetworkSpec(links=links, sources=sources))


def chain5_config(**engine_overrides) -> dict:
    """JSON-shaped config for the canonical chain, engine knobs overridable."""
    engine = {"gamma": 0.01, "steps": 2000, "t0": 0, "seed": 0}
    engine.update(engine_overrides)
    return {
        "network": {
            "links": [{"id": f"l{i}", "capacity": 1.0} for i in range(3)],
            "sources": [
                {"id": "long", "path": ["l0", "l1", "l2"], "rate_bounds": list(BOUNDS)},
                {"id": "a0", "path": ["l0"], "rate_bounds": list(BOUNDS)},
                {"id": "a1", "path": ["l1"], "rate_bounds": list(BOUNDS)},
                {"id": "a2", "path": ["l2"], "rate_bounds": list(BOUNDS)},
                {"id": "b0", "path": ["l0"], "rate_bounds": list(BOUNDS)},
            ],
        },
        "engine": engine,
        "initial_prices": [1.0, 1.0, 1.0],
    }


@pytest.fixture(scope="session")
def chain5() -> pf.ValidatedNetwork:
    return build_chain5()


@pytest.fixture(scope="session")
def chain4() -> pf.ValidatedNetwork:
    return build_chain4()


@pytest.fixture(scope="session")
def chain5_oracle(chain5) -> pf.OracleSolution:
    return pf.num_oracle(chain5)


@pytest.fixture(scope="session")
def single_link() -> pf.ValidatedNetwork:
    """One unit link, one unit-weight source: x* = 1 at p* = 1."""
    spec = pf.NetworkSpec(
        links=(pf.LinkSpec("l0", 1.0),),
        sources=(pf.SourceSpec("s0", ("l0",)),),
    )
    return pf.validate_network(spec)


@pytest.fixture(scope="session")
def two_source_link() -> pf.ValidatedNetwork:
    """Two unit-weight sources share a unit link: x* = 1/2 each at p* = 2."""
    spec = pf.NetworkSpec(
        links=(pf.LinkSpec("l0", 1.0),),
        sources=(pf.SourceSpec("s0", ("l0",)), pf.SourceSpec("s1", ("l0",))),
    )
    return pf.validate_network(spec)


@pytest.fixture(scope="session")
def uncongested() -> pf.ValidatedNetwork:
    """Capacity far above demand: rates pin at their ceiling, price at 0."""
    spec = pf.NetworkSpec(
        links=(pf.LinkSpec("l0", 10.0),),
        sources=(pf.SourceSpec("s0", ("l0",), pf.UtilitySpec(), (0.001, 2.0)),),
    )
    return pf.validate_network(spec)
