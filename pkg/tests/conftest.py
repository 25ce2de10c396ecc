"""Shared fixtures: toy networks, bundled-case access, a solve cache."""

from __future__ import annotations

import math

import pytest

from conicopf import parse_case_file, build_network
from conicopf.backends import default_backend
from conicopf.data import bundled_case, load_upper_bounds
from conicopf.network import Branch, Bus, Generator, Network
from conicopf.relaxations import RelaxationKind, build_relaxation


def make_branch(index, from_bus, to_bus, r, x, b=0.0, tap=1.0, shift=0.0,
                limit=None, angle_bound=math.radians(30.0)):
    return Branch(
        index=index,
        from_bus=from_bus,
        to_bus=to_bus,
        series_admittance=1.0 / complex(r, x),
        charging_b=b,
        turns_ratio=tap * complex(math.cos(shift), math.sin(shift)),
        thermal_limit=limit,
        angle_bound=angle_bound,
    )


def make_bus(index, p=0.0, q=0.0, v_min=0.9, v_max=1.1, ref=False, gs=0.0, bs=0.0):
    return Bus(index=index, bus_id=index + 1, p_demand=p, q_demand=q,
               shunt_g=gs, shunt_b=bs, v_min=v_min, v_max=v_max, is_reference=ref)


def make_gen(index, bus, p_max=10.0, p_min=0.0, q_max=10.0, q_min=-10.0,
             c2=0.0, c1=1.0, c0=0.0):
    return Generator(index=index, bus=bus, p_min=p_min, p_max=p_max,
                     q_min=q_min, q_max=q_max, cost_c2=c2, cost_c1=c1, cost_c0=c0)


def toy_2bus(r=0.0, x=1.0) -> Network:
    """Generator at the reference bus feeds a 0.5 pu load over one line."""
    return Network(
        name="toy2",
        base_mva=100.0,
        buses=(make_bus(0, ref=True), make_bus(1, p=0.5)),
        generators=(make_gen(0, 0, c1=1.0),),
        branches=(make_branch(0, 0, 1, r, x),),
        reference_bus=0,
    )


def toy_3bus_radial() -> Network:
    """3-bus path: fixed end magnitudes, free load-bus magnitude.

    Keeping only one magnitude free caps the grid oracle at three
    dimensions (one magnitude, two angles).
    """
    buses = (
        make_bus(0, ref=True, v_min=1.0, v_max=1.0),
        make_bus(1, p=0.6, q=0.1, v_min=0.9, v_max=1.1),
        make_bus(2, p=0.3, v_min=1.0, v_max=1.0),
    )
    gens = (
        make_gen(0, 0, p_max=2.0, q_max=2.0, q_min=-2.0, c2=0.5, c1=2.0),
        make_gen(1, 2, p_max=0.4, q_max=1.0, q_min=-1.0, c1=1.0),
    )
    branches = (
        make_branch(0, 0, 1, 0.02, 0.2),
        make_branch(1, 1, 2, 0.02, 0.25),
    )
    return Network(name="toy3r", base_mva=100.0, buses=buses, generators=gens,
                   branches=branches, reference_bus=0)


def toy_3bus_triangle() -> Network:
    buses = (
        make_bus(0, ref=True),
        make_bus(1, p=0.6, q=0.15),
        make_bus(2, p=0.4, q=0.05),
    )
    gens = (
        make_gen(0, 0, p_max=2.0, c2=0.4, c1=3.0),
        make_gen(1, 2, p_max=0.5, c1=1.5),
    )
    branches = (
        make_branch(0, 0, 1, 0.03, 0.25, b=0.02, limit=0.9),
        make_branch(1, 1, 2, 0.02, 0.2, b=0.02),
        make_branch(2, 0, 2, 0.04, 0.3, b=0.02),
    )
    return Network(name="toy3t", base_mva=100.0, buses=buses, generators=gens,
                   branches=branches, reference_bus=0)


def toy_4bus_radial() -> Network:
    buses = (
        make_bus(0, ref=True),
        make_bus(1, p=0.4, q=0.1),
        make_bus(2, p=0.3, q=0.05),
        make_bus(3, p=0.2, q=0.05),
    )
    gens = (
        make_gen(0, 0, p_max=2.0, c2=0.3, c1=2.0),
        make_gen(1, 2, p_max=0.6, c1=1.0),
    )
    branches = (
        make_branch(0, 0, 1, 0.02, 0.2),
        make_branch(1, 1, 2, 0.03, 0.25),
        make_branch(2, 1, 3, 0.02, 0.15),
    )
    return Network(name="toy4r", base_mva=100.0, buses=buses, generators=gens,
                   branches=branches, reference_bus=0)


def toy_infeasible() -> Network:
    """Total demand far above total generation capacity."""
    return Network(
        name="toy_infeasible",
        base_mva=100.0,
        buses=(make_bus(0, ref=True), make_bus(1, p=5.0)),
        generators=(make_gen(0, 0, p_max=1.0),),
        branches=(make_branch(0, 0, 1, 0.01, 0.1),),
        reference_bus=0,
    )


@pytest.fixture(scope="session")
def backend():
    return default_backend()


@pytest.fixture(scope="session")
def upper_bounds():
    return load_upper_bounds()


@pytest.fixture(scope="session")
def networks():
    """Memoized per-case Network objects."""
    cache: dict[str, object] = {}

    def get(case: str):
        if case not in cache:
            cache[case] = build_network(parse_case_file(bundled_case(case)))
        return cache[case]

    return get


@pytest.fixture(scope="session")
def solve_cache(backend, networks):
    """Memoized (case, kind) -> Solution across the whole session.

    The acceptance suite and several property suites need the same
    solves; caching keeps total runtime near one solve per pair.
    """
    cache: dict[tuple[str, RelaxationKind], object] = {}

    def get(case: str, kind: RelaxationKind):
        key = (case, kind)
        if key not in cache:
            program = build_relaxation(networks(case), kind)
            cache[key] = backend.solve(program)
        return cache[key]

    return get
