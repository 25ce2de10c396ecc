"""Per-unit network model derived from a raw MATPOWER case.

Converts the verbatim tables of a :class:`~conicopf.matpower.RawCase`
into validated, per-unit electrical data: contiguous 0-based bus
indices, complex branch admittances and turns ratios, demand/shunt/limit
values divided by the MVA base, and symmetric angle-difference bounds.
All angles are radians, all quantities per-unit, costs in $/h per
per-unit power.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .matpower import COST_POLYNOMIAL, Diagnostic, RawCase, validate_case

# Upper clamp for angle-difference bounds: the sector constraint and the
# trigonometric envelopes require a bound strictly below pi/2.
ANGLE_BOUND_CLAMP = math.pi / 2 - 1e-3


class NetworkModelError(ValueError):
    """Base class for network construction failures."""


class DisconnectedNetwork(NetworkModelError):
    """The in-service network does not connect all buses."""


class UnsupportedCostModel(NetworkModelError):
    """Generator cost data outside the convex-quadratic family."""


class InvalidVoltageBounds(NetworkModelError):
    """Voltage magnitude bounds violate 0 < v_min <= v_max."""


@dataclass(frozen=True)
class Bus:
    index: int
    bus_id: int
    p_demand: float
    q_demand: float
    shunt_g: float
    shunt_b: float
    v_min: float
    v_max: float
    is_reference: bool = False


@dataclass(frozen=True)
class Generator:
    index: int
    bus: int
    p_min: float
    p_max: float
    q_min: float
    q_max: float
    cost_c2: float
    cost_c1: float
    cost_c0: float


@dataclass(frozen=True)
class Branch:
    index: int
    from_bus: int
    to_bus: int
    series_admittance: complex
    charging_b: float
    turns_ratio: complex
    thermal_limit: float | None
    angle_bound: float


@dataclass(frozen=True)
class Network:
    """Immutable per-unit network. Safe to share across threads."""

    name: str
    base_mva: float
    buses: tuple[Bus, ...]
    generators: tuple[Generator, ...]
    branches: tuple[Branch, ...]
    reference_bus: int

    @property
    def n_bus(self) -> int:
        return len(self.buses)

    @property
    def edge_set(self) -> tuple[tuple[int, int], ...]:
        """Deduplicated unordered bus pairs carrying at least one branch."""
        pairs = {
            (min(b.from_bus, b.to_bus), max(b.from_bus, b.to_bus))
            for b in self.branches
        }
        return tuple(sorted(pairs))

    def generators_at(self, bus: int) -> list[Generator]:
        return [g for g in self.generators if g.bus == bus]

    def is_radial(self) -> bool:
        return len(self.edge_set) == self.n_bus - 1


def build_network(
    raw: RawCase,
    force: bool = False,
    fix_dispatchable_loads: bool = False,
) -> Network:
    """Build a per-unit :class:`Network` from a parsed case.

    Runs :func:`~conicopf.matpower.validate_case` first and refuses to
    build on error diagnostics unless ``force`` is set. Out-of-service
    branches and generators are dropped; a network left disconnected by
    the droppage is rejected. ``fix_dispatchable_loads`` rewrites the
    active upper limit of generators with Pmax = 0 > Pmin to -5 MW,
    the standard workaround for reactive-limit inconsistencies in
    dispatchable-load models.
    """
    if not force:
        errors = [d for d in validate_case(raw) if d.is_error]
        if errors:
            raise _error_for(errors[0])

    base = raw.base_mva
    bus_index = {int(row[0]): i for i, row in enumerate(raw.bus_table)}

    buses = []
    for i, row in enumerate(raw.bus_table):
        v_min, v_max = row[12], row[11]
        if not force and not (0 < v_min <= v_max):
            raise InvalidVoltageBounds(
                f"bus {int(row[0])}: bounds [{v_min:g}, {v_max:g}]"
            )
        buses.append(
            Bus(
                index=i,
                bus_id=int(row[0]),
                p_demand=row[2] / base,
                q_demand=row[3] / base,
                shunt_g=row[4] / base,
                shunt_b=row[5] / base,
                v_min=v_min,
                v_max=v_max,
                is_reference=row[1] == 3,
            )
        )

    generators = []
    costs = _cost_rows(raw)
    for i, row in enumerate(raw.gen_table):
        if row[7] <= 0:
            continue
        c2, c1, c0 = costs[i]
        p_max = row[8]
        if fix_dispatchable_loads and p_max == 0 and row[9] < 0:
            p_max = -5.0
        generators.append(
            Generator(
                index=len(generators),
                bus=bus_index[int(row[0])],
                p_min=row[9] / base,
                p_max=p_max / base,
                q_min=row[4] / base,
                q_max=row[3] / base,
                cost_c2=c2 * base * base,
                cost_c1=c1 * base,
                cost_c0=c0,
            )
        )

    branches = []
    for row in raw.branch_table:
        if row[10] == 0:
            continue
        r, x, b_charge = row[2], row[3], row[4]
        if r == 0 and x == 0:
            raise NetworkModelError(
                f"branch {int(row[0])}-{int(row[1])} has zero impedance"
            )
        tap = row[8] if row[8] != 0 else 1.0
        shift = math.radians(row[9])
        branches.append(
            Branch(
                index=len(branches),
                from_bus=bus_index[int(row[0])],
                to_bus=bus_index[int(row[1])],
                series_admittance=1.0 / complex(r, x),
                charging_b=b_charge,
                turns_ratio=tap * cmath.exp(1j * shift),
                thermal_limit=row[5] / base if row[5] > 0 else None,
                angle_bound=_angle_bound(row[11], row[12]),
            )
        )

    _check_connected(len(buses), branches)

    reference = next(i for i, b in enumerate(buses) if b.is_reference)
    return Network(
        name=raw.name,
        base_mva=base,
        buses=tuple(buses),
        generators=tuple(generators),
        branches=tuple(branches),
        reference_bus=reference,
    )


def admittance_terms(branch: Branch) -> tuple[complex, complex, complex, complex]:
    """Coefficients (Y_ff, Y_ft, Y_tf, Y_tt) of the lifted flow equations.

    The from-end flow is ``Y_ff * V_kk + Y_ft * V_km`` and the to-end
    flow is ``Y_tf * conj(V_km) + Y_tt * V_mm`` where ``V_km`` stands in
    for ``v_k * conj(v_m)``.
    """
    y_conj = branch.series_admittance.conjugate()
    t = branch.turns_ratio
    shunt = complex(0.0, -branch.charging_b / 2.0)
    y_ff = (shunt + y_conj) / abs(t) ** 2
    y_ft = -y_conj / t
    y_tf = -y_conj / t.conjugate()
    y_tt = shunt + y_conj
    return y_ff, y_ft, y_tf, y_tt


def branch_flow(branch: Branch, v_from: complex, v_to: complex) -> tuple[complex, complex]:
    """Complex power injected at both branch ends for given voltages.

    Direct evaluation of the branch model (series element behind the
    tap-side turns ratio, charging susceptance split half-half):
    used as the physics oracle against the lifted formulation.
    """
    y = branch.series_admittance
    t = branch.turns_ratio
    half_charge = complex(0.0, branch.charging_b / 2.0)
    v_tap = v_from / t
    s_from = v_tap * ((half_charge + y) * v_tap - y * v_to).conjugate()
    s_to = v_to * (-y * v_tap + (half_charge + y) * v_to).conjugate()
    return s_from, s_to


def _angle_bound(angmin_deg: float, angmax_deg: float) -> float:
    """Symmetric angle-difference bound from (angmin, angmax) degrees.

    max(|angmin|, |angmax|) keeps the relaxation valid for asymmetric
    limits; 0 (the "unconstrained" convention) and bounds >= 90 degrees
    are clamped just below pi/2 where the sector constraint and the
    trigonometric envelopes stay well-defined.
    """
    bound = math.radians(max(abs(angmin_deg), abs(angmax_deg)))
    if bound == 0.0 or bound >= math.pi / 2:
        return ANGLE_BOUND_CLAMP
    return bound


def _cost_rows(raw: RawCase) -> list[tuple[float, float, float]]:
    ng = raw.n_gen
    table = raw.gencost_table
    if table.shape[0] == 0:
        return [(0.0, 0.0, 0.0)] * ng
    if table.shape[0] not in (ng, 2 * ng):
        raise UnsupportedCostModel(
            f"gencost has {table.shape[0]} rows for {ng} generators"
        )
    out = []
    for row in table[:ng]:
        model, ncost = int(row[0]), int(row[3])
        if model != COST_POLYNOMIAL:
            raise UnsupportedCostModel(f"cost model {model} is not supported")
        coeffs = row[4 : 4 + ncost]
        if len(coeffs) != ncost:
            raise UnsupportedCostModel(f"gencost row declares ncost = {ncost} "
                                       f"but carries {len(coeffs)} coefficients")
        if ncost > 3:
            raise UnsupportedCostModel("polynomial costs above quadratic")
        c2, c1, c0 = 0.0, 0.0, 0.0
        if ncost == 3:
            c2, c1, c0 = coeffs
        elif ncost == 2:
            c1, c0 = coeffs
        elif ncost == 1:
            (c0,) = coeffs
        if c2 < 0:
            raise UnsupportedCostModel(f"negative quadratic coefficient {c2:g}")
        out.append((float(c2), float(c1), float(c0)))
    return out


def _check_connected(n: int, branches: list[Branch]) -> None:
    if n == 0:
        raise DisconnectedNetwork("no buses")
    if not branches:
        raise DisconnectedNetwork("no in-service branches")
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for br in branches:
        adjacency[br.from_bus].append(br.to_bus)
        adjacency[br.to_bus].append(br.from_bus)
    seen = {0}
    stack = [0]
    while stack:
        k = stack.pop()
        for m in adjacency[k]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    if len(seen) != n:
        raise DisconnectedNetwork(
            f"{n - len(seen)} of {n} buses unreachable over in-service branches"
        )


def _error_for(diag: Diagnostic) -> NetworkModelError:
    if diag.code in ("nonpositive-vmin", "inverted-voltage-bounds"):
        return InvalidVoltageBounds(diag.message)
    if diag.code in ("unsupported-cost-model", "nonconvex-cost"):
        return UnsupportedCostModel(diag.message)
    return NetworkModelError(diag.message)
