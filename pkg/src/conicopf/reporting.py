"""Gap computation, result aggregation and the desk-scale grid oracle.

One :class:`RelaxationReport` collects, for a single case, the lower
bound / gap / timing / rank diagnostics of every relaxation kind that
was solved, against a reference upper bound supplied by the caller.
Reports render to a markdown comparison table or a flat CSV.

:func:`brute_force_acopf` is an independent oracle for tiny networks:
it grids voltage magnitudes and angles, evaluates the exact branch
physics at every grid point, infers the generation each point requires,
and returns the cheapest point meeting all limits within tolerance.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np

from .conic import SolveStatus
from .network import Network, branch_flow
from .relaxations import RelaxationKind

KIND_ORDER = (
    RelaxationKind.SOCR,
    RelaxationKind.QCR,
    RelaxationKind.TCR,
    RelaxationKind.CHR,
    RelaxationKind.SDR,
)


class NonpositiveUpperBound(ValueError):
    """Gap is undefined for upper bounds <= 0."""


class NoFeasibleGridPoint(ValueError):
    """Grid search found no point meeting the tolerance."""


def optimality_gap(lower: float, upper: float) -> float:
    """Percent distance 100 (1 - lower/upper) of a bound from a known cost.

    Negative when lower > upper, which flags a stale or invalid upper
    bound; the value is reported as-is rather than clamped.
    """
    if upper <= 0:
        raise NonpositiveUpperBound(f"upper bound {upper:g} must be positive")
    return 100.0 * (1.0 - lower / upper)


@dataclass
class KindResult:
    """Outcome of one relaxation kind on one case."""

    status: SolveStatus
    lower_bound: float | None = None
    build_seconds: float = math.nan
    solve_seconds: float = math.nan
    rank_ratio: float | None = None
    detail: str = ""

    def gap(self, upper_bound: float | None) -> float | None:
        if upper_bound is None or self.lower_bound is None:
            return None
        return optimality_gap(self.lower_bound, upper_bound)


@dataclass
class RelaxationReport:
    """Per-case results across relaxation kinds."""

    case: str
    condition: str  # TYP, API or SAD
    upper_bound: float | None
    results: dict[RelaxationKind, KindResult] = field(default_factory=dict)

    @property
    def best_lower_bound(self) -> float | None:
        bounds = [
            r.lower_bound
            for r in self.results.values()
            if r.status is SolveStatus.OPTIMAL and r.lower_bound is not None
        ]
        return max(bounds) if bounds else None


def condition_of(case_name: str) -> str:
    if case_name.endswith("__api"):
        return "API"
    if case_name.endswith("__sad"):
        return "SAD"
    return "TYP"


def render_table(reports: list[RelaxationReport], fmt: str = "markdown") -> str:
    """Render reports as a comparison table.

    ``markdown``: one row per case with gap and (build, solve) time
    columns per kind, plus an Average row per condition group (mean of
    gaps over the cases a kind solved, with the denominator labelled).
    ``csv``: flat rows ``case,condition,kind,status,lower,upper,gap_pct,
    build_s,solve_s,rank_ratio`` at 17 significant digits.
    """
    if not reports:
        raise ValueError("no reports to render")
    if fmt == "csv":
        return _render_csv(reports)
    if fmt in ("md", "markdown"):
        return _render_markdown(reports)
    raise ValueError(f"unknown format {fmt!r}")


def _fmt17(x: float | None) -> str:
    return "" if x is None else f"{x:.17g}"


def _render_csv(reports: list[RelaxationReport]) -> str:
    out = io.StringIO()
    out.write("case,condition,kind,status,lower,upper,gap_pct,build_s,solve_s,rank_ratio\n")
    for rep in reports:
        for kind in KIND_ORDER:
            if kind not in rep.results:
                continue
            r = rep.results[kind]
            gap = r.gap(rep.upper_bound)
            out.write(
                ",".join(
                    [
                        rep.case,
                        rep.condition,
                        kind.value,
                        r.status.value,
                        _fmt17(r.lower_bound),
                        _fmt17(rep.upper_bound),
                        _fmt17(gap),
                        _fmt17(r.build_seconds),
                        _fmt17(r.solve_seconds),
                        _fmt17(r.rank_ratio),
                    ]
                )
                + "\n"
            )
    return out.getvalue()


def _render_markdown(reports: list[RelaxationReport]) -> str:
    kinds = [k for k in KIND_ORDER if any(k in rep.results for rep in reports)]
    header = (
        ["case", "cond", "upper $/h"]
        + [f"{k.value} gap%" for k in kinds]
        + [f"{k.value} time s" for k in kinds]
    )
    lines = ["| " + " | ".join(header) + " |",
             "|" + "|".join("---" for _ in header) + "|"]

    def gap_text(rep: RelaxationReport, kind: RelaxationKind) -> str:
        if kind not in rep.results:
            return ""
        r = rep.results[kind]
        if r.status is not SolveStatus.OPTIMAL:
            return r.status.value
        gap = r.gap(rep.upper_bound)
        if gap is None:
            return "n/a"
        flag = " (!)" if gap < 0 else ""
        return f"{gap:.2f}{flag}"

    def time_text(rep: RelaxationReport, kind: RelaxationKind) -> str:
        if kind not in rep.results:
            return ""
        r = rep.results[kind]
        return f"{r.build_seconds:.2f}+{r.solve_seconds:.2f}"

    for condition in ("TYP", "API", "SAD"):
        group = [rep for rep in reports if rep.condition == condition]
        if not group:
            continue
        for rep in sorted(group, key=lambda r: r.case):
            row = [rep.case, rep.condition, _maybe(rep.upper_bound)]
            row += [gap_text(rep, k) for k in kinds]
            row += [time_text(rep, k) for k in kinds]
            lines.append("| " + " | ".join(row) + " |")
        avg_row = [f"Average ({condition})", condition, ""]
        for k in kinds:
            gaps = [
                rep.results[k].gap(rep.upper_bound)
                for rep in group
                if k in rep.results
                and rep.results[k].status is SolveStatus.OPTIMAL
                and rep.results[k].gap(rep.upper_bound) is not None
            ]
            avg_row.append(f"{np.mean(gaps):.2f} (n={len(gaps)})" if gaps else "")
        avg_row += ["" for _ in kinds]
        lines.append("| " + " | ".join(avg_row) + " |")
    return "\n".join(lines) + "\n"


def _maybe(x: float | None) -> str:
    return "" if x is None else f"{x:.2f}"


# ----------------------------------------------------------------------
# grid-search oracle


@dataclass
class OracleResult:
    cost: float
    voltages: np.ndarray
    p_gen: np.ndarray
    q_gen: np.ndarray


def brute_force_acopf(
    network: Network, resolution: int = 100, tolerance: float = 1e-3
) -> OracleResult:
    """Approximate global optimum of tiny cases by exhaustive gridding.

    Requires at most 4 buses and at most one generator per bus. Voltage
    magnitudes are gridded over their bounds (a degenerate bound is a
    single point), angles over +- the angle bounds accumulated along a
    breadth-first tree from the reference bus, whose angle is fixed at
    zero. At each grid point branch flows follow from the exact physics
    and the generation each bus requires is read off the balance
    equations; points violating any limit by more than ``tolerance``
    (per unit) are discarded.
    """
    n = network.n_bus
    if n > 4:
        raise ValueError("grid oracle supports at most 4 buses")
    for bus in network.buses:
        if len(network.generators_at(bus.index)) > 1:
            raise ValueError("grid oracle supports at most one generator per bus")

    mag_grids = []
    for bus in network.buses:
        if bus.v_max - bus.v_min < 1e-12:
            mag_grids.append(np.array([bus.v_min]))
        else:
            mag_grids.append(np.linspace(bus.v_min, bus.v_max, resolution))

    spread = _angle_spread(network)
    ang_grids = []
    for bus in network.buses:
        if bus.index == network.reference_bus:
            ang_grids.append(np.array([0.0]))
        else:
            half = spread[bus.index]
            ang_grids.append(np.linspace(-half, half, resolution))

    grids = mag_grids + ang_grids
    shape = tuple(len(g) for g in grids)
    total = int(np.prod(shape))

    gen_at = {g.bus: g for g in network.generators}
    best_cost = math.inf
    best_point: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    chunk = 1 << 18
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        coords = np.unravel_index(idx, shape)
        mags = [grids[i][coords[i]] for i in range(n)]
        angs = [grids[n + i][coords[n + i]] for i in range(n)]
        v = np.stack([m * np.exp(1j * a) for m, a in zip(mags, angs)])

        feasible = np.ones(idx.shape, dtype=bool)
        p_req = np.stack(
            [
                b.p_demand + b.shunt_g * np.abs(v[b.index]) ** 2
                for b in network.buses
            ]
        )
        q_req = np.stack(
            [
                b.q_demand - b.shunt_b * np.abs(v[b.index]) ** 2
                for b in network.buses
            ]
        )
        for br in network.branches:
            s_from, s_to = branch_flow(br, v[br.from_bus], v[br.to_bus])
            p_req[br.from_bus] += s_from.real
            q_req[br.from_bus] += s_from.imag
            p_req[br.to_bus] += s_to.real
            q_req[br.to_bus] += s_to.imag
            if br.thermal_limit is not None:
                feasible &= np.abs(s_from) <= br.thermal_limit + tolerance
                feasible &= np.abs(s_to) <= br.thermal_limit + tolerance
            diff = np.angle(v[br.from_bus] * np.conj(v[br.to_bus]))
            feasible &= np.abs(diff) <= br.angle_bound + tolerance

        cost = np.zeros(idx.shape)
        for bus in network.buses:
            gen = gen_at.get(bus.index)
            if gen is None:
                feasible &= np.abs(p_req[bus.index]) <= tolerance
                feasible &= np.abs(q_req[bus.index]) <= tolerance
            else:
                pg = p_req[bus.index]
                qg = q_req[bus.index]
                feasible &= (pg >= gen.p_min - tolerance) & (pg <= gen.p_max + tolerance)
                feasible &= (qg >= gen.q_min - tolerance) & (qg <= gen.q_max + tolerance)
                cost += gen.cost_c2 * pg**2 + gen.cost_c1 * pg + gen.cost_c0

        cost = np.where(feasible, cost, math.inf)
        pos = int(np.argmin(cost))
        if cost[pos] < best_cost:
            best_cost = float(cost[pos])
            best_point = (v[:, pos].copy(), p_req[:, pos].copy(), q_req[:, pos].copy())

    if best_point is None or not math.isfinite(best_cost):
        raise NoFeasibleGridPoint(
            f"no feasible point on a {total}-point grid at tolerance {tolerance:g}"
        )

    v_best, p_bus, q_bus = best_point
    p_gen = np.zeros(len(network.generators))
    q_gen = np.zeros(len(network.generators))
    for g in network.generators:
        p_gen[g.index] = p_bus[g.bus]
        q_gen[g.index] = q_bus[g.bus]
    return OracleResult(cost=best_cost, voltages=v_best, p_gen=p_gen, q_gen=q_gen)


def _angle_spread(network: Network) -> np.ndarray:
    """Accumulated angle bound along a BFS tree from the reference bus."""
    n = network.n_bus
    spread = np.full(n, np.nan)
    spread[network.reference_bus] = 0.0
    frontier = [network.reference_bus]
    while frontier:
        nxt = []
        for k in frontier:
            for br in network.branches:
                for a, b in ((br.from_bus, br.to_bus), (br.to_bus, br.from_bus)):
                    if a == k and np.isnan(spread[b]):
                        spread[b] = spread[k] + br.angle_bound
                        nxt.append(b)
        frontier = nxt
    return spread
