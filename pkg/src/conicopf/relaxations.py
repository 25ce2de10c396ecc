"""Builders for the five conic relaxations of AC optimal power flow.

All five share a lifted base: one real variable per squared voltage
magnitude (V_kk), a complex pair per bus pair in scope (V_km), explicit
branch flows, generator outputs with box limits, power balance and flow
equalities, thermal second-order cones, squared-magnitude boxes, the
angle-difference sector rows, and a quadratic-cost epigraph objective.

The relaxations differ in how they tie the lifted matrix back toward a
rank-one product of bus voltages:

- SOCR: one rotated cone V_kk V_mm >= |V_km|^2 per network edge.
- SDR:  a single Hermitian PSD block over all bus pairs.
- CHR:  Hermitian PSD blocks over the maximal cliques of a chordal
        extension of the network graph (fill pairs get variables too).
- TCR:  complex voltage variables plus a 3x3 Hermitian PSD block
        [[1, v_k*, v_m*], [v_k, V_kk, V_km], [v_m, V_km*, V_mm]] per
        branch, anchored by linear cuts at the reference bus.
- QCR:  polar variables (magnitude, angle) tied to V through the
        convex envelopes of square, product, cosine and sine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .chordal import SparsityGraph, chordal_extension
from .conic import ConicProgram, LinExpr, Solution, Var, as_expr
from .envelopes import IntervalBound, cosine_envelope, mccormick, sine_envelope, square_envelope
from .network import Network, admittance_terms, branch_flow


class NoVoltageAvailable(ValueError):
    """The relaxation kind has no consistent global voltage recovery."""

    def __init__(self, message: str, edge_diagnostics: dict | None = None):
        super().__init__(message)
        self.edge_diagnostics = edge_diagnostics or {}


class RelaxationKind(enum.Enum):
    SOCR = "socr"
    QCR = "qcr"
    TCR = "tcr"
    CHR = "chr"
    SDR = "sdr"

    @staticmethod
    def from_name(name: str) -> "RelaxationKind":
        return RelaxationKind(name.lower())


@dataclass
class LiftedVariables:
    """Handles to the shared lifted variables of one built program."""

    v_diag: list[Var]
    v_offdiag: dict[tuple[int, int], tuple[Var, Var]]
    p_from: list[Var]
    q_from: list[Var]
    p_to: list[Var]
    q_to: list[Var]
    p_gen: list[Var]
    q_gen: list[Var]

    def offdiag(self, k: int, m: int) -> tuple[LinExpr, LinExpr]:
        """(Re, Im) of V_km; pairs are stored once per unordered pair."""
        if k < m:
            re, im = self.v_offdiag[(k, m)]
            return as_expr(re), as_expr(im)
        re, im = self.v_offdiag[(m, k)]
        return as_expr(re), -as_expr(im)


def build_lifted_base(
    network: Network, extra_pairs: tuple[tuple[int, int], ...] = ()
) -> tuple[ConicProgram, LiftedVariables]:
    """Shared constraint stock of every relaxation.

    ``extra_pairs`` widens the off-diagonal scope beyond the network
    edges (fill pairs for CHR, all pairs for SDR); extra pairs carry no
    flow or sector constraints of their own.
    """
    prog = ConicProgram()
    pairs = sorted(set(network.edge_set) | {(min(a, b), max(a, b)) for a, b in extra_pairs})

    v_diag = [
        prog.add_variable(f"Vkk[{b.index}]", lb=b.v_min**2, ub=b.v_max**2)
        for b in network.buses
    ]
    v_offdiag = {
        (a, b): (prog.add_variable(f"Vre[{a},{b}]"), prog.add_variable(f"Vim[{a},{b}]"))
        for a, b in pairs
    }
    p_from, q_from, p_to, q_to = [], [], [], []
    for br in network.branches:
        p_from.append(prog.add_variable(f"pf[{br.index}]"))
        q_from.append(prog.add_variable(f"qf[{br.index}]"))
        p_to.append(prog.add_variable(f"pt[{br.index}]"))
        q_to.append(prog.add_variable(f"qt[{br.index}]"))
    p_gen = [
        prog.add_variable(f"pg[{g.index}]", lb=g.p_min, ub=g.p_max)
        for g in network.generators
    ]
    q_gen = [
        prog.add_variable(f"qg[{g.index}]", lb=g.q_min, ub=g.q_max)
        for g in network.generators
    ]
    lifted = LiftedVariables(v_diag, v_offdiag, p_from, q_from, p_to, q_to, p_gen, q_gen)

    # power balance at every bus
    for bus in network.buses:
        k = bus.index
        p_expr = LinExpr(const=-bus.p_demand) - bus.shunt_g * as_expr(v_diag[k])
        q_expr = LinExpr(const=-bus.q_demand) + bus.shunt_b * as_expr(v_diag[k])
        for g in network.generators:
            if g.bus == k:
                p_expr = p_expr + p_gen[g.index]
                q_expr = q_expr + q_gen[g.index]
        for br in network.branches:
            if br.from_bus == k:
                p_expr = p_expr - p_from[br.index]
                q_expr = q_expr - q_from[br.index]
            if br.to_bus == k:
                p_expr = p_expr - p_to[br.index]
                q_expr = q_expr - q_to[br.index]
        prog.add_equality(p_expr)
        prog.add_equality(q_expr)

    # lifted flow definitions per branch
    for br in network.branches:
        k, m = br.from_bus, br.to_bus
        y_ff, y_ft, y_tf, y_tt = admittance_terms(br)
        re_km, im_km = lifted.offdiag(k, m)
        vkk, vmm = as_expr(v_diag[k]), as_expr(v_diag[m])
        prog.add_equality(
            p_from[br.index] - y_ff.real * vkk - y_ft.real * re_km + y_ft.imag * im_km
        )
        prog.add_equality(
            q_from[br.index] - y_ff.imag * vkk - y_ft.real * im_km - y_ft.imag * re_km
        )
        prog.add_equality(
            p_to[br.index] - y_tt.real * vmm - y_tf.real * re_km - y_tf.imag * im_km
        )
        prog.add_equality(
            q_to[br.index] - y_tt.imag * vmm - y_tf.imag * re_km + y_tf.real * im_km
        )

    # thermal limits as second-order cones
    for br in network.branches:
        if br.thermal_limit is not None:
            prog.add_soc([br.thermal_limit, p_from[br.index], q_from[br.index]])
            prog.add_soc([br.thermal_limit, p_to[br.index], q_to[br.index]])

    # angle-difference sector rows (imply Re(V_km) >= 0)
    for br in network.branches:
        re_km, im_km = lifted.offdiag(br.from_bus, br.to_bus)
        tangent = math.tan(br.angle_bound)
        prog.add_inequality(im_km - tangent * re_km)
        prog.add_inequality(-im_km - tangent * re_km)

    # generation cost objective through epigraph auxiliaries
    for g in network.generators:
        prog.add_quadratic_cost_epigraph(p_gen[g.index], g.cost_c2, g.cost_c1, g.cost_c0)

    return prog, lifted


_ROOT2 = math.sqrt(2.0)


def _edge_cones(prog: ConicProgram, lifted: LiftedVariables, network: Network) -> None:
    """One rotated cone V_kk V_mm >= Re^2 + Im^2 per network edge."""
    for a, b in network.edge_set:
        re, im = lifted.offdiag(a, b)
        prog.add_rsoc(lifted.v_diag[a], lifted.v_diag[b], [re * _ROOT2, im * _ROOT2])


def _hermitian_clique_block(
    prog: ConicProgram, lifted: LiftedVariables, vertices: list[int]
) -> None:
    """PSD-constrain the lifted matrix restricted to a vertex set.

    Two-vertex sets use the exact rotated-cone form of a 2x2 Hermitian
    PSD constraint; larger sets use the real embedding.
    """
    if len(vertices) == 1:
        return  # V_kk >= vmin^2 > 0 already holds via its box
    if len(vertices) == 2:
        a, b = vertices
        re, im = lifted.offdiag(a, b)
        prog.add_rsoc(lifted.v_diag[a], lifted.v_diag[b], [re * _ROOT2, im * _ROOT2])
        return
    entries: dict[tuple[int, int], object] = {}
    for p, a in enumerate(vertices):
        entries[(p, p)] = as_expr(lifted.v_diag[a])
        for q in range(p + 1, len(vertices)):
            entries[(p, q)] = lifted.offdiag(a, vertices[q])
    prog.add_hermitian_psd(entries, len(vertices))


def build_socr(network: Network) -> ConicProgram:
    """Second-order cone relaxation: base plus per-edge rotated cones."""
    prog, lifted = build_lifted_base(network)
    _edge_cones(prog, lifted, network)
    return prog


def build_sdr(network: Network) -> ConicProgram:
    """Semidefinite relaxation: one Hermitian PSD block over all buses."""
    n = network.n_bus
    all_pairs = tuple((a, b) for a in range(n) for b in range(a + 1, n))
    prog, lifted = build_lifted_base(network, extra_pairs=all_pairs)
    _hermitian_clique_block(prog, lifted, list(range(n)))
    return prog


def build_chr(network: Network) -> ConicProgram:
    """Chordal relaxation: PSD blocks over maximal cliques of the extension."""
    decomposition = chordal_extension(
        SparsityGraph.from_edges(network.n_bus, network.edge_set)
    )
    prog, lifted = build_lifted_base(network, extra_pairs=decomposition.fill_edges)
    for clique in decomposition.cliques:
        _hermitian_clique_block(prog, lifted, sorted(clique))
    return prog


def build_tcr(network: Network) -> ConicProgram:
    """Tight-and-cheap relaxation: 3x3 blocks linking v to the lifted matrix."""
    prog, lifted = build_lifted_base(network)
    v_re = [prog.add_variable(f"vre[{b.index}]") for b in network.buses]
    v_im = [prog.add_variable(f"vim[{b.index}]") for b in network.buses]

    for br in network.branches:
        k, m = br.from_bus, br.to_bus
        entries = {
            (0, 0): 1.0 + 0.0j,
            (0, 1): (as_expr(v_re[k]), -as_expr(v_im[k])),
            (0, 2): (as_expr(v_re[m]), -as_expr(v_im[m])),
            (1, 1): as_expr(lifted.v_diag[k]),
            (1, 2): lifted.offdiag(k, m),
            (2, 2): as_expr(lifted.v_diag[m]),
        }
        prog.add_hermitian_psd(entries, 3)

    ref = network.buses[network.reference_bus]
    lo, hi = ref.v_min, ref.v_max
    prog.add_inequality(
        (as_expr(lifted.v_diag[ref.index]) + lo * hi) * (1.0 / (lo + hi)) - v_re[ref.index]
    )
    prog.add_equality(v_im[ref.index])
    return prog


def build_qcr(network: Network) -> ConicProgram:
    """Quadratic convex relaxation: polar variables tied through envelopes."""
    prog, lifted = build_lifted_base(network)
    v_mag = [
        prog.add_variable(f"vm[{b.index}]", lb=b.v_min, ub=b.v_max)
        for b in network.buses
    ]
    theta = [prog.add_variable(f"th[{b.index}]") for b in network.buses]

    # squared-magnitude links
    for bus in network.buses:
        if bus.v_min == bus.v_max:
            prog.add_equality(lifted.v_diag[bus.index], bus.v_min**2)
        else:
            square_envelope(
                prog, v_mag[bus.index], lifted.v_diag[bus.index],
                IntervalBound(bus.v_min, bus.v_max),
            )

    for br in network.branches:
        k, m = br.from_bus, br.to_bus
        bus_k, bus_m = network.buses[k], network.buses[m]
        delta = br.angle_bound
        w_box = IntervalBound(bus_k.v_min * bus_m.v_min, bus_k.v_max * bus_m.v_max)
        c_box = IntervalBound(math.cos(delta), 1.0)
        s_box = IntervalBound(-math.sin(delta), math.sin(delta))

        w = prog.add_variable(f"w[{br.index}]", lb=w_box.lower, ub=w_box.upper)
        c_t = prog.add_variable(f"cs[{br.index}]", lb=c_box.lower, ub=c_box.upper)
        s_t = prog.add_variable(f"sn[{br.index}]", lb=s_box.lower, ub=s_box.upper)
        d_t = prog.add_variable(f"dt[{br.index}]", lb=-delta, ub=delta)
        prog.add_equality(d_t - theta[k] + theta[m])

        if w_box.is_point:
            prog.add_equality(w, w_box.lower)
        else:
            mccormick(
                prog, v_mag[k], v_mag[m], w,
                IntervalBound(bus_k.v_min, bus_k.v_max),
                IntervalBound(bus_m.v_min, bus_m.v_max),
            )
        cosine_envelope(prog, d_t, c_t, delta)
        sine_envelope(prog, d_t, s_t, delta)

        re_km, im_km = lifted.offdiag(k, m)
        mccormick(prog, w, c_t, re_km, w_box, c_box)
        mccormick(prog, w, s_t, im_km, w_box, s_box)

    _edge_cones(prog, lifted, network)
    prog.add_equality(theta[network.reference_bus])
    return prog


_BUILDERS = {
    RelaxationKind.SOCR: build_socr,
    RelaxationKind.SDR: build_sdr,
    RelaxationKind.CHR: build_chr,
    RelaxationKind.TCR: build_tcr,
    RelaxationKind.QCR: build_qcr,
}


def build_relaxation(network: Network, kind: RelaxationKind) -> ConicProgram:
    return _BUILDERS[kind](network)


# ----------------------------------------------------------------------
# candidate recovery and diagnostics


@dataclass
class Recovery:
    """Candidate operating point extracted from a relaxation solution."""

    kind: RelaxationKind
    voltages: np.ndarray  # complex, reference phase zero
    rank_ratio: float
    violations: dict[str, float]

    @property
    def max_violation(self) -> float:
        return max(self.violations.values())


def recover_candidate(kind: RelaxationKind, solution: Solution, network: Network) -> Recovery:
    """Extract candidate voltages from an optimal solution.

    TCR/QCR read their voltage variables directly; SDR/CHR use the
    scaled leading eigenvector of each PSD block, stitched across clique
    overlaps, and report the worst second-to-first eigenvalue ratio.
    SOCR has no consistent global recovery and raises
    :class:`NoVoltageAvailable` carrying per-edge cone-tightness
    diagnostics.
    """
    vals = solution.variable_values
    n = network.n_bus

    if kind is RelaxationKind.SOCR:
        diag = {
            (a, b): _edge_eigen_ratio(vals, a, b) for a, b in network.edge_set
        }
        raise NoVoltageAvailable(
            "per-edge cones admit no single voltage profile", edge_diagnostics=diag
        )

    if kind is RelaxationKind.TCR:
        v = np.array([vals[f"vre[{i}]"] + 1j * vals[f"vim[{i}]"] for i in range(n)])
        ratio = _tcr_rank_ratio(vals, network)
    elif kind is RelaxationKind.QCR:
        v = np.array(
            [vals[f"vm[{i}]"] * np.exp(1j * vals[f"th[{i}]"]) for i in range(n)]
        )
        ratio = max(_edge_eigen_ratio(vals, a, b) for a, b in network.edge_set)
    else:  # SDR / CHR
        if kind is RelaxationKind.SDR:
            cliques = [frozenset(range(n))]
        else:
            decomposition = chordal_extension(
                SparsityGraph.from_edges(n, network.edge_set)
            )
            cliques = list(decomposition.cliques)
        v, ratio = _stitch_cliques(vals, cliques, network)

    v = v * np.exp(-1j * np.angle(v[network.reference_bus]))
    return Recovery(
        kind=kind,
        voltages=v,
        rank_ratio=ratio,
        violations=candidate_violations(network, v),
    )


def _lifted_submatrix(vals: dict[str, float], vertices: list[int]) -> np.ndarray:
    d = len(vertices)
    h = np.zeros((d, d), dtype=complex)
    for p, a in enumerate(vertices):
        h[p, p] = vals[f"Vkk[{a}]"]
        for q in range(p + 1, d):
            b = vertices[q]
            z = vals[f"Vre[{a},{b}]"] + 1j * vals[f"Vim[{a},{b}]"]
            h[p, q] = z
            h[q, p] = z.conjugate()
    return h


def _tcr_rank_ratio(vals: dict[str, float], network: Network) -> float:
    """Worst eigenvalue ratio over the per-branch 3x3 certificate blocks."""
    worst = 0.0
    for br in network.branches:
        k, m = br.from_bus, br.to_bus
        vk = vals[f"vre[{k}]"] + 1j * vals[f"vim[{k}]"]
        vm = vals[f"vre[{m}]"] + 1j * vals[f"vim[{m}]"]
        vkm = _pair_value(vals, k, m)
        h = np.array(
            [
                [1.0, vk.conjugate(), vm.conjugate()],
                [vk, vals[f"Vkk[{k}]"], vkm],
                [vm, vkm.conjugate(), vals[f"Vkk[{m}]"]],
            ]
        )
        eigs = np.linalg.eigvalsh(h)
        worst = max(worst, max(eigs[1], 0.0) / eigs[2])
    return worst


def _pair_value(vals: dict[str, float], k: int, m: int) -> complex:
    if k < m:
        return vals[f"Vre[{k},{m}]"] + 1j * vals[f"Vim[{k},{m}]"]
    return vals[f"Vre[{m},{k}]"] - 1j * vals[f"Vim[{m},{k}]"]


def _edge_eigen_ratio(vals: dict[str, float], a: int, b: int) -> float:
    """Second-to-first eigenvalue ratio of one 2x2 lifted edge block."""
    kk, mm = vals[f"Vkk[{a}]"], vals[f"Vkk[{b}]"]
    off = abs(_pair_value(vals, a, b))
    root = math.hypot(kk - mm, 2 * off)
    lead = (kk + mm + root) / 2.0
    second = (kk + mm - root) / 2.0
    return max(second, 0.0) / max(lead, 1e-300)


def _stitch_cliques(
    vals: dict[str, float], cliques: list[frozenset[int]], network: Network
) -> tuple[np.ndarray, float]:
    """Rank-one estimates per clique, phase-aligned across overlaps."""
    n = network.n_bus
    worst_ratio = 0.0
    locals_: list[tuple[list[int], np.ndarray]] = []
    for clique in cliques:
        vertices = sorted(clique)
        h = _lifted_submatrix(vals, vertices)
        eigvals, eigvecs = np.linalg.eigh(h)
        lead = max(eigvals[-1], 0.0)
        if len(vertices) > 1:
            worst_ratio = max(worst_ratio, max(eigvals[-2], 0.0) / max(lead, 1e-300))
        locals_.append((vertices, math.sqrt(lead) * eigvecs[:, -1]))

    v = np.zeros(n, dtype=complex)
    assigned = np.zeros(n, dtype=bool)
    pending = list(range(len(locals_)))
    # seed with a clique containing the reference bus when possible
    seed = next(
        (i for i in pending if network.reference_bus in locals_[i][0]), pending[0]
    )
    queue = [seed]
    pending.remove(seed)
    first = True
    while queue:
        idx = queue.pop(0)
        vertices, local = locals_[idx]
        if first:
            v[vertices] = local
            assigned[vertices] = True
            first = False
        else:
            overlap = [p for p, a in enumerate(vertices) if assigned[a]]
            phase = sum(
                v[vertices[p]] * local[p].conjugate() for p in overlap
            )
            rotation = phase / abs(phase) if abs(phase) > 0 else 1.0
            for p, a in enumerate(vertices):
                if not assigned[a]:
                    v[a] = rotation * local[p]
                    assigned[a] = True
        for j in list(pending):
            if set(locals_[j][0]) & {a for a in range(n) if assigned[a]}:
                pending.remove(j)
                queue.append(j)
    return v, worst_ratio


def candidate_violations(network: Network, voltages: np.ndarray) -> dict[str, float]:
    """Max relative violation per constraint family at candidate voltages.

    Flows follow from the branch model; bus generation is inferred from
    balance and checked against aggregated capacity boxes, so the
    reported numbers measure how far the candidate is from AC
    feasibility.
    """

    def rel(value: float, scale: float) -> float:
        return value / max(1.0, abs(scale))

    out = {"voltage": 0.0, "angle": 0.0, "thermal": 0.0,
           "active_power": 0.0, "reactive_power": 0.0}

    for bus in network.buses:
        mag = abs(voltages[bus.index])
        out["voltage"] = max(
            out["voltage"], rel(bus.v_min - mag, bus.v_min), rel(mag - bus.v_max, bus.v_max)
        )

    p_req = np.array([b.p_demand + b.shunt_g * abs(voltages[b.index]) ** 2
                      for b in network.buses])
    q_req = np.array([b.q_demand - b.shunt_b * abs(voltages[b.index]) ** 2
                      for b in network.buses])
    for br in network.branches:
        s_from, s_to = branch_flow(br, voltages[br.from_bus], voltages[br.to_bus])
        p_req[br.from_bus] += s_from.real
        q_req[br.from_bus] += s_from.imag
        p_req[br.to_bus] += s_to.real
        q_req[br.to_bus] += s_to.imag
        if br.thermal_limit is not None:
            out["thermal"] = max(
                out["thermal"],
                rel(abs(s_from) - br.thermal_limit, br.thermal_limit),
                rel(abs(s_to) - br.thermal_limit, br.thermal_limit),
            )
        angle = abs(np.angle(voltages[br.from_bus] * voltages[br.to_bus].conjugate()))
        out["angle"] = max(out["angle"], rel(angle - br.angle_bound, br.angle_bound))

    for bus in network.buses:
        gens = network.generators_at(bus.index)
        p_lo, p_hi = sum(g.p_min for g in gens), sum(g.p_max for g in gens)
        q_lo, q_hi = sum(g.q_min for g in gens), sum(g.q_max for g in gens)
        out["active_power"] = max(
            out["active_power"],
            rel(p_req[bus.index] - p_hi, p_hi),
            rel(p_lo - p_req[bus.index], p_lo),
        )
        out["reactive_power"] = max(
            out["reactive_power"],
            rel(q_req[bus.index] - q_hi, q_hi),
            rel(q_lo - q_req[bus.index], q_lo),
        )
    return out


# ----------------------------------------------------------------------
# feasible-point lifting (oracle support)


def lift_point(
    network: Network,
    kind: RelaxationKind,
    voltages: np.ndarray,
    p_gen: np.ndarray,
    q_gen: np.ndarray,
) -> dict[str, float]:
    """Variable assignment induced by an AC operating point.

    Maps a complex voltage profile plus a generator dispatch onto every
    variable of the ``kind`` relaxation of ``network`` (including
    epigraph auxiliaries, set tight). Feeding the result to
    ``ConicProgram.evaluate`` measures how exactly the relaxation
    contains the AC feasible set.
    """
    v = np.asarray(voltages, dtype=complex)
    v = v * np.exp(-1j * np.angle(v[network.reference_bus]))
    n = network.n_bus

    pairs = set(network.edge_set)
    if kind is RelaxationKind.SDR:
        pairs = {(a, b) for a in range(n) for b in range(a + 1, n)}
    elif kind is RelaxationKind.CHR:
        decomposition = chordal_extension(SparsityGraph.from_edges(n, network.edge_set))
        pairs |= set(decomposition.fill_edges)

    out: dict[str, float] = {}
    for i in range(n):
        out[f"Vkk[{i}]"] = abs(v[i]) ** 2
    for a, b in sorted(pairs):
        z = v[a] * v[b].conjugate()
        out[f"Vre[{a},{b}]"] = z.real
        out[f"Vim[{a},{b}]"] = z.imag
    for br in network.branches:
        s_from, s_to = branch_flow(br, v[br.from_bus], v[br.to_bus])
        out[f"pf[{br.index}]"] = s_from.real
        out[f"qf[{br.index}]"] = s_from.imag
        out[f"pt[{br.index}]"] = s_to.real
        out[f"qt[{br.index}]"] = s_to.imag

    n_epi = 0
    for g in network.generators:
        out[f"pg[{g.index}]"] = float(p_gen[g.index])
        out[f"qg[{g.index}]"] = float(q_gen[g.index])
    for g in network.generators:
        if g.cost_c2 > 0:
            out[f"_epi{n_epi}[pg[{g.index}]]"] = float(p_gen[g.index]) ** 2
            n_epi += 1

    if kind is RelaxationKind.TCR:
        for i in range(n):
            out[f"vre[{i}]"] = v[i].real
            out[f"vim[{i}]"] = v[i].imag
    elif kind is RelaxationKind.QCR:
        angles = np.angle(v)
        for i in range(n):
            out[f"vm[{i}]"] = abs(v[i])
            out[f"th[{i}]"] = angles[i]
        n_sq = 0
        for br in network.branches:
            k, m = br.from_bus, br.to_bus
            diff = angles[k] - angles[m]
            out[f"w[{br.index}]"] = abs(v[k]) * abs(v[m])
            out[f"cs[{br.index}]"] = math.cos(diff)
            out[f"sn[{br.index}]"] = math.sin(diff)
            out[f"dt[{br.index}]"] = diff
            out[f"_sq{n_sq}"] = diff**2
            n_sq += 1
    return out
