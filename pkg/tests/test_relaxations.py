"""Relaxation builders: structure counts, lift feasibility, equivalences,
candidate recovery and infeasibility propagation."""

import numpy as np
import pytest

from conicopf.conic import Solution, SolveStatus
from conicopf.network import branch_flow
from conicopf.relaxations import (
    NoVoltageAvailable,
    RelaxationKind,
    build_chr,
    build_lifted_base,
    build_qcr,
    build_relaxation,
    build_sdr,
    build_socr,
    build_tcr,
    lift_point,
    recover_candidate,
)

from conftest import (
    make_branch,
    make_bus,
    make_gen,
    toy_2bus,
    toy_3bus_radial,
    toy_3bus_triangle,
    toy_4bus_radial,
    toy_infeasible,
)

ALL_KINDS = list(RelaxationKind)


def feasible_dispatch(network, voltages):
    """Generation required to balance the network at given voltages."""
    n = network.n_bus
    p_req = np.array([b.p_demand + b.shunt_g * abs(voltages[b.index]) ** 2
                      for b in network.buses])
    q_req = np.array([b.q_demand - b.shunt_b * abs(voltages[b.index]) ** 2
                      for b in network.buses])
    for br in network.branches:
        s_f, s_t = branch_flow(br, voltages[br.from_bus], voltages[br.to_bus])
        p_req[br.from_bus] += s_f.real
        q_req[br.from_bus] += s_f.imag
        p_req[br.to_bus] += s_t.real
        q_req[br.to_bus] += s_t.imag
    p_gen = np.zeros(len(network.generators))
    q_gen = np.zeros(len(network.generators))
    for g in network.generators:
        p_gen[g.index] = p_req[g.bus]
        q_gen[g.index] = q_req[g.bus]
    return p_gen, q_gen


class TestBaseStructure:
    def test_2bus_counts(self):
        net = toy_2bus()
        prog, lifted = build_lifted_base(net)
        # 2 balance rows per bus, 4 flow rows per branch
        assert len(prog.equalities) == 2 * 2 + 4 * 1
        # two sector rows per branch, nothing else
        assert len(prog.inequalities) == 2
        # squared-magnitude boxes on both V_kk
        for bus in net.buses:
            idx = lifted.v_diag[bus.index].index
            assert prog.lb[idx] == pytest.approx(bus.v_min**2)
            assert prog.ub[idx] == pytest.approx(bus.v_max**2)

    def test_case14_flow_quadruples(self, networks):
        net = networks("case14_ieee")
        prog, _ = build_lifted_base(net)
        assert len(net.branches) == 20
        assert len(prog.equalities) == 2 * 14 + 4 * 20

    def test_thermal_cones_emitted(self):
        net = toy_3bus_triangle()
        prog, _ = build_lifted_base(net)
        limited = sum(1 for br in net.branches if br.thermal_limit is not None)
        assert limited == 1
        assert len(prog.soc_blocks) == 2 * limited


class TestLiftFeasibility:
    @pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
    @pytest.mark.parametrize("toy", [toy_2bus, toy_3bus_radial, toy_3bus_triangle],
                             ids=lambda f: f.__name__)
    def test_random_feasible_points_satisfy_relaxation(self, kind, toy):
        net = toy()
        # widen generator boxes so any sampled voltage profile is AC-feasible
        gens = tuple(
            g.__class__(**{**g.__dict__, "p_min": -50.0, "p_max": 50.0,
                           "q_min": -50.0, "q_max": 50.0})
            for g in net.generators
        )
        # a generator at every bus keeps balance satisfiable for random v
        extra = []
        covered = {g.bus for g in gens}
        next_index = len(gens)
        for bus in net.buses:
            if bus.index not in covered:
                extra.append(make_gen(next_index, bus.index, p_max=50.0,
                                      p_min=-50.0, q_max=50.0, q_min=-50.0))
                next_index += 1
        net = net.__class__(**{**net.__dict__, "generators": gens + tuple(extra)})

        prog = build_relaxation(net, kind)
        rng = np.random.default_rng(17)
        for _ in range(20):
            mags = np.array([rng.uniform(b.v_min, b.v_max) for b in net.buses])
            angle_cap = min(br.angle_bound for br in net.branches)
            angles = rng.uniform(-angle_cap / 2, angle_cap / 2, net.n_bus)
            angles[net.reference_bus] = 0.0
            v = mags * np.exp(1j * angles)
            # thermal limits may exclude a sample; skip those profiles
            ok = all(
                br.thermal_limit is None
                or max(abs(s) for s in branch_flow(br, v[br.from_bus], v[br.to_bus]))
                <= br.thermal_limit
                for br in net.branches
            )
            if not ok:
                continue
            p_gen, q_gen = feasible_dispatch(net, v)
            values = lift_point(net, kind, v, p_gen, q_gen)
            report = prog.evaluate(values)
            assert report.overall <= 1e-9, (kind, report)


class TestEquivalences:
    def test_radial_3bus_socr_equals_sdr(self, backend):
        net = toy_3bus_radial()
        socr = backend.solve(build_socr(net))
        sdr = backend.solve(build_sdr(net))
        assert socr.status is SolveStatus.OPTIMAL
        assert sdr.status is SolveStatus.OPTIMAL
        rel = abs(socr.objective_value - sdr.objective_value) / abs(sdr.objective_value)
        assert rel <= 1e-6

    def test_radial_4bus_socr_equals_sdr(self, backend):
        net = toy_4bus_radial()
        socr = backend.solve(build_socr(net))
        sdr = backend.solve(build_sdr(net))
        rel = abs(socr.objective_value - sdr.objective_value) / abs(sdr.objective_value)
        assert rel <= 1e-5

    def test_triangle_chr_is_single_full_block(self, backend):
        net = toy_3bus_triangle()
        chr_prog = build_chr(net)
        sdr_prog = build_sdr(net)
        # one maximal clique covering all three buses: same block shape as SDR
        assert [b.dim for b in chr_prog.psd_blocks] == [6]
        assert [b.dim for b in sdr_prog.psd_blocks] == [6]
        assert chr_prog.n_var == sdr_prog.n_var
        chr_sol = backend.solve(chr_prog)
        sdr_sol = backend.solve(sdr_prog)
        rel = abs(chr_sol.objective_value - sdr_sol.objective_value)
        assert rel / abs(sdr_sol.objective_value) <= 1e-6

    def test_chr_matches_sdr_on_meshed_toy(self, backend):
        # 4-bus ring: non-chordal sparsity, so CHR needs a fill edge
        buses = (
            make_bus(0, ref=True), make_bus(1, p=0.3, q=0.05),
            make_bus(2, p=0.4, q=0.1), make_bus(3, p=0.2),
        )
        gens = (make_gen(0, 0, p_max=2.0, c2=0.2, c1=2.0),
                make_gen(1, 2, p_max=0.5, c1=1.0))
        branches = (
            make_branch(0, 0, 1, 0.02, 0.2), make_branch(1, 1, 2, 0.03, 0.25),
            make_branch(2, 2, 3, 0.02, 0.2), make_branch(3, 3, 0, 0.03, 0.22),
        )
        net = toy_2bus().__class__(
            name="ring4", base_mva=100.0, buses=buses, generators=gens,
            branches=branches, reference_bus=0,
        )
        chr_sol = backend.solve(build_chr(net))
        sdr_sol = backend.solve(build_sdr(net))
        rel = abs(chr_sol.objective_value - sdr_sol.objective_value)
        assert rel / abs(sdr_sol.objective_value) <= 1e-5

    def test_tcr_and_qcr_at_least_socr_on_toys(self, backend):
        for net in (toy_3bus_triangle(), toy_4bus_radial()):
            socr = backend.solve(build_socr(net)).objective_value
            tcr = backend.solve(build_tcr(net)).objective_value
            qcr = backend.solve(build_qcr(net)).objective_value
            tol = 1e-5 * max(1.0, abs(socr))
            assert tcr >= socr - tol
            assert qcr >= socr - tol


class TestOrientationHandling:
    def test_reversed_parallel_branch(self, backend):
        """Two branches between one pair, opposite orientations."""
        buses = (make_bus(0, ref=True), make_bus(1, p=0.5, q=0.1))
        gens = (make_gen(0, 0, p_max=3.0, p_min=-3.0, q_max=3.0, q_min=-3.0, c1=1.0),
                make_gen(1, 1, p_max=3.0, p_min=-3.0, q_max=3.0, q_min=-3.0, c1=2.0))
        branches = (
            make_branch(0, 0, 1, 0.01, 0.1),
            make_branch(1, 1, 0, 0.02, 0.15),
        )
        net = toy_2bus().__class__(
            name="par2", base_mva=100.0, buses=buses, generators=gens,
            branches=branches, reference_bus=0,
        )
        assert net.edge_set == ((0, 1),)
        for kind in ALL_KINDS:
            prog = build_relaxation(net, kind)
            sol = backend.solve(prog)
            assert sol.status is SolveStatus.OPTIMAL, (kind, sol.status_detail)
            # shared lifted entry: exactly one (Re, Im) pair
            assert "Vre[0,1]" in sol.variable_values
            assert "Vre[1,0]" not in sol.variable_values
        # a feasible point lifts into every kind despite the flipped branch
        v = np.array([1.05, 1.0 * np.exp(-0.1j)])
        p_gen, q_gen = feasible_dispatch(net, v)
        for kind in ALL_KINDS:
            prog = build_relaxation(net, kind)
            report = prog.evaluate(lift_point(net, kind, v, p_gen, q_gen))
            assert report.overall <= 1e-9, kind


class TestRecovery:
    def test_rank_one_constructed_input(self):
        # zero demand, no charging: the flat profile is exactly feasible
        buses = (make_bus(0, ref=True), make_bus(1), make_bus(2))
        gens = (make_gen(0, 0, p_min=-1.0), make_gen(1, 2, p_min=-1.0))
        branches = (make_branch(0, 0, 1, 0.03, 0.25),
                    make_branch(1, 1, 2, 0.02, 0.2),
                    make_branch(2, 0, 2, 0.04, 0.3))
        net = toy_3bus_triangle().__class__(
            name="flat3", base_mva=100.0, buses=buses, generators=gens,
            branches=branches, reference_bus=0,
        )
        v = np.ones(3, dtype=complex)
        values = lift_point(net, RelaxationKind.SDR, v, np.zeros(2), np.zeros(2))
        solution = Solution(
            status=SolveStatus.OPTIMAL, objective_value=0.0,
            variable_values=values, solve_seconds=0.0,
        )
        rec = recover_candidate(RelaxationKind.SDR, solution, net)
        assert rec.rank_ratio <= 1e-12
        assert rec.max_violation <= 1e-9
        assert np.allclose(rec.voltages, v, atol=1e-9)

    def test_socr_has_no_global_recovery(self, backend):
        net = toy_3bus_triangle()
        sol = backend.solve(build_socr(net))
        with pytest.raises(NoVoltageAvailable) as err:
            recover_candidate(RelaxationKind.SOCR, sol, net)
        assert set(err.value.edge_diagnostics) == set(net.edge_set)

    def test_case14_sdr_near_rank_one(self, networks, solve_cache):
        sol = solve_cache("case14_ieee", RelaxationKind.SDR)
        rec = recover_candidate(RelaxationKind.SDR, sol, networks("case14_ieee"))
        assert rec.rank_ratio <= 1e-5
        assert rec.max_violation <= 1e-4

    def test_case5_sdr_rank_exceeds_one(self, networks, solve_cache):
        sol = solve_cache("case5_pjm", RelaxationKind.SDR)
        rec = recover_candidate(RelaxationKind.SDR, sol, networks("case5_pjm"))
        assert rec.rank_ratio > 1e-3

    def test_case14_chr_stitching(self, networks, solve_cache):
        sol = solve_cache("case14_ieee", RelaxationKind.CHR)
        rec = recover_candidate(RelaxationKind.CHR, sol, networks("case14_ieee"))
        assert rec.rank_ratio <= 1e-4
        assert rec.max_violation <= 1e-3

    def test_tcr_qcr_read_voltages_directly(self, backend):
        net = toy_3bus_triangle()
        for kind in (RelaxationKind.TCR, RelaxationKind.QCR):
            sol = backend.solve(build_relaxation(net, kind))
            rec = recover_candidate(kind, sol, net)
            assert rec.voltages.shape == (3,)
            assert abs(np.angle(rec.voltages[net.reference_bus])) <= 1e-12


class TestInfeasibilityPropagation:
    @pytest.mark.parametrize("kind", ALL_KINDS, ids=lambda k: k.value)
    def test_overloaded_network_infeasible_everywhere(self, backend, kind):
        net = toy_infeasible()
        sol = backend.solve(build_relaxation(net, kind))
        assert sol.status is SolveStatus.INFEASIBLE, (kind, sol.status_detail)


def test_builder_dispatch():
    net = toy_2bus()
    for kind, builder in [
        (RelaxationKind.SOCR, build_socr),
        (RelaxationKind.SDR, build_sdr),
        (RelaxationKind.CHR, build_chr),
        (RelaxationKind.TCR, build_tcr),
        (RelaxationKind.QCR, build_qcr),
    ]:
        a = build_relaxation(net, kind)
        b = builder(net)
        assert a.n_var == b.n_var
        assert len(a.psd_blocks) == len(b.psd_blocks)
