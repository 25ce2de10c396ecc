"""Solve all five relaxations of one case and compare their gaps.

Reproduces one row of the benchmark comparison: lower bounds, optimality
gaps against the reference upper bound, timings, and the rank diagnostic
that tells exact relaxations apart from inexact ones.
"""

import time

from conicopf import build_network, parse_case_file
from conicopf.backends import default_backend
from conicopf.data import bundled_case, load_upper_bounds
from conicopf.relaxations import (
    NoVoltageAvailable,
    RelaxationKind,
    build_relaxation,
    recover_candidate,
)
from conicopf.reporting import optimality_gap

CASE = "case5_pjm"

net = build_network(parse_case_file(bundled_case(CASE)))
upper = load_upper_bounds()[CASE][0]
backend = default_backend()
print(f"{CASE}: upper bound {upper:.2f} $/h, backend {backend.name}\n")
print(f"{'kind':>5} {'lower $/h':>12} {'gap %':>7} {'build s':>8} {'solve s':>8} {'rank ratio':>11}")

best = None
for kind in RelaxationKind:
    t0 = time.perf_counter()
    program = build_relaxation(net, kind)
    build_s = time.perf_counter() - t0
    solution = backend.solve(program)
    gap = optimality_gap(solution.objective_value, upper)
    try:
        ratio = f"{recover_candidate(kind, solution, net).rank_ratio:.2e}"
    except NoVoltageAvailable:
        ratio = "n/a"
    print(f"{kind.value:>5} {solution.objective_value:12.2f} {gap:7.2f} "
          f"{build_s:8.2f} {solution.solve_seconds:8.2f} {ratio:>11}")
    best = max(best or -1e30, solution.objective_value)

print(f"\nbest lower bound: {best:.2f} $/h "
      f"(gap {optimality_gap(best, upper):.2f} %)")
print("the chordal and full semidefinite bounds coincide; the 2x2-cone,")
print("polar-envelope and 3x3-block bounds trade tightness for speed")
