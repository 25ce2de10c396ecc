"""Walk through case decoding and network construction.

Loads a bundled 5-bus case, shows the raw tables, the validation
diagnostics, and the derived per-unit model including the lifted flow
coefficients of one branch.
"""

from conicopf import admittance_terms, build_network, parse_case_file, validate_case
from conicopf.data import bundled_case

path = bundled_case("case5_pjm")
print(f"reading {path.name}")
raw = parse_case_file(path)
print(f"baseMVA = {raw.base_mva}, "
      f"{raw.n_bus} buses / {raw.n_gen} generators / {raw.n_branch} branches\n")

print("first bus row (verbatim):")
print(" ", raw.bus_table[0])

print("\nvalidation diagnostics:")
for diag in validate_case(raw):
    print(f"  [{diag.severity}] {diag.code}: {diag.message}")
if not validate_case(raw):
    print("  (clean)")

net = build_network(raw)
print(f"\nper-unit model: reference bus index {net.reference_bus}, "
      f"{len(net.edge_set)} distinct edges, radial = {net.is_radial()}")

bus = net.buses[1]
print(f"bus 1: demand {bus.p_demand:+.4f} + j{bus.q_demand:+.4f} pu, "
      f"|v| in [{bus.v_min}, {bus.v_max}]")

branch = net.branches[0]
print(f"\nbranch 0: {branch.from_bus} -> {branch.to_bus}, "
      f"y = {branch.series_admittance:.4f}, "
      f"thermal limit = {branch.thermal_limit} pu")
y_ff, y_ft, y_tf, y_tt = admittance_terms(branch)
print("lifted flow coefficients:")
print(f"  from end: {y_ff:.4f} * V_kk + {y_ft:.4f} * V_km")
print(f"  to end:   {y_tf:.4f} * conj(V_km) + {y_tt:.4f} * V_mm")
