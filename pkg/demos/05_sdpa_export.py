"""Round-trip a relaxation through the SDPA text format.

Exports the 3-bus second-order cone relaxation, shows the file head,
re-imports it as a linear + PSD program, and re-solves with the other
backend to confirm the objective survives the trip.
"""

import tempfile
from pathlib import Path

from conicopf import build_network, parse_case_file
from conicopf.backends import ClarabelBackend, CvxoptBackend
from conicopf.data import bundled_case
from conicopf.relaxations import build_socr
from conicopf.sdpa import export_sdpa, read_sdpa

net = build_network(parse_case_file(bundled_case("case3_lmbd")))
program = build_socr(net)
in_process = ClarabelBackend().solve(program)
print(f"in-process optimum (clarabel): {in_process.objective_value:.6f} $/h")

path = Path(tempfile.mkdtemp()) / "case3_lmbd__socr.dat-s"
export_sdpa(program, path)
print(f"\nwrote {path} ({path.stat().st_size} bytes); first lines:")
for line in path.read_text().splitlines()[:6]:
    print("  " + (line if len(line) < 70 else line[:67] + "..."))

problem = read_sdpa(path)
print(f"\nblocks on re-import: {problem.block_sizes}")
external = CvxoptBackend().solve(problem.program)
print(f"re-solved optimum (cvxopt):    {external.objective_value:.6f} $/h")
rel = abs(external.objective_value - in_process.objective_value) / abs(in_process.objective_value)
print(f"relative difference: {rel:.2e}")
