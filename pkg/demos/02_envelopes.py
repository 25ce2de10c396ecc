"""Show the convex envelopes at work on their nonconvex atoms.

For each envelope: fix the input, minimize / maximize the output over
the emitted constraints, and compare the achievable band against the
true function value.
"""

import math

import numpy as np

from conicopf.backends import default_backend
from conicopf.conic import ConicProgram
from conicopf.envelopes import (
    IntervalBound,
    cosine_envelope,
    mccormick,
    sine_envelope,
    square_envelope,
)

backend = default_backend()


def band(emit, at):
    """(min, max) of the output variable with the input pinned to `at`."""
    out = []
    for sign in (1.0, -1.0):
        prog = ConicProgram()
        t = prog.add_variable("t", lb=at, ub=at)
        y = prog.add_variable("y")
        emit(prog, t, y)
        prog.add_objective_term(sign * y)
        sol = backend.solve(prog)
        out.append(sign * sol.objective_value)
    return out[0], out[1]


t_bar = math.pi / 3
print(f"cosine envelope over |t| <= {t_bar:.4f}")
print(f"{'t':>8} {'cos t':>9} {'lo':>9} {'hi':>9}")
for t in np.linspace(-t_bar, t_bar, 7):
    lo, hi = band(lambda p, tv, yv: cosine_envelope(p, tv, yv, t_bar), t)
    print(f"{t:8.4f} {math.cos(t):9.5f} {lo:9.5f} {hi:9.5f}")
print("note the pinch to a single point at both endpoints\n")

print(f"sine envelope over |t| <= {t_bar:.4f}")
print(f"{'t':>8} {'sin t':>9} {'lo':>9} {'hi':>9}")
for t in np.linspace(-t_bar, t_bar, 7):
    lo, hi = band(lambda p, tv, yv: sine_envelope(p, tv, yv, t_bar), t)
    print(f"{t:8.4f} {math.sin(t):9.5f} {lo:9.5f} {hi:9.5f}")

print("\nsquare envelope over x in [0.9, 1.1]")
print(f"{'x':>8} {'x^2':>9} {'lo':>9} {'hi':>9}")
for x in np.linspace(0.9, 1.1, 5):
    lo, hi = band(
        lambda p, tv, yv: square_envelope(p, tv, yv, IntervalBound(0.9, 1.1)), x
    )
    print(f"{x:8.4f} {x * x:9.5f} {lo:9.5f} {hi:9.5f}")

print("\nMcCormick planes for z = x*y on [0, 1] x [0, 1] at x = y = 0.5:")
prog = ConicProgram()
x = prog.add_variable("x", lb=0.5, ub=0.5)
y = prog.add_variable("y", lb=0.5, ub=0.5)
z = prog.add_variable("z")
mccormick(prog, x, y, z, IntervalBound(0, 1), IntervalBound(0, 1))
for sign, label in ((1.0, "min"), (-1.0, "max")):
    prog_copy = ConicProgram()
    xv = prog_copy.add_variable("x", lb=0.5, ub=0.5)
    yv = prog_copy.add_variable("y", lb=0.5, ub=0.5)
    zv = prog_copy.add_variable("z")
    mccormick(prog_copy, xv, yv, zv, IntervalBound(0, 1), IntervalBound(0, 1))
    prog_copy.add_objective_term(sign * zv)
    sol = backend.solve(prog_copy)
    print(f"  {label} z = {sign * sol.objective_value:.4f}   (true product 0.25)")
