"""Convex envelopes of the nonconvex atoms x^2, x*y, cos t and sin t.

Each emitter adds affine / rotated-cone constraints to a
:class:`~conicopf.conic.ConicProgram` that outer-approximate the graph
of the atom over a bounded domain: the secant-plus-cone envelope of a
square, the four McCormick planes of a bilinear product, and the
quadratic upper bound / linear band of cosine and sine over a symmetric
angle interval inside (-pi/2, pi/2).

Emitters never tighten variable box bounds; the caller owns the boxes.
Inputs may be variables or affine expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .conic import ConicProgram, as_expr


class DegenerateInterval(ValueError):
    """Interval has zero width where the envelope needs strict width."""


class AngleOutOfRange(ValueError):
    """Angle bound outside the open interval (0, pi/2)."""


@dataclass(frozen=True)
class IntervalBound:
    """Closed interval [lower, upper]; most emitters need lower < upper."""

    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise DegenerateInterval(f"empty interval [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower

    @property
    def is_point(self) -> bool:
        return self.lower == self.upper


@dataclass(frozen=True)
class Emitted:
    """Handles of what an emitter added (row / cone / auxiliary indices)."""

    rows: tuple[int, ...] = ()
    rsocs: tuple[int, ...] = ()
    aux: tuple[str, ...] = ()


def square_envelope(program: ConicProgram, x, y, bound: IntervalBound) -> Emitted:
    """Relax y = x^2 over x in [lower, upper].

    Adds x^2 <= y as a rotated cone and the secant upper bound
    y <= (lower + upper) x - lower * upper.
    """
    if bound.is_point:
        raise DegenerateInterval("square envelope needs lower < upper")
    x, y = as_expr(x), as_expr(y)
    cone = program.add_rsoc(y, 0.5, [x])
    row = program.add_inequality(y - (bound.lower + bound.upper) * x,
                                 -bound.lower * bound.upper)
    return Emitted(rows=(row,), rsocs=(cone,))


def mccormick(program: ConicProgram, x, y, z,
              bx: IntervalBound, by: IntervalBound) -> Emitted:
    """Relax z = x*y over the box bx x by with the four McCormick planes.

    A single degenerate interval is fine (the planes collapse to the
    exact product); both degenerate is rejected.
    """
    if bx.is_point and by.is_point:
        raise DegenerateInterval("both McCormick intervals are degenerate")
    x, y, z = as_expr(x), as_expr(y), as_expr(z)
    xl, xu, yl, yu = bx.lower, bx.upper, by.lower, by.upper
    rows = (
        # underestimators: z >= ...
        program.add_inequality(x * yl + xl * y - xl * yl - z),
        program.add_inequality(x * yu + xu * y - xu * yu - z),
        # overestimators: z <= ...
        program.add_inequality(z - x * yl - xu * y + xu * yl),
        program.add_inequality(z - x * yu - xl * y + xl * yu),
    )
    return Emitted(rows=rows)


def cosine_envelope(program: ConicProgram, t, x, t_bar: float) -> Emitted:
    """Relax x = cos t over |t| <= t_bar, 0 < t_bar < pi/2.

    Adds cos(t_bar) <= x and the quadratic upper bound
    x <= 1 - (1 - cos t_bar) t^2 / t_bar^2, realized through an
    auxiliary s >= t^2 rotated cone. The caller enforces |t| <= t_bar.
    """
    _check_angle(t_bar)
    t, x = as_expr(t), as_expr(x)
    lo = program.add_inequality(math.cos(t_bar) - x)
    s = program.fresh_variable("sq", lb=0.0)
    cone = program.add_rsoc(s, 0.5, [t])
    coeff = (1.0 - math.cos(t_bar)) / t_bar**2
    hi = program.add_inequality(x + coeff * as_expr(s), 1.0)
    return Emitted(rows=(lo, hi), rsocs=(cone,), aux=(s.name,))


def sine_envelope(program: ConicProgram, t, y, t_bar: float) -> Emitted:
    """Relax y = sin t over |t| <= t_bar, 0 < t_bar < pi/2.

    Adds the band |y - t cos(t_bar/2)| <= sin(t_bar/2) - (t_bar/2) cos(t_bar/2)
    as two affine inequalities.
    """
    _check_angle(t_bar)
    t, y = as_expr(t), as_expr(y)
    slope = math.cos(t_bar / 2.0)
    half_width = math.sin(t_bar / 2.0) - (t_bar / 2.0) * slope
    rows = (
        program.add_inequality(y - t * slope, half_width),
        program.add_inequality(t * slope - y, half_width),
    )
    return Emitted(rows=rows)


def _check_angle(t_bar: float) -> None:
    if not 0.0 < t_bar < math.pi / 2:
        raise AngleOutOfRange(f"angle bound {t_bar:g} outside (0, pi/2)")
