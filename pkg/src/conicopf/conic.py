"""Solver-agnostic conic program representation.

A :class:`ConicProgram` collects named real variables with optional box
bounds, sparse affine equalities and inequalities, second-order /
rotated-second-order cone blocks, real symmetric PSD blocks, and an
affine objective (convex quadratic costs enter through rotated-cone
epigraph auxiliaries). Complex Hermitian PSD constraints are embedded
as real symmetric blocks of twice the dimension.

Programs are lowered to a neutral structured form that solver adapters
(:mod:`conicopf.backends`) and the text exporter (:mod:`conicopf.sdpa`)
consume. Construction order is deterministic, so identical build calls
produce identical lowered data.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class NonHermitianInput(ValueError):
    """Entries do not define a Hermitian matrix."""


class NegativeCurvature(ValueError):
    """Quadratic cost coefficient below zero."""


class ProgramError(ValueError):
    """Malformed program construction call."""


@dataclass(frozen=True)
class Var:
    """Handle to one scalar variable of a program."""

    index: int
    name: str

    def __add__(self, other):
        return as_expr(self) + other

    __radd__ = __add__

    def __sub__(self, other):
        return as_expr(self) - other

    def __rsub__(self, other):
        return as_expr(other) - as_expr(self)

    def __mul__(self, other):
        return as_expr(self) * other

    __rmul__ = __mul__

    def __neg__(self):
        return as_expr(self) * -1.0


class LinExpr:
    """Sparse affine expression: sum of coef * var plus a constant."""

    __slots__ = ("terms", "const")

    def __init__(self, terms: dict[int, float] | None = None, const: float = 0.0):
        self.terms = terms or {}
        self.const = const

    def copy(self) -> "LinExpr":
        return LinExpr(dict(self.terms), self.const)

    def __add__(self, other) -> "LinExpr":
        other = as_expr(other)
        out = self.copy()
        for i, c in other.terms.items():
            out.terms[i] = out.terms.get(i, 0.0) + c
        out.const += other.const
        return out

    __radd__ = __add__

    def __sub__(self, other) -> "LinExpr":
        return self + (as_expr(other) * -1.0)

    def __rsub__(self, other) -> "LinExpr":
        return as_expr(other) - self

    def __mul__(self, scale) -> "LinExpr":
        if not isinstance(scale, (int, float)):
            raise ProgramError("expressions are affine; only scalar scaling allowed")
        return LinExpr({i: c * scale for i, c in self.terms.items()}, self.const * scale)

    __rmul__ = __mul__

    def __neg__(self) -> "LinExpr":
        return self * -1.0

    def value(self, x: np.ndarray) -> float:
        return self.const + sum(c * x[i] for i, c in self.terms.items())

    def canonical(self) -> tuple[tuple[tuple[int, float], ...], float]:
        items = tuple(sorted((i, c) for i, c in self.terms.items() if c != 0.0))
        return items, self.const

    def is_zero(self) -> bool:
        return self.const == 0.0 and all(c == 0.0 for c in self.terms.values())


def as_expr(x) -> LinExpr:
    if isinstance(x, LinExpr):
        return x
    if isinstance(x, Var):
        return LinExpr({x.index: 1.0})
    if isinstance(x, (int, float)):
        return LinExpr(const=float(x))
    raise ProgramError(f"cannot interpret {type(x).__name__} as an affine expression")


# A complex affine expression is an (re, im) pair; plain complex numbers
# are accepted as constants.
def as_complex_expr(z) -> tuple[LinExpr, LinExpr]:
    if isinstance(z, tuple) and len(z) == 2:
        return as_expr(z[0]), as_expr(z[1])
    if isinstance(z, complex):
        return LinExpr(const=z.real), LinExpr(const=z.imag)
    return as_expr(z), LinExpr()


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical_failure"
    MEMORY_LIMIT = "memory_limit"


@dataclass
class Solution:
    """Outcome of one solver run."""

    status: SolveStatus
    objective_value: float | None
    variable_values: dict[str, float]
    solve_seconds: float
    status_detail: str = ""
    max_residual: float = math.nan

    def __post_init__(self):
        if (self.objective_value is not None) != (self.status is SolveStatus.OPTIMAL):
            raise ProgramError("objective_value present iff status is OPTIMAL")

    def value(self, var: Var) -> float:
        return self.variable_values[var.name]


@dataclass
class PsdBlock:
    """Real symmetric PSD constraint over affine entries (upper triangle)."""

    dim: int
    entries: dict[tuple[int, int], LinExpr]

    def expr(self, p: int, q: int) -> LinExpr:
        if p > q:
            p, q = q, p
        return self.entries.get((p, q), LinExpr())

    def matrix_value(self, x: np.ndarray) -> np.ndarray:
        m = np.zeros((self.dim, self.dim))
        for (p, q), e in self.entries.items():
            m[p, q] = e.value(x)
            m[q, p] = m[p, q]
        return m


class ConicProgram:
    """Conic program under construction. Single-threaded per instance."""

    def __init__(self):
        self._names: dict[str, int] = {}
        self.var_names: list[str] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.equalities: list[LinExpr] = []  # expr == 0
        self.inequalities: list[LinExpr] = []  # expr <= 0
        self.soc_blocks: list[list[LinExpr]] = []  # [t, u...] : t >= ||u||
        self.rsoc_blocks: list[tuple[LinExpr, LinExpr, list[LinExpr]]] = []
        self.psd_blocks: list[PsdBlock] = []
        self.objective: LinExpr = LinExpr()
        self._fresh_counts: dict[str, int] = {}

    @property
    def n_var(self) -> int:
        return len(self.var_names)

    def fresh_variable(self, prefix: str, tag: str = "",
                       lb: float = -math.inf, ub: float = math.inf) -> Var:
        """Add an auxiliary variable with a unique, deterministic name."""
        n = self._fresh_counts.get(prefix, 0)
        self._fresh_counts[prefix] = n + 1
        suffix = f"[{tag}]" if tag else ""
        return self.add_variable(f"_{prefix}{n}{suffix}", lb=lb, ub=ub)

    def add_variable(self, name: str, lb: float = -math.inf, ub: float = math.inf) -> Var:
        if name in self._names:
            raise ProgramError(f"variable {name!r} already exists")
        if lb > ub:
            raise ProgramError(f"variable {name!r}: empty box [{lb}, {ub}]")
        idx = len(self.var_names)
        self._names[name] = idx
        self.var_names.append(name)
        self.lb.append(lb)
        self.ub.append(ub)
        return Var(idx, name)

    def variable(self, name: str) -> Var:
        return Var(self._names[name], name)

    def set_bounds(self, var: Var, lb: float | None = None, ub: float | None = None):
        if lb is not None:
            self.lb[var.index] = lb
        if ub is not None:
            self.ub[var.index] = ub

    def add_equality(self, lhs, rhs=0.0) -> int:
        self.equalities.append(as_expr(lhs) - as_expr(rhs))
        return len(self.equalities) - 1

    def add_inequality(self, lhs, rhs=0.0) -> int:
        """Constrain lhs <= rhs."""
        self.inequalities.append(as_expr(lhs) - as_expr(rhs))
        return len(self.inequalities) - 1

    def add_soc(self, exprs) -> int:
        """Constrain exprs[0] >= euclidean norm of exprs[1:]."""
        block = [as_expr(e) for e in exprs]
        if len(block) < 2:
            raise ProgramError("second-order cone needs at least (t, u1)")
        self.soc_blocks.append(block)
        return len(self.soc_blocks) - 1

    def add_rsoc(self, t, s, u) -> int:
        """Constrain 2*t*s >= squared norm of u, with t, s >= 0."""
        self.rsoc_blocks.append((as_expr(t), as_expr(s), [as_expr(e) for e in u]))
        return len(self.rsoc_blocks) - 1

    def add_psd_block(self, entries: dict[tuple[int, int], object], dim: int) -> int:
        norm: dict[tuple[int, int], LinExpr] = {}
        for (p, q), e in entries.items():
            if not (0 <= p < dim and 0 <= q < dim):
                raise ProgramError(f"entry ({p},{q}) outside {dim}x{dim} block")
            key = (p, q) if p <= q else (q, p)
            expr = as_expr(e)
            if key in norm and norm[key].canonical() != expr.canonical():
                raise ProgramError(f"conflicting entries for position {key}")
            norm[key] = expr
        self.psd_blocks.append(PsdBlock(dim, norm))
        return len(self.psd_blocks) - 1

    def add_hermitian_psd(self, entries: dict[tuple[int, int], object], dim: int) -> int:
        """Embed an n x n Hermitian PSD constraint as a 2n x 2n real block.

        ``entries`` maps (i, j) to complex affine expressions ((re, im)
        pairs or complex constants); missing entries are zero, and
        (j, i) keys are folded in as conjugates. With H = X + jY the
        real block is [[X, -Y], [Y, X]], which is PSD exactly when H is,
        with every eigenvalue doubled in multiplicity.
        """
        upper: dict[tuple[int, int], tuple[LinExpr, LinExpr]] = {}
        for (i, j), z in entries.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise ProgramError(f"entry ({i},{j}) outside {dim}x{dim} matrix")
            re, im = as_complex_expr(z)
            if i == j:
                if not im.is_zero():
                    raise NonHermitianInput(f"diagonal entry ({i},{i}) has imaginary part")
                key, val = (i, i), (re, im)
            elif i < j:
                key, val = (i, j), (re, im)
            else:
                key, val = (j, i), (re, -im)  # fold in conjugate
            if key in upper:
                old_re, old_im = upper[key]
                if old_re.canonical() != val[0].canonical() or old_im.canonical() != val[1].canonical():
                    raise NonHermitianInput(f"inconsistent conjugate pair at {key}")
            upper[key] = val

        real: dict[tuple[int, int], LinExpr] = {}
        for (i, j), (re, im) in upper.items():
            real[(i, j)] = re
            real[(dim + i, dim + j)] = re
            if i < j:
                real[(i, dim + j)] = -im
                real[(j, dim + i)] = im
        return self.add_psd_block(real, 2 * dim)

    def add_objective_term(self, expr) -> None:
        self.objective = self.objective + as_expr(expr)

    def add_quadratic_cost_epigraph(self, x: Var, c2: float, c1: float, c0: float) -> LinExpr:
        """Add c2*x^2 + c1*x + c0 to the objective via an epigraph auxiliary.

        For c2 > 0 introduces t >= x^2 as a rotated cone and contributes
        c2*t + c1*x + c0; for c2 = 0 only the affine part is added.
        Returns the objective contribution.
        """
        if c2 < 0:
            raise NegativeCurvature(f"quadratic coefficient {c2:g} < 0")
        contribution = as_expr(x) * c1 + c0
        if c2 > 0:
            t = self.fresh_variable("epi", x.name, lb=0.0)
            self.add_rsoc(t, 0.5, [x])
            contribution = contribution + as_expr(t) * c2
        self.add_objective_term(contribution)
        return contribution

    # ------------------------------------------------------------------
    # lowering and evaluation

    def lower(self) -> "LoweredProgram":
        """Flatten to the neutral cone form min q.x : b - A x in K.

        Finite box bounds become nonnegative-cone rows; rotated cones are
        rewritten as plain second-order cones via
        2ts >= |u|^2  <=>  t+s >= ||(t-s, sqrt(2) u)||.
        """
        ineq_rows: list[LinExpr] = list(self.inequalities)
        for idx, (lo, hi) in enumerate(zip(self.lb, self.ub)):
            if hi < math.inf:
                ineq_rows.append(LinExpr({idx: 1.0}, -hi))
            if lo > -math.inf:
                ineq_rows.append(LinExpr({idx: -1.0}, lo))

        socs: list[list[LinExpr]] = [list(b) for b in self.soc_blocks]
        root2 = math.sqrt(2.0)
        for t, s, u in self.rsoc_blocks:
            socs.append([t + s, t - s] + [e * root2 for e in u])

        return LoweredProgram(
            n_var=self.n_var,
            var_names=list(self.var_names),
            objective=self.objective.copy(),
            equalities=list(self.equalities),
            inequalities=ineq_rows,
            soc_blocks=socs,
            psd_blocks=[PsdBlock(b.dim, dict(b.entries)) for b in self.psd_blocks],
        )

    def values_array(self, values: dict[str, float]) -> np.ndarray:
        x = np.zeros(self.n_var)
        for name, idx in self._names.items():
            x[idx] = values[name]
        return x

    def evaluate(self, values: dict[str, float]) -> "ResidualReport":
        """Constraint residuals of a candidate assignment (all variables)."""
        x = self.values_array(values)

        def rel(v: float, scale: float) -> float:
            return v / max(1.0, abs(scale))

        r_bound = 0.0
        for i in range(self.n_var):
            if self.lb[i] > -math.inf:
                r_bound = max(r_bound, rel(self.lb[i] - x[i], self.lb[i]))
            if self.ub[i] < math.inf:
                r_bound = max(r_bound, rel(x[i] - self.ub[i], self.ub[i]))
        r_eq = max((rel(abs(e.value(x)), e.const) for e in self.equalities), default=0.0)
        r_ineq = max((rel(e.value(x), e.const) for e in self.inequalities), default=0.0)
        r_soc = 0.0
        for block in self.soc_blocks:
            t = block[0].value(x)
            u = math.hypot(*(e.value(x) for e in block[1:]))
            r_soc = max(r_soc, rel(u - t, t))
        r_rsoc = 0.0
        for t, s, u in self.rsoc_blocks:
            tv, sv = t.value(x), s.value(x)
            uu = sum(e.value(x) ** 2 for e in u)
            r_rsoc = max(r_rsoc, rel(uu - 2 * tv * sv, max(abs(tv), abs(sv), 1.0)))
            r_rsoc = max(r_rsoc, -tv, -sv)
        r_psd = 0.0
        for block in self.psd_blocks:
            eigs = np.linalg.eigvalsh(block.matrix_value(x))
            r_psd = max(r_psd, rel(-eigs[0], eigs[-1] if len(eigs) else 1.0))

        return ResidualReport(
            bounds=max(r_bound, 0.0),
            equalities=max(r_eq, 0.0),
            inequalities=max(r_ineq, 0.0),
            soc=max(r_soc, 0.0),
            rsoc=max(r_rsoc, 0.0),
            psd=max(r_psd, 0.0),
        )

    def objective_value(self, values: dict[str, float]) -> float:
        return self.objective.value(self.values_array(values))


@dataclass
class ResidualReport:
    bounds: float
    equalities: float
    inequalities: float
    soc: float
    rsoc: float
    psd: float

    @property
    def overall(self) -> float:
        return max(self.bounds, self.equalities, self.inequalities,
                   self.soc, self.rsoc, self.psd)


@dataclass
class LoweredProgram:
    """Neutral flattened form consumed by backends and exporters.

    Constraint semantics: every equality expression must vanish, every
    inequality expression must be <= 0, each SOC block [t, u...] must
    satisfy t >= ||u||, and each PSD block must be positive semidefinite.
    Box bounds and rotated cones are already rewritten.
    """

    n_var: int
    var_names: list[str]
    objective: LinExpr
    equalities: list[LinExpr]
    inequalities: list[LinExpr]
    soc_blocks: list[list[LinExpr]]
    psd_blocks: list[PsdBlock]

    @staticmethod
    def stack_rows(rows: list[LinExpr]) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """COO triplets (row, col, val) plus the constant of each row."""
        ri: list[int] = []
        ci: list[int] = []
        vv: list[float] = []
        consts = np.zeros(len(rows))
        for r, expr in enumerate(rows):
            consts[r] = expr.const
            for c, v in expr.terms.items():
                if v != 0.0:
                    ri.append(r)
                    ci.append(c)
                    vv.append(v)
        return np.array(ri, dtype=int), np.array(ci, dtype=int), np.array(vv), consts


def solve(program: ConicProgram, backend=None, **options) -> Solution:
    """Solve a program with the given backend (default: best available).

    Optimal solutions get their primal feasibility re-checked against
    the program itself; the worst relative residual is stored on
    ``Solution.max_residual`` (solver tolerances default to 1e-8).
    """
    from . import backends

    if backend is None:
        backend = backends.default_backend()
    solution = backend.solve(program, **options)
    if solution.status is SolveStatus.OPTIMAL:
        solution.max_residual = program.evaluate(solution.variable_values).overall
    return solution
