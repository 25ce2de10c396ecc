"""Solver adapters for :class:`~conicopf.conic.ConicProgram`.

The adapter contract is :class:`SolverBackend`: consume a program,
return a :class:`~conicopf.conic.Solution`. An adapter must support
nonnegative, second-order and PSD cones (rotated cones are rewritten
during lowering). Two adapters ship: Clarabel (default) and CVXOPT,
which double as mutual cross-checks; the SDPA text export in
:mod:`conicopf.sdpa` is the fallback path for external solvers.

Backend selection: pass an instance explicitly, or set the environment
variable ``CONICOPF_BACKEND`` to ``clarabel`` or ``cvxopt``.
"""

from __future__ import annotations

import abc
import math
import os
import time

import numpy as np
from scipy import sparse

from .conic import ConicProgram, LinExpr, LoweredProgram, Solution, SolveStatus

DEFAULT_TOL = 1e-8


class BackendUnavailable(RuntimeError):
    """The requested solver cannot be imported."""


class SolverBackend(abc.ABC):
    """Adapter contract: lower a program, run a solver, map the result."""

    name: str = "abstract"

    @abc.abstractmethod
    def solve(self, program: ConicProgram, tol: float = DEFAULT_TOL,
              max_seconds: float | None = None) -> Solution:
        """Solve and return a Solution; never raises on solver failure."""


def available_backends() -> list[str]:
    found = []
    for name in ("clarabel", "cvxopt"):
        try:
            __import__(name)
            found.append(name)
        except ImportError:
            continue
    return found


def get_backend(name: str) -> SolverBackend:
    name = name.lower()
    if name == "clarabel":
        return ClarabelBackend()
    if name == "cvxopt":
        return CvxoptBackend()
    raise BackendUnavailable(f"unknown backend {name!r}; known: clarabel, cvxopt")


def default_backend() -> SolverBackend:
    choice = os.environ.get("CONICOPF_BACKEND")
    if choice:
        return get_backend(choice)
    for name in ("clarabel", "cvxopt"):
        try:
            return get_backend(name)
        except BackendUnavailable:
            continue
    raise BackendUnavailable("no conic solver importable (tried clarabel, cvxopt)")


def _objective_vector(low: LoweredProgram) -> np.ndarray:
    q = np.zeros(low.n_var)
    for i, c in low.objective.terms.items():
        q[i] += c
    return q


def _svec_rows(block, scale_offdiag: float) -> list[LinExpr]:
    """Upper triangle stacked column-wise: (0,0), (0,1), (1,1), (0,2), ..."""
    rows = []
    for q in range(block.dim):
        for p in range(q + 1):
            scale = 1.0 if p == q else scale_offdiag
            rows.append(block.expr(p, q) * scale)
    return rows


def _solution(program: ConicProgram, status: SolveStatus, x: np.ndarray | None,
              objective: float | None, seconds: float, detail: str) -> Solution:
    values: dict[str, float] = {}
    if x is not None:
        values = {name: float(x[i]) for i, name in enumerate(program.var_names)}
    return Solution(
        status=status,
        objective_value=objective if status is SolveStatus.OPTIMAL else None,
        variable_values=values,
        solve_seconds=seconds,
        status_detail=detail,
    )


class ClarabelBackend(SolverBackend):
    """Interior-point conic solver (nonneg, SOC and PSD cones)."""

    name = "clarabel"

    def __init__(self):
        try:
            import clarabel  # noqa: F401
        except ImportError as exc:
            raise BackendUnavailable("clarabel is not installed") from exc

    def solve(self, program: ConicProgram, tol: float = DEFAULT_TOL,
              max_seconds: float | None = None) -> Solution:
        import clarabel

        start = time.perf_counter()
        low = program.lower()
        n = low.n_var

        # Clarabel form: min q.x  s.t.  A x + s = b,  s in K.
        # Equalities/inequalities need s = -expr (A=+a, b=-const); cone
        # blocks need s = +expr, handled by pre-negating the expression.
        rows: list[LinExpr] = []
        cones = []
        if low.equalities:
            rows.extend(low.equalities)
            cones.append(clarabel.ZeroConeT(len(low.equalities)))
        if low.inequalities:
            rows.extend(low.inequalities)
            cones.append(clarabel.NonnegativeConeT(len(low.inequalities)))
        for block in low.soc_blocks:
            rows.extend(-e for e in block)
            cones.append(clarabel.SecondOrderConeT(len(block)))
        for block in low.psd_blocks:
            rows.extend(-e for e in _svec_rows(block, math.sqrt(2.0)))
            cones.append(clarabel.PSDTriangleConeT(block.dim))

        ri, ci, vv, cc = LoweredProgram.stack_rows(rows)
        a_mat = sparse.csc_matrix((vv, (ri, ci)), shape=(len(rows), n))
        b = -cc
        q = _objective_vector(low)
        p_mat = sparse.csc_matrix((n, n))

        settings = clarabel.DefaultSettings()
        settings.verbose = False
        settings.tol_gap_rel = tol
        settings.tol_gap_abs = tol
        settings.tol_feas = tol
        # The real embedding of Hermitian blocks doubles every eigenvalue,
        # which degrades the KKT conditioning near optimality; a slightly
        # stronger static regularization prevents step-length stalls.
        settings.static_regularization_constant = 1e-7
        if max_seconds is not None:
            settings.time_limit = max_seconds

        try:
            solver = clarabel.DefaultSolver(p_mat, q, a_mat, b, cones, settings)
            result = solver.solve()
        except MemoryError:
            return _solution(program, SolveStatus.MEMORY_LIMIT, None, None,
                             time.perf_counter() - start, "out of memory")
        seconds = time.perf_counter() - start

        status_name = str(result.status)
        mapping = {
            "Solved": SolveStatus.OPTIMAL,
            "AlmostSolved": SolveStatus.OPTIMAL,
            "PrimalInfeasible": SolveStatus.INFEASIBLE,
            "AlmostPrimalInfeasible": SolveStatus.INFEASIBLE,
            "DualInfeasible": SolveStatus.UNBOUNDED,
            "AlmostDualInfeasible": SolveStatus.UNBOUNDED,
        }
        status = mapping.get(status_name, SolveStatus.NUMERICAL_FAILURE)
        x = None
        objective = None
        if status is SolveStatus.OPTIMAL:
            x = np.asarray(result.x)
            objective = float(result.obj_val) + low.objective.const
        return _solution(program, status, x, objective, seconds, status_name)


class CvxoptBackend(SolverBackend):
    """CVXOPT conelp adapter (nonneg, SOC and PSD cones)."""

    name = "cvxopt"

    def __init__(self):
        try:
            import cvxopt  # noqa: F401
        except ImportError as exc:
            raise BackendUnavailable("cvxopt is not installed") from exc

    def solve(self, program: ConicProgram, tol: float = DEFAULT_TOL,
              max_seconds: float | None = None) -> Solution:
        import cvxopt
        from cvxopt import solvers

        start = time.perf_counter()
        low = program.lower()
        n = low.n_var

        # conelp form: min c.x  s.t.  G x + s = h (s in K),  A x = b.
        # PSD slacks are full matrices stacked column-major, no scaling.
        g_exprs: list[LinExpr] = list(low.inequalities)
        dims = {"l": len(low.inequalities), "q": [], "s": []}
        for block in low.soc_blocks:
            dims["q"].append(len(block))
            g_exprs.extend(-e for e in block)
        for block in low.psd_blocks:
            dims["s"].append(block.dim)
            for q_col in range(block.dim):
                for p_row in range(block.dim):
                    g_exprs.append(-block.expr(p_row, q_col))

        gi, gj, gv, gc = LoweredProgram.stack_rows(g_exprs)
        g_mat = cvxopt.spmatrix(gv.tolist(), gi.tolist(), gj.tolist(),
                                (len(g_exprs), n))
        h = cvxopt.matrix(-gc)

        ai, aj, av, ac = LoweredProgram.stack_rows(low.equalities)
        a_mat = cvxopt.spmatrix(av.tolist(), ai.tolist(), aj.tolist(),
                                (len(low.equalities), n))
        b = cvxopt.matrix(-ac)

        q = _objective_vector(low)
        options = {
            "show_progress": False,
            "abstol": tol,
            "reltol": tol,
            "feastol": max(tol, 1e-9),
            "maxiters": 200,
        }
        try:
            result = solvers.conelp(cvxopt.matrix(q), g_mat, h, dims,
                                    a_mat, b, options=options)
        except MemoryError:
            return _solution(program, SolveStatus.MEMORY_LIMIT, None, None,
                             time.perf_counter() - start, "out of memory")
        except (ValueError, ArithmeticError) as exc:
            return _solution(program, SolveStatus.NUMERICAL_FAILURE, None, None,
                             time.perf_counter() - start, str(exc))
        seconds = time.perf_counter() - start

        status_map = {
            "optimal": SolveStatus.OPTIMAL,
            "primal infeasible": SolveStatus.INFEASIBLE,
            "dual infeasible": SolveStatus.UNBOUNDED,
        }
        status = status_map.get(result["status"], SolveStatus.NUMERICAL_FAILURE)
        x = None
        objective = None
        if status is SolveStatus.OPTIMAL:
            x = np.array(result["x"]).ravel()
            objective = float(q @ x) + low.objective.const
        return _solution(program, status, x, objective, seconds, result["status"])
