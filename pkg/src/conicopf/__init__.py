"""Conic relaxations of AC optimal power flow.

Parse MATPOWER-format cases, build per-unit network models, assemble
five conic relaxations (SOCR, QCR, TCR, CHR, SDR) as solver-agnostic
conic programs, solve them through pluggable backends, and report
optimality gaps against reference upper bounds.
"""

from .matpower import RawCase, parse_case, parse_case_file, validate_case
from .network import Network, admittance_terms, branch_flow, build_network
from .conic import ConicProgram, Solution, SolveStatus, solve
from .backends import available_backends, default_backend, get_backend
from .relaxations import (
    RelaxationKind,
    build_chr,
    build_lifted_base,
    build_qcr,
    build_relaxation,
    build_sdr,
    build_socr,
    build_tcr,
    recover_candidate,
)
from .reporting import RelaxationReport, brute_force_acopf, optimality_gap, render_table

__version__ = "0.1.0"

__all__ = [
    "RawCase",
    "parse_case",
    "parse_case_file",
    "validate_case",
    "Network",
    "build_network",
    "admittance_terms",
    "branch_flow",
    "ConicProgram",
    "Solution",
    "SolveStatus",
    "solve",
    "available_backends",
    "default_backend",
    "get_backend",
    "RelaxationKind",
    "build_lifted_base",
    "build_socr",
    "build_sdr",
    "build_chr",
    "build_tcr",
    "build_qcr",
    "build_relaxation",
    "recover_candidate",
    "RelaxationReport",
    "optimality_gap",
    "brute_force_acopf",
    "render_table",
]
