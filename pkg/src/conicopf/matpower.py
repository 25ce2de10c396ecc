"""MATPOWER case file decoding.

Reads the plain-matrix subset of the MATPOWER case format (the dialect
used by the PGLib-OPF archive): a ``function mpc = name`` header, scalar
assignments such as ``mpc.baseMVA = 100.0;`` and bracketed numeric
matrices ``mpc.bus = [ ... ];``. Comments (``%`` to end of line) are
stripped; embedded scripting (indexed assignments, expressions) is
rejected.

The result is a :class:`RawCase` holding the numeric tables verbatim,
one numpy row per input row, with no unit conversion. Interpretation
(per-unit scaling, index remapping) happens in :mod:`conicopf.network`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

# Minimum column counts of the standard tables. Extra trailing columns
# are preserved but ignored.
BUS_COLS = 13
GEN_COLS = 10
BRANCH_COLS = 13
GENCOST_COLS = 4


class CaseFormatError(ValueError):
    """Base class for case-file decoding failures."""


class MissingSection(CaseFormatError):
    """A required matrix (baseMVA, bus, gen or branch) is absent."""


class MalformedRow(CaseFormatError):
    """A matrix row has a non-numeric token or the wrong arity."""


class DuplicateBusId(CaseFormatError):
    """Two bus rows share the same bus id."""


class NoReferenceBus(CaseFormatError):
    """Not exactly one in-service bus of type 3."""


@dataclass(frozen=True)
class RawCase:
    """Verbatim numeric tables decoded from a MATPOWER-format case file."""

    base_mva: float
    bus_table: np.ndarray
    gen_table: np.ndarray
    branch_table: np.ndarray
    gencost_table: np.ndarray
    name: str = ""
    version: str = "2"

    @property
    def n_bus(self) -> int:
        return self.bus_table.shape[0]

    @property
    def n_gen(self) -> int:
        return self.gen_table.shape[0]

    @property
    def n_branch(self) -> int:
        return self.branch_table.shape[0]


@dataclass(frozen=True)
class Diagnostic:
    """One validation finding; the caller decides how to act on it."""

    severity: str  # "error" or "warning"
    code: str
    message: str

    @property
    def is_error(self) -> bool:
        return self.severity == "error"


_SCALAR_RE = re.compile(r"mpc\.(\w+)\s*=\s*([^\[;'\s]+)\s*;")
_STRING_RE = re.compile(r"mpc\.(\w+)\s*=\s*'([^']*)'\s*;")
_MATRIX_RE = re.compile(r"mpc\.(\w+)\s*=\s*\[(.*?)\]\s*;", re.DOTALL)
_NAME_RE = re.compile(r"function\s+mpc\s*=\s*(\w+)")
_INDEXED_RE = re.compile(r"mpc\.\w+\s*\(")


def parse_case(text: str) -> RawCase:
    """Decode case-file contents into a :class:`RawCase`.

    Raises :class:`MissingSection`, :class:`MalformedRow`,
    :class:`DuplicateBusId` or :class:`NoReferenceBus` on malformed
    input. A missing gencost matrix yields an empty gencost table.
    """
    stripped = "\n".join(line.split("%", 1)[0] for line in text.splitlines())

    if _INDEXED_RE.search(stripped):
        raise MalformedRow("indexed assignments (mpc.x(...) = ...) are not supported")

    name_m = _NAME_RE.search(stripped)
    name = name_m.group(1) if name_m else ""
    strings = {m.group(1): m.group(2) for m in _STRING_RE.finditer(stripped)}
    scalars = {m.group(1): m.group(2) for m in _SCALAR_RE.finditer(stripped)}
    matrices = {m.group(1): m.group(2) for m in _MATRIX_RE.finditer(stripped)}

    if "baseMVA" not in scalars:
        raise MissingSection("baseMVA")
    try:
        base_mva = float(scalars["baseMVA"])
    except ValueError as exc:
        raise MalformedRow(f"baseMVA is not numeric: {scalars['baseMVA']!r}") from exc
    if base_mva <= 0:
        raise MalformedRow(f"baseMVA must be positive, got {base_mva}")

    for section in ("bus", "gen", "branch"):
        if section not in matrices:
            raise MissingSection(section)

    bus = _decode_matrix("bus", matrices["bus"], BUS_COLS)
    gen = _decode_matrix("gen", matrices["gen"], GEN_COLS)
    branch = _decode_matrix("branch", matrices["branch"], BRANCH_COLS)
    if "gencost" in matrices:
        gencost = _decode_matrix("gencost", matrices["gencost"], GENCOST_COLS)
    else:
        gencost = np.empty((0, GENCOST_COLS))

    bus_ids = bus[:, 0]
    if len(np.unique(bus_ids)) != len(bus_ids):
        seen: set[float] = set()
        for b in bus_ids:
            if b in seen:
                raise DuplicateBusId(f"bus id {b:g} appears more than once")
            seen.add(b)

    known = set(bus_ids.tolist())
    for label, table in (("gen", gen), ("branch", branch)):
        cols = [0] if label == "gen" else [0, 1]
        for col in cols:
            for b in table[:, col]:
                if b not in known:
                    raise MalformedRow(f"{label} row references unknown bus {b:g}")

    in_service = bus[:, 1] != 4
    n_ref = int(np.sum((bus[:, 1] == 3) & in_service))
    if n_ref != 1:
        raise NoReferenceBus(f"expected exactly one reference bus, found {n_ref}")

    return RawCase(
        base_mva=base_mva,
        bus_table=bus,
        gen_table=gen,
        branch_table=branch,
        gencost_table=gencost,
        name=name,
        version=strings.get("version", "2"),
    )


def parse_case_file(path) -> RawCase:
    """Read and decode a case file from disk."""
    with open(path, encoding="utf-8", errors="replace") as fh:
        return parse_case(fh.read())


def _decode_matrix(section: str, body: str, min_cols: int) -> np.ndarray:
    rows: list[list[float]] = []
    for raw_row in body.split(";"):
        tokens = raw_row.split()
        if not tokens:
            continue
        values = []
        for tok in tokens:
            try:
                values.append(float(tok))
            except ValueError as exc:
                raise MalformedRow(f"{section}: non-numeric token {tok!r}") from exc
        rows.append(values)
    if not rows:
        raise MissingSection(f"{section} matrix is empty")

    width = len(rows[0])
    if width < min_cols:
        raise MalformedRow(
            f"{section}: expected at least {min_cols} columns, got {width}"
        )
    for i, row in enumerate(rows):
        if len(row) != width:
            raise MalformedRow(
                f"{section} row {i + 1}: expected {width} columns, got {len(row)}"
            )
    return np.array(rows, dtype=float)


# gencost model codes
COST_PIECEWISE = 1
COST_POLYNOMIAL = 2


def validate_case(raw: RawCase) -> list[Diagnostic]:
    """Check a parsed case for modeling problems.

    Returns diagnostics as data; errors mark conditions under which the
    network model is undefined, warnings mark conventions that will be
    applied silently (unlimited ratings, nominal taps, ...).
    """
    out: list[Diagnostic] = []

    for row in raw.bus_table:
        bus_id, vmax, vmin = int(row[0]), row[11], row[12]
        if vmin <= 0:
            out.append(
                Diagnostic(
                    "error",
                    "nonpositive-vmin",
                    f"bus {bus_id}: Vmin = {vmin:g} but voltage lower bounds "
                    "must be strictly positive",
                )
            )
        elif vmin > vmax:
            out.append(
                Diagnostic(
                    "error",
                    "inverted-voltage-bounds",
                    f"bus {bus_id}: Vmin = {vmin:g} exceeds Vmax = {vmax:g}",
                )
            )

    for i, row in enumerate(raw.gencost_table):
        model, ncost = int(row[0]), int(row[3])
        if model == COST_PIECEWISE:
            out.append(
                Diagnostic(
                    "error",
                    "unsupported-cost-model",
                    f"gencost row {i + 1}: piecewise-linear cost model is not supported",
                )
            )
        elif model != COST_POLYNOMIAL:
            out.append(
                Diagnostic(
                    "error",
                    "unsupported-cost-model",
                    f"gencost row {i + 1}: unknown cost model {model}",
                )
            )
        elif ncost > 3:
            out.append(
                Diagnostic(
                    "error",
                    "unsupported-cost-model",
                    f"gencost row {i + 1}: polynomial degree above quadratic "
                    f"(ncost = {ncost})",
                )
            )
        elif ncost >= 3 and row[4] < 0:
            out.append(
                Diagnostic(
                    "error",
                    "nonconvex-cost",
                    f"gencost row {i + 1}: negative quadratic coefficient {row[4]:g}",
                )
            )

    for i, row in enumerate(raw.gen_table):
        bus_id, status, pmax, pmin = int(row[0]), row[7], row[8], row[9]
        if status <= 0:
            continue
        if pmax < pmin:
            out.append(
                Diagnostic(
                    "error",
                    "inverted-active-limits",
                    f"gen {i + 1} at bus {bus_id}: Pmax = {pmax:g} < Pmin = {pmin:g}",
                )
            )
        elif pmax <= 0 and pmin < 0:
            out.append(
                Diagnostic(
                    "warning",
                    "dispatchable-load",
                    f"gen {i + 1} at bus {bus_id}: Pmax = {pmax:g}, Pmin = {pmin:g} "
                    "models a dispatchable load",
                )
            )
        if row[3] < row[4]:
            out.append(
                Diagnostic(
                    "error",
                    "inverted-reactive-limits",
                    f"gen {i + 1} at bus {bus_id}: Qmax = {row[3]:g} < Qmin = {row[4]:g}",
                )
            )

    for i, row in enumerate(raw.branch_table):
        if row[10] == 0:
            continue
        if row[5] == 0:
            out.append(
                Diagnostic(
                    "warning",
                    "unlimited-thermal-rating",
                    f"branch {i + 1} ({int(row[0])}-{int(row[1])}): rateA = 0, "
                    "thermal limit treated as absent",
                )
            )
        if row[8] == 0:
            out.append(
                Diagnostic(
                    "warning",
                    "nominal-tap",
                    f"branch {i + 1} ({int(row[0])}-{int(row[1])}): tap = 0 "
                    "treated as ratio 1",
                )
            )
        if row[2] == 0 and row[3] == 0:
            out.append(
                Diagnostic(
                    "error",
                    "zero-impedance",
                    f"branch {i + 1} ({int(row[0])}-{int(row[1])}): r = x = 0",
                )
            )

    return out


def serialize_case(raw: RawCase) -> str:
    """Write a RawCase back to case-file text (debug round trip only)."""
    lines = [f"function mpc = {raw.name or 'case'}"]
    lines.append(f"mpc.version = '{raw.version}';")
    lines.append(f"mpc.baseMVA = {raw.base_mva:.17g};")
    for section, table in (
        ("bus", raw.bus_table),
        ("gen", raw.gen_table),
        ("branch", raw.branch_table),
        ("gencost", raw.gencost_table),
    ):
        if table.size == 0 and section == "gencost":
            continue
        lines.append(f"mpc.{section} = [")
        for row in table:
            lines.append("\t" + "\t".join(f"{v:.17g}" for v in row) + ";")
        lines.append("];")
    return "\n".join(lines) + "\n"
