"""Sparse SDPA text export (.dat-s) and a matching reader.

The exported problem is the standard SDPA pair over free variables x:

    minimize    c' x
    subject to  X = sum_i x_i F_i - F_0,   X positive semidefinite,

with X block diagonal. File layout (entries are 1-based, upper
triangle only, ``*``/``"`` lines are comments)::

    m                       number of variables
    nblocks                 number of blocks
    s_1 ... s_nblocks       block sizes, negative for diagonal blocks
    c_1 ... c_m             objective vector
    k b i j v               (F_k) block b entry (i, j) = v;  k = 0 is F_0

Mapping from a :class:`~conicopf.conic.ConicProgram` (after lowering,
so box bounds are inequality rows and rotated cones are plain
second-order cones): equalities become paired diagonal entries,
inequalities single diagonal entries, second-order cones arrow
matrices [[t, u'], [u, t I]] (rejected in strict mode), PSD blocks pass
through. The affine objective offset has no SDPA image and is written
as an ``*OFFSET`` comment, which the bundled reader restores.
"""

from __future__ import annotations

from dataclasses import dataclass

from .conic import ConicProgram, LinExpr


class UnsupportedCone(ValueError):
    """Strict mode forbids rewriting second-order cones as PSD blocks."""


def export_sdpa(program: ConicProgram, path, strict: bool = False) -> None:
    """Write the program to ``path`` in sparse SDPA format."""
    low = program.lower()
    if strict and low.soc_blocks:
        raise UnsupportedCone(
            f"{len(low.soc_blocks)} second-order cone(s) present and strict "
            "mode forbids the arrow-matrix rewrite"
        )

    m = low.n_var
    # blocks: one diagonal block for all linear rows, one arrow block per
    # SOC, then the PSD blocks
    n_lin = 2 * len(low.equalities) + len(low.inequalities)
    block_sizes: list[int] = []
    if n_lin:
        block_sizes.append(-n_lin)
    block_sizes.extend(len(b) for b in low.soc_blocks)
    block_sizes.extend(b.dim for b in low.psd_blocks)

    # entry lines, grouped: (matno, blk, i, j, value); 1-based indices
    entries: list[tuple[int, int, int, int, float]] = []

    def put(expr: LinExpr, blk: int, i: int, j: int, sign: float = 1.0):
        if expr.const != 0.0:
            entries.append((0, blk, i, j, -sign * expr.const))
        for var, coef in sorted(expr.terms.items()):
            if coef != 0.0:
                entries.append((var + 1, blk, i, j, sign * coef))

    blk = 0
    if n_lin:
        blk += 1
        pos = 0
        for expr in low.equalities:
            pos += 1
            put(expr, blk, pos, pos, +1.0)  # e >= 0
            pos += 1
            put(expr, blk, pos, pos, -1.0)  # -e >= 0
        for expr in low.inequalities:
            pos += 1
            put(expr, blk, pos, pos, -1.0)  # expr <= 0  <=>  -expr >= 0
    for soc in low.soc_blocks:
        blk += 1
        t, us = soc[0], soc[1:]
        put(t, blk, 1, 1)
        for d, u in enumerate(us, start=2):
            put(u, blk, 1, d)
            put(t, blk, d, d)
    for psd in low.psd_blocks:
        blk += 1
        for (p, q), expr in sorted(psd.entries.items()):
            put(expr, blk, p + 1, q + 1)

    with open(path, "w", encoding="ascii") as fh:
        fh.write('"sparse SDPA export\n')
        if low.objective.const != 0.0:
            fh.write(f"*OFFSET = {low.objective.const:.17g}\n")
        fh.write(f"{m}\n")
        fh.write(f"{len(block_sizes)}\n")
        fh.write(" ".join(str(s) for s in block_sizes) + "\n")
        obj = [0.0] * m
        for var, coef in low.objective.terms.items():
            obj[var] += coef
        fh.write(" ".join(f"{c:.17g}" for c in obj) + "\n")
        for matno, b, i, j, v in entries:
            fh.write(f"{matno} {b} {i} {j} {v:.17g}\n")


@dataclass
class SdpaProblem:
    """A parsed SDPA file, rebuilt as a linear + PSD conic program."""

    program: ConicProgram
    block_sizes: list[int]
    offset: float


def read_sdpa(path) -> SdpaProblem:
    """Parse a sparse SDPA file back into a solvable program.

    Diagonal blocks become scalar inequalities, matrix blocks PSD
    blocks. An ``*OFFSET`` comment, if present, is added back to the
    objective so round trips preserve objective values.
    """
    offset = 0.0
    tokens: list[str] = []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            stripped = line.strip()
            if stripped.startswith(('"', "*")):
                if stripped.startswith("*OFFSET"):
                    offset = float(stripped.split("=", 1)[1])
                continue
            tokens.extend(stripped.replace(",", " ").split())

    cursor = 0

    def take(count: int) -> list[str]:
        nonlocal cursor
        out = tokens[cursor : cursor + count]
        cursor += count
        return out

    m = int(take(1)[0])
    nblocks = int(take(1)[0])
    block_sizes = [int(t) for t in take(nblocks)]
    c = [float(t) for t in take(m)]

    program = ConicProgram()
    xs = [program.add_variable(f"x[{i}]") for i in range(m)]
    objective = LinExpr(const=offset)
    for i, coef in enumerate(c):
        objective = objective + coef * xs[i]
    program.add_objective_term(objective)

    # accumulate per-block affine entries: blocks[b][(i, j)] = expr
    blocks: list[dict[tuple[int, int], LinExpr]] = [dict() for _ in block_sizes]
    while cursor < len(tokens):
        matno, b, i, j = (int(t) for t in take(4))
        value = float(take(1)[0])
        key = (min(i, j) - 1, max(i, j) - 1)
        entry = blocks[b - 1].setdefault(key, LinExpr())
        addition = LinExpr(const=-value) if matno == 0 else value * xs[matno - 1]
        blocks[b - 1][key] = entry + addition

    for size, content in zip(block_sizes, blocks):
        if size < 0:
            for (i, j), expr in sorted(content.items()):
                if i != j:
                    raise ValueError(f"off-diagonal entry ({i},{j}) in diagonal block")
                program.add_inequality(-expr)  # expr >= 0
        else:
            program.add_psd_block(dict(content), size)

    return SdpaProblem(program=program, block_sizes=block_sizes, offset=offset)
