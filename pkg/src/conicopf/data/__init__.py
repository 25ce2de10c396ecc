"""Bundled benchmark data: desk-scale case files and reference bounds.

The ``cases`` directory carries a subset of the PGLib-OPF v19.05
archive (CC BY 4.0, see ``cases/LICENSE``);
``reference_upper_bounds.csv`` holds locally-optimal AC objective
values for the full 60-case benchmark, used as gap denominators.
"""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path


def data_dir() -> Path:
    return Path(resources.files(__package__))


def case_dir() -> Path:
    return data_dir() / "cases"


def bundled_cases() -> list[Path]:
    return sorted(case_dir().glob("*.m"))


def bundled_case(name: str) -> Path:
    """Locate a bundled case by any reasonable spelling of its name."""
    stem = case_key(name)
    path = case_dir() / f"pglib_opf_{stem}.m"
    if not path.exists():
        raise FileNotFoundError(f"no bundled case {name!r} (looked for {path.name})")
    return path


def case_key(name) -> str:
    """Normalize a case path or name to the short key used in tables."""
    stem = Path(name).stem
    if stem.startswith("pglib_opf_"):
        stem = stem[len("pglib_opf_"):]
    return stem


def load_upper_bounds(path=None) -> dict[str, tuple[float, str]]:
    """Read a reference upper-bound table: case key -> (value, note)."""
    if path is None:
        path = data_dir() / "reference_upper_bounds.csv"
    out: dict[str, tuple[float, str]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[case_key(row["case"])] = (float(row["upper_bound"]), row.get("note", ""))
    return out
