"""Case-file decoding, validation diagnostics and the debug round trip."""

import numpy as np
import pytest

from conicopf.data import bundled_case, bundled_cases
from conicopf.matpower import (
    DuplicateBusId,
    MalformedRow,
    MissingSection,
    NoReferenceBus,
    parse_case,
    parse_case_file,
    serialize_case,
    validate_case,
)

TINY = """\
function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 100;
%% bus data
mpc.bus = [
\t1\t3\t0\t0\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9;
\t2\t1\t30\t10\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9;
];
mpc.gen = [
\t1\t0\t0\t90\t-90\t1\t100\t1\t100\t0;
];
mpc.gencost = [
\t2\t0\t0\t3\t0.11\t5\t0;
];
mpc.branch = [
\t1\t2\t0.01\t0.1\t0.02\t50\t0\t0\t0\t0\t1\t-30\t30;
];
"""


def test_minimal_case_counts():
    raw = parse_case(TINY)
    assert (raw.n_bus, raw.n_gen, raw.n_branch) == (2, 1, 1)
    assert raw.base_mva == 100.0
    assert raw.name == "tiny"


def test_gencost_row_decodes_polynomial():
    raw = parse_case(TINY)
    model, startup, shutdown, ncost, c2, c1, c0 = raw.gencost_table[0]
    assert model == 2 and ncost == 3
    assert (c2, c1, c0) == (0.11, 5.0, 0.0)


def test_missing_bus_matrix():
    text = TINY.replace("mpc.bus", "mpc.notbus")
    with pytest.raises(MissingSection):
        parse_case(text)


def test_missing_gencost_is_empty_table():
    text = TINY.replace("mpc.gencost", "mpc.ignored")
    raw = parse_case(text)
    assert raw.gencost_table.shape[0] == 0


def test_non_numeric_token():
    with pytest.raises(MalformedRow):
        parse_case(TINY.replace("0.01", "abc"))


def test_ragged_row():
    text = TINY.replace("\t2\t1\t30\t10\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9;",
                        "\t2\t1\t30\t10\t0\t0\t1\t1\t0\t230\t1\t1.1\t0.9\t0;")
    with pytest.raises(MalformedRow):
        parse_case(text)


def test_duplicate_bus_id():
    text = TINY.replace("\t2\t1\t30", "\t1\t1\t30")
    with pytest.raises(DuplicateBusId):
        parse_case(text)


def test_reference_bus_required():
    with pytest.raises(NoReferenceBus):
        parse_case(TINY.replace("\t1\t3\t0", "\t1\t1\t0"))
    with pytest.raises(NoReferenceBus):
        parse_case(TINY.replace("\t2\t1\t30", "\t2\t3\t30"))


def test_unknown_bus_reference_rejected():
    with pytest.raises(MalformedRow):
        parse_case(TINY.replace("mpc.branch = [\n\t1\t2", "mpc.branch = [\n\t1\t7"))


def test_embedded_scripting_rejected():
    with pytest.raises(MalformedRow):
        parse_case(TINY + "mpc.bus(1,3) = 4;\n")


def test_extra_trailing_columns_preserved():
    text = TINY.replace(
        "\t1\t2\t0.01\t0.1\t0.02\t50\t0\t0\t0\t0\t1\t-30\t30;",
        "\t1\t2\t0.01\t0.1\t0.02\t50\t0\t0\t0\t0\t1\t-30\t30\t99\t98;",
    )
    raw = parse_case(text)
    assert raw.branch_table.shape[1] == 15
    assert raw.branch_table[0, 13] == 99


class TestValidation:
    def test_nonpositive_vmin_is_error(self):
        raw = parse_case(TINY.replace("1.1\t0.9", "1.1\t0.0"))
        codes = [d.code for d in validate_case(raw) if d.is_error]
        assert "nonpositive-vmin" in codes

    def test_inverted_voltage_bounds(self):
        raw = parse_case(TINY.replace("\t1.1\t0.9", "\t0.8\t0.9"))
        codes = [d.code for d in validate_case(raw) if d.is_error]
        assert "inverted-voltage-bounds" in codes

    def test_zero_rate_is_warning(self):
        raw = parse_case(TINY.replace("0.02\t50", "0.02\t0"))
        diags = validate_case(raw)
        hits = [d for d in diags if d.code == "unlimited-thermal-rating"]
        assert hits and not hits[0].is_error
        assert "absent" in hits[0].message

    def test_nominal_tap_is_warning(self):
        raw = parse_case(TINY)
        assert any(d.code == "nominal-tap" for d in validate_case(raw))

    def test_piecewise_cost_is_error(self):
        raw = parse_case(TINY.replace("\t2\t0\t0\t3\t0.11", "\t1\t0\t0\t3\t0.11"))
        hits = [d for d in validate_case(raw) if d.code == "unsupported-cost-model"]
        assert hits and hits[0].is_error

    def test_dispatchable_load_flagged(self):
        raw = parse_case(TINY.replace("\t1\t100\t0;", "\t1\t0\t-30;"))
        assert any(d.code == "dispatchable-load" for d in validate_case(raw))

    def test_clean_case_has_no_errors(self):
        raw = parse_case(TINY)
        assert not [d for d in validate_case(raw) if d.is_error]


def test_round_trip_preserves_tables():
    raw = parse_case_file(bundled_case("case3_lmbd"))
    again = parse_case(serialize_case(raw))
    for attr in ("bus_table", "gen_table", "branch_table", "gencost_table"):
        assert np.array_equal(getattr(raw, attr), getattr(again, attr)), attr
    assert again.base_mva == raw.base_mva


def test_corpus_parses_totally():
    paths = bundled_cases()
    assert len(paths) >= 17
    for path in paths:
        raw = parse_case_file(path)
        assert raw.n_bus > 0
        errors = [d for d in validate_case(raw) if d.is_error]
        assert not errors, f"{path.name}: {errors}"
