import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from g3mlab.data import (
    RESULT_COLUMNS,
    PricePath,
    ResultRow,
    ResultTable,
    emit_plot_data,
    load_prices,
    load_sweep_config,
    read_results,
    write_prices,
    write_results,
)
from g3mlab.errors import (
    EmptyFile,
    EmptyPath,
    InvalidConfig,
    InvalidPrice,
    LengthMismatch,
    NonMonotoneTimestamps,
    ParseError,
)


def test_load_with_header_comments_and_blanks():
    text = "# exported\ntimestamp,price\n\n0,100.5\n30,101\n60,99.25\n"
    path = load_prices(io.StringIO(text))
    np.testing.assert_array_equal(path.times, [0, 30, 60])
    np.testing.assert_array_equal(path.prices, [100.5, 101.0, 99.25])


def test_load_without_header_and_bytes_with_bom():
    raw = "﻿1,2.0\n2,3.0\n".encode("utf-8")
    path = load_prices(io.BytesIO(raw))
    assert len(path) == 2 and path.prices[1] == 3.0


def test_load_iso_timestamps():
    text = "time,price\n2019-01-01T00:00:00Z,3700\n2019-01-01T00:00:30,3701\n"
    path = load_prices(io.StringIO(text))
    assert path.times[1] - path.times[0] == 30.0
    assert path.times[0] == 1546300800.0


def test_load_from_file(tmp_path):
    f = tmp_path / "p.csv"
    f.write_text("t,s\n0,1\n1,2\n")
    assert load_prices(f) == load_prices(str(f))


@pytest.mark.parametrize(
    "text, line",
    [
        ("time,price\n0,100\n1,abc\n", 3),
        ("0,100\n1,-5\n", 2),
        ("0,100\n1,0\n", 2),
        ("0,100\n1,nan\n", 2),
        ("0,100\n1,2,3\n", 2),
        ("time,price\n0,100\n\nxx,100\n", 4),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ParseError) as info:
        load_prices(io.StringIO(text))
    assert info.value.line == line


def test_non_monotone_and_empty():
    with pytest.raises(NonMonotoneTimestamps):
        load_prices(io.StringIO("0,1\n0,2\n"))
    with pytest.raises(EmptyFile):
        load_prices(io.StringIO("time,price\n# nothing\n"))
    with pytest.raises(EmptyFile):
        load_prices(io.StringIO(""))


def test_price_path_validation():
    with pytest.raises(LengthMismatch):
        PricePath(np.arange(3.0), np.ones(2))
    with pytest.raises(EmptyPath):
        PricePath(np.array([]), np.array([]))
    with pytest.raises(InvalidPrice):
        PricePath(np.arange(2.0), np.array([1.0, 0.0]))
    with pytest.raises(NonMonotoneTimestamps):
        PricePath(np.array([0.0, 0.0]), np.ones(2))


@given(st.lists(st.floats(min_value=1e-6, max_value=1e9), min_size=1, max_size=50))
def test_price_roundtrip_exact(values):
    path = PricePath.uniform(values, 0.1, t0=1.5)
    buf = io.StringIO()
    write_prices(path, buf)
    assert load_prices(io.StringIO(buf.getvalue())) == path


def _row(**kw):
    base = dict(tau=0.003, p=1.0, p_small=0.0, V_T=1.5e6, Psi_T=123.456, psi_hat_T=120.0,
                n_arb=10, n_large=4, n_small=0, il_per_trade=12.3456, rel_err=-0.73)
    base.update(kw)
    return ResultRow(**base)


def test_results_roundtrip():
    table = ResultTable([_row(), _row(tau=0.0001, n_arb=3, rel_err=1.26)])
    buf = io.StringIO()
    write_results(table, buf)
    back = read_results(io.StringIO(buf.getvalue()))
    assert len(back) == 2
    for a, b in zip(table.rows, back.rows):
        for name in RESULT_COLUMNS:
            if name == "rel_err":  # written to one decimal
                assert getattr(b, name) == pytest.approx(getattr(a, name), abs=0.05)
            else:
                assert getattr(b, name) == getattr(a, name)


def test_results_layout():
    buf = io.StringIO()
    write_results(ResultTable([_row()]), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0].startswith("#")
    assert lines[1] == ",".join(RESULT_COLUMNS)
    assert lines[2].split(",")[-1] == "-0.7"
    assert len(lines) == 3


def test_empty_results_table_is_header_only():
    buf = io.StringIO()
    write_results(ResultTable([]), buf)
    assert len(buf.getvalue().splitlines()) == 2
    assert len(read_results(io.StringIO(buf.getvalue()))) == 0


def test_read_results_errors():
    with pytest.raises(EmptyFile):
        read_results(io.StringIO("# only a comment\n"))
    with pytest.raises(ParseError):
        read_results(io.StringIO("a,b\n1,2\n"))


def test_plot_data_long_format():
    path = PricePath.uniform([10.0, 11.0], 5.0)
    buf = io.StringIO()
    emit_plot_data(path, {"b": [1.0, 2.0], "a": [3.0, 4.0]}, buf)
    lines = buf.getvalue().splitlines()
    assert lines == [
        "time,series,value",
        "0.0,a,3.0", "0.0,b,1.0", "0.0,price,10.0",
        "5.0,a,4.0", "5.0,b,2.0", "5.0,price,11.0",
    ]


def test_plot_data_errors():
    path = PricePath.uniform([10.0, 11.0], 1.0)
    with pytest.raises(LengthMismatch):
        emit_plot_data(path, {"a": [1.0]}, io.StringIO())
    with pytest.raises(ValueError):
        emit_plot_data(path, {"price": [1.0, 2.0]}, io.StringIO())
    with pytest.raises(EmptyFile):
        emit_plot_data(None, {}, io.StringIO())


def test_sweep_config():
    text = """
[DEFAULT]
p = 1.0
seed = 3

[low]
fee_bps = 1
p_small = 1

[high]
tau = 0.003
"""
    entries = load_sweep_config(io.StringIO(text))
    assert entries[0] == {"p": 1.0, "seed": 3, "p_small": 1.0, "tau": 0.0001}
    assert entries[1] == {"p": 1.0, "seed": 3, "tau": 0.003}


@pytest.mark.parametrize(
    "text",
    [
        "[a]\nfee_bps = 1\ntau = 0.1\n",
        "[a]\np = 1\n",
        "[a]\nfee_bps = 1\ncolour = red\n",
        "[a]\nfee_bps = one\n",
        "no section header\n",
    ],
)
def test_sweep_config_errors(text):
    with pytest.raises(InvalidConfig):
        load_sweep_config(io.StringIO(text))
