"""Price-path ingestion and CSV output for results and plot data.

All writers format floats with ``repr`` (shortest round-trip decimal) and use
``\\n`` line endings, so output is byte-for-byte reproducible.
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import os
from dataclasses import dataclass, fields
from datetime import datetime, timezone
from typing import Iterable, Mapping, Sequence

import numpy as np

from g3mlab.errors import (
    EmptyFile,
    EmptyPath,
    InvalidConfig,
    InvalidPrice,
    LengthMismatch,
    NonMonotoneTimestamps,
    ParseError,
)

@dataclass(frozen=True, eq=False)
class PricePath:
    """Timestamped, strictly positive external prices (quote units per base unit)."""

    times: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64)
        prices = np.asarray(self.prices, dtype=np.float64)
        if times.ndim != 1 or prices.ndim != 1 or len(times) != len(prices):
            raise LengthMismatch(f"times and prices must be 1-d of equal length, got {times.shape} and {prices.shape}")
        if len(prices) == 0:
            raise EmptyPath("price path has no observations")
        if not np.all(np.isfinite(prices) & (prices > 0)):
            bad = int(np.argmin(np.isfinite(prices) & (prices > 0)))
            raise InvalidPrice(f"prices must be positive and finite; index {bad} is {prices[bad]!r}")
        if len(times) > 1 and not np.all(np.diff(times) > 0):
            bad = int(np.argmin(np.diff(times) > 0)) + 1
            raise NonMonotoneTimestamps(f"timestamps must be strictly increasing; index {bad} is {times[bad]!r}")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "prices", prices)

    @classmethod
    def uniform(cls, prices: Sequence[float], dt: float = 1.0, t0: float = 0.0) -> "PricePath":
        prices = np.asarray(prices, dtype=np.float64)
        return cls(t0 + dt * np.arange(len(prices), dtype=np.float64), prices)

    def __len__(self) -> int:
        return len(self.prices)

    def __eq__(self, other):
        if not isinstance(other, PricePath):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(self.prices, other.prices)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _open_text(source, mode: str):
    """Return ``(stream, should_close)`` for a path or an already open stream."""
    if isinstance(source, (str, os.PathLike)):
        return open(source, mode, encoding="utf-8", newline=""), True
    return source, False


def _parse_time(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        pass
    text = token.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)  # raises ValueError
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def load_prices(source, format: str = "csv") -> PricePath:
    """Read a two-column ``timestamp,price`` CSV.

    ``source`` may be a filesystem path, a text stream, or a binary stream of
    UTF-8. A non-numeric first row is treated as a header. Blank lines and
    lines starting with ``#`` are ignored. Timestamps are integer/decimal
    seconds or ISO-8601 (naive values are taken as UTC).
    """
    if format != "csv":
        raise ValueError(f"unsupported price format {format!r}")
    stream, close = _open_text(source, "r")
    try:
        text = stream.read()
    finally:
        if close:
            stream.close()
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    if text.startswith("\ufeff"):
        text = text[1:]

    times: list[float] = []
    prices: list[float] = []
    first_row = True
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        cells = [c.strip() for c in next(csv.reader([stripped]))]
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns, found {len(cells)}", lineno)
        try:
            t = _parse_time(cells[0])
            price = float(cells[1])
        except ValueError:
            if first_row:
                first_row = False
                continue  # header
            raise ParseError(f"cannot parse row {stripped!r}", lineno) from None
        first_row = False
        if not (math.isfinite(price) and price > 0):
            raise ParseError(f"price must be positive and finite, got {cells[1]!r}", lineno)
        if not math.isfinite(t):
            raise ParseError(f"timestamp must be finite, got {cells[0]!r}", lineno)
        if times and t <= times[-1]:
            raise NonMonotoneTimestamps(f"line {lineno}: timestamp {cells[0]!r} does not increase")
        times.append(t)
        prices.append(price)
    if not prices:
        raise EmptyFile("no price observations found")
    return PricePath(np.array(times), np.array(prices))


def write_prices(path: PricePath, sink) -> None:
    stream, close = _open_text(sink, "w")
    try:
        stream.write("time,price\n")
        for t, s in zip(path.times, path.prices):
            stream.write(f"{_fmt(t)},{_fmt(s)}\n")
    finally:
        if close:
            stream.close()


@dataclass(frozen=True)
class ResultRow:
    tau: float
    p: float
    p_small: float
    V_T: float
    Psi_T: float
    psi_hat_T: float
    n_arb: int
    n_large: int
    n_small: int
    il_per_trade: float
    rel_err: float


RESULT_COLUMNS = tuple(f.name for f in fields(ResultRow))
_INT_COLUMNS = {"n_arb", "n_large", "n_small"}

RESULT_HEADER_COMMENT = (
    "# tau as a fraction; V_T, Psi_T, psi_hat_T and il_per_trade in quote units "
    "(divide Psi_T and psi_hat_T by 1e6 for the usual display); rel_err in percent"
)


@dataclass
class ResultTable:
    rows: list[ResultRow]

    @classmethod
    def from_results(cls, results: Iterable) -> "ResultTable":
        """Build a table from objects exposing the row attributes (e.g. ``SimResult``)."""
        return cls([ResultRow(**{name: getattr(r, name) for name in RESULT_COLUMNS}) for r in results])

    def __len__(self) -> int:
        return len(self.rows)


def write_results(table: ResultTable, sink) -> None:
    stream, close = _open_text(sink, "w")
    try:
        stream.write(RESULT_HEADER_COMMENT + "\n")
        stream.write(",".join(RESULT_COLUMNS) + "\n")
        for row in table.rows:
            cells = []
            for name in RESULT_COLUMNS:
                v = getattr(row, name)
                cells.append(f"{float(v):.1f}" if name == "rel_err" else _fmt(v))
            stream.write(",".join(cells) + "\n")
    finally:
        if close:
            stream.close()


def read_results(source) -> ResultTable:
    stream, close = _open_text(source, "r")
    try:
        lines = [ln for ln in stream.read().splitlines() if ln and not ln.startswith("#")]
    finally:
        if close:
            stream.close()
    if not lines:
        raise EmptyFile("no result header found")
    header = tuple(lines[0].split(","))
    if header != RESULT_COLUMNS:
        raise ParseError(f"unexpected columns {header!r}", 1)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        cells = line.split(",")
        if len(cells) != len(RESULT_COLUMNS):
            raise ParseError(f"expected {len(RESULT_COLUMNS)} columns, found {len(cells)}", lineno)
        values = {n: (int(c) if n in _INT_COLUMNS else float(c)) for n, c in zip(RESULT_COLUMNS, cells)}
        rows.append(ResultRow(**values))
    return ResultTable(rows)


def emit_plot_data(prices: PricePath, series: Mapping[str, Sequence[float]], sink, price_name: str = "price") -> None:
    """Write ``time,series,value`` long-format rows.

    The price path is always emitted under ``price_name``; at each time the
    series appear in sorted name order.
    """
    if prices is None or len(prices) == 0:
        raise EmptyFile("cannot emit plot data for an empty path")
    n = len(prices)
    columns = {price_name: prices.prices}
    for name, values in series.items():
        if name in columns:
            raise ValueError(f"duplicate series name {name!r}")
        arr = np.asarray(values, dtype=np.float64)
        if arr.shape != (n,):
            raise LengthMismatch(f"series {name!r} has length {len(arr)}, expected {n}")
        columns[name] = arr
    names = sorted(columns)
    stream, close = _open_text(sink, "w")
    try:
        buf = io.StringIO()
        buf.write("time,series,value\n")
        for i, t in enumerate(prices.times):
            ts = _fmt(t)
            for name in names:
                buf.write(f"{ts},{name},{_fmt(columns[name][i])}\n")
        stream.write(buf.getvalue())
    finally:
        if close:
            stream.close()


# Keys accepted in a sweep config section, with their parsers.
_SWEEP_KEYS = {
    "fee_bps": float,
    "tau": float,
    "p": float,
    "p_small": float,
    "seed": int,
    "alpha": float,
    "y0": float,
    "x0": float,
    "epsilon_rel": float,
}


def load_sweep_config(source) -> list[dict]:
    """Parse an INI-style sweep file into one keyword dict per section.

    Keys set in ``[DEFAULT]`` apply to every section. Each section must give
    exactly one of ``fee_bps`` or ``tau``.
    """
    parser = configparser.ConfigParser(interpolation=None)
    stream, close = _open_text(source, "r")
    try:
        parser.read_string(stream.read())
    except configparser.Error as exc:
        raise InvalidConfig(f"malformed sweep config: {exc}") from None
    finally:
        if close:
            stream.close()
    out = []
    for section in parser.sections():
        entry: dict = {}
        for key, raw in parser.items(section):
            if key not in _SWEEP_KEYS:
                raise InvalidConfig(f"[{section}] unknown key {key!r}")
            try:
                entry[key] = _SWEEP_KEYS[key](raw)
            except ValueError:
                raise InvalidConfig(f"[{section}] bad value for {key}: {raw!r}") from None
        if ("fee_bps" in entry) == ("tau" in entry):
            raise InvalidConfig(f"[{section}] give exactly one of fee_bps or tau")
        if "fee_bps" in entry:
            entry["tau"] = entry.pop("fee_bps") / 1e4
        out.append(entry)
    return out
