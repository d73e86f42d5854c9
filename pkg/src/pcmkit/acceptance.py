"""ATI-based PCM acceptance against tabulated error-quantile estimates."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional

from .core import Pcm
from .indices import compute_ati
from .stats import summarize_classes

__all__ = [
    "QuantileRow",
    "QuantileTable",
    "AcceptanceVerdict",
    "UnsupportedOrderError",
    "builtin_table",
    "locate_class",
    "assess_pcm",
    "table_from_records",
    "read_table",
    "write_table",
]

BUILTIN_DATA_SHA256 = "bcfa8b548bf55758ea4842484c1cea528be8b9f971dd556dd55ac8b0a3be3b32"

# Printed mean in the n=7 GM table, first class, contradicts its own q90;
# kept verbatim but flagged so the engine never uses it.
_SUSPECT_MEANS = {(7, "GM", 1)}

QUANTILE_CHOICES = ("q10", "median", "q90")


class UnsupportedOrderError(ValueError):
    """No builtin table for this matrix order."""


@dataclass(frozen=True)
class QuantileRow:
    class_index: int  # 1-based
    class_lo: float
    class_hi: float  # inf for the last class
    mean_ati: float
    q10: float
    median: float
    q90: float
    mean_err: float
    suspect_mean: bool = False


@dataclass(frozen=True)
class QuantileTable:
    """Per-ATI-class error statistics for one (order, method, loss) setting."""

    n: int
    method: str  # "REV" or "GM"
    loss: str  # "RE" for the builtin data, "AE" or "RE" for user tables
    rows: tuple

    def __post_init__(self):
        if self.method not in ("REV", "GM"):
            raise ValueError("method must be 'REV' or 'GM'")
        rows = tuple(self.rows)
        if not rows:
            raise ValueError("table needs at least one class row")
        if rows[0].class_lo != 0.0:
            raise ValueError("first class must start at 0")
        if rows[-1].class_hi != float("inf"):
            raise ValueError("last class must be unbounded above")
        for prev, cur in zip(rows, rows[1:]):
            if cur.class_lo <= prev.class_lo:
                raise ValueError("class lower bounds must be strictly increasing")
        for row in rows:
            if not row.q10 <= row.median <= row.q90:
                raise ValueError(f"row {row.class_index}: quantiles out of order")
        object.__setattr__(self, "rows", rows)


@dataclass(frozen=True)
class AcceptanceVerdict:
    ati: float
    class_index: int
    estimated_q10: float
    estimated_median: float
    estimated_q90: float
    estimated_mean: Optional[float]
    threshold: float
    quantile_choice: str
    accepted: bool


def _load_builtin() -> dict:
    data = resources.files("pcmkit.data").joinpath("appendix_tables.csv").read_bytes()
    digest = hashlib.sha256(data).hexdigest()
    if digest != BUILTIN_DATA_SHA256:
        raise RuntimeError(f"builtin table data corrupted (sha256 {digest})")
    tables: dict = {}
    lines = data.decode().splitlines()
    for line in lines[1:]:
        n_s, method, lo, hi, mean_ati, q10, med, q90, mean_err = line.split(",")
        key = (int(n_s), method)
        rows = tables.setdefault(key, [])
        idx = len(rows) + 1
        rows.append(
            QuantileRow(
                class_index=idx,
                class_lo=float(lo),
                class_hi=float(hi),
                mean_ati=float(mean_ati),
                q10=float(q10),
                median=float(med),
                q90=float(q90),
                mean_err=float(mean_err),
                suspect_mean=(key[0], key[1], idx) in _SUSPECT_MEANS,
            )
        )
    return {
        key: QuantileTable(n=key[0], method=key[1], loss="RE", rows=tuple(rows))
        for key, rows in tables.items()
    }


_BUILTIN_CACHE: dict = {}


def builtin_table(n: int, method: str) -> QuantileTable:
    """Verbatim appendix data (relative-error loss) for n in 4..7."""
    if method not in ("REV", "GM"):
        raise ValueError("method must be 'REV' or 'GM'")
    if not _BUILTIN_CACHE:
        _BUILTIN_CACHE.update(_load_builtin())
    try:
        return _BUILTIN_CACHE[(n, method)]
    except KeyError:
        raise UnsupportedOrderError(
            f"no builtin table for n={n}; generate a custom one with "
            f"run_msobe_sf + table_from_records (CLI: `simulate msobe` then `report`)"
        ) from None


def locate_class(table: QuantileTable, ati: float) -> int:
    """1-based index of the half-open class interval containing the ATI value."""
    if ati < 0:
        raise ValueError("ati must be nonnegative")
    for row in table.rows[:-1]:
        if row.class_lo <= ati < row.class_hi:
            return row.class_index
    return table.rows[-1].class_index


def assess_pcm(
    pcm: Pcm,
    method: str,
    threshold: float,
    quantile_choice: str = "q90",
    table: Optional[QuantileTable] = None,
) -> AcceptanceVerdict:
    """Accept the PCM iff the chosen error quantile at its ATI class is within threshold.

    The default q90 choice guards against accepting a bad matrix; it is a
    policy default, not a statistical necessity.
    """
    if quantile_choice not in QUANTILE_CHOICES:
        raise ValueError(f"quantile_choice must be one of {QUANTILE_CHOICES}")
    if threshold <= 0 and threshold != 0:
        raise ValueError("threshold must be nonnegative")
    if table is None:
        table = builtin_table(pcm.n, method)
    if table.n != pcm.n:
        raise ValueError(f"table is for n={table.n} but the PCM has order {pcm.n}")
    ati = compute_ati(pcm)
    row = table.rows[locate_class(table, ati) - 1]
    chosen = getattr(row, quantile_choice)
    return AcceptanceVerdict(
        ati=ati,
        class_index=row.class_index,
        estimated_q10=row.q10,
        estimated_median=row.median,
        estimated_q90=row.q90,
        estimated_mean=None if row.suspect_mean else row.mean_err,
        threshold=threshold,
        quantile_choice=quantile_choice,
        accepted=bool(chosen <= threshold),
    )


def table_from_records(records, n: int, method: str, loss: str = "RE", n_classes: int = 15) -> QuantileTable:
    """Build a QuantileTable from a simulation database (ATI binning)."""
    error = f"{loss.lower()}_{method.lower()}"
    rows = []
    for summary in summarize_classes(records, "ati", error, n_classes):
        if summary.count == 0:
            raise ValueError(f"class {summary.class_index} is empty; use more records")
        rows.append(
            QuantileRow(
                class_index=summary.class_index,
                class_lo=summary.lower,
                class_hi=summary.upper,
                mean_ati=summary.mean_index_value,
                q10=summary.q10,
                median=summary.median,
                q90=summary.q90,
                mean_err=summary.mean_error,
            )
        )
    return QuantileTable(n=n, method=method, loss=loss.upper(), rows=tuple(rows))


_TABLE_HEADER = "n,method,class_lo,class_hi,mean_ati,q10,median,q90,mean_err"


def write_table(table: QuantileTable, path) -> None:
    lines = [_TABLE_HEADER]
    for row in table.rows:
        hi = "inf" if row.class_hi == float("inf") else f"{row.class_hi:.8g}"
        lines.append(
            f"{table.n},{table.method},{row.class_lo:.8g},{hi},{row.mean_ati:.8g},"
            f"{row.q10:.8g},{row.median:.8g},{row.q90:.8g},{row.mean_err:.8g}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path, loss: str = "RE") -> QuantileTable:
    lines = Path(path).read_text().splitlines()
    if not lines or lines[0] != _TABLE_HEADER:
        raise ValueError(f"{path}: not a quantile table (bad header)")
    rows = []
    n = method = None
    for line in lines[1:]:
        if not line.strip():
            continue
        n_s, meth, lo, hi, mean_ati, q10, med, q90, mean_err = line.split(",")
        n, method = int(n_s), meth
        rows.append(
            QuantileRow(
                class_index=len(rows) + 1,
                class_lo=float(lo),
                class_hi=float(hi),
                mean_ati=float(mean_ati),
                q10=float(q10),
                median=float(med),
                q90=float(q90),
                mean_err=float(mean_err),
            )
        )
    if n is None:
        raise ValueError(f"{path}: empty quantile table")
    return QuantileTable(n=n, method=method, loss=loss, rows=tuple(rows))
