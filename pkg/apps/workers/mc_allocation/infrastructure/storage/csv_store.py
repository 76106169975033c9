"""CSV outputs and their `<file>.meta.json` provenance sidecars.

Floats are written with repr precision and no timestamps are recorded, so a
rerun with the same inputs reproduces every file byte for byte.
"""
from __future__ import annotations

import csv
import json
import logging
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from pydantic import BaseModel

from mc_allocation.domain.errors import StorageError
from mc_allocation.domain.values import Allocation, AllocationMode, MonteCarloState, PValueSet

logger = logging.getLogger(__name__)

PVALUE_HEADER = ("index", "p_value")
CONTINUOUS_HEADER = ("index", "p_value", "k_continuous")
DISCRETE_HEADER = ("index", "p_value", "k_discrete")
THOMPSON_HEADER = ("index", "k_discrete", "s", "p_hat_plus_one", "p_hat_raw")
CONVERGENCE_HEADER = ("K", "q05", "q50", "q95")
PROFILE_HEADER = ("k", "g_i")


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    return str(value)


def _json_cell(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    return value


def metadata_path(path: Path | str) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".meta.json")


def write_rows(path: Path | str, header: Sequence[str], rows: Iterable[Sequence[Any]], fmt: str = "csv") -> Path:
    """Write a table as CSV, or as a JSON list of row objects when `fmt` is "json"."""
    path = Path(path)
    if fmt == "json":
        return write_json(path, [dict(zip(header, (_json_cell(v) for v in row))) for row in rows])
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            count = 0
            for row in rows:
                writer.writerow([_cell(v) for v in row])
                count += 1
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc.strerror or exc}") from exc
    logger.debug("csv written", extra={"path": str(path), "rows": count})
    return path


def read_rows(path: Path | str, required: Sequence[str]) -> list[dict[str, str]]:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in required if c not in (reader.fieldnames or [])]
            if missing:
                raise StorageError(f"{path}: missing column(s) {', '.join(missing)}")
            return list(reader)
    except OSError as exc:
        if isinstance(exc, StorageError):
            raise
        raise StorageError(f"cannot read {path}: {exc.strerror or exc}") from exc


def write_json(path: Path | str, payload: BaseModel | Sequence[Any] | dict) -> Path:
    path = Path(path)
    if isinstance(payload, BaseModel):
        data: Any = payload.model_dump(mode="json", by_alias=True)
    elif isinstance(payload, dict):
        data = payload
    else:
        data = [item.model_dump(mode="json", by_alias=True) if isinstance(item, BaseModel) else item for item in payload]
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path


def write_metadata(path: Path | str, provenance: BaseModel) -> Path:
    """Sidecar next to `path` holding the provenance of that file."""
    return write_json(metadata_path(path), provenance)


# --- p-values -------------------------------------------------------------------

def write_pvalues(path: Path | str, p: PValueSet | np.ndarray, fmt: str = "csv") -> Path:
    values = p.values if isinstance(p, PValueSet) else np.asarray(p, dtype=np.float64)
    return write_rows(path, PVALUE_HEADER, ((i + 1, float(v)) for i, v in enumerate(values)), fmt)


def _parse_float(row: dict[str, str], column: str, path: Path | str, line: int) -> float:
    try:
        return float(row[column])
    except (TypeError, ValueError) as exc:
        raise StorageError(f"{path}:{line}: column {column!r} is not a number") from exc


def _by_index(path: Path | str, rows: list[dict[str, str]], column: str) -> np.ndarray:
    parsed = sorted(
        ((int(_parse_float(r, "index", path, n + 2)), _parse_float(r, column, path, n + 2)) for n, r in enumerate(rows)),
        key=lambda t: t[0],
    )
    return np.array([v for _, v in parsed], dtype=np.float64)


def read_pvalues(path: Path | str) -> np.ndarray:
    """p-values ordered by their `index` column."""
    rows = read_rows(path, PVALUE_HEADER)
    if not rows:
        raise StorageError(f"{path}: no p-values")
    return _by_index(path, rows, "p_value")


# --- allocations ----------------------------------------------------------------

def write_allocation(path: Path | str, p: PValueSet, allocation: Allocation, fmt: str = "csv") -> Path:
    if allocation.is_discrete:
        header = DISCRETE_HEADER
        budgets: list[int] | list[float] = [int(k) for k in allocation.budgets]
    else:
        header = CONTINUOUS_HEADER
        budgets = [float(k) for k in allocation.budgets]
    rows = ((i + 1, float(v), k) for i, (v, k) in enumerate(zip(p.values, budgets)))
    return write_rows(path, header, rows, fmt)


def read_allocation(path: Path | str) -> Allocation:
    """Allocation from any CSV with `index` and a `k_discrete` or `k_continuous` column."""
    rows = read_rows(path, ("index",))
    if not rows:
        raise StorageError(f"{path}: no rows")
    if "k_discrete" in rows[0]:
        column, mode = "k_discrete", AllocationMode.DISCRETE
    elif "k_continuous" in rows[0]:
        column, mode = "k_continuous", AllocationMode.CONTINUOUS
    else:
        raise StorageError(f"{path}: needs a k_discrete or k_continuous column")
    return Allocation(_by_index(path, rows, column), mode)


def write_allocation_table(path: Path | str, p: PValueSet, columns: dict[str, np.ndarray], fmt: str = "csv") -> Path:
    """One row per hypothesis, one column per named allocation."""
    header = ("index", "p_value", *columns)
    arrays = [np.asarray(c) for c in columns.values()]

    def rows():
        for i, v in enumerate(p.values):
            yield (i + 1, float(v), *(a[i].item() for a in arrays))

    return write_rows(path, header, rows(), fmt)


def write_thompson_state(path: Path | str, state: MonteCarloState, fmt: str = "csv") -> Path:
    rows = (
        (i + 1, int(k), int(s), float(q), float(raw))
        for i, (k, s, q, raw) in enumerate(zip(state.k, state.s, state.p_hat_plus_one(), state.p_hat_raw()))
    )
    return write_rows(path, THOMPSON_HEADER, rows, fmt)


# --- experiments ----------------------------------------------------------------

def write_convergence(path: Path | str, points: Sequence[Any], fmt: str = "csv") -> Path:
    return write_rows(path, CONVERGENCE_HEADER, ((pt.budget, pt.q05, pt.q50, pt.q95) for pt in points), fmt)


def write_profile(path: Path | str, profile: Sequence[tuple[int, float]], fmt: str = "csv") -> Path:
    return write_rows(path, PROFILE_HEADER, profile, fmt)
