"""
Result files: IDS curves as CSV plus a JSON sidecar, experiment reports as
JSON plus a CSV summary, fields as CSV or a compact binary dump, matrices as
coordinate CSV. Floats are written with 17 significant digits and JSON keys
sorted, so identical runs produce identical bytes.
"""

import csv
import json
import struct
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel

from idslab.core.errors import ConfigError
from idslab.core.logging import get_logger
from idslab.schemas.field import FieldOnGrid
from idslab.schemas.ids import IdsCurve
from idslab.schemas.operator import StiffnessMatrix

logger = get_logger("export")

FIELD_MAGIC = b"IDSF"
FIELD_VERSION = 1
_HEADER = struct.Struct("<4sHHII")


def fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if value is None:
        return ""
    return str(value)


def result_name(kind: str, dimension: int, n: Optional[int], seed: Optional[int], suffix: str) -> str:
    """{kind}-{d}d-n{n}-s{seed}.{suffix}"""
    return f"{kind}-{dimension}d-n{0 if n is None else n}-s{0 if seed is None else seed}.{suffix}"


def _dump_json(payload: Mapping[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=True)
    path.write_text(text + "\n", encoding="utf-8")


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])


def write_curve(curve: IdsCurve, out_dir: Union[str, Path], resolved: Mapping[str, Any]) -> Tuple[Path, Path]:
    """E,N,stderr rows and a sidecar with the curve metadata and the resolved run config."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = curve.metadata
    csv_path = out / result_name(meta.method, meta.dimension, meta.n, meta.seed, "csv")
    _write_rows(csv_path, ("E", "N", "stderr"), zip(curve.energies, curve.values, curve.stderr))
    sidecar = csv_path.with_suffix(".json")
    _dump_json({"metadata": meta.model_dump(mode="json"), "config": dict(resolved)}, sidecar)
    logger.debug("wrote %s", csv_path)
    return csv_path, sidecar


def write_report(
    kind: str,
    reports: Union[BaseModel, Sequence[BaseModel]],
    out_dir: Union[str, Path],
    dimension: int,
    n: Optional[int],
    seed: Optional[int],
    resolved: Mapping[str, Any],
    rows: Optional[List[Mapping[str, Any]]] = None,
    extra: Optional[Mapping[str, Any]] = None,
) -> List[Path]:
    """
    Full report JSON (with the resolved config and any `extra` keys) and, when
    rows are given, a CSV summary with one row per mapping.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    items = [reports] if isinstance(reports, BaseModel) else list(reports)
    json_path = out / result_name(kind, dimension, n, seed, "json")
    payload = {"reports": [item.model_dump(mode="json") for item in items], "config": dict(resolved)}
    payload.update(extra or {})
    _dump_json(payload, json_path)
    paths = [json_path]
    if rows:
        csv_path = json_path.with_suffix(".csv")
        header = list(rows[0].keys())
        _write_rows(csv_path, header, ([row[k] for k in header] for row in rows))
        paths.append(csv_path)
    return paths


def write_field_csv(field: FieldOnGrid, path: Union[str, Path]) -> Path:
    """One row per sample point: coordinates (box centred at 0) then value."""
    path = Path(path)
    axes = field.cell_centers()
    grids = np.meshgrid(*axes, indexing="ij")
    header = ["x", "y"][: field.dimension] + ["rho"]
    columns = [g.ravel() for g in grids] + [field.values.ravel()]
    _write_rows(path, header, zip(*columns))
    return path


def write_field_binary(field: FieldOnGrid, path: Union[str, Path]) -> Path:
    """16-byte header (magic, u16 version, u16 d, u32 m, u32 n) then float64 values, little-endian."""
    path = Path(path)
    n = field.n if field.n is not None else (field.extent_cells - 1) // 2
    header = _HEADER.pack(FIELD_MAGIC, FIELD_VERSION, field.dimension, field.mesh, n)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(header + np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    return path


def read_field_binary(path: Union[str, Path]) -> Tuple[Dict[str, int], np.ndarray]:
    """Header fields and the value array; the box extent is recovered from the payload size."""
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ConfigError(f"{path}: truncated field dump")
    magic, version, d, m, n = _HEADER.unpack_from(data)
    if magic != FIELD_MAGIC:
        raise ConfigError(f"{path}: not a field dump (magic {magic!r})")
    if version != FIELD_VERSION:
        raise ConfigError(f"{path}: unsupported field dump version {version}")
    values = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    side = int(round(values.size ** (1.0 / d))) if values.size else 0
    if side ** d != values.size or side % m:
        raise ConfigError(f"{path}: payload of {values.size} values is not an (m*extent)^d grid")
    header = {"version": version, "dimension": d, "mesh": m, "n": n, "extent_cells": side // m}
    return header, values.reshape((side,) * d).copy()


def write_matrix_coo(stiffness: StiffnessMatrix, path: Union[str, Path]) -> Path:
    """row,col,re,im for every stored entry."""
    path = Path(path)
    coo = stiffness.matrix.tocoo()
    data = coo.data.astype(complex)
    _write_rows(path, ("row", "col", "re", "im"), zip(coo.row, coo.col, data.real, data.imag))
    return path
