"""On-disk ingestion: NPY v1.0 containers, CSV matrices, log-prob files,
and the sample manifest that ties a dataset of dumps together.

The NPY contract is deliberately narrow. Only format version 1.0 is
accepted, the element type must be little-endian float32 or float64, the
layout must be row-major (fortran_order false), and the shape must be
exactly 2-D (1-D for log-prob vectors). Everything else is rejected with
the byte offset or row number of the violation.
"""

from __future__ import annotations

import ast
import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ManifestFormatError, MatrixFormatError, as_matrix

NPY_MAGIC = b"\x93NUMPY"
_SUPPORTED_DTYPES = {"<f4": np.float32, "<f8": np.float64}


def _read_npy_payload(path: Path) -> tuple[np.ndarray, tuple[int, ...]]:
    """Parse an NPY v1.0 file and return (flat float64 data, shape)."""
    raw = path.read_bytes()
    if len(raw) < 10:
        raise MatrixFormatError(f"{path}: truncated container, {len(raw)} bytes at offset 0, need at least 10")
    if raw[:6] != NPY_MAGIC:
        raise MatrixFormatError(f"{path}: bad magic bytes at offset 0, expected 93 4e 55 4d 50 59")
    major, minor = raw[6], raw[7]
    if (major, minor) != (1, 0):
        raise MatrixFormatError(f"{path}: unsupported format version {major}.{minor} at offset 6, only 1.0 is accepted")
    (header_len,) = struct.unpack("<H", raw[8:10])
    header_end = 10 + header_len
    if len(raw) < header_end:
        raise MatrixFormatError(f"{path}: header declares {header_len} bytes at offset 8 but the file ends early")
    try:
        header_text = raw[10:header_end].decode("latin-1")
        header = ast.literal_eval(header_text.strip())
    except (ValueError, SyntaxError) as exc:
        raise MatrixFormatError(f"{path}: malformed header dictionary at offset 10: {exc}") from exc
    if not isinstance(header, dict) or set(header) != {"descr", "fortran_order", "shape"}:
        raise MatrixFormatError(f"{path}: malformed header dictionary at offset 10, "
                                "expected keys descr, fortran_order, shape")

    descr = header["descr"]
    if descr not in _SUPPORTED_DTYPES:
        raise MatrixFormatError(f"{path}: unsupported element type {descr!r}, only '<f4' and '<f8' are accepted")
    if header["fortran_order"] is not False:
        raise MatrixFormatError(f"{path}: unsupported layout: fortran_order={header['fortran_order']!r}, "
                                "only row-major (fortran_order=False) is accepted")
    shape = header["shape"]
    if (not isinstance(shape, tuple)
            or not all(isinstance(n, int) and n >= 0 for n in shape)):
        raise MatrixFormatError(f"{path}: malformed shape {shape!r} in header")

    dtype = np.dtype(_SUPPORTED_DTYPES[descr])
    count = int(np.prod(shape, dtype=np.int64)) if shape else 1
    expected = count * dtype.itemsize
    actual = len(raw) - header_end
    if actual != expected:
        raise MatrixFormatError(f"{path}: data segment at offset {header_end} holds {actual} bytes, "
                                f"shape {shape} requires {expected}")
    data = np.frombuffer(raw, dtype=dtype, count=count, offset=header_end)
    return data.astype(np.float64), shape


def _check_finite(flat: np.ndarray, shape: tuple[int, ...], path: Path) -> None:
    finite = np.isfinite(flat)
    if not finite.all():
        idx = int(np.argmax(~finite))
        if len(shape) == 2 and shape[1] > 0:
            where = f"row {idx // shape[1]}, column {idx % shape[1]}"
        else:
            where = f"index {idx}"
        raise MatrixFormatError(f"{path}: non-finite value at {where}")


def _load_matrix_npy(path: Path) -> np.ndarray:
    flat, shape = _read_npy_payload(path)
    if len(shape) != 2:
        raise MatrixFormatError(f"{path}: expected a 2-D shape in the header, got {shape}")
    if shape[0] < 1 or shape[1] < 1:
        raise MatrixFormatError(f"{path}: matrix shape {shape} must have at least one row and one column")
    _check_finite(flat, shape, path)
    return flat.reshape(shape)


def _parse_csv_rows(path: Path) -> list[list[float]]:
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        # A single trailing newline is allowed; interior blanks are not.
        lines.pop()
    rows: list[list[float]] = []
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\r")
        if line == "":
            raise MatrixFormatError(f"{path}: blank line at row {lineno}")
        values = []
        for cell in line.split(","):
            try:
                value = float(cell)
            except ValueError as exc:
                raise MatrixFormatError(f"{path}: non-numeric cell {cell.strip()!r} at row {lineno}") from exc
            if not np.isfinite(value):
                raise MatrixFormatError(f"{path}: non-finite value at row {lineno}")
            values.append(value)
        rows.append(values)
    if not rows:
        raise MatrixFormatError(f"{path}: no data rows")
    return rows


def _load_matrix_csv(path: Path) -> np.ndarray:
    rows = _parse_csv_rows(path)
    width = len(rows[0])
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise MatrixFormatError(f"{path}: row {i} has {len(row)} cells, expected {width}")
    return np.array(rows, dtype=np.float64)


def load_matrix(path, format: str | None = None) -> np.ndarray:
    """Load a matrix from an NPY v1.0 or CSV file as 2-D float64.

    When format is None it is inferred from the file suffix. 32-bit NPY
    data is promoted to 64-bit on load.
    """
    path = Path(path)
    if format is None:
        suffix = path.suffix.lower()
        format = {".npy": "npy", ".csv": "csv"}.get(suffix)
        if format is None:
            raise MatrixFormatError(f"{path}: cannot infer format from suffix {suffix!r}, pass format='npy' or 'csv'")
    if format == "npy":
        matrix = _load_matrix_npy(path)
    elif format == "csv":
        matrix = _load_matrix_csv(path)
    else:
        raise MatrixFormatError(f"{path}: unknown format {format!r}, expected 'npy' or 'csv'")
    return as_matrix(matrix, name=str(path))


def save_matrix(path, X) -> None:
    """Write a matrix as an NPY v1.0 file with '<f8' elements, row-major.

    load_matrix(save_matrix(...)) round-trips 64-bit data bit-exactly.
    """
    X = as_matrix(X)
    path = Path(path)
    header = "{" + f"'descr': '<f8', 'fortran_order': False, 'shape': {X.shape}, " + "}"
    # Total of magic + version + length field + header must be a multiple
    # of 64; the header text is space-padded and newline-terminated.
    unpadded = 10 + len(header) + 1
    padding = (64 - unpadded % 64) % 64
    header_bytes = (header + " " * padding + "\n").encode("latin-1")
    with open(path, "wb") as fh:
        fh.write(NPY_MAGIC)
        fh.write(bytes([1, 0]))
        fh.write(struct.pack("<H", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(np.ascontiguousarray(X, dtype="<f8").tobytes())


def load_logprobs(path, format: str | None = None) -> np.ndarray:
    """Load a per-token log-probability vector from NPY (1-D) or CSV (one line).

    Values are natural-log probabilities, so every entry must be <= 0.
    """
    path = Path(path)
    if format is None:
        suffix = path.suffix.lower()
        format = {".npy": "npy", ".csv": "csv"}.get(suffix)
        if format is None:
            raise MatrixFormatError(f"{path}: cannot infer format from suffix {suffix!r}, pass format='npy' or 'csv'")
    if format == "npy":
        flat, shape = _read_npy_payload(path)
        if len(shape) != 1:
            raise MatrixFormatError(f"{path}: expected a 1-D log-prob vector, got shape {shape}")
        _check_finite(flat, shape, path)
        values = flat
    elif format == "csv":
        rows = _parse_csv_rows(path)
        if len(rows) != 1:
            raise MatrixFormatError(f"{path}: a log-prob CSV holds exactly one line, found {len(rows)}")
        values = np.array(rows[0], dtype=np.float64)
    else:
        raise MatrixFormatError(f"{path}: unknown format {format!r}, expected 'npy' or 'csv'")
    if values.size < 1:
        raise MatrixFormatError(f"{path}: log-prob vector is empty")
    if (values > 0).any():
        idx = int(np.argmax(values > 0))
        raise MatrixFormatError(f"{path}: log-probability at index {idx} is positive ({values[idx]!r})")
    return values


@dataclass(frozen=True)
class ManifestSample:
    """One hidden-state dump referenced by a manifest."""

    id: str
    matrix_path: Path
    length: int
    logprobs_path: Path | None


@dataclass(frozen=True)
class SampleManifest:
    """A dataset of dumps for one (model, dataset) pair."""

    model_label: str
    dataset_label: str
    samples: tuple[ManifestSample, ...]
    source: Path


_SAMPLE_KEYS = {"id", "matrix_path", "length", "logprobs_path"}


def load_manifest(path) -> SampleManifest:
    """Load and validate a manifest JSON file.

    Relative sample paths are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestFormatError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(payload, dict) or set(payload) != {"model", "dataset", "samples"}:
        raise ManifestFormatError(f"{path}: manifest must be an object with keys model, dataset, samples")
    if not isinstance(payload["model"], str) or not isinstance(payload["dataset"], str):
        raise ManifestFormatError(f"{path}: 'model' and 'dataset' must be strings")
    raw_samples = payload["samples"]
    if not isinstance(raw_samples, list) or not raw_samples:
        raise ManifestFormatError(f"{path}: 'samples' must be a non-empty list")

    base = path.parent
    seen: set[str] = set()
    samples = []
    for i, entry in enumerate(raw_samples):
        if not isinstance(entry, dict) or not _SAMPLE_KEYS.issuperset(entry) or not {"id", "matrix_path", "length"} <= set(entry):
            raise ManifestFormatError(f"{path}: sample {i} must be an object with keys id, matrix_path, "
                                      "length and optional logprobs_path")
        sid = entry["id"]
        if not isinstance(sid, str) or not sid:
            raise ManifestFormatError(f"{path}: sample {i} field 'id' must be a non-empty string")
        if sid in seen:
            raise ManifestFormatError(f"{path}: duplicate sample id {sid!r}")
        seen.add(sid)
        if not isinstance(entry["matrix_path"], str) or not entry["matrix_path"]:
            raise ManifestFormatError(f"{path}: sample {sid!r} field 'matrix_path' must be a non-empty string")
        length = entry["length"]
        if not isinstance(length, int) or isinstance(length, bool) or length < 1:
            raise ManifestFormatError(f"{path}: sample {sid!r} field 'length' must be an integer >= 1")
        lp = entry.get("logprobs_path")
        if lp is not None and (not isinstance(lp, str) or not lp):
            raise ManifestFormatError(f"{path}: sample {sid!r} field 'logprobs_path' must be a string or null")

        def resolve(p: str) -> Path:
            candidate = Path(p)
            return candidate if candidate.is_absolute() else base / candidate

        samples.append(ManifestSample(
            id=sid,
            matrix_path=resolve(entry["matrix_path"]),
            length=length,
            logprobs_path=None if lp is None else resolve(lp),
        ))
    return SampleManifest(
        model_label=payload["model"],
        dataset_label=payload["dataset"],
        samples=tuple(samples),
        source=path,
    )
