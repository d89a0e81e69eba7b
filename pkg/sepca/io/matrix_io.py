"""
Matrix file formats

CSV: one matrix row per line, comma-separated decimals (written with 17
significant digits). Binary: magic b"SEPCA1", little-endian u64 p and u64 n,
then p * n little-endian float64 values in row-major order.
"""
import csv
import logging
import struct
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import ValidationError

from ..errors import MatrixIOError
from ..models.schemas import DataMatrix, MatrixFormat

logger = logging.getLogger(__name__)

MAGIC = b"SEPCA1"
HEADER = struct.Struct("<QQ")
HEADER_SIZE = len(MAGIC) + HEADER.size
FLOAT = np.dtype("<f8")

PathLike = Union[str, Path]


def detect_format(path: PathLike, reading: bool = True) -> MatrixFormat:
    """CSV by suffix; otherwise binary (sniffing the magic when reading)"""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return MatrixFormat.CSV
    if reading and path.exists():
        with open(path, "rb") as handle:
            if handle.read(len(MAGIC)) != MAGIC:
                return MatrixFormat.CSV
    return MatrixFormat.BINARY


def _as_matrix(values: np.ndarray, path: PathLike) -> DataMatrix:
    try:
        return DataMatrix(values=values)
    except ValidationError as e:
        raise MatrixIOError(e.errors()[0]["msg"], path=str(path)) from e


def read_csv(path: PathLike) -> DataMatrix:
    rows: List[List[float]] = []
    width: Optional[int] = None
    try:
        with open(path, newline="") as handle:
            for line_no, cells in enumerate(csv.reader(handle), start=1):
                if not cells or all(not cell.strip() for cell in cells):
                    continue
                if width is None:
                    width = len(cells)
                elif len(cells) != width:
                    raise MatrixIOError(f"row has {len(cells)} cells, expected {width}",
                                        path=str(path), line=line_no)
                row = []
                for column, cell in enumerate(cells, start=1):
                    try:
                        row.append(float(cell))
                    except ValueError:
                        raise MatrixIOError(f"non-numeric cell {cell.strip()!r} in column {column}",
                                            path=str(path), line=line_no) from None
                rows.append(row)
    except OSError as e:
        raise MatrixIOError(str(e), path=str(path)) from e
    if not rows:
        raise MatrixIOError("no data rows", path=str(path))
    return _as_matrix(np.array(rows, dtype=np.float64), path)


def write_csv(matrix: DataMatrix, path: PathLike) -> None:
    try:
        np.savetxt(path, matrix.values, fmt="%.17g", delimiter=",")
    except OSError as e:
        raise MatrixIOError(str(e), path=str(path)) from e


def read_binary(path: PathLike) -> DataMatrix:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise MatrixIOError(str(e), path=str(path)) from e

    if len(data) < HEADER_SIZE:
        raise MatrixIOError(f"truncated header ({len(data)} of {HEADER_SIZE} bytes)",
                            path=str(path), offset=len(data))
    if data[:len(MAGIC)] != MAGIC:
        raise MatrixIOError("bad magic, expected SEPCA1", path=str(path), offset=0)
    p, n = HEADER.unpack_from(data, len(MAGIC))
    if p == 0 or n == 0:
        raise MatrixIOError(f"empty matrix shape {p}x{n}", path=str(path), offset=len(MAGIC))

    expected = HEADER_SIZE + p * n * FLOAT.itemsize
    if len(data) < expected:
        raise MatrixIOError(f"truncated data: {p}x{n} needs {expected} bytes, file has {len(data)}",
                            path=str(path), offset=len(data))
    if len(data) > expected:
        raise MatrixIOError(f"{len(data) - expected} trailing bytes after the data",
                            path=str(path), offset=expected)
    values = np.frombuffer(data, dtype=FLOAT, count=p * n, offset=HEADER_SIZE)
    return _as_matrix(values.reshape(p, n).astype(np.float64), path)


def write_binary(matrix: DataMatrix, path: PathLike) -> None:
    try:
        with open(path, "wb") as handle:
            handle.write(MAGIC)
            handle.write(HEADER.pack(matrix.rows, matrix.cols))
            handle.write(np.ascontiguousarray(matrix.values, dtype=FLOAT).tobytes())
    except OSError as e:
        raise MatrixIOError(str(e), path=str(path)) from e


def read_matrix(path: PathLike, fmt: Optional[MatrixFormat] = None) -> DataMatrix:
    """Read a matrix in the given (or detected) format"""
    if fmt is None:
        try:
            fmt = detect_format(path)
        except OSError as e:
            raise MatrixIOError(str(e), path=str(path)) from e
    matrix = read_csv(path) if MatrixFormat(fmt) == MatrixFormat.CSV else read_binary(path)
    logger.debug("read %dx%d matrix from %s", matrix.rows, matrix.cols, path)
    return matrix


def write_matrix(matrix: DataMatrix, path: PathLike, fmt: Optional[MatrixFormat] = None) -> None:
    """Write a matrix; the format defaults from the file suffix"""
    fmt = MatrixFormat(fmt) if fmt is not None else detect_format(path, reading=False)
    if fmt == MatrixFormat.CSV:
        write_csv(matrix, path)
    else:
        write_binary(matrix, path)
    logger.debug("wrote %dx%d matrix to %s", matrix.rows, matrix.cols, path)
