"""Matrix CSV, PGM image and JSON manifest I/O."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np


class MatrixFormatError(ValueError):
    pass


def read_matrix_csv(path) -> np.ndarray:
    """Read a headerless comma-separated numeric matrix, one row per line."""
    path = Path(path)
    rows = []
    width = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            try:
                row = [float(f) for f in fields]
            except ValueError:
                bad = next(f for f in fields if not _is_float(f))
                raise MatrixFormatError(f"{path}: line {lineno}: non-numeric field {bad.strip()!r}") from None
            if not all(np.isfinite(row)):
                raise MatrixFormatError(f"{path}: line {lineno}: NaN or Inf entry")
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise MatrixFormatError(
                    f"{path}: line {lineno}: expected {width} fields, found {len(row)}")
            rows.append(row)
    if not rows:
        raise MatrixFormatError(f"{path}: file is empty")
    return np.array(rows, dtype=np.float64)


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def write_matrix_csv(X, path) -> Path:
    """Write with shortest round-trip decimal representation (``repr`` of each float)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    path = Path(path)
    with open(path, "w") as fh:
        for row in X:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")
    return path


def read_vector_csv(path) -> np.ndarray:
    """A single row or a single column of numbers."""
    X = read_matrix_csv(path)
    if min(X.shape) != 1:
        raise MatrixFormatError(f"{path}: expected a single row or column, got shape {X.shape}")
    return X.ravel()


def write_pgm(X, path, maxval: int = 255) -> Path:
    """Plain (P2) grayscale image, min-max normalised; a constant matrix renders black."""
    X = np.asarray(X, dtype=np.float64)
    lo, hi = X.min(), X.max()
    scaled = np.zeros_like(X) if hi == lo else (X - lo) / (hi - lo)
    pixels = np.rint(scaled * maxval).astype(int)
    path = Path(path)
    with open(path, "w") as fh:
        fh.write(f"P2\n{X.shape[1]} {X.shape[0]}\n{maxval}\n")
        for row in pixels:
            fh.write(" ".join(str(p) for p in row) + "\n")
    return path


def read_pgm(path) -> np.ndarray:
    tokens = []
    with open(path) as fh:
        for line in fh:
            tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P2":
        raise MatrixFormatError(f"{path}: not a plain PGM (P2) file")
    width, height = int(tokens[1]), int(tokens[2])
    return np.array(tokens[4:4 + width * height], dtype=int).reshape(height, width)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_manifest(manifest: dict, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_jsonable(manifest), indent=2, sort_keys=True) + "\n")
    return path


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())
