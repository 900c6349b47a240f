"""Matrix, vector, and dataset file formats.

Dense files are comma-separated rows; complex entries are written as Python
repr so a write/read cycle is bit-exact ("1.5", "0.25+0.5j", "-2.0-0.125j").
Sparse files start with a header line "coo <rows> <cols>" followed by
"i j re im" with 0-based indices; omitted entries are zero.
A vector is a matrix with a single row or column. Datasets hold one sample
per row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import ConfigError, NotNormalized, NotPowerOfTwoSamples


def _format_complex(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    if im == 0.0 and math.copysign(1.0, im) > 0:
        return repr(re)
    sign = "+" if (im > 0 or (im == 0.0 and math.copysign(1.0, im) > 0)) else "-"
    return f"{re!r}{sign}{abs(im)!r}j"


def _parse_complex(tok: str) -> complex:
    tok = tok.strip()
    if not tok:
        raise ConfigError("empty entry in matrix file")
    try:
        return complex(tok.replace(" ", ""))
    except ValueError as exc:
        raise ConfigError(f"cannot parse entry {tok!r}") from exc


def save_matrix(path: str, a) -> None:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    with open(path, "w", encoding="utf-8") as fh:
        for row in arr:
            fh.write(",".join(_format_complex(z) for z in row))
            fh.write("\n")


def save_matrix_coo(path: str, a) -> None:
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"coo {arr.shape[0]} {arr.shape[1]}\n")
        idx = np.argwhere(arr != 0)
        for i, j in idx:
            z = arr[i, j]
            fh.write(f"{i} {j} {float(z.real)!r} {float(z.imag)!r}\n")


def load_matrix(path: str) -> np.ndarray:
    """Load either format, sniffing the coo header."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh if ln.strip()]
    if not lines:
        raise ConfigError(f"{path}: empty matrix file")
    if lines[0].startswith("coo"):
        return _parse_coo(path, lines)
    rows = []
    width = None
    for ln in lines:
        row = [_parse_complex(tok) for tok in ln.split(",")]
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ConfigError(f"{path}: ragged rows ({len(row)} vs {width})")
        rows.append(row)
    return np.array(rows, dtype=np.complex128)


def _parse_coo(path: str, lines) -> np.ndarray:
    head = lines[0].split()
    if len(head) != 3:
        raise ConfigError(f"{path}: malformed coo header {lines[0]!r}")
    try:
        r, c = int(head[1]), int(head[2])
    except ValueError as exc:
        raise ConfigError(f"{path}: malformed coo header {lines[0]!r}") from exc
    if r <= 0 or c <= 0:
        raise ConfigError(f"{path}: nonpositive coo dimensions")
    out = np.zeros((r, c), dtype=np.complex128)
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 4:
            raise ConfigError(f"{path}: malformed coo line {ln!r}")
        i, j = int(parts[0]), int(parts[1])
        if not (0 <= i < r and 0 <= j < c):
            raise ConfigError(f"{path}: coo index ({i},{j}) out of bounds")
        out[i, j] = complex(float(parts[2]), float(parts[3]))
    return out


def load_vector(path: str) -> np.ndarray:
    arr = load_matrix(path)
    if arr.shape[0] == 1:
        return arr[0].copy()
    if arr.shape[1] == 1:
        return arr[:, 0].copy()
    raise ConfigError(f"{path}: expected a single-row or single-column vector, got {arr.shape}")


@dataclass(frozen=True)
class Dataset:
    """Sample matrix, one sample per row, plus a normalization marker.

    frobenius_normalized records that the total squared norm of all samples
    is 1, the precondition for the covariance construction.
    """

    samples: np.ndarray
    frobenius_normalized: bool

    @property
    def m(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[1]


def dataset_from_rows(rows, normalize: bool = False) -> Tuple[Dataset, float]:
    """Build a Dataset, optionally rescaling so sum_i ||x_i||^2 = 1.

    Returns (dataset, scale) where scale is the Frobenius norm divided out
    (1.0 when normalize is False).
    """
    arr = np.array(np.asarray(rows), dtype=np.complex128)
    if arr.ndim != 2:
        raise ConfigError("dataset must be 2-d (one sample per row)")
    scale = 1.0
    total = float(np.linalg.norm(arr))
    if normalize:
        if total == 0.0:
            raise NotNormalized("cannot normalize an all-zero dataset")
        scale = total
        arr = arr / total
        total = 1.0
    arr.flags.writeable = False
    return Dataset(samples=arr, frobenius_normalized=abs(total - 1.0) <= 1e-12), scale


def load_dataset(path: str, normalize: bool = False) -> Tuple[Dataset, float]:
    return dataset_from_rows(load_matrix(path), normalize=normalize)


def require_power_of_two_samples(ds: Dataset) -> None:
    m = ds.m
    if m < 1 or (m & (m - 1)) != 0:
        raise NotPowerOfTwoSamples(f"sample count {m} is not a power of two")
