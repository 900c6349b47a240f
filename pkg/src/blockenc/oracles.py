"""Classical reference computations, used for verification and parameter reads.

Algorithm code never calls numpy's spectral routines on problem data
directly; it goes through a LoggedOracles instance so every report can show
exactly which classical facts the run consumed and why. Set
BLOCKENC_ORACLE_LOG=1 to echo reads to stderr.
"""

from __future__ import annotations

import os
import sys
from typing import List, Tuple

import numpy as np

from .core import ComplexMatrix
from .errors import RankDeficient, Singular
from .polytransform import SpectralDecomposition, hermitian_part


def eig_hermitian(a) -> SpectralDecomposition:
    """Ascending eigendecomposition with a reconstruction check."""
    h = hermitian_part(np.asarray(a, dtype=np.complex128))
    w, v = np.linalg.eigh(h)
    resid = np.linalg.norm((v * w) @ v.conj().T - h, 2)
    if resid > 1e-9 * max(1.0, np.linalg.norm(h, 2)):
        raise ArithmeticError(f"eigendecomposition residual {resid:.3e}")
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


def expm_hermitian(a, t: float) -> ComplexMatrix:
    """exp(-i t A) for Hermitian A."""
    dec = eig_hermitian(a)
    phases = np.exp(-1j * t * dec.eigenvalues)
    u = (dec.eigenvectors * phases) @ dec.eigenvectors.conj().T
    return ComplexMatrix.from_array(u)


def solve_least_squares(f, y) -> np.ndarray:
    mat = np.asarray(f, dtype=np.complex128)
    vec = np.asarray(y, dtype=np.complex128).reshape(-1)
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0 or s[0] == 0.0 or s[-1] < 1e-10 * s[0]:
        raise RankDeficient(
            f"smallest singular value {0.0 if s.size == 0 else s[-1]:.3e} "
            "is numerically zero"
        )
    sol, *_ = np.linalg.lstsq(mat, vec, rcond=None)
    return sol


def condition_number(a) -> float:
    s = np.linalg.svd(np.asarray(a, dtype=np.complex128), compute_uv=False)
    if s.size == 0 or s[-1] < 1e-14 * s[0] or s[-1] == 0.0:
        raise Singular("condition number diverges")
    return float(s[0] / s[-1])


class LoggedOracles:
    """Accessor that records every classical read with its justification."""

    def __init__(self) -> None:
        self.log: List[dict] = []

    def _note(self, op: str, why: str, shape: Tuple[int, ...]) -> None:
        entry = {"op": op, "why": why, "shape": list(int(s) for s in shape)}
        self.log.append(entry)
        if os.environ.get("BLOCKENC_ORACLE_LOG"):
            print(f"[oracle] {op} {shape} :: {why}", file=sys.stderr)

    def eig(self, a, why: str) -> SpectralDecomposition:
        arr = np.asarray(a)
        self._note("eig", why, arr.shape)
        return eig_hermitian(arr)

    def expm(self, a, t: float, why: str) -> ComplexMatrix:
        arr = np.asarray(a)
        self._note("expm", why, arr.shape)
        return expm_hermitian(arr, t)

    def lstsq(self, f, y, why: str) -> np.ndarray:
        arr = np.asarray(f)
        self._note("lstsq", why, arr.shape)
        return solve_least_squares(arr, y)

    def cond(self, a, why: str) -> float:
        arr = np.asarray(a)
        self._note("cond", why, arr.shape)
        return condition_number(arr)

    def svdvals(self, a, why: str) -> np.ndarray:
        arr = np.asarray(a)
        self._note("svdvals", why, arr.shape)
        return np.linalg.svd(np.asarray(arr, dtype=np.complex128), compute_uv=False)
