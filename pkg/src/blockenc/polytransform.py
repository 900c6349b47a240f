"""Polynomial transforms of encoded operators.

The construction route for every polynomial here is Chebyshev interpolation
at Chebyshev nodes followed by truncation to the smallest degree meeting the
target accuracy on a dense validation grid. Transforms of Hermitian blocks
are evaluated by exact functional calculus on the eigendecomposition; the
resource ledger follows the repetition counts the corresponding circuit
routine would pay.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import chebyshev as _cheb

from .core import BlockEncoding, ComplexMatrix, ResourceCost
from .errors import (
    NotAdmissible,
    NotHermitian,
    NotPSD,
    SpectrumOutOfRange,
)

ADMISSIBLE_BOUND = 0.5
_GRID = np.linspace(-1.0, 1.0, 1001)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen- or singular-value data of a matrix.

    eigenvalues ascend; for singular triplets left_vectors holds U and
    eigenvectors holds V (columns), with eigenvalues the singular values.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    left_vectors: Optional[np.ndarray] = None


def hermitian_part(a: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Symmetrize within tol, raise NotHermitian beyond it."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise NotHermitian(f"matrix of shape {arr.shape} cannot be Hermitian")
    scale = max(1.0, float(np.linalg.norm(arr, 2))) if arr.size else 1.0
    gap = float(np.linalg.norm(arr - arr.conj().T, 2)) if arr.size else 0.0
    if gap > tol * scale:
        raise NotHermitian(f"anti-Hermitian part has norm {gap:.3e}")
    return 0.5 * (arr + arr.conj().T)


def decompose_hermitian(a) -> SpectralDecomposition:
    h = hermitian_part(np.asarray(a, dtype=np.complex128))
    w, v = np.linalg.eigh(h)
    return SpectralDecomposition(eigenvalues=w, eigenvectors=v)


@dataclass(frozen=True)
class ChebyshevPolynomial:
    """Truncated Chebyshev series on [-1, 1].

    sup_error is the measured deviation from the construction target on the
    validation grid; qsvt_admissible records whether max |P| stays at or
    below 1/2 there.
    """

    coefficients: Tuple[float, ...]
    degree: int
    sup_error: float
    qsvt_admissible: bool

    def evaluate(self, x):
        return _cheb.chebval(np.asarray(x, dtype=float), np.asarray(self.coefficients))

    def scaled(self, factor: float) -> "ChebyshevPolynomial":
        coeffs = tuple(c * factor for c in self.coefficients)
        vals = _cheb.chebval(_GRID, np.asarray(coeffs))
        return ChebyshevPolynomial(
            coefficients=coeffs,
            degree=self.degree,
            sup_error=self.sup_error * abs(factor),
            qsvt_admissible=bool(np.max(np.abs(vals)) <= ADMISSIBLE_BOUND + 1e-12),
        )

    def to_json(self, target: str = "", params: Optional[dict] = None) -> str:
        """Serialize; target and params describe what was approximated."""
        return json.dumps(
            {
                "basis": "chebyshev-T",
                "coeffs": list(self.coefficients),
                "degree": self.degree,
                "sup_error": self.sup_error,
                "qsvt_admissible": self.qsvt_admissible,
                "target": target,
                "params": dict(params or {}),
            }
        )

    @staticmethod
    def from_json(text: str) -> "ChebyshevPolynomial":
        d = json.loads(text)
        return ChebyshevPolynomial(
            coefficients=tuple(float(c) for c in d["coeffs"]),
            degree=int(d["degree"]),
            sup_error=float(d["sup_error"]),
            qsvt_admissible=bool(d["qsvt_admissible"]),
        )


def _make_poly(coef: np.ndarray, sup_error: float) -> ChebyshevPolynomial:
    coef = np.asarray(coef, dtype=float)
    deg = coef.shape[0] - 1
    while deg > 0 and coef[deg] == 0.0:
        deg -= 1
    coef = coef[: deg + 1]
    vals = _cheb.chebval(_GRID, coef)
    return ChebyshevPolynomial(
        coefficients=tuple(float(c) for c in coef),
        degree=deg,
        sup_error=float(sup_error),
        qsvt_admissible=bool(np.max(np.abs(vals)) <= ADMISSIBLE_BOUND + 1e-12),
    )


def chebyshev_fit(
    fn: Callable[[np.ndarray], np.ndarray],
    eps: float,
    *,
    parity: Optional[str] = None,
    max_degree: int = 1 << 14,
    grid_points: int = 10001,
) -> ChebyshevPolynomial:
    """Interpolate fn and truncate to the least degree with grid error <= eps.

    parity "even"/"odd" zeroes the complementary coefficients (the inputs
    this is used for are exactly symmetric, so those coefficients are
    roundoff already).
    """
    if not (eps > 0):
        raise ValueError("eps must be positive")
    xs = np.linspace(-1.0, 1.0, grid_points)
    target = np.asarray(fn(xs), dtype=float)

    deg = 32
    coef = None
    while True:
        coef = np.asarray(_cheb.chebinterpolate(fn, deg), dtype=float)
        if parity == "even":
            coef[1::2] = 0.0
        elif parity == "odd":
            coef[0::2] = 0.0
        full_err = float(np.max(np.abs(_cheb.chebval(xs, coef) - target)))
        if full_err <= eps / 4 or deg >= max_degree:
            break
        deg *= 2
    if full_err > eps:
        raise ValueError(
            f"degree cap {max_degree} cannot reach accuracy {eps:.3e} (best {full_err:.3e})"
        )

    # Least truncation via the coefficient tail bound, then polish on the grid.
    tail = np.cumsum(np.abs(coef[::-1]))[::-1]  # tail[k] = sum_{j>=k} |c_j|
    d = coef.shape[0] - 1
    for k in range(coef.shape[0]):
        rest = tail[k + 1] if k + 1 < coef.shape[0] else 0.0
        if full_err + rest <= eps:
            d = k
            break

    def grid_err(dd: int) -> float:
        return float(np.max(np.abs(_cheb.chebval(xs, coef[: dd + 1]) - target)))

    while d > 0 and grid_err(d - 1) <= eps:
        d -= 1
    while grid_err(d) > eps and d < coef.shape[0] - 1:
        d += 1
    return _make_poly(coef[: d + 1], grid_err(d))


def exp_decay_poly(beta: float, eps: float) -> ChebyshevPolynomial:
    """Uniform approximation of exp(-beta (1 - x)) on [-1, 1].

    The target reaches 1 at x = 1, so the result is not admissible as-is;
    callers rescale by 1/2 and compensate downstream. beta = 0 returns the
    exact constant.
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if not (0 < eps <= 0.5):
        raise ValueError("eps must lie in (0, 1/2]")
    if beta == 0.0:
        return ChebyshevPolynomial((1.0,), 0, 0.0, False)
    return chebyshev_fit(lambda x: np.exp(-beta * (1.0 - x)), eps)


def jacobi_anger_poly(
    t: float, eps: float
) -> Tuple[ChebyshevPolynomial, ChebyshevPolynomial]:
    """Even and odd parts of exp(-i t x): approximations of cos(tx), sin(tx).

    Each part meets eps/2 so the recombination error stays below eps.
    """
    if not (0 < eps <= 0.5):
        raise ValueError("eps must lie in (0, 1/2]")
    if t == 0.0:
        one = ChebyshevPolynomial((1.0,), 0, 0.0, False)
        zero = ChebyshevPolynomial((0.0,), 0, 0.0, True)
        return one, zero
    even = chebyshev_fit(lambda x: np.cos(t * x), eps / 2, parity="even")
    odd = chebyshev_fit(lambda x: np.sin(t * x), eps / 2, parity="odd")
    return even, odd


def step_degree_estimate(delta: float, eps: float) -> int:
    """Least degree approximating a 0/1 step outside the band (-delta, delta).

    The target jumps at 0; within the open band nothing is required. The
    estimate builds a tanh ramp of slope atanh(1 - eps/2)/delta, fits it,
    and truncates to the least degree whose worst exterior deviation from
    the step stays within eps.
    """
    if not (0 < delta):
        raise ValueError("delta must be positive")
    if not (0 < eps < 1):
        raise ValueError("eps must lie in (0, 1)")
    if delta >= 1.0:
        return 0 if eps >= 0.5 else 1

    xs = np.linspace(-1.0, 1.0, 4001)
    ext = np.abs(xs) >= delta
    xe = xs[ext]
    step = (xe > 0).astype(float)

    slope = math.atanh(min(1.0 - eps / 2, 1.0 - 1e-12)) / delta
    ramp = lambda x: 0.5 * (1.0 + np.tanh(slope * x))

    deg = 32
    while True:
        coef = np.asarray(_cheb.chebinterpolate(ramp, deg), dtype=float)
        err = float(np.max(np.abs(_cheb.chebval(xe, coef) - step)))
        if err <= eps * 0.5 or deg >= (1 << 14):
            break
        deg *= 2
    if err > eps:
        raise ValueError(f"could not meet eps {eps:.3e} outside band {delta:.3e}")

    def ext_err(dd: int) -> float:
        return float(np.max(np.abs(_cheb.chebval(xe, coef[: dd + 1]) - step)))

    lo, hi = 0, coef.shape[0] - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ext_err(mid) <= eps:
            hi = mid
        else:
            lo = mid + 1
    return int(lo)


def apply_polynomial(enc: BlockEncoding, poly: ChebyshevPolynomial) -> BlockEncoding:
    """Polynomial transform of a Hermitian stored block.

    The polynomial acts on the contraction block itself (the operator
    divided by alpha). Requires max |P| <= 1/2 on [-1, 1]; the transformed
    encoding has alpha 1, picks up the polynomial's sup_error plus the
    amplified input error 4 d sqrt(err/alpha), two more ancillas, d extra
    queries, and depth multiplied by the degree.
    """
    vals = poly.evaluate(_GRID)
    if float(np.max(np.abs(vals))) > ADMISSIBLE_BOUND + 1e-9:
        raise NotAdmissible(
            f"polynomial peaks at {float(np.max(np.abs(vals))):.6g} > 1/2 on [-1, 1]"
        )
    h = hermitian_part(enc.block.entries)
    w, v = np.linalg.eigh(h)
    fw = poly.evaluate(np.clip(w, -1.0, 1.0))
    blk = (v * fw) @ v.conj().T
    d = max(poly.degree, 1)
    err = 4.0 * d * math.sqrt(max(enc.error, 0.0) / enc.alpha) + poly.sup_error
    cost = ResourceCost(
        depth=d * max(enc.cost.depth, 1.0),
        ancillas=enc.cost.ancillas + 2,
        queries=enc.cost.queries + d,
        classical_preprocessing=enc.cost.classical_preprocessing,
        success_probability=enc.cost.success_probability,
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(blk),
        alpha=1.0,
        ancilla_qubits=enc.ancilla_qubits + 2,
        error=err,
        cost=cost,
    )


def _apply_singular_polynomial(
    enc: BlockEncoding, poly: ChebyshevPolynomial
) -> BlockEncoding:
    """Definite-parity transform of the singular values of a general block.

    Odd polynomials map B = U S V* to U P(S) V*, even ones to V P(S) V*.
    Mixed parity has no singular-value meaning and is rejected.
    """
    c = np.asarray(poly.coefficients)
    odd_mass = float(np.sum(np.abs(c[1::2])))
    even_mass = float(np.sum(np.abs(c[0::2])))
    if odd_mass > 1e-12 and even_mass > 1e-12:
        raise NotAdmissible("singular-value transform needs a definite parity")
    vals = poly.evaluate(_GRID)
    if float(np.max(np.abs(vals))) > ADMISSIBLE_BOUND + 1e-9:
        raise NotAdmissible("polynomial exceeds 1/2 on [-1, 1]")
    u, s, vh = np.linalg.svd(enc.block.entries)
    fs = poly.evaluate(np.clip(s, 0.0, 1.0))
    if odd_mass > 1e-12:
        k = s.shape[0]
        blk = (u[:, :k] * fs) @ vh[:k, :]
    else:
        blk = (vh.conj().T[:, : s.shape[0]] * fs) @ vh[: s.shape[0], :]
    d = max(poly.degree, 1)
    err = 4.0 * d * math.sqrt(max(enc.error, 0.0) / enc.alpha) + poly.sup_error
    cost = ResourceCost(
        depth=d * max(enc.cost.depth, 1.0),
        ancillas=enc.cost.ancillas + 2,
        queries=enc.cost.queries + d,
        classical_preprocessing=enc.cost.classical_preprocessing,
        success_probability=enc.cost.success_probability,
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(blk),
        alpha=1.0,
        ancilla_qubits=enc.ancilla_qubits + 2,
        error=err,
        cost=cost,
    )


def _repetitions(kappa_pow: float, eps: float) -> int:
    return max(1, math.ceil(kappa_pow * max(math.log(kappa_pow / eps), 1.0) ** 2))


def _power_cost(enc: BlockEncoding, reps: int) -> ResourceCost:
    return ResourceCost(
        depth=reps * max(enc.cost.depth, 1.0),
        ancillas=enc.cost.ancillas + 2,
        queries=enc.cost.queries * reps,
        classical_preprocessing=enc.cost.classical_preprocessing,
        success_probability=enc.cost.success_probability,
    )


def negative_power(
    enc: BlockEncoding, c: float, kappa: float, eps: float
) -> BlockEncoding:
    """Encoding of M^(-c) / (2 kappa^c) for Hermitian M = extract(enc).

    The premise is on magnitudes: every eigenvalue satisfies
    1/kappa <= |lambda| <= 1 (1e-9 slack). Integer c uses the
    sign-respecting matrix power, valid on indefinite spectra; fractional c
    needs a positive spectrum and a negative eigenvalue is rejected.
    The repetition count kappa^(1+c) ln^2(kappa^(1+c)/eps) multiplies both
    queries and depth.
    """
    if not (c > 0 and math.isfinite(c)):
        raise ValueError("exponent must be positive")
    if not (kappa >= 1.0 and math.isfinite(kappa)):
        raise ValueError("kappa must be at least 1")
    m = enc.alpha * hermitian_part(enc.block.entries)
    w, v = np.linalg.eigh(m)
    lo, hi = 1.0 / kappa - 1e-9, 1.0 + 1e-9
    mags = np.abs(w)
    if np.any(mags < lo) or np.any(mags > hi):
        raise SpectrumOutOfRange(
            f"eigenvalue magnitudes span [{mags.min():.3e}, {mags.max():.3e}], "
            f"premise needs [{1.0 / kappa:.3e}, 1]"
        )
    c_round = round(c)
    if abs(c - c_round) <= 1e-12:
        fw = w ** (-int(c_round))
    else:
        if np.any(w < lo):
            raise SpectrumOutOfRange(
                "fractional exponent needs a positive spectrum"
            )
        fw = w ** (-c)
    blk = (v * (fw / (2.0 * kappa**c))) @ v.conj().T
    reps = _repetitions(kappa ** (1.0 + c), eps)
    return BlockEncoding(
        block=ComplexMatrix.from_array(blk),
        alpha=1.0,
        ancilla_qubits=enc.ancilla_qubits + 2,
        error=eps + max(1.0, c) * kappa * enc.error,
        cost=_power_cost(enc, reps),
    )


def positive_power(
    enc: BlockEncoding, c: float, kappa: float, eps: float
) -> BlockEncoding:
    """Encoding of M^c / 2 for Hermitian M with spectrum in [1/kappa, 1].

    c is restricted to (0, 1); the repetition count kappa ln^2(kappa/eps)
    multiplies queries and depth.
    """
    if not (0.0 < c < 1.0):
        raise ValueError("exponent must lie in (0, 1)")
    return _fractional_power(enc, c, kappa, eps, enforce_lower=True)


def _fractional_power(
    enc: BlockEncoding,
    c: float,
    kappa: float,
    eps: float,
    *,
    enforce_lower: bool,
) -> BlockEncoding:
    """Shared calculus for positive fractional powers.

    With enforce_lower False the spectrum may touch zero (density operators
    with deficient rank); eigenvalues below roundoff are mapped to 0 and
    kappa only prices the repetitions.
    """
    if not (kappa >= 1.0 and math.isfinite(kappa)):
        raise ValueError("kappa must be at least 1")
    m = enc.alpha * hermitian_part(enc.block.entries)
    w, v = np.linalg.eigh(m)
    if enforce_lower:
        lo, hi = 1.0 / kappa - 1e-9, 1.0 + 1e-9
        if np.any(w < lo) or np.any(w > hi):
            raise SpectrumOutOfRange(
                f"spectrum [{w.min():.3e}, {w.max():.3e}] outside [{1.0 / kappa:.3e}, 1]"
            )
        wc = w
    else:
        if np.any(w < -1e-8):
            raise NotPSD(f"eigenvalue {w.min():.3e} is negative")
        if np.any(w > 1.0 + 1e-9):
            raise SpectrumOutOfRange(f"eigenvalue {w.max():.3e} exceeds 1")
        wc = np.clip(w, 0.0, None)
    fw = np.where(wc > 0, wc, 1.0) ** c
    fw = np.where(wc > 0, fw, 0.0)
    blk = (v * (fw / 2.0)) @ v.conj().T
    reps = _repetitions(kappa, eps)
    return BlockEncoding(
        block=ComplexMatrix.from_array(blk),
        alpha=1.0,
        ancilla_qubits=enc.ancilla_qubits + 2,
        error=eps + kappa * enc.error,
        cost=_power_cost(enc, reps),
    )
