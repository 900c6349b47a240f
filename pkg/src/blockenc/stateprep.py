"""Amplitude encodings of vectors, matrices, and datasets.

A matrix A enters the quantum side as the normalized amplitude state of its
entries; the reduced density operator of that state is A*A / ||A||_F^2, and
exponentiating it (density-matrix style) yields the encodings the pipelines
start from. Cost formulas use unit constants: depth ln(s ln N) with s the
nonzero count, ancillas proportional to s, classical preprocessing ln(N),
parallel over user-supplied partitions when given.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .core import (
    BlockEncoding,
    ComplexMatrix,
    ResourceCost,
    amplify,
    linear_combination,
    scale_down,
)
from .errors import (
    ConfigError,
    DimensionMismatch,
    NormPromiseViolated,
    NotNormalized,
    NotPSD,
    ProfileMismatch,
    ZeroMatrix,
    ZeroVector,
)
from .io import Dataset, require_power_of_two_samples
from .polytransform import _fractional_power, hermitian_part


def _ln(x: float) -> float:
    return math.log(max(x, 2.0))


def prepare_dense_state(
    psi: Sequence, partition: Optional[Sequence[int]] = None
) -> Tuple[np.ndarray, ResourceCost]:
    """Amplitude-encode a unit vector; returns (state, preparation cost).

    partition optionally lists contiguous part lengths prepared in
    parallel; preprocessing then costs the largest part's ln rather than
    the whole vector's.
    """
    vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
    n = vec.shape[0]
    if n == 0:
        raise DimensionMismatch("empty state")
    nrm = float(np.linalg.norm(vec))
    if abs(nrm - 1.0) > 1e-9:
        raise NotNormalized(f"state norm {nrm:.12g} is not 1")
    s = int(np.count_nonzero(vec))
    if partition is None:
        depth = _ln(s * _ln(n))
        prep = _ln(n)
        anc = s
    else:
        parts = [int(p) for p in partition]
        if any(p <= 0 for p in parts) or sum(parts) != n:
            raise ConfigError(
                f"partition {parts} does not tile a length-{n} vector"
            )
        bounds = np.cumsum([0] + parts)
        depth = 0.0
        prep = 0.0
        for k in range(len(parts)):
            seg = vec[bounds[k] : bounds[k + 1]]
            sp = int(np.count_nonzero(seg))
            depth = max(depth, _ln(max(sp, 1) * _ln(parts[k])))
            prep = max(prep, _ln(parts[k]))
        depth += _ln(len(parts))
        anc = s + len(parts)
    cost = ResourceCost(
        depth=depth,
        ancillas=anc,
        queries=1,
        classical_preprocessing=prep,
        success_probability=1.0,
    )
    return vec.copy(), cost


@dataclass(frozen=True)
class TensorSumSpec:
    """Structured state: sum_j c_j (v_{j,1} x v_{j,2} x ...).

    Each term is a tuple of factor vectors; all terms must multiply out to
    the same total dimension.
    """

    terms: Tuple[Tuple[np.ndarray, ...], ...]
    coefficients: Tuple[complex, ...]


def prepare_tensor_sum(spec: TensorSumSpec) -> Tuple[np.ndarray, ResourceCost]:
    """Prepare a sum of tensor-product terms.

    The parts are prepared in parallel and combined select-style, so depth
    scales with the number of terms times ln of the largest factor, and the
    success probability is (achieved amplitude / sum of term weights)^2.
    """
    if not spec.terms:
        raise ConfigError("no terms")
    if len(spec.terms) != len(spec.coefficients):
        raise ConfigError("coefficient count does not match term count")
    profile = None
    acc = None
    alpha_sum = 0.0
    s_max = 1
    for c, factors in zip(spec.coefficients, spec.terms):
        if not factors:
            raise ConfigError("empty tensor term")
        vecs = [np.asarray(f, dtype=np.complex128).reshape(-1) for f in factors]
        dims = tuple(f.shape[0] for f in vecs)
        if profile is None:
            profile = dims
            acc = np.zeros(int(np.prod(dims)), dtype=np.complex128)
        elif dims != profile:
            raise ProfileMismatch(
                f"factor-dimension profile {dims} differs from {profile}"
            )
        term = vecs[0]
        for f in vecs[1:]:
            term = np.kron(term, f)
        acc += complex(c) * term
        alpha_sum += abs(complex(c)) * float(
            np.prod([np.linalg.norm(f) for f in vecs])
        )
        s_max = max(s_max, max(int(np.count_nonzero(f)) for f in vecs))
    amp = float(np.linalg.norm(acc))
    if amp == 0.0 or alpha_sum == 0.0:
        raise ZeroVector("terms cancel to the zero state")
    success = min(1.0, (amp / alpha_sum) ** 2)
    dmax = max(profile)
    cost = ResourceCost(
        depth=len(spec.terms) * _ln(dmax),
        ancillas=len(profile) * s_max,
        queries=1,
        classical_preprocessing=_ln(dmax),
        success_probability=success,
    )
    return acc / amp, cost


def encode_gram(a, partition: Optional[Sequence[int]] = None) -> BlockEncoding:
    """Density encoding of the normalized Gram operator A*A / ||A||_F^2.

    The amplitude state of A's entries is prepared, the row register traced
    out, and the remaining density operator exponentiated; the stored block
    is the density operator itself (alpha 1, exact).
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    norm_f = float(np.linalg.norm(arr))
    if norm_f == 0.0:
        raise ZeroMatrix("all-zero matrix has no amplitude state")
    _, prep = prepare_dense_state(arr.reshape(-1) / norm_f, partition)
    rho = arr.conj().T @ arr / (norm_f * norm_f)
    cost = ResourceCost(
        depth=2.0 * prep.depth + 1.0,
        ancillas=prep.ancillas + 1,
        queries=2,
        classical_preprocessing=prep.classical_preprocessing,
        success_probability=1.0,
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(rho),
        alpha=1.0,
        ancilla_qubits=prep.ancillas + 1,
        error=0.0,
        cost=cost,
    )


def encode_from_columns(
    a,
    eps: float = 1e-8,
    *,
    strict: bool = False,
    remove_frobenius: bool = False,
    partition: Optional[Sequence[int]] = None,
) -> BlockEncoding:
    """Encode a matrix with spectral norm at most 1 from its entries.

    The result represents (A*A)^(1/2) / ||A||_F, which equals A / ||A||_F
    exactly when A is PSD; strict requires that case and raises NotPSD
    otherwise. remove_frobenius rescales the represented operator to
    (A*A)^(1/2) itself via amplification (legal because the norm promise
    caps it at 1).
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionMismatch("expected a matrix")
    if not np.any(arr):
        raise ZeroMatrix("cannot encode the zero matrix")
    norm2 = float(np.linalg.norm(arr, 2))
    if norm2 > 1.0 + 1e-9:
        raise NormPromiseViolated(f"spectral norm {norm2:.6g} exceeds 1")
    if strict:
        if arr.shape[0] != arr.shape[1]:
            raise NotPSD("strict mode needs a square matrix")
        h = hermitian_part(arr)
        w = np.linalg.eigvalsh(h)
        if w.min() < -1e-10:
            raise NotPSD(f"eigenvalue {w.min():.3e} is negative")
    norm_f = float(np.linalg.norm(arr))
    enc_rho = encode_gram(arr, partition)
    lam = np.linalg.eigvalsh(enc_rho.block.entries)
    pos = lam[lam > 1e-12 * max(lam.max(), 1e-300)]
    kappa_eff = max(1.0, 1.0 / float(pos.min())) * (1.0 + 1e-9)
    enc_half = _fractional_power(enc_rho, 0.5, kappa_eff, eps, enforce_lower=False)
    delta = max(1e-6, 1.0 - norm2 / norm_f)
    enc = amplify(enc_half, 2.0, delta, eps)
    if remove_frobenius:
        if norm_f > 1.0 + 1e-12:
            enc = amplify(enc, norm_f, max(1e-6, 1.0 - norm2), eps)
        elif norm_f < 1.0 - 1e-12:
            enc = scale_down(enc, 1.0 / norm_f)
    return enc


def build_covariance(ds: Dataset) -> BlockEncoding:
    """Covariance encoding of a normalized dataset: the represented operator
    is C/2 with C = (1/m) sum_i x_i x_i* - mu mu*.

    Built from two density encodings (the sample second moment and the
    mean outer product via the Hadamard-corner trick, each scaled down by
    the sample count) combined with weights +1/2 and -1/2. Requires the
    sample count to be a power of two and total squared norm 1.
    """
    require_power_of_two_samples(ds)
    x = np.asarray(ds.samples, dtype=np.complex128)
    total = float(np.linalg.norm(x))
    if not ds.frobenius_normalized or abs(total - 1.0) > 1e-9:
        raise NotNormalized(
            f"dataset squared norms sum to {total * total:.12g}, expected 1"
        )
    m = x.shape[0]
    _, prep = prepare_dense_state(x.reshape(-1))

    rho1 = x.conj().T @ x
    cost1 = ResourceCost(
        depth=2.0 * prep.depth + 1.0,
        ancillas=prep.ancillas + 1,
        queries=2,
        classical_preprocessing=prep.classical_preprocessing,
        success_probability=1.0,
    )
    enc1 = BlockEncoding(
        block=ComplexMatrix.from_array(rho1),
        alpha=1.0,
        ancilla_qubits=prep.ancillas + 1,
        error=0.0,
        cost=cost1,
    )

    v = x.sum(axis=0)
    rho2 = np.outer(v, v.conj()) / m
    hadamard_layers = int(math.log2(m)) if m > 1 else 1
    cost2 = ResourceCost(
        depth=2.0 * prep.depth + hadamard_layers + 1.0,
        ancillas=prep.ancillas + 1,
        queries=2,
        classical_preprocessing=prep.classical_preprocessing,
        success_probability=1.0,
    )
    enc2 = BlockEncoding(
        block=ComplexMatrix.from_array(rho2),
        alpha=1.0,
        ancilla_qubits=prep.ancillas + 1,
        error=0.0,
        cost=cost2,
    )

    if m > 1:
        enc1 = scale_down(enc1, float(m))
        enc2 = scale_down(enc2, float(m))
    return linear_combination([(0.5, enc1), (-0.5, enc2)])
