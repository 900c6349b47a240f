"""Block-encoding algebra on explicit matrices.

A block encoding stores the top-left block of a notional unitary together
with a scale alpha, so the encoded operator is alpha * block. Nothing here
builds gates; the unitary is certified to exist (see unitary_dilation) and
every operation manipulates the block directly while composing a resource
ledger the way the corresponding circuit construction would.

Conventions: ancilla counts use ceil(log2), depth formulas use the natural
log with unit constants, success probabilities compose multiplicatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    AmplificationOverflow,
    DimensionMismatch,
    EmptyTermList,
    IndexOutOfRange,
    InvalidScale,
    NormOverflow,
    NotNormalized,
    ZeroOutcome,
)

NORM_SLACK = 1e-9

ArrayLike = Union["ComplexMatrix", np.ndarray, Sequence]


@dataclass(frozen=True, eq=False)
class ComplexMatrix:
    """Immutable dense complex matrix.

    entries is a C-contiguous complex128 array with the write flag cleared;
    construct through from_array, which validates shape and finiteness.
    """

    rows: int
    cols: int
    entries: np.ndarray

    @staticmethod
    def from_array(a: ArrayLike) -> "ComplexMatrix":
        arr = np.array(np.asarray(a), dtype=np.complex128, order="C", copy=True)
        if arr.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d array, got ndim={arr.ndim}")
        if arr.size and not np.all(np.isfinite(arr.real) & np.isfinite(arr.imag)):
            raise ValueError("matrix entries must be finite")
        arr.flags.writeable = False
        return ComplexMatrix(rows=arr.shape[0], cols=arr.shape[1], entries=arr)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)


def as_matrix(a: ArrayLike) -> ComplexMatrix:
    if isinstance(a, ComplexMatrix):
        return a
    return ComplexMatrix.from_array(a)


def _entries(a: ArrayLike) -> np.ndarray:
    if isinstance(a, ComplexMatrix):
        return a.entries
    return np.asarray(a, dtype=np.complex128)


@dataclass(frozen=True)
class ResourceCost:
    """Additive/multiplicative ledger attached to every encoding.

    depth and classical_preprocessing are unit-constant estimates, ancillas
    counts qubits, queries counts uses of the primitive encodings in the
    composition tree (each primitive counts itself once when built), and
    success_probability is the probability that every post-selection in the
    composition succeeds.
    """

    depth: float = 1.0
    ancillas: int = 0
    queries: int = 1
    classical_preprocessing: float = 0.0
    success_probability: float = 1.0

    def __post_init__(self):
        if not (self.depth >= 0 and math.isfinite(self.depth)):
            raise ValueError("depth must be finite and nonnegative")
        if self.ancillas < 0:
            raise ValueError("ancillas must be nonnegative")
        if self.queries < 0:
            raise ValueError("queries must be nonnegative")
        if not (self.classical_preprocessing >= 0 and math.isfinite(self.classical_preprocessing)):
            raise ValueError("classical_preprocessing must be finite and nonnegative")
        if not (0.0 < self.success_probability <= 1.0):
            raise ValueError("success_probability must lie in (0, 1]")


@dataclass(frozen=True)
class BlockEncoding:
    """An (alpha, ancillas, error)-encoding of the matrix alpha * block.

    block is the stored top-left block of the notional unitary, so its
    spectral norm never exceeds 1 (a 1e-9 slack absorbs roundoff); the
    operator the encoding represents is alpha * block, recovered by
    extract_block. error bounds the spectral-norm distance between the
    represented operator and the exact target of whatever construction
    produced this encoding.
    """

    block: ComplexMatrix
    alpha: float
    ancilla_qubits: int
    error: float
    cost: ResourceCost

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError("alpha must be finite and positive")
        if not (self.error >= 0 and math.isfinite(self.error)):
            raise ValueError("error must be finite and nonnegative")
        if self.ancilla_qubits < 0:
            raise ValueError("ancilla_qubits must be nonnegative")
        norm = np.linalg.norm(self.block.entries, 2) if self.block.entries.size else 0.0
        if norm > 1.0 + NORM_SLACK:
            raise NormOverflow(
                f"block spectral norm {norm:.6g} exceeds 1; rescale alpha instead"
            )

    @property
    def shape(self) -> Tuple[int, int]:
        return self.block.shape


def extract_block(enc: BlockEncoding) -> ComplexMatrix:
    """The represented operator alpha * block."""
    return ComplexMatrix.from_array(enc.alpha * enc.block.entries)


def exact_encoding(
    a: ArrayLike,
    alpha: Optional[float] = None,
    *,
    error: float = 0.0,
    ancillas: int = 0,
    depth: float = 1.0,
) -> BlockEncoding:
    """Wrap an explicit matrix as an error-free encoding.

    When alpha is omitted it defaults to max(1, spectral norm) so the stored
    block is always contractive. Used for identities, projectors built
    elsewhere, and test plumbing.
    """
    arr = _entries(a)
    mat = as_matrix(arr)
    norm = np.linalg.norm(arr, 2) if arr.size else 0.0
    if alpha is None:
        alpha = max(1.0, norm * (1.0 + 1e-12))
    return BlockEncoding(
        block=ComplexMatrix.from_array(arr / alpha),
        alpha=float(alpha),
        ancilla_qubits=ancillas,
        error=float(error),
        cost=ResourceCost(depth=depth, ancillas=ancillas, queries=1,
                          classical_preprocessing=0.0, success_probability=1.0),
    )


def identity_encoding(n: int) -> BlockEncoding:
    return exact_encoding(np.eye(n), 1.0)


def apply_to_state(
    enc: BlockEncoding, phi: Sequence, *, floor: float = 1e-12
) -> Tuple[np.ndarray, float]:
    """Post-selected application of the encoding to a state.

    Returns (normalized block @ phi, success probability). The probability
    is ||block phi||^2 for unit phi, i.e. ||extract phi||^2 / alpha^2.
    Raises ZeroOutcome when the outcome amplitude falls below floor.
    """
    vec = np.asarray(phi, dtype=np.complex128).reshape(-1)
    if vec.shape[0] != enc.block.cols:
        raise DimensionMismatch(
            f"state length {vec.shape[0]} does not match block columns {enc.block.cols}"
        )
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:
        raise ZeroOutcome("input state has zero norm")
    vec = vec / nrm
    out = enc.block.entries @ vec
    amp = float(np.linalg.norm(out))
    if amp * amp < floor:
        raise ZeroOutcome(
            f"success probability {amp * amp:.3e} below floor {floor:.3e}"
        )
    return out / amp, amp * amp


def product(a: BlockEncoding, b: BlockEncoding) -> BlockEncoding:
    """Encoding of the product (alpha_a alpha_b, block_a block_b).

    error composes as alpha_a * err_b + alpha_b * err_a; all ledger entries
    add, success probabilities multiply.
    """
    if a.block.cols != b.block.rows:
        raise DimensionMismatch(
            f"inner dimensions differ: {a.block.cols} vs {b.block.rows}"
        )
    blk = a.block.entries @ b.block.entries
    cost = ResourceCost(
        depth=a.cost.depth + b.cost.depth,
        ancillas=a.cost.ancillas + b.cost.ancillas,
        queries=a.cost.queries + b.cost.queries,
        classical_preprocessing=a.cost.classical_preprocessing + b.cost.classical_preprocessing,
        success_probability=a.cost.success_probability * b.cost.success_probability,
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(blk),
        alpha=a.alpha * b.alpha,
        ancilla_qubits=a.ancilla_qubits + b.ancilla_qubits,
        error=a.alpha * b.error + b.alpha * a.error,
        cost=cost,
    )


def linear_combination(
    terms: Sequence[Tuple[complex, BlockEncoding]]
) -> BlockEncoding:
    """Encoding of sum_i c_i * extract_i.

    Weights are typically real but complex values are accepted; the new
    scale is s = sum_i |c_i alpha_i| and the stored block becomes
    (sum c_i alpha_i block_i) / s. Raises EmptyTermList when no term
    carries nonzero weight.
    """
    if not terms:
        raise EmptyTermList("no terms given")
    shape = terms[0][1].shape
    for _, enc in terms:
        if enc.shape != shape:
            raise DimensionMismatch(f"term shapes differ: {enc.shape} vs {shape}")
    s = sum(abs(complex(c)) * enc.alpha for c, enc in terms)
    if s == 0.0:
        raise EmptyTermList("all terms have zero weight")
    acc = np.zeros(shape, dtype=np.complex128)
    err = 0.0
    depth = anc_led = q = 0
    prep = 0.0
    succ = 1.0
    anc_enc = 0
    for c, enc in terms:
        c = complex(c)
        acc += c * enc.alpha * enc.block.entries
        err += abs(c) * enc.error
        depth += enc.cost.depth
        anc_led += enc.cost.ancillas
        q += enc.cost.queries
        prep += enc.cost.classical_preprocessing
        succ *= enc.cost.success_probability
        anc_enc = max(anc_enc, enc.ancilla_qubits)
    select = math.ceil(math.log2(len(terms)))
    cost = ResourceCost(
        depth=depth,
        ancillas=anc_led + select,
        queries=q,
        classical_preprocessing=prep,
        success_probability=succ,
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(acc / s),
        alpha=float(s),
        ancilla_qubits=anc_enc + select,
        error=err,
        cost=cost,
    )


def tensor_product(encs: Sequence[BlockEncoding]) -> BlockEncoding:
    """Kronecker product of encodings acting on disjoint registers.

    Alphas multiply and errors compose pairwise like the product bound;
    depth and preprocessing are maxima because the factors run in
    parallel, while ancillas add.
    """
    members = list(encs)
    if not members:
        raise EmptyTermList("tensor product needs at least one encoding")
    out = members[0]
    for b in members[1:]:
        blk = np.kron(out.block.entries, b.block.entries)
        cost = ResourceCost(
            depth=max(out.cost.depth, b.cost.depth),
            ancillas=out.cost.ancillas + b.cost.ancillas,
            queries=out.cost.queries + b.cost.queries,
            classical_preprocessing=max(
                out.cost.classical_preprocessing, b.cost.classical_preprocessing
            ),
            success_probability=out.cost.success_probability
            * b.cost.success_probability,
        )
        out = BlockEncoding(
            block=ComplexMatrix.from_array(blk),
            alpha=out.alpha * b.alpha,
            ancilla_qubits=out.ancilla_qubits + b.ancilla_qubits,
            error=out.alpha * b.error + b.alpha * out.error,
            cost=cost,
        )
    return out


def scale_down(enc: BlockEncoding, p: float) -> BlockEncoding:
    """Divide the encoded operator by p > 1 (alpha is kept; the block shrinks).

    One extra ancilla and one depth unit pay for the rotation that dilutes
    the amplitude. The recorded error divides with the operator.
    """
    if not (p > 1.0 and math.isfinite(p)):
        raise InvalidScale(f"scale p must exceed 1, got {p}")
    cost = replace(
        enc.cost,
        depth=enc.cost.depth + 1.0,
        ancillas=enc.cost.ancillas + 1,
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(enc.block.entries / p),
        alpha=enc.alpha,
        ancilla_qubits=enc.ancilla_qubits + 1,
        error=enc.error / p,
        cost=cost,
    )


def amplify(
    enc: BlockEncoding, gamma: float, delta: float, eps: float
) -> BlockEncoding:
    """Uniform singular-value amplification by gamma > 1.

    Requires every singular value of the amplified block to stay at most 1
    (1e-9 slack); delta is the caller's lower bound on the distance to that
    ceiling and only enters the repetition count
    m = ceil((gamma/delta) ln(gamma/eps)). error becomes
    gamma * error + eps * alpha.
    """
    if not (gamma > 1.0 and math.isfinite(gamma)):
        raise InvalidScale(f"amplification gain must exceed 1, got {gamma}")
    if not (eps > 0.0):
        raise InvalidScale("eps must be positive")
    smax = float(np.linalg.norm(enc.block.entries, 2)) if enc.block.entries.size else 0.0
    if smax * gamma > 1.0 + NORM_SLACK:
        raise AmplificationOverflow(
            f"gain {gamma:.6g} pushes top singular value to {smax * gamma:.6g} > 1"
        )
    d = max(float(delta), 1e-6)
    m = max(1, math.ceil((gamma / d) * max(math.log(gamma / eps), 1.0)))
    cost = ResourceCost(
        depth=m * enc.cost.depth + 1.0,
        ancillas=enc.cost.ancillas + 1,
        queries=enc.cost.queries + m,
        classical_preprocessing=enc.cost.classical_preprocessing,
        success_probability=enc.cost.success_probability,
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(enc.block.entries * gamma),
        alpha=enc.alpha,
        ancilla_qubits=enc.ancilla_qubits + 1,
        error=gamma * enc.error + eps * enc.alpha,
        cost=cost,
    )


def encode_projector(j: int, n: int) -> BlockEncoding:
    """Rank-one projector |j><j| on an n-dimensional space, 1-based j.

    Exact (alpha = 1, error = 0); depth ln(n), no ancillas in any
    composition.
    """
    if n < 1:
        raise IndexOutOfRange(f"dimension must be at least 1, got {n}")
    if not (1 <= j <= n):
        raise IndexOutOfRange(f"index {j} outside 1..{n}")
    blk = np.zeros((n, n), dtype=np.complex128)
    blk[j - 1, j - 1] = 1.0
    return BlockEncoding(
        block=ComplexMatrix.from_array(blk),
        alpha=1.0,
        ancilla_qubits=0,
        error=0.0,
        cost=ResourceCost(depth=math.log(n) if n > 1 else 1.0, ancillas=0,
                          queries=1, classical_preprocessing=0.0,
                          success_probability=1.0),
    )


def encode_diagonal(psi: Sequence) -> BlockEncoding:
    """Diagonal encoding of a unit vector's amplitudes.

    block = diag(psi) for normalized psi; ancillas ceil(log2 N) + 3,
    depth ln(N).
    """
    vec = np.asarray(psi, dtype=np.complex128).reshape(-1)
    n = vec.shape[0]
    if n == 0:
        raise DimensionMismatch("empty vector")
    nrm = float(np.linalg.norm(vec))
    if abs(nrm - 1.0) > 1e-9:
        raise NotNormalized(f"vector norm {nrm:.12g} is not 1")
    anc = (math.ceil(math.log2(n)) if n > 1 else 0) + 3
    return BlockEncoding(
        block=ComplexMatrix.from_array(np.diag(vec)),
        alpha=1.0,
        ancilla_qubits=anc,
        error=0.0,
        cost=ResourceCost(depth=math.log(n) if n > 1 else 1.0, ancillas=anc,
                          queries=1, classical_preprocessing=0.0,
                          success_probability=1.0),
    )


def unitary_dilation(enc: BlockEncoding) -> ComplexMatrix:
    """Explicit unitary containing the stored block in its top-left corner.

    [[B, sqrt(I - B B*)], [sqrt(I - B* B), -B*]] built from the SVD of B;
    works for rectangular blocks and certifies that the encoding is
    realizable. Tiny negative radicands from roundoff are clipped.
    """
    B = enc.block.entries
    n, m = B.shape
    if np.linalg.norm(B, 2) > 1.0 + NORM_SLACK:
        raise NormOverflow("block norm exceeds 1; no unitary dilation exists")
    U, s, Vh = np.linalg.svd(B)
    r = np.sqrt(np.clip(1.0 - s * s, 0.0, None))
    diag_n = np.ones(n)
    diag_n[: s.shape[0]] = r
    diag_m = np.ones(m)
    diag_m[: s.shape[0]] = r
    top_right = (U * diag_n) @ U.conj().T
    bottom_left = (Vh.conj().T * diag_m) @ Vh
    D = np.zeros((n + m, n + m), dtype=np.complex128)
    D[:n, :m] = B
    D[:n, m:] = top_right
    D[n:, :m] = bottom_left
    D[n:, m:] = -B.conj().T
    return ComplexMatrix.from_array(D)
