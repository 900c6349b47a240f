"""End-to-end pipelines built from the encoding algebra.

Each pipeline returns its primary result plus a report dict carrying the
resource ledger, the classical oracle reads that were consumed (with
reasons), and verification numbers against the reference computation. All
randomness flows through seeded generators, so identical configs reproduce
identical reports.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace as _dc_replace
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import (
    BlockEncoding,
    ComplexMatrix,
    ResourceCost,
    amplify,
    apply_to_state,
    exact_encoding,
    extract_block,
    identity_encoding,
    linear_combination,
    product,
    scale_down,
)
from .errors import (
    ConfigError,
    DegenerateGround,
    DegenerateTopEigenvalue,
    DimensionMismatch,
    GapTooSmall,
    InvalidCoefficients,
    NotHermitian,
    OverlapCollapse,
    RankDeficient,
    Singular,
    SpectrumOutOfRange,
    StepSizeOutOfRange,
    ZeroOverlap,
    ZeroVector,
)
from .oracles import LoggedOracles
from .polytransform import (
    ChebyshevPolynomial,
    apply_polynomial,
    exp_decay_poly,
    hermitian_part,
    jacobi_anger_poly,
    negative_power,
)
from .stateprep import encode_from_columns, encode_gram


def _cost_dict(cost: ResourceCost) -> dict:
    return {
        "depth": float(cost.depth),
        "ancillas": int(cost.ancillas),
        "queries": int(cost.queries),
        "classical_preprocessing": float(cost.classical_preprocessing),
        "success_probability": float(cost.success_probability),
    }


def _fidelity(a, b) -> float:
    return min(1.0, float(abs(np.vdot(np.asarray(a), np.asarray(b)))))


def _boost_beta(gamma: float, eps: float) -> float:
    """Largest admissible filter rate for amplifying a weight-gamma outcome."""
    if gamma >= 1.0 - 1e-12:
        return 0.0
    return math.log(1.0 / (1.0 - eps)) / (2.0 * (1.0 - gamma))


def _apply_halved(
    enc: BlockEncoding, poly: ChebyshevPolynomial
) -> Tuple[BlockEncoding, float]:
    """Apply a polynomial after shrinking it under the 1/2 ceiling.

    Returns the transformed encoding and the factor the caller must put
    back (by amplification or combination weights) to undo the shrink.
    """
    f = 0.5 / (1.0 + poly.sup_error + 1e-12)
    return apply_polynomial(enc, poly.scaled(f)), 1.0 / f


def _corner(enc: BlockEncoding, rows: Tuple[int, int], cols: Tuple[int, int]) -> BlockEncoding:
    """Sub-block of an encoding via projector sandwich; one extra ancilla."""
    blk = enc.block.entries[rows[0] : rows[1], cols[0] : cols[1]]
    cost = _dc_replace(
        enc.cost, depth=enc.cost.depth + 1.0, ancillas=enc.cost.ancillas + 1
    )
    return BlockEncoding(
        block=ComplexMatrix.from_array(blk),
        alpha=enc.alpha,
        ancilla_qubits=enc.ancilla_qubits + 1,
        error=enc.error,
        cost=cost,
    )


def _encode_shifted_eighth(m: np.ndarray, eps: float) -> BlockEncoding:
    """Encoding with block M/8 for Hermitian M with spectrum inside (-1, 1).

    Routes through the PSD shift (I+M)/2, which the column encoder
    represents exactly, then removes the shift with an identity term.
    """
    n = m.shape[0]
    b = 0.5 * (np.eye(n) + m)
    enc_b = scale_down(encode_from_columns(b, eps, remove_frobenius=True), 2.0)
    enc_i = scale_down(identity_encoding(n), 4.0)
    return linear_combination([(0.5, enc_b), (-0.5, enc_i)])


# ---------------------------------------------------------------------------
# principal components


@dataclass(frozen=True)
class PowerMethodConfig:
    gap_Delta: float
    eps: float
    r: int = 1
    seed: int = 0
    k_override: Optional[int] = None


def pca_power_top_r(
    enc: BlockEncoding,
    cfg: PowerMethodConfig,
    oracles: Optional[LoggedOracles] = None,
) -> Tuple[List[Tuple[float, np.ndarray]], dict]:
    """Top-r eigenpairs of the stored block by repeated application.

    Eigenvalues are reported in units of the input block (the deflation
    cascade halves the operator per level and the factor 2^level is folded
    back in). Per-level overlap with the sought eigenvector is measured and
    the success probability of the amplified post-selection is recorded.
    """
    if cfg.r < 1:
        raise ConfigError("need r >= 1 components")
    if not (0 < cfg.eps < 1):
        raise ConfigError("eps must lie in (0, 1)")
    if not (cfg.gap_Delta > 0):
        raise ConfigError("working gap must be positive")
    orc = oracles if oracles is not None else LoggedOracles()
    n = enc.block.rows
    dec0 = orc.eig(enc.block.entries, "input gap read for iteration count")
    lam0 = dec0.eigenvalues
    if n >= 2 and (lam0[-1] - lam0[-2]) < cfg.gap_Delta * (1.0 - 1e-9):
        warnings.warn(
            f"spectral gap {lam0[-1] - lam0[-2]:.3e} below working gap "
            f"{cfg.gap_Delta:.3e}",
            GapTooSmall,
        )
    k = cfg.k_override
    if k is None:
        k = max(1, math.ceil(math.log(max(n, 2) / cfg.eps) / cfg.gap_Delta))
    rng = np.random.default_rng(cfg.seed)

    enc_level = enc
    pairs: List[Tuple[float, np.ndarray]] = []
    levels = []
    iteration_queries = 0
    for level in range(cfg.r):
        # anti-Hermitian defect up to the encoding's error budget is expected
        blk = hermitian_part(
            enc_level.block.entries, tol=max(1e-8, 4.0 * enc_level.error + 1e-10)
        )
        dec = orc.eig(blk, f"level-{level} overlap and eigenvalue reference")
        top = dec.eigenvectors[:, -1]
        psi = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi = psi / np.linalg.norm(psi)
        gamma0 = float(abs(np.vdot(top, psi)))
        if gamma0 < 1e-6:
            raise OverlapCollapse(
                f"start overlap {gamma0:.3e} with the level-{level} eigenvector"
            )
        state = psi
        amp = 1.0
        for _ in range(k):
            state, p = apply_to_state(enc_level, state)
            amp *= p
        iteration_queries += k * enc_level.cost.queries
        lam_level = float(np.real(np.vdot(state, blk @ state)))
        value = lam_level * (2.0**level)
        bb = _boost_beta(amp, cfg.eps)
        bf = math.exp(-2.0 * bb * (1.0 - amp))
        post = _fidelity(state, psi) ** 2 * bf
        oracle_value = float(dec.eigenvalues[-1]) * (2.0**level)
        levels.append(
            {
                "level": level,
                "k": k,
                "start_overlap": gamma0,
                "chain_weight": amp,
                "boost_beta": bb,
                "boost_factor": bf,
                "post_select_success": post,
                "eigenvalue": value,
                "oracle_eigenvalue": oracle_value,
                "abs_error": abs(value - oracle_value),
                "final_overlap": _fidelity(state, dec.eigenvectors[:, -1]),
            }
        )
        pairs.append((value, state))
        if level + 1 < cfg.r:
            boost_deg = exp_decay_poly(bb, cfg.eps).degree if bb > 0 else 0
            proj_cost = ResourceCost(
                depth=2.0 * math.log(max(n, 2)) + max(boost_deg, 1),
                ancillas=(math.ceil(math.log2(n)) if n > 1 else 0) + 1,
                queries=2 + boost_deg,
                classical_preprocessing=0.0,
                success_probability=min(1.0, max(post, 1e-300)),
            )
            proj = BlockEncoding(
                block=ComplexMatrix.from_array(bf * np.outer(state, state.conj())),
                alpha=1.0,
                ancilla_qubits=proj_cost.ancillas,
                error=2.0 * cfg.eps,
                cost=proj_cost,
            )
            enc_level = linear_combination(
                [(0.5, enc_level), (-0.5, product(enc_level, proj))]
            )

    report = {
        "k": k,
        "levels": levels,
        "overlap_estimation_queries": math.ceil(1.0 / cfg.eps),
        "iteration_queries": iteration_queries,
        "ledger": _cost_dict(enc_level.cost),
        "oracle_log": list(orc.log),
    }
    return pairs, report


def pca_gradient_descent(
    enc: BlockEncoding,
    eta: float = 0.4,
    T: Optional[int] = None,
    seed: int = 0,
    eps: float = 1e-3,
    oracles: Optional[LoggedOracles] = None,
    start=None,
) -> Tuple[np.ndarray, List[float], dict]:
    """Leading eigenvector by normalized descent on the Rayleigh quotient.

    The iterate applies the fixed operator (1-2 eta) I + eta C to the
    normalized state, where C is twice the represented half-covariance
    block. Residuals against the phase-aligned reference eigenvector are
    recorded per step.
    """
    if not (0.0 < eta < 0.5):
        raise StepSizeOutOfRange(f"step size {eta} outside (0, 1/2)")
    orc = oracles if oracles is not None else LoggedOracles()
    n = enc.block.rows
    cov = 2.0 * np.asarray(extract_block(enc))
    dec = orc.eig(cov, "descent reference eigenvector and ratio")
    lam = dec.eigenvalues
    v1 = dec.eigenvectors[:, -1]
    if n >= 2 and (lam[-1] - lam[-2]) < 1e-8:
        warnings.warn(
            f"top eigenvalues separated by {lam[-1] - lam[-2]:.3e}",
            DegenerateTopEigenvalue,
        )
    mu = 1.0 - 2.0 * eta + eta * lam
    ratio = float(mu[-2] / mu[-1]) if n >= 2 else 0.0
    if T is None:
        if ratio >= 1.0 - 1e-15:
            T = 1000
        else:
            T = max(1, math.ceil(math.log(1.0 / eps) / -math.log(max(ratio, 1e-300))))

    m_enc = linear_combination(
        [(1.0 - 2.0 * eta, identity_encoding(n)), (2.0 * eta, enc)]
    )
    if start is not None:
        x = np.asarray(start, dtype=np.complex128).reshape(-1)
    else:
        rng = np.random.default_rng(seed)
        x = rng.normal(size=n) + 1j * rng.normal(size=n)
    x = x / np.linalg.norm(x)
    residuals: List[float] = []
    for _ in range(T):
        x, _ = apply_to_state(m_enc, x)
        phase = np.vdot(v1, x)
        phase = phase / abs(phase) if abs(phase) > 0 else 1.0
        residuals.append(float(np.linalg.norm(x - phase * v1)))
    meas = [
        residuals[i + 1] / residuals[i]
        for i in range(len(residuals) - 1)
        if residuals[i] > 1e-13
    ]
    report = {
        "T": T,
        "eta": eta,
        "contraction_oracle": ratio,
        "contraction_measured": float(np.median(meas)) if meas else None,
        "final_overlap": _fidelity(x, v1),
        "ledger": _cost_dict(m_enc.cost),
        "oracle_log": list(orc.log),
    }
    return x, residuals, report


# ---------------------------------------------------------------------------
# linear systems


def linear_solve(
    a,
    b,
    eps: float = 1e-3,
    oracles: Optional[LoggedOracles] = None,
) -> Tuple[np.ndarray, dict]:
    """Normalized solution state of A x = b for Hermitian A.

    Positive-definite inputs invert the square of the Gram encoding with a
    half power; indefinite inputs go through the shifted eighth encoding
    and a full inverse power. Eigenvalue magnitudes must lie in
    [1e-6, 1).
    """
    orc = oracles if oracles is not None else LoggedOracles()
    h = hermitian_part(np.asarray(a, dtype=np.complex128))
    vec = np.asarray(b, dtype=np.complex128).reshape(-1)
    nb = float(np.linalg.norm(vec))
    if nb == 0.0:
        raise ZeroVector("right-hand side is zero")
    if vec.shape[0] != h.shape[0]:
        raise DimensionMismatch("right-hand side length does not match A")
    bhat = vec / nb
    dec = orc.eig(h, "spectral premise, conditioning, and route selection")
    lam = dec.eigenvalues
    amax = float(np.max(np.abs(lam)))
    amin = float(np.min(np.abs(lam)))
    if amax >= 1.0:
        raise SpectrumOutOfRange(f"largest eigenvalue magnitude {amax:.6g} not below 1")
    if amin < 1e-6:
        raise Singular(f"eigenvalue magnitude {amin:.3e} below the 1e-6 floor")
    kappa = amax / amin
    if lam[0] > 0.0:
        route = "psd-gram"
        norm_f = float(np.linalg.norm(h))
        enc_g = encode_gram(h)
        kappa_eff = (norm_f * norm_f) / (amin * amin) * (1.0 + 1e-9)
        enc_inv = negative_power(enc_g, 0.5, kappa_eff, eps / 4)
    else:
        route = "shifted"
        enc8 = _encode_shifted_eighth(h, eps / 8)
        kappa_eff = (8.0 / amin) * (1.0 + 1e-9)
        enc_inv = negative_power(enc8, 1.0, kappa_eff, eps / 4)
    x_state, p = apply_to_state(enc_inv, bhat)
    ref = (dec.eigenvectors * (1.0 / lam)) @ dec.eigenvectors.conj().T @ bhat
    ref = ref / np.linalg.norm(ref)
    resid_vec = h @ x_state
    resid_vec = resid_vec / np.linalg.norm(resid_vec)
    phase = np.vdot(resid_vec, bhat)
    phase = phase / abs(phase) if abs(phase) > 0 else 1.0
    report = {
        "route": route,
        "kappa": kappa,
        "kappa_effective": kappa_eff,
        "fidelity": _fidelity(ref, x_state),
        "residual": float(np.linalg.norm(phase * resid_vec - bhat)),
        "success_measured": float(p),
        "success_analytic": 1.0 / (4.0 * kappa * kappa),
        "ledger": _cost_dict(enc_inv.cost),
        "oracle_log": list(orc.log),
    }
    return x_state, report


# ---------------------------------------------------------------------------
# Hamiltonian simulation


def simulate_direct(
    h,
    t: float,
    eps: float = 1e-6,
    oracles: Optional[LoggedOracles] = None,
) -> Tuple[BlockEncoding, dict]:
    """Encoding of exp(-i H t) assembled from even and odd phase parts.

    Hamiltonians with spectral norm above 1 are rescaled (entrywise max
    first, spectral fallback) with the time dilated to compensate; the
    report records the factor.
    """
    orc = oracles if oracles is not None else LoggedOracles()
    hm = hermitian_part(np.asarray(h, dtype=np.complex128))
    norm2 = float(np.linalg.norm(hm, 2))
    s_div = 1.0
    if norm2 > 1.0 + 1e-9:
        s_div = float(np.max(np.abs(hm)))
        if float(np.linalg.norm(hm / s_div, 2)) > 1.0:
            s_div = norm2 * (1.0 + 1e-12)
    ht = hm / s_div
    t_eff = t * s_div
    enc8 = _encode_shifted_eighth(ht, eps / 8)
    even, odd = jacobi_anger_poly(8.0 * t_eff, eps / 2)
    enc_c, inv_c = _apply_halved(enc8, even)
    enc_s, inv_s = _apply_halved(enc8, odd)
    out = linear_combination([(inv_c, enc_c), (-1j * inv_s, enc_s)])
    u = np.asarray(extract_block(out))
    u_ref = np.asarray(orc.expm(hm, t, "unitary verification"))
    report = {
        "rescale": s_div,
        "t_effective": t_eff,
        "degree_even": even.degree,
        "degree_odd": odd.degree,
        "error_vs_oracle": float(np.linalg.norm(u - u_ref, 2)),
        "unitarity_defect": float(
            np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2)
        ),
        "ledger": _cost_dict(out.cost),
        "oracle_log": list(orc.log),
    }
    return out, report


# ---------------------------------------------------------------------------
# time marching as one linear system

MULTISTEP_COEFFS = {
    1: ((-1.0, 0.0, 1.0), (0.0, 2.0, 0.0)),
    2: (
        (0.0, 0.0, -1.0, 1.0, 0.0),
        (1.0 / 24, -5.0 / 24, 19.0 / 24, 9.0 / 24, 0.0),
    ),
    3: (
        (0.0, 0.0, 0.0, -1.0, 1.0, 0.0, 0.0),
        (-19.0 / 720, 106.0 / 720, -264.0 / 720, 646.0 / 720, 251.0 / 720, 0.0, 0.0),
    ),
}


@dataclass(frozen=True)
class ODESystemSpec:
    """Marching system for d psi / dt = -i H(t) psi on [0, t].

    H is one Hermitian matrix or a sequence of N+1 of them (one per grid
    point). K selects the stencil half-width; alpha_l and beta_l override
    the built-in coefficient tables (length 2K+1, indexed l = -K..K).
    psi0 defaults to the first basis vector.
    """

    H: Union[np.ndarray, Sequence[np.ndarray]]
    t: float
    K: int = 1
    N: Optional[int] = None
    psi0: Optional[np.ndarray] = None
    alpha_l: Optional[Sequence[float]] = None
    beta_l: Optional[Sequence[float]] = None


def ode_step_count(t: float, K: int, eps: float) -> int:
    return max(1, math.ceil(t ** (1.0 + 1.0 / K) / eps ** (1.0 / K)))


def _coefficient_table(spec: ODESystemSpec) -> Tuple[np.ndarray, np.ndarray]:
    if spec.alpha_l is not None or spec.beta_l is not None:
        if spec.alpha_l is None or spec.beta_l is None:
            raise ConfigError("alpha_l and beta_l must be given together")
        al = np.asarray(spec.alpha_l, dtype=float)
        bl = np.asarray(spec.beta_l, dtype=float)
        if al.shape != (2 * spec.K + 1,) or bl.shape != (2 * spec.K + 1,):
            raise ConfigError(f"coefficient tables must have length {2 * spec.K + 1}")
    else:
        if spec.K not in MULTISTEP_COEFFS:
            raise ConfigError(f"no built-in table for K={spec.K}; pass alpha_l/beta_l")
        al = np.asarray(MULTISTEP_COEFFS[spec.K][0])
        bl = np.asarray(MULTISTEP_COEFFS[spec.K][1])
    ls = np.arange(-spec.K, spec.K + 1)
    if abs(al.sum()) > 1e-12 or abs((ls * al).sum() - bl.sum()) > 1e-12:
        warnings.warn(
            "multistep table fails the order-consistency identities",
            InvalidCoefficients,
        )
    return al, bl


def build_ode_system(
    spec: ODESystemSpec,
    oracles: Optional[LoggedOracles] = None,
) -> Tuple[np.ndarray, np.ndarray, dict]:
    """Assemble the anchored (N+1)-block marching matrix and right-hand side.

    Row 0 anchors the initial state, row 1 is a forward Euler step, interior
    rows use the central difference near the boundaries and the K-stencil
    multistep identity away from them. K=1 reduces to the pure central
    scheme.
    """
    orc = oracles if oracles is not None else LoggedOracles()
    if spec.N is None:
        raise ConfigError("N must be set before assembly")
    n_steps = int(spec.N)
    if n_steps < 1:
        raise ConfigError("need at least one step")
    if not (spec.t > 0):
        raise ConfigError("final time must be positive")
    if spec.K < 1:
        raise ConfigError("stencil half-width must be at least 1")
    hs_in = spec.H
    if isinstance(hs_in, np.ndarray) and hs_in.ndim == 2:
        hs = [hermitian_part(hs_in)] * (n_steps + 1)
    else:
        hs = [hermitian_part(np.asarray(m, dtype=np.complex128)) for m in hs_in]
        if len(hs) != n_steps + 1:
            raise ConfigError(f"need {n_steps + 1} Hamiltonians, got {len(hs)}")
    n = hs[0].shape[0]
    if any(m.shape != (n, n) for m in hs):
        raise DimensionMismatch("Hamiltonian sizes differ across the grid")
    psi0 = spec.psi0
    if psi0 is None:
        psi0 = np.zeros(n, dtype=np.complex128)
        psi0[0] = 1.0
    else:
        psi0 = np.asarray(psi0, dtype=np.complex128).reshape(-1)
        if psi0.shape[0] != n:
            raise DimensionMismatch("psi0 length does not match H")
        nrm = np.linalg.norm(psi0)
        if nrm == 0:
            raise ZeroVector("psi0 is zero")
        psi0 = psi0 / nrm

    al, bl = _coefficient_table(spec)
    dt = spec.t / n_steps
    dim = (n_steps + 1) * n
    s = np.zeros((dim, dim), dtype=np.complex128)
    eye = np.eye(n)

    def blockset(row: int, col: int, mat: np.ndarray) -> None:
        s[row * n : (row + 1) * n, col * n : (col + 1) * n] += mat

    blockset(0, 0, eye)
    blockset(1, 0, -eye + 1j * dt * hs[0])
    blockset(1, 1, eye)
    central_a, central_b = MULTISTEP_COEFFS[1]
    for kk in range(1, n_steps):
        row = kk + 1
        use_table = spec.K <= kk <= n_steps - spec.K and spec.K > 1
        aa, bb, hw = (al, bl, spec.K) if use_table else (
            np.asarray(central_a),
            np.asarray(central_b),
            1,
        )
        for li, l in enumerate(range(-hw, hw + 1)):
            col = kk + l
            mat = aa[li] * eye + 1j * dt * bb[li] * hs[col]
            if aa[li] != 0.0 or bb[li] != 0.0:
                blockset(row, col, mat)
    bvec = np.zeros(dim, dtype=np.complex128)
    bvec[:n] = psi0
    kappa = orc.cond(s, "marching system conditioning")
    report = {
        "N": n_steps,
        "dt": dt,
        "K": spec.K,
        "kappa_system": kappa,
        "alpha_l": [float(x) for x in al],
        "beta_l": [float(x) for x in bl],
    }
    return s, bvec, report


def simulate_via_linear_solve(
    spec: ODESystemSpec,
    eps: float = 1e-3,
    oracles: Optional[LoggedOracles] = None,
) -> Tuple[np.ndarray, dict]:
    """Evolve by solving the marching system through the Hermitian dilation.

    The non-Hermitian system S is embedded as [[0, S], [S*, 0]] with the
    solution in the lower half, rescaled by 1.25 ||S|| to meet the solver
    premise. History rows are the per-step normalized states; fidelities
    compare against the exact propagator per grid point.
    """
    orc = oracles if oracles is not None else LoggedOracles()
    n_steps = spec.N if spec.N is not None else ode_step_count(spec.t, spec.K, eps)
    sp = _dc_replace(spec, N=int(n_steps))
    s, bvec, build_rep = build_ode_system(sp, orc)
    w = s.shape[0]
    dil = np.zeros((2 * w, 2 * w), dtype=np.complex128)
    dil[:w, w:] = s
    dil[w:, :w] = s.conj().T
    c_scale = 1.25 * float(np.linalg.norm(s, 2))
    bfull = np.concatenate([bvec, np.zeros(w, dtype=np.complex128)])
    z, solve_rep = linear_solve(dil / c_scale, bfull, eps, oracles=orc)
    lower = z[w:]
    n = (
        spec.H.shape[0]
        if isinstance(spec.H, np.ndarray) and spec.H.ndim == 2
        else np.asarray(spec.H[0]).shape[0]
    )
    history = lower.reshape(n_steps + 1, n)
    norms = np.linalg.norm(history, axis=1)
    if np.any(norms == 0):
        raise ZeroVector("a history slot came back empty")
    history = history / norms[:, None]

    hs_single = isinstance(spec.H, np.ndarray) and spec.H.ndim == 2
    psi_ref = history[0].copy()
    dt = sp.t / n_steps
    fids = [1.0]
    for kk in range(1, n_steps + 1):
        hk = spec.H if hs_single else np.asarray(spec.H[kk - 1])
        u = np.asarray(orc.expm(hk, dt, f"reference propagator step {kk}"))
        psi_ref = u @ psi_ref
        fids.append(_fidelity(psi_ref, history[kk]))
    report = {
        "N": int(n_steps),
        "dt": dt,
        "kappa_system": build_rep["kappa_system"],
        "c_scale": c_scale,
        "fidelities": fids,
        "final_fidelity": fids[-1],
        "min_fidelity": float(min(fids)),
        "solver": {
            key: solve_rep[key]
            for key in ("route", "kappa", "success_measured", "success_analytic", "ledger")
        },
        "oracle_log": list(orc.log),
    }
    return history, report


# ---------------------------------------------------------------------------
# imaginary-time ground states


def ground_state_ite(
    h,
    eps: float = 1e-3,
    seed: int = 0,
    oracles: Optional[LoggedOracles] = None,
    start=None,
) -> Tuple[np.ndarray, dict]:
    """Ground state by the shifted imaginary-time filter.

    Applies exp(-t (I + H)) to a seeded start, split into capped-rate
    steps, then amplifies the surviving weight. The filter time follows
    the spectral-tail rule and the report carries both post-selection
    probabilities, the amplification identity, and the tail bound.
    """
    orc = oracles if oracles is not None else LoggedOracles()
    hm = hermitian_part(np.asarray(h, dtype=np.complex128))
    n = hm.shape[0]
    if n < 2:
        raise ConfigError("need dimension at least 2")
    dec = orc.eig(hm, "spectrum for filter time and verification")
    energies = dec.eigenvalues
    if float(np.max(np.abs(energies))) > 1.0 + 1e-9:
        raise SpectrumOutOfRange("spectrum must lie in [-1, 1]")
    gap = float(energies[1] - energies[0])
    if gap < 1e-10:
        raise DegenerateGround(f"ground gap {gap:.3e} below 1e-10")
    if start is not None:
        psi0 = np.asarray(start, dtype=np.complex128).reshape(-1)
    else:
        rng = np.random.default_rng(seed)
        psi0 = rng.normal(size=n) + 1j * rng.normal(size=n)
    psi0 = psi0 / np.linalg.norm(psi0)
    coeffs = dec.eigenvectors.conj().T @ psi0
    if abs(coeffs[0]) < 1e-12:
        raise ZeroOverlap("start state has no ground-state component")
    a_ratio = float(np.max(np.abs(coeffs[1:]) ** 2) / abs(coeffs[0]) ** 2)
    arg = 2.0 * a_ratio * (n - 1) / eps
    t_filter = max(0.0, math.log(arg) / gap) if arg > 1.0 else 0.0
    beta_total = 2.0 * t_filter

    b = 0.5 * (np.eye(n) - hm)
    state = psi0
    succ_first = 1.0
    step_degrees: List[int] = []
    caps: List[float] = []
    agg = {"depth": 0.0, "ancillas": 0, "queries": 0, "classical_preprocessing": 0.0}
    if beta_total > 0:
        enc_b = encode_from_columns(b, min(eps, 1e-6), remove_frobenius=True)
        n_chunks = max(1, math.ceil(beta_total / 8.0))
        beta_step = beta_total / n_chunks
        for _ in range(n_chunks):
            poly = exp_decay_poly(beta_step, 1e-12)
            enc_f, inv = _apply_halved(enc_b, poly)
            smax = float(np.linalg.norm(enc_f.block.entries, 2))
            gain = inv
            if smax * gain > 1.0 - 1e-12:
                gain = (1.0 - 1e-12) / smax
            caps.append(gain / inv)
            enc_f = amplify(enc_f, gain, max(1e-6, 1.0 - smax * gain), min(eps, 1e-8))
            state, p = apply_to_state(enc_f, state)
            succ_first *= p
            step_degrees.append(poly.degree)
            agg["depth"] += enc_f.cost.depth
            agg["ancillas"] = max(agg["ancillas"], enc_f.cost.ancillas)
            agg["queries"] += enc_f.cost.queries
            agg["classical_preprocessing"] = max(
                agg["classical_preprocessing"], enc_f.cost.classical_preprocessing
            )

    bb = _boost_beta(succ_first, eps)
    bf = math.exp(-2.0 * bb * (1.0 - succ_first))
    succ_second = _fidelity(state, psi0) ** 2 * bf
    boost_deg = exp_decay_poly(bb, eps).degree if bb > 0 else 0
    agg["depth"] += 2.0 * math.log(max(n, 2)) + max(boost_deg, 1)
    agg["queries"] += 2 + boost_deg

    tail = float(
        np.sum(
            (np.abs(coeffs[1:]) ** 2 / abs(coeffs[0]) ** 2)
            * np.exp(-2.0 * t_filter * (energies[1:] - energies[0]))
        )
    )
    e0_est = float(np.real(np.vdot(state, hm @ state)))
    report = {
        "t_filter": t_filter,
        "beta_total": beta_total,
        "steps": len(step_degrees),
        "step_degrees": step_degrees,
        "amplify_caps": caps,
        "a_ratio": a_ratio,
        "tail_bound": tail,
        "success_first": succ_first,
        "boost_beta": bb,
        "boost_factor": bf,
        "success_second": succ_second,
        "ground_overlap": _fidelity(state, dec.eigenvectors[:, 0]),
        "energy_estimate": e0_est,
        "energy_oracle": float(energies[0]),
        "ledger": agg,
        "oracle_log": list(orc.log),
    }
    return state, report


def ground_excited_energies(
    h,
    eps: float = 1e-3,
    seed: int = 0,
    oracles: Optional[LoggedOracles] = None,
) -> Tuple[float, float, dict]:
    """Lowest two energies via the power method on the reflected operator.

    Iterates on the encoding of (I - H)/2, whose top two eigenvalues map
    back through E = 1 - 2 mu. Degenerate ground spaces are rejected.
    """
    orc = oracles if oracles is not None else LoggedOracles()
    hm = hermitian_part(np.asarray(h, dtype=np.complex128))
    n = hm.shape[0]
    if n < 2:
        raise ConfigError("need dimension at least 2")
    dec = orc.eig(hm, "gap read for iteration count")
    energies = dec.eigenvalues
    if float(np.max(np.abs(energies))) > 1.0 + 1e-9:
        raise SpectrumOutOfRange("spectrum must lie in [-1, 1]")
    gap_b = float(energies[1] - energies[0]) / 2.0
    if gap_b < 1e-10:
        raise DegenerateGround(f"reflected gap {gap_b:.3e} below 1e-10")
    b = 0.5 * (np.eye(n) - hm)
    enc_b = encode_from_columns(b, min(eps, 1e-6), remove_frobenius=True)
    cfg = PowerMethodConfig(gap_Delta=gap_b, eps=eps, r=2, seed=seed)
    pairs, rep = pca_power_top_r(enc_b, cfg, oracles=orc)
    e0 = 1.0 - 2.0 * pairs[0][0]
    e1 = 1.0 - 2.0 * pairs[1][0]
    report = {
        "E0": e0,
        "E1": e1,
        "E0_oracle": float(energies[0]),
        "E1_oracle": float(energies[1]),
        "abs_error_E0": abs(e0 - float(energies[0])),
        "abs_error_E1": abs(e1 - float(energies[1])),
        "power_method": rep,
        "oracle_log": list(orc.log),
    }
    return e0, e1, report


# ---------------------------------------------------------------------------
# least-squares fitting


@dataclass(frozen=True)
class FitProblem:
    """Design matrix and targets, rescaled to the encoding promises.

    F has spectral norm strictly below 1 (factor f_scale divided out) and y
    is normalized (y_scale). basis is an opaque label tuple echoed into
    reports.
    """

    F: np.ndarray
    y: np.ndarray
    basis: Tuple[str, ...]
    f_scale: float
    y_scale: float


def fit_problem(f, y, basis: Sequence[str] = ()) -> FitProblem:
    fm = np.array(np.asarray(f), dtype=np.complex128)
    yv = np.array(np.asarray(y), dtype=np.complex128).reshape(-1)
    if fm.ndim != 2:
        raise DimensionMismatch("design matrix must be 2-d")
    if yv.shape[0] != fm.shape[0]:
        raise DimensionMismatch(
            f"target length {yv.shape[0]} does not match rows {fm.shape[0]}"
        )
    ny = float(np.linalg.norm(yv))
    if ny == 0.0:
        raise ZeroVector("target vector is zero")
    norm2 = float(np.linalg.norm(fm, 2))
    if norm2 == 0.0:
        raise RankDeficient("design matrix is zero")
    f_scale = 1.0
    if norm2 >= 1.0:
        f_scale = norm2 * (1.0 + 1e-6)
        fm = fm / f_scale
    fm.flags.writeable = False
    yv = yv / ny
    yv.flags.writeable = False
    return FitProblem(F=fm, y=yv, basis=tuple(basis), f_scale=f_scale, y_scale=ny)


def data_fit(
    prob: FitProblem,
    eps: float = 1e-3,
    oracles: Optional[LoggedOracles] = None,
) -> Tuple[np.ndarray, dict]:
    """Least-squares coefficient state lambda = (F*F)^(-1) F* y.

    The Gram inverse comes from the Hermitian dilation's density encoding;
    F* itself is cut out of the shifted dilation against a swap
    permutation. The report records the net constant c_net relating the
    pre-measurement amplitude to ||lambda||.
    """
    orc = oracles if oracles is not None else LoggedOracles()
    fm = prob.F
    m_rows, n_cols = fm.shape
    svals = orc.svdvals(fm, "rank premise and conditioning")
    if svals[-1] < 1e-10 * svals[0]:
        raise RankDeficient(
            f"singular-value ratio {svals[-1] / svals[0]:.3e} below 1e-10"
        )
    smin, smax = float(svals[-1]), float(svals[0])
    kappa_f = smax / smin
    dim = m_rows + n_cols
    fp = np.zeros((dim, dim), dtype=np.complex128)
    fp[:n_cols, n_cols:] = fm.conj().T
    fp[n_cols:, :n_cols] = fm

    enc_g = encode_gram(fp)
    enc_gn = _corner(enc_g, (0, n_cols), (0, n_cols))
    nf2 = float(np.linalg.norm(fm)) ** 2
    kappa_g = (2.0 * nf2 / (smin * smin)) * (1.0 + 1e-9)
    enc_ig = negative_power(enc_gn, 1.0, kappa_g, eps / 8)

    enc8 = _encode_shifted_eighth(fp, eps / 8)
    perm = np.zeros((dim, dim), dtype=np.complex128)
    perm[:n_cols, m_rows:] = np.eye(n_cols)
    perm[n_cols:, :m_rows] = np.eye(m_rows)
    enc_dg = product(enc8, exact_encoding(perm))
    enc_fd = _corner(enc_dg, (0, n_cols), (0, m_rows))
    enc_l = product(enc_ig, enc_fd)

    # block_ig = smin^2 (F*F)^{-1} / (2 (1+1e-9)); block_fd = F* / (8 alpha_perm),
    # so block_l = c_net (F*F)^{-1} F* with the constant below tracked exactly.
    c_net = (smin * smin / (2.0 * (1.0 + 1e-9))) / (8.0 * enc_dg.alpha)

    lam_state, p = apply_to_state(enc_l, prob.y)
    lam_norm = math.sqrt(p) / c_net
    ref = orc.lstsq(fm, prob.y, "solution verification")
    ref_norm = float(np.linalg.norm(ref))
    report = {
        "fidelity": _fidelity(ref / ref_norm, lam_state),
        "kappa_F": kappa_f,
        "lambda_norm": lam_norm,
        "lambda_norm_oracle": ref_norm,
        "c_net": float(c_net),
        "success_measured": float(p),
        "state": lam_state,
        "basis": list(prob.basis),
        "f_scale": prob.f_scale,
        "y_scale": prob.y_scale,
        "ledger": _cost_dict(enc_l.cost),
        "oracle_log": list(orc.log),
    }
    return lam_state, report


def predict(fit_report: dict, x_tilde) -> Tuple[complex, dict]:
    """Overlap estimate of a new point against the fitted coefficients.

    Returns the normalized overlap <x, lambda> / (||x|| kappa_F) and a
    report with every factor needed to undo the normalizations, including
    the reconstructed prediction in original units.
    """
    x = np.asarray(x_tilde, dtype=np.complex128).reshape(-1)
    nx = float(np.linalg.norm(x))
    if nx == 0.0:
        raise ZeroVector("prediction point is zero")
    lam_state = np.asarray(fit_report["state"])
    if x.shape[0] != lam_state.shape[0]:
        raise DimensionMismatch("prediction point length does not match coefficients")
    kappa_f = float(fit_report["kappa_F"])
    lam_norm = float(fit_report["lambda_norm"])
    overlap = complex(np.vdot(x / nx, lam_state) * lam_norm / kappa_f)
    f_scaled = overlap * nx * kappa_f
    f_value = f_scaled * fit_report["y_scale"] / fit_report["f_scale"]
    report = {
        "overlap": overlap,
        "prediction": complex(f_value),
        "rescale_factors": {
            "kappa_F": kappa_f,
            "x_norm": nx,
            "y_scale": fit_report["y_scale"],
            "f_scale": fit_report["f_scale"],
            "lambda_norm": lam_norm,
        },
    }
    return overlap, report
