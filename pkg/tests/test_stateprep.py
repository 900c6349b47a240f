import numpy as np
import pytest

from blockenc.core import extract_block
from blockenc.errors import (
    ConfigError,
    DimensionMismatch,
    NormPromiseViolated,
    NotNormalized,
    NotPowerOfTwoSamples,
    NotPSD,
    ProfileMismatch,
    ZeroMatrix,
    ZeroVector,
)
from blockenc.io import dataset_from_rows
from blockenc.stateprep import (
    TensorSumSpec,
    build_covariance,
    encode_from_columns,
    encode_gram,
    prepare_dense_state,
    prepare_tensor_sum,
)


def test_dense_basis_state():
    psi = np.array([1.0, 0.0, 0.0, 0.0])
    state, cost = prepare_dense_state(psi)
    np.testing.assert_array_equal(state, psi)
    assert cost.ancillas == 1


def test_dense_two_amplitudes():
    state, _ = prepare_dense_state(np.array([0.6, 0.8]))
    np.testing.assert_allclose(state, [0.6, 0.8])


def test_dense_rejects_unnormalized():
    with pytest.raises(NotNormalized):
        prepare_dense_state(np.array([3.0, 4.0]))


def test_dense_rejects_empty():
    with pytest.raises(DimensionMismatch):
        prepare_dense_state(np.array([]))


def test_dense_ancillas_count_support():
    psi = np.zeros(16)
    psi[[0, 3, 7, 9, 12]] = 1.0
    psi = psi / np.linalg.norm(psi)
    _, cost = prepare_dense_state(psi)
    assert cost.ancillas == 5


def test_dense_partition_reduces_preprocessing():
    psi = np.ones(16) / 4.0
    _, whole = prepare_dense_state(psi)
    _, split = prepare_dense_state(psi, partition=[4, 4, 4, 4])
    assert split.classical_preprocessing < whole.classical_preprocessing


def test_dense_partition_must_tile():
    psi = np.ones(4) / 2.0
    with pytest.raises(ConfigError):
        prepare_dense_state(psi, partition=[3, 3])


def test_tensor_sum_single_term():
    spec = TensorSumSpec(
        terms=((np.array([1.0, 0.0]), np.array([0.0, 1.0])),),
        coefficients=(1.0,),
    )
    state, cost = prepare_tensor_sum(spec)
    np.testing.assert_allclose(state, [0.0, 1.0, 0.0, 0.0])
    assert cost.success_probability == pytest.approx(1.0)


def test_tensor_sum_bell_pair():
    e0, e1 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    spec = TensorSumSpec(
        terms=((e0, e0), (e1, e1)),
        coefficients=(1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)),
    )
    state, cost = prepare_tensor_sum(spec)
    np.testing.assert_allclose(state, np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2.0))
    assert cost.success_probability == pytest.approx(0.5)
    assert cost.ancillas == 2


def test_tensor_sum_cancellation():
    v = np.array([1.0, 0.0])
    spec = TensorSumSpec(terms=((v,), (v,)), coefficients=(1.0, -1.0))
    with pytest.raises(ZeroVector):
        prepare_tensor_sum(spec)


def test_tensor_sum_profile_mismatch():
    # same total dimension, different factorization
    spec = TensorSumSpec(
        terms=(
            (np.array([1.0, 0.0]), np.array([1.0, 0.0])),
            (np.array([1.0, 0.0, 0.0, 0.0]),),
        ),
        coefficients=(1.0, 1.0),
    )
    with pytest.raises(ProfileMismatch):
        prepare_tensor_sum(spec)


def test_tensor_sum_count_mismatch():
    spec = TensorSumSpec(
        terms=((np.array([1.0, 0.0]),),), coefficients=(1.0, 2.0)
    )
    with pytest.raises(ConfigError):
        prepare_tensor_sum(spec)


def test_tensor_sum_matches_bruteforce():
    rng = np.random.default_rng(13)
    for _ in range(10):
        k = int(rng.integers(1, 4))
        dims = tuple(int(2 ** rng.integers(1, 4)) for _ in range(k))
        if int(np.prod(dims)) > 64:
            dims = (2, 2)
        nterms = int(rng.integers(1, 4))
        terms, coeffs = [], []
        for _ in range(nterms):
            terms.append(tuple(rng.normal(size=d) for d in dims))
            coeffs.append(complex(rng.normal(), rng.normal()))
        explicit = np.zeros(int(np.prod(dims)), dtype=np.complex128)
        for c, fac in zip(coeffs, terms):
            t = fac[0]
            for f in fac[1:]:
                t = np.kron(t, f)
            explicit += c * t
        if np.linalg.norm(explicit) < 1e-9:
            continue
        spec = TensorSumSpec(terms=tuple(terms), coefficients=tuple(coeffs))
        state, cost = prepare_tensor_sum(spec)
        np.testing.assert_allclose(
            state, explicit / np.linalg.norm(explicit), atol=1e-12
        )
        assert 0.0 < cost.success_probability <= 1.0


def test_gram_identity():
    enc = encode_gram(np.eye(2))
    assert enc.alpha == 1.0
    assert enc.error == 0.0
    np.testing.assert_allclose(np.asarray(enc.block), np.eye(2) / 2.0)
    assert enc.cost.queries == 2


def test_gram_is_unit_trace_density():
    rng = np.random.default_rng(19)
    for _ in range(10):
        a = rng.normal(size=(5, 3)) + 1j * rng.normal(size=(5, 3))
        rho = np.asarray(encode_gram(a).block)
        assert np.trace(rho).real == pytest.approx(1.0)
        np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
        assert np.linalg.eigvalsh(rho).min() >= -1e-12


def test_gram_rejects_zero_matrix():
    with pytest.raises(ZeroMatrix):
        encode_gram(np.zeros((2, 2)))


def test_columns_identity():
    enc = encode_from_columns(np.eye(2))
    np.testing.assert_allclose(
        np.asarray(extract_block(enc)), np.eye(2) / np.sqrt(2.0), atol=1e-8
    )


def test_columns_rank_deficient_projector():
    enc = encode_from_columns(np.diag([1.0, 0.0]))
    np.testing.assert_allclose(
        np.asarray(extract_block(enc)), np.diag([1.0, 0.0]), atol=1e-8
    )


def test_columns_psd_recovers_normalized_matrix():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(8, 8))
    h = a @ a.T
    h = 0.8 * h / np.linalg.norm(h, 2)
    enc = encode_from_columns(h)
    np.testing.assert_allclose(
        np.asarray(extract_block(enc)), h / np.linalg.norm(h), atol=1e-8
    )


def test_columns_norm_promise():
    with pytest.raises(NormPromiseViolated):
        encode_from_columns(1.5 * np.eye(2))


def test_columns_strict_rejects_indefinite():
    with pytest.raises(NotPSD):
        encode_from_columns(np.array([[0.0, 0.5], [0.5, 0.0]]), strict=True)


def test_columns_remove_frobenius():
    d = np.diag([0.6, 0.3])  # Frobenius norm < 1
    enc = encode_from_columns(d, remove_frobenius=True)
    np.testing.assert_allclose(np.asarray(extract_block(enc)), d, atol=1e-8)
    d3 = np.diag([0.9, 0.9, 0.9])  # Frobenius norm > 1
    enc3 = encode_from_columns(d3, remove_frobenius=True)
    np.testing.assert_allclose(np.asarray(extract_block(enc3)), d3, atol=1e-6)


def test_covariance_two_orthogonal_samples():
    ds, _ = dataset_from_rows([[1.0, 0.0], [0.0, 1.0]], normalize=True)
    enc = build_covariance(ds)
    assert enc.alpha == 1.0
    np.testing.assert_allclose(
        np.asarray(extract_block(enc)),
        np.array([[1.0, -1.0], [-1.0, 1.0]]) / 16.0,
        atol=1e-15,
    )


def test_covariance_identical_samples_vanishes():
    ds, _ = dataset_from_rows([[1.0, 0.0], [1.0, 0.0]], normalize=True)
    enc = build_covariance(ds)
    np.testing.assert_allclose(
        np.asarray(extract_block(enc)), np.zeros((2, 2)), atol=1e-15
    )


def test_covariance_single_sample_vanishes():
    ds, _ = dataset_from_rows([[0.6, 0.8]], normalize=True)
    enc = build_covariance(ds)
    np.testing.assert_allclose(
        np.asarray(extract_block(enc)), np.zeros((2, 2)), atol=1e-15
    )


def test_covariance_matches_classical_formula():
    rng = np.random.default_rng(29)
    for _ in range(8):
        m = int(2 ** rng.integers(1, 4))
        n = int(rng.integers(2, 6))
        ds, _ = dataset_from_rows(rng.normal(size=(m, n)), normalize=True)
        x = ds.samples.real
        mu = x.mean(axis=0)
        c = x.T @ x / m - np.outer(mu, mu)
        enc = build_covariance(ds)
        np.testing.assert_allclose(
            2.0 * np.asarray(extract_block(enc)), c, atol=1e-12
        )
        np.testing.assert_allclose(
            np.asarray(enc.block), np.asarray(enc.block).conj().T, atol=1e-12
        )


def test_covariance_requires_power_of_two():
    ds, _ = dataset_from_rows(np.ones((3, 2)), normalize=True)
    with pytest.raises(NotPowerOfTwoSamples):
        build_covariance(ds)


def test_covariance_requires_normalized():
    ds, _ = dataset_from_rows(np.ones((2, 2)), normalize=False)
    with pytest.raises(NotNormalized):
        build_covariance(ds)
