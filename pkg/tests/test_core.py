import numpy as np
import pytest

from blockenc.core import (
    BlockEncoding,
    ComplexMatrix,
    ResourceCost,
    amplify,
    apply_to_state,
    encode_diagonal,
    encode_projector,
    exact_encoding,
    extract_block,
    identity_encoding,
    linear_combination,
    product,
    scale_down,
    tensor_product,
    unitary_dilation,
)
from blockenc.errors import (
    AmplificationOverflow,
    DimensionMismatch,
    EmptyTermList,
    IndexOutOfRange,
    InvalidScale,
    NormOverflow,
    NotNormalized,
    ZeroOutcome,
)

X = np.array([[0.0, 1.0], [1.0, 0.0]])
Z = np.diag([1.0, -1.0])


def test_complex_matrix_rejects_nonfinite():
    with pytest.raises(Exception):
        ComplexMatrix.from_array(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(Exception):
        ComplexMatrix.from_array(np.array([[np.inf, 0.0], [0.0, 1.0]]))


def test_complex_matrix_entries_frozen():
    m = ComplexMatrix.from_array(np.eye(2))
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5.0


def test_resource_cost_validation():
    with pytest.raises(Exception):
        ResourceCost(depth=-1.0)
    with pytest.raises(Exception):
        ResourceCost(success_probability=0.0)
    with pytest.raises(Exception):
        ResourceCost(success_probability=1.5)


def test_block_norm_overflow_rejected():
    with pytest.raises(NormOverflow):
        BlockEncoding(
            block=ComplexMatrix.from_array(1.5 * np.eye(2)),
            alpha=1.0,
            ancilla_qubits=0,
            error=0.0,
            cost=ResourceCost(),
        )


def test_exact_encoding_default_alpha_subnormalizes():
    a = np.array([[0.0, 3.0], [0.0, 0.0]])
    enc = exact_encoding(a)
    assert enc.alpha >= 3.0
    assert np.linalg.norm(np.asarray(enc.block), 2) <= 1.0 + 1e-9
    np.testing.assert_allclose(np.asarray(extract_block(enc)), a, atol=1e-12)


def test_extract_block_identity():
    enc = identity_encoding(2)
    np.testing.assert_allclose(np.asarray(extract_block(enc)), np.eye(2))


def test_extract_block_undoes_subnormalization():
    enc = exact_encoding(np.eye(2), 2.0)
    np.testing.assert_allclose(np.asarray(extract_block(enc)), np.eye(2))
    np.testing.assert_allclose(np.asarray(enc.block), np.eye(2) / 2.0)


def test_apply_identity_returns_input():
    phi = np.array([0.6, 0.8])
    state, p = apply_to_state(identity_encoding(2), phi)
    np.testing.assert_allclose(state, phi)
    assert p == pytest.approx(1.0)


def test_apply_annihilated_vector_raises():
    enc = exact_encoding(np.diag([1.0, 0.0]), 1.0)
    with pytest.raises(ZeroOutcome):
        apply_to_state(enc, np.array([0.0, 1.0]))


def test_apply_diagonal_rescales():
    enc = exact_encoding(np.diag([0.6, 0.8]), 1.0)
    phi = np.array([1.0, 1.0]) / np.sqrt(2.0)
    state, p = apply_to_state(enc, phi)
    np.testing.assert_allclose(state, np.array([0.6, 0.8]) / 1.0, atol=1e-12)
    assert p == pytest.approx(0.5)


def test_apply_success_matches_amplitude_formula():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = int(rng.integers(2, 9))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        enc = exact_encoding(a)
        phi = rng.normal(size=n) + 1j * rng.normal(size=n)
        phi = phi / np.linalg.norm(phi)
        state, p = apply_to_state(enc, phi)
        expected = np.linalg.norm(np.asarray(extract_block(enc)) @ phi) ** 2
        assert abs(p - expected / enc.alpha**2) < 1e-12


def test_product_identity_absorber():
    b = exact_encoding(np.array([[0.1, 0.2], [0.3, 0.4]]), 1.0)
    out = product(identity_encoding(2), b)
    np.testing.assert_allclose(
        np.asarray(extract_block(out)), np.asarray(extract_block(b))
    )


def test_product_xz():
    out = product(exact_encoding(X, 1.0), exact_encoding(Z, 1.0))
    np.testing.assert_allclose(
        np.asarray(extract_block(out)), np.array([[0.0, -1.0], [1.0, 0.0]])
    )


def test_product_alpha_and_error_compose():
    a = exact_encoding(np.eye(2) / 2.0, 2.0, error=0.01)
    b = exact_encoding(np.eye(2) / 3.0, 3.0, error=0.001)
    out = product(a, b)
    assert out.alpha == pytest.approx(6.0)
    # alpha_a * err_b + alpha_b * err_a
    assert out.error == pytest.approx(2.0 * 0.001 + 3.0 * 0.01)
    assert out.cost.queries == a.cost.queries + b.cost.queries


def test_product_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        product(identity_encoding(2), identity_encoding(3))


def test_lcu_xz():
    out = linear_combination([(1.0, exact_encoding(X, 1.0)), (1.0, exact_encoding(Z, 1.0))])
    assert out.alpha == pytest.approx(2.0)
    np.testing.assert_allclose(np.asarray(out.block), (X + Z) / 2.0)
    np.testing.assert_allclose(np.asarray(extract_block(out)), X + Z)


def test_lcu_cancellation_gives_zero_block():
    m = exact_encoding(X, 1.0)
    out = linear_combination([(1.0, m), (-1.0, m)])
    np.testing.assert_allclose(np.asarray(out.block), np.zeros((2, 2)), atol=1e-15)


def test_lcu_single_term_unchanged():
    m = exact_encoding(X, 1.0)
    out = linear_combination([(1.0, m)])
    np.testing.assert_allclose(np.asarray(out.block), np.asarray(m.block))
    assert out.alpha == pytest.approx(m.alpha)
    assert out.ancilla_qubits == m.ancilla_qubits


def test_lcu_empty_terms():
    with pytest.raises(EmptyTermList):
        linear_combination([])


def test_lcu_alpha_is_weighted_sum():
    rng = np.random.default_rng(3)
    for _ in range(10):
        m = int(rng.integers(1, 5))
        terms = []
        expected = 0.0
        for _ in range(m):
            c = float(rng.uniform(-2.0, 2.0))
            if c == 0.0:
                c = 1.0
            enc = exact_encoding(rng.normal(size=(3, 3)))
            terms.append((c, enc))
            expected += abs(c) * enc.alpha
        out = linear_combination(terms)
        assert out.alpha == pytest.approx(expected)


def test_tensor_identities():
    out = tensor_product([identity_encoding(2), identity_encoding(2)])
    np.testing.assert_allclose(np.asarray(extract_block(out)), np.eye(4))


def test_tensor_xz_kron():
    out = tensor_product([exact_encoding(X, 1.0), exact_encoding(Z, 1.0)])
    np.testing.assert_allclose(np.asarray(extract_block(out)), np.kron(X, Z))


def test_tensor_alpha_multiplies_depth_maxes():
    a = exact_encoding(np.eye(2) / 2.0, 2.0, depth=5.0)
    b = exact_encoding(np.eye(2) / 3.0, 3.0, depth=2.0)
    out = tensor_product([a, b])
    assert out.alpha == pytest.approx(6.0)
    assert out.cost.depth == pytest.approx(5.0)


def test_tensor_empty_list():
    with pytest.raises(EmptyTermList):
        tensor_product([])


def test_scale_down_divides_block():
    a = np.array([[0.2, 0.1], [0.0, 0.3]])
    out = scale_down(exact_encoding(a, 1.0), 2.0)
    np.testing.assert_allclose(np.asarray(extract_block(out)), a / 2.0)


def test_scale_down_identity_by_four():
    out = scale_down(identity_encoding(2), 4.0)
    np.testing.assert_allclose(np.asarray(extract_block(out)), np.eye(2) / 4.0)


def test_scale_down_chains():
    enc = identity_encoding(2)
    out = scale_down(scale_down(enc, 2.0), 2.0)
    np.testing.assert_allclose(np.asarray(extract_block(out)), np.eye(2) / 4.0)
    assert out.ancilla_qubits == enc.ancilla_qubits + 2
    assert out.cost.depth == pytest.approx(enc.cost.depth + 2.0)


def test_scale_down_rejects_p_at_most_one():
    with pytest.raises(InvalidScale):
        scale_down(identity_encoding(2), 1.0)


def test_amplify_near_identity_gamma():
    enc = exact_encoding(np.diag([0.3, 0.2]), 1.0)
    out = amplify(enc, 1.0 + 1e-12, 0.5, 1e-8)
    np.testing.assert_allclose(
        np.asarray(extract_block(out)), np.diag([0.3, 0.2]), rtol=1e-9
    )


def test_amplify_doubles_singular_values():
    enc = exact_encoding(np.diag([0.3, 0.2]), 1.0)
    out = amplify(enc, 2.0, 0.3, 1e-6)
    np.testing.assert_allclose(
        np.asarray(extract_block(out)), np.diag([0.6, 0.4]), rtol=1e-6
    )
    assert out.cost.queries > enc.cost.queries
    assert out.ancilla_qubits == enc.ancilla_qubits + 1


def test_amplify_overflow():
    enc = exact_encoding(np.diag([0.8, 0.1]), 1.0)
    with pytest.raises(AmplificationOverflow):
        amplify(enc, 2.0, 0.1, 1e-6)


def test_projector_basis_states():
    np.testing.assert_allclose(
        np.asarray(extract_block(encode_projector(1, 2))), np.diag([1.0, 0.0])
    )
    np.testing.assert_allclose(
        np.asarray(extract_block(encode_projector(2, 2))), np.diag([0.0, 1.0])
    )


def test_projector_idempotent():
    p = np.asarray(extract_block(encode_projector(3, 4)))
    np.testing.assert_allclose(p @ p, p)
    assert p[2, 2] == pytest.approx(1.0)


def test_projector_index_range():
    with pytest.raises(IndexOutOfRange):
        encode_projector(0, 4)
    with pytest.raises(IndexOutOfRange):
        encode_projector(5, 4)


def test_encode_diagonal_cases():
    np.testing.assert_allclose(
        np.asarray(extract_block(encode_diagonal(np.array([1.0, 0.0])))),
        np.diag([1.0, 0.0]),
    )
    psi = np.array([1.0, 1.0]) / np.sqrt(2.0)
    np.testing.assert_allclose(
        np.asarray(extract_block(encode_diagonal(psi))), np.diag(psi)
    )


def test_encode_diagonal_random_entrywise():
    rng = np.random.default_rng(5)
    for _ in range(10):
        n = int(2 ** rng.integers(1, 5))
        psi = rng.normal(size=n) + 1j * rng.normal(size=n)
        psi = psi / np.linalg.norm(psi)
        enc = encode_diagonal(psi)
        np.testing.assert_allclose(
            np.diag(np.asarray(extract_block(enc))), psi, atol=1e-12
        )
        assert enc.ancilla_qubits == int(np.ceil(np.log2(n))) + 3


def test_encode_diagonal_requires_unit_norm():
    with pytest.raises(NotNormalized):
        encode_diagonal(np.array([1.0, 1.0]))


def test_dilation_identity_block():
    u = np.asarray(unitary_dilation(identity_encoding(2)))
    np.testing.assert_allclose(u[:2, :2], np.eye(2), atol=1e-12)
    np.testing.assert_allclose(u[2:, 2:], -np.eye(2), atol=1e-12)
    np.testing.assert_allclose(u[:2, 2:], np.zeros((2, 2)), atol=1e-12)


def test_dilation_zero_block_is_swap():
    enc = exact_encoding(np.zeros((2, 2)), 1.0)
    u = np.asarray(unitary_dilation(enc))
    np.testing.assert_allclose(u[:2, 2:], np.eye(2), atol=1e-12)
    np.testing.assert_allclose(u[2:, :2], np.eye(2), atol=1e-12)


def test_dilation_unitarity_random_contractions():
    rng = np.random.default_rng(17)
    for _ in range(15):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(2, 7))
        b = rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))
        b = 0.9 * b / np.linalg.norm(b, 2)
        enc = exact_encoding(b, 1.0)
        u = np.asarray(unitary_dilation(enc))
        np.testing.assert_allclose(
            u.conj().T @ u, np.eye(u.shape[0]), atol=1e-9
        )
        np.testing.assert_allclose(u[:n, :m], b, atol=1e-12)


def test_arithmetic_matches_dense_computation():
    # composed operations agree with explicit matrix algebra
    rng = np.random.default_rng(23)
    for _ in range(10):
        n = int(rng.integers(2, 17))
        a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        b = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        ea, eb = exact_encoding(a), exact_encoding(b)
        np.testing.assert_allclose(
            np.asarray(extract_block(product(ea, eb))), a @ b, atol=1e-9
        )
        np.testing.assert_allclose(
            np.asarray(extract_block(linear_combination([(1.0, ea), (-2.0, eb)]))),
            a - 2.0 * b,
            atol=1e-9,
        )
        np.testing.assert_allclose(
            np.asarray(extract_block(scale_down(ea, 3.0))), a / 3.0, atol=1e-9
        )


def test_cost_ledger_monotone_under_composition():
    a = exact_encoding(X, 1.0, depth=2.0, ancillas=1)
    b = exact_encoding(Z, 1.0, depth=3.0, ancillas=2)
    for out in (product(a, b), linear_combination([(1.0, a), (1.0, b)])):
        assert out.cost.depth >= max(a.cost.depth, b.cost.depth)
        assert out.cost.queries >= a.cost.queries + b.cost.queries
        assert out.cost.ancillas >= max(a.cost.ancillas, b.cost.ancillas)
