import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bslab import linalg as la
from bslab.errors import DimensionMismatch, NotHermitian, SingularOperator

from conftest import random_hermitian, random_state

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)


def test_eig_diagonal():
    eig = la.hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(eig.eigenvalues, [1.0, 2.0, 3.0])
    # columns are the permuted standard basis
    np.testing.assert_array_equal(np.abs(eig.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_eig_pauli_x():
    np.testing.assert_allclose(la.eigvalsh(X), [-1.0, 1.0], atol=1e-15)


def test_eig_one_by_one():
    eig = la.hermitian_eig([[2.5]])
    assert eig.eigenvalues[0] == 2.5


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        la.hermitian_eig([[1, 2], [0, 1]])


def test_eig_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        la.hermitian_eig(np.zeros((2, 3)))


def test_eig_zero_matrix():
    eig = la.hermitian_eig(np.zeros((3, 3)))
    np.testing.assert_array_equal(eig.eigenvalues, 0.0)


def test_eig_degenerate_spectrum(rng):
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    m = (u * np.array([1.0, 1.0, 2.0, 2.0])) @ u.conj().T
    eig = la.hermitian_eig(m)
    np.testing.assert_allclose(eig.eigenvalues, [1, 1, 2, 2], atol=1e-13)
    assert np.linalg.norm(eig.reconstruct() - m) < 1e-13


@pytest.mark.parametrize("n", [2, 3, 5, 8, 16, 32])
def test_eig_matches_lapack(rng, n):
    for _ in range(10):
        m = random_hermitian(rng, n)
        eig = la.hermitian_eig(m)
        np.testing.assert_allclose(eig.eigenvalues, np.linalg.eigvalsh(m), atol=1e-12)
        assert np.linalg.norm(eig.reconstruct() - m) <= 1e-12 * max(1, np.linalg.norm(m))
        v = eig.eigenvectors
        assert np.linalg.norm(v.conj().T @ v - np.eye(n)) <= 1e-12
        assert np.all(np.diff(eig.eigenvalues) >= 0)


def test_eig_wide_dynamic_range(rng):
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    lam = np.array([1e-9, 1e-5, 0.3, 1.0])
    m = (u * lam) @ u.conj().T
    eig = la.hermitian_eig(m)
    assert np.linalg.norm(eig.reconstruct() - m) <= 1e-12


def test_matrix_fn_examples():
    np.testing.assert_array_equal(la.logm(np.eye(4)), np.zeros((4, 4)))
    np.testing.assert_allclose(la.sqrtm(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-15)
    np.testing.assert_allclose(la.invm(np.diag([4.0, 0.5])), np.diag([0.25, 2.0]), atol=1e-15)
    np.testing.assert_allclose(la.powm(np.diag([4.0, 9.0]), -0.5), np.diag([0.5, 1 / 3]), atol=1e-15)
    np.testing.assert_allclose(la.expm(np.zeros((2, 2))), np.eye(2))


def test_expm_pauli():
    # e^{i t X} style check through a real rotation generator: exp(tZ) = diag(e^t, e^-t)
    np.testing.assert_allclose(la.expm(0.7 * Z), np.diag([np.exp(0.7), np.exp(-0.7)]), atol=1e-15)
    # X has eigenvalues +-1: exp(tX) = cosh t + X sinh t
    t = 0.3
    np.testing.assert_allclose(la.expm(t * X), np.cosh(t) * np.eye(2) + np.sinh(t) * X, atol=1e-15)


def test_singular_guards():
    with pytest.raises(SingularOperator):
        la.logm(np.diag([1.0, 0.0]))
    with pytest.raises(SingularOperator):
        la.invm(np.diag([1.0, 1e-13]))
    with pytest.raises(SingularOperator):
        la.powm(np.diag([1.0, 0.0]), -0.5)
    with pytest.raises(SingularOperator):
        la.sqrtm(np.diag([1.0, -1e-6]))
    # tiny negative rounding is clamped
    np.testing.assert_array_equal(la.sqrtm(np.diag([4.0, -1e-14])), np.diag([2.0, 0.0]))


def test_matrix_fn_unknown():
    with pytest.raises(ValueError):
        la.matrix_fn(np.eye(2), "tan")
    with pytest.raises(ValueError):
        la.matrix_fn(np.eye(2), "pow")


def test_exp_log_round_trip(rng):
    for d in (2, 3, 4, 8):
        for _ in range(20):
            m = np.asarray(random_state(rng, d)) * 3
            back = la.expm(la.logm(m))
            assert np.linalg.norm(back - m) <= 1e-10 * max(1, np.linalg.norm(m))


def test_sqrt_squared(rng):
    for d in (2, 4, 6):
        m = np.asarray(random_state(rng, d))
        h = la.powm(m, 0.5)
        assert np.linalg.norm(h @ h - m) <= 1e-10


def test_kron_examples(rng):
    np.testing.assert_array_equal(la.kron(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(la.kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    a, b = random_hermitian(rng, 3), random_hermitian(rng, 2)
    k = la.kron(a, b)
    assert k.shape == (6, 6)
    assert k[1 * 2 + 1, 2 * 2 + 0] == a[1, 2] * b[1, 0]
    assert np.isclose(np.trace(k), np.trace(a) * np.trace(b), atol=1e-12)


def test_partial_trace_product(rng):
    ra, rb = np.asarray(random_state(rng, 2)), np.asarray(random_state(rng, 3))
    m = np.kron(ra, rb)
    np.testing.assert_allclose(la.partial_trace(m, 2, 3, "A"), ra, atol=1e-15)
    np.testing.assert_allclose(la.partial_trace(m, 2, 3, "B"), rb, atol=1e-15)


def test_partial_trace_bell():
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    bell = np.outer(phi, phi)
    np.testing.assert_allclose(la.partial_trace(bell, 2, 2, "A"), np.eye(2) / 2, atol=1e-16)
    np.testing.assert_allclose(la.partial_trace(bell, 2, 2, "B"), np.eye(2) / 2, atol=1e-16)


def test_partial_trace_errors():
    with pytest.raises(DimensionMismatch):
        la.partial_trace(np.eye(4), 2, 3)
    with pytest.raises(ValueError):
        la.partial_trace(np.eye(4), 2, 2, keep="C")


def test_partial_trace_scaled_factors(rng):
    a, b = random_hermitian(rng, 2), random_hermitian(rng, 2)
    np.testing.assert_allclose(la.partial_trace(np.kron(a, b), 2, 2, "A"), a * np.trace(b), atol=1e-13)


def test_partial_trace_by_elementwise_sum(rng):
    # oracle: explicit index sums
    m = random_hermitian(rng, 6)
    expected_a = np.array([[sum(m[i * 3 + k, j * 3 + k] for k in range(3)) for j in range(2)] for i in range(2)])
    expected_b = np.array([[sum(m[i * 3 + k, i * 3 + l] for i in range(2)) for l in range(3)] for k in range(3)])
    np.testing.assert_allclose(la.partial_trace(m, 2, 3, "A"), expected_a, atol=1e-14)
    np.testing.assert_allclose(la.partial_trace(m, 2, 3, "B"), expected_b, atol=1e-14)


def test_norm_examples(rng):
    assert la.norm(np.diag([1.0, -2.0]), "trace") == pytest.approx(3.0, abs=1e-15)
    assert la.norm(np.diag([1.0, -2.0]), "operator") == pytest.approx(2.0, abs=1e-15)
    assert la.norm(np.diag([3.0, 4.0]), "frobenius") == pytest.approx(5.0)
    u = np.linalg.qr(rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5)))[0]
    assert la.norm(u, "operator") == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        la.norm(np.eye(2), "nuclear")


def test_trace_distance_of_states_at_most_two(rng):
    for d in (2, 3, 4):
        for _ in range(20):
            r, s = np.asarray(random_state(rng, d)), np.asarray(random_state(rng, d))
            assert la.norm(r - s, "trace") <= 2 + 1e-12


def test_norm_general_matrix_matches_svd(rng):
    for _ in range(20):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        s = np.linalg.svd(m, compute_uv=False)
        assert la.norm(m, "trace") == pytest.approx(s.sum(), rel=1e-10)
        assert la.norm(m, "operator") == pytest.approx(s[0], rel=1e-10)


def test_norm_tiny_non_hermitian():
    # must not be mistaken for Hermitian because its entries are small
    m = np.array([[0, 1e-15], [0, 0]], dtype=complex)
    assert la.norm(m, "trace") == pytest.approx(1e-15, rel=1e-6)


def test_commutator_examples(rng):
    np.testing.assert_array_equal(la.commutator(np.diag([1, 2]), np.diag([3, 4])), np.zeros((2, 2)))
    np.testing.assert_allclose(la.commutator(X, Z), -2j * Y)
    with pytest.raises(DimensionMismatch):
        la.commutator(np.eye(2), np.eye(3))


def test_commutator_norm_conjugation_invariant(rng):
    a, b = random_hermitian(rng, 4), random_hermitian(rng, 4)
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    c1 = la.norm(la.commutator(a, b), "trace")
    c2 = la.norm(la.commutator(u @ a @ u.conj().T, u @ b @ u.conj().T), "trace")
    assert c1 == pytest.approx(c2, rel=1e-10)


def test_kms_inner_identity(rng):
    for d in (2, 3, 4):
        rho = random_state(rng, d)
        assert la.kms_inner(np.eye(d), np.eye(d), rho) == pytest.approx(1.0, abs=1e-12)


def test_kms_inner_eta_identity(rng):
    # <s_A x s_B, s_A^-1 x s_B^-1>_{r_A x r_B} = tr[eta_A x eta_B]
    from bslab.qf import eta_operator

    ra, rb, sa, sb = (np.asarray(random_state(rng, 2)) for _ in range(4))
    lhs = la.kms_inner(np.kron(sa, sb), np.kron(la.invm(sa), la.invm(sb)), np.kron(ra, rb))
    rhs = np.trace(np.kron(eta_operator(ra, sa), eta_operator(rb, sb)))
    assert lhs == pytest.approx(rhs, abs=1e-12)


def test_kms_inner_commuting_is_one(rng):
    from conftest import commuting_pair

    rho_a, sigma_a, _, _ = commuting_pair(rng, 2)
    rho_b, sigma_b, _, _ = commuting_pair(rng, 3)
    sa, sb = np.asarray(sigma_a), np.asarray(sigma_b)
    v = la.kms_inner(np.kron(sa, sb), np.kron(la.invm(sa), la.invm(sb)), np.kron(rho_a, rho_b))
    assert v == pytest.approx(1.0, abs=1e-12)


def test_kms_inner_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        la.kms_inner(np.eye(2), np.eye(3), np.eye(2) / 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_holder(seed, n):
    rng = np.random.default_rng(seed)
    x, y = random_hermitian(rng, n), rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    assert abs(np.trace(x @ y)) <= la.norm(x, "operator") * la.norm(y, "trace") * (1 + 1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_kms_self_inner_nonnegative(seed, d):
    rng = np.random.default_rng(seed)
    rho = random_state(rng, d)
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    v = la.kms_inner(a, a, rho)
    assert abs(v.imag) <= 1e-12 * max(1, abs(v))
    assert v.real >= -1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_partial_trace_linear_and_trace_preserving(seed, dims):
    rng = np.random.default_rng(seed)
    n = dims[0] * dims[1]
    a, b = random_hermitian(rng, n), random_hermitian(rng, n)
    for keep in "AB":
        lhs = la.partial_trace(0.3 * a + b, *dims, keep)
        rhs = 0.3 * la.partial_trace(a, *dims, keep) + la.partial_trace(b, *dims, keep)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)
        assert np.trace(la.partial_trace(a, *dims, keep)) == pytest.approx(np.trace(a), abs=1e-12)
