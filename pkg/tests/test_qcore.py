import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from memsconv import qcore as q

S2 = 1 / math.sqrt(2)


def hermitian(draw_floats):
    a = np.array(draw_floats[:16]).reshape(4, 4) + 1j * np.array(draw_floats[16:]).reshape(4, 4)
    return a + a.conj().T


matrices = st.lists(st.floats(-10, 10, allow_nan=False), min_size=32, max_size=32).map(hermitian)


# -- oracles written out by hand -------------------------------------------------

def test_bell_vectors_explicit():
    assert np.allclose(q.bell_ket(1), [S2, 0, 0, S2])
    assert np.allclose(q.bell_ket(2), [S2, 0, 0, -S2])
    assert np.allclose(q.bell_ket(3), [0, S2, S2, 0])
    assert np.allclose(q.bell_ket(4), [0, -S2, S2, 0])
    gram = np.array([[q.bell_ket(i).conj() @ q.bell_ket(j) for j in range(1, 5)] for i in range(1, 5)])
    assert np.allclose(gram, np.eye(4), atol=1e-15)


def test_mems_explicit_matrix():
    l1, l2, l3, l4 = 0.5, 0.3, 0.15, 0.05
    expected = np.array([
        [(l1 + l3) / 2, 0, 0, (l1 - l3) / 2],
        [0, l2, 0, 0],
        [0, 0, l4, 0],
        [(l1 - l3) / 2, 0, 0, (l1 + l3) / 2],
    ])
    assert np.allclose(q.mems((l1, l2, l3, l4)), expected, atol=1e-15)


def test_bell_diagonal_permutation():
    s = (0.7, 0.2, 0.07, 0.03)
    sigma = q.bell_diagonal(s, (2, 1, 4, 3))
    assert [q.overlap(sigma, i) for i in range(1, 5)] == pytest.approx([0.2, 0.7, 0.03, 0.07], abs=1e-15)
    with pytest.raises(ValueError):
        q.bell_diagonal(s, (1, 1, 2, 3))


def test_partial_transpose_elementwise():
    for i, j, k, l in np.ndindex(2, 2, 2, 2):
        x = np.zeros((4, 4))
        x[2 * i + j, 2 * k + l] = 1
        y = np.zeros((4, 4))
        y[2 * k + j, 2 * i + l] = 1
        assert np.array_equal(q.partial_transpose(x), y)


def test_partial_transpose_of_phi1():
    assert np.allclose(q.hermitian_eigenvalues(q.partial_transpose(q.bell_projector(1))), [0.5, 0.5, 0.5, -0.5])


@given(matrices)
def test_jacobi_matches_numpy(x):
    assert np.allclose(q.hermitian_eigenvalues(x), np.linalg.eigvalsh(x)[::-1], atol=1e-10 * max(1, np.abs(x).max()))


@given(matrices)
def test_eigh_reconstructs(x):
    w, v = q.hermitian_eigh(x)
    assert np.allclose(v.conj().T @ v, np.eye(4), atol=1e-12)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, x, atol=1e-10 * max(1, np.abs(x).max()))


def test_eigen_rejects_non_hermitian():
    with pytest.raises(ValueError):
        q.hermitian_eigenvalues(np.triu(np.ones((4, 4))))


def test_spectrum_validation():
    assert q.Spectrum((0.4, 0.3, 0.2, 0.1)).rank == 4
    assert q.Spectrum((0.75, 0.25, 0, 0)).rank == 2
    for bad in [(0.3, 0.4, 0.2, 0.1), (0.5, 0.3, 0.1, 0.0), (1.1, 0, 0, -0.1), (0.5, 0.5)]:
        with pytest.raises(ValueError):
            q.Spectrum(bad)


@given(st.integers(0, 10_000), st.integers(1, 4))
def test_random_spectrum_valid(seed, rank):
    s = q.random_spectrum(np.random.default_rng(seed), rank)
    assert s.rank == rank
    assert math.fsum(s) == pytest.approx(1, abs=1e-12)


# -- entanglement ------------------------------------------------------------------

@pytest.mark.parametrize("s,entangled", [
    ((0.75, 0.25, 0, 0), True),
    ((0.7, 0.2, 0.07, 0.03), True),
    ((0.25, 0.25, 0.25, 0.25), False),
    ((1 / 3, 1 / 3, 1 / 3, 0), False),
    ((0.4, 0.3, 0.2, 0.1), False),
])
def test_mems_entanglement(s, entangled):
    assert q.is_entangled(q.mems(s)) == entangled


@given(st.integers(0, 10_000))
def test_mems_entangled_iff_not_absolutely_separable(seed):
    # the MEMS is the most entangled state of its spectrum, so it is entangled exactly
    # when the absolute-separability inequality fails
    s = q.random_spectrum(np.random.default_rng(seed))
    gap = s[0] - s[2] - 2 * math.sqrt(s[1] * s[3])
    if abs(gap) > 1e-6:
        assert q.is_entangled(q.mems(s)) == (gap > 0)


def test_bell_diagonal_entangled_iff_weight_above_half():
    assert q.is_entangled(q.bell_mixture([0.51, 0.49, 0, 0]))
    assert not q.is_entangled(q.bell_mixture([0.5, 0.2, 0.2, 0.1]))


def test_product_and_separable_states_are_ppt(rng):
    for _ in range(200):
        assert q.min_pt_eigenvalue(q.random_separable_state(rng)) >= -1e-12


@pytest.mark.parametrize("sign", [1, -1])
@pytest.mark.parametrize("tilde", [False, True])
def test_tau_states_valid(sign, tilde):
    for a in np.linspace(0, 1, 11):
        rho = q.tau_state(a, sign, tilde)
        q.check_density_matrix(rho)
        assert q.overlap(rho, 2 if tilde else 1) == pytest.approx(2 * a * (1 - a), abs=1e-14)
        assert rho[1, 1].real == pytest.approx(a * a) and rho[2, 2].real == pytest.approx((1 - a) ** 2)


@pytest.mark.parametrize("a", [0.0, 0.3, 0.5, 0.9])
def test_tau_state_is_a_product_mixture(a):
    # with c = sqrt(a(1-a)), (c, a, 1-a, c) and (c, -a, -(1-a), c) have singular reshapes,
    # and their equal mixture is the (+, Phi_1) tau state
    c = math.sqrt(a * (1 - a))
    u = np.array([c, a, 1 - a, c])
    w = np.array([c, -a, -(1 - a), c])
    assert abs(np.linalg.det(u.reshape(2, 2))) < 1e-15 and abs(np.linalg.det(w.reshape(2, 2))) < 1e-15
    assert np.allclose(0.5 * (np.outer(u, u) + np.outer(w, w)), q.tau_state(a), atol=1e-15)


def test_perturbed_phi1_determinant_constant():
    for eps in (0.0, 0.1, 2.0):
        v = q.phi1_perturbed(eps) * math.sqrt(1 + eps * eps)
        m = v.reshape(2, 2)
        assert np.linalg.det(m) == pytest.approx(0.5)


def test_max_entangling_epsilon():
    assert q.max_entangling_epsilon((0.75, 0.25, 0, 0)) == 1.0
    s = (0.34, 0.33, 0.33, 0)
    e = q.max_entangling_epsilon(s)
    assert 0 < e < 1
    assert q.is_entangled(q.perturbed_mems(s, 0.999 * e))
    assert not q.is_entangled(q.perturbed_mems(s, e + 1e-6))
    with pytest.raises(ValueError):
        q.max_entangling_epsilon((1 / 3, 1 / 3, 1 / 3, 0))


def test_check_density_matrix_rejects():
    with pytest.raises(ValueError):
        q.check_density_matrix(np.eye(4))
    with pytest.raises(ValueError):
        q.check_density_matrix(np.diag([1.5, -0.5, 0, 0]))
