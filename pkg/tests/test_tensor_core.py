import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohest.errors import NotHermitian
from cohest.tensor_core import (
    clamp_spectrum,
    hermitian_eigenvalues,
    is_hermitian,
    kron,
    kron_all,
    trace_product,
)
from conftest import random_density


def test_eigenvalues_descending_and_sum_to_trace(rng):
    for d in (2, 4, 8, 16):
        m = random_density(rng, d)
        ev = hermitian_eigenvalues(m)
        assert np.all(np.diff(ev) <= 1e-14)
        assert ev.sum() == pytest.approx(np.trace(m).real, abs=1e-12)


def test_eigenvalues_unitary_invariant(rng):
    m = random_density(rng, 8)
    q, _ = np.linalg.qr(rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8)))
    assert np.allclose(hermitian_eigenvalues(q @ m @ q.conj().T), hermitian_eigenvalues(m), atol=1e-12)


def test_eigenvalues_of_diagonal_matrix():
    ev = hermitian_eigenvalues(np.diag([0.1, 0.6, 0.3]))
    assert np.allclose(ev, [0.6, 0.3, 0.1])


def test_non_hermitian_rejected():
    with pytest.raises(NotHermitian):
        hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
    assert not is_hermitian(np.array([[1.0, 1j], [1j, 1.0]]))


def test_clamp_spectrum_zeroes_roundoff_only():
    out = clamp_spectrum([0.7, 0.3, -1e-12])
    assert out[-1] == 0.0
    assert out.sum() == pytest.approx(1.0)


def test_kron_matches_numpy_and_is_associative(rng):
    a, b, c = (rng.normal(size=(2, 2)) for _ in range(3))
    assert np.allclose(kron(a, b), np.kron(a, b))
    assert np.allclose(kron(kron(a, b), c), kron(a, kron(b, c)))
    assert np.allclose(kron_all(a, b, c), np.kron(np.kron(a, b), c))


def test_trace_product(rng):
    a, b = random_density(rng, 4), random_density(rng, 4)
    assert trace_product(a, b) == pytest.approx(np.trace(a @ b))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_spectrum_is_a_distribution(n, seed):
    r = np.random.default_rng(seed)
    ev = clamp_spectrum(hermitian_eigenvalues(random_density(r, 2**n)))
    assert np.all(ev >= 0)
    assert ev.sum() == pytest.approx(1.0, abs=1e-10)


def test_clamp_spectrum_rejects_real_negatives():
    with pytest.raises(ValueError):
        clamp_spectrum([1.1, -0.1])
