import numpy as np
import pytest

from photondistill import numerics
from photondistill.circuits import qft_matrix
from photondistill.errors import DimensionError, UnitarityError


def test_permanent_identity():
    assert numerics.permanent(np.eye(2)) == pytest.approx(1.0)


def test_permanent_all_ones():
    assert numerics.permanent(np.ones((2, 2))) == pytest.approx(2.0)


def test_permanent_qft2_vanishes():
    # the Hong-Ou-Mandel suppression amplitude: 1/2 - 1/2
    assert abs(numerics.permanent(qft_matrix(2))) < 1e-15


def test_permanent_matches_naive_oracle_6x6():
    u = numerics.random_unitary(6, 1234)
    assert abs(numerics.permanent(u) - numerics.permanent_naive(u)) < 1e-12


@pytest.mark.parametrize("n", range(1, 8))
def test_ryser_equals_naive_all_small_sizes(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        assert abs(numerics.permanent(a) - numerics.permanent_naive(a)) < 1e-10


def test_permanent_multilinear_in_rows():
    rng = np.random.default_rng(7)
    for _ in range(5):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        c = complex(rng.standard_normal(), rng.standard_normal())
        scaled = a.copy()
        scaled[2] *= c
        assert numerics.permanent(scaled) == pytest.approx(c * numerics.permanent(a))


def test_permanent_transpose_invariant():
    rng = np.random.default_rng(8)
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    assert numerics.permanent(a.T) == pytest.approx(numerics.permanent(a))


def test_permanent_empty_matrix_is_one():
    assert numerics.permanent(np.zeros((0, 0))) == 1.0


def test_permanent_rejects_non_square():
    with pytest.raises(DimensionError):
        numerics.permanent(np.ones((2, 3)))


def test_is_unitary():
    assert numerics.is_unitary(np.eye(3), 1e-12)
    assert numerics.is_unitary(qft_matrix(4), 1e-10)
    assert not numerics.is_unitary(np.ones((3, 3)))
    assert not numerics.is_unitary(np.ones((2, 3)))


def test_require_unitary_raises():
    with pytest.raises(UnitarityError):
        numerics.require_unitary(np.ones((2, 2)))


def test_random_unitary_is_haar_like_and_deterministic():
    u1 = numerics.random_unitary(4, 99)
    u2 = numerics.random_unitary(4, 99)
    np.testing.assert_array_equal(u1, u2)
    assert numerics.is_unitary(u1, 1e-10)
    assert numerics.random_unitary(1, 0).shape == (1, 1)
    assert abs(abs(numerics.random_unitary(1, 0)[0, 0]) - 1.0) < 1e-12


def test_random_unitary_rejects_zero_modes():
    with pytest.raises(DimensionError):
        numerics.random_unitary(0, 1)


def test_normalize_global_phase():
    u = np.exp(0.7j) * qft_matrix(3)
    fixed = numerics.normalize_global_phase(u)
    assert fixed[0, 0].imag == pytest.approx(0.0, abs=1e-15)
    assert fixed[0, 0].real > 0
    np.testing.assert_allclose(fixed, qft_matrix(3), atol=1e-12)
