import math

import numpy as np
import pytest

from photondistill import fock, numerics
from photondistill.circuits import qft_matrix
from photondistill.errors import DimensionError, PhotonConservationError, UnitarityError


def test_enumerate_two_modes_two_photons():
    assert fock.enumerate_outcomes(2, 2) == [(2, 0), (1, 1), (0, 2)]


def test_enumerate_single_mode():
    assert fock.enumerate_outcomes(1, 3) == [(3,)]


def test_enumerate_count_is_stars_and_bars():
    # C(4+4-1, 4) = C(7,3) = 35
    assert len(fock.enumerate_outcomes(4, 4)) == 35
    assert len(set(fock.enumerate_outcomes(4, 4))) == 35


def test_enumerate_rejects_bad_input():
    with pytest.raises(DimensionError):
        fock.enumerate_outcomes(0, 2)
    with pytest.raises(DimensionError):
        fock.enumerate_outcomes(2, -1)


def test_amplitude_identity_is_one():
    for r in ((1, 0, 2), (0, 3, 1)):
        assert fock.transition_amplitude(np.eye(3), r, r) == pytest.approx(1.0)


def test_amplitude_qft2_coincidence_suppressed():
    assert abs(fock.transition_amplitude(qft_matrix(2), (1, 1), (1, 1))) < 1e-15


def test_amplitude_qft2_bunched():
    amp = fock.transition_amplitude(qft_matrix(2), (1, 1), (2, 0))
    assert abs(amp) ** 2 == pytest.approx(0.5)


def test_amplitude_conservation_error():
    with pytest.raises(PhotonConservationError):
        fock.transition_amplitude(np.eye(2), (1, 1), (1, 0))


def test_output_distribution_qft2_hom():
    dist = fock.output_distribution(qft_matrix(2), (1, 1))
    assert dist[(2, 0)] == pytest.approx(0.5, abs=1e-12)
    assert dist[(1, 1)] == pytest.approx(0.0, abs=1e-12)
    assert dist[(0, 2)] == pytest.approx(0.5, abs=1e-12)


def test_output_distribution_identity_point_mass():
    dist = fock.output_distribution(np.eye(4), (2, 0, 1, 0))
    assert dist[(2, 0, 1, 0)] == pytest.approx(1.0)
    assert sum(dist.values()) == pytest.approx(1.0)


def test_output_distribution_rejects_non_unitary():
    with pytest.raises(UnitarityError):
        fock.output_distribution(np.ones((2, 2)), (1, 1))


def test_qft3_suppression_matches_naive_amplitude_oracle():
    """Surviving outcomes of the 3-mode Fourier bunching match a direct
    permanent-sum computed with the naive oracle."""
    u = qft_matrix(3)
    dist = fock.output_distribution(u, (1, 1, 1))
    for s, p in dist.items():
        rows = fock.mode_list(s)
        sub = u[np.ix_(rows, [0, 1, 2])]
        denom = 1.0
        for c in s:
            denom *= math.factorial(c)
        expected = abs(numerics.permanent_naive(sub)) ** 2 / denom
        assert p == pytest.approx(expected, abs=1e-12)
    labels_mod = {s: sum((k + 1) * c for k, c in enumerate(s)) % 3 for s in dist}
    for s, p in dist.items():
        if labels_mod[s] != 0:
            assert p < 1e-10


@pytest.mark.parametrize("m,n", [(2, 2), (3, 3), (4, 3), (5, 2), (6, 2)])
def test_normalization_random_unitaries(m, n):
    occ = [0] * m
    for j in range(n):
        occ[j % m] += 1
    for seed in (0, 1):
        dist = fock.output_distribution(numerics.random_unitary(m, seed), tuple(occ))
        assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


def test_permutation_matrix_gives_point_mass():
    perm = np.zeros((3, 3))
    perm[0, 2] = perm[1, 0] = perm[2, 1] = 1.0
    dist = fock.output_distribution(perm, (2, 1, 0))
    # photon counts follow the permutation: input mode 0 -> output 1, 1 -> 2
    assert dist[(0, 2, 1)] == pytest.approx(1.0)


def test_distinguishable_distribution_uniformity():
    dist = fock.distinguishable_distribution(qft_matrix(4), (1, 1, 1, 1))
    assert dist[(1, 1, 1, 1)] == pytest.approx(3 / 32, abs=1e-12)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)
