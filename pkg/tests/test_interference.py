import numpy as np
import pytest

from photondistill import fock, interference, numerics
from photondistill.circuits import qft_matrix
from photondistill.errors import CapacityError, DimensionError
from photondistill.interference import InternalState


def test_internal_state_validation():
    with pytest.raises(ValueError):
        InternalState(np.array([[0.5, 0.5j], [0.5j, 0.5]]))  # not Hermitian
    with pytest.raises(ValueError):
        InternalState(np.diag([0.7, 0.7]))  # trace 1.4
    with pytest.raises(DimensionError):
        InternalState(np.zeros((2, 3)))


def test_noisy_source_limits():
    ens0 = interference.make_noisy_source(2, 0.0)
    np.testing.assert_allclose(ens0.gram(), np.ones((2, 2)))
    ens1 = interference.make_noisy_source(2, 1.0)
    # purified overlaps vanish off-diagonal for orthogonal photons
    np.testing.assert_allclose(ens1.gram(), np.eye(2))


def test_noisy_source_pairwise_overlap():
    ens = interference.make_noisy_source(3, 0.1)
    for i in range(3):
        for j in range(3):
            if i != j:
                overlap = np.trace(ens.photons[i].density @ ens.photons[j].density).real
                assert overlap == pytest.approx(0.81)


def test_noisy_source_range_errors():
    with pytest.raises(ValueError):
        interference.make_noisy_source(2, -0.1)
    with pytest.raises(ValueError):
        interference.make_noisy_source(2, 1.5)


def test_hom_visibility_basics():
    a = InternalState.basis(0, 3)
    b = InternalState.basis(1, 3)
    assert interference.hom_visibility(a, a) == pytest.approx(1.0)
    assert interference.hom_visibility(a, b) == pytest.approx(0.0)
    with pytest.raises(DimensionError):
        interference.hom_visibility(a, InternalState.basis(0, 2))


def test_hom_visibility_canonical_product():
    # rho(eps) and rho(eps') with distinct noise levels overlap on the good
    # component only
    eps, eps_p = 0.2, 0.05
    rho1 = np.diag([1 - eps, eps, 0.0]).astype(complex)
    rho2 = np.diag([1 - eps_p, 0.0, eps_p]).astype(complex)
    v = interference.hom_visibility(InternalState(rho1), InternalState(rho2))
    assert v == pytest.approx((1 - eps) * (1 - eps_p))


@pytest.mark.parametrize(
    "eps,expected",
    [(0.0, 0.0), (1.0, 0.5), (0.2, (1 - 0.8**2) / 2)],
)
def test_hom_coincidence(eps, expected):
    dist = interference.output_distribution_partial(
        qft_matrix(2), interference.make_noisy_source(2, eps)
    )
    assert dist[(1, 1)] == pytest.approx(expected, abs=1e-12)


def test_hom_coincidence_affine_in_visibility():
    for eps in np.linspace(0.0, 1.0, 11):
        dist = interference.output_distribution_partial(
            qft_matrix(2), interference.make_noisy_source(2, float(eps))
        )
        v = (1 - eps) ** 2
        assert dist[(1, 1)] == pytest.approx((1 - v) / 2, abs=1e-12)


def test_partial_collapses_to_fock_at_eps0():
    u = numerics.random_unitary(4, 3)
    ens = interference.make_noisy_source(3, 0.0, (1, 1, 1, 0))
    partial = interference.output_distribution_partial(u, ens)
    ideal = fock.output_distribution(u, (1, 1, 1, 0))
    for s in ideal:
        assert partial[s] == pytest.approx(ideal[s], abs=1e-12)


def test_partial_collapses_to_distinguishable_at_eps1():
    u = numerics.random_unitary(3, 5)
    ens = interference.make_noisy_source(3, 1.0)
    partial = interference.output_distribution_partial(u, ens)
    classical = fock.distinguishable_distribution(u, (1, 1, 1))
    for s in classical:
        assert partial[s] == pytest.approx(classical[s], abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_partial_normalizes(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 6))
    n = min(int(rng.integers(2, 5)), m)
    occ = [0] * m
    for j in range(n):
        occ[j % m] += 1
    ens = interference.make_noisy_source(n, float(rng.uniform(0, 1)), tuple(occ))
    dist = interference.output_distribution_partial(numerics.random_unitary(m, seed), ens)
    assert sum(dist.values()) == pytest.approx(1.0, abs=1e-9)


def test_oracle_matches_fock_for_pure_input():
    u = numerics.random_unitary(4, 17)
    ens = interference.make_noisy_source(3, 0.0, (1, 1, 1, 0))
    marginal = interference.brute_force_oracle(u, ens).spatial_distribution()
    ideal = fock.output_distribution(u, (1, 1, 1, 0))
    for s, p in ideal.items():
        assert marginal[s] == pytest.approx(p, abs=1e-10)


def test_oracle_identity_circuit_preserves_input():
    ens = interference.make_noisy_source(2, 0.3, (1, 1, 0))
    result = interference.brute_force_oracle(np.eye(3), ens)
    dist = result.spatial_distribution()
    assert dist[(1, 1, 0)] == pytest.approx(1.0)
    prob, state = result.conditional_survivor((1, 2), (1, 0), 0)
    assert prob == pytest.approx(1.0)
    np.testing.assert_allclose(state.density, ens.photons[0].density, atol=1e-12)


def test_oracle_equals_partial_distribution():
    u = qft_matrix(2)
    ens = interference.make_noisy_source(2, 0.3)
    direct = interference.output_distribution_partial(u, ens)
    marginal = interference.brute_force_oracle(u, ens).spatial_distribution()
    for s in direct:
        assert direct[s] == pytest.approx(marginal[s], abs=1e-10)


def test_explicit_pure_states_match_oracle():
    v0 = np.array([1.0, 0.0, 0.0])
    v1 = np.array([np.sqrt(0.7), np.sqrt(0.3), 0.0])
    v2 = np.array([np.sqrt(0.5), 0.0, np.sqrt(0.5)])
    ens = interference.explicit_ensemble([v0, v1, v2], (1, 1, 1))
    u = numerics.random_unitary(3, 55)
    direct = interference.output_distribution_partial(u, ens)
    marginal = interference.brute_force_oracle(u, ens).spatial_distribution()
    for s in direct:
        assert direct[s] == pytest.approx(marginal[s], abs=1e-10)


def test_explicit_mixed_states_match_oracle():
    v1 = np.array([np.sqrt(0.6), np.sqrt(0.4), 0.0])
    rho = 0.8 * np.diag([1.0, 0.0, 0.0]) + 0.2 * np.outer(v1, v1)
    ens = interference.explicit_ensemble([rho, np.diag([0.5, 0.25, 0.25])], (1, 1))
    u = numerics.random_unitary(2, 77)
    direct = interference.output_distribution_partial(u, ens)
    marginal = interference.brute_force_oracle(u, ens).spatial_distribution()
    for s in direct:
        assert direct[s] == pytest.approx(marginal[s], abs=1e-10)


def test_bunched_input_normalization_and_agreement():
    # two photons entering the same mode exercise the input-norm permanent
    u = numerics.random_unitary(3, 31)
    ens = interference.make_noisy_source(3, 0.4, (2, 1, 0))
    direct = interference.output_distribution_partial(u, ens)
    marginal = interference.brute_force_oracle(u, ens).spatial_distribution()
    assert sum(direct.values()) == pytest.approx(1.0, abs=1e-9)
    for s in direct:
        assert direct[s] == pytest.approx(marginal[s], abs=1e-10)


def test_oracle_capacity_errors():
    with pytest.raises(CapacityError):
        interference.brute_force_oracle(
            numerics.random_unitary(7, 0), interference.make_noisy_source(2, 0.1, (1, 1, 0, 0, 0, 0, 0))
        )
    with pytest.raises(CapacityError):
        interference.brute_force_oracle(
            numerics.random_unitary(5, 0), interference.make_noisy_source(5, 0.1)
        )


def test_mixture_conditioning_matches_oracle():
    u = qft_matrix(3)
    ens = interference.make_noisy_source(3, 0.2)
    p_oracle, s_oracle = interference.brute_force_oracle(u, ens).conditional_survivor(
        (0, 1), (1, 1), 2
    )
    p_mix, s_mix = interference.conditional_state_mixture(u, ens, (0, 1), (1, 1), 2)
    assert p_mix == pytest.approx(p_oracle, abs=1e-12)
    np.testing.assert_allclose(s_mix.density, s_oracle.density, atol=1e-10)
