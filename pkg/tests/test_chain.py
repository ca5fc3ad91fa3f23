import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from domainwall.chain import (
    ChainSpec,
    DisorderRealization,
    classical_energy,
    classify_records,
    classify_single_domain_wall,
    configuration_array,
    domain_wall_field_energy,
    domain_wall_index,
    domain_wall_state,
    enumerate_configurations,
    ising_energy,
    sector_energies,
    validate_spins,
)
from domainwall.errors import CapacityError, DimensionError, DomainError


def brute_energy(h, J, s):
    return sum(h[i] * s[i] for i in range(len(s))) - sum(J[i] * s[i] * s[i + 1] for i in range(len(s) - 1))


@pytest.mark.parametrize("kwargs", [dict(num_qubits=2), dict(num_qubits=5.5), dict(num_qubits=5, coupling=0),
                                    dict(num_qubits=5, boundary_field=1.0), dict(num_qubits=5, boundary_field=0.5)])
def test_chain_spec_rejects_bad_parameters(kwargs):
    with pytest.raises(DomainError):
        ChainSpec(**kwargs)


def test_fields_pin_ends_in_opposite_directions():
    spec = ChainSpec(5, coupling=1.0, boundary_field=2.5)
    assert spec.fields().tolist() == [-2.5, 0, 0, 0, 2.5]
    assert spec.couplers().tolist() == [1.0] * 4
    assert spec.num_sites == 4


def test_single_wall_states_form_degenerate_ground_manifold():
    spec = ChainSpec(8, coupling=1.0, boundary_field=2.0)
    configs = configuration_array(8)
    E = classical_energy(spec, configs)
    ground = np.flatnonzero(np.isclose(E, E.min()))
    expected = sorted(domain_wall_index(spec, n) for n in range(1, 8))
    assert ground.tolist() == expected
    # -2h from the pinned ends, -(Q-2)J + J from the couplers
    assert E.min() == pytest.approx(-2 * 2.0 - (8 - 3) * 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 9), st.integers(0, 2**31 - 1))
def test_ising_energy_matches_loop(Q, seed):
    g = np.random.default_rng(seed)
    h, J = g.normal(size=Q), g.normal(size=Q - 1)
    s = np.where(g.random(Q) < 0.5, -1, 1)
    assert ising_energy(h, J, s) == pytest.approx(brute_energy(h, J, s))


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 12), st.integers(0, 2**31 - 1))
def test_sector_energies_equal_full_energy_differences(Q, seed):
    g = np.random.default_rng(seed)
    spec = ChainSpec(Q)
    dis = DisorderRealization(g.normal(0, 0.3, Q), g.normal(0, 0.1, Q - 1))
    full = np.array([classical_energy(spec, domain_wall_state(spec, n), dis) for n in range(1, Q)])
    clean = np.array([classical_energy(spec, domain_wall_state(spec, n)) for n in range(1, Q)])
    E = sector_energies(dis.field_errors, dis.coupler_errors)
    np.testing.assert_allclose(full - clean - (full - clean)[0], E - E[0], atol=1e-12)


def test_wall_energy_sign_rule():
    zeta = np.array([0.3, -0.1, 0.7, 0.2, -0.4])
    for n in range(1, 5):
        expected = sum(np.sign(n - i + 0.5) * zeta[i - 1] for i in range(1, 6))
        assert domain_wall_field_energy(n, zeta) == pytest.approx(expected)
    np.testing.assert_allclose(sector_energies(zeta), [domain_wall_field_energy(n, zeta) for n in range(1, 5)])


def test_sector_energies_batch_shape():
    z = np.zeros((7, 6))
    assert sector_energies(z).shape == (7, 5)


def test_configuration_layout_and_capacity():
    c = configuration_array(3)
    assert c.shape == (8, 3)
    assert c[0].tolist() == [1, 1, 1]
    assert c[1].tolist() == [1, 1, -1]
    assert c[4].tolist() == [-1, 1, 1]
    spec = ChainSpec(6)
    for n in range(1, 6):
        assert c.dtype == np.int8
        assert configuration_array(6)[domain_wall_index(spec, n)].tolist() == domain_wall_state(spec, n).tolist()
    with pytest.raises(CapacityError):
        configuration_array(25)
    assert sum(1 for _ in enumerate_configurations(ChainSpec(4))) == 16


def test_domain_wall_state_range():
    spec = ChainSpec(5)
    assert domain_wall_state(spec, 1).tolist() == [1, -1, -1, -1, -1]
    assert domain_wall_state(spec, 4).tolist() == [1, 1, 1, 1, -1]
    for bad in (0, 5):
        with pytest.raises(DomainError):
            domain_wall_state(spec, bad)


def test_classification():
    spec = ChainSpec(6)
    for n in range(1, 6):
        assert classify_single_domain_wall(spec, domain_wall_state(spec, n)) == n
    assert classify_single_domain_wall(spec, [1, -1, 1, -1, -1, -1]) is None
    assert classify_single_domain_wall(spec, [-1, 1, 1, 1, 1, 1]) is None
    assert classify_single_domain_wall(spec, [1, 1, 1, 1, 1, 1]) is None
    assert classify_single_domain_wall(spec, [1, -1]) is None


def test_vectorised_classification_agrees_everywhere():
    spec = ChainSpec(8)
    configs = configuration_array(8)
    fast = classify_records(configs)
    slow = [classify_single_domain_wall(spec, c) or 0 for c in configs]
    assert fast.tolist() == slow
    assert np.count_nonzero(fast) == 7


def test_dimension_and_spin_checks():
    spec = ChainSpec(4)
    with pytest.raises(DimensionError):
        classical_energy(spec, [1, 1, 1])
    with pytest.raises(DomainError):
        validate_spins([1, 0, -1])
    with pytest.raises(DimensionError):
        DisorderRealization(np.zeros(4), np.zeros(4))
    with pytest.raises(DimensionError):
        classical_energy(spec, [1, 1, -1, -1], DisorderRealization(np.zeros(5)))
    with pytest.raises(DimensionError):
        ising_energy(np.zeros(3), np.zeros(3), [1, 1, 1])


def test_covariance_law_small_sample():
    # E[(E_n - E_m)(E_n - E_k)] = 4 sigma^2 min(|n-k|, |n-m|) when m, k lie on the same side of n
    g = np.random.default_rng(5)
    sigma, Q = 0.5, 9
    E = sector_energies(sigma * g.standard_normal((200_000, Q)))
    for n, m, k in [(5, 2, 3), (5, 7, 8), (3, 2, 4), (4, 1, 8)]:
        x = (E[:, n - 1] - E[:, m - 1]) * (E[:, n - 1] - E[:, k - 1])
        same_side = (n - k) * (n - m) > 0
        expected = 4 * sigma**2 * min(abs(n - k), abs(n - m)) * same_side
        se = x.std() / np.sqrt(x.size)
        assert abs(x.mean() - expected) < 5 * se
