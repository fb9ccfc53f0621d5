import math

import numpy as np
import pytest

from isingcert.hamiltonians import (
    LocalHamiltonian,
    build_net,
    format_hamiltonian,
    gibbs,
    gibbs_density,
    hamiltonian_diff,
    load_hamiltonian,
    net_covering_check,
    parse_hamiltonian,
    random_hamiltonian,
    round_to_grid,
    save_hamiltonian,
)
from isingcert.paulis import PauliString, pauli_trace_inner

P = PauliString.from_label


def test_invariants_enforced():
    with pytest.raises(ValueError):
        LocalHamiltonian(1, 1, {P("I"): 0.5})       # traceless
    with pytest.raises(ValueError):
        LocalHamiltonian(2, 1, {P("XX"): 0.5})      # weight > k
    with pytest.raises(ValueError):
        LocalHamiltonian(1, 1, {P("Z"): 1.5})       # |h| > 1
    h = LocalHamiltonian(1, 1, {P("I"): 0.0, P("Z"): 0.3})
    assert P("I") not in h.coeffs


def test_frobenius_examples():
    assert LocalHamiltonian(1, 1, {P("X"): 0.3}).frobenius_norm() == pytest.approx(0.3)
    h = LocalHamiltonian(2, 1, {P("XI"): 0.5, P("IZ"): 0.5})
    assert h.frobenius_norm() == pytest.approx(1 / math.sqrt(2))


def test_frobenius_matches_dense_oracle():
    rng = np.random.default_rng(3)
    for _ in range(50):
        h = random_hamiltonian(3, 2, rng)
        m = h.to_matrix()
        dense = math.sqrt(np.trace(m @ m).real / 8)
        assert abs(h.frobenius_norm() - dense) < 1e-10


def test_operator_norm_examples():
    assert LocalHamiltonian(2, 2, {P("ZZ"): 1.0}).operator_norm() == pytest.approx(1.0)
    h = LocalHamiltonian(1, 1, {P("X"): 1.0, P("Z"): 1.0})
    assert h.operator_norm() == pytest.approx(math.sqrt(2))


def test_operator_norm_triangle_bound():
    rng = np.random.default_rng(4)
    for _ in range(100):
        h = random_hamiltonian(2, 2, rng)
        assert h.operator_norm() <= sum(abs(c) for c in h.coeffs.values()) + 1e-9


def test_gibbs_diagonal_case():
    h = LocalHamiltonian(1, 1, {P("Z"): 1.0})
    state = gibbs(h, 1.0)
    z = math.exp(-1.0) + math.exp(1.0)
    np.testing.assert_allclose(state.rho, np.diag([math.exp(-1.0), math.exp(1.0)]) / z,
                               atol=1e-12)
    # Pauli coefficient: 2 rho_Z = -tanh(1)
    assert 2 * state.pauli_coeff(P("Z")) == pytest.approx(-math.tanh(1.0))


def test_gibbs_degenerate_cases():
    h = LocalHamiltonian(2, 2, {P("XX"): 0.7})
    np.testing.assert_allclose(gibbs_density(h, 0.0), np.eye(4) / 4, atol=1e-12)
    zero = LocalHamiltonian(2, 2, {})
    np.testing.assert_allclose(gibbs_density(zero, 2.0), np.eye(4) / 4, atol=1e-12)
    with pytest.raises(ValueError):
        gibbs(h, -0.1)


def test_gibbs_positivity_normalization_sweep():
    # 200 random (H, beta) instances
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 4))
        h = random_hamiltonian(n, min(2, n), rng)
        beta = float(rng.uniform(0.0, 5.0))
        rho = gibbs_density(h, beta)
        assert abs(np.trace(rho).real - 1.0) < 1e-10
        w = np.linalg.eigvalsh(rho)
        assert w.min() > -1e-10
        # matches exp(-beta H)/Z entrywise
        hm = h.to_matrix()
        ws, vs = np.linalg.eigh(hm)
        direct = (vs * np.exp(-beta * ws)) @ vs.conj().T
        direct /= np.trace(direct).real
        np.testing.assert_allclose(rho, direct, atol=1e-9)


def test_random_hamiltonian_determinism():
    a = random_hamiltonian(2, 2, 7)
    b = random_hamiltonian(2, 2, 7)
    assert a.coeffs == b.coeffs


def test_random_hamiltonian_laws():
    h = random_hamiltonian(3, 2, 11, law="fixed_norm", frobenius=0.6)
    assert abs(h.frobenius_norm() - 0.6) < 1e-12
    h2 = random_hamiltonian(3, 2, 12, law="sparse", support_size=3)
    assert len(h2.coeffs) == 3
    with pytest.raises(ValueError):
        # 15 strings with |h| <= 1 cannot reach Frobenius norm 4
        random_hamiltonian(2, 2, 13, law="fixed_norm", frobenius=4.0)
    with pytest.raises(ValueError):
        random_hamiltonian(2, 2, 13, law="nope")


def test_round_to_grid():
    assert round_to_grid(0.6, 0.5) == pytest.approx(0.5)
    assert round_to_grid(-0.6, 0.5) == pytest.approx(-0.5)
    # exact tie goes toward zero
    assert round_to_grid(0.25, 0.5) == 0.0
    assert round_to_grid(-0.25, 0.5) == 0.0
    assert round_to_grid(0.75, 0.5) == pytest.approx(0.5)
    # clamped to the grid edge
    assert round_to_grid(0.99, 0.3) == pytest.approx(0.9)


def test_net_enumeration():
    net = build_net([P("Z")], 0.5)
    assert net.size == 5
    np.testing.assert_allclose(net.grid, [-1, -0.5, 0, 0.5, 1])
    members = [net.member(i).coeff(P("Z")) for i in range(5)]
    assert members == [-1.0, -0.5, 0.0, 0.5, 1.0]
    for i in range(5):
        assert net.index_of_values(net.member_values(i)) == i


def test_net_budget():
    with pytest.raises(ValueError):
        build_net([P("ZI"), P("IZ"), P("ZZ")], 0.001)


def test_net_covering_on_grid_is_exact():
    net = build_net([P("Z")], 0.5)
    h = LocalHamiltonian(1, 1, {P("Z"): 0.5})
    check = net_covering_check(h, net, 1.0)
    assert check.distance == pytest.approx(0.0, abs=1e-12)
    assert net.member(check.member_index).coeff(P("Z")) == pytest.approx(0.5)


def test_net_covering_bound_random():
    # off-grid Hamiltonians on {Z1, Z2, Z1Z2}: trace distance <= 200 beta n^k eta
    rng = np.random.default_rng(8)
    support = [P("ZI"), P("IZ"), P("ZZ")]
    net = build_net(support, 0.25)
    for _ in range(25):
        coeffs = {p: float(rng.uniform(-1, 1)) for p in support}
        h = LocalHamiltonian(2, 2, coeffs)
        check = net_covering_check(h, net, 1.0)
        assert check.distance <= check.bound + 1e-9
        assert check.bound == pytest.approx(200 * 1.0 * 2**2 * 0.25)


def test_net_rejects_off_support():
    net = build_net([P("ZI")], 0.5)
    h = LocalHamiltonian(2, 2, {P("XX"): 0.3})
    with pytest.raises(ValueError):
        net.round_member_index(h)


def test_value_matrix_matches_members():
    net = build_net([P("ZI"), P("IZ")], 0.5)
    vm = net.value_matrix()
    for i in range(net.size):
        np.testing.assert_allclose(vm[i], net.member_values(i))


def test_gibbs_coeff_matrix_matches_states():
    net = build_net([P("Z")], 0.5)
    mat = net.gibbs_coeff_matrix(1.3)
    for i in range(net.size):
        rho = gibbs_density(net.member(i), 1.3)
        assert mat[i, 0] == pytest.approx(pauli_trace_inner(P("Z"), rho).real, abs=1e-12)


def test_hamiltonian_file_roundtrip(tmp_path):
    rng = np.random.default_rng(17)
    h = random_hamiltonian(3, 2, rng)
    path = tmp_path / "h.txt"
    save_hamiltonian(h, path)
    back = load_hamiltonian(path)
    assert back.n == h.n and back.k == h.k
    assert back.coeffs == h.coeffs  # bit-exact via 17 significant digits
    assert parse_hamiltonian(format_hamiltonian(h)).coeffs == h.coeffs


def test_hamiltonian_diff_norm():
    a = LocalHamiltonian(1, 1, {P("Z"): 0.9})
    b = LocalHamiltonian(1, 1, {P("Z"): -0.9})
    d = hamiltonian_diff(a, b)
    assert d.frobenius_norm() == pytest.approx(1.8)
