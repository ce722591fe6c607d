import numpy as np
import pytest

from meanfield_annealer import (ConjugateFields, CouplingMatrix, MagPair,
                                ModelSpec, build_effective_hamiltonian,
                                conjugate_fields, coupling_matrix,
                                detect_transition_sparse, free_energy_density,
                                global_saddle, ground_block, solve_saddle,
                                sparse_mean_field_density)
from meanfield_annealer.ed import sparse_ed

XHAT = [1.0, 0.0, 0.0]
ZERO = [0.0, 0.0, 0.0]
K0 = CouplingMatrix(np.zeros((3, 3)))


def test_effective_hamiltonian_transverse_pair():
    H = build_effective_hamiltonian(ConjugateFields(XHAT, XHAT), K0)
    w, V = np.linalg.eigh(H.matrix)
    assert np.allclose(w, [-2.0, 0.0, 0.0, 2.0], atol=1e-12)
    lam0, g, m1, m2 = ground_block(H)
    assert np.allclose(m1, XHAT, atol=1e-9) and np.allclose(m2, XHAT, atol=1e-9)


def test_effective_hamiltonian_diagonal_case():
    K = np.zeros((3, 3))
    K[2, 2] = 0.5
    H = build_effective_hamiltonian(
        ConjugateFields([0, 0, 2.0], [0, 0, 0.51]), CouplingMatrix(K))
    diag = np.sort(np.real(np.diag(H.matrix)))
    assert np.allclose(diag, [-3.01, -0.99, 1.99, 2.01], atol=1e-12)
    assert np.abs(H.matrix - np.diag(np.diag(H.matrix))).max() < 1e-15
    lam0, g, m1, m2 = ground_block(H)
    assert lam0 == pytest.approx(-3.01, abs=1e-12)
    assert g == 1
    assert np.allclose(m1, [0, 0, 1], atol=1e-10)
    assert np.allclose(m2, [0, 0, 1], atol=1e-10)


def test_effective_hamiltonian_xx_only():
    K = np.zeros((3, 3))
    K[0, 0] = 0.7
    H = build_effective_hamiltonian(ConjugateFields(ZERO, ZERO), CouplingMatrix(K))
    w = np.sort(np.linalg.eigvalsh(H.matrix))
    assert np.allclose(w, [-0.7, -0.7, 0.7, 0.7], atol=1e-12)


def test_effective_hamiltonian_hermitian_random(rng):
    for _ in range(20):
        mt = ConjugateFields(rng.standard_normal(3), rng.standard_normal(3))
        K = CouplingMatrix(rng.standard_normal((3, 3)))
        H = build_effective_hamiltonian(mt, K).matrix
        assert np.abs(H - H.conj().T).max() < 1e-12
        assert np.abs(np.linalg.eigvalsh(H).imag).max() == 0.0


def test_effective_hamiltonian_real_without_y_terms(rng):
    for _ in range(10):
        mt1 = rng.standard_normal(3)
        mt2 = rng.standard_normal(3)
        mt1[1] = mt2[1] = 0.0
        K = np.zeros((3, 3))
        K[0, 0], K[2, 2], K[0, 2], K[2, 0] = rng.standard_normal(4)
        H = build_effective_hamiltonian(ConjugateFields(mt1, mt2),
                                        CouplingMatrix(K)).matrix
        assert np.abs(H.imag).max() < 1e-15


def test_ground_block_degenerate_cases():
    H = build_effective_hamiltonian(ConjugateFields(ZERO, ZERO), K0)
    lam0, g, m1, m2 = ground_block(H)
    assert lam0 == 0.0 and g == 4
    assert np.abs(m1).max() < 1e-12 and np.abs(m2).max() < 1e-12
    H = build_effective_hamiltonian(ConjugateFields(XHAT, ZERO), K0)
    lam0, g, m1, m2 = ground_block(H)
    assert g == 2
    assert np.allclose(m1, XHAT, atol=1e-10)
    assert np.abs(m2).max() < 1e-10


def test_conjugate_fields(sparse_spec):
    cf = conjugate_fields(sparse_spec, 0.0, MagPair(XHAT, XHAT))
    assert np.allclose(cf.mt1, XHAT, atol=1e-14)
    assert np.allclose(cf.mt2, XHAT, atol=1e-14)
    cf = conjugate_fields(sparse_spec, 1.0, MagPair([0, 0, 1], [0, 0, 1]))
    assert np.allclose(cf.mt1, [0, 0, 2.0], atol=1e-14)
    assert np.allclose(cf.mt2, [0, 0, 0.51], atol=1e-14)
    # no y terms in the mean-field energy, so y components never source fields
    cf = conjugate_fields(sparse_spec, 0.5, MagPair([0, 1, 0], [0, -1, 0]))
    assert cf.mt1[1] == 0.0 and cf.mt2[1] == 0.0


def test_conjugate_fields_rejects_dense(dense_spec):
    with pytest.raises(ValueError):
        conjugate_fields(dense_spec, 0.5, MagPair(XHAT, XHAT))


def test_solve_saddle_start_fixed_point(sparse_spec):
    sol = solve_saddle(sparse_spec, 0.0, MagPair(XHAT, XHAT), max_iter=2)
    assert sol.converged
    assert np.allclose(sol.m.m1, XHAT, atol=1e-10)
    assert sol.u == pytest.approx(-1.0, abs=1e-12)


def test_solve_saddle_final_energy(sparse_spec):
    sol = solve_saddle(sparse_spec, 1.0, MagPair([0.1, 0, 0.95], [0.1, 0, 0.95]))
    assert sol.converged
    assert sol.u == pytest.approx(-1.005, abs=1e-9)
    assert sol.lambda0 == pytest.approx(-3.01, abs=1e-8)
    assert sol.degeneracy == 1


def test_solution_invariants(sparse_spec, rng):
    for s in (0.15, 0.4, 0.85):
        sol = global_saddle(sparse_spec, s)
        assert sol.converged
        assert sol.residual < 1e-9
        n1, n2 = sol.m.norms()
        assert n1 <= 1 + 1e-9 and n2 <= 1 + 1e-9
        # fixed point: expectations of the effective model reproduce m
        cf = conjugate_fields(sparse_spec, s, sol.m)
        H = build_effective_hamiltonian(cf, coupling_matrix(sparse_spec, s))
        _, _, e1, e2 = ground_block(H)
        assert np.abs(np.concatenate([e1 - sol.m.m1, e2 - sol.m.m2])).max() < 1e-9


def test_global_saddle_deterministic(sparse_spec):
    a = global_saddle(sparse_spec, 0.5)
    b = global_saddle(sparse_spec, 0.5)
    assert a.u == b.u
    assert np.array_equal(a.m.m1, b.m.m1) and np.array_equal(a.m.m2, b.m.m2)


def test_saddle_matches_full_ed(sparse_spec):
    sol = global_saddle(sparse_spec, 0.2)
    ref = sparse_ed(sparse_spec, 0.2, 12)
    assert abs(sol.m2z - ref.m2z) < 0.1


def test_free_energy_limits(sparse_spec):
    sol = global_saddle(sparse_spec, 0.5)
    u = sol.u
    for beta in (20.0, 50.0, 200.0):
        f = free_energy_density(sparse_spec, 0.5, sol.mt, sol.m, beta)
        assert f <= u + 1e-12
        assert abs(f - u) < np.exp(-beta * 0.1) * 10 + 1e-12
    # small beta with no fields: pure entropy of 4 states
    m0 = MagPair(ZERO, ZERO)
    f = free_energy_density(ModelSpec.sparse(), 0.0, ConjugateFields(ZERO, ZERO),
                            m0, 0.01)
    hm = sparse_mean_field_density(ModelSpec.sparse(), 0.0, m0)
    assert f == pytest.approx(hm - np.log(4.0) / (2 * 0.01), rel=1e-12)
    with pytest.raises(ValueError):
        free_energy_density(sparse_spec, 0.5, sol.mt, sol.m, 0.0)


def test_finite_beta_consistent_with_zero_temperature(sparse_spec):
    for s in (0.2, 0.6):
        cold = global_saddle(sparse_spec, s)
        warm = solve_saddle(sparse_spec, s, cold.m, beta=50.0)
        assert warm.converged
        assert np.abs(warm.m.m1 - cold.m.m1).max() < 1e-6
        assert np.abs(warm.m.m2 - cold.m.m2).max() < 1e-6


def test_detect_sparse_baseline(sparse_spec):
    rep = detect_transition_sparse(sparse_spec, np.linspace(0, 1, 51))
    assert rep.found
    assert rep.jump_m2z > 0.5
    assert 0.70 < rep.s_star < 0.74


def test_saddle_matches_ed_in_strong_pairwise_regime():
    # the large negative pairwise coupling regime, where the weak cluster
    # turns over smoothly; checked away from the steep part of the crossover
    spec = ModelSpec.sparse(xi=(0.0, 0.0, -10.0))
    for s in (0.1, 0.8, 0.9):
        sol = global_saddle(spec, s)
        ref = sparse_ed(spec, s, 12)
        assert abs(sol.m2z - ref.m2z) < 0.1
