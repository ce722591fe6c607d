import itertools

import numpy as np
import pytest

from meanfield_annealer import (ModelSpec, SectorSpec, SizeError,
                                build_dense_full_operator,
                                build_dense_sector_hamiltonian,
                                build_dense_sector_operator,
                                build_sparse_full_hamiltonian, dense_ed,
                                detect_transition,
                                ed_solve, global_minimize, sparse_ed)
from meanfield_annealer.eigensolvers import jacobi_eigh, lanczos_lowest


def test_sector_spec():
    sec = SectorSpec.for_size(4)
    assert sec.S == 1.0 and sec.dim == 9
    sec = SectorSpec.for_size(200)
    assert sec.S == 50.0 and sec.dim == 101 ** 2
    for bad in (0, 2, 6, -4, 5):
        with pytest.raises(ValueError):
            SectorSpec.for_size(bad)


def _classical_problem_energies(spec, N):
    """Brute force over the 2^N classical z configurations at s=1."""
    n2 = N // 2
    h1, h2 = spec.fields.h1, spec.fields.h2
    out = []
    for bits in itertools.product([1, -1], repeat=N):
        z1 = bits[:n2]
        z2 = bits[n2:]
        e = -(h1 * sum(z1) + h2 * sum(z2))
        e -= (sum(z1) ** 2 + sum(z2) ** 2 + sum(z1) * sum(z2)) / N
        out.append(e)
    return np.array(out)


def test_sector_matrix_small_size(dense_spec):
    H = build_dense_sector_hamiltonian(dense_spec, 1.0, 4)
    assert H.shape == (9, 9)
    assert np.array_equal(H, H.T)
    brute = _classical_problem_energies(dense_spec, 4)
    assert H.diagonal().min() == pytest.approx(brute.min(), abs=1e-12)
    assert H.diagonal().min() == pytest.approx(-4.02, abs=1e-12)
    r = ed_solve(build_dense_sector_hamiltonian(dense_spec, 0.0, 4))
    assert r.energies[0] == pytest.approx(-4.0, abs=1e-10)


@pytest.mark.parametrize("s", [0.13, 0.37, 0.52, 0.78, 0.95])
def test_sector_subset_of_full_spectrum(s):
    spec = ModelSpec.dense(xi=(0.0, 0.0, -2.0))
    wsec, _ = jacobi_eigh(build_dense_sector_hamiltonian(spec, s, 4))
    full = build_dense_full_operator(spec, s, 4).to_dense()
    wfull, _ = jacobi_eigh(full)
    for x in wsec:
        assert min(abs(wfull - x)) < 1e-10


def test_sector_ground_matches_classical(dense_spec):
    r = dense_ed(dense_spec, 0.2, 100)
    st = global_minimize(dense_spec, 0.2)
    assert abs(r.m2z - st.m.m2[2]) < 5e-2
    assert abs(r.m1z - st.m.m1[2]) < 5e-2


def test_jacobi_and_lanczos_paths_agree(dense_spec):
    # dim 121 sector runs through Jacobi; force the Lanczos path on the
    # operator and compare
    op = build_dense_sector_operator(dense_spec, 0.6, 20)
    dense_path = ed_solve(build_dense_sector_hamiltonian(dense_spec, 0.6, 20))
    w, _ = lanczos_lowest(op.matvec, op.dim, k=2, tol=1e-13)
    assert np.abs(w - dense_path.energies).max() < 1e-9


def test_ed_solve_validation(dense_spec):
    H = build_dense_sector_hamiltonian(dense_spec, 0.5, 4)
    with pytest.raises(ValueError):
        ed_solve(H, k=1)
    with pytest.raises(ValueError):
        ed_solve(np.zeros((10, 10)))  # not a sector dimension
    with pytest.raises(SizeError):
        build_dense_sector_hamiltonian(dense_spec, 0.5, 68)
    with pytest.raises(SizeError):
        build_dense_sector_operator(dense_spec, 0.5, 2004)


def test_sparse_full_small_cases(sparse_spec):
    op = build_sparse_full_hamiltonian(sparse_spec, 1.0, 2)
    H = op.to_dense()
    assert H.shape == (4, 4)
    assert H[0, 0] == pytest.approx(-2.01, abs=1e-12)
    r = sparse_ed(sparse_spec, 0.0, 8)
    assert r.energies[0] == pytest.approx(-8.0, abs=1e-9)
    with pytest.raises(SizeError):
        build_sparse_full_hamiltonian(sparse_spec, 0.5, 16)
    with pytest.raises(ValueError):
        build_sparse_full_hamiltonian(sparse_spec, 0.5, 7)


def test_sparse_full_matches_brute_force(sparse_spec, rng):
    # independent dense construction from explicit Pauli kron products
    import functools

    sx = np.array([[0, 1], [1, 0]], dtype=float)
    sz = np.array([[1, 0], [0, -1]], dtype=float)
    eye = np.eye(2)

    def site(op, r, N):
        mats = [eye] * N
        mats[r] = op
        return functools.reduce(np.kron, mats)

    N = 6
    n2 = 3
    s = 0.43
    spec = ModelSpec.sparse(xi=(1.3, -0.7, -2.1))
    H = np.zeros((2 ** N, 2 ** N))
    Z = [site(sz, r, N) for r in range(N)]
    X = [site(sx, r, N) for r in range(N)]
    for r in range(n2):
        H += -s * (spec.fields.h1 * Z[r] + spec.fields.h2 * Z[n2 + r])
        H += -(1 - s) * (X[r] + X[n2 + r])
        H += -s * 0.5 * Z[r] @ Z[n2 + r]
        H += -s * (1 - s) * spec.catalyst.xi12 / 2.0 * X[r] @ X[n2 + r]
    for r in range(n2):
        for rp in range(n2):
            H += -s / N * (Z[r] @ Z[rp] + Z[n2 + r] @ Z[n2 + rp])
            H += -s * (1 - s) / N * (spec.catalyst.xi11 * X[r] @ X[rp]
                                     + spec.catalyst.xi22 * X[n2 + r] @ X[n2 + rp])
    # bit r of the module's basis is this construction's site r; the module
    # orders basis states by integer value, kron by most-significant first
    op = build_sparse_full_hamiltonian(spec, s, N)
    Hmod = op.to_dense()
    # compare spectra (basis orderings differ)
    assert np.abs(np.linalg.eigvalsh(H) - np.linalg.eigvalsh(Hmod)).max() < 1e-10


def test_variational_convergence_rate(dense_spec):
    st = global_minimize(dense_spec, 0.2)
    h_cl = st.energy
    scaled = []
    for N in (40, 100, 200, 400):
        r = dense_ed(dense_spec, 0.2, N)
        scaled.append(N * abs(r.energies[0] / N - h_cl))
    scaled = np.array(scaled)
    assert scaled.max() / scaled.min() < 1.5
    # finite-size ground energy sits below the classical bound here
    assert all(dense_ed(dense_spec, 0.2, N).energies[0] / N <= h_cl for N in (40, 100))


def test_gap_shrinks_with_size_at_transition(dense_spec):
    rep = detect_transition(dense_spec)
    assert rep.found
    gaps = [dense_ed(dense_spec, rep.s_star, N, tol=1e-13).gap
            for N in (40, 80, 120)]
    assert gaps[0] > gaps[1] > gaps[2] > 0.0


def test_gap_positive_away_from_transition(dense_spec):
    for s in (0.2, 0.5, 0.9):
        assert dense_ed(dense_spec, s, 100).gap > 1e-3
