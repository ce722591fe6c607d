"""Finite-size exact-diagonalization oracle.

The dense model conserves the per-cluster total spin, so its low-energy
physics at size N lives in a product of two spin-(N/4) multiplets of
dimension (N/2+1)^2; that sector Hamiltonian is built from ladder matrix
elements.  The sparse model has no such reduction and is diagonalized in
the full 2^N space at small N.  Both feed the in-repo Jacobi/Lanczos
solvers and return energies, ground magnetizations, and the gap.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .eigensolvers import jacobi_eigh, lanczos_lowest
from .errors import SizeError
from .model import Coupling, ModelSpec, _coeffs

_DENSE_BUDGET = 1100       # max dimension for materialized sector matrices
_JACOBI_LIMIT = 200        # dense Jacobi below, Lanczos above
_SPARSE_LIMIT_N = 14


@dataclass(frozen=True)
class SectorSpec:
    """Size bookkeeping for the two-large-spin sector."""

    N: int
    S: float
    dim: int

    @classmethod
    def for_size(cls, N: int) -> "SectorSpec":
        N = int(N)
        if N <= 0 or N % 4 != 0:
            raise ValueError("N must be a positive multiple of 4")
        d = N // 2 + 1
        return cls(N=N, S=N / 4.0, dim=d * d)


@dataclass(frozen=True)
class EDResult:
    energies: np.ndarray   # lowest k, extensive
    m1z: float
    m2z: float
    gap: float


@dataclass(frozen=True)
class EDOperator:
    """Matrix-free symmetric operator with magnetization diagonals."""

    dim: int
    matvec: Callable[[np.ndarray], np.ndarray]
    m1z_diag: np.ndarray
    m2z_diag: np.ndarray

    def to_dense(self) -> np.ndarray:
        if self.dim > 4096:
            raise SizeError(f"refusing to materialize a {self.dim}-dim operator")
        out = np.empty((self.dim, self.dim))
        e = np.zeros(self.dim)
        for j in range(self.dim):
            e[j] = 1.0
            out[:, j] = self.matvec(e)
            e[j] = 0.0
        return 0.5 * (out + out.T)


def _ladder_x(d: int, S: float) -> np.ndarray:
    """Matrix of m^x = S^x / S in the |S, m> basis, ascending m."""
    m = np.arange(d) - S
    off = 0.5 * np.sqrt(S * (S + 1.0) - m[:-1] * (m[:-1] + 1.0)) / S
    X = np.zeros((d, d))
    idx = np.arange(d - 1)
    X[idx + 1, idx] = off
    X[idx, idx + 1] = off
    return X


def build_dense_sector_operator(spec: ModelSpec, s: float, N: int) -> EDOperator:
    """Sector Hamiltonian of the dense model as a matrix-free operator."""
    if spec.coupling is not Coupling.DENSE:
        raise ValueError("sector reduction applies to the dense model")
    sector = SectorSpec.for_size(N)
    if N > 2000:
        raise SizeError(f"N={N} exceeds the N<=2000 budget")
    c = _coeffs(spec, s)
    d = N // 2 + 1
    S = sector.S
    mz = (np.arange(d) - S) / S
    X = _ladder_x(d, S)
    X2 = X @ X
    W = N * (
        -(c.s / 2.0) * (c.h1 * mz[:, None] + c.h2 * mz[None, :])
        - (c.s / 4.0) * (mz[:, None] ** 2 + mz[None, :] ** 2 + mz[:, None] * mz[None, :])
    )
    a1 = N * c.a1
    a2 = N * c.a2
    k11 = N * c.c11
    k22 = N * c.c22
    k12 = N * c.c12

    def matvec(v):
        P = v.reshape(d, d)
        out = W * P
        out -= a1 * (X @ P) + a2 * (P @ X)
        if k11:
            out -= k11 * (X2 @ P)
        if k22:
            out -= k22 * (P @ X2)
        if k12:
            out -= k12 * (X @ P @ X)
        return out.ravel()

    m1z_diag = np.repeat(mz, d)
    m2z_diag = np.tile(mz, d)
    return EDOperator(dim=d * d, matvec=matvec, m1z_diag=m1z_diag, m2z_diag=m2z_diag)


def build_dense_sector_hamiltonian(spec: ModelSpec, s: float, N: int) -> np.ndarray:
    """Materialized sector matrix; real symmetric by construction.

    Dense storage is limited to dim <= 1100; larger sizes must use the
    matrix-free operator.
    """
    op = build_dense_sector_operator(spec, s, N)
    if op.dim > _DENSE_BUDGET:
        raise SizeError(
            f"sector dimension {op.dim} exceeds the dense budget {_DENSE_BUDGET}; "
            "use build_dense_sector_operator"
        )
    out = np.empty((op.dim, op.dim))
    e = np.zeros(op.dim)
    for j in range(op.dim):
        e[j] = 1.0
        out[:, j] = op.matvec(e)
        e[j] = 0.0
    return 0.5 * (out + out.T)


def _spin_z_table(N: int) -> np.ndarray:
    idx = np.arange(1 << N)
    return 1 - 2 * ((idx[:, None] >> np.arange(N)[None, :]) & 1)


def build_sparse_full_hamiltonian(spec: ModelSpec, s: float, N: int) -> EDOperator:
    """Full 2^N Hamiltonian of the sparse model, as a matrix-free operator.

    Site r of cluster 1 is bit r; site r of cluster 2 is bit N/2 + r, and
    the pairwise coupling ties bit r to bit N/2 + r.
    """
    if spec.coupling is not Coupling.SPARSE:
        raise ValueError("full-space builder applies to the sparse model")
    N = int(N)
    if N % 2 != 0 or N <= 0:
        raise ValueError("N must be a positive even integer")
    if N > _SPARSE_LIMIT_N:
        raise SizeError(f"N={N} exceeds the full-space limit N<={_SPARSE_LIMIT_N}")
    c = _coeffs(spec, s)
    n2 = N // 2
    dim = 1 << N
    sz = _spin_z_table(N)
    z1 = sz[:, :n2].sum(axis=1).astype(float)
    z2 = sz[:, n2:].sum(axis=1).astype(float)
    diag = -c.s * (c.h1 * z1 + c.h2 * z2)
    diag += -(c.s / N) * (z1 * z1 + z2 * z2)
    diag += -(c.s / 2.0) * (sz[:, :n2] * sz[:, n2:]).sum(axis=1)
    # transverse fields and catalysts flip bits; coefficients per flip mask
    cs = c.s * (1.0 - c.s)
    xi11, xi22, xi12 = spec.catalyst.xi11, spec.catalyst.xi22, spec.catalyst.xi12
    terms: list[tuple[int, float]] = []
    for r in range(n2):
        terms.append((1 << r, -2.0 * c.a1))
        terms.append((1 << (n2 + r), -2.0 * c.a2))
    if xi11:
        diag += -cs * xi11 / N * n2  # r = r' diagonal of the intracluster sum
        for r in range(n2):
            for rp in range(r + 1, n2):
                terms.append(((1 << r) | (1 << rp), -2.0 * cs * xi11 / N))
    if xi22:
        diag += -cs * xi22 / N * n2
        for r in range(n2):
            for rp in range(r + 1, n2):
                terms.append(((1 << (n2 + r)) | (1 << (n2 + rp)), -2.0 * cs * xi22 / N))
    if xi12:
        for r in range(n2):
            terms.append(((1 << r) | (1 << (n2 + r)), -cs * xi12 / 2.0))
    idx = np.arange(dim)
    flips = [(idx ^ mask, coeff) for mask, coeff in terms]

    def matvec(v):
        out = diag * v
        for perm, coeff in flips:
            out += coeff * v[perm]
        return out

    return EDOperator(dim=dim, matvec=matvec, m1z_diag=z1 / n2, m2z_diag=z2 / n2)


def build_dense_full_operator(spec: ModelSpec, s: float, N: int) -> EDOperator:
    """Full 2^N Hamiltonian of the dense model (sector-validation helper)."""
    if spec.coupling is not Coupling.DENSE:
        raise ValueError("builder applies to the dense model")
    N = int(N)
    if N % 2 != 0 or N <= 0:
        raise ValueError("N must be a positive even integer")
    if N > _SPARSE_LIMIT_N:
        raise SizeError(f"N={N} exceeds the full-space limit N<={_SPARSE_LIMIT_N}")
    c = _coeffs(spec, s)
    n2 = N // 2
    dim = 1 << N
    sz = _spin_z_table(N)
    m1z = sz[:, :n2].sum(axis=1) * (2.0 / N)
    m2z = sz[:, n2:].sum(axis=1) * (2.0 / N)
    diag = N * (
        -(c.s / 2.0) * (c.h1 * m1z + c.h2 * m2z)
        - (c.s / 4.0) * (m1z ** 2 + m2z ** 2 + m1z * m2z)
    )
    terms: dict[int, float] = {}

    def add(mask, coeff):
        terms[mask] = terms.get(mask, 0.0) + coeff

    w = 2.0 / N  # single sigma^x inside m^x
    for r in range(n2):
        add(1 << r, N * (-c.a1) * w)
        add(1 << (n2 + r), N * (-c.a2) * w)
    if spec.catalyst.xi11:
        diag = diag + N * (-c.c11) * w * w * n2
        for r in range(n2):
            for rp in range(r + 1, n2):
                add((1 << r) | (1 << rp), 2.0 * N * (-c.c11) * w * w)
    if spec.catalyst.xi22:
        diag = diag + N * (-c.c22) * w * w * n2
        for r in range(n2):
            for rp in range(r + 1, n2):
                add((1 << (n2 + r)) | (1 << (n2 + rp)), 2.0 * N * (-c.c22) * w * w)
    if spec.catalyst.xi12:
        for r in range(n2):
            for rp in range(n2):
                add((1 << r) | (1 << (n2 + rp)), N * (-c.c12) * w * w)
    idx = np.arange(dim)
    flips = [(idx ^ mask, coeff) for mask, coeff in terms.items()]

    def matvec(v):
        out = diag * v
        for perm, coeff in flips:
            out += coeff * v[perm]
        return out

    return EDOperator(dim=dim, matvec=matvec, m1z_diag=m1z, m2z_diag=m2z)


def _sector_diags_from_dim(dim: int):
    d = int(round(np.sqrt(dim)))
    if d * d != dim:
        raise ValueError(
            "cannot infer the sector layout from a plain matrix of this size; "
            "pass an EDOperator instead"
        )
    S = (d - 1) / 2.0
    mz = (np.arange(d) - S) / S
    return np.repeat(mz, d), np.tile(mz, d)


def ed_solve(H, k: int = 2, tol: float = 1e-12, max_iter: int | None = None,
             seed: int = 7) -> EDResult:
    """Lowest-k eigenpairs and ground-state magnetizations.

    Accepts an EDOperator or a plain sector matrix.  Jacobi handles
    dimensions up to 200; Lanczos with full reorthogonalization takes over
    above that, falling back to the dense path on breakdown when the size
    allows.  Ground states degenerate within 1e-10 are averaged.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if isinstance(H, EDOperator):
        op = H
    else:
        M = np.asarray(H, dtype=float)
        m1d, m2d = _sector_diags_from_dim(M.shape[0])
        op = EDOperator(dim=M.shape[0], matvec=lambda v, _M=M: _M @ v,
                        m1z_diag=m1d, m2z_diag=m2d)
    if op.dim <= _JACOBI_LIMIT:
        M = H if isinstance(H, np.ndarray) else op.to_dense()
        w, V = jacobi_eigh(np.asarray(M, dtype=float))
        w, V = w[:k], V[:, :k]
    else:
        try:
            w, V = lanczos_lowest(op.matvec, op.dim, k=k, tol=tol,
                                  max_iter=max_iter, seed=seed)
        except SizeError:
            if op.dim <= 4096:
                w, V = jacobi_eigh(op.to_dense())
                w, V = w[:k], V[:, :k]
            else:
                raise
    # degeneracy-averaged ground expectations
    nground = max(1, int(np.sum(w < w[0] + 1e-10)))
    P = (V[:, :nground] ** 2).sum(axis=1) / nground
    m1z = float(P @ op.m1z_diag)
    m2z = float(P @ op.m2z_diag)
    return EDResult(energies=np.asarray(w[:k], dtype=float), m1z=m1z, m2z=m2z,
                    gap=float(w[1] - w[0]) if len(w) > 1 else 0.0)


def dense_ed(spec: ModelSpec, s: float, N: int, k: int = 2, **kw) -> EDResult:
    """Sector ED of the dense model, choosing the solver by size."""
    op = build_dense_sector_operator(spec, s, N)
    if op.dim <= _JACOBI_LIMIT:
        return ed_solve(build_dense_sector_hamiltonian(spec, s, N), k=k, **kw)
    return ed_solve(op, k=k, **kw)


def sparse_ed(spec: ModelSpec, s: float, N: int, k: int = 2, **kw) -> EDResult:
    """Full-space ED of the sparse model at small N."""
    return ed_solve(build_sparse_full_hamiltonian(spec, s, N), k=k, **kw)


def gap_sequence(spec: ModelSpec, s: float, sizes, **kw) -> np.ndarray:
    """ED gaps at the given system sizes (dense sector path)."""
    return np.array([dense_ed(spec, s, int(N), **kw).gap for N in sizes])


def extrapolate_gap(sizes, gaps) -> float:
    """Intercept of the least-squares linear fit of gap against 1/N."""
    x = 1.0 / np.asarray(sizes, dtype=float)
    y = np.asarray(gaps, dtype=float)
    A = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(coef[1])
