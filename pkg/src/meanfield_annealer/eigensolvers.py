"""Self-contained eigensolvers used by the gap and oracle modules.

Three solvers live here so the oracle path stays independent of external
eigenpackages:

* cyclic Jacobi for real-symmetric / complex-Hermitian matrices,
* Lanczos with full reorthogonalization on top of a matvec, with the
  tridiagonal eigenproblem handled by Sturm-sequence bisection and
  inverse iteration,
* a dense general complex eigensolver (Hessenberg reduction plus shifted
  QR) with left-eigenvector extraction by nullspace elimination, sized
  for the 4x4 fluctuation problem but written for any small n.
"""
from __future__ import annotations

import numpy as np

from .errors import SizeError


# ---------------------------------------------------------------------------
# Jacobi diagonalization (real symmetric or complex Hermitian)

def jacobi_eigh(A: np.ndarray, tol: float = 1e-14, max_sweeps: int = 60):
    """Full eigendecomposition of a Hermitian matrix by cyclic Jacobi.

    Returns (w, V) with ascending eigenvalues; V[:, i] is the eigenvector
    for w[i].  Intended for modest sizes (n up to a few hundred).
    """
    A = np.asarray(A)
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise ValueError("matrix must be square")
    scale = max(float(np.abs(A).max()), 1.0) if n else 1.0
    if n and float(np.abs(A - A.conj().T).max()) > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    complex_input = np.iscomplexobj(A) and float(np.abs(np.imag(A)).max()) > 1e-14 * scale
    work = A.copy() if complex_input else np.real(A).astype(float)
    work = 0.5 * (work + work.conj().T)
    V = np.eye(n, dtype=work.dtype)
    if n <= 1:
        return work.diagonal().real.copy(), V

    for _ in range(max_sweeps):
        off = work.copy()
        off[np.diag_indices(n)] = 0.0
        if float(np.abs(off).max()) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if abs(apq) <= tol * scale * 1e-2:
                    continue
                app = work[p, p].real
                aqq = work[q, q].real
                ph = apq / abs(apq)  # phase making the rotated pivot real
                tau = (aqq - app) / (2.0 * abs(apq))
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                sn = t * c
                cp = work[:, p].copy()
                cq = work[:, q].copy()
                work[:, p] = c * cp - sn * np.conj(ph) * cq
                work[:, q] = sn * ph * cp + c * cq
                rp = work[p, :].copy()
                rq = work[q, :].copy()
                work[p, :] = c * rp - sn * ph * rq
                work[q, :] = sn * np.conj(ph) * rp + c * rq
                work[p, q] = 0.0
                work[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - sn * np.conj(ph) * vq
                V[:, q] = sn * ph * vp + c * vq
    w = work.diagonal().real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], V[:, order]


# ---------------------------------------------------------------------------
# Symmetric tridiagonal eigenproblem

def _sturm_count(alpha, beta2, x):
    """Number of eigenvalues of the tridiagonal (alpha, beta) below x."""
    count = 0
    d = 1.0
    for i in range(len(alpha)):
        d = alpha[i] - x - (beta2[i - 1] / d if i > 0 else 0.0)
        if d == 0.0:
            d = -1e-300
        if d < 0.0:
            count += 1
    return count


def tridiag_lowest(alpha, beta, k: int, tol: float = 1e-14):
    """Lowest k eigenvalues of a symmetric tridiagonal matrix by bisection."""
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n = len(alpha)
    k = min(k, n)
    beta2 = beta * beta
    radius = float(np.abs(alpha).max() + (2.0 * np.abs(beta).max() if len(beta) else 0.0))
    eigs = np.empty(k)
    for j in range(1, k + 1):
        lo, hi = -radius - 1.0, radius + 1.0
        while hi - lo > tol * max(1.0, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if _sturm_count(alpha, beta2, mid) >= j:
                hi = mid
            else:
                lo = mid
        eigs[j - 1] = 0.5 * (lo + hi)
    return eigs


def _solve_shifted_tridiag(alpha, beta, shift, rhs):
    """Solve (T - shift I) x = rhs by banded elimination with partial pivoting.

    Pivoting introduces one extra superdiagonal of fill-in.
    """
    n = len(alpha)
    d = (alpha - shift).astype(float).copy()
    u1 = np.zeros(n)
    if n > 1:
        u1[: n - 1] = beta
    u2 = np.zeros(n)
    sub = beta.astype(float).copy() if n > 1 else np.zeros(0)
    x = np.asarray(rhs, dtype=float).copy()
    for i in range(n - 1):
        row_i = (d[i], u1[i], u2[i])
        row_n = (sub[i], d[i + 1], u1[i + 1] if i + 1 < n - 1 else 0.0)
        if abs(row_n[0]) > abs(row_i[0]):
            d[i], u1[i], u2[i] = row_n
            elim, dnext, unext = row_i
            x[i], x[i + 1] = x[i + 1], x[i]
        else:
            elim, dnext, unext = row_n
        if d[i] == 0.0:
            d[i] = 1e-300
        f = elim / d[i]
        d[i + 1] = dnext - f * u1[i]
        if i + 1 < n - 1:
            u1[i + 1] = unext - f * u2[i]
        x[i + 1] -= f * x[i]
    if d[n - 1] == 0.0:
        d[n - 1] = 1e-300
    out = np.zeros(n)
    out[n - 1] = x[n - 1] / d[n - 1]
    for i in range(n - 2, -1, -1):
        acc = x[i] - u1[i] * out[i + 1]
        if i + 2 < n:
            acc -= u2[i] * out[i + 2]
        out[i] = acc / d[i]
    return out


def tridiag_eigvecs(alpha, beta, lams, seed: int = 977, cluster_tol: float = 1e-9):
    """Eigenvectors for the given tridiagonal eigenvalues by inverse iteration.

    Vectors belonging to clustered eigenvalues are orthogonalized against
    each other between iterations.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    n = len(alpha)
    rng = np.random.default_rng(seed)
    scale = max(1.0, float(np.abs(alpha).max()), float(np.abs(beta).max()) if len(beta) else 0.0)
    vecs = []
    for i, lam in enumerate(lams):
        near = [p for p in range(i) if abs(lams[p] - lam) < cluster_tol * scale]
        v = rng.standard_normal(n)
        v /= np.linalg.norm(v)
        shift = lam + 1e-13 * scale
        for _ in range(4):
            v = _solve_shifted_tridiag(alpha, beta, shift, v)
            for p in near:
                v -= (vecs[p] @ v) * vecs[p]
            nv = np.linalg.norm(v)
            if nv == 0.0:
                v = rng.standard_normal(n)
                nv = np.linalg.norm(v)
            v /= nv
        vecs.append(v)
    return np.array(vecs).T


# ---------------------------------------------------------------------------
# Lanczos with full reorthogonalization

def lanczos_lowest(matvec, dim: int, k: int = 2, tol: float = 1e-12,
                   max_iter: int | None = None, seed: int = 7,
                   want_vectors: bool = True):
    """Lowest-k eigenpairs of a symmetric operator given by its matvec.

    Full reorthogonalization against the whole Krylov basis keeps Ritz
    values clean enough to resolve small gaps.  Returns (w, V); V holds
    Ritz vectors as columns, or None when ``want_vectors`` is false.

    Raises SizeError when repeated breakdowns prevent convergence.
    """
    if max_iter is None:
        max_iter = min(dim, 500)
    max_iter = min(max_iter, dim)
    rng = np.random.default_rng(seed)
    q = rng.standard_normal(dim)
    q /= np.linalg.norm(q)
    basis = np.empty((max_iter, dim))
    basis[0] = q
    alpha: list[float] = []
    beta: list[float] = []
    prev = None
    restarts = 0
    j = 0
    while j < max_iter:
        w = matvec(basis[j])
        a = float(basis[j] @ w)
        alpha.append(a)
        w = w - a * basis[j]
        if j > 0:
            w = w - beta[-1] * basis[j - 1]
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
        b = float(np.linalg.norm(w))
        j += 1
        if j >= max(2 * k + 2, 6) and (j % 10 == 0 or j == max_iter or b < 1e-13):
            vals = tridiag_lowest(np.array(alpha), np.array(beta), k)
            if prev is not None and len(vals) >= k:
                err = float(np.abs(vals[:k] - prev[:k]).max())
                if err < tol * max(1.0, float(np.abs(vals).max())):
                    break
            prev = vals
        if b < 1e-13:
            if j >= dim:
                break
            restarts += 1
            if restarts > 3:
                raise SizeError("Lanczos breakdown: invariant subspace too small")
            q = rng.standard_normal(dim)
            for _ in range(2):
                q -= basis[:j].T @ (basis[:j] @ q)
            nq = np.linalg.norm(q)
            if nq < 1e-10:
                break
            if j < max_iter:
                basis[j] = q / nq
                beta.append(0.0)
            continue
        if j < max_iter:
            basis[j] = w / b
            beta.append(b)
    alpha_arr = np.array(alpha)
    beta_arr = np.array(beta[: len(alpha_arr) - 1])
    kk = min(k, len(alpha_arr))
    vals = tridiag_lowest(alpha_arr, beta_arr, kk)
    if not want_vectors:
        return vals, None
    y = tridiag_eigvecs(alpha_arr, beta_arr, vals, seed=seed + 1)
    vecs = basis[: len(alpha_arr)].T @ y
    vecs /= np.linalg.norm(vecs, axis=0, keepdims=True)
    for i in range(kk):
        vals[i] = float(vecs[:, i] @ matvec(vecs[:, i]))
    order = np.argsort(vals)
    return vals[order], vecs[:, order]


# ---------------------------------------------------------------------------
# General complex eigenvalues for small dense matrices

def _hessenberg(A: np.ndarray) -> np.ndarray:
    H = A.astype(complex).copy()
    n = H.shape[0]
    for kcol in range(n - 2):
        x = H[kcol + 1 :, kcol].copy()
        nx = np.linalg.norm(x)
        if nx < 1e-300:
            continue
        v = x.copy()
        piv = x[0]
        phase = piv / abs(piv) if abs(piv) > 0 else 1.0
        v[0] += phase * nx
        nv = np.linalg.norm(v)
        if nv < 1e-300:
            continue
        v /= nv
        H[kcol + 1 :, kcol:] -= 2.0 * np.outer(v, v.conj() @ H[kcol + 1 :, kcol:])
        H[:, kcol + 1 :] -= 2.0 * np.outer(H[:, kcol + 1 :] @ v, v.conj())
    return H


def _givens(f: complex, g: complex):
    """Rotation G = [[c, s], [-conj(s), c]] with G @ (f, g) = (r, 0)."""
    if g == 0:
        return 1.0, 0.0 + 0.0j
    if f == 0:
        return 0.0, 1.0 + 0.0j
    r = np.hypot(abs(f), abs(g))
    c = abs(f) / r
    s = (f / abs(f)) * np.conj(g) / r
    return c, s


def _eig2(a, b, c, d):
    """Eigenvalues of [[a, b], [c, d]], product form to limit cancellation."""
    tr = a + d
    det = a * d - b * c
    disc = np.sqrt(tr * tr - 4.0 * det + 0.0j)
    l1 = 0.5 * (tr + disc)
    l2 = 0.5 * (tr - disc)
    if abs(l1) > abs(l2) and abs(l1) > 0:
        l2 = det / l1
    elif abs(l2) > 0:
        l1 = det / l2
    return l1, l2


def eig_general(A: np.ndarray, max_steps: int = 400) -> np.ndarray:
    """All eigenvalues of a small general complex matrix.

    Hessenberg reduction followed by Wilkinson-shifted QR with deflation.
    Unsorted output.
    """
    A = np.asarray(A)
    n = A.shape[0]
    if A.ndim != 2 or A.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return np.zeros(0, dtype=complex)
    if n == 1:
        return A.astype(complex).ravel().copy()
    scale = max(float(np.abs(A).max()), 1e-300)
    H = _hessenberg(A / scale)
    eps = 1e-16
    eigs = []
    hi = n - 1
    stagnation = 0
    steps = 0
    while hi >= 0 and steps < max_steps:
        for i in range(hi, 0, -1):
            if abs(H[i, i - 1]) <= eps * (abs(H[i - 1, i - 1]) + abs(H[i, i]) + 1e-300):
                H[i, i - 1] = 0.0
        if hi == 0 or H[hi, hi - 1] == 0.0:
            eigs.append(H[hi, hi])
            hi -= 1
            stagnation = 0
            continue
        if hi == 1 or H[hi - 1, hi - 2] == 0.0:
            l1, l2 = _eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
            eigs.extend([l1, l2])
            hi -= 2
            stagnation = 0
            continue
        l1, l2 = _eig2(H[hi - 1, hi - 1], H[hi - 1, hi], H[hi, hi - 1], H[hi, hi])
        shift = l1 if abs(l1 - H[hi, hi]) <= abs(l2 - H[hi, hi]) else l2
        stagnation += 1
        if stagnation % 12 == 0:
            shift = H[hi, hi] + abs(H[hi, hi - 1])  # exceptional shift
        W = H[: hi + 1, : hi + 1]
        W -= shift * np.eye(hi + 1)
        rots = []
        for i in range(hi):
            c, s = _givens(W[i, i], W[i + 1, i])
            rots.append((c, s))
            ri = W[i, :].copy()
            rn = W[i + 1, :].copy()
            W[i, :] = c * ri + s * rn
            W[i + 1, :] = -np.conj(s) * ri + c * rn
        for i, (c, s) in enumerate(rots):
            ci = W[:, i].copy()
            cn = W[:, i + 1].copy()
            W[:, i] = c * ci + np.conj(s) * cn
            W[:, i + 1] = -s * ci + c * cn
        W += shift * np.eye(hi + 1)
        steps += 1
    if hi >= 0 and steps >= max_steps:
        raise RuntimeError("QR iteration failed to converge")
    return scale * np.array(eigs[::-1], dtype=complex)


def null_basis(M: np.ndarray, nullity: int) -> list[np.ndarray]:
    """Basis of an (approximate) nullspace of known dimension.

    Full-pivot Gaussian elimination with exactly rank = n - nullity steps;
    the remaining columns are treated as free variables.
    """
    M = np.asarray(M, dtype=complex)
    n = M.shape[0]
    U = M.copy()
    colperm = np.arange(n)
    rank = n - nullity
    steps = 0
    for step in range(rank):
        sub = np.abs(U[step:, step:])
        p, q = np.unravel_index(np.argmax(sub), sub.shape)
        p += step
        q += step
        if sub.max() < 1e-14 * max(1.0, float(np.abs(M).max())):
            break
        if p != step:
            U[[step, p], :] = U[[p, step], :]
        if q != step:
            U[:, [step, q]] = U[:, [q, step]]
            colperm[[step, q]] = colperm[[q, step]]
        U[step + 1 :, step:] -= np.outer(U[step + 1 :, step] / U[step, step], U[step, step:])
        steps += 1
    basis = []
    for j in range(steps, n):
        x = np.zeros(n, dtype=complex)
        x[j] = 1.0
        for i in range(steps - 1, -1, -1):
            x[i] = -(U[i, i + 1 :] @ x[i + 1 :]) / U[i, i]
        y = np.zeros(n, dtype=complex)
        y[colperm] = x
        y /= np.linalg.norm(y)
        basis.append(y)
    return basis
