"""Self-consistent solution of the sparse-intercluster model.

The pairwise coupling is decoupled through conjugate fields: a 4x4
effective two-spin Hamiltonian is diagonalized exactly, its (degeneracy
averaged) ground expectations feed back into the mean-field gradient, and
the loop is iterated to a fixed point.  Zero temperature is the primary
path; the finite-temperature free energy is kept as a homotopy device
for hard points and as a diagnostic.

The whole construction takes the decoupling fields to be constant in
imaginary time.  That is a modeling assumption baked into the equations,
not a property this module verifies.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import transitions
from .classical import Direction, TransitionReport
from .eigensolvers import jacobi_eigh
from .errors import ConvergenceError
from .model import (Coupling, CouplingMatrix, MagPair, ModelSpec, _coeffs,
                    _sparse_energy, _sparse_grad, coupling_matrix)

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]])
_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)
_PAULI = (_SX, _SY, _SZ)
_S1 = [np.kron(p, _I2) for p in _PAULI]
_S2 = [np.kron(_I2, p) for p in _PAULI]
_S1S2 = [[np.kron(a, b) for b in _PAULI] for a in _PAULI]


@dataclass(frozen=True)
class ConjugateFields:
    mt1: np.ndarray
    mt2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mt1", np.asarray(self.mt1, dtype=float).reshape(3))
        object.__setattr__(self, "mt2", np.asarray(self.mt2, dtype=float).reshape(3))


@dataclass(frozen=True)
class EffectiveHamiltonian:
    """4x4 Hermitian two-spin Hamiltonian on the product basis
    {up-up, up-down, down-up, down-down}."""

    matrix: np.ndarray


@dataclass(frozen=True)
class SaddleSolution:
    s: float
    m: MagPair                  # ground expectations, |m_a| <= 1
    mt: ConjugateFields
    lambda0: float
    degeneracy: int
    u: float                    # ground-state energy density
    converged: bool
    residual: float
    indeterminate: tuple[bool, bool] = (False, False)

    @property
    def m2z(self) -> float:
        return float(self.m.m2[2])


def build_effective_hamiltonian(mt: ConjugateFields, K: CouplingMatrix) -> EffectiveHamiltonian:
    """Assemble -mt1.sigma1 - mt2.sigma2 - sigma1.K12.sigma2.

    The symmetrized double sum over both cluster orderings collapses to the
    single K12 term.
    """
    if not (np.all(np.isfinite(mt.mt1)) and np.all(np.isfinite(mt.mt2))
            and np.all(np.isfinite(K.K12))):
        raise ValueError("effective Hamiltonian inputs must be finite")
    H = np.zeros((4, 4), dtype=complex)
    for a in range(3):
        if mt.mt1[a]:
            H -= mt.mt1[a] * _S1[a]
        if mt.mt2[a]:
            H -= mt.mt2[a] * _S2[a]
        for b in range(3):
            if K.K12[a, b]:
                H -= K.K12[a, b] * _S1S2[a][b]
    return EffectiveHamiltonian(matrix=H)


def ground_block(H: EffectiveHamiltonian, degeneracy_tol: float = 1e-9):
    """Ground eigenvalue, its degeneracy, and degeneracy-averaged
    single-spin expectations.

    Returns (lambda0, g, m1_exp, m2_exp).
    """
    w, V = jacobi_eigh(H.matrix)
    lam0 = float(w[0])
    g = int(np.sum(w < lam0 + degeneracy_tol))
    near = int(np.sum(w < lam0 + 1e-6))
    if near > g:
        warnings.warn(
            f"near-degenerate ground block (splitting within 1e-6 of {lam0:g}); "
            "the degeneracy count is sensitive to the tolerance here",
            stacklevel=2,
        )
    vecs = V[:, :g]
    m1 = np.array([float(np.real(np.einsum("in,ij,jn->", vecs.conj(), _S1[a], vecs))) / g
                   for a in range(3)])
    m2 = np.array([float(np.real(np.einsum("in,ij,jn->", vecs.conj(), _S2[a], vecs))) / g
                   for a in range(3)])
    return lam0, g, m1, m2


def _thermal_block(H: EffectiveHamiltonian, beta: float):
    w, V = jacobi_eigh(H.matrix)
    lam0 = float(w[0])
    weights = np.exp(-beta * (w - lam0))
    weights /= weights.sum()
    m1 = np.array([float(np.real(np.einsum("in,ij,jn,n->", V.conj(), _S1[a], V, weights)))
                   for a in range(3)])
    m2 = np.array([float(np.real(np.einsum("in,ij,jn,n->", V.conj(), _S2[a], V, weights)))
                   for a in range(3)])
    return lam0, w, m1, m2


def conjugate_fields(spec: ModelSpec, s: float, m: MagPair) -> ConjugateFields:
    """Fields conjugate to the magnetizations: -2 d(h_m)/dm_a for two clusters."""
    if spec.coupling is not Coupling.SPARSE:
        raise ValueError("conjugate fields are defined for the sparse model")
    g1, g2 = _sparse_grad(_coeffs(spec, s), m.m1, m.m2)
    return ConjugateFields(mt1=-2.0 * g1, mt2=-2.0 * g2)


def _energy_density(coeffs, K, m1, m2):
    g1, g2 = _sparse_grad(coeffs, m1, m2)
    mt1, mt2 = -2.0 * g1, -2.0 * g2
    H = build_effective_hamiltonian(ConjugateFields(mt1, mt2), K)
    lam0, g, _, _ = ground_block(H)
    hm = _sparse_energy(coeffs, m1, m2)
    u = 0.5 * (mt1 @ m1 + mt2 @ m2) + hm + 0.5 * lam0
    return u, lam0, g, ConjugateFields(mt1, mt2)


def solve_saddle(spec: ModelSpec, s: float, init: MagPair, damping: float = 0.5,
                 max_iter: int = 10000, tol: float = 1e-10,
                 beta: float | None = None) -> SaddleSolution:
    """Damped fixed-point iteration of the self-consistency loop.

    m is relaxed toward the effective-model expectation at every step;
    oscillations trigger automatic damping reduction, and persistent
    non-convergence falls back to a finite-temperature homotopy before
    reporting converged=False.  ``beta=None`` is the zero-temperature path.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError("damping must be in (0, 1]")
    if spec.coupling is not Coupling.SPARSE:
        raise ValueError("solve_saddle requires a sparse-intercluster spec")
    coeffs = _coeffs(spec, s)
    K = coupling_matrix(spec, s)
    m1, m2, converged, residual = _iterate(coeffs, K, init.m1, init.m2,
                                           damping, max_iter, tol, beta)
    if not converged and beta is None:
        # homotopy: anneal a smooth finite-temperature loop, then retry
        cur1, cur2 = init.m1, init.m2
        for beta_h in (20.0, 50.0, 100.0, 300.0):
            h1, h2, ok, _ = _iterate(coeffs, K, cur1, cur2, damping,
                                     max_iter // 4, max(tol, 1e-9), beta_h)
            if ok:
                cur1, cur2 = h1, h2
        m1, m2, converged, residual = _iterate(coeffs, K, cur1, cur2,
                                               damping, max_iter, tol, None)
    u, lam0, g, mt = _energy_density(coeffs, K, m1, m2)
    g1, g2 = spec.schedule.at(s)
    return SaddleSolution(
        s=float(s), m=MagPair(m1, m2), mt=mt, lambda0=lam0, degeneracy=g,
        u=float(u), converged=bool(converged), residual=float(residual),
        indeterminate=(s == 0.0 and g1 == 1.0, s == 0.0 and g2 == 1.0),
    )


def _iterate(coeffs, K, m1, m2, damping, max_iter, tol, beta):
    m1 = np.asarray(m1, dtype=float).copy()
    m2 = np.asarray(m2, dtype=float).copy()
    osc = 0
    prev_sign = 0.0
    residual = np.inf
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # degeneracy warnings mid-iteration
        for _ in range(max_iter):
            g1, g2 = _sparse_grad(coeffs, m1, m2)
            mt = ConjugateFields(-2.0 * g1, -2.0 * g2)
            H = build_effective_hamiltonian(mt, K)
            if beta is None:
                _, _, e1, e2 = ground_block(H)
            else:
                _, _, e1, e2 = _thermal_block(H, beta)
            upd = np.concatenate([e1 - m1, e2 - m2])
            residual = float(np.abs(upd).max())
            if residual < tol:
                return m1, m2, True, residual
            sign = np.sign(upd[int(np.argmax(np.abs(upd)))])
            if prev_sign and sign == -prev_sign:
                osc += 1
                if osc >= 10:
                    damping *= 0.5
                    osc = 0
            else:
                osc = 0
            prev_sign = sign
            m1 += damping * (e1 - m1)
            m2 += damping * (e2 - m2)
    return m1, m2, False, residual


def free_energy_density(spec: ModelSpec, s: float, mt: ConjugateFields,
                        m: MagPair, beta: float) -> float:
    """Finite-temperature variational free energy of the decoupled model.

    Evaluated from the exact eigendecomposition of the effective
    Hamiltonian, with the ground eigenvalue factored out of the log-sum so
    large beta cannot overflow.
    """
    if beta <= 0.0:
        raise ValueError("beta must be positive")
    if spec.coupling is not Coupling.SPARSE:
        raise ValueError("free energy is defined for the sparse model")
    coeffs = _coeffs(spec, s)
    K = coupling_matrix(spec, s)
    H = build_effective_hamiltonian(mt, K)
    w, _ = jacobi_eigh(H.matrix)
    lam0 = float(w[0])
    hm = _sparse_energy(coeffs, m.m1, m.m2)
    logsum = float(np.log(np.sum(np.exp(-beta * (w - lam0)))))
    return float(0.5 * (mt.mt1 @ m.m1 + mt.mt2 @ m.m2) + hm + 0.5 * lam0
                 - logsum / (2.0 * beta))


_SADDLE_INITS = [
    MagPair([0.0, 0.0, 1.0], [0.0, 0.0, 1.0]),
    MagPair([0.0, 0.0, 1.0], [0.0, 0.0, -1.0]),
    MagPair([0.0, 0.0, -1.0], [0.0, 0.0, 1.0]),
    MagPair([0.0, 0.0, -1.0], [0.0, 0.0, -1.0]),
    MagPair([1.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
]


def global_saddle(spec: ModelSpec, s: float, damping: float = 0.5,
                  tol: float = 1e-10) -> SaddleSolution:
    """Best converged solution over the standard init set, compared by u.

    Ties within 1e-12 go to the larger weak-cluster magnetization.
    """
    best = None
    last = None
    for init in _SADDLE_INITS:
        sol = solve_saddle(spec, s, init, damping=damping, tol=tol)
        last = sol
        if not sol.converged:
            continue
        if best is None or sol.u < best.u - transitions.TIE_TOL or (
                abs(sol.u - best.u) <= transitions.TIE_TOL and sol.m2z > best.m2z):
            best = sol
    if best is None:
        raise ConvergenceError(
            f"no saddle init converged at s={s:g}", best=last)
    return best


def _saddle_solver(spec: ModelSpec, damping: float, tol: float):
    def solve_warm(s, prev: SaddleSolution | None):
        if prev is None:
            return global_saddle(spec, s, damping, tol)
        sol = solve_saddle(spec, s, prev.m, damping=damping, tol=tol)
        if not sol.converged:
            return global_saddle(spec, s, damping, tol)
        return sol

    return transitions.PointSolver(
        warm=solve_warm,
        global_=lambda s: global_saddle(spec, s, damping, tol),
        energy=lambda sol: sol.u,
        m2z=lambda sol: sol.m2z,
    )


def sweep_sparse(spec: ModelSpec, s_grid, direction: Direction = Direction.FORWARD,
                 damping: float = 0.5, refresh_every: int = 10,
                 tol: float = 1e-10) -> list[SaddleSolution]:
    """Warm-started continuation of the saddle solution along the grid."""
    s_grid = transitions.check_grid(s_grid)
    solver = _saddle_solver(spec, damping, tol)
    return transitions.branch_sweep(
        solver, s_grid, forward=(direction is Direction.FORWARD),
        refresh_every=refresh_every,
    )


def detect_transition_sparse(spec: ModelSpec, s_grid=None,
                             jump_threshold: float = 0.5, damping: float = 0.5,
                             tol: float = 1e-10) -> TransitionReport:
    """First-order transition verdict for the sparse model.

    Same branch-crossing logic as the dense detector with the ground-state
    energy density u as the branch comparator.
    """
    if s_grid is None:
        s_grid = np.linspace(0.0, 1.0, 101)
    s_grid = transitions.check_grid(s_grid)
    solver = _saddle_solver(spec, damping, tol)
    found, s_star, jump, width = transitions.detect(solver, s_grid, jump_threshold)
    return TransitionReport(found=found, s_star=s_star, jump_m2z=jump,
                            hysteresis_width=width)
