"""Classical ground states of the dense model.

Minimizes the energy density on the product of two unit spheres, with
deterministic multistart search, warm-started continuation sweeps that
expose hysteresis, and first-order transition detection by branch-energy
crossing.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from . import transitions
from .eigensolvers import jacobi_eigh
from .errors import ConvergenceError
from .model import MagPair, ModelSpec, _coeffs, _dense_energy, _dense_grad, dense_hessian


class Direction(enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class ClassicalState:
    """A stationary point of h on the two-sphere product."""

    s: float
    m: MagPair
    energy: float
    mu: tuple[float, float]
    residual: float
    indeterminate: tuple[bool, bool] = (False, False)

    @property
    def m2z(self) -> float:
        return float(self.m.m2[2])


@dataclass(frozen=True)
class SweepResult:
    states: list[ClassicalState]
    direction: Direction


@dataclass(frozen=True)
class TransitionReport:
    found: bool
    s_star: float
    jump_m2z: float
    hysteresis_width: float


# ---------------------------------------------------------------------------
# Charted sphere optimization

def _chart(m):
    """Rotation R with R @ x_hat = m, keeping the chart poles 90 deg away."""
    m = np.asarray(m, dtype=float)
    n = np.linalg.norm(m)
    if n < 1e-12:
        raise ValueError("cannot build a chart at the zero vector")
    e1 = m / n
    ref = np.array([0.0, 0.0, 1.0]) if abs(e1[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e3 = ref - (ref @ e1) * e1
    e3 /= np.linalg.norm(e3)
    e2 = np.cross(e3, e1)
    return np.column_stack([e1, e2, e3])


def _sph(theta, phi):
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def _angles_objective(y, coeffs, R1, R2):
    th1, ph1, th2, ph2 = y
    u1 = _sph(th1, ph1)
    u2 = _sph(th2, ph2)
    m1 = R1 @ u1
    m2 = R2 @ u2
    h = _dense_energy(coeffs, m1, m2)
    g1, g2 = _dense_grad(coeffs, m1, m2)
    d1t = R1 @ np.array([np.cos(th1) * np.cos(ph1), np.cos(th1) * np.sin(ph1), -np.sin(th1)])
    d1p = R1 @ np.array([-np.sin(th1) * np.sin(ph1), np.sin(th1) * np.cos(ph1), 0.0])
    d2t = R2 @ np.array([np.cos(th2) * np.cos(ph2), np.cos(th2) * np.sin(ph2), -np.sin(th2)])
    d2p = R2 @ np.array([-np.sin(th2) * np.sin(ph2), np.sin(th2) * np.cos(ph2), 0.0])
    return h, np.array([g1 @ d1t, g1 @ d1p, g2 @ d2t, g2 @ d2p])


def _tangent_frame(m):
    t1 = np.cross(np.array([0.0, 0.0, 1.0]), m)
    n = np.linalg.norm(t1)
    if n < 1e-6:
        t1 = np.cross(np.array([0.0, 1.0, 0.0]), m)
        n = np.linalg.norm(t1)
    t1 /= n
    t2 = np.cross(m, t1)
    return t1, t2


def _residual(coeffs, m1, m2):
    g1, g2 = _dense_grad(coeffs, m1, m2)
    mu1 = -float(g1 @ m1)
    mu2 = -float(g2 @ m2)
    r1 = g1 + mu1 * m1
    r2 = g2 + mu2 * m2
    return (mu1, mu2), max(float(np.linalg.norm(r1)), float(np.linalg.norm(r2)))


def _newton_polish(coeffs, hess, m1, m2, tol, max_iter=40):
    """Tangent-space Newton on the sphere product; h is quadratic so this
    converges in a couple of steps once inside the right basin."""
    for _ in range(max_iter):
        g1, g2 = _dense_grad(coeffs, m1, m2)
        mu1 = -float(g1 @ m1)
        mu2 = -float(g2 @ m2)
        r1 = g1 + mu1 * m1
        r2 = g2 + mu2 * m2
        res = max(np.linalg.norm(r1), np.linalg.norm(r2))
        if res < 0.01 * tol:
            break
        t = [_tangent_frame(m1), _tangent_frame(m2)]
        T = np.zeros((6, 4))
        T[0:3, 0] = t[0][0]
        T[0:3, 1] = t[0][1]
        T[3:6, 2] = t[1][0]
        T[3:6, 3] = t[1][1]
        Hr = T.T @ hess @ T
        Hr[0, 0] += mu1
        Hr[1, 1] += mu1
        Hr[2, 2] += mu2
        Hr[3, 3] += mu2
        gr = np.array([g1 @ t[0][0], g1 @ t[0][1], g2 @ t[1][0], g2 @ t[1][1]])
        try:
            step = np.linalg.solve(Hr, -gr)
        except np.linalg.LinAlgError:
            step = -gr
        nstep = np.linalg.norm(step)
        if nstep > 0.5:
            step *= 0.5 / nstep
        m1 = m1 + step[0] * t[0][0] + step[1] * t[0][1]
        m2 = m2 + step[2] * t[1][0] + step[3] * t[1][1]
        m1 /= np.linalg.norm(m1)
        m2 /= np.linalg.norm(m2)
    return m1, m2


def _indeterminate_flags(spec: ModelSpec, s: float) -> tuple[bool, bool]:
    # nothing couples to a cluster when s = 0 and its transverse field is off
    g1, g2 = spec.schedule.at(s)
    return (s == 0.0 and g1 == 1.0, s == 0.0 and g2 == 1.0)


def minimize(spec: ModelSpec, s: float, initial: MagPair,
             max_iter: int = 200, tol: float = 1e-10) -> ClassicalState:
    """Local minimum of the dense energy density from the given start.

    Quasi-Newton descent on spherical angles in per-cluster charts centered
    at the current iterate, re-centering whenever an iterate drifts toward
    a chart pole, followed by a tangent-space Newton polish.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    n1, n2 = initial.norms()
    if n1 < 1e-6 or n2 < 1e-6:
        raise ValueError("initial magnetizations must be unit direction vectors")
    coeffs = _coeffs(spec, s)
    hess = dense_hessian(spec, s)
    m1 = initial.m1 / n1
    m2 = initial.m2 / n2
    y0 = np.array([np.pi / 2, 0.0, np.pi / 2, 0.0])
    # BFGS only needs to land in the right basin; the Newton polish owns
    # the final digits
    bfgs_gtol = max(1e-7, 0.01 * tol) if tol >= 1e-12 else 0.01 * tol
    for _ in range(6):
        R1, R2 = _chart(m1), _chart(m2)
        out = _scipy_minimize(
            _angles_objective, y0, args=(coeffs, R1, R2), jac=True,
            method="BFGS", options={"gtol": bfgs_gtol, "maxiter": max_iter},
        )
        if not np.all(np.isfinite(out.x)):
            raise ValueError("optimizer produced non-finite iterates")
        th1, ph1, th2, ph2 = out.x
        m1 = R1 @ _sph(th1, ph1)
        m2 = R2 @ _sph(th2, ph2)
        # re-center when an iterate approaches a chart pole
        if abs(np.cos(th1)) <= 0.99 and abs(np.cos(th2)) <= 0.99:
            break
    m1, m2 = _newton_polish(coeffs, hess, m1, m2, tol)
    mu, res = _residual(coeffs, m1, m2)
    state = ClassicalState(
        s=float(s), m=MagPair(m1, m2), energy=float(_dense_energy(coeffs, m1, m2)),
        mu=mu, residual=res, indeterminate=_indeterminate_flags(spec, s),
    )
    if res >= tol:
        raise ConvergenceError(
            f"minimize did not reach residual {tol:g} at s={s:g} (got {res:g})",
            best=state,
        )
    return state


_AXIS_STARTS = [
    (np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, 1.0])),
    (np.array([0.0, 0.0, 1.0]), np.array([0.0, 0.0, -1.0])),
    (np.array([0.0, 0.0, -1.0]), np.array([0.0, 0.0, 1.0])),
    (np.array([0.0, 0.0, -1.0]), np.array([0.0, 0.0, -1.0])),
    (np.array([1.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0])),
]

_KRONECKER_ALPHA = np.array([np.sqrt(2), np.sqrt(3), np.sqrt(5), np.sqrt(7)]) % 1.0
_KRONECKER_SEED = np.array([np.sqrt(11), np.sqrt(13), np.sqrt(17), np.sqrt(19)]) % 1.0


def start_set(n_starts: int, seed: int = 0) -> list[MagPair]:
    """Deterministic multistart set: axis sign combinations, the transverse
    point, then a Kronecker low-discrepancy sequence on the angle torus.

    The set with a larger n_starts extends (never reshuffles) a smaller one.
    """
    starts = [MagPair(a, b) for a, b in _AXIS_STARTS]
    offset = (seed * _KRONECKER_SEED) % 1.0
    for k in range(max(0, n_starts - len(starts))):
        u = (offset + (k + 1) * _KRONECKER_ALPHA) % 1.0
        th1, ph1 = np.pi * u[0], 2 * np.pi * u[1]
        th2, ph2 = np.pi * u[2], 2 * np.pi * u[3]
        starts.append(MagPair(_sph(th1, ph1), _sph(th2, ph2)))
    return starts[:n_starts]


def _better(a: ClassicalState | None, b: ClassicalState) -> ClassicalState:
    if a is None:
        return b
    if b.energy < a.energy - 1e-12:
        return b
    if abs(b.energy - a.energy) < 1e-12 and b.m2z > a.m2z:
        return b
    return a


def global_minimize(spec: ModelSpec, s: float, n_starts: int = 8,
                    seed: int = 0, tol: float = 1e-10) -> ClassicalState:
    """Lowest minimum over the deterministic start set.

    Energy ties within 1e-12 are broken toward larger m2z.
    """
    if n_starts < 8:
        raise ValueError("n_starts must be at least 8")
    best = None
    failures = []
    for start in start_set(n_starts, seed):
        try:
            st = minimize(spec, s, start, tol=tol)
        except ConvergenceError as err:
            failures.append(err)
            continue
        best = _better(best, st)
    if best is None:
        raise ConvergenceError(
            f"all {n_starts} starts failed to converge at s={s:g}",
            best=failures[-1].best if failures else None,
        )
    return best


def is_stable_minimum(spec: ModelSpec, state: ClassicalState, tol: float = 1e-9) -> bool:
    """Check positive semidefiniteness of the reduced Hessian at a state."""
    coeffs = _coeffs(spec, state.s)
    hess = dense_hessian(spec, state.s)
    m1, m2 = state.m.m1, state.m.m2
    t = [_tangent_frame(m1), _tangent_frame(m2)]
    T = np.zeros((6, 4))
    T[0:3, 0], T[0:3, 1] = t[0][0], t[0][1]
    T[3:6, 2], T[3:6, 3] = t[1][0], t[1][1]
    Hr = T.T @ hess @ T
    Hr[0, 0] += state.mu[0]
    Hr[1, 1] += state.mu[0]
    Hr[2, 2] += state.mu[1]
    Hr[3, 3] += state.mu[1]
    w, _ = jacobi_eigh(Hr)
    return bool(w[0] >= -tol)


# ---------------------------------------------------------------------------
# Continuation sweeps and transition detection

def _warm_solver(spec: ModelSpec, n_starts: int, seed: int, tol: float):
    def solve_warm(s, prev: ClassicalState | None):
        if prev is None:
            return global_minimize(spec, s, n_starts, seed, tol)
        try:
            return minimize(spec, s, prev.m, tol=tol)
        except ConvergenceError:
            return global_minimize(spec, s, n_starts, seed, tol)

    def solve_global(s):
        return global_minimize(spec, s, n_starts, seed, tol)

    return transitions.PointSolver(
        warm=solve_warm,
        global_=solve_global,
        energy=lambda st: st.energy,
        m2z=lambda st: st.m2z,
    )


def sweep(spec: ModelSpec, s_grid, direction: Direction = Direction.FORWARD,
          n_starts: int = 8, refresh_every: int = 10, seed: int = 0,
          tol: float = 1e-10) -> SweepResult:
    """Continuation along the grid with warm starts.

    Warm starts follow a solution branch past the point where it stops
    being global; a global refresh every ``refresh_every`` points re-anchors
    the sweep only when the warm iterate already left its branch.  Forward
    and backward sweeps disagreeing inside a window is the hysteresis
    signal.
    """
    s_grid = transitions.check_grid(s_grid)
    solver = _warm_solver(spec, n_starts, seed, tol)
    states = transitions.branch_sweep(
        solver, s_grid, forward=(direction is Direction.FORWARD),
        refresh_every=refresh_every,
    )
    return SweepResult(states=states, direction=direction)


def detect_transition(spec: ModelSpec, s_grid=None, jump_threshold: float = 0.5,
                      n_starts: int = 8, seed: int = 0,
                      tol: float = 1e-10) -> TransitionReport:
    """First-order transition verdict on [min(s_grid), max(s_grid)].

    Runs forward and backward sweeps, finds the branch-coexistence window,
    bisects the branch-energy crossing to locate s*, and reports the weak
    cluster magnetization jump across it.
    """
    if s_grid is None:
        s_grid = np.linspace(0.0, 1.0, 101)
    s_grid = transitions.check_grid(s_grid)
    solver = _warm_solver(spec, n_starts, seed, tol)
    found, s_star, jump, width = transitions.detect(solver, s_grid, jump_threshold)
    return TransitionReport(found=found, s_star=s_star, jump_m2z=jump,
                            hysteresis_width=width)
