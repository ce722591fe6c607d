"""Two-cluster annealing Hamiltonian family.

Energy density, gradient, and Hessian of the dense model, plus the
mean-field / pairwise-coupling split of the sparse model, all as pure
functions of (s, m1, m2).  Magnetizations are 3-vectors; the energy
polynomial is defined for any m (the unit sphere is where the physics
lives, but finite-difference probes may step off it).
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np


class Coupling(enum.Enum):
    DENSE = "dense"
    SPARSE = "sparse"


@dataclass(frozen=True)
class Identity:
    """Schedule gamma(s) = s."""

    def __call__(self, s: float) -> float:
        return float(s)


@dataclass(frozen=True)
class FixedValue:
    """Constant schedule gamma(s) = value, used for 2-D (s, gamma) scans."""

    value: float

    def __call__(self, s: float) -> float:
        return float(self.value)


@dataclass(frozen=True)
class AnnealSchedule:
    gamma1: Identity | FixedValue = field(default_factory=Identity)
    gamma2: Identity | FixedValue = field(default_factory=Identity)

    def at(self, s: float) -> tuple[float, float]:
        return self.gamma1(s), self.gamma2(s)


@dataclass(frozen=True)
class ClusterFields:
    """Longitudinal fields; cluster 1 is the strong one, cluster 2 the weak one."""

    h1: float = 1.0
    h2: float = -0.49

    def __post_init__(self):
        if not (np.isfinite(self.h1) and np.isfinite(self.h2)):
            raise ValueError("cluster fields must be finite")
        if not (self.h1 > 0.0 > self.h2):
            warnings.warn(
                f"fields h1={self.h1}, h2={self.h2} are outside the "
                "weak-strong regime h1 > 0 > h2",
                stacklevel=2,
            )


@dataclass(frozen=True)
class CatalystConfig:
    """XX interaction strengths: intra-strong, intra-weak, intercluster."""

    xi11: float = 0.0
    xi22: float = 0.0
    xi12: float = 0.0

    def __post_init__(self):
        if not all(np.isfinite(x) for x in (self.xi11, self.xi22, self.xi12)):
            raise ValueError("catalyst strengths must be finite")

    @property
    def is_stoquastic(self) -> bool:
        return self.xi11 >= 0.0 and self.xi22 >= 0.0 and self.xi12 >= 0.0


@dataclass(frozen=True)
class ModelSpec:
    coupling: Coupling = Coupling.DENSE
    fields: ClusterFields = field(default_factory=ClusterFields)
    catalyst: CatalystConfig = field(default_factory=CatalystConfig)
    schedule: AnnealSchedule = field(default_factory=AnnealSchedule)
    clusters: int = 2

    def __post_init__(self):
        if self.clusters != 2:
            raise ValueError("only two clusters are supported")

    @classmethod
    def dense(cls, xi=(0.0, 0.0, 0.0), fields=None, gamma1=None, gamma2=None):
        """Dense-intercluster spec; ``xi`` is (xi11, xi22, xi12)."""
        return cls(
            coupling=Coupling.DENSE,
            fields=fields or ClusterFields(),
            catalyst=CatalystConfig(*xi),
            schedule=AnnealSchedule(gamma1 or Identity(), gamma2 or Identity()),
        )

    @classmethod
    def sparse(cls, xi=(0.0, 0.0, 0.0), fields=None, gamma1=None, gamma2=None):
        """Sparse-intercluster spec; ``xi`` is (xi11, xi22, xi12)."""
        return cls(
            coupling=Coupling.SPARSE,
            fields=fields or ClusterFields(),
            catalyst=CatalystConfig(*xi),
            schedule=AnnealSchedule(gamma1 or Identity(), gamma2 or Identity()),
        )


@dataclass(frozen=True)
class MagPair:
    """Pair of cluster magnetization 3-vectors."""

    m1: np.ndarray
    m2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m1", np.asarray(self.m1, dtype=float).reshape(3))
        object.__setattr__(self, "m2", np.asarray(self.m2, dtype=float).reshape(3))
        if not (np.all(np.isfinite(self.m1)) and np.all(np.isfinite(self.m2))):
            raise ValueError("magnetization components must be finite")

    def norms(self) -> tuple[float, float]:
        return float(np.linalg.norm(self.m1)), float(np.linalg.norm(self.m2))

    def is_unit(self, tol: float = 1e-10) -> bool:
        n1, n2 = self.norms()
        return abs(n1 - 1.0) <= tol and abs(n2 - 1.0) <= tol


@dataclass(frozen=True)
class CouplingMatrix:
    """3x3 pairwise spin-spin coupling between the clusters at a given s."""

    K12: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "K12", np.asarray(self.K12, dtype=float).reshape(3, 3))


def _check_s(s: float) -> float:
    s = float(s)
    if not np.isfinite(s):
        raise ValueError("s must be finite")
    if s < 0.0 or s > 1.0:
        raise ValueError(f"s={s} outside [0, 1]")
    return s


@dataclass(frozen=True)
class _Coeffs:
    """Scalar coefficients of the energy polynomial at fixed (spec, s).

    Solvers evaluate the energy and gradient many times per (spec, s), so
    the schedule and catalyst prefactors are folded once here.
    """

    s: float
    h1: float
    h2: float
    a1: float    # transverse-field weight (1 - gamma1)/2
    a2: float
    c11: float   # catalyst weights s(1-s)/4 * xi_ab
    c22: float
    c12: float


def _coeffs(spec: ModelSpec, s: float) -> _Coeffs:
    s = _check_s(s)
    g1, g2 = spec.schedule.at(s)
    w = s * (1.0 - s) / 4.0
    cat = spec.catalyst
    return _Coeffs(
        s=s,
        h1=spec.fields.h1,
        h2=spec.fields.h2,
        a1=(1.0 - g1) / 2.0,
        a2=(1.0 - g2) / 2.0,
        c11=w * cat.xi11,
        c22=w * cat.xi22,
        c12=w * cat.xi12,
    )


def _dense_energy(c: _Coeffs, m1, m2) -> float:
    m1x, m1z = m1[0], m1[2]
    m2x, m2z = m2[0], m2[2]
    return (
        -(c.s / 2.0) * (c.h1 * m1z + c.h2 * m2z)
        - (c.s / 4.0) * (m1z * m1z + m2z * m2z + m1z * m2z)
        - c.a1 * m1x
        - c.a2 * m2x
        - (c.c11 * m1x * m1x + c.c22 * m2x * m2x + c.c12 * m1x * m2x)
    )


def _dense_grad(c: _Coeffs, m1, m2):
    m1x, m1z = m1[0], m1[2]
    m2x, m2z = m2[0], m2[2]
    g1 = np.array([
        -c.a1 - 2.0 * c.c11 * m1x - c.c12 * m2x,
        0.0,
        -(c.s / 2.0) * c.h1 - (c.s / 4.0) * (2.0 * m1z + m2z),
    ])
    g2 = np.array([
        -c.a2 - 2.0 * c.c22 * m2x - c.c12 * m1x,
        0.0,
        -(c.s / 2.0) * c.h2 - (c.s / 4.0) * (2.0 * m2z + m1z),
    ])
    return g1, g2


def _sparse_energy(c: _Coeffs, m1, m2) -> float:
    m1x, m1z = m1[0], m1[2]
    m2x, m2z = m2[0], m2[2]
    return (
        -(c.s / 2.0) * (c.h1 * m1z + c.h2 * m2z)
        - (c.s / 4.0) * (m1z * m1z + m2z * m2z)
        - c.a1 * m1x
        - c.a2 * m2x
        - (c.c11 * m1x * m1x + c.c22 * m2x * m2x)
    )


def _sparse_grad(c: _Coeffs, m1, m2):
    m1x, m1z = m1[0], m1[2]
    m2x, m2z = m2[0], m2[2]
    g1 = np.array([
        -c.a1 - 2.0 * c.c11 * m1x,
        0.0,
        -(c.s / 2.0) * c.h1 - (c.s / 2.0) * m1z,
    ])
    g2 = np.array([
        -c.a2 - 2.0 * c.c22 * m2x,
        0.0,
        -(c.s / 2.0) * c.h2 - (c.s / 2.0) * m2z,
    ])
    return g1, g2


def dense_energy_density(spec: ModelSpec, s: float, m: MagPair) -> float:
    """Intensive energy h = H/N of the dense model at (s, m1, m2)."""
    return float(_dense_energy(_coeffs(spec, s), m.m1, m.m2))


def dense_gradient(spec: ModelSpec, s: float, m: MagPair):
    """Analytic partial derivatives of the dense energy density.

    Returns (dh/dm1, dh/dm2) as 3-vectors.
    """
    return _dense_grad(_coeffs(spec, s), m.m1, m.m2)


def dense_hessian(spec: ModelSpec, s: float, m: MagPair | None = None) -> np.ndarray:
    """6x6 Hessian of the dense energy density, blocked as [m1; m2].

    The energy is quadratic in m, so the Hessian does not depend on m;
    the argument is accepted for interface symmetry only.
    """
    c = _coeffs(spec, s)
    H = np.zeros((6, 6))
    H[2, 2] = H[5, 5] = -c.s / 2.0
    H[2, 5] = H[5, 2] = -c.s / 4.0
    H[0, 0] = -2.0 * c.c11
    H[3, 3] = -2.0 * c.c22
    H[0, 3] = H[3, 0] = -c.c12
    return H


def _require_sparse(spec: ModelSpec):
    if spec.coupling is not Coupling.SPARSE:
        raise ValueError("operation requires a sparse-intercluster spec")


def sparse_mean_field_density(spec: ModelSpec, s: float, m: MagPair) -> float:
    """Mean-field part h_m of the sparse model (pairwise terms excluded)."""
    _require_sparse(spec)
    return float(_sparse_energy(_coeffs(spec, s), m.m1, m.m2))


def sparse_mean_field_gradient(spec: ModelSpec, s: float, m: MagPair):
    """Analytic gradient of h_m; returns (dh_m/dm1, dh_m/dm2)."""
    _require_sparse(spec)
    return _sparse_grad(_coeffs(spec, s), m.m1, m.m2)


def coupling_matrix(spec: ModelSpec, s: float) -> CouplingMatrix:
    """Pairwise intercluster coupling of the sparse model at annealing time s.

    Only the zz and xx entries are nonzero: K^zz = s/2 carries the problem
    coupling and K^xx = s(1-s) xi12 / 2 the intercluster catalyst.
    """
    _require_sparse(spec)
    s = _check_s(s)
    K = np.zeros((3, 3))
    K[2, 2] = s / 2.0
    K[0, 0] = s * (1.0 - s) * spec.catalyst.xi12 / 2.0
    return CouplingMatrix(K)
