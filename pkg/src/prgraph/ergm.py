"""Edge-triangle exponential random graph model: fixed points, Glauber conditionals, experiments."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InvalidParameter
from .graph import Graph


@dataclass(frozen=True)
class ErgmModel:
    beta: float
    gamma: float

    def __post_init__(self):
        if not (math.isfinite(self.beta) and math.isfinite(self.gamma)):
            raise InvalidParameter("beta and gamma must be finite")

    @property
    def ferromagnetic(self) -> bool:
        return self.gamma > 0


class Regime(str, Enum):
    HIGH_TEMPERATURE = "HighTemperature"
    NOT_HIGH_TEMPERATURE = "NotHighTemperature"
    INDETERMINATE = "Indeterminate"


@dataclass
class FixedPointResult:
    roots: list[float]
    slopes: list[float]
    regime: Regime

    @property
    def p_star(self) -> float | None:
        return self.roots[0] if len(self.roots) == 1 else None


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def phi_beta(m: ErgmModel, x: float) -> float:
    """``e^{beta + gamma x} / (1 + e^{beta + gamma x})``."""
    if not math.isfinite(x):
        raise InvalidParameter("x must be finite")
    return _sigmoid(m.beta + m.gamma * x)


def glauber_conditional(m: ErgmModel, L: float) -> float:
    """Probability that a resampled edge is present given normalized co-degree ``L``."""
    if not 0 <= L <= 1:
        raise InvalidParameter("L must lie in [0, 1]")
    return phi_beta(m, L)


def triangle_count(g: Graph) -> int:
    A = g.to_dense()
    C = g.codegrees.astype(np.int64)
    return int(C[A].sum()) // 6


def hamiltonian(g: Graph, m: ErgmModel) -> float:
    """``beta * edges + (gamma / n) * triangles``."""
    return m.beta * g.edge_count + m.gamma / g.n * triangle_count(g)


def slope_at(m: ErgmModel, p: float) -> float:
    """Derivative of ``p -> phi(p^2)``."""
    f = phi_beta(m, p * p)
    return 2 * p * m.gamma * f * (1 - f)


def solve_fixed_point(m: ErgmModel, grid: int = 10_000, tol: float = 1e-12) -> FixedPointResult:
    """Roots of ``p = phi(p^2)`` in (0, 1), found as ``u = p^2`` roots of ``phi(u)^2 - u``.

    Sign changes on a uniform grid are bisected to width ``tol``. Roots closer
    than ``10 tol`` merge. The regime is Indeterminate when a slope lies within
    ``tol`` of 1.
    """
    if tol <= 0:
        raise InvalidParameter("tol must be positive")
    if grid < 100:
        raise InvalidParameter("grid must be at least 100")

    def psi(u):
        return phi_beta(m, u) ** 2 - u

    us = np.linspace(0.0, 1.0, grid + 1)
    vals = [psi(float(u)) for u in us]
    found: list[float] = []
    for i in range(grid):
        a, b = float(us[i]), float(us[i + 1])
        fa, fb = vals[i], vals[i + 1]
        if fa == 0.0:
            found.append(a)
            continue
        if fa * fb > 0 or fb == 0.0:
            continue
        while b - a > tol:
            mid = 0.5 * (a + b)
            fm = psi(mid)
            if fm == 0.0:
                a = b = mid
                break
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
            if mid in (a, b) and b - a <= 4e-16:
                break
        found.append(0.5 * (a + b))
    if vals[-1] == 0.0:
        found.append(1.0)
    merged: list[float] = []
    for u in found:
        if not merged or u - merged[-1] > 10 * tol:
            merged.append(u)
    roots = [math.sqrt(u) for u in merged]
    roots = [r for r in roots if 0 < r < 1]
    slopes = [slope_at(m, r) for r in roots]
    if any(abs(s - 1) <= tol for s in slopes):
        regime = Regime.INDETERMINATE
    elif len(roots) == 1 and slopes[0] < 1:
        regime = Regime.HIGH_TEMPERATURE
    else:
        regime = Regime.NOT_HIGH_TEMPERATURE
    return FixedPointResult(roots, slopes, regime)


# concentration experiment ----------------------------------------------------------


@dataclass
class ReplicaResult:
    seed: int
    edge_density: float
    max_deg_dev: float
    max_codeg_dev: float
    max_deg_dev_norm: float
    max_codeg_dev_norm: float


@dataclass
class ConcentrationReport:
    beta: float
    gamma: float
    n: int
    sweeps: int
    p_star: float
    slope: float
    regime: str
    replicas: list[ReplicaResult] = field(default_factory=list)

    @property
    def K_deg(self) -> float:
        return max(r.max_deg_dev_norm for r in self.replicas)

    @property
    def K_codeg(self) -> float:
        return max(r.max_codeg_dev_norm for r in self.replicas)

    def to_dict(self) -> dict:
        return {
            "beta": self.beta,
            "gamma": self.gamma,
            "n": self.n,
            "sweeps": self.sweeps,
            "p_star": self.p_star,
            "slope": self.slope,
            "regime": self.regime,
            "K_deg": self.K_deg,
            "K_codeg": self.K_codeg,
            "replicas": [r.__dict__ for r in self.replicas],
        }


def concentration_experiment(m: ErgmModel, n: int, sweeps: int, replicas: int, seed: int) -> ConcentrationReport:
    """Sample replicas by Glauber dynamics and normalize degree / co-degree deviations by sqrt(n ln n)."""
    from .generators import derive_seed, gen_ergm

    if n < 2:
        raise InvalidParameter("n must be at least 2")
    if replicas < 1:
        raise InvalidParameter("need at least one replica")
    fp = solve_fixed_point(m)
    if fp.regime is not Regime.HIGH_TEMPERATURE:
        warnings.warn(f"model is {fp.regime.value}; deviations are measured against the smallest root", stacklevel=2)
    p = fp.roots[0] if fp.roots else phi_beta(m, 0.0)
    slope = fp.slopes[0] if fp.slopes else float("nan")
    scale = math.sqrt(n * math.log(n))
    report = ConcentrationReport(m.beta, m.gamma, n, sweeps, p, slope, fp.regime.value)
    for i in range(replicas):
        s = derive_seed(seed, i)
        g = gen_ergm(n, m.beta, m.gamma, sweeps, s)
        deg_dev = float(np.max(np.abs(g.degrees - n * p)))
        C = g.codegrees.astype(np.float64)
        dev = np.abs(C - n * p * p)
        np.fill_diagonal(dev, 0.0)
        co_dev = float(dev.max())
        density = g.edge_count / (n * (n - 1) / 2)
        report.replicas.append(ReplicaResult(s, density, deg_dev, co_dev, deg_dev / scale, co_dev / scale))
    return report
