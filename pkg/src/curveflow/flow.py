"""Normalized curvature flow on weighting schemes.

Each row evolves by p_x' = -4 Q(x) 1 + 2 K_inf^{d}(x) p_x with the laziness
held fixed. The right-hand side only involves rates in the 1-ball, so it is
assembled for all vertices at once from a few matrix products.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FlowBlowUpError, NotConvergedError
from .graph import WeightingScheme
from .sharpness import SharpnessReport, sharpness_all


@dataclass(frozen=True)
class FlowConfig:
    dt: float = 0.01
    t_max: float = 100.0
    convergence_tol: float = 1e-8
    record_every: int = 10
    clamp_tol: float = 1e-9

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_max >= 0:
            raise ValueError("t_max must be non-negative")
        if not (self.convergence_tol > 0 and self.clamp_tol > 0):
            raise ValueError("tolerances must be positive")
        if int(self.record_every) < 1:
            raise ValueError("record_every must be a positive integer")


@dataclass
class FlowTrajectory:
    times: list[float] = field(default_factory=list)
    schemes: list[WeightingScheme] = field(default_factory=list)
    row_sum_defect: list[float] = field(default_factory=list)
    min_rate: list[float] = field(default_factory=list)
    laziness_drift: list[float] = field(default_factory=list)
    rhs_inf_norm: list[float] = field(default_factory=list)
    converged: bool = False
    steps: int = 0

    @property
    def final_scheme(self) -> WeightingScheme:
        return self.schemes[-1]

    @property
    def final_time(self) -> float:
        return self.times[-1]


def _rhs_matrix(p: np.ndarray, adj: np.ndarray) -> np.ndarray:
    """Flow derivative for a rate matrix ``p`` on a topology ``adj`` (float 0/1, zero diagonal)."""
    off = p * adj
    deg = off.sum(axis=1)
    back = 4.0 * np.einsum("ij,ji->i", off, off)                 # 4 sum_y p_xy p_yx
    inner = np.einsum("ij,ij->i", off, adj @ p.T)                # sum_{y,y' in S1} p_xy p_yy'
    with np.errstate(divide="ignore", invalid="ignore"):
        two_k = np.where(deg > 0, (back + inner) / deg, 0.0)
    bracket = (
        -4.0 * p.T
        - 2.0 * (adj @ off.T)
        + two_k[:, None]
        - np.diag(p)[None, :]
    )
    return adj * (off * bracket + off @ off)


def flow_rhs(scheme: WeightingScheme) -> np.ndarray:
    """Derivative of every rate under the flow; zero diagonal and zero rows at isolated vertices."""
    adj = scheme.graph.adjacency.astype(float)
    return _rhs_matrix(scheme.rates, adj)


def _project(p: np.ndarray, lazy: np.ndarray, deg0: np.ndarray, clamp_tol: float, t: float) -> np.ndarray:
    if not np.all(np.isfinite(p)):
        raise FlowBlowUpError(f"non-finite rate at t={t:.6g}; reduce dt")
    low = p.min()
    if low < -clamp_tol:
        i, j = np.unravel_index(np.argmin(p), p.shape)
        raise FlowBlowUpError(f"rate p[{i},{j}] = {low:.3e} at t={t:.6g}; reduce dt")
    p = np.where(p < 0.0, 0.0, p)
    np.fill_diagonal(p, 0.0)
    sums = p.sum(axis=1)
    scale = np.divide(deg0, sums, out=np.zeros_like(sums), where=sums > 0)
    p *= scale[:, None]
    p[np.diag_indices_from(p)] = lazy
    return p


def integrate(scheme: WeightingScheme, config: FlowConfig | None = None) -> FlowTrajectory:
    """Fixed-step RK4 integration of the curvature flow.

    After every step the rates are clamped (within ``clamp_tol``), each row is
    rescaled to its original weighted degree and the laziness is restored.
    The run stops at ``t_max`` or once the RHS norm is below the tolerance
    on two consecutive steps. The first and last states are always recorded.
    """
    config = config or FlowConfig()
    adj = scheme.graph.adjacency.astype(float)
    p = scheme.rates.copy()
    lazy = np.diag(scheme.rates).copy()
    deg0 = scheme.weighted_degree.copy()
    edge_mask = scheme.graph.adjacency
    traj = FlowTrajectory()
    dt = config.dt
    n_steps = int(np.floor(config.t_max / dt + 1e-9))

    def record(p, t, k1):
        traj.times.append(t)
        traj.schemes.append(WeightingScheme(scheme.graph, p.copy()))
        traj.row_sum_defect.append(float(np.max(np.abs(p.sum(axis=1) - 1.0))) if p.size else 0.0)
        traj.min_rate.append(float(p[edge_mask].min()) if edge_mask.any() else 0.0)
        traj.laziness_drift.append(float(np.max(np.abs(np.diag(p) - lazy))) if p.size else 0.0)
        traj.rhs_inf_norm.append(float(np.max(np.abs(k1))) if k1.size else 0.0)

    k1 = _rhs_matrix(p, adj)
    record(p, 0.0, k1)
    below = 0
    step = 0
    for step in range(1, n_steps + 1):
        k2 = _rhs_matrix(p + 0.5 * dt * k1, adj)
        k3 = _rhs_matrix(p + 0.5 * dt * k2, adj)
        k4 = _rhs_matrix(p + dt * k3, adj)
        t = step * dt
        p = _project(p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4), lazy, deg0, config.clamp_tol, t)
        k1 = _rhs_matrix(p, adj)
        norm = float(np.max(np.abs(k1))) if k1.size else 0.0
        below = below + 1 if norm < config.convergence_tol else 0
        done = below >= 2
        if done or step == n_steps or step % config.record_every == 0:
            record(p, t, k1)
        if done:
            traj.converged = True
            break
    traj.steps = step
    if n_steps == 0:
        # zero horizon: converged only if already stationary
        traj.converged = traj.rhs_inf_norm[0] < config.convergence_tol
    return traj


def certify_limit(trajectory: FlowTrajectory, tol: float = 1e-6) -> tuple[dict[str, SharpnessReport], bool]:
    """Sharpness reports of the final scheme and whether every residual is below ``tol``."""
    if not trajectory.converged:
        raise NotConvergedError("trajectory did not converge; nothing to certify")
    reports = sharpness_all(trajectory.final_scheme)
    return reports, all(r.residual_norm < tol for r in reports.values())
