"""Curvature sharpness tests and residual certificates.

A vertex is curvature sharp when K_N(x) reaches the distance bound
K_N^{d}(x) for some N. All equivalent formulations reduce to the identity
4 Q(x) 1 = 2 K_inf^{d}(x) p_x, so the residual of that identity is the
certificate reported here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curvature import _inv, _require_degree, check_dimension, upper_bound_dist
from .graph import WeightingScheme
from .operators import LocalBlocks, local_blocks, q_matrix
from .parallel import pmap

SHARP_TOL = 1e-9
PSD_FLOOR = -1e-9
REVERSIBLE_TOL = 1e-10
HOMOGENEOUS_TOL = 1e-12


def four_q_one(blocks: LocalBlocks) -> np.ndarray:
    """4 Q(x) 1 from the 1-ball rates alone (no Schur complement).

    Entry i is
    p_{x y_i} (D_x - D_{y_i} + 4 p_{y_i x} + 2 sum_{j != i} p_{y_i y_j})
    - sum_{j != i} p_{x y_j} p_{y_j y_i}.
    """
    scheme = blocks.scheme
    p = scheme.off_diagonal
    x, s1 = blocks.x, blocks.s1
    deg = scheme.weighted_degree
    pxy = p[x, s1]
    inner = p[np.ix_(s1, s1)]                     # zero diagonal, so j != i is automatic
    bracket = deg[x] - deg[s1] + 4 * p[s1, x] + 2 * inner.sum(axis=1)
    return pxy * bracket - pxy @ inner


@dataclass(frozen=True, eq=False)
class SharpnessReport:
    x: str
    k_inf_dist: float
    four_q_one: np.ndarray
    residual: np.ndarray
    residual_norm: float
    sharp_via_q: bool
    sharp_via_m2: bool
    one_ball_residuals: np.ndarray
    volume_homogeneous: bool
    reversible: bool
    degenerate: bool = False

    @property
    def sharp(self) -> bool:
        return self.sharp_via_q


def n_sharp_matrix(scheme: WeightingScheme, x, N=math.inf, blocks: LocalBlocks | None = None) -> np.ndarray:
    """M_N(x) = Q(x) - p_x p_x^T / N - K_N^{d}(x) diag(p_x) / 2."""
    N = check_dimension(N)
    i = scheme.idx(x)
    d = _require_degree(scheme, i)
    blocks = blocks or local_blocks(scheme, i)
    q = q_matrix(blocks).entries
    px = blocks.delta_s1
    k = upper_bound_dist(scheme, i) - 2 * d * _inv(N)
    return q - _inv(N) * np.outer(px, px) - 0.5 * k * np.diag(px)


def is_n_sharp(scheme: WeightingScheme, x, N=math.inf, floor: float = PSD_FLOOR) -> bool:
    """True iff M_N(x) is positive semidefinite (eigenvalues above ``floor``)."""
    m = n_sharp_matrix(scheme, x, N)
    if m.size == 0:
        return True
    return bool(np.linalg.eigvalsh(m)[0] >= floor)


def stationary_distribution(scheme: WeightingScheme) -> np.ndarray:
    """A row vector pi with pi P = pi and sum(pi) = 1 (least squares)."""
    n = scheme.n
    lhs = np.vstack([scheme.rates.T - np.eye(n), np.ones((1, n))])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(lhs, rhs, rcond=None)
    return pi


def is_reversible(scheme: WeightingScheme, tol: float = REVERSIBLE_TOL) -> bool:
    pi = stationary_distribution(scheme)
    if np.any(pi <= 0):
        return False
    flow = pi[:, None] * scheme.rates
    return bool(np.max(np.abs(flow - flow.T)) < tol)


def is_volume_homogeneous(blocks: LocalBlocks, tol: float = HOMOGENEOUS_TOL) -> bool:
    """All neighbours share the same rate back to x and the same rate into S_2(x)."""
    p = blocks.scheme.rates
    if blocks.m == 0:
        return True
    back = p[blocks.s1, blocks.x]
    out = p[np.ix_(blocks.s1, blocks.s2)].sum(axis=1)
    return bool(np.ptp(back) <= tol and np.ptp(out) <= tol)


def sharpness_report(scheme: WeightingScheme, x, tolerance: float = SHARP_TOL,
                     reversible: bool | None = None) -> SharpnessReport:
    """Check the Q-identity at ``x`` and collect the related certificates.

    ``reversible`` may be passed in to avoid recomputing the stationary
    distribution for every vertex of the same scheme.
    """
    i = scheme.idx(x)
    _require_degree(scheme, i)
    blocks = local_blocks(scheme, i)
    q = q_matrix(blocks).entries
    px = blocks.delta_s1
    k = upper_bound_dist(scheme, i)
    fq = 4.0 * q.sum(axis=1)
    residual = fq - 2.0 * k * px
    norm = float(np.max(np.abs(residual))) if residual.size else 0.0
    one_ball = four_q_one(blocks) - 2.0 * k * px
    if reversible is None:
        reversible = is_reversible(scheme)
    return SharpnessReport(
        x=scheme.vertices[i],
        k_inf_dist=k,
        four_q_one=fq,
        residual=residual,
        residual_norm=norm,
        sharp_via_q=norm <= tolerance,
        sharp_via_m2=is_n_sharp(scheme, i, 2.0),
        one_ball_residuals=one_ball,
        volume_homogeneous=is_volume_homogeneous(blocks),
        reversible=reversible,
        degenerate=bool(np.any(px == 0.0)),
    )


def sharpness_all(scheme: WeightingScheme, tolerance: float = SHARP_TOL) -> dict[str, SharpnessReport]:
    """Reports for every non-isolated vertex, keyed by vertex id in vertex order."""
    rev = is_reversible(scheme)
    todo = [i for i in range(scheme.n) if not scheme.is_isolated(i)]
    reports = pmap(lambda i: sharpness_report(scheme, i, tolerance, rev), todo)
    return {r.x: r for r in reports}


def complete_graph_defect(scheme: WeightingScheme) -> np.ndarray:
    """Per-pair defect p_xy (1 + 2 p_yx) - 3 p_xy p2_xx - p2_xy on a complete graph.

    Diagonal entries are zero. Intended for zero-laziness schemes on K_n.
    """
    p = scheme.rates
    p2 = scheme.two_step
    out = p * (1 + 2 * p.T) - 3 * p * np.diag(p2)[:, None] - p2
    np.fill_diagonal(out, 0.0)
    return out
