"""Bakry-Emery curvature K_N(x) and the upper/lower bounds around it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InadmissibleFunctionError, IsolatedVertexError
from .graph import WeightingScheme
from .operators import carre_du_champ, gamma2, laplacian, local_blocks, q_matrix, spheres
from .parallel import pmap

EIGEN_ROUTE = "eigen-on-G_P"
ISOLATED_ROUTE = "isolated-vertex-convention"


def check_dimension(N) -> float:
    N = float(N)
    if not N > 0 or math.isnan(N):
        raise ValueError(f"dimension must lie in (0, inf], got {N}")
    return N


def _inv(N: float) -> float:
    return 0.0 if math.isinf(N) else 1.0 / N


@dataclass(frozen=True, eq=False)
class CurvatureResult:
    x: str
    dimension: float
    value: float
    route: str
    curvature_matrix: np.ndarray | None = None
    v0: np.ndarray | None = None
    s1: tuple[str, ...] = ()

    def rayleigh_bound(self) -> float:
        """v0^T A_N v0 / v0^T v0, the Rayleigh upper bound K_N^0(x)."""
        if self.curvature_matrix is None:
            raise IsolatedVertexError(f"vertex {self.x} is isolated")
        v = self.v0
        return float(v @ self.curvature_matrix @ v / (v @ v))


def curvature_matrix(scheme: WeightingScheme, x, N=math.inf):
    """A_N(x) on the induced subgraph, with v0 and the ordered 1-sphere of G_P."""
    N = check_dimension(N)
    sub = scheme.restricted_to_support()
    blocks = local_blocks(sub, x)
    q = q_matrix(blocks).entries
    v0 = np.sqrt(blocks.delta_s1)
    a = 2.0 * q / np.outer(v0, v0) - 2.0 * _inv(N) * np.outer(v0, v0)
    return 0.5 * (a + a.T), v0, blocks.s1


def curvature(scheme: WeightingScheme, x, N=math.inf) -> CurvatureResult:
    """K_N(x) as the smallest eigenvalue of A_N(x); 0 at isolated vertices."""
    N = check_dimension(N)
    i = scheme.idx(x)
    name = scheme.vertices[i]
    if scheme.is_isolated(i):
        return CurvatureResult(name, N, 0.0, ISOLATED_ROUTE)
    a, v0, s1 = curvature_matrix(scheme, i, N)
    value = float(np.linalg.eigvalsh(a)[0])
    return CurvatureResult(name, N, value, EIGEN_ROUTE, a, v0, tuple(scheme.vertices[j] for j in s1))


def curvature_all(scheme: WeightingScheme, N=math.inf) -> list[CurvatureResult]:
    return pmap(lambda i: curvature(scheme, i, N), range(scheme.n))


def upper_bound_f(scheme: WeightingScheme, x, f, N=math.inf) -> float:
    """K_N^f(x) = (Gamma_2(f)(x) - (Delta f(x))^2 / N) / Gamma(f)(x)."""
    N = check_dimension(N)
    i = scheme.idx(x)
    f = np.asarray(f, dtype=float)
    gam = carre_du_champ(scheme, f)[i]
    scale = max(1.0, float(np.max(np.abs(f - f[i]))) ** 2)
    if not gam > 1e-15 * scale:
        raise InadmissibleFunctionError(f"Gamma(f)({scheme.vertices[i]}) = 0")
    lap = laplacian(scheme, f)[i]
    return float((gamma2(scheme, f)[i] - _inv(N) * lap**2) / gam)


def _require_degree(scheme: WeightingScheme, i: int) -> float:
    d = float(scheme.weighted_degree[i])
    if not d > 0:
        raise IsolatedVertexError(f"vertex {scheme.vertices[i]} is isolated (D_x = 0)")
    return d


def upper_bound_dist(scheme: WeightingScheme, x, N=math.inf) -> float:
    """K_N^{d_G(x,.)}(x) from the rates of the 1-ball.

    (4 sum_y p_xy p_yx + sum_{y,y'} p_xy p_yy') / (2 D_x) - p_xx / 2 - 2 D_x / N,
    with y, y' ranging over S_1(x) (y = y' included).
    """
    N = check_dimension(N)
    i = scheme.idx(x)
    d = _require_degree(scheme, i)
    s1, _ = spheres(scheme, i)
    p = scheme.rates
    back = np.dot(p[i, s1], p[s1, i])
    inner = p[i, s1] @ p[np.ix_(s1, s1)].sum(axis=1)
    return float((4 * back + inner) / (2 * d) - p[i, i] / 2 - 2 * d * _inv(N))


def upper_bound_dist_sphere_form(scheme: WeightingScheme, x, N=math.inf) -> float:
    """Same bound written with p^{(2)} and the 2-sphere of G."""
    N = check_dimension(N)
    i = scheme.idx(x)
    d = _require_degree(scheme, i)
    _, s2 = spheres(scheme, i)
    p2 = scheme.two_step
    pxx = scheme.rates[i, i]
    return float(d / 2 + (3 * p2[i, i] - 3 * pxx**2 - p2[i, s2].sum()) / (2 * d) - 2 * d * _inv(N))


def theoretical_bounds(scheme: WeightingScheme, x, N=math.inf) -> tuple[float, float]:
    """Lower and upper a-priori bounds on K_N(x), valid for N >= 2.

    The lower bound is -1 + p_xx/2 + min_y (2 p_yx + 1/2 sum_z min(p_yz, p_zy))
    over the 1-sphere of G_P. It is exact for symmetric 1-ball rates but can
    exceed K_N(x) when p_xy and p_xz differ a lot; see :func:`pairwise_lower_bound`
    for a variant that always holds.
    """
    N = check_dimension(N)
    if N < 2:
        raise ValueError("the lower curvature bound needs N >= 2")
    i = scheme.idx(x)
    d = _require_degree(scheme, i)
    p = scheme.rates
    s1p = _support_sphere(scheme, i)
    best = min(
        2 * p[y, i] + 0.5 * sum(min(p[y, z], p[z, y]) for z in s1p if z != y)
        for y in s1p
    )
    return float(-1.0 + p[i, i] / 2 + best), float(2.0 - 2 * d * _inv(N))


def pairwise_lower_bound(scheme: WeightingScheme, x, N=math.inf) -> float:
    """Lower bound on K_N(x) for N >= 2 that keeps both two-step weights of each triangle.

    -1 + p_xx/2 + min_y (2 p_yx + 1/(2 p_xy) sum_z min(p_xy p_yz, p_xz p_zy))
    """
    N = check_dimension(N)
    if N < 2:
        raise ValueError("the lower curvature bound needs N >= 2")
    i = scheme.idx(x)
    _require_degree(scheme, i)
    p = scheme.rates
    s1p = _support_sphere(scheme, i)
    best = min(
        2 * p[y, i] + sum(min(p[i, y] * p[y, z], p[i, z] * p[z, y]) for z in s1p if z != y) / (2 * p[i, y])
        for y in s1p
    )
    return float(-1.0 + p[i, i] / 2 + best)


def _support_sphere(scheme: WeightingScheme, i: int) -> list[int]:
    p = scheme.rates
    return [j for j in range(scheme.n) if j != i and p[i, j] > 0]


def curvature_bisection(scheme: WeightingScheme, x, N=math.inf, iterations: int = 60,
                        bracket: tuple[float, float] | None = None) -> float:
    """Largest K with Q(x) - p p^T / N - (K/2) diag(p) PSD, by bisection.

    Test oracle for non-degenerate vertices; works on the scheme's own topology.
    """
    N = check_dimension(N)
    i = scheme.idx(x)
    d = _require_degree(scheme, i)
    blocks = local_blocks(scheme, i)
    if np.any(blocks.delta_s1 <= 0):
        raise ValueError(f"vertex {scheme.vertices[i]} is degenerate")
    q = q_matrix(blocks).entries
    px = blocks.delta_s1
    base = q - _inv(N) * np.outer(px, px)
    lo, hi = bracket or (-4.0 - 2 * d * _inv(N), 2.0)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if np.linalg.eigvalsh(base - 0.5 * mid * np.diag(px))[0] >= 0.0:
            lo = mid
        else:
            hi = mid
    return lo
