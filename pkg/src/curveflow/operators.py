"""Local Bakry-Emery objects at a vertex.

Functions on V are numpy vectors in vertex order. The quadratic forms
Gamma(x) and Gamma_2(x) are assembled as dense matrices on V and then cut
down to the 2-ball; everything outside B_2(x) is zero anyway.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .graph import WeightingScheme, bfs

#: p^{(2)}_{xz} at or below this counts as zero in the diagonal pseudoinverse.
PINV_THRESHOLD = 1e-14


# --- operators evaluated on functions ------------------------------------

def laplacian(scheme: WeightingScheme, f) -> np.ndarray:
    """Delta f(x) = sum_y p_xy (f(y) - f(x)) at every vertex."""
    f = np.asarray(f, dtype=float)
    p = scheme.rates
    return p @ f - p.sum(axis=1) * f


def carre_du_champ(scheme: WeightingScheme, f, g=None) -> np.ndarray:
    """Gamma(f, g) at every vertex, from 2Gamma(f,g) = Delta(fg) - f Delta g - g Delta f."""
    f = np.asarray(f, dtype=float)
    g = f if g is None else np.asarray(g, dtype=float)
    return 0.5 * (laplacian(scheme, f * g) - f * laplacian(scheme, g) - g * laplacian(scheme, f))


def gamma2(scheme: WeightingScheme, f, g=None) -> np.ndarray:
    """Gamma_2(f, g) at every vertex, straight from the iterated definition."""
    f = np.asarray(f, dtype=float)
    g = f if g is None else np.asarray(g, dtype=float)
    return 0.5 * (
        laplacian(scheme, carre_du_champ(scheme, f, g))
        - carre_du_champ(scheme, f, laplacian(scheme, g))
        - carre_du_champ(scheme, g, laplacian(scheme, f))
    )


def gamma2_bochner(scheme: WeightingScheme, f, x) -> float:
    """Gamma_2(f)(x) through the Markovian Bochner-type identity.

    (-1 + p_xx/2) Gamma(f)(x) + (Delta f(x))^2 / 2
        + 1/4 sum_{y != x} p_xy sum_z p_yz (f(z) - 2 f(y) + f(x))^2
    """
    i = scheme.idx(x)
    f = np.asarray(f, dtype=float)
    p = scheme.rates
    diff = f - f[i]
    gam = 0.5 * np.dot(p[i], diff**2)
    lap = np.dot(p[i], diff)
    second = f[None, :] - 2.0 * f[:, None] + f[i]          # [y, z]
    inner = np.sum(p * second**2, axis=1)                   # sum_z p_yz (...)^2
    outer = np.dot(np.delete(p[i], i), np.delete(inner, i))
    return float((-1.0 + p[i, i] / 2.0) * gam + 0.5 * lap**2 + 0.25 * outer)


# --- matrix representations ----------------------------------------------

def gamma_matrix(scheme: WeightingScheme, x) -> np.ndarray:
    """Gamma(x) on V: Gamma(f, g)(x) = f^T Gamma(x) g."""
    i = scheme.idx(x)
    p = scheme.rates[i].copy()
    p[i] = 0.0
    m = np.diag(p)
    m[i, :] -= p
    m[:, i] -= p
    m[i, i] += p.sum()
    return 0.5 * m


def gamma2_matrix(scheme: WeightingScheme, x) -> np.ndarray:
    """Gamma_2(x) on V.

    2 Gamma_2(f)(x) = Delta Gamma(f)(x) - 2 Gamma(f, Delta f)(x); both terms are
    quadratic forms in f, the second one symmetrized.
    """
    i = scheme.idx(x)
    p = scheme.rates
    lap = p - np.diag(p.sum(axis=1))
    gx = gamma_matrix(scheme, i)
    out = -0.5 * (gx @ lap + lap.T @ gx)
    for j in np.flatnonzero(p[i]):
        if j != i:
            out += 0.5 * p[i, j] * (gamma_matrix(scheme, j) - gx)
    return out


# --- local blocks ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LocalBlocks:
    """Delta, Gamma and Gamma_2 at ``x`` split along the combinatorial spheres of G.

    ``s1`` and ``s2`` hold vertex indices in vertex order. ``two_path[i, k]``
    is p_{x y_i} p_{y_i z_k} and ``p2_s2[k]`` is p^{(2)}_{x z_k}.
    """

    scheme: WeightingScheme
    x: int
    s1: np.ndarray
    s2: np.ndarray
    delta_s1: np.ndarray
    gamma_s1: np.ndarray
    gamma2_s1: np.ndarray
    gamma2_s1s2: np.ndarray
    gamma2_s2: np.ndarray
    two_path: np.ndarray
    p2_s2: np.ndarray

    @property
    def vertex(self) -> str:
        return self.scheme.vertices[self.x]

    @property
    def m(self) -> int:
        return len(self.s1)

    @property
    def gamma2_s1s2_full(self) -> np.ndarray:
        """Gamma_2(x) restricted to S_1 u S_2 as one block matrix."""
        return np.block([[self.gamma2_s1, self.gamma2_s1s2], [self.gamma2_s1s2.T, self.gamma2_s2]])


def spheres(scheme: WeightingScheme, x) -> tuple[np.ndarray, np.ndarray]:
    """Combinatorial 1- and 2-spheres of ``x`` in the scheme's own topology."""
    d = np.asarray(bfs(scheme.graph.adjacency, scheme.idx(x)))
    return np.flatnonzero(d == 1), np.flatnonzero(d == 2)


def local_blocks(scheme: WeightingScheme, x) -> LocalBlocks:
    i = scheme.idx(x)
    s1, s2 = spheres(scheme, i)
    p = scheme.rates
    g2 = gamma2_matrix(scheme, i)
    px = p[i, s1]
    two_path = px[:, None] * p[np.ix_(s1, s2)]
    return LocalBlocks(
        scheme=scheme,
        x=i,
        s1=s1,
        s2=s2,
        delta_s1=px.copy(),
        gamma_s1=0.5 * np.diag(px),
        gamma2_s1=g2[np.ix_(s1, s1)],
        gamma2_s1s2=g2[np.ix_(s1, s2)],
        gamma2_s2=g2[np.ix_(s2, s2)],
        two_path=two_path,
        p2_s2=scheme.two_step[i, s2].copy(),
    )


@dataclass(frozen=True, eq=False)
class QMatrix:
    x: int
    entries: np.ndarray
    q_weights: np.ndarray


def q_weights(blocks: LocalBlocks) -> np.ndarray:
    """Diagonal of the pseudoinverse of Gamma_2(x)_{S_2}: 4 / p^{(2)}_{xz} or 0."""
    p2 = blocks.p2_s2
    q = np.zeros_like(p2)
    pos = p2 > PINV_THRESHOLD
    q[pos] = 4.0 / p2[pos]
    return q


def q_matrix(blocks: LocalBlocks) -> QMatrix:
    """Schur complement of Gamma_2(x)_{S_2} in Gamma_2(x)_{S_1 u S_2} (pseudoinverse form)."""
    q = q_weights(blocks)
    b = blocks.gamma2_s1s2
    entries = blocks.gamma2_s1 - (b * q[None, :]) @ b.T
    return QMatrix(blocks.x, 0.5 * (entries + entries.T), q)


def q_matrix_entries(blocks: LocalBlocks) -> np.ndarray:
    """Q(x) from its explicit entry formulas; independent of the Gamma_2 assembly.

    Assumes a Markovian scheme (the diagonal formula uses D_x = 1 - p_xx).
    """
    p = blocks.scheme.rates
    x, s1, s2 = blocks.x, blocks.s1, blocks.s2
    q = q_weights(blocks)
    dx = blocks.scheme.weighted_degree[x]
    m = len(s1)
    out = np.zeros((m, m))
    for a, y in enumerate(s1):
        pxy = p[x, y]
        to_s2 = p[y, s2].sum()
        cross = sum(3 * pxy * p[y, w] + p[x, w] * p[w, y] for w in s1 if w != y)
        out[a, a] = (
            0.5 * pxy**2 + 0.75 * pxy * p[y, x] - dx / 4 * pxy + 0.75 * pxy * to_s2
            + 0.25 * cross - 0.25 * np.sum(pxy**2 * p[y, s2] ** 2 * q)
        )
        for b in range(a + 1, m):
            w = s1[b]
            val = (
                0.5 * pxy * p[x, w] - 0.5 * pxy * p[y, w] - 0.5 * p[x, w] * p[w, y]
                - 0.25 * np.sum(pxy * p[y, s2] * p[x, w] * p[w, s2] * q)
            )
            out[a, b] = out[b, a] = val
    return out


def optimal_extension(blocks: LocalBlocks, f0) -> np.ndarray:
    """Gamma_2-minimizing extension of values given on the 1-ball B_1^G(x).

    ``f0`` maps vertex ids (or indices) to values and must cover x and S_1.
    On S_2^G(x) n S_2^P(x) the value is -f(x) + (2/p2_xz) sum_y p_xy p_yz f(y);
    every other vertex gets 0.
    """
    scheme = blocks.scheme
    values = _ball_values(blocks, f0)
    f = np.zeros(scheme.n)
    f[blocks.x] = values[0]
    f[blocks.s1] = values[1:]
    pos = blocks.p2_s2 > PINV_THRESHOLD
    if np.any(pos):
        weighted = blocks.two_path[:, pos].T @ values[1:]
        f[blocks.s2[pos]] = -values[0] + 2.0 * weighted / blocks.p2_s2[pos]
    return f


def _ball_values(blocks: LocalBlocks, f0) -> np.ndarray:
    scheme = blocks.scheme
    if isinstance(f0, Mapping):
        lookup = {scheme.idx(k): float(v) for k, v in f0.items()}
    else:
        arr = np.asarray(f0, dtype=float)
        if arr.shape != (scheme.n,):
            raise ValueError("f0 must be a mapping on B_1(x) or a full vector over V")
        lookup = dict(enumerate(arr))
    ball = [blocks.x, *blocks.s1.tolist()]
    missing = [scheme.vertices[j] for j in ball if j not in lookup]
    if missing:
        raise ValueError(f"f0 has no value on {missing}")
    return np.array([lookup[j] for j in ball])
