"""Distance matrices, Gram transforms, and coordinate factorization.

The central fact: target distances m_ij admit points in R^d iff the matrix
g_ij = (m_bi^2 + m_bj^2 - m_ij^2) / 2 over indices i, j different from a
base b is positive semidefinite of rank at most d. The base point sits at
the origin and the factorization of G supplies the remaining coordinates.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import (BadIndex, DimTooSmall, NonFiniteEntry, NotPSD,
                     ShapeMismatch)

TOL_FACTOR = 1e-8


def check_distance_matrix(D: np.ndarray) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ShapeMismatch(f"distance matrix must be square, got {D.shape}")
    if not np.isfinite(D).all():
        raise NonFiniteEntry("distance matrix has non-finite entries")
    if (D < 0).any():
        raise ShapeMismatch("distance matrix has negative entries")
    if np.abs(np.diag(D)).max(initial=0.0) != 0.0:
        raise ShapeMismatch("distance matrix diagonal must be zero")
    if not np.array_equal(D, D.T):
        raise ShapeMismatch("distance matrix must be symmetric")
    return D


@dataclass(frozen=True)
class GramMatrix:
    """Schoenberg transform of a distance matrix relative to a base point.

    matrix is (n-1)x(n-1) over the indices != base in ascending order;
    base is 1-based.
    """

    matrix: np.ndarray
    base: int
    n: int


@dataclass(frozen=True)
class PointConfig:
    """One or two coordinate collections in a common ambient dimension."""

    dim: int
    P: np.ndarray
    Q: np.ndarray | None = None

    @property
    def kind(self) -> str:
        return "complete" if self.Q is None else "bipartite"


def gram_from_distances(D: np.ndarray, base: int) -> GramMatrix:
    """g_ij = (m_bi^2 + m_bj^2 - m_ij^2) / 2 over indices != base (1-based)."""
    D = check_distance_matrix(D)
    n = D.shape[0]
    if not 1 <= base <= n:
        raise BadIndex(f"base {base} outside [1..{n}]")
    others = [i for i in range(n) if i != base - 1]
    db2 = D[base - 1, others] ** 2
    G = 0.5 * (db2[:, None] + db2[None, :] - D[np.ix_(others, others)] ** 2)
    return GramMatrix(matrix=G, base=base, n=n)


def _as_matrix(G) -> np.ndarray:
    M = G.matrix if isinstance(G, GramMatrix) else np.asarray(G, dtype=float)
    if not np.isfinite(M).all():
        raise NonFiniteEntry("matrix has non-finite entries")
    return M


def min_eigenvalue(G) -> float:
    M = _as_matrix(G)
    if M.size == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(M)[0])


def is_positive_definite(G, eta: float) -> bool:
    return min_eigenvalue(G) > eta


def factor_points(G: GramMatrix, dim: int) -> PointConfig:
    """Factor G into n points in R^dim with the base point at the origin.

    Eigenvalues below -tol_psd raise NotPSD; tiny negatives are clamped.
    Positive eigenvalues beyond position dim (above tol_psd) raise
    DimTooSmall. Rows are ordered so row i-1 is point i (1-based).
    """
    M = _as_matrix(G)
    w, V = np.linalg.eigh(M)
    scale = max(1.0, float(np.abs(w).max())) if w.size else 1.0
    tol_psd = 1e-10 * scale
    if w.size and w[0] < -tol_psd:
        raise NotPSD(f"min eigenvalue {w[0]:.3e} below -{tol_psd:.3e}")
    w = np.clip(w, 0.0, None)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    k = min(dim, w.size)
    if w.size > k and w[k] > tol_psd:
        raise DimTooSmall(
            f"rank exceeds dim={dim}: eigenvalue {w[k]:.3e} at position {k}")
    rows = np.zeros((M.shape[0], dim))
    rows[:, :k] = V[:, :k] * np.sqrt(w[:k])
    P = np.zeros((G.n, dim))
    others = [i for i in range(G.n) if i != G.base - 1]
    P[others] = rows
    return PointConfig(dim=dim, P=P)


def distances_of(config: PointConfig) -> np.ndarray:
    """Complete configs: full symmetric n x n matrix. Bipartite: n x m
    rectangle of P-to-Q distances."""
    P = np.asarray(config.P, dtype=float)
    if config.Q is None:
        diff = P[:, None, :] - P[None, :, :]
        return np.sqrt((diff ** 2).sum(axis=2))
    Q = np.asarray(config.Q, dtype=float)
    diff = P[:, None, :] - Q[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def config_to_json(config: PointConfig) -> str:
    """Serialize with 17 significant digits so parsing reproduces the
    exact binary values."""
    def rows(A):
        return "[" + ",".join(
            "[" + ",".join(_fmt(v) for v in row) + "]" for row in A) + "]"

    out = f'{{"dim":{config.dim},"P":{rows(config.P)}'
    if config.Q is not None:
        out += f',"Q":{rows(config.Q)}'
    return out + "}"


def config_from_json(text: str) -> PointConfig:
    try:
        data = json.loads(text)
        dim = int(data["dim"])
        P = np.asarray(data["P"], dtype=float)
        Q = np.asarray(data["Q"], dtype=float) if "Q" in data else None
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ShapeMismatch(f"malformed point config: {exc}") from exc
    if P.ndim != 2 or P.shape[1] != dim:
        raise ShapeMismatch(f"P must be rows of length dim={dim}")
    if Q is not None and (Q.ndim != 2 or Q.shape[1] != dim):
        raise ShapeMismatch(f"Q must be rows of length dim={dim}")
    if not np.isfinite(P).all() or (Q is not None and not np.isfinite(Q).all()):
        raise NonFiniteEntry("point config has non-finite coordinates")
    return PointConfig(dim=dim, P=P, Q=Q)


def load_config(path: str) -> PointConfig:
    with open(path, encoding="utf-8") as fh:
        return config_from_json(fh.read())


def save_config(config: PointConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(config_to_json(config))
        fh.write("\n")
