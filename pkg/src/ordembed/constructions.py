"""Constructive realizations of prescribed orders at the optimal dimension.

Three pipelines:
  * any total preorder on D_n       -> n points in R^(n-1)
  * any linear order on D_n         -> n points in R^(n-2)
  * any total preorder on B_{n,m}   -> n + m points in R^min(n,m)

All three perturb a regular simplex: pairs of rank k get target distance
1 + k*eps, and eps shrinks geometrically until every Gram matrix involved
is positive definite with margin eta. Positive definiteness of the limit
guarantees the search terminates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import orders
from .errors import (DegenerateHyperplane, DistanceMismatch, EpsilonExhausted,
                     ShapeMismatch)
from .orders import OrderSpec
from .schoenberg import (GramMatrix, PointConfig, distances_of, factor_points,
                         gram_from_distances, min_eigenvalue)

ETA = 1e-6
TOL_ALIGN = 1e-8


@dataclass(frozen=True)
class EpsilonSearch:
    """Geometric search schedule for the perturbation size."""

    initial: float
    shrink_factor: float = 0.5
    max_steps: int = 60

    def __post_init__(self):
        if self.initial <= 0:
            raise ValueError("initial must be positive")
        if not 0 < self.shrink_factor < 1:
            raise ValueError("shrink_factor must lie in (0,1)")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


@dataclass(frozen=True)
class RealizationReport:
    config: PointConfig
    epsilon: float
    margin: float
    min_eigenvalues: tuple[float, ...] = field(default_factory=tuple)


def choose_epsilon(search: EpsilonSearch, test: Callable[[float], bool]) -> float:
    """First eps in initial * shrink^k accepted by test."""
    eps = search.initial
    for _ in range(search.max_steps):
        if test(eps):
            return eps
        eps *= search.shrink_factor
    raise EpsilonExhausted(
        f"no eps accepted after {search.max_steps} steps from {search.initial}")


def default_search(spec: OrderSpec) -> EpsilonSearch:
    """initial = 1/(2K) keeps every target distance in [1, 1.5]."""
    return EpsilonSearch(initial=1.0 / (2 * spec.num_classes))


def perturbed_distances(spec: OrderSpec, eps: float) -> np.ndarray:
    """m_ij = 1 + rank(i,j)*eps, zero diagonal. Complete specs only."""
    n = spec.n
    M = np.zeros((n, n))
    for cls in spec.classes:
        for i, j in cls:
            k = spec.rank_of((i, j))
            M[i - 1, j - 1] = M[j - 1, i - 1] = 1.0 + k * eps
    return M


def _realized_margin(spec: OrderSpec, config: PointConfig) -> float:
    """Smallest gap between max distance of one class and min distance of
    the next, over consecutive classes."""
    D = distances_of(config)
    if spec.kind == "complete":
        vals = [np.array([D[i - 1, j - 1] for i, j in cls])
                for cls in spec.classes]
    else:
        vals = [np.array([D[i - 1, j - 1] for i, j in cls])
                for cls in spec.classes]
    gaps = [float(vals[k + 1].min() - vals[k].max())
            for k in range(len(vals) - 1)]
    return min(gaps) if gaps else float("inf")


def realize_preorder_complete(spec: OrderSpec, eta: float = ETA,
                              search: EpsilonSearch | None = None
                              ) -> RealizationReport:
    """n points in R^(n-1) inducing the given preorder on D_n exactly."""
    orders.validate(spec)
    if spec.kind != "complete":
        raise ShapeMismatch("realize_preorder_complete needs a complete spec")
    n = spec.n
    search = search or default_search(spec)

    def pd(eps: float) -> bool:
        G = gram_from_distances(perturbed_distances(spec, eps), n)
        return min_eigenvalue(G) > eta

    eps = choose_epsilon(search, pd)
    G = gram_from_distances(perturbed_distances(spec, eps), n)
    lam = min_eigenvalue(G)
    config = factor_points(G, n - 1)
    return RealizationReport(config=config, epsilon=eps,
                             margin=_realized_margin(spec, config),
                             min_eigenvalues=(lam,))


def align_isometry(source: np.ndarray, target: np.ndarray
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Rigid map (R, t) with R @ source_i + t ~= target_i.

    Both lists must be congruent (equal pairwise distances within
    TOL_ALIGN * scale); the orthogonal factor comes from the singular
    decomposition of the cross-covariance, reflections permitted.
    """
    S = np.asarray(source, dtype=float)
    T = np.asarray(target, dtype=float)
    if S.shape != T.shape:
        raise ShapeMismatch(f"shape mismatch {S.shape} vs {T.shape}")

    def pdist(A):
        d = A[:, None, :] - A[None, :, :]
        return np.sqrt((d ** 2).sum(axis=2))

    ds, dt = pdist(S), pdist(T)
    scale = max(1.0, float(ds.max(initial=0.0)))
    if np.abs(ds - dt).max(initial=0.0) > TOL_ALIGN * scale:
        raise DistanceMismatch("point lists are not congruent")
    cs, ct = S.mean(axis=0), T.mean(axis=0)
    H = (S - cs).T @ (T - ct)
    U, _, Vt = np.linalg.svd(H)
    R = Vt.T @ U.T
    t = ct - R @ cs
    return R, t


def _hyperplane(spanning: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centroid and unit normal of the affine hyperplane spanned by the
    given points; they must span codimension exactly 1."""
    S = np.asarray(spanning, dtype=float)
    d = S.shape[1]
    c = S.mean(axis=0)
    _, sv, Vt = np.linalg.svd(S - c, full_matrices=True)
    svals = np.zeros(d)
    svals[: sv.size] = sv
    tol = 1e-9 * max(1.0, float(svals.max(initial=0.0)))
    rank = int((svals > tol).sum())
    if rank != d - 1:
        raise DegenerateHyperplane(
            f"spanning set has affine rank {rank}, need {d - 1}")
    return c, Vt[d - 1]


def reflect_across_affine_span(x: np.ndarray, spanning: np.ndarray
                               ) -> np.ndarray:
    """Mirror image of x across the affine hyperplane of the spanning set."""
    c, u = _hyperplane(spanning)
    x = np.asarray(x, dtype=float)
    return x - 2.0 * float(np.dot(x - c, u)) * u


def realize_linear_complete(spec: OrderSpec, eta: float = ETA,
                            search: EpsilonSearch | None = None
                            ) -> RealizationReport:
    """n points in R^(n-2) inducing the given linear order on D_n.

    Pipeline: relabel the minimal pair to (n-1, n); prescribe 1 + k*eps on
    every other pair; embed {1..n-2, n-1} and {1..n-2, n} separately from
    two Gram matrices; align the shared n-2 points rigidly; reflect the
    second apex to the first apex's side of their affine hyperplane; accept
    eps once both Grams clear eta and the apex distance falls in (0, 1).
    The distance of the minimal pair is never prescribed; it is forced
    below 1 as eps shrinks.
    """
    orders.validate(spec)
    if spec.kind != "complete":
        raise ShapeMismatch("realize_linear_complete needs a complete spec")
    n = spec.n
    if n < 3:
        raise ShapeMismatch("realize_linear_complete needs n >= 3")
    rel, sigma = orders.relabel_min_to_last(spec)
    search = search or default_search(spec)
    state: dict = {}

    def attempt(eps: float) -> bool:
        M = perturbed_distances(rel, eps)
        idx_g = list(range(n - 2)) + [n - 2]
        idx_h = list(range(n - 2)) + [n - 1]
        base = n - 1
        G = gram_from_distances(M[np.ix_(idx_g, idx_g)], base)
        H = gram_from_distances(M[np.ix_(idx_h, idx_h)], base)
        lam_g, lam_h = min_eigenvalue(G), min_eigenvalue(H)
        if lam_g <= eta or lam_h <= eta:
            return False
        Pg = factor_points(G, n - 2).P
        Ph = factor_points(H, n - 2).P
        shared_g, apex_g = Pg[: n - 2], Pg[n - 2]
        shared_h, apex_h = Ph[: n - 2], Ph[n - 2]
        R, t = align_isometry(shared_h, shared_g)
        qn = R @ apex_h + t
        try:
            c, u = _hyperplane(shared_g)
        except DegenerateHyperplane:
            return False
        if float(np.dot(apex_g - c, u)) * float(np.dot(qn - c, u)) < 0:
            qn = qn - 2.0 * float(np.dot(qn - c, u)) * u
        dmin = float(np.linalg.norm(apex_g - qn))
        if not 0.0 < dmin < 1.0:
            return False
        state["P"] = np.vstack([shared_g, apex_g[None, :], qn[None, :]])
        state["eigs"] = (lam_g, lam_h)
        return True

    eps = choose_epsilon(search, attempt)
    relabeled = state["P"]
    P = np.zeros_like(relabeled)
    for i in range(1, n + 1):
        P[i - 1] = relabeled[sigma[i] - 1]
    config = PointConfig(dim=n - 2, P=P)
    return RealizationReport(config=config, epsilon=eps,
                             margin=_realized_margin(spec, config),
                             min_eigenvalues=state["eigs"])


def _transpose_spec(spec: OrderSpec) -> OrderSpec:
    classes = tuple(tuple((j, i) for i, j in cls) for cls in spec.classes)
    return OrderSpec("bipartite", spec.m, classes, m=spec.n)


def realize_preorder_bipartite(spec: OrderSpec, eta: float = ETA,
                               search: EpsilonSearch | None = None
                               ) -> RealizationReport:
    """n + m points in R^min(n,m) inducing the given preorder on B_{n,m}.

    The first collection is a fixed regular simplex of side 1 + eps whose
    last coordinate is zero; each apex q_i is recovered from its prescribed
    squared distances 1 + r*eps by a linear solve, with the orthogonal
    coordinate's sign fixed nonnegative. One shared eps must make all m
    apex Gram matrices positive definite with margin eta.
    """
    orders.validate(spec)
    if spec.kind != "bipartite":
        raise ShapeMismatch("realize_preorder_bipartite needs bipartite spec")
    if spec.m < spec.n:
        rep = realize_preorder_bipartite(_transpose_spec(spec), eta, search)
        cfg = rep.config
        return RealizationReport(
            config=PointConfig(dim=cfg.dim, P=cfg.Q, Q=cfg.P),
            epsilon=rep.epsilon, margin=rep.margin,
            min_eigenvalues=rep.min_eigenvalues)
    n, m = spec.n, spec.m
    search = search or default_search(spec)

    def apex_targets(eps: float, j: int) -> np.ndarray:
        return np.array([1.0 + spec.rank_of((i, j)) * eps
                         for i in range(1, n + 1)])

    def apex_grams(eps: float) -> list[GramMatrix]:
        side = 1.0 + eps
        out = []
        for j in range(1, m + 1):
            D = np.zeros((n + 1, n + 1))
            D[:n, :n] = side
            np.fill_diagonal(D, 0.0)
            a = apex_targets(eps, j)
            D[n, :n] = a
            D[:n, n] = a
            out.append(gram_from_distances(D, n))
        return out

    def pd(eps: float) -> bool:
        return all(min_eigenvalue(G) > eta for G in apex_grams(eps))

    eps = choose_epsilon(search, pd)
    eigs = tuple(min_eigenvalue(G) for G in apex_grams(eps))

    side = 1.0 + eps
    Dp = np.full((n, n), side)
    np.fill_diagonal(Dp, 0.0)
    P = factor_points(gram_from_distances(Dp, n), n).P
    Q = np.zeros((m, n))
    if n == 1:
        # a single simplex point at the origin: each apex sits at its
        # prescribed distance along the only axis
        for j in range(1, m + 1):
            Q[j - 1, 0] = apex_targets(eps, j)[0]
    else:
        Pt = P[: n - 1, : n - 1]
        for j in range(1, m + 1):
            a = apex_targets(eps, j)
            b = (P[: n - 1] ** 2).sum(axis=1) + a[n - 1] ** 2 - a[: n - 1] ** 2
            qt = np.linalg.solve(2.0 * Pt, b)
            h2 = a[n - 1] ** 2 - float((qt ** 2).sum())
            if h2 < 0:
                # the PD acceptance makes this impossible; guard anyway
                raise EpsilonExhausted("apex height underflow at accepted eps")
            Q[j - 1, : n - 1] = qt
            Q[j - 1, n - 1] = np.sqrt(h2)
    config = PointConfig(dim=n, P=P, Q=Q)
    return RealizationReport(config=config, epsilon=eps,
                             margin=_realized_margin(spec, config),
                             min_eigenvalues=eigs)


def realize_linear_bipartite(spec: OrderSpec, eta: float = ETA,
                             search: EpsilonSearch | None = None
                             ) -> RealizationReport:
    """A linear order is a preorder with singleton classes; delegate."""
    return realize_preorder_bipartite(spec, eta, search)


def realize(spec: OrderSpec, eta: float = ETA,
            search: EpsilonSearch | None = None) -> RealizationReport:
    """Dispatch on kind and linearity to the matching construction."""
    orders.validate(spec)
    if spec.kind == "bipartite":
        return realize_preorder_bipartite(spec, eta, search)
    if spec.is_linear() and spec.n >= 3:
        return realize_linear_complete(spec, eta, search)
    return realize_preorder_complete(spec, eta, search)
