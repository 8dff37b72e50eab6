"""Lower-bound order families and a numerical feasibility falsifier.

The gallery reproduces the order families whose realizations provably need
one more dimension than the falsifier is given. The falsifier then attacks
a (spec, dim) instance by stress minimization over point coordinates with
random restarts: squared distances are scale-normalized to mean one, strict
class steps are hinge constraints with a margin, within-class ties are
equality constraints, and every point pair must clear a distinctness floor
so the search stays away from configurations with merged points (the
impossibility arguments all assume the relevant points distinct). An
"infeasible" verdict is evidence under the given budget, never a proof.
"""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

import numpy as np

from . import orders, verifier
from .errors import BadSize, ShapeMismatch, UnknownName
from .orders import OrderSpec
from .schoenberg import PointConfig

MARGIN = 5e-2
FLOOR = 5e-2
FEASIBLE_LOSS = 1e-10
STOP_LOSS = 1e-14
VERIFY_TOL = 1e-5
ARMIJO_C = 1e-4
MIN_STEP = 1e-18
STALL_REL = 1e-8
STALL_ITERS = 50

GALLERY_NAMES = ("d4_linear", "block_linear", "diameter_preorder",
                 "bip_cyclic_linear", "bip_affine_preorder")


# ---------------------------------------------------------------------------
# gallery

def _lex_extension(pairs, relations):
    """Complete a strict partial order into the lexicographically smallest
    compatible linear order (Kahn's algorithm with a lex min-heap)."""
    succ = {p: [] for p in pairs}
    indeg = {p: 0 for p in pairs}
    for a, b in relations:
        succ[a].append(b)
        indeg[b] += 1
    heap = [p for p in pairs if indeg[p] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        p = heapq.heappop(heap)
        out.append(p)
        for q in succ[p]:
            indeg[q] -= 1
            if indeg[q] == 0:
                heapq.heappush(heap, q)
    if len(out) != len(pairs):
        raise AssertionError("relation cycle in gallery construction")
    return out


def _d4_linear(n: int) -> OrderSpec:
    if n != 4:
        raise BadSize("d4_linear is fixed at n = 4")
    pairs = orders.complete_pairs(4)
    relations = [((1, 2), (1, 3)), ((2, 4), (3, 4))]
    relations += [(p, (1, 4)) for p in pairs if p != (1, 4)]
    chain = _lex_extension(pairs, relations)
    return OrderSpec("complete", 4, tuple((p,) for p in chain))


def _block_linear(n: int) -> OrderSpec:
    if n < 4:
        raise BadSize("block_linear needs n >= 4")
    low = [(i, j) for i in range(1, n - 2) for j in (n - 2, n - 1, n)]
    mid = [(n - 2, n - 1), (n - 2, n), (n - 1, n)]
    top = orders.complete_pairs(n - 3) if n >= 5 else []
    chain = sorted(low) + mid + sorted(top)
    return OrderSpec("complete", n, tuple((p,) for p in chain))


def _diameter_preorder(n: int) -> OrderSpec:
    if n < 3:
        raise BadSize("diameter_preorder needs n >= 3")
    rest = tuple(p for p in orders.complete_pairs(n) if p != (n - 1, n))
    return OrderSpec("complete", n, (((n - 1, n),), rest))


def _bip_cyclic_linear(n: int) -> OrderSpec:
    if n < 3:
        raise BadSize("bip_cyclic_linear needs n >= 3")
    pairs = orders.bipartite_pairs(n, n)
    relations = []
    for col in range(1, n + 1):
        rows = [((col - 1 + k) % n) + 1 for k in range(n)]
        relations += [((a, col), (b, col)) for a, b in zip(rows, rows[1:])]
    chain = _lex_extension(pairs, relations)
    return OrderSpec("bipartite", n, tuple((p,) for p in chain), m=n)


def _bip_affine_preorder(n: int) -> OrderSpec:
    if n < 3:
        raise BadSize("bip_affine_preorder needs n >= 3")
    classes = [tuple((1, j) for j in range(1, n + 1)),
               tuple((2, j) for j in range(1, n + 1))]
    for i in range(3, n):
        cut = n + 2 - i
        classes.append(tuple((i, j) for j in range(1, cut + 1)))
        classes.append(tuple((i, j) for j in range(cut + 1, n + 1)))
    classes += [((n, j),) for j in range(1, n + 1)]
    return OrderSpec("bipartite", n, tuple(classes), m=n)


def gallery(name: str, n: int) -> OrderSpec:
    """Emit a lower-bound family as a full order spec.

    The sources fix only some relations; unconstrained pairs are completed
    deterministically (lex-smallest compatible completion for the linear
    families, row-major chaining for the affine preorder)."""
    builders = {
        "d4_linear": _d4_linear,
        "block_linear": _block_linear,
        "diameter_preorder": _diameter_preorder,
        "bip_cyclic_linear": _bip_cyclic_linear,
        "bip_affine_preorder": _bip_affine_preorder,
    }
    try:
        builder = builders[name]
    except KeyError:
        raise UnknownName(
            f"unknown gallery family {name!r}; "
            f"choose from {', '.join(GALLERY_NAMES)}") from None
    spec = builder(n)
    orders.validate(spec)
    return spec


def infeasible_dimension(name: str, n: int) -> int:
    """Largest dimension in which the family provably has no realization."""
    dims = {
        "d4_linear": lambda k: 1,
        "block_linear": lambda k: k - 3,
        "diameter_preorder": lambda k: k - 2,
        "bip_cyclic_linear": lambda k: k - 2,
        "bip_affine_preorder": lambda k: k - 1,
    }
    if name not in dims:
        raise UnknownName(f"unknown gallery family {name!r}")
    gallery(name, n)
    return dims[name](n)


def simplex_diameter_bound(n: int) -> float:
    """2*sqrt((n-1)/(2(n-2))): the forced distance between the two apexes
    of the reflected regular simplex; strictly above 1 for every n >= 3."""
    if n < 3:
        raise BadSize("simplex_diameter_bound needs n >= 3")
    return 2.0 * float(np.sqrt((n - 1) / (2.0 * (n - 2))))


# ---------------------------------------------------------------------------
# stress loss

class _StressTerms:
    """Precomputed index arrays for the loss terms of one spec."""

    def __init__(self, spec: OrderSpec):
        pairs = spec.pair_set()
        self.n_points = spec.n + (spec.m if spec.kind == "bipartite" else 0)
        index = {p: k for k, p in enumerate(pairs)}
        if spec.kind == "complete":
            self.ii = np.array([i - 1 for i, _ in pairs])
            self.jj = np.array([j - 1 for _, j in pairs])
            extra = []
        else:
            self.ii = np.array([i - 1 for i, _ in pairs])
            self.jj = np.array([spec.n + j - 1 for _, j in pairs])
            # points of one collection may legally coincide, but only when
            # their relation rows agree; rows that differ force distinct
            # points in every realization, so only those pairs get the
            # distinctness floor
            row = [tuple(spec.rank_of((a + 1, j + 1)) for j in range(spec.m))
                   for a in range(spec.n)]
            col = [tuple(spec.rank_of((i + 1, b + 1)) for i in range(spec.n))
                   for b in range(spec.m)]
            extra = [(a, b) for a in range(spec.n)
                     for b in range(a + 1, spec.n) if row[a] != row[b]]
            extra += [(spec.n + a, spec.n + b) for a in range(spec.m)
                      for b in range(a + 1, spec.m) if col[a] != col[b]]
        self.xi = np.array([a for a, _ in extra], dtype=int)
        self.xj = np.array([b for _, b in extra], dtype=int)
        eq_a, eq_b, hi_a, hi_b = [], [], [], []
        sorted_classes = [sorted(cls) for cls in spec.classes]
        for cls in sorted_classes:
            for a, b in zip(cls, cls[1:]):
                eq_a.append(index[a])
                eq_b.append(index[b])
        for lo, hi in zip(sorted_classes, sorted_classes[1:]):
            hi_a.append(index[lo[0]])
            hi_b.append(index[hi[0]])
        self.eq_a = np.array(eq_a, dtype=int)
        self.eq_b = np.array(eq_b, dtype=int)
        self.hi_a = np.array(hi_a, dtype=int)
        self.hi_b = np.array(hi_b, dtype=int)
        self.n_pairs = len(pairs)


def _stack(config: PointConfig) -> np.ndarray:
    if config.Q is None:
        return np.asarray(config.P, dtype=float)
    return np.vstack([config.P, config.Q])


def _stress_parts(terms: _StressTerms, X: np.ndarray, margin: float,
                  floor: float):
    d = X[terms.ii] - X[terms.jj]
    s = (d * d).sum(axis=1)
    mu = s.mean()
    sh = s / mu
    hinge = np.maximum(0.0, margin + sh[terms.hi_a] - sh[terms.hi_b])
    eq = sh[terms.eq_a] - sh[terms.eq_b]
    low = np.maximum(0.0, floor - sh)
    dx = X[terms.xi] - X[terms.xj]
    sx = (dx * dx).sum(axis=1) / mu
    lowx = np.maximum(0.0, floor - sx)
    return d, mu, sh, hinge, eq, low, dx, sx, lowx


def _loss_only(terms: _StressTerms, X: np.ndarray, margin: float,
               floor: float) -> float:
    _, _, _, hinge, eq, low, _, _, lowx = _stress_parts(terms, X, margin,
                                                        floor)
    return float((hinge * hinge).sum() + (eq * eq).sum()
                 + (low * low).sum() + (lowx * lowx).sum())


def _loss_grad(terms: _StressTerms, X: np.ndarray, margin: float,
               floor: float) -> tuple[float, np.ndarray]:
    d, mu, sh, hinge, eq, low, dx, sx, lowx = _stress_parts(
        terms, X, margin, floor)
    loss = float((hinge * hinge).sum() + (eq * eq).sum()
                 + (low * low).sum() + (lowx * lowx).sum())
    g = np.zeros(terms.n_pairs)
    np.add.at(g, terms.hi_a, 2.0 * hinge)
    np.add.at(g, terms.hi_b, -2.0 * hinge)
    np.add.at(g, terms.eq_a, 2.0 * eq)
    np.add.at(g, terms.eq_b, -2.0 * eq)
    g -= 2.0 * low
    gx = -2.0 * lowx
    # normalization: every sh_p = s_p / mu depends on all s_q through mu
    mu_term = ((g * sh).sum() + (gx * sx).sum()) / terms.n_pairs
    gs = (g - mu_term) / mu
    grad = np.zeros_like(X)
    contrib = (2.0 * gs)[:, None] * d
    np.add.at(grad, terms.ii, contrib)
    np.add.at(grad, terms.jj, -contrib)
    if terms.xi.size:
        contrib_x = (2.0 * gx / mu)[:, None] * dx
        np.add.at(grad, terms.xi, contrib_x)
        np.add.at(grad, terms.xj, -contrib_x)
    return loss, grad


def stress_loss(spec: OrderSpec, config: PointConfig, margin: float = MARGIN,
                floor: float = FLOOR) -> tuple[float, np.ndarray]:
    """Order-violation stress of a configuration, with exact gradient.

    Squared pair distances are normalized to mean one. Terms: a squared
    hinge max(0, margin + s_a - s_b) for the lexicographically smallest
    representatives a, b of each consecutive class step; a squared
    difference for each lexicographically adjacent pair inside a class;
    and a squared shortfall max(0, floor - s) for every normalized squared
    distance the order constrains to be positive (the whole pair set, plus
    the bipartite within-collection distances between points whose relation
    rows differ; points with identical rows may legally coincide and are
    exempt). The floor keeps the search away from point collapses that
    satisfy the order constraints only degenerately; it restricts the
    probe to configurations whose constrained distances stay comparable
    to the mean.
    The gradient is analytic, including the normalization coupling, and is
    laid out like P (complete) or P stacked over Q (bipartite).
    """
    orders.validate(spec)
    terms = _StressTerms(spec)
    X = _stack(config)
    _check_shape(spec, config)
    return _loss_grad(terms, X, margin, floor)


def _check_shape(spec: OrderSpec, config: PointConfig) -> None:
    if spec.kind == "complete":
        if config.Q is not None or len(config.P) != spec.n:
            raise ShapeMismatch("config does not match complete spec")
    else:
        if config.Q is None or len(config.P) != spec.n \
                or len(config.Q) != spec.m:
            raise ShapeMismatch("config does not match bipartite spec")


# ---------------------------------------------------------------------------
# falsifier

@dataclass(frozen=True)
class FalsifierConfig:
    dim: int
    restarts: int = 100
    iters: int = 5000
    margin: float = MARGIN
    floor: float = FLOOR
    seed: int = 0
    step_init: float = 1.0
    armijo_c: float = ARMIJO_C

    def __post_init__(self):
        if self.dim < 1:
            raise BadSize("dim must be >= 1")
        if self.restarts < 1 or self.iters < 1:
            raise BadSize("restarts and iters must be >= 1")
        if self.margin <= 0:
            raise BadSize("margin must be positive")
        if self.floor < 0:
            raise BadSize("floor must be nonnegative")
        if self.step_init <= 0 or not 0 < self.armijo_c < 1:
            raise BadSize("bad backtracking parameters")


@dataclass(frozen=True)
class FalsifierReport:
    feasible: bool
    best_loss: float
    best_config: PointConfig
    per_restart_losses: tuple[float, ...]
    restarts: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "restarts", len(self.per_restart_losses))


def _descend(terms: _StressTerms, X: np.ndarray, iters: int, margin: float,
             floor: float, step_init: float = 1.0,
             armijo_c: float = ARMIJO_C) -> tuple[float, np.ndarray]:
    """Gradient descent with backtracking (halve until Armijo decrease).

    Stops early below STOP_LOSS, or once progress stalls: relative decrease
    at most STALL_REL for STALL_ITERS consecutive steps, or no acceptable
    step above MIN_STEP.
    """
    f, g = _loss_grad(terms, X, margin, floor)
    stall = 0
    for _ in range(iters):
        if f < STOP_LOSS:
            break
        gnorm2 = float((g * g).sum())
        if gnorm2 == 0.0:
            break
        step = step_init
        accepted = False
        while step >= MIN_STEP:
            Xn = X - step * g
            fn = _loss_only(terms, Xn, margin, floor)
            if fn <= f - armijo_c * step * gnorm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        X = Xn
        f_prev = f
        f, g = _loss_grad(terms, X, margin, floor)
        if f_prev - f <= STALL_REL * max(f, 1e-300):
            stall += 1
            if stall >= STALL_ITERS:
                break
        else:
            stall = 0
    return f, X


def _split_config(spec: OrderSpec, X: np.ndarray, dim: int) -> PointConfig:
    if spec.kind == "complete":
        return PointConfig(dim=dim, P=X.copy())
    return PointConfig(dim=dim, P=X[: spec.n].copy(), Q=X[spec.n:].copy())


def falsify(spec: OrderSpec, cfg: FalsifierConfig) -> FalsifierReport:
    """Search for a realization of spec in R^dim by restarted descent.

    feasible is true iff some restart drives the loss below FEASIBLE_LOSS
    and the verifier confirms the resulting configuration induces exactly
    the spec's classes (tolerances VERIFY_TOL, the residual scale that a
    just-accepted loss permits). Deterministic for a fixed seed: restart r
    draws its start from default_rng([seed, r]).
    """
    orders.validate(spec)
    terms = _StressTerms(spec)
    losses = []
    best_loss = float("inf")
    best_X = None
    witness_X = None
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        X0 = rng.standard_normal((terms.n_points, cfg.dim))
        f, X = _descend(terms, X0, cfg.iters, cfg.margin, cfg.floor,
                        cfg.step_init, cfg.armijo_c)
        losses.append(f)
        if f < best_loss:
            best_loss = f
            best_X = X
        if f < FEASIBLE_LOSS and witness_X is None:
            candidate = _split_config(spec, X, cfg.dim)
            report = verifier.verify(candidate, spec, tol_abs=VERIFY_TOL,
                                     tol_rel=VERIFY_TOL)
            if report.matched:
                witness_X = X
    feasible = witness_X is not None
    final_X = witness_X if feasible else best_X
    return FalsifierReport(feasible=feasible, best_loss=best_loss,
                           best_config=_split_config(spec, final_X, cfg.dim),
                           per_restart_losses=tuple(losses))


def report_to_json(report: FalsifierReport) -> str:
    out = {
        "feasible": report.feasible,
        "best_loss": report.best_loss,
        "restarts": report.restarts,
        "per_restart_losses": list(report.per_restart_losses),
    }
    return json.dumps(out)
