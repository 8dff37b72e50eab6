"""Recover the order induced by a configuration and compare to a spec.

Distances are sorted and split into classes wherever an adjacent gap
exceeds tol_abs + tol_rel * (max distance); single-linkage, deterministic,
and exact whenever the realization's gaps dominate the tolerances.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch
from .orders import OrderSpec, bipartite_pairs, complete_pairs
from .schoenberg import PointConfig, distances_of

TOL_ABS = 1e-9
TOL_REL = 1e-9

Pair = tuple[int, int]


@dataclass(frozen=True)
class InducedOrder:
    classes: tuple[tuple[Pair, ...], ...]
    gaps: tuple[float, ...]
    spread: float


@dataclass(frozen=True)
class VerifyReport:
    verdict: str
    witness: tuple[Pair, Pair] | None
    margin: float
    distinctness: float

    @property
    def matched(self) -> bool:
        return self.verdict == "match"


def _pair_distances(config: PointConfig) -> tuple[list[Pair], np.ndarray]:
    D = distances_of(config)
    if config.Q is None:
        pairs = complete_pairs(len(config.P))
    else:
        pairs = bipartite_pairs(len(config.P), len(config.Q))
    vals = np.array([D[i - 1, j - 1] for i, j in pairs])
    return pairs, vals


def induced_preorder(config: PointConfig, tol_abs: float = TOL_ABS,
                     tol_rel: float = TOL_REL) -> InducedOrder:
    """Classes of the induced order, ascending, with gap/spread diagnostics."""
    pairs, vals = _pair_distances(config)
    threshold = tol_abs + tol_rel * float(vals.max(initial=0.0))
    order = sorted(range(len(pairs)), key=lambda k: (vals[k], pairs[k]))
    classes: list[list[Pair]] = [[pairs[order[0]]]]
    gaps: list[float] = []
    spread = 0.0
    start = order[0]
    for prev, cur in zip(order, order[1:]):
        if float(vals[cur] - vals[prev]) > threshold:
            classes.append([])
            gaps.append(float(vals[cur] - vals[prev]))
            start = cur
        else:
            spread = max(spread, float(vals[cur] - vals[start]))
        classes[-1].append(pairs[cur])
    return InducedOrder(classes=tuple(tuple(c) for c in classes),
                        gaps=tuple(gaps), spread=spread)


def _distinctness(config: PointConfig) -> float:
    """Complete: min distance over all pairs of P. Bipartite: min P-to-Q
    distance (each collection may repeat points internally)."""
    if config.Q is None:
        n = len(config.P)
        if n < 2:
            return float("inf")
        D = distances_of(config)
        iu = np.triu_indices(n, 1)
        return float(D[iu].min())
    return float(distances_of(config).min())


def _first_disagreement(spec: OrderSpec, induced: InducedOrder
                        ) -> tuple[Pair, Pair]:
    """Lexicographically first pair of pairs whose relative order differs."""
    want = {}
    for k, cls in enumerate(spec.classes, start=1):
        for p in cls:
            want[p] = k
    got = {}
    for k, cls in enumerate(induced.classes, start=1):
        for p in cls:
            got[p] = k
    pairs = sorted(want)
    for a_idx in range(len(pairs)):
        for b_idx in range(a_idx + 1, len(pairs)):
            a, b = pairs[a_idx], pairs[b_idx]
            ws = (want[a] > want[b]) - (want[a] < want[b])
            gs = (got[a] > got[b]) - (got[a] < got[b])
            if ws != gs:
                return a, b
    raise AssertionError("mismatch verdict without a disagreeing pair")


def verify(config: PointConfig, spec: OrderSpec, tol_abs: float = TOL_ABS,
           tol_rel: float = TOL_REL) -> VerifyReport:
    """Match iff the induced classes equal the spec classes as set sequences."""
    if spec.kind == "complete":
        if config.Q is not None:
            raise ShapeMismatch("complete spec but bipartite config")
        if len(config.P) != spec.n:
            raise ShapeMismatch(
                f"spec has n={spec.n}, config has {len(config.P)} points")
    else:
        if config.Q is None:
            raise ShapeMismatch("bipartite spec but complete config")
        if len(config.P) != spec.n or len(config.Q) != spec.m:
            raise ShapeMismatch(
                f"spec is {spec.n}x{spec.m}, config is "
                f"{len(config.P)}x{len(config.Q)}")
    induced = induced_preorder(config, tol_abs, tol_rel)
    got = [frozenset(c) for c in induced.classes]
    want = [frozenset(c) for c in spec.classes]
    margin = min(induced.gaps) if induced.gaps else float("inf")
    if got == want:
        return VerifyReport(verdict="match", witness=None, margin=margin,
                            distinctness=_distinctness(config))
    witness = _first_disagreement(spec, induced)
    return VerifyReport(verdict="mismatch", witness=witness, margin=margin,
                        distinctness=_distinctness(config))


def report_to_json(report: VerifyReport) -> str:
    out = {
        "verdict": report.verdict,
        "margin": None if report.margin == float("inf") else report.margin,
        "distinctness": (None if report.distinctness == float("inf")
                         else report.distinctness),
        "witness": (None if report.witness is None
                    else [list(report.witness[0]), list(report.witness[1])]),
    }
    return json.dumps(out)
