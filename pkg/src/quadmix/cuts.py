"""
Bottleneck and isoperimetric quantities of a quadrangulation.

Objectives over face sets S with 0 < |S| <= n/2:

* ``theorem3``:    |dS|^{4/3} / |S|
* ``cheeger``:     |dS| / |S|
* ``conductance``: Q(S, S^c) / pi(S) for the lazy face walk, pi(S) <= 1/2

and over vertex sets A with pi(A) <= 1/2:

* ``theorem4``:    |E(A, A^c)|^{4/3} / (4 n pi(A)),  4 n pi(A) = sum of degrees.

Every candidate is ranked by an exact rational key (the cube of the ratio for
the 4/3-power objectives), so comparisons never round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import TooLarge
from .geodesy import distances, face_components, hull_faces
from .maps import Quadrangulation
from .walks import face_kernel, fiedler_vector, vertex_kernel

MAX_EXACT_FACES = 14
MAX_EXACT_VERTICES = 16
FACE_OBJECTIVES = ("theorem3", "cheeger", "conductance")
OBJECTIVES = FACE_OBJECTIVES + ("theorem4",)
KINDS = {"theorem3": "theorem3", "cheeger": "cheeger_dual",
         "conductance": "conductance_dual", "theorem4": "theorem4"}


@dataclass
class CutReport:
    mode: str
    objective: str
    witness: tuple[int, ...]
    cut_size: int
    measure: Fraction
    key: Fraction
    value: float

    @property
    def kind(self) -> str:
        return KINDS[self.objective]

    @property
    def states(self) -> str:
        return "vertex" if self.objective == "theorem4" else "face"


class _Problem:
    """Cut objective on a weighted graph with integer item measures."""

    def __init__(self, objective, n_items, pairs, cut_scale, measures, measure_scale):
        self.objective = objective
        self.n = n_items
        self.pairs = pairs              # (i, j, integer weight), i != j
        self.cut_scale = cut_scale      # true cut = integer cut / cut_scale
        self.measures = np.asarray(measures, dtype=np.int64)
        self.measure_scale = measure_scale
        self.total = int(self.measures.sum())

    def feasible_measure(self, m):
        return 0 < m and 2 * m <= self.total

    def key(self, cut, meas) -> Fraction:
        if self.objective in ("theorem3", "theorem4"):
            return Fraction(cut ** 4, meas ** 3)
        return Fraction(cut * self.measure_scale, self.cut_scale * meas)

    def value(self, cut, meas) -> float:
        if self.objective in ("theorem3", "theorem4"):
            return cut ** (4 / 3) / meas
        return float(self.key(cut, meas))

    def cut_of(self, items) -> int:
        s = set(items)
        return sum(w for i, j, w in self.pairs if (i in s) != (j in s))

    def measure_of(self, items) -> int:
        return int(sum(int(self.measures[i]) for i in items))

    def report(self, items, mode):
        items = tuple(sorted(items))
        cut, meas = self.cut_of(items), self.measure_of(items)
        measure = Fraction(meas, self.measure_scale)
        return CutReport(mode, self.objective, items, cut, measure,
                         self.key(cut, meas), self.value(cut, meas))


def _problem(q: Quadrangulation, objective: str) -> _Problem:
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    if objective == "theorem4":
        pairs = [(int(x), int(y), 1) for x, y in q.map.edge_endpoints if x != y]
        return _Problem(objective, q.n_vertices, pairs, 1, q.degrees, 1)
    if objective == "conductance":
        K = face_kernel(q)
        F = K.state_count
        flows = {}
        for x in range(F):
            for y in np.flatnonzero(K.numer[x]):
                if x < y:
                    flows[(x, int(y))] = K.pi[x] * K.p(x, int(y))
        scale = math.lcm(*(w.denominator for w in flows.values())) if flows else 1
        pairs = [(x, y, int(w * scale)) for (x, y), w in flows.items()]
        pscale = math.lcm(*(p.denominator for p in K.pi))
        return _Problem(objective, F, pairs, scale, [int(p * pscale) for p in K.pi], pscale)
    pairs = [(int(f), int(g), 1) for f, g in q.map.edge_faces if f != g]
    return _Problem(objective, q.n_faces, pairs, 1, np.ones(q.n_faces, dtype=np.int64), 1)


def _mask_items(mask):
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def _best(problem, candidates, mode):
    """Exact minimum over candidate item tuples; ties go to the lexicographically smallest."""
    best = None
    for items in candidates:
        items = tuple(sorted(items))
        meas = problem.measure_of(items)
        if not problem.feasible_measure(meas):
            continue
        k = problem.key(problem.cut_of(items), meas)
        if best is None or k < best[0] or (k == best[0] and items < best[1]):
            best = (k, items)
    if best is None:
        return None
    return problem.report(best[1], mode)


def _exhaust(problem):
    n = problem.n
    masks = np.arange(1, 1 << n, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(np.int64)
    meas = bits @ problem.measures
    cut = np.zeros(len(masks), dtype=np.int64)
    for i, j, w in problem.pairs:
        cut += w * (bits[:, i] ^ bits[:, j])
    ok = (meas > 0) & (2 * meas <= problem.total)
    if not ok.any():
        return []
    c, m = cut[ok].astype(float), meas[ok].astype(float)
    if problem.objective in ("theorem3", "theorem4"):
        approx = c ** 4 / m ** 3
    else:
        approx = c / m
    lo = approx.min()
    near = np.flatnonzero(approx <= lo * (1 + 1e-9) + 1e-300)
    return [_mask_items(int(x)) for x in masks[ok][near]]


def exact_face_bottleneck(q: Quadrangulation, objective="theorem3", connected_only=False):
    """Exact infimum over face sets with 0 < |S| <= n/2; None when no such set exists.

    ``connected_only`` restricts to dual-connected S (used to check that the
    infimum is attained on connected sets).
    """
    if objective not in FACE_OBJECTIVES:
        raise ValueError(f"{objective!r} is not a face objective")
    if q.n_faces > MAX_EXACT_FACES:
        raise TooLarge(f"exact search limited to {MAX_EXACT_FACES} faces")
    problem = _problem(q, objective)
    if not connected_only:
        return _best(problem, _exhaust(problem), "exact")
    cands = []
    for mask in range(1, 1 << problem.n):
        items = _mask_items(mask)
        if 2 * len(items) <= problem.n and len(face_components(q, items)) == 1:
            cands.append(items)
    return _best(problem, cands, "exact")


def dual_conductance(q: Quadrangulation, mode="exact", budget=64, seed=0):
    if mode == "exact":
        return exact_face_bottleneck(q, "conductance")
    return heuristic_bottleneck(q, "conductance", budget, seed)


def vertex_bottleneck(q: Quadrangulation, mode="exact", budget=64, seed=0):
    if mode == "heuristic":
        return heuristic_bottleneck(q, "theorem4", budget, seed)
    if q.n_vertices > MAX_EXACT_VERTICES:
        raise TooLarge(f"exact search limited to {MAX_EXACT_VERTICES} vertices")
    problem = _problem(q, "theorem4")
    return _best(problem, _exhaust(problem), "exact")


def exact_bottleneck(q, objective):
    if objective == "theorem4":
        return vertex_bottleneck(q, "exact")
    return exact_face_bottleneck(q, objective)


# -- heuristic search --------------------------------------------------------

def _sweep(order):
    for k in range(1, len(order)):
        yield order[:k]
        yield order[k:]


def _hull_candidates(q, centers, objective):
    for v in centers:
        dist = distances(q, v)
        ecc = int(dist.max())
        for r in range(1, ecc + 2):
            if objective == "theorem4":
                inner = tuple(int(x) for x in np.flatnonzero(dist <= r - 1))
                yield inner
                yield tuple(int(x) for x in np.flatnonzero(dist > r - 1))
                continue
            rep = hull_faces(q, v, r)
            everything = frozenset(range(q.n_faces))
            for s in (rep.ball, rep.hull, rep.excluded_component):
                yield tuple(s)
                yield tuple(everything - s)


def _local_search(problem, items, rounds):
    """Greedy single-item flips while the key strictly improves."""
    cur = set(items)
    meas = problem.measure_of(cur)
    best = problem.key(problem.cut_of(cur), meas)
    for _ in range(rounds):
        improved = False
        for i in range(problem.n):
            trial = cur ^ {i}
            m = problem.measure_of(trial)
            if not problem.feasible_measure(m):
                continue
            k = problem.key(problem.cut_of(trial), m)
            if k < best or (k == best and tuple(sorted(trial)) < tuple(sorted(cur))):
                cur, best, improved = trial, k, True
        if not improved:
            break
    return tuple(sorted(cur))


def heuristic_bottleneck(q: Quadrangulation, objective="theorem3", budget=64, seed=0):
    """Best cut among spectral sweeps, ball/hull cuts and their local refinements.

    An upper bound on the exact infimum; deterministic in (q, objective, budget, seed).
    """
    problem = _problem(q, objective)
    K = vertex_kernel(q) if objective == "theorem4" else face_kernel(q)
    cands = []
    if K.state_count > 1:
        vec = fiedler_vector(K)
        order = tuple(int(i) for i in np.lexsort((np.arange(len(vec)), vec)))
        cands.extend(_sweep(order))
    cands.extend((i,) for i in range(problem.n))
    if q.n_vertices <= budget:
        centers = list(range(q.n_vertices))
    else:
        rng = np.random.default_rng(seed)
        centers = sorted(int(v) for v in rng.choice(q.n_vertices, size=budget, replace=False))
    cands.extend(_hull_candidates(q, centers, objective))

    first = _best(problem, cands, "heuristic")
    if first is None:
        return None
    # refine the few best distinct candidates
    scored = []
    seen = set()
    for items in cands:
        items = tuple(sorted(set(items)))
        if items in seen:
            continue
        seen.add(items)
        m = problem.measure_of(items)
        if problem.feasible_measure(m):
            scored.append((problem.key(problem.cut_of(items), m), items))
    scored.sort()
    refined = [_local_search(problem, items, rounds=budget) for _, items in scored[:8]]
    return _best(problem, cands + refined, "heuristic")
