"""
Lazy random walks on the vertices and faces of a quadrangulation, and the
three mixing measurements (uniform, total variation, relaxation).

Kernels are held exactly as integer numerators over a per-row denominator;
the floating-point matrix is derived from them.  Matrix powers are computed
in double precision with row renormalisation after each product.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import NotErgodic, NumericInstability, RequiresLaziness
from .maps import PlanarMap, Quadrangulation

# slack for comparing a floating-point distance against the threshold; an
# exact tie counts as "<= eps" but not as "< eps"
THRESHOLD_SLACK = 1e-10
MAX_DOUBLINGS = 60


class WalkKernel:
    """Finite lazy reversible kernel ``p(x, y) = numer[x, y] / denom[x]``."""

    def __init__(self, numer, denom, pi, tag):
        self.numer = np.asarray(numer, dtype=np.int64)
        self.denom = np.asarray(denom, dtype=np.int64)
        self.pi = [Fraction(p) for p in pi]
        self.tag = tag

    @property
    def state_count(self) -> int:
        return len(self.denom)

    def p(self, x, y) -> Fraction:
        return Fraction(int(self.numer[x, y]), int(self.denom[x]))

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.numer / self.denom[:, None]

    @cached_property
    def pi_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.pi])

    def is_lazy(self) -> bool:
        return bool(np.all(2 * np.diag(self.numer) >= self.denom))

    def check_exact(self) -> None:
        """Assert stochasticity, laziness, detailed balance and ``pi P = pi`` in rationals."""
        n = self.state_count
        if not np.array_equal(self.numer.sum(axis=1), self.denom):
            raise AssertionError("rows do not sum to 1")
        if not self.is_lazy():
            raise AssertionError("kernel is not lazy")
        if sum(self.pi) != 1:
            raise AssertionError("pi does not sum to 1")
        for x in range(n):
            for y in np.flatnonzero(self.numer[x]):
                if self.pi[x] * self.p(x, y) != self.pi[y] * self.p(y, x):
                    raise AssertionError(f"detailed balance fails at ({x}, {y})")
        for y in range(n):
            total = sum((self.pi[x] * self.p(x, y) for x in np.flatnonzero(self.numer[:, y])),
                        Fraction(0))
            if total != self.pi[y]:
                raise AssertionError(f"pi P != pi at state {y}")

    def __repr__(self):
        return f"WalkKernel({self.tag}, states={self.state_count})"


def _lazy_kernel(counts, self_steps, degrees, pi, tag) -> WalkKernel:
    # one uniform step among `degrees[x]` exits, held with probability 1/2;
    # exits leading back to x count as holding
    numer = np.array(counts, dtype=np.int64)
    np.fill_diagonal(numer, 0)
    deg = np.asarray(degrees, dtype=np.int64)
    numer[np.diag_indices_from(numer)] = deg + np.asarray(self_steps, dtype=np.int64)
    return WalkKernel(numer, 2 * deg, pi, tag)


def vertex_kernel(q) -> WalkKernel:
    """Lazy walk on vertices: hold with probability 1/2, else cross a uniform incident edge."""
    m = q.map if isinstance(q, Quadrangulation) else q
    V = m.n_vertices
    mult = np.zeros((V, V), dtype=np.int64)
    loops = np.zeros(V, dtype=np.int64)
    for x, y in m.edge_endpoints:
        if x == y:
            loops[x] += 1
        else:
            mult[x, y] += 1
            mult[y, x] += 1
    deg = m.degrees
    total = int(deg.sum())
    pi = [Fraction(int(d), total) for d in deg]
    return _lazy_kernel(mult, 2 * loops, deg, pi, "vertex")


def face_kernel(q: Quadrangulation) -> WalkKernel:
    """Lazy walk on faces: hold with probability 1/2, else cross one of the 4 sides."""
    s = q.face_adjacency
    F = q.n_faces
    pi = [Fraction(1, F)] * F
    return _lazy_kernel(s, np.diag(s), np.full(F, 4), pi, "face")


# -- measurements ------------------------------------------------------------

def uniform_distance(M: np.ndarray, pi: np.ndarray) -> float:
    return float(np.max(np.abs(M / pi[None, :] - 1.0)))


def tv_distance(M: np.ndarray, pi: np.ndarray, norm: str = "half") -> float:
    """Worst-row total variation; ``norm="l1"`` drops the factor 1/2."""
    if norm not in ("half", "l1"):
        raise ValueError("norm must be 'half' or 'l1'")
    scale = 0.5 if norm == "half" else 1.0
    return float(scale * np.max(np.abs(M - pi[None, :]).sum(axis=1)))


def _mul(A, B):
    C = A @ B
    C /= C.sum(axis=1, keepdims=True)
    return C


def _first_time(P, good, start):
    """Smallest k >= start with ``good(P^k)``, assuming monotonicity in k."""
    n = P.shape[0]
    if start == 0 and good(np.eye(n)):
        return 0
    powers = [P]
    if good(P):
        return 1
    while not good(powers[-1]):
        if len(powers) > MAX_DOUBLINGS:
            raise NumericInstability("no crossing found within 2^60 steps")
        powers.append(_mul(powers[-1], powers[-1]))
    j = len(powers) - 1
    cur = powers[j - 1]
    k = 1 << (j - 1)
    for i in range(j - 2, -1, -1):
        cand = _mul(cur, powers[i])
        if not good(cand):
            cur = cand
            k += 1 << i
    # cur = P^k fails, P^(k+1) passes; re-verify a short window past the crossing
    M = cur
    for step in range(6):
        M = _mul(M, P)
        if not good(M):
            raise NumericInstability(f"condition fails again at k={k + 1 + step}")
    return k + 1


def _require_lazy(K: WalkKernel):
    if not K.is_lazy():
        raise RequiresLaziness("mixing-time search needs p(x, x) >= 1/2")


def uniform_mixing_time(K: WalkKernel, eps: float) -> int:
    """Smallest k >= 0 with max |p^k(x, y) / pi(y) - 1| <= eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    _require_lazy(K)
    pi = K.pi_array
    return _first_time(K.matrix, lambda M: uniform_distance(M, pi) <= eps + THRESHOLD_SLACK, 0)


def tv_mixing_time(K: WalkKernel, eps: float, norm: str = "half") -> int:
    """Smallest n >= 1 with max_x d_TV(P^n(x, .), pi) < eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    _require_lazy(K)
    pi = K.pi_array
    return _first_time(K.matrix, lambda M: tv_distance(M, pi, norm) < eps - THRESHOLD_SLACK, 1)


def _connected(K: WalkKernel) -> bool:
    n = K.state_count
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    stack = [0]
    while stack:
        x = stack.pop()
        for y in np.flatnonzero(K.numer[x]):
            if not seen[y]:
                seen[y] = True
                stack.append(y)
    return bool(seen.all())


def relaxation_time(K: WalkKernel) -> tuple[float, float]:
    """Second-largest eigenvalue and ``1 / (1 - lambda2)``."""
    if K.state_count == 1:
        return 0.0, 1.0
    if not _connected(K):
        raise NotErgodic("kernel has more than one communicating class")
    vals = np.linalg.eigvalsh(_symmetrized(K))
    lam2 = float(vals[-2])
    return lam2, 1.0 / (1.0 - lam2)


def _symmetrized(K: WalkKernel) -> np.ndarray:
    r = np.sqrt(K.pi_array)
    S = r[:, None] * K.matrix / r[None, :]
    return 0.5 * (S + S.T)


def fiedler_vector(K: WalkKernel) -> np.ndarray:
    """Eigenvector of P for lambda2 (right eigenvector, unnormalised)."""
    vals, vecs = np.linalg.eigh(_symmetrized(K))
    return vecs[:, -2] / np.sqrt(K.pi_array)


@dataclass
class MixingReport:
    epsilon: float
    tau_uniform: int
    tau_tv: int
    tau_rel: float
    lambda2: float
    chain: str
    map_id: str = ""
    seed: int | None = None

    def as_dict(self):
        return asdict(self)


def measure(K: WalkKernel, eps: float = 0.5, map_id: str = "", seed=None) -> MixingReport:
    lam2, rel = relaxation_time(K)
    return MixingReport(eps, uniform_mixing_time(K, eps), tv_mixing_time(K, eps),
                        rel, lam2, K.tag, map_id, seed)
