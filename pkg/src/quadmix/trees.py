"""
Labeled plane trees, the Cori-Vauquelin-Schaeffer bijection, and the
"trivial" bijection between quadrangulations and general planar maps.

Trees are stored by their contour word (``+1`` for a step away from the
root, ``-1`` for a step back) and one label increment in {-1, 0, +1} per edge,
edges listed in the order their up-steps occur.  Vertex 0 is the root; other
vertices are numbered in preorder.  Corner ``c_i`` is the corner at the
vertex occupied just before step ``i``; ``c_0`` sits at the root, before the
first edge.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

import numpy as np

from .errors import InvalidSize, ParseError, TooLarge
from .maps import PlanarMap, Quadrangulation, canonical_code, validate_map


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True)
class LabeledPlaneTree:
    word: tuple[int, ...]
    increments: tuple[int, ...]

    def __post_init__(self):
        n = len(self.increments)
        if len(self.word) != 2 * n:
            raise ValueError("contour word must have length 2n")
        h = 0
        for s in self.word:
            if s not in (1, -1):
                raise ValueError("contour steps must be +1 or -1")
            h += s
            if h < 0:
                raise ValueError("contour word is not a Dyck word")
        if h != 0:
            raise ValueError("contour word is not balanced")
        if any(i not in (-1, 0, 1) for i in self.increments):
            raise ValueError("label increments must lie in {-1, 0, 1}")

    @property
    def n_edges(self) -> int:
        return len(self.increments)

    @cached_property
    def _structure(self):
        n = self.n_edges
        parent = [-1] * (n + 1)
        labels = [0] * (n + 1)
        contour = []
        cur = 0
        nxt = 1
        for s in self.word:
            contour.append(cur)
            if s == 1:
                parent[nxt] = cur
                labels[nxt] = labels[cur] + self.increments[nxt - 1]
                cur = nxt
                nxt += 1
            else:
                cur = parent[cur]
        return parent, labels, contour

    @property
    def parent(self) -> list[int]:
        return self._structure[0]

    @property
    def labels(self) -> list[int]:
        """Vertex labels; the root has label 0."""
        return self._structure[1]

    @property
    def contour(self) -> list[int]:
        """Vertex carrying each corner ``c_0 .. c_{2n-1}``."""
        return self._structure[2]

    @cached_property
    def corner_labels(self) -> list[int]:
        lab = self.labels
        return [lab[v] for v in self.contour]

    def children(self, v: int) -> list[int]:
        return [u for u in range(1, self.n_edges + 1) if self.parent[u] == v]

    def to_text(self) -> str:
        """Parenthesis word and increments, one line each."""
        paren = "".join("(" if s == 1 else ")" for s in self.word)
        return paren + "\n" + " ".join(str(i) for i in self.increments) + "\n"

    @classmethod
    def from_text(cls, text: str) -> LabeledPlaneTree:
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if len(lines) not in (1, 2):
            raise ParseError("expected a word line and an increments line")
        word = []
        for ch in lines[0].strip():
            if ch not in "()":
                raise ParseError(f"unexpected character {ch!r}", 1)
            word.append(1 if ch == "(" else -1)
        incs = lines[1].split() if len(lines) > 1 else []
        try:
            increments = tuple(int(t) for t in incs)
        except ValueError:
            raise ParseError("increments must be integers", 2) from None
        try:
            return cls(tuple(word), increments)
        except ValueError as exc:
            raise ParseError(str(exc)) from None


def sample_labeled_tree(n: int, seed=None) -> LabeledPlaneTree:
    """Uniform element of the 3^n Cat(n) labeled plane trees with n edges."""
    if n < 1:
        raise InvalidSize(f"tree size must be >= 1, got {n}")
    rng = _rng(seed)
    steps = np.array([1] * n + [-1] * (n + 1), dtype=np.int64)
    rng.shuffle(steps)
    # cycle lemma: start right after the first minimum of the prefix sums
    start = int(np.argmin(np.cumsum(steps))) + 1
    word = np.roll(steps, -start)[:-1]
    increments = rng.integers(-1, 2, size=n)
    return LabeledPlaneTree(tuple(int(s) for s in word), tuple(int(i) for i in increments))


def dyck_words(n: int) -> Iterator[tuple[int, ...]]:
    def rec(prefix, up, height):
        if len(prefix) == 2 * n:
            yield tuple(prefix)
            return
        if up < n:
            prefix.append(1)
            yield from rec(prefix, up + 1, height + 1)
            prefix.pop()
        if height > 0:
            prefix.append(-1)
            yield from rec(prefix, up, height - 1)
            prefix.pop()
    yield from rec([], 0, 0)


def all_labeled_trees(n: int) -> Iterator[LabeledPlaneTree]:
    for word in dyck_words(n):
        for incs in itertools.product((-1, 0, 1), repeat=n):
            yield LabeledPlaneTree(word, incs)


# -- CVS bijection -----------------------------------------------------------

def successors(corner_labels) -> list[int]:
    """For each corner, the first later corner (cyclically) with label one less; -1 for the apex."""
    m = len(corner_labels)
    succ = [-1] * m
    waiting: dict[int, list[int]] = {}
    for j in range(2 * m):
        i = j % m
        lab = corner_labels[i]
        pending = waiting.pop(lab, None)
        if pending:
            for c in pending:
                succ[c] = i
        if j < m:
            waiting.setdefault(lab - 1, []).append(i)
    return succ


@dataclass
class PointedQuadrangulation:
    quad: Quadrangulation
    pointed_vertex: int
    tree: LabeledPlaneTree
    theta: int
    corner_vertex: list[int] = field(repr=False)
    tree_vertex: list[int] = field(repr=False)

    def label_distance(self) -> np.ndarray:
        """Distance from the pointed vertex predicted by the labels, per map vertex."""
        labels = self.tree.labels
        shift = 1 - min(labels)
        out = np.zeros(self.quad.n_vertices, dtype=np.int64)
        for tv, qv in enumerate(self.tree_vertex):
            out[qv] = labels[tv] + shift
        return out


def cvs_forward(t: LabeledPlaneTree, theta: int = 1) -> PointedQuadrangulation:
    """Rooted pointed quadrangulation with ``t.n_edges`` faces built from ``t``.

    Corner ``i`` emits the arc towards its successor; dart ``2i`` leaves the
    corner, dart ``2i + 1`` is its reverse.  The root is the arc of ``c_0``,
    pointing towards the tree root when ``theta == +1``.
    """
    if theta not in (1, -1):
        raise ValueError("theta must be +1 or -1")
    n = t.n_edges
    m = 2 * n
    L = t.corner_labels
    succ = successors(L)

    def side(a):
        b = (a + 1) % m
        if L[b] == L[a] - 1:
            return [2 * a]
        if L[b] == L[a]:
            return [2 * a, 2 * b + 1]
        return [2 * a, 2 * succ[b] + 1, 2 * b + 1]

    alpha = [d ^ 1 for d in range(2 * m)]
    phi = [0] * (2 * m)
    open_steps = []
    for a, s in enumerate(t.word):
        if s == 1:
            open_steps.append(a)
            continue
        face = side(open_steps.pop()) + side(a)
        for k, d in enumerate(face):
            phi[d] = face[(k + 1) % 4]
    sigma = [phi[alpha[d]] for d in range(2 * m)]
    root = 1 if theta == 1 else 0
    pm = validate_map(2 * m, alpha, sigma, root)
    quad = Quadrangulation(pm)

    vof = pm.vertex_of
    corner_vertex = [vof[2 * i] for i in range(m)]
    tree_vertex = [0] * (n + 1)
    for i, tv in enumerate(t.contour):
        tree_vertex[tv] = corner_vertex[i]
    apex = vof[2 * succ.index(-1) + 1]
    return PointedQuadrangulation(quad, apex, t, theta, corner_vertex, tree_vertex)


def sample_pointed_quadrangulation(n_faces: int, seed=None) -> PointedQuadrangulation:
    if n_faces < 1:
        raise InvalidSize(f"quadrangulation size must be >= 1, got {n_faces}")
    rng = _rng(seed)
    t = sample_labeled_tree(n_faces, rng)
    theta = 1 if rng.integers(0, 2) else -1
    return cvs_forward(t, theta)


def sample_quadrangulation(n_faces: int, seed=None) -> Quadrangulation:
    """Uniform rooted quadrangulation with ``n_faces`` faces."""
    return sample_pointed_quadrangulation(n_faces, seed).quad


def enumerate_quadrangulations(n: int) -> set[bytes]:
    """Canonical codes of all rooted quadrangulations with n faces (n <= 4)."""
    if n < 1:
        raise InvalidSize(f"n must be >= 1, got {n}")
    if n > 4:
        raise TooLarge(f"exhaustive enumeration limited to n <= 4, got {n}")
    codes = set()
    for t in all_labeled_trees(n):
        for theta in (1, -1):
            codes.add(canonical_code(cvs_forward(t, theta).quad.map))
    return codes


def quadrangulations_from_codes(codes) -> list[Quadrangulation]:
    """Rebuild maps from canonical codes (sorted for determinism)."""
    out = []
    for code in sorted(codes):
        arr = np.frombuffer(code, dtype="<u4")
        n = int(arr[0])
        alpha, sigma = arr[1:1 + n].tolist(), arr[1 + n:].tolist()
        out.append(Quadrangulation(validate_map(n, alpha, sigma, 0)))
    return out


# -- trivial bijection -------------------------------------------------------

def vertex_colours(q: Quadrangulation) -> np.ndarray:
    """0 (white) for vertices at even distance from the root vertex, 1 (black) otherwise."""
    from .geodesy import distances
    return distances(q, q.root_vertex) % 2


def trivial_bijection(q: Quadrangulation) -> PlanarMap:
    """Planar map with n edges on the white vertices of ``q``.

    Each face gets the diagonal joining its two white corners.  A dart of the
    new map is a dart of ``q`` leaving a white vertex; its partner is the other
    white corner of the same face (``phi^2``), and rotations are inherited from
    ``q``.  The root dart of ``q`` leaves the (white) root vertex and is kept.
    """
    m = q.map
    colour = vertex_colours(q)
    vof = m.vertex_of
    white = [d for d in range(m.dart_count) if colour[vof[d]] == 0]
    index = {d: i for i, d in enumerate(white)}
    phi = m.phi
    alpha = [index[phi[phi[d]]] for d in white]
    sigma = [index[m.sigma[d]] for d in white]
    return validate_map(len(white), alpha, sigma, index[m.root_dart])


def black_vertex_faces(q: Quadrangulation, M: PlanarMap) -> dict[int, int]:
    """Face of ``M = trivial_bijection(q)`` containing each black vertex of ``q``.

    The face of the diagonal dart ``d`` contains the black corner preceding
    ``d`` in its face of ``q``.
    """
    m = q.map
    colour = vertex_colours(q)
    vof = m.vertex_of
    phi = m.phi
    white = [d for d in range(m.dart_count) if colour[vof[d]] == 0]
    out = {}
    for i, d in enumerate(white):
        out[vof[phi[phi[phi[d]]]]] = M.face_of[i]
    return out


def pointed_code(pq: PointedQuadrangulation) -> tuple[bytes, int]:
    """Canonical code together with a canonical name for the pointed vertex."""
    from .maps import canonical_relabelling
    m = pq.quad.map
    rank = canonical_relabelling(m)
    key = min(rank[d] for d in range(m.dart_count) if m.vertex_of[d] == pq.pointed_vertex)
    return canonical_code(m), key
