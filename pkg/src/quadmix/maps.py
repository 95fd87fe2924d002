"""
Rooted planar maps encoded as permutation systems on darts.

A map on ``2E`` darts is given by

* ``alpha``: the fixed-point-free involution pairing the two darts of an edge,
* ``sigma``: the counterclockwise successor of a dart around its origin vertex,

and a root dart.  The face permutation is ``phi = sigma o alpha``, i.e.
``phi[d] = sigma[alpha[d]]``: leave along ``d``, then turn at the far end.
Every dart is identified with the corner at its origin lying in its
``phi``-cycle, which is how faces become incident to vertices.
"""

from __future__ import annotations

import hashlib
from collections import deque
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    Disconnected,
    FixedPointInAlpha,
    NonPlanar,
    NotInvolution,
    NotPermutation,
    NotQuadrangulation,
    ParseError,
)


def _cycle_ids(perm: Sequence[int]) -> tuple[list[int], int]:
    """Label each element by its cycle, cycles numbered by smallest element."""
    n = len(perm)
    ids = [-1] * n
    count = 0
    for start in range(n):
        if ids[start] >= 0:
            continue
        d = start
        while ids[d] < 0:
            ids[d] = count
            d = perm[d]
        count += 1
    return ids, count


class PlanarMap:
    """Immutable rooted planar map.  Build through :func:`validate_map`."""

    __slots__ = ("alpha", "sigma", "root_dart", "__dict__")

    def __init__(self, alpha, sigma, root_dart):
        self.alpha = tuple(alpha)
        self.sigma = tuple(sigma)
        self.root_dart = int(root_dart)

    @property
    def dart_count(self) -> int:
        return len(self.alpha)

    @property
    def n_edges(self) -> int:
        return len(self.alpha) // 2

    @cached_property
    def phi(self) -> tuple[int, ...]:
        s, a = self.sigma, self.alpha
        return tuple(s[a[d]] for d in range(len(a)))

    @cached_property
    def _vertex_ids(self):
        return _cycle_ids(self.sigma)

    @cached_property
    def _face_ids(self):
        return _cycle_ids(self.phi)

    @property
    def vertex_of(self) -> list[int]:
        """Origin vertex index of every dart."""
        return self._vertex_ids[0]

    @property
    def face_of(self) -> list[int]:
        return self._face_ids[0]

    @property
    def n_vertices(self) -> int:
        return self._vertex_ids[1]

    @property
    def n_faces(self) -> int:
        return self._face_ids[1]

    @property
    def root_vertex(self) -> int:
        return self.vertex_of[self.root_dart]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.bincount(self.vertex_of, minlength=self.n_vertices)

    @cached_property
    def face_degrees(self) -> np.ndarray:
        return np.bincount(self.face_of, minlength=self.n_faces)

    @cached_property
    def edges(self) -> list[tuple[int, int]]:
        """Edges as ``(d, alpha[d])`` with ``d < alpha[d]``, ordered by ``d``."""
        return [(d, a) for d, a in enumerate(self.alpha) if d < a]

    @cached_property
    def edge_of(self) -> list[int]:
        out = [0] * self.dart_count
        for i, (d, a) in enumerate(self.edges):
            out[d] = out[a] = i
        return out

    @cached_property
    def edge_endpoints(self) -> np.ndarray:
        v = self.vertex_of
        return np.array([(v[d], v[a]) for d, a in self.edges], dtype=np.int64).reshape(-1, 2)

    @cached_property
    def edge_faces(self) -> np.ndarray:
        """Faces on the two sides of each edge."""
        f = self.face_of
        return np.array([(f[d], f[a]) for d, a in self.edges], dtype=np.int64).reshape(-1, 2)

    def vertex_darts(self, v: int) -> list[int]:
        """Darts around ``v`` in rotation order."""
        start = self.vertex_of.index(v)
        out = [start]
        d = self.sigma[start]
        while d != start:
            out.append(d)
            d = self.sigma[d]
        return out

    def face_darts(self, f: int) -> list[int]:
        start = self.face_of.index(f)
        out = [start]
        d = self.phi[start]
        while d != start:
            out.append(d)
            d = self.phi[d]
        return out

    def __eq__(self, other):
        if not isinstance(other, PlanarMap):
            return NotImplemented
        return (self.alpha == other.alpha and self.sigma == other.sigma
                and self.root_dart == other.root_dart)

    def __hash__(self):
        return hash((self.alpha, self.sigma, self.root_dart))

    def __repr__(self):
        return (f"PlanarMap(darts={self.dart_count}, V={self.n_vertices}, "
                f"E={self.n_edges}, F={self.n_faces}, root={self.root_dart})")


def _check_permutation(name, perm, n):
    if len(perm) != n:
        raise NotPermutation(f"{name} has length {len(perm)}, expected {n}")
    seen = [False] * n
    for x in perm:
        if not (isinstance(x, (int, np.integer)) and 0 <= x < n) or seen[x]:
            raise NotPermutation(f"{name} is not a permutation of 0..{n - 1}")
        seen[x] = True


def validate_map(dart_count, alpha, sigma, root_dart) -> PlanarMap:
    """Check the permutation system and return a :class:`PlanarMap`.

    Raises NotInvolution, FixedPointInAlpha, Disconnected or NonPlanar.
    """
    n = int(dart_count)
    if n <= 0 or n % 2:
        raise NotInvolution(f"dart count must be positive and even, got {n}")
    alpha = [int(x) for x in alpha]
    sigma = [int(x) for x in sigma]
    _check_permutation("alpha", alpha, n)
    _check_permutation("sigma", sigma, n)
    for d in range(n):
        if alpha[d] == d:
            raise FixedPointInAlpha(f"alpha fixes dart {d}")
        if alpha[alpha[d]] != d:
            raise NotInvolution(f"alpha(alpha({d})) != {d}")
    if not 0 <= int(root_dart) < n:
        raise NotPermutation(f"root dart {root_dart} out of range")

    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    reached = 1
    while queue:
        d = queue.popleft()
        for e in (alpha[d], sigma[d]):
            if not seen[e]:
                seen[e] = True
                reached += 1
                queue.append(e)
    if reached != n:
        raise Disconnected(f"only {reached} of {n} darts reachable")

    m = PlanarMap(alpha, sigma, root_dart)
    chi = m.n_vertices - m.n_edges + m.n_faces
    if chi != 2:
        raise NonPlanar(f"Euler characteristic {chi} != 2")
    return m


def dual(m: PlanarMap) -> PlanarMap:
    """Dual map on the same darts: vertex rotation becomes ``phi``.

    With this convention ``dual(dual(m)) == m`` exactly.
    """
    return PlanarMap(m.alpha, m.phi, m.root_dart)


def canonical_relabelling(m: PlanarMap) -> list[int]:
    """First-visit rank of each dart in a BFS from the root over (alpha, sigma)."""
    n = m.dart_count
    rank = [-1] * n
    rank[m.root_dart] = 0
    queue = deque([m.root_dart])
    nxt = 1
    while queue:
        d = queue.popleft()
        for e in (m.alpha[d], m.sigma[d]):
            if rank[e] < 0:
                rank[e] = nxt
                nxt += 1
                queue.append(e)
    return rank


def canonical_code(m: PlanarMap) -> bytes:
    """Byte string equal for two maps iff they are root-preservingly isomorphic."""
    rank = canonical_relabelling(m)
    n = m.dart_count
    a = [0] * n
    s = [0] * n
    for d in range(n):
        a[rank[d]] = rank[m.alpha[d]]
        s[rank[d]] = rank[m.sigma[d]]
    return np.array([n] + a + s, dtype="<u4").tobytes()


def code_hash(code: bytes) -> str:
    """Short stable hex digest of a canonical code."""
    return hashlib.blake2b(code, digest_size=8).hexdigest()


def relabel(m: PlanarMap, perm: Sequence[int]) -> PlanarMap:
    """Rename dart ``d`` to ``perm[d]``."""
    n = m.dart_count
    a = [0] * n
    s = [0] * n
    for d in range(n):
        a[perm[d]] = perm[m.alpha[d]]
        s[perm[d]] = perm[m.sigma[d]]
    return PlanarMap(a, s, perm[m.root_dart])


def reroot(m: PlanarMap, dart: int) -> PlanarMap:
    return PlanarMap(m.alpha, m.sigma, dart)


# -- QMAP v1 text format -----------------------------------------------------

def encode_qmap(m: PlanarMap) -> str:
    return "".join([
        "QMAP 1\n",
        f"darts {m.dart_count}\n",
        "alpha " + " ".join(map(str, m.alpha)) + "\n",
        "sigma " + " ".join(map(str, m.sigma)) + "\n",
        f"root {m.root_dart}\n",
    ])


def _parse_ints(tokens, lineno):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError("expected decimal integers", lineno) from None


def decode_qmap(text: str) -> PlanarMap:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) != 5:
        raise ParseError(f"expected 5 lines, got {len(lines)}", min(len(lines) + 1, 6))
    if lines[0].strip() != "QMAP 1":
        raise ParseError("missing 'QMAP 1' header", 1)

    def field(lineno, key):
        parts = lines[lineno - 1].split()
        if not parts or parts[0] != key:
            raise ParseError(f"expected '{key}' line", lineno)
        return parts[1:]

    count = field(2, "darts")
    if len(count) != 1:
        raise ParseError("darts line takes one integer", 2)
    n = _parse_ints(count, 2)[0]
    alpha = _parse_ints(field(3, "alpha"), 3)
    if len(alpha) != n:
        raise ParseError(f"alpha has {len(alpha)} entries, expected {n}", 3)
    sigma = _parse_ints(field(4, "sigma"), 4)
    if len(sigma) != n:
        raise ParseError(f"sigma has {len(sigma)} entries, expected {n}", 4)
    root = field(5, "root")
    if len(root) != 1:
        raise ParseError("root line takes one integer", 5)
    return validate_map(n, alpha, sigma, _parse_ints(root, 5)[0])


def read_qmap(path) -> PlanarMap:
    with open(path, encoding="ascii", newline="") as fh:
        return decode_qmap(fh.read())


def write_qmap(m: PlanarMap, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(encode_qmap(m))


# -- quadrangulations --------------------------------------------------------

class Quadrangulation:
    """A planar map all of whose faces have degree 4."""

    def __init__(self, m: PlanarMap, check: bool = True):
        if check:
            bad = [f for f, k in enumerate(m.face_degrees) if k != 4]
            if bad:
                raise NotQuadrangulation(f"face {bad[0]} has degree {m.face_degrees[bad[0]]}")
        self.map = m
        self.n_faces = m.n_faces

    @property
    def n_vertices(self) -> int:
        return self.map.n_vertices

    @property
    def n_edges(self) -> int:
        return self.map.n_edges

    @property
    def root_vertex(self) -> int:
        return self.map.root_vertex

    @property
    def degrees(self) -> np.ndarray:
        return self.map.degrees

    @cached_property
    def code(self) -> bytes:
        return canonical_code(self.map)

    @cached_property
    def adjacency(self) -> list[list[int]]:
        """Neighbour list per vertex, one entry per incident dart (loops twice)."""
        m = self.map
        v = m.vertex_of
        out = [[] for _ in range(m.n_vertices)]
        for d in range(m.dart_count):
            out[v[d]].append(v[m.alpha[d]])
        return out

    @cached_property
    def multiplicity(self) -> np.ndarray:
        """``mult[x, y]`` = number of edges joining x and y (loops on the diagonal)."""
        V = self.n_vertices
        mult = np.zeros((V, V), dtype=np.int64)
        for x, y in self.map.edge_endpoints:
            if x == y:
                mult[x, x] += 1
            else:
                mult[x, y] += 1
                mult[y, x] += 1
        return mult

    @cached_property
    def face_vertices(self) -> list[tuple[int, ...]]:
        """Corner vertices of each face in ``phi`` order."""
        m = self.map
        v = m.vertex_of
        out = [None] * m.n_faces
        for f in range(m.n_faces):
            out[f] = tuple(v[d] for d in m.face_darts(f))
        return out

    @cached_property
    def face_adjacency(self) -> np.ndarray:
        """``s[f, g]`` = number of sides shared by faces f and g (self-sides on diagonal)."""
        F = self.n_faces
        s = np.zeros((F, F), dtype=np.int64)
        for f, g in self.map.edge_faces:
            if f == g:
                s[f, f] += 2
            else:
                s[f, g] += 1
                s[g, f] += 1
        return s

    def is_bipartite(self) -> bool:
        from .geodesy import distances
        dist = distances(self, self.root_vertex)
        ends = self.map.edge_endpoints
        return bool(np.all((dist[ends[:, 0]] + dist[ends[:, 1]]) % 2 == 1))

    def __repr__(self):
        return f"Quadrangulation(faces={self.n_faces}, vertices={self.n_vertices})"


def as_quadrangulation(m) -> Quadrangulation:
    if isinstance(m, Quadrangulation):
        return m
    return Quadrangulation(m)
