"""Distances, balls, hulls and cut sets on finite quadrangulations.

Face sets are frozensets of face indices.  A face is incident to a vertex when
the vertex is one of its corners.
"""

from __future__ import annotations

import csv
import io
import math
from collections import deque

import numpy as np

from .errors import InvalidRadius
from .maps import Quadrangulation


def distances(q: Quadrangulation, v: int) -> np.ndarray:
    return multi_source_distances(q, [v])


def multi_source_distances(q: Quadrangulation, sources) -> np.ndarray:
    adj = q.adjacency
    dist = np.full(q.n_vertices, -1, dtype=np.int64)
    queue = deque()
    for s in sources:
        if dist[s] < 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def eccentricity(q: Quadrangulation, v: int) -> int:
    return int(distances(q, v).max())


def ball_faces(q: Quadrangulation, v: int, r: int) -> frozenset:
    """Faces having a corner at distance <= r - 1 from v."""
    if r < 1:
        raise InvalidRadius(f"radius must be >= 1, got {r}")
    dist = distances(q, v)
    return frozenset(f for f, corners in enumerate(q.face_vertices)
                     if min(dist[x] for x in corners) <= r - 1)


def face_components(q: Quadrangulation, faces) -> list[frozenset]:
    """Components of ``faces`` under edge adjacency in the dual, ordered by smallest face."""
    faces = set(faces)
    s = q.face_adjacency
    comps = []
    for start in sorted(faces):
        if any(start in c for c in comps):
            continue
        comp = {start}
        stack = [start]
        while stack:
            f = stack.pop()
            for g in np.flatnonzero(s[f]):
                g = int(g)
                if g in faces and g not in comp:
                    comp.add(g)
                    stack.append(g)
        comps.append(frozenset(comp))
    return comps


class BallReport:
    def __init__(self, center, radius, ball, hull, excluded_component):
        self.center = center
        self.radius = radius
        self.ball = ball
        self.hull = hull
        self.excluded_component = excluded_component

    def __repr__(self):
        return (f"BallReport(center={self.center}, r={self.radius}, |ball|={len(self.ball)}, "
                f"|hull|={len(self.hull)}, |excluded|={len(self.excluded_component)})")


def hull_faces(q: Quadrangulation, v: int, r: int) -> BallReport:
    """Ball plus every complement component except the one with most faces.

    Ties go to the component whose smallest face index is smallest.
    """
    ball = ball_faces(q, v, r)
    rest = set(range(q.n_faces)) - ball
    comps = face_components(q, rest)
    if not comps:
        return BallReport(v, r, ball, frozenset(range(q.n_faces)), frozenset())
    excluded = min(comps, key=lambda c: (-len(c), min(c)))
    hull = frozenset(range(q.n_faces)) - excluded
    return BallReport(v, r, ball, hull, excluded)


def boundary_edges(q: Quadrangulation, S) -> list[int]:
    """Edges with a face of S on one side and a face outside S on the other."""
    S = set(S)
    return [e for e, (f, g) in enumerate(q.map.edge_faces) if (f in S) != (g in S)]


def vertex_cut(q: Quadrangulation, A) -> list[int]:
    """Edges with exactly one endpoint in A, parallel edges listed separately."""
    A = set(A)
    return [e for e, (x, y) in enumerate(q.map.edge_endpoints) if (x in A) != (y in A)]


def contour_cover(pq, R: int, k: int | None = None):
    """Centers every ``k`` corners along the tree contour and whether their R-balls cover.

    With ``k=None`` the spacing starts at the number of corners and is halved
    until the cover holds.  Returns ``(centers, verified, k)``.
    """
    n_corners = len(pq.corner_vertex)
    adaptive = k is None
    if adaptive:
        k = n_corners
    if k < 1:
        raise ValueError("spacing must be >= 1")
    while True:
        centers = [pq.corner_vertex[k * i] for i in range(math.ceil(n_corners / k))]
        dist = multi_source_distances(pq.quad, centers)
        verified = bool(np.all((dist >= 0) & (dist <= R)))
        if verified or not adaptive or k == 1:
            return centers, verified, k
        k = max(1, k // 2)


def index_list(items) -> str:
    return " ".join(str(i) for i in sorted(items))


def to_csv_rows(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
