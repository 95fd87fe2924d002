import collections
import math

import numpy as np
import pytest
from scipy.stats import chi2

from quadmix.errors import InvalidSize, ParseError, TooLarge
from quadmix.geodesy import distances
from quadmix.maps import canonical_code
from quadmix.trees import (LabeledPlaneTree, all_labeled_trees, black_vertex_faces, cvs_forward,
                           enumerate_quadrangulations, pointed_code, sample_labeled_tree,
                           sample_pointed_quadrangulation, sample_quadrangulation, successors,
                           trivial_bijection, vertex_colours)


def chi2_passes(counts, k, total, alpha=0.01):
    expected = total / k
    stat = sum((c - expected) ** 2 / expected for c in counts) + (k - len(counts)) * expected
    return stat <= chi2.ppf(1 - alpha, k - 1)


def test_invalid_size():
    with pytest.raises(InvalidSize):
        sample_labeled_tree(0)
    with pytest.raises(InvalidSize):
        sample_quadrangulation(0)


def test_tree_n1_uniform():
    rng = np.random.default_rng(11)
    c = collections.Counter(sample_labeled_tree(1, rng).increments for _ in range(30000))
    assert set(c) == {(-1,), (0,), (1,)}
    assert chi2_passes(c.values(), 3, 30000)


def test_tree_n2_support():
    assert len(set(all_labeled_trees(2))) == 18
    rng = np.random.default_rng(1)
    seen = {sample_labeled_tree(2, rng) for _ in range(3000)}
    assert len(seen) == 18


def test_tree_invariants():
    for seed in range(200):
        t = sample_labeled_tree(25, seed)
        assert t.labels[0] == 0
        for v in range(1, t.n_edges + 1):
            assert abs(t.labels[v] - t.labels[t.parent[v]]) <= 1
        assert len(t.contour) == 2 * t.n_edges


def test_tree_determinism():
    assert sample_labeled_tree(40, 9) == sample_labeled_tree(40, 9)


def test_tree_text_roundtrip():
    t = sample_labeled_tree(12, 4)
    assert LabeledPlaneTree.from_text(t.to_text()) == t
    with pytest.raises(ParseError):
        LabeledPlaneTree.from_text("(x)\n0\n")


def test_successors_small():
    # labels 0 1 0 -1: corner i points to the next corner labelled one less
    assert successors([0, 1, 0, -1]) == [3, 2, 3, -1]


def test_cvs_sizes_and_distances():
    for seed in range(1000):
        pq = sample_pointed_quadrangulation(1 + seed % 30, seed)
        q = pq.quad
        n = pq.tree.n_edges
        assert q.n_faces == n and q.n_vertices == n + 2
        assert np.array_equal(distances(q, pq.pointed_vertex), pq.label_distance())


def test_cvs_bipartite_by_label_parity():
    for seed in range(100):
        pq = sample_pointed_quadrangulation(15, seed)
        q = pq.quad
        lab = pq.label_distance()
        for x, y in q.map.edge_endpoints:
            assert (lab[x] - lab[y]) % 2 == 1
        assert q.is_bipartite()


def test_cvs_bijectivity_n2():
    out = {pointed_code(cvs_forward(t, th)) for t in all_labeled_trees(2) for th in (1, -1)}
    assert len(out) == 36 == 4 * 9


@pytest.mark.parametrize("n,count", [(1, 2), (2, 9), (3, 54), (4, 378)])
def test_enumeration_counts(n, count):
    assert len(enumerate_quadrangulations(n)) == count


def test_enumeration_guard():
    with pytest.raises(TooLarge):
        enumerate_quadrangulations(5)
    with pytest.raises(InvalidSize):
        enumerate_quadrangulations(0)


def test_sampler_n1_uniform():
    rng = np.random.default_rng(2)
    c = collections.Counter(canonical_code(sample_quadrangulation(1, rng).map) for _ in range(20000))
    assert len(c) == 2
    for v in c.values():
        assert abs(v / 20000 - 0.5) <= 0.02


def test_sampler_n3_uniform():
    rng = np.random.default_rng(3)
    total = 10000
    c = collections.Counter(canonical_code(sample_quadrangulation(3, rng).map) for _ in range(total))
    assert set(c) == enumerate_quadrangulations(3)
    assert chi2_passes(c.values(), 54, total)


def test_trivial_bijection_degrees():
    for seed in range(1000):
        n = 1 + seed % 25
        q = sample_quadrangulation(n, seed)
        M = trivial_bijection(q)
        assert M.n_edges == n
        colour = vertex_colours(q)
        white = [d for d in range(q.map.dart_count) if colour[q.map.vertex_of[d]] == 0]
        # M's vertices are the white vertices of q
        for i, d in enumerate(white):
            assert M.degrees[M.vertex_of[i]] == q.degrees[q.map.vertex_of[d]]
        faces = black_vertex_faces(q, M)
        blacks = [v for v in range(q.n_vertices) if colour[v] == 1]
        assert sorted(faces) == blacks
        for v, f in faces.items():
            assert q.degrees[v] == M.face_degrees[f]
