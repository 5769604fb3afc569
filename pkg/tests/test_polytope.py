from fractions import Fraction
from itertools import combinations
from math import comb, factorial

import networkx as nx
import pytest
import sympy
from _nets import complete, cycle, net, path
from scipy.spatial import ConvexHull

from kcensus.errors import NotATreeCell
from kcensus.polytope import (
    DEFAULT_BOUND,
    LIFT_DENOMINATOR,
    adjacency_polytope,
    cell_to_tree,
    cells_in_face,
    face_classification_check,
    face_dim,
    face_subdigraph,
    faces,
    facets,
    normalized_volume,
    regular_subdivision,
    symmetric_lifting,
    triangulate,
)

K2 = path(2)
C4_PENDANT = net(5, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1), (1, 4, 1)])


def test_adjacency_polytope_points():
    k2 = adjacency_polytope(K2)
    assert k2.points[0] == (0,) and set(k2.points) == {(0,), (1,), (-1,)}
    assert len(adjacency_polytope(cycle(4))) == 9
    cfg = adjacency_polytope(cycle(6))
    assert len(cfg) == 13 and cfg.n == 5
    pts = set(cfg.points)
    assert all(tuple(-x for x in p) in pts for p in pts)
    for idx in range(1, len(cfg)):
        assert cfg.points[cfg.antipode(idx)] == tuple(-x for x in cfg.points[idx])


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_symmetric_lifting(seed):
    cfg = adjacency_polytope(complete(5))
    w = symmetric_lifting(cfg, seed)
    assert w.values[0] == 0
    for k in range(len(w.deltas)):
        assert w.values[2 * k + 1] == w.values[2 * k + 2] == 1 + w.deltas[k]
    assert len(set(w.deltas)) == len(w.deltas)
    assert all(0 < abs(d) <= DEFAULT_BOUND for d in w.deltas)
    assert all(LIFT_DENOMINATOR % d.denominator == 0 for d in w.deltas)
    assert symmetric_lifting(cfg, seed) == w


def test_subdivision_examples():
    cfg = adjacency_polytope(K2)
    tri = regular_subdivision(cfg, symmetric_lifting(cfg, 0), K2)
    assert sorted(tri.cells) == [(1,), (2,)]  # {0, -1} and {0, +1}
    assert len(triangulate(cycle(4))) == 12
    assert len(triangulate(cycle(6))) == 60


def _exact_det(cfg, cell):
    return sympy.Matrix([cfg.points[p] for p in cell]).det()


TRIANGULATION_CASES = [cycle(m) for m in range(3, 7)] + [path(k) for k in range(2, 8)] + [C4_PENDANT, complete(4)]


@pytest.mark.parametrize("g", TRIANGULATION_CASES, ids=lambda g: f"{g.nodes}n{len(g.edges)}e")
def test_triangulation_invariants(g):
    counts = set()
    for seed in (0, 1, 2):
        tri = triangulate(g, seed)
        cfg = tri.cfg
        counts.add(len(tri))
        for cell in tri.cells:
            assert 0 not in cell and len(cell) == g.n
            assert abs(_exact_det(cfg, cell)) == 1
            assert not any(cfg.antipode(p) in cell for p in cell)
            tree = cell_to_tree(cfg, cell)
            und = nx.Graph(list(tree.edges()))
            assert nx.is_tree(und) and und.number_of_nodes() == g.nodes
            assert nx.is_directed_acyclic_graph(nx.DiGraph(list(tree.arcs)))
    assert len(counts) == 1


def _qhull_nvol(g):
    cfg = adjacency_polytope(g)
    if g.n == 1:
        return 2
    return round(ConvexHull([list(p) for p in cfg.points]).volume * factorial(g.n))


@pytest.mark.parametrize("g", [cycle(3), cycle(4), cycle(5), cycle(6), complete(4), path(5), C4_PENDANT])
def test_volume_matches_qhull(g):
    assert normalized_volume(g) == _qhull_nvol(g)


@pytest.mark.parametrize("n", range(1, 7))
def test_tree_volume(n):
    assert normalized_volume(path(n + 1)) == 2**n
    star = net(n + 1, [(0, v, 1) for v in range(1, n + 1)])
    assert normalized_volume(star) == 2**n


@pytest.mark.parametrize("m", range(3, 7))
def test_cycle_volume_formula(m):
    assert normalized_volume(cycle(m)) == m * comb(m - 1, (m - 1) // 2)


def _brute_facets(cfg):
    """Facets from every n-subset of nonzero points spanning a hyperplane off the origin."""
    n = cfg.n
    found = set()
    pts = list(range(1, len(cfg)))
    for sub in combinations(pts, n):
        M = sympy.Matrix([cfg.points[p] for p in sub])
        if M.det() == 0:
            continue
        u = M.solve(sympy.Matrix([1] * n))
        vals = [sum(Fraction(int(a.p), int(a.q)) * b for a, b in zip(u, p)) for p in cfg.points]
        if max(vals) == 1:
            found.add(tuple(i for i, v in enumerate(vals) if v == 1))
    return found


@pytest.mark.parametrize("g", [cycle(3), cycle(4), cycle(5), complete(4), path(4), C4_PENDANT])
def test_facets_match_brute_force(g):
    tri = triangulate(g)
    assert {f.points for f in facets(tri.cfg, tri)} == _brute_facets(tri.cfg)


def test_facet_counts():
    for g, expected in [(K2, 2), (cycle(4), 6), (cycle(6), 20)]:
        tri = triangulate(g)
        assert len(facets(tri.cfg, tri)) == expected
    tri = triangulate(K2)
    assert {f.points for f in facets(tri.cfg, tri)} == {(1,), (2,)}


@pytest.mark.parametrize("m", [4, 6])
def test_even_cycle_facet_formula(m):
    tri = triangulate(cycle(m))
    assert len(facets(tri.cfg, tri)) == 2 * comb(m - 1, m // 2 - 1)


def test_face_subdigraph_examples():
    tri = triangulate(K2)
    e1 = tri.cfg.points.index((1,))
    plus = next(f for f in facets(tri.cfg, tri) if f.points == (e1,))
    assert face_subdigraph(tri.cfg, plus).arcs == ((1, 0),)
    tri = triangulate(cycle(4))
    for f in facets(tri.cfg, tri):
        dg = face_subdigraph(tri.cfg, f)
        assert len(dg.arcs) == 4 and dg.edges() == frozenset(cycle(4).edges)


def test_e1_is_arc_into_reference():
    cfg = adjacency_polytope(K2)
    e1 = cfg.points.index((1,))
    assert cfg.arcs[e1] == (1, 0)


@pytest.mark.parametrize("g", [cycle(4), cycle(5), complete(4)])
def test_facets_antipodal_and_transpose(g):
    tri = triangulate(g)
    fs = {f.points: f for f in facets(tri.cfg, tri)}
    for pts, f in fs.items():
        neg = tuple(sorted(tri.cfg.antipode(p) for p in pts))
        assert neg in fs
        assert set(face_subdigraph(tri.cfg, fs[neg]).arcs) == set(face_subdigraph(tri.cfg, f).transpose().arcs)


@pytest.mark.parametrize("g", [cycle(4), cycle(5), complete(4)])
def test_faces_supporting_hyperplanes(g):
    tri = triangulate(g)
    cfg = tri.cfg
    for f in faces(cfg, tri):
        vals = [sum(a * b for a, b in zip(f.normal, p)) for p in cfg.points]
        assert all((v == f.h) == (idx in f.points) for idx, v in enumerate(vals))
        assert all(v >= f.h for v in vals)
        assert len(f) - face_dim(cfg, f) - 1 >= 0


def test_cell_to_tree_rejects_non_trees():
    cfg = adjacency_polytope(cycle(4))
    with pytest.raises(NotATreeCell):
        cell_to_tree(cfg, (1, 2, 3))  # contains an antipodal pair
    with pytest.raises(NotATreeCell):
        cell_to_tree(cfg, (1, 3))


@pytest.mark.parametrize("g, n_facets", [(cycle(3), 6), (cycle(4), 6), (complete(4), 14)])
def test_face_classification(g, n_facets):
    assert face_classification_check(g)
    tri = triangulate(g)
    assert len(facets(tri.cfg, tri)) == n_facets


def test_cells_partition_over_facets():
    for g in (cycle(4), cycle(5), complete(4)):
        tri = triangulate(g)
        per = [len(cells_in_face(tri, f)) for f in facets(tri.cfg, tri)]
        assert sum(per) == len(tri)


def test_monotone_under_edge_addition():
    chain = [path(5)]
    extra = [(0, 4), (1, 3), (0, 2), (2, 4)]
    edges = [(i, i + 1, 1) for i in range(4)]
    for e in extra:
        edges.append((*e, 1))
        chain.append(net(5, edges))
    vols = [normalized_volume(g) for g in chain]
    assert all(a < b for a, b in zip(vols, vols[1:]))


@pytest.mark.parametrize("base", [cycle(4), cycle(5), complete(4)])
def test_leaf_doubles_volume(base):
    edges = [(i, j, 1) for i, j in base.edges] + [(1, base.nodes, 1)]
    assert normalized_volume(net(base.nodes + 1, edges)) == 2 * normalized_volume(base)
