"""Adjacency polytope, symmetric generic lifting and its unimodular triangulation.

Everything here is exact (``fractions.Fraction``). The triangulation is found
by walking across the lower hull of the lifted points: every cell contains the
origin and its other points form a spanning tree digraph, so each cell is
pinned down by that tree, and a neighbor across an interior ridge is found by
trying the arcs that reconnect the two halves of the ridge forest. Each
candidate is accepted only if its lifted hyperplane is a strict lower facet,
and every interior ridge must have exactly one partner, which certifies
completeness.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

import numpy as np
import sympy

from .errors import DegenerateLifting, NotATreeCell, ScaleLimit
from .network import (
    Digraph,
    Network,
    arc_vector,
    maximal_bipartite_subgraphs,
    spanning_trees,
)

MAX_FACET_DIM = 8
LIFT_DENOMINATOR = 10**6
DEFAULT_BOUND = Fraction(1, 1000)
MAX_LIFT_RETRIES = 16


@dataclass(frozen=True)
class PointConfiguration:
    """Points 0 and +-(e_i - e_j); index 0 is the origin, 2k+1 / 2k+2 are the arcs of edge k."""

    n: int
    points: tuple
    arcs: tuple  # arcs[0] is None

    def antipode(self, idx: int) -> int:
        if idx == 0:
            return 0
        return idx + 1 if idx % 2 else idx - 1

    def index_of_arc(self, arc) -> int:
        return self.arcs.index(tuple(arc))

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class LiftingFunction:
    deltas: tuple  # per edge
    values: tuple  # per point
    seed: int

    @property
    def edge_count(self):
        return len(self.deltas)


@dataclass(frozen=True)
class Face:
    points: tuple  # sorted point indices
    normal: tuple  # inner normal: <normal, p> >= h, equality exactly on the face
    h: Fraction

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class Triangulation:
    cfg: PointConfiguration
    lifting: LiftingFunction
    cells: tuple  # sorted tuples of nonzero point indices; the origin is implicit
    normals: tuple  # v with <v, a> + omega(a) = 0 on the cell

    def __len__(self):
        return len(self.cells)

    @property
    def seed(self):
        return self.lifting.seed


def adjacency_polytope(net: Network) -> PointConfiguration:
    points = [(0,) * net.n]
    arcs = [None]
    for i, j in net.edges:
        for arc in ((i, j), (j, i)):
            points.append(arc_vector(arc, net.n))
            arcs.append(arc)
    return PointConfiguration(net.n, tuple(points), tuple(arcs))


def symmetric_lifting(cfg: PointConfiguration, seed: int, bound: Fraction = DEFAULT_BOUND) -> LiftingFunction:
    """omega(0) = 0 and omega(+-(e_i - e_j)) = 1 + delta_ij, distinct nonzero delta_ij.

    delta_ij are rationals with denominator 10**6 and |delta_ij| <= bound.
    """
    m = (len(cfg) - 1) // 2
    top = int(bound * LIFT_DENOMINATOR)
    if 2 * top < m:
        raise ValueError("bound too small for distinct lifting values")
    rng = np.random.default_rng(seed)
    draws = rng.choice(2 * top, size=m, replace=False)
    nums = [int(d) - top if d < top else int(d) - top + 1 for d in draws]
    deltas = tuple(Fraction(k, LIFT_DENOMINATOR) for k in nums)
    values = [Fraction(0)]
    for d in deltas:
        values += [1 + d, 1 + d]
    return LiftingFunction(deltas, tuple(values), seed)


# --- tree cells ------------------------------------------------------------------------


def _potential(n, arcs, target):
    """Solve phi_i - phi_j = target[k] for arcs k = (i, j), phi_0 = 0; None unless a spanning tree."""
    if len(arcs) != n:
        return None
    adj = {}
    for (i, j), t in zip(arcs, target):
        adj.setdefault(i, []).append((j, -t))
        adj.setdefault(j, []).append((i, t))
    phi = {0: Fraction(0)}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w, t in adj.get(u, ()):
            if w not in phi:
                phi[w] = phi[u] + t
                queue.append(w)
    if len(phi) != n + 1:
        return None
    return phi


def _cell_normal(cfg, lifting, cell):
    arcs = [cfg.arcs[p] for p in cell]
    phi = _potential(cfg.n, arcs, [-lifting.values[p] for p in cell])
    if phi is None:
        return None
    return tuple(phi[v] for v in range(1, cfg.n + 1))


def lifted_heights(cfg, lifting, normal):
    v = (Fraction(0),) + tuple(normal)
    out = [Fraction(0)]
    for p in range(1, len(cfg)):
        i, j = cfg.arcs[p]
        out.append(lifting.values[p] + v[i] - v[j])
    return out


def _check_cell(cfg, lifting, cell):
    """Normal if 0 + cell is a strict lower facet of the lifted points, else None."""
    normal = _cell_normal(cfg, lifting, cell)
    if normal is None:
        return None
    heights = lifted_heights(cfg, lifting, normal)
    members = set(cell)
    for p in range(1, len(cfg)):
        if p in members:
            continue
        if heights[p] < 0:
            return None
        if heights[p] == 0:
            raise DegenerateLifting("lifted points not in general position", seed=lifting.seed)
    return normal


def _first_cell(cfg, net, lifting):
    index = {arc: p for p, arc in enumerate(cfg.arcs) if arc}
    for tree in spanning_trees(net):
        for signs in product((0, 1), repeat=len(tree)):
            cell = tuple(sorted(index[e if s else (e[1], e[0])] for e, s in zip(tree, signs)))
            normal = _check_cell(cfg, lifting, cell)
            if normal is not None:
                return cell, normal
    raise DegenerateLifting("no lower facet through the origin found", seed=lifting.seed)


def _components(n, arcs):
    comp = list(range(n + 1))

    def find(v):
        while comp[v] != v:
            comp[v] = comp[comp[v]]
            v = comp[v]
        return v

    for i, j in arcs:
        comp[find(i)] = find(j)
    return [find(v) for v in range(n + 1)]


def _boundary_support(cfg, cell):
    """Hyperplane <u, p> = 1 through the cell's nonzero points; must support the polytope."""
    phi = _potential(cfg.n, [cfg.arcs[p] for p in cell], [Fraction(1)] * len(cell))
    u = tuple(phi[v] for v in range(1, cfg.n + 1))
    vals = [sum(a * b for a, b in zip(u, cfg.points[p])) for p in range(len(cfg))]
    return u, vals


def regular_subdivision(cfg: PointConfiguration, lifting: LiftingFunction, net: Network) -> Triangulation:
    """Lower-hull cells of the lifted configuration; raises DegenerateLifting if not a tree triangulation."""
    start, normal = _first_cell(cfg, net, lifting)
    found = {start: normal}
    queue = deque([start])
    while queue:
        cell = queue.popleft()
        u, vals = _boundary_support(cfg, cell)
        if any(v > 1 for v in vals):
            raise DegenerateLifting("cell face opposite the origin is not on the boundary", seed=lifting.seed)
        for drop in cell:
            ridge = [p for p in cell if p != drop]
            comp = _components(cfg.n, [cfg.arcs[p] for p in ridge])
            partners = []
            for p in range(1, len(cfg)):
                if p == drop or p in ridge:
                    continue
                i, j = cfg.arcs[p]
                if comp[i] == comp[j]:
                    continue
                cand = tuple(sorted(ridge + [p]))
                nv = found.get(cand) or _check_cell(cfg, lifting, cand)
                if nv is not None:
                    partners.append((cand, nv))
            if len(partners) != 1:
                raise DegenerateLifting(
                    f"interior ridge has {len(partners)} neighbors", seed=lifting.seed
                )
            cand, nv = partners[0]
            if cand not in found:
                found[cand] = nv
                queue.append(cand)
    cells = tuple(sorted(found))
    return Triangulation(cfg, lifting, cells, tuple(found[c] for c in cells))


def triangulate(net: Network, seed: int = 0, bound: Fraction = DEFAULT_BOUND) -> Triangulation:
    """Symmetric lifting plus subdivision, resampling delta on degenerate draws."""
    cfg = adjacency_polytope(net)
    last = None
    for attempt in range(MAX_LIFT_RETRIES):
        lifting = symmetric_lifting(cfg, seed + attempt * 7919, bound)
        try:
            return regular_subdivision(cfg, lifting, net)
        except DegenerateLifting as exc:
            last = exc
    raise DegenerateLifting(f"no usable lifting after {MAX_LIFT_RETRIES} draws: {last}")


def cell_determinant(cfg: PointConfiguration, cell) -> int:
    m = np.array([cfg.points[p] for p in cell], dtype=float)
    return int(round(np.linalg.det(m)))


def normalized_volume(net: Network, seed: int = 0) -> int:
    """Generic root count: number of cells, cross-checked against the |det| sum."""
    tri = triangulate(net, seed)
    total = sum(abs(cell_determinant(tri.cfg, c)) for c in tri.cells)
    if total != len(tri.cells):
        raise DegenerateLifting("triangulation is not unimodular")
    return len(tri.cells)


# --- faces ---------------------------------------------------------------------


def cell_to_tree(cfg: PointConfiguration, cell) -> Digraph:
    cell = [p for p in cell if p != 0]
    arcs = tuple(cfg.arcs[p] for p in cell)
    if len(arcs) != cfg.n or _potential(cfg.n, arcs, [Fraction(0)] * len(arcs)) is None:
        raise NotATreeCell(f"cell {tuple(cell)} is not a spanning tree")
    return Digraph(arcs)


def face_subdigraph(cfg: PointConfiguration, face: Face) -> Digraph:
    return Digraph(tuple(cfg.arcs[p] for p in face.points if p != 0))


def _face_from_hyperplane(cfg, u) -> Face:
    vals = [sum(a * b for a, b in zip(u, p)) for p in cfg.points]
    pts = tuple(i for i, v in enumerate(vals) if v == 1)
    return Face(pts, tuple(-x for x in u), Fraction(-1))


def facets(cfg: PointConfiguration, tri: Triangulation) -> list[Face]:
    """Facets of the polytope, read off the boundary simplices of the triangulation."""
    if cfg.n > MAX_FACET_DIM:
        raise ScaleLimit(f"facet enumeration capped at dimension {MAX_FACET_DIM}")
    seen = {}
    for cell in tri.cells:
        u, vals = _boundary_support(cfg, cell)
        if any(v > 1 for v in vals):
            raise DegenerateLifting("boundary simplex does not support the polytope")
        face = _face_from_hyperplane(cfg, u)
        seen.setdefault(face.points, face)
    return [seen[k] for k in sorted(seen)]


def face_dim(cfg: PointConfiguration, face: Face) -> int:
    pts = [cfg.points[p] for p in face.points]
    base = pts[0]
    rows = [[a - b for a, b in zip(p, base)] for p in pts[1:]]
    if not rows:
        return 0
    return sympy.Matrix(rows).rank()


def faces(cfg: PointConfiguration, tri: Triangulation) -> list[Face]:
    """All nonempty proper faces: closure of the facets under intersection."""
    fs = facets(cfg, tri)
    sets = {frozenset(f.points) for f in fs}
    frontier = set(sets)
    while frontier:
        new = set()
        for a in frontier:
            for b in sets:
                c = a & b
                if c and c not in sets and c not in new:
                    new.add(c)
        sets |= new
        frontier = new
    out = []
    for s in sorted(sets, key=lambda s: (len(s), sorted(s))):
        containing = [f for f in fs if s <= set(f.points)]
        normal = tuple(sum(col) for col in zip(*(f.normal for f in containing)))
        out.append(Face(tuple(sorted(s)), normal, sum(f.h for f in containing)))
    return out


def cells_in_face(tri: Triangulation, face: Face) -> list:
    pts = set(face.points)
    return [c for c in tri.cells if set(c) <= pts]


def face_classification_check(net: Network, seed: int = 0) -> bool:
    """Facet subgraphs coincide with the maximal bipartite subgraphs."""
    cfg = adjacency_polytope(net)
    tri = triangulate(net, seed)
    facet_graphs = {face_subdigraph(cfg, f).edges() for f in facets(cfg, tri)}
    bip = {s for s in maximal_bipartite_subgraphs(net) if {v for e in s for v in e} == set(range(net.nodes))}
    return facet_graphs == bip
