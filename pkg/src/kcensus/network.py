"""Coupled-oscillator networks: parsing, graph structure and incidence data."""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import networkx as nx
import numpy as np

from .errors import (
    DisconnectedGraph,
    MalformedInput,
    ScaleLimit,
    UnresolvedGeneric,
    ZeroCoupling,
)

MAX_BIPARTITE_NODES = 12


class _Generic:
    """Marker for a parameter to be replaced by a seeded random sample."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "GENERIC"

    def __reduce__(self):
        return (_Generic, ())


GENERIC = _Generic()


def is_generic(value) -> bool:
    return value is GENERIC


@dataclass(frozen=True)
class PowerFlowData:
    g: tuple
    b: tuple
    P: tuple  # P_1..P_n


@dataclass(frozen=True)
class Network:
    nodes: int
    edges: tuple
    couplings: tuple
    frequencies: object  # tuple of length `nodes`, or GENERIC
    delays: tuple | None = None
    pf: PowerFlowData | None = None
    name: str = field(default="", compare=False)

    @property
    def n(self) -> int:
        return self.nodes - 1

    def edge_index(self, i, j) -> int:
        return self._index[(min(i, j), max(i, j))]

    @property
    def _index(self):
        return {e: idx for idx, e in enumerate(self.edges)}

    def coupling(self, i, j):
        return self.couplings[self.edge_index(i, j)]

    def graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.nodes))
        g.add_edges_from(self.edges)
        return g

    def neighbors(self, v):
        return sorted(w for e in self.edges if v in e for w in e if w != v)

    def degree(self, v) -> int:
        return sum(v in e for e in self.edges)

    @property
    def corank(self) -> int:
        return len(self.edges) - self.nodes + 1

    def has_generic(self) -> bool:
        vals = list(self.couplings)
        vals += [self.frequencies] if is_generic(self.frequencies) else list(self.frequencies)
        if self.delays is not None:
            vals += list(self.delays)
        if self.pf is not None:
            vals += list(self.pf.g) + list(self.pf.b) + list(self.pf.P)
        return any(is_generic(v) for v in vals)

    def is_homogeneous(self) -> bool:
        if is_generic(self.frequencies):
            return False
        return all(w == self.frequencies[0] for w in self.frequencies)

    def w_bar(self) -> tuple:
        """Mean-adjusted frequencies of nodes 1..n."""
        w = self.frequencies
        if is_generic(w) or any(is_generic(x) for x in w):
            raise UnresolvedGeneric("frequencies are GENERIC; resolve them first")
        mean = sum(w, Fraction(0)) / len(w) if all(isinstance(x, Fraction) for x in w) else sum(w) / len(w)
        return tuple(x - mean for x in w[1:])


@dataclass(frozen=True)
class Digraph:
    arcs: tuple  # (tail, head) pairs

    def edges(self) -> frozenset:
        return frozenset((min(a), max(a)) for a in self.arcs)

    def transpose(self) -> Digraph:
        return Digraph(tuple((j, i) for i, j in self.arcs))

    def nodes(self) -> set:
        return {v for a in self.arcs for v in a}


@dataclass(frozen=True)
class CycleVector:
    arcs: tuple
    entries: tuple

    @property
    def support(self) -> tuple:
        return tuple(a for a, e in zip(self.arcs, self.entries) if e)

    def edges(self) -> frozenset:
        return frozenset((min(a), max(a)) for a in self.support)


# --- parsing -----------------------------------------------------------------


def parse_scalar(value, what="value"):
    """Number, rational string, complex string/pair, or 'generic'."""
    if isinstance(value, bool):
        raise MalformedInput(f"{what}: boolean not allowed")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        re, im = (float(parse_scalar(v, what)) for v in value)
        return complex(re, im)
    if isinstance(value, str):
        s = value.strip()
        if s.lower() == "generic":
            return GENERIC
        try:
            return Fraction(s)
        except ValueError:
            pass
        try:
            return complex(s.replace("i", "j"))
        except ValueError:
            pass
    raise MalformedInput(f"{what}: cannot parse {value!r}")


def network_from_dict(data: dict, name: str = "") -> Network:
    if not isinstance(data, dict):
        raise MalformedInput("top level must be an object")
    nodes = data.get("nodes")
    if not isinstance(nodes, int) or isinstance(nodes, bool) or nodes < 2:
        raise MalformedInput("'nodes' must be an integer >= 2")
    raw = data.get("edges")
    if not isinstance(raw, list) or not raw:
        raise MalformedInput("'edges' must be a non-empty list")
    entries = {}
    for e in raw:
        try:
            i, j, k = e["i"], e["j"], e["k"]
        except (TypeError, KeyError):
            raise MalformedInput(f"edge {e!r} needs i, j, k") from None
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
            raise MalformedInput(f"edge {e!r}: endpoints must be integers")
        if i == j or not (0 <= i < nodes and 0 <= j < nodes):
            raise MalformedInput(f"edge {e!r}: bad endpoints")
        key = (min(i, j), max(i, j))
        if key in entries:
            raise MalformedInput(f"duplicate edge {key}")
        k = parse_scalar(k, f"coupling {key}")
        if not is_generic(k) and k == 0:
            raise ZeroCoupling(f"edge {key} has zero coupling", edge=list(key))
        entries[key] = (k, e)
    edges = tuple(sorted(entries))
    couplings = tuple(entries[e][0] for e in edges)

    freq = data.get("frequencies", "generic")
    if isinstance(freq, str) and freq.lower() == "generic":
        frequencies = GENERIC
    elif isinstance(freq, str) and freq.lower() == "homogeneous":
        frequencies = (Fraction(0),) * nodes
    elif isinstance(freq, list) and len(freq) == nodes:
        frequencies = tuple(parse_scalar(w, "frequency") for w in freq)
    else:
        raise MalformedInput(f"'frequencies' must be 'generic', 'homogeneous' or a list of {nodes} values")

    delays = None
    if "delays" in data:
        d = data["delays"]
        if not isinstance(d, list) or len(d) != len(raw):
            raise MalformedInput("'delays' must list one value per edge (file order)")
        by_edge = {(min(e["i"], e["j"]), max(e["i"], e["j"])): parse_scalar(v, "delay") for e, v in zip(raw, d)}
        delays = tuple(by_edge[e] for e in edges)

    pf = None
    if "pf" in data:
        p = data["pf"]
        try:
            g = [parse_scalar(v, "pf.g") for v in p["g"]]
            b = [parse_scalar(v, "pf.b") for v in p["b"]]
            P = [parse_scalar(v, "pf.P") for v in p["P"]]
        except (TypeError, KeyError):
            raise MalformedInput("'pf' needs g, b (per edge) and P (per node)") from None
        if len(g) != len(raw) or len(b) != len(raw) or len(P) not in (nodes, nodes - 1):
            raise MalformedInput("'pf' array lengths do not match the network")
        order = [(min(e["i"], e["j"]), max(e["i"], e["j"])) for e in raw]
        pos = {key: idx for idx, key in enumerate(order)}
        P = P[1:] if len(P) == nodes else P
        pf = PowerFlowData(tuple(g[pos[e]] for e in edges), tuple(b[pos[e]] for e in edges), tuple(P))

    net = Network(nodes, edges, couplings, frequencies, delays, pf, name=name or data.get("name", ""))
    if not nx.is_connected(net.graph()):
        raise DisconnectedGraph("network graph must be connected")
    return net


def parse_network(text: str, name: str = "") -> Network:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from None
    return network_from_dict(data, name)


def load_network(path) -> Network:
    path = Path(path)
    return parse_network(path.read_text(), name=path.stem)


def scalar_to_json(v):
    if is_generic(v):
        return "generic"
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, complex):
        return [v.real, v.imag]
    return v


def network_to_dict(net: Network) -> dict:
    out = {
        "nodes": net.nodes,
        "edges": [{"i": i, "j": j, "k": scalar_to_json(k)} for (i, j), k in zip(net.edges, net.couplings)],
        "frequencies": "generic" if is_generic(net.frequencies) else [scalar_to_json(w) for w in net.frequencies],
    }
    if net.delays is not None:
        out["delays"] = [scalar_to_json(d) for d in net.delays]
    if net.pf is not None:
        out["pf"] = {key: [scalar_to_json(v) for v in getattr(net.pf, key)] for key in ("g", "b", "P")}
    return out


# --- generic sampling ----------------------------------------------------------


def sample_generic(rng: np.random.Generator) -> complex:
    """Magnitude uniform in [1/2, 2], phase uniform in [0, 2pi)."""
    r = rng.uniform(0.5, 2.0)
    phi = rng.uniform(0.0, 2 * np.pi)
    return complex(r * np.cos(phi), r * np.sin(phi))


def resolve_generic(net: Network, seed: int) -> tuple[Network, dict]:
    """Replace every GENERIC marker by a seeded sample; return the new network and the samples."""
    rng = np.random.default_rng(seed)
    sampled = {}

    def fill(values, label, angle=False):
        out = []
        for idx, v in enumerate(values):
            if is_generic(v) and angle:
                v = float(rng.uniform(0.0, 2 * np.pi))
                sampled[f"{label}[{idx}]"] = v
            elif is_generic(v):
                v = sample_generic(rng)
                sampled[f"{label}[{idx}]"] = [v.real, v.imag]
            out.append(v)
        return tuple(out)

    couplings = fill(net.couplings, "k")
    if is_generic(net.frequencies):
        wb = [sample_generic(rng) for _ in range(net.n)]
        frequencies = (-sum(wb),) + tuple(wb)
        sampled["w_bar"] = [[w.real, w.imag] for w in wb]
    else:
        frequencies = fill(net.frequencies, "w")
    delays = fill(net.delays, "delta", angle=True) if net.delays is not None else None
    pf = None
    if net.pf is not None:
        pf = PowerFlowData(fill(net.pf.g, "g"), fill(net.pf.b, "b"), fill(net.pf.P, "P"))
    return replace(net, couplings=couplings, frequencies=frequencies, delays=delays, pf=pf), sampled


# --- incidence and trees -----------------------------------------------------------


def arc_vector(arc, n) -> tuple:
    """Exponent vector e_i - e_j in coordinates of nodes 1..n (e_0 = 0)."""
    v = [0] * n
    i, j = arc
    if i:
        v[i - 1] += 1
    if j:
        v[j - 1] -= 1
    return tuple(v)


def reduced_incidence(digraph: Digraph, n: int) -> np.ndarray:
    """Incidence matrix with the row of node 0 deleted; one column per arc."""
    q = np.zeros((n, len(digraph.arcs)), dtype=np.int64)
    for col, arc in enumerate(digraph.arcs):
        q[:, col] = arc_vector(arc, n)
    return q


def bfs_depths(net: Network, root: int = 0) -> dict:
    depth = {root: 0}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in net.neighbors(u):
            if w not in depth:
                depth[w] = depth[u] + 1
                queue.append(w)
    return depth


def _orient(edge, depth):
    i, j = edge
    if depth[i] % 2 != depth[j] % 2:
        return (i, j) if depth[i] % 2 else (j, i)
    return (max(i, j), min(i, j))


def spanning_tree(net: Network, root: int = 0) -> Digraph:
    """BFS tree, lowest index first; arcs point from odd-depth to even-depth nodes."""
    depth = {root: 0}
    queue = deque([root])
    arcs = []
    while queue:
        u = queue.popleft()
        for w in net.neighbors(u):
            if w not in depth:
                depth[w] = depth[u] + 1
                queue.append(w)
                arcs.append(_orient((u, w), depth))
    return Digraph(tuple(arcs))


def tree_path(tree_arcs, start, goal) -> list:
    """Arcs (with +1/-1 traversal sign) along the tree path from start to goal."""
    adj = {}
    for idx, (i, j) in enumerate(tree_arcs):
        adj.setdefault(i, []).append((j, idx, 1))
        adj.setdefault(j, []).append((i, idx, -1))
    prev = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for w, idx, sign in adj.get(u, ()):
            if w not in prev:
                prev[w] = (u, idx, sign)
                queue.append(w)
    path = []
    v = goal
    while prev[v] is not None:
        u, idx, sign = prev[v]
        path.append((idx, sign))
        v = u
    return path[::-1]


def fundamental_cycles(net: Network, tree: Digraph) -> list[CycleVector]:
    """One primitive cycle vector per non-tree edge.

    The digraph is the tree arcs followed by every non-tree edge (oriented as
    ``spanning_tree`` orients edges). For the cycle of extra arc (i, j) the
    entry of that arc is -1 and the tree entries solve Q_T tau = e_i - e_j.
    """
    depth = bfs_depths(net)
    tree_edges = tree.edges()
    extra = [_orient(e, depth) for e in net.edges if e not in tree_edges]
    arcs = tree.arcs + tuple(extra)
    out = []
    for pos, (i, j) in enumerate(extra):
        entries = [0] * len(arcs)
        entries[len(tree.arcs) + pos] = -1
        # walking the tree from j to i then taking arc (i, j) closes the cycle
        for idx, sign in tree_path(tree.arcs, j, i):
            entries[idx] = -sign
        out.append(CycleVector(arcs, tuple(entries)))
    return out


def bridges(net: Network) -> set:
    return {(min(e), max(e)) for e in nx.bridges(net.graph())}


def subgraph_bridges(edges) -> set:
    g = nx.Graph()
    g.add_edges_from(edges)
    return {(min(e), max(e)) for e in nx.bridges(g)}


def maximal_bipartite_subgraphs(net: Network) -> list[frozenset]:
    """Edge sets of the edge-maximal bipartite subgraphs.

    Every bipartite subgraph lies inside the cut of some 2-coloring, so the
    maximal ones are the inclusion-maximal cuts.
    """
    if net.nodes > MAX_BIPARTITE_NODES:
        raise ScaleLimit(f"maximal bipartite enumeration capped at {MAX_BIPARTITE_NODES} nodes")
    m = len(net.edges)
    cuts = set()
    for mask in range(1 << (net.nodes - 1)):
        side = [0] + [(mask >> (v - 1)) & 1 for v in range(1, net.nodes)]
        cut = 0
        for idx, (i, j) in enumerate(net.edges):
            if side[i] != side[j]:
                cut |= 1 << idx
        cuts.add(cut)
    maximal = []
    for cut in sorted(cuts, key=lambda c: -bin(c).count("1")):
        if not any(cut & big == cut for big in maximal):
            maximal.append(cut)
    return sorted(
        (frozenset(net.edges[i] for i in range(m) if c >> i & 1) for c in maximal),
        key=lambda s: sorted(s),
    )


def spanning_trees(net: Network):
    """Yield edge tuples of spanning trees, lexicographic in edge order."""
    for combo in combinations(range(len(net.edges)), net.n):
        sets = nx.utils.UnionFind(range(net.nodes))
        ok = True
        for idx in combo:
            a, b = (sets[v] for v in net.edges[idx])
            if a == b:
                ok = False
                break
            sets.union(a, b)
        if ok:
            yield tuple(net.edges[i] for i in combo)


def unique_cycle(net: Network) -> list:
    """Nodes of the single cycle of a unicycle graph, in traversal order."""
    g = net.graph()
    cyc = nx.cycle_basis(g)
    if len(cyc) != 1 or net.corank != 1:
        return []
    nodes = cyc[0]
    start = nodes.index(min(nodes))
    nodes = nodes[start:] + nodes[:start]
    if len(nodes) > 2 and nodes[1] > nodes[-1]:
        nodes = [nodes[0]] + nodes[1:][::-1]
    return nodes


def cycle_space_basis(arcs) -> list[tuple]:
    """Integer kernel basis of the incidence matrix of a digraph.

    A BFS spanning forest is taken in arc order; each remaining arc gives a
    vector with -1 on itself and the tree path entries that close its cycle.
    """
    arcs = list(arcs)
    seen_nodes = set()
    tree_idx = []
    adj = {}
    for idx, (i, j) in enumerate(arcs):
        adj.setdefault(i, []).append((j, idx))
        adj.setdefault(j, []).append((i, idx))
    for root in sorted(adj):
        if root in seen_nodes:
            continue
        seen_nodes.add(root)
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for w, idx in sorted(adj[u]):
                if w not in seen_nodes:
                    seen_nodes.add(w)
                    tree_idx.append(idx)
                    queue.append(w)
    tree_arcs = [arcs[k] for k in tree_idx]
    out = []
    for idx, (i, j) in enumerate(arcs):
        if idx in tree_idx:
            continue
        vec = [0] * len(arcs)
        vec[idx] = -1
        for pos, sign in tree_path(tree_arcs, j, i):
            vec[tree_idx[pos]] = -sign
        out.append(tuple(vec))
    return out
