"""Exact root counts from network combinatorics.

Covers the generic count (normalized volume), exceptional coupling strata
detected face by face, balanced subnetworks of unicycle networks with the
refined count they imply, the shared-edge family, and pendant reduction.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from math import comb

import numpy as np

from .errors import NotUnicycle, WrongTopology
from .network import (
    Digraph,
    Network,
    is_generic,
    resolve_generic,
    subgraph_bridges,
    unique_cycle,
)
from .polytope import (
    Face,
    adjacency_polytope,
    face_subdigraph,
    faces,
    normalized_volume,
    triangulate,
)

REL_TOL = 1e-10

BRIDGE_IMPOSSIBLE = "BRIDGE_IMPOSSIBLE"
BINOMIAL = "BINOMIAL"
SHARED_EDGE_SUM = "SHARED_EDGE_SUM"
NUMERIC = "NUMERIC"


@dataclass(frozen=True)
class BalancedSubnetwork:
    """An orientation of the cycle with equal clockwise/counterclockwise split.

    ``arcs`` follow the cycle traversal; ``entries`` is +1 for arcs pointing
    along the traversal and -1 otherwise, which is also the primitive cycle
    vector of the orientation.
    """

    arcs: tuple
    entries: tuple
    kappa_plus: object
    kappa_minus: object
    is_maximal: bool = True

    @property
    def orientation(self) -> Digraph:
        return Digraph(self.arcs)

    def transpose(self) -> BalancedSubnetwork:
        arcs = tuple((j, i) for i, j in self.arcs)
        return BalancedSubnetwork(arcs, tuple(-e for e in self.entries), self.kappa_minus, self.kappa_plus)


@dataclass
class ExceptionalCertificate:
    kind: str
    arcs: tuple
    etas: list = field(default_factory=list)  # cycle vectors over ``arcs``
    signs: list = field(default_factory=list)  # (-1)**(|C_i| / 2) per cycle
    value: object = None
    satisfied: bool = False
    face: Face | None = None
    residual: float | None = None
    point: np.ndarray | None = None

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "arcs": [list(a) for a in self.arcs],
            "satisfied": self.satisfied,
        }
        if self.etas:
            out["etas"] = [list(map(int, e)) for e in self.etas]
            out["signs"] = [int(s) for s in self.signs]
        if self.value is not None:
            out["value"] = _show(self.value)
        if self.residual is not None:
            out["residual"] = self.residual
        return out


@dataclass
class CountReport:
    generic_bound: int
    family: str
    refined_count: int | None = None
    beta: int | None = None
    multiplier: int = 1
    strata: list = field(default_factory=list)
    solver_count: int | None = None

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "generic_bound": self.generic_bound,
            "refined_count": self.refined_count,
            "beta": self.beta,
            "multiplier": self.multiplier,
            "strata": [c.to_dict() for c in self.strata],
            "solver_count": self.solver_count,
        }


def _show(v):
    if isinstance(v, Fraction):
        return str(v)
    v = complex(v)
    return [v.real, v.imag]


# --- exact coupling arithmetic ---------------------------------------------------


def _concrete(net: Network, seed: int = 0) -> Network:
    """Sample GENERIC couplings; warn once when given couplings force float comparisons."""
    if any(not is_generic(k) and not isinstance(k, Fraction) for k in net.couplings):
        warnings.warn("non-rational couplings: conditions decided to 1e-10 relative", stacklevel=3)
    if any(is_generic(k) for k in net.couplings):
        net, _ = resolve_generic(net, seed)
    return net


def k_power(net: Network, arcs, eta):
    """prod k_e ** eta_e, exact for rational couplings."""
    out = Fraction(1)
    for arc, e in zip(arcs, eta):
        if e:
            k = net.coupling(*arc)
            out = out * (k if isinstance(k, Fraction) else complex(k)) ** int(e)
    return out


def _equals(value, target) -> bool:
    if isinstance(value, Fraction) and isinstance(target, (Fraction, int)):
        return value == target
    return abs(complex(value) - complex(target)) <= REL_TOL * max(1.0, abs(complex(target)))


# --- generic and unicycle counts ------------------------------------------------------


def generic_root_count(net: Network, seed: int = 0) -> int:
    """Number of isolated complex zeros for generic parameters (normalized volume)."""
    return normalized_volume(net, seed)


def _cycle_arcs(cycle):
    return [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def balanced_subnetworks(net: Network) -> list[BalancedSubnetwork]:
    cycle = unique_cycle(net)
    if not cycle:
        raise NotUnicycle("graph must contain exactly one cycle")
    m = len(cycle)
    if m % 2:
        return []
    net = _concrete(net)
    ring = _cycle_arcs(cycle)
    target = (-1) ** (m // 2)
    out = []
    for plus in combinations(range(m), m // 2):
        entries = tuple(1 if i in plus else -1 for i in range(m))
        arcs = tuple(a if e > 0 else a[::-1] for a, e in zip(ring, entries))
        kp = k_power(net, ring, [e > 0 for e in entries])
        km = k_power(net, ring, [e < 0 for e in entries])
        if _equals(kp / km, target):
            out.append(BalancedSubnetwork(arcs, entries, kp, km))
    return out


def off_cycle_count(net: Network) -> int:
    return net.nodes - len(unique_cycle(net))


def unicycle_root_count(net: Network, seed: int = 0) -> CountReport:
    cycle = unique_cycle(net)
    if not cycle:
        raise NotUnicycle("graph must contain exactly one cycle")
    m = len(cycle)
    ell = net.nodes - m
    bound = generic_root_count(net, seed)
    if m % 2:
        refined = 2**ell * m * comb(m - 1, (m - 1) // 2)
        return CountReport(bound, "unicycle", refined, 0, 2**ell, exceptional_faces(net, seed))
    beta = len(balanced_subnetworks(net))
    refined = 2**ell * (m * comb(m - 1, m // 2 - 1) - beta)
    return CountReport(bound, "unicycle", refined, beta, 2**ell, exceptional_faces(net, seed))


# --- faces ------------------------------------------------------------------------


def _theta_structure(edges):
    """(e, paths) if the graph is d >= 1 internally disjoint u-v paths plus the edge e = {u, v}."""
    edges = [tuple(sorted(e)) for e in edges]
    nodes = {v for e in edges for v in e}
    corank = len(edges) - len(nodes) + 1
    if corank < 1:
        return None
    deg = {v: 0 for v in nodes}
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    for e in sorted(edges):
        u, v = e
        if deg[u] != corank + 1 or deg[v] != corank + 1:
            continue
        if any(deg[w] != 2 for w in nodes if w not in e):
            continue
        adj = {w: [] for w in nodes}
        for a, b in edges:
            if (a, b) != e:
                adj[a].append(b)
                adj[b].append(a)
        paths = []
        used = set()
        for start in sorted(adj[u]):
            path = [u, start]
            while path[-1] != v:
                nxt = [w for w in adj[path[-1]] if w != path[-2]]
                if len(nxt) != 1 or nxt[0] in used or nxt[0] == u:
                    return None
                path.append(nxt[0])
                used.add(path[-2])
            paths.append(path)
        if len(paths) == corank and len(used) + 2 == len(nodes):
            return e, paths
    return None


def shared_edge_structure(net: Network):
    """(shared edge, cycles as node lists) for d even cycles sharing exactly one edge."""
    found = _theta_structure(net.edges)
    if found is None or net.nodes != len({v for e in net.edges for v in e}):
        raise WrongTopology("graph is not a family of cycles sharing exactly one edge")
    e, paths = found
    cycles = [p for p in paths]
    if any(len(c) % 2 for c in cycles):
        raise WrongTopology("all cycles sharing the edge must be even")
    return e, cycles


def _normalized_etas(arcs, e, paths):
    """One cycle vector per path (closed by e), with entry -1 on the arc of e."""
    arcs = list(arcs)
    pos = {a: idx for idx, a in enumerate(arcs)}
    etas = []
    for path in paths:
        walk = path + [path[0]]
        vec = [0] * len(arcs)
        for a, b in zip(walk, walk[1:]):
            if (a, b) in pos:
                vec[pos[(a, b)]] = 1
            else:
                vec[pos[(b, a)]] = -1
        pos_e = pos[e] if e in pos else pos[e[::-1]]
        if vec[pos_e] > 0:
            vec = [-x for x in vec]
        etas.append(tuple(vec))
    return etas


def _face_certificate(net, arcs, face=None, seed=0):
    edges = [tuple(sorted(a)) for a in arcs]
    if subgraph_bridges(edges):
        return ExceptionalCertificate(BRIDGE_IMPOSSIBLE, tuple(arcs), face=face)
    theta = _theta_structure(edges)
    if theta is not None:
        e, paths = theta
        etas = _normalized_etas(arcs, e, paths)
        signs = [(-1) ** (sum(1 for x in eta if x) // 2) for eta in etas]
        value = sum((s * k_power(net, arcs, eta) for s, eta in zip(signs, etas)), Fraction(0))
        kind = BINOMIAL if len(etas) == 1 else SHARED_EDGE_SUM
        return ExceptionalCertificate(kind, tuple(arcs), etas, signs, value, _equals(value, 1), face)
    from .homotopy import facial_torus_zero

    x = facial_torus_zero(net, arcs, seed)
    cert = ExceptionalCertificate(NUMERIC, tuple(arcs), face=face, satisfied=x is not None)
    if x is not None:
        cert.point = x
        cert.residual = _facial_residual(net, arcs, x)
    return cert


def _facial_residual(net, arcs, x):
    xs = np.concatenate([[1.0], x])
    out = np.zeros(net.n, dtype=complex)
    for i, j in arcs:
        t = complex(net.coupling(i, j)) / 2j * xs[i] / xs[j]
        if i:
            out[i - 1] += t
        if j:
            out[j - 1] -= t
    return float(np.max(np.abs(out)))


def exceptional_faces(net: Network, seed: int = 0, satisfied_only: bool = True) -> list[ExceptionalCertificate]:
    """Certificates for faces whose facial system has a torus zero.

    Faces F and -F carry the same condition, so only the first of each pair is kept.
    """
    net = _concrete(net, seed)
    cfg = adjacency_polytope(net)
    tri = triangulate(net, seed)
    out = []
    seen = set()
    for face in faces(cfg, tri):
        arcs = face_subdigraph(cfg, face).arcs
        key = frozenset(arcs)
        if key in seen:
            continue
        seen.add(frozenset((j, i) for i, j in arcs))
        cert = _face_certificate(net, arcs, face, seed)
        if cert.kind == BRIDGE_IMPOSSIBLE:
            continue
        if cert.satisfied or not satisfied_only:
            out.append(cert)
    return out


def shared_edge_strata(net: Network) -> list[ExceptionalCertificate]:
    """Every consistent tuple of balanced cycle orientations, with its condition status."""
    e, cycles = shared_edge_structure(net)
    net = _concrete(net)
    options = []
    for c in cycles:
        ring = _cycle_arcs(c)
        m = len(ring)
        orients = []
        for plus in combinations(range(m), m // 2):
            orients.append(tuple(a if i in plus else a[::-1] for i, a in enumerate(ring)))
        options.append(orients)
    out = []
    for size in range(1, len(cycles) + 1):
        for chosen in combinations(range(len(cycles)), size):
            for tup in product(*(options[i] for i in chosen)):
                e_arcs = {a for arcs in tup for a in arcs if tuple(sorted(a)) == e}
                if len(e_arcs) != 1:
                    continue
                arcs = []
                for orient in tup:
                    arcs += [a for a in orient if a not in arcs]
                out.append(_face_certificate(net, tuple(arcs)))
    return out


# --- pendant reduction --------------------------------------------------------------


def leaf_reduce(net: Network) -> tuple[Network, int]:
    """Strip pendant nodes other than 0; each strip doubles the count.

    A stripped leaf's mean-adjusted frequency is added to its neighbor, which
    is how its edge term enters the neighbor's equation at any zero.
    """
    alive = set(range(net.nodes))
    edges = list(net.edges)
    wbar = None
    if not is_generic(net.frequencies) and not any(is_generic(w) for w in net.frequencies):
        wbar = {0: -sum(net.w_bar())} | {v: w for v, w in enumerate(net.w_bar(), start=1)}
    stripped = 0
    while len(edges) > 1:
        leaf = next((v for v in sorted(alive) if v != 0 and sum(v in e for e in edges) == 1), None)
        if leaf is None:
            break
        (edge,) = [e for e in edges if leaf in e]
        parent = edge[0] if edge[1] == leaf else edge[1]
        if wbar is not None:
            wbar[parent] += wbar.pop(leaf)
        edges.remove(edge)
        alive.discard(leaf)
        stripped += 1
    if not stripped:
        return net, 1
    relabel = {v: idx for idx, v in enumerate(sorted(alive))}
    new_edges = tuple(sorted((relabel[i], relabel[j]) for i, j in edges))
    couplings = tuple(net.coupling(*e) for e in edges)
    order = sorted(range(len(edges)), key=lambda k: tuple(sorted((relabel[edges[k][0]], relabel[edges[k][1]]))))
    delays = None
    if net.delays is not None:
        delays = tuple(net.delays[net.edge_index(*edges[k])] for k in order)
    freq = net.frequencies if wbar is None else tuple(wbar[v] for v in sorted(alive))
    reduced = Network(
        len(alive), new_edges, tuple(couplings[k] for k in order), freq, delays, None, name=net.name
    )
    return reduced, 2**stripped


def count(net: Network, seed: int = 0) -> CountReport:
    """Refined count for the families with closed forms."""
    if net.corank == 0:
        bound = 2**net.n
        return CountReport(bound, "tree", bound, 0, bound)
    if unique_cycle(net):
        return unicycle_root_count(net, seed)
    try:
        shared_edge_structure(net)
    except WrongTopology:
        raise WrongTopology("no closed-form count for this topology") from None
    bound = generic_root_count(net, seed)
    strata = [c for c in shared_edge_strata(net) if c.satisfied]
    return CountReport(bound, "shared-edge", bound if not strata else None, None, 1, strata)
