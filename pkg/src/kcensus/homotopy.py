"""Polyhedral homotopy solver, realness screening and orbit construction.

A path starts at the unique root of a cell's tree system and runs in two
stages:

1. the lifted homotopy along the ray t = tau * exp(i theta), in cell
   coordinates x = y * t**v, reparametrized by s = tau**p_min so that the
   smallest positive t-power becomes 1;
2. a parameter homotopy from the coefficients at t = exp(i theta) to the
   target coefficients along a random arc, tracked in sigma = -log(1 - s) so
   that paths escaping to toric infinity show steady log-growth.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

import numpy as np
from scipy.optimize import least_squares

from . import _kernels
from .algsys import LaurentSystem, build_system, kuramoto_system
from .errors import (
    InhomogeneousFrequencies,
    LeafPeelFailure,
    NoBalancedSubnetwork,
    NonUniformMagnitude,
    NotUnicycle,
    OddCycle,
    OrbitCheckFailed,
    UnresolvedGeneric,
    WrongCouplingPattern,
)
from .network import (
    Network,
    cycle_space_basis,
    is_generic,
    resolve_generic,
    tree_path,
    unique_cycle,
)
from .polytope import Triangulation, lifted_heights, triangulate

SOLVER_BOUND = Fraction(1, 5)
S0 = 1e-6
SIGMA_MID, SIGMA_END = 22.0, 28.0
RESIDUAL_TOL = 1e-10
DEDUP_TOL = 1e-8
RAY_RETRIES = 3
GROWTH_DIVERGED = 0.3
NEAR_ZERO = 1e-14
# a stage-2 stall this far out on the torus is an escape toward a singular facial limit
ESCAPE_LOG = float(np.log(1e4))

CONVERGED, DIVERGED, STALLED = "CONVERGED", "DIVERGED", "STALLED"
_STATUS = {_kernels.OK: CONVERGED, _kernels.DIVERGED: DIVERGED, _kernels.STALLED: STALLED}


@dataclass
class PathState:
    cell: int
    status: str
    x: np.ndarray | None = None
    residual: float = float("inf")
    steps: int = 0
    stage: int = 2
    growth: float = 0.0


@dataclass
class Solution:
    x: np.ndarray
    residual: float
    newton_contraction: float
    jacobian_condition: float
    is_real_torus: bool = False
    multiplicity: int = 1
    cells: list = field(default_factory=list)

    @property
    def angles(self) -> np.ndarray:
        return np.mod(np.angle(self.x), 2 * np.pi)


@dataclass
class SolutionSet:
    solutions: list
    paths: list
    theta: float
    attempts: int
    lifting_seed: int

    @property
    def raw_path_count(self) -> int:
        return len(self.paths)

    @property
    def distinct_count(self) -> int:
        return len(self.solutions)

    @property
    def failed(self) -> int:
        return sum(p.status == STALLED for p in self.paths)

    @property
    def diverged(self) -> int:
        return sum(p.status == DIVERGED for p in self.paths)

    @property
    def converged(self) -> int:
        return sum(p.status == CONVERGED for p in self.paths)

    @property
    def real_count(self) -> int:
        return sum(s.is_real_torus for s in self.solutions)

    @property
    def max_residual(self) -> float:
        return max((s.residual for s in self.solutions), default=0.0)


@dataclass
class CellHomotopy:
    cell: tuple
    normal: np.ndarray
    heights: np.ndarray
    q: np.ndarray
    P: np.ndarray
    theta: float


def thread_count() -> int:
    cap = os.environ.get("KCENSUS_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n


# --- homotopy pieces -------------------------------------------------------------


def start_coefficients(system: LaurentSystem, rng: np.random.Generator) -> np.ndarray:
    """Random unit-modulus coefficients on the support of the system."""
    phases = np.exp(2j * np.pi * rng.uniform(size=system.coeffs.shape))
    return np.where(system.coeffs != 0, phases, 0)


def lifted_homotopy(system: LaurentSystem, tri: Triangulation, index: int, theta: float, start=None) -> CellHomotopy:
    """Stage-1 data for one cell; ``start`` replaces the coefficients (default: the system's own)."""
    start = system.coeffs if start is None else start
    cell = tri.cells[index]
    normal = tri.normals[index]
    heights = lifted_heights(tri.cfg, tri.lifting, normal)
    support = np.any(system.coeffs != 0, axis=0)
    positive = [h for k, h in enumerate(heights) if support[k] and h > 0]
    pmin = min(positive) if positive else Fraction(1)
    q = np.array([float(h / pmin) if support[k] else 0.0 for k, h in enumerate(heights)])
    hf = np.array([float(h) for h in heights])
    P = start * np.exp(1j * theta * hf)[None, :]
    return CellHomotopy(cell, np.array([float(v) for v in normal]), hf, q, P, theta)


def start_solution(C: np.ndarray, tri: Triangulation, cell) -> np.ndarray:
    """Root of the tree system (constant + cell columns of C) by leaf peeling."""
    cfg = tri.cfg
    n = C.shape[0]
    cell = [p for p in cell if p != 0]
    for p in cell:
        i, j = cfg.arcs[p]
        rows = np.nonzero(C[:, p])[0] + 1
        if any(r not in (i, j) for r in rows):
            raise LeafPeelFailure("tree system is not in leaf-peelable form")
    incident = {v: {p for p in cell if v in cfg.arcs[p]} for v in range(n + 1)}
    values = {}
    remaining = set(range(1, n + 1))
    while len(values) < len(cell):
        leaf = next((v for v in sorted(remaining) if len(incident[v] - values.keys()) == 1), None)
        if leaf is None:
            raise LeafPeelFailure("no leaf left to peel")
        (p,) = incident[leaf] - values.keys()
        c = C[leaf - 1, p]
        rhs = C[leaf - 1, 0] + sum(C[leaf - 1, r] * values[r] for r in incident[leaf] if r in values)
        if c == 0:
            raise LeafPeelFailure(f"leaf {leaf} has no term for its arc")
        m = -rhs / c
        if not np.isfinite(m) or abs(m) < NEAR_ZERO:
            raise LeafPeelFailure(f"leaf {leaf} forces a zero monomial")
        values[p] = m
        remaining.discard(leaf)
    y = {0: 1.0 + 0j}
    arcs = [(cfg.arcs[p], values[p]) for p in cell]
    while len(y) < n + 1:
        for (i, j), m in arcs:
            if i in y and j not in y:
                y[j] = y[i] / m
            elif j in y and i not in y:
                y[i] = y[j] * m
    return np.array([y[v] for v in range(1, n + 1)], dtype=np.complex128)


def _lognorm(x) -> float:
    return float(np.max(np.abs(np.log(np.abs(x)))))


def track_cell(system: LaurentSystem, tri: Triangulation, index: int, theta: float, c_arc: float, start) -> PathState:
    expo = np.ascontiguousarray(system.exponents)
    hom = lifted_homotopy(system, tri, index, theta, start)
    try:
        y0 = start_solution(start, tri, hom.cell)
    except LeafPeelFailure:
        return PathState(index, STALLED, stage=0)
    zeros = np.zeros_like(hom.P)
    C_s0 = hom.P * (S0 ** hom.q)[None, :]
    y, _, _, _ = _kernels.newton(expo, C_s0, y0, 20, 1e-14)
    code, y, _, steps1 = _kernels.track(expo, hom.P, hom.q, zeros, 0.0, 0, y, S0, 1.0, 0.01, 1e-8, 0.1, 1e-9)
    if code != _kernels.OK:
        return PathState(index, _STATUS[code], y, steps=steps1, stage=1)

    omega = np.array([float(v) for v in tri.lifting.values])
    x = y * np.exp(1j * theta * hom.normal)
    C0 = start * np.exp(1j * theta * omega)[None, :]
    D = system.coeffs - C0
    x, _, _, _ = _kernels.newton(expo, C0, x, 10, 1e-14)
    qz = np.zeros(len(omega))
    code, x, _, steps2 = _kernels.track(expo, C0, qz, D, c_arc, 1, x, 0.0, SIGMA_MID, 0.05, 1e-8, 0.5, 1e-9)
    steps = steps1 + steps2
    if code != _kernels.OK:
        return PathState(index, _escaped(code, x), x, steps=steps)
    mid = _lognorm(x)
    code, x, _, steps3 = _kernels.track(expo, C0, qz, D, c_arc, 1, x, SIGMA_MID, SIGMA_END, 0.5, 1e-8, 0.5, 1e-9)
    steps += steps3
    if code != _kernels.OK:
        return PathState(index, _escaped(code, x), x, steps=steps)
    growth = _lognorm(x) - mid
    xf, _, _, res = _kernels.newton(expo, np.ascontiguousarray(system.coeffs), x, 30, 1e-15)
    close = np.linalg.norm(xf - x) <= 1e-6 * (1 + np.linalg.norm(x))
    if close and res < RESIDUAL_TOL and growth < GROWTH_DIVERGED:
        return PathState(index, CONVERGED, xf, float(res), steps, growth=growth)
    if growth >= GROWTH_DIVERGED:
        return PathState(index, DIVERGED, x, steps=steps, growth=growth)
    return PathState(index, STALLED, x, steps=steps, growth=growth)


def _escaped(code, x) -> str:
    if code == _kernels.DIVERGED or _lognorm(x) > ESCAPE_LOG:
        return DIVERGED
    return STALLED


def _same_point(a, b) -> bool:
    scale = max(1.0, float(np.max(np.abs(a))))
    return float(np.max(np.abs(a - b))) <= DEDUP_TOL * scale


def _finish(system, paths):
    sols = []
    for p in paths:
        if p.status != CONVERGED:
            continue
        for s in sols:
            if _same_point(s.x, p.x):
                s.multiplicity += 1
                s.cells.append(p.cell)
                break
        else:
            J = system.jacobian(p.x)
            f = system(p.x)
            step = float(np.linalg.norm(np.linalg.lstsq(J, -f, rcond=None)[0]))
            sol = Solution(p.x, float(np.max(np.abs(f))), step, float(np.linalg.cond(J)), cells=[p.cell])
            sol.is_real_torus = screen_real(sol, system)
            sols.append(sol)
    return sols


def solve_system(
    system: LaurentSystem,
    tri: Triangulation,
    seed: int = 0,
    cells=None,
    threads: int | None = None,
    retries: int = RAY_RETRIES,
) -> SolutionSet:
    """Track one path per cell; retry with a fresh ray while paths fail."""
    rng = np.random.default_rng([seed, 0x7A7])
    indices = list(range(len(tri.cells))) if cells is None else [tri.cells.index(c) for c in cells]
    threads = threads or thread_count()
    best = None
    for attempt in range(retries + 1):
        theta = float(rng.uniform(0, 2 * np.pi))
        c_arc = float(rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0]))
        start = start_coefficients(system, rng)
        if threads > 1:
            with ThreadPoolExecutor(threads) as pool:
                paths = list(pool.map(partial(track_cell, system, tri, theta=theta, c_arc=c_arc, start=start), indices))
        else:
            paths = [track_cell(system, tri, i, theta, c_arc, start) for i in indices]
        stalled = sum(p.status == STALLED for p in paths)
        diverged = sum(p.status == DIVERGED for p in paths)
        if best is None or (stalled, diverged) < best[0]:
            best = ((stalled, diverged), paths, theta)
        if stalled == 0 and diverged == 0:
            break
    _, paths, theta = best
    return SolutionSet(_finish(system, paths), paths, theta, attempt + 1, tri.seed)


def solve(net: Network, seed: int = 0, variant: str = "kuramoto", threads: int | None = None) -> SolutionSet:
    """Solve f_G (or a variant) for concrete or seed-sampled parameters."""
    if net.has_generic():
        net, _ = resolve_generic(net, seed)
    system = build_system(net, variant)
    tri = triangulate(net, seed, SOLVER_BOUND)
    return solve_system(system, tri, seed, threads=threads)


# --- realness ---------------------------------------------------------------------------


def screen_real(sol, system: LaurentSystem, tol: float = 1e-8) -> bool:
    """On the torus within tol, and Newton in angle coordinates converges nearby."""
    x = sol.x if isinstance(sol, Solution) else np.asarray(sol, dtype=complex)
    if float(np.max(np.abs(np.abs(x) - 1))) >= tol:
        return False
    theta0 = np.angle(x)
    theta = theta0.copy()
    for _ in range(30):
        z = np.exp(1j * theta)
        f = system(z)
        J = system.jacobian(z) * (1j * z)[None, :]
        A = np.vstack([J.real, J.imag])
        b = -np.concatenate([f.real, f.imag])
        d = np.linalg.lstsq(A, b, rcond=None)[0]
        theta += d
        if np.linalg.norm(d) < 1e-14:
            break
    drift = np.abs(np.angle(np.exp(1j * (theta - theta0))))
    ok = system.residual(np.exp(1j * theta)) < RESIDUAL_TOL and float(np.max(drift)) < 1e-6
    if isinstance(sol, Solution):
        sol.is_real_torus = ok
    return ok


def sine_residual(net: Network, theta) -> np.ndarray:
    """w_bar_i - sum_j k_ij sin(theta_i - theta_j), theta_0 = 0."""
    th = np.concatenate([[0.0], np.asarray(theta, dtype=float)])
    out = np.array([complex(w) for w in net.w_bar()])
    for (i, j), k in zip(net.edges, net.couplings):
        k = complex(k)
        if i:
            out[i - 1] -= k * np.sin(th[i] - th[j])
        if j:
            out[j - 1] -= k * np.sin(th[j] - th[i])
    return out


# --- orbits ---------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class OrbitParametrization:
    """x(lambda) = base * lambda**mu over C*, optionally with a real restriction."""

    base: np.ndarray
    mu: np.ndarray
    tree_arcs: tuple
    eta: tuple
    subnetwork: tuple
    real_scale: float | None = None

    def __call__(self, lam) -> np.ndarray:
        return self.base * complex(lam) ** self.mu

    def real_lambda(self, t) -> complex:
        return self.real_scale * np.exp(1j * t) / 2j

    def real_point(self, t) -> np.ndarray:
        return self(self.real_lambda(t))

    @property
    def angle_offsets(self) -> np.ndarray:
        return np.mod(np.angle(self.base * (self.real_scale / 2j) ** self.mu), 2 * np.pi)

    def angles(self, t) -> np.ndarray:
        return np.mod(self.angle_offsets + self.mu * t, 2 * np.pi)

    def contains(self, x, tol=1e-9) -> bool:
        """Whether x lies on this curve."""
        x = np.asarray(x, dtype=complex)
        j = int(np.argmax(np.abs(self.mu)))
        if self.mu[j] == 0:
            return bool(np.allclose(x, self.base, atol=tol))
        e = int(self.mu[j])
        r = (x[j] / self.base[j]) ** (1.0 / e)
        for k in range(abs(e)):
            lam = r * np.exp(2j * np.pi * k / e)
            if np.max(np.abs(self(lam) - x)) <= tol * max(1.0, float(np.max(np.abs(x)))):
                return True
        return False


def _propagate(net: Network, relations):
    """relations: (u, w, coef, power) meaning x_u = x_w * coef * lambda**power; x_0 = 1."""
    adj = {}
    for u, w, c, p in relations:
        adj.setdefault(w, []).append((u, c, p))
        adj.setdefault(u, []).append((w, 1 / c, -p))
    base = {0: 1.0 + 0j}
    mu = {0: 0}
    stack = [0]
    while stack:
        w = stack.pop()
        for u, c, p in adj.get(w, ()):
            if u not in base:
                base[u] = base[w] * c
                mu[u] = mu[w] + p
                stack.append(u)
    if len(base) != net.nodes:
        raise OrbitCheckFailed("orbit relations do not span the network")
    nodes = range(1, net.nodes)
    return np.array([base[v] for v in nodes]), np.array([mu[v] for v in nodes], dtype=np.int64)


def _a(net, arc) -> complex:
    return complex(net.coupling(*arc)) / 2j


def verify_orbit(net: Network, orbit: OrbitParametrization, samples: int = 20) -> float:
    """Max residual of the homogeneous system over lambda on |lambda| in {0.5, 2}."""
    system = kuramoto_system(net)
    per = max(1, samples // 2)
    worst = 0.0
    for radius in (0.5, 2.0):
        for k in range(per):
            lam = radius * np.exp(2j * np.pi * (k + 0.5) / per)
            worst = max(worst, system.residual(orbit(lam)))
    return worst


def _require_homogeneous(net):
    if not net.is_homogeneous():
        raise InhomogeneousFrequencies("orbits need homogeneous frequencies")
    if any(is_generic(k) for k in net.couplings):
        raise UnresolvedGeneric("orbits need concrete couplings")


def _pendant_relations(net, covered, signs):
    """x_c = sign * x_p for every edge outside the cycle part, in BFS order away from it."""
    rel = []
    seen = set(covered)
    frontier = sorted(covered)
    idx = 0
    while frontier:
        nxt = []
        for p in frontier:
            for c in net.neighbors(p):
                if c not in seen:
                    s = signs[idx] if signs is not None else 1
                    idx += 1
                    rel.append((c, p, complex(s), 0))
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return rel


def unicycle_orbits(net: Network, signs=None, check: bool = True) -> list[OrbitParametrization]:
    """One complex orbit per balanced subnetwork, coinciding curves merged."""
    from .census import balanced_subnetworks

    _require_homogeneous(net)
    cycle = unique_cycle(net)
    if not cycle:
        raise NotUnicycle("graph must contain exactly one cycle")
    if len(cycle) % 2:
        raise OddCycle("odd cycles have no balanced subnetworks")
    balanced = balanced_subnetworks(net)
    if not balanced:
        raise NoBalancedSubnetwork("couplings admit no balanced subnetwork")
    squares = [complex(net.coupling(cycle[i], cycle[(i + 1) % len(cycle)])) ** 2 for i in range(len(cycle))]
    if any(abs(q - squares[0]) > 1e-12 * abs(squares[0]) for q in squares):
        raise NonUniformMagnitude("the orbit formula needs k**2 constant on the cycle")
    out = []
    for H in balanced:
        orbit = _cycle_orbit(net, cycle, H, signs)
        if check:
            worst = verify_orbit(net, orbit)
            if worst > RESIDUAL_TOL:
                raise OrbitCheckFailed(f"orbit residual {worst:.2e}")
        if not any(_same_curve(orbit, o) for o in out):
            out.append(orbit)
    return out


def _cycle_orbit(net, cycle, H, signs):
    # drop the arc on the closing edge of the traversal; its entry is set to -1
    arcs = list(H.arcs)
    eta = list(H.entries)
    if eta[-1] != -1:
        eta = [-e for e in eta]
    tree, eta_t = arcs[:-1], eta[:-1]
    rel = [(i, j, h / _a(net, (i, j)), 1) for (i, j), h in zip(tree, eta_t)]
    rel += _pendant_relations(net, cycle, signs)
    base, mu = _propagate(net, rel)
    return OrbitParametrization(base, mu, tuple(tree), tuple(eta_t), tuple(arcs))


def _same_curve(a: OrbitParametrization, b: OrbitParametrization) -> bool:
    if not (np.array_equal(a.mu, b.mu) or np.array_equal(a.mu, -b.mu)):
        return False
    return all(a.contains(b(lam)) for lam in (0.7 + 0.2j, -1.3 + 0.5j, 0.4 - 1.1j))


def unicycle_orbit(net: Network, index: int = 0, signs=None) -> OrbitParametrization:
    return unicycle_orbits(net, signs)[index]


def _common_real_scale(values) -> float:
    vals = [complex(v) for v in values]
    if any(abs(v.imag) > 1e-12 for v in vals):
        raise NonUniformMagnitude("couplings on the cycle must be real")
    c = abs(vals[0].real)
    if any(abs(abs(v.real) - c) > 1e-12 * max(1.0, c) for v in vals):
        raise NonUniformMagnitude("couplings on the cycle must share one magnitude")
    return c


def _with_real(orbit: OrbitParametrization, c: float) -> OrbitParametrization:
    out = OrbitParametrization(orbit.base, orbit.mu, orbit.tree_arcs, orbit.eta, orbit.subnetwork, c)
    ts = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    dev = max(float(np.max(np.abs(np.abs(out.real_point(t)) - 1))) for t in ts)
    if dev > 1e-12:
        raise OrbitCheckFailed(f"real restriction leaves the torus by {dev:.2e}")
    return out


def real_orbits(net: Network, signs=None) -> list[OrbitParametrization]:
    _require_homogeneous(net)
    cycle = unique_cycle(net)
    if not cycle:
        raise NotUnicycle("graph must contain exactly one cycle")
    ring = [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]
    c = _common_real_scale(net.coupling(*e) for e in ring)
    return [_with_real(o, c) for o in unicycle_orbits(net, signs)]


def real_orbit(net: Network, index: int = 0, signs=None) -> OrbitParametrization:
    return real_orbits(net, signs)[index]


def shared_edge_orbit(net: Network) -> OrbitParametrization:
    """Orbit for d even cycles sharing one edge with k = s off it and s*d on it."""
    from .census import shared_edge_structure

    _require_homogeneous(net)
    e, cycles = shared_edge_structure(net)
    d = len(cycles)
    if d == 1:
        return real_orbit(net)
    others = [complex(k) for edge, k in zip(net.edges, net.couplings) if edge != e]
    s = others[0]
    if any(abs(k - s) > 1e-12 * abs(s) for k in others) or abs(complex(net.coupling(*e)) - d * s) > 1e-12 * abs(s):
        raise WrongCouplingPattern("need k = s off the shared edge and k = s*d on it")
    # facet orientation: every arc runs from odd to even BFS depth
    from .network import bfs_depths

    depth = bfs_depths(net)

    def orient(edge):
        i, j = edge
        return (i, j) if depth[i] % 2 else (j, i)

    parent = list(range(net.nodes))

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    tree, extra = [], []
    for edge in [e] + [x for x in net.edges if x != e]:
        a, b = find(edge[0]), find(edge[1])
        if a == b:
            extra.append(orient(edge))
        else:
            parent[a] = b
            tree.append(orient(edge))
    e_arc = orient(e)
    eta = np.zeros(len(tree), dtype=np.int64)
    for i, j in extra:
        vec = np.zeros(len(tree), dtype=np.int64)
        for pos, sign in tree_path(tree, j, i):
            vec[pos] = -sign
        if vec[tree.index(e_arc)] < 0:
            vec = -vec
        eta += vec
    rel = [(i, j, int(h) / _a(net, (i, j)), 1) for (i, j), h in zip(tree, eta)]
    base, mu = _propagate(net, rel)
    orbit = OrbitParametrization(base, mu, tuple(tree), tuple(int(h) for h in eta), tuple(tree + extra))
    worst = verify_orbit(net, orbit)
    if worst > RESIDUAL_TOL:
        raise OrbitCheckFailed(f"orbit residual {worst:.2e}")
    if abs(s.imag) < 1e-12:
        orbit = _with_real(orbit, s.real)
    return orbit


# --- numeric facial zeros -----------------------------------------------------------


def facial_torus_zero(net: Network, arcs, seed: int = 0, starts: int = 64):
    """Search a torus zero of the facial system with face digraph ``arcs``.

    Zeros correspond to kernel vectors u = sum_j l_j eta_j of the face
    incidence matrix with nonzero entries and u**eta_i = a**eta_i for every
    cycle vector eta_i. The overdetermined system in l is attacked by
    multi-start least squares; a hit is turned into x by tree propagation and
    checked on the facial system itself.
    """
    arcs = list(arcs)
    basis = np.array(cycle_space_basis(arcs), dtype=np.int64)
    a = np.array([_a(net, arc) for arc in arcs])
    d = len(basis)
    if d == 0:
        return None
    target = np.array([np.prod(a**eta) for eta in basis])
    rng = np.random.default_rng(seed)

    def unpack(z):
        lam = np.concatenate([[1.0 + 0j], z[: d - 1] + 1j * z[d - 1 :]])
        return lam @ basis

    def resid(z):
        u = unpack(z)
        vals = np.array([np.prod(u.astype(complex) ** eta) for eta in basis]) / target - 1
        return np.concatenate([vals.real, vals.imag])

    for _ in range(starts if d > 1 else 1):
        z = rng.normal(size=2 * (d - 1))
        if d > 1:
            try:
                z = least_squares(resid, z, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=400).x
            except (ValueError, ZeroDivisionError, FloatingPointError):
                continue
        u = unpack(z)
        if np.min(np.abs(u)) < 1e-6 or np.max(np.abs(resid(z))) > 1e-10:
            continue
        x = _face_point(net, arcs, u, a)
        if x is not None:
            return x
    return None


def _face_point(net, arcs, u, a):
    in_tree = set()
    parent = list(range(net.nodes))

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    rel = []
    for idx, (i, j) in enumerate(arcs):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            in_tree.add(idx)
            rel.append((i, j, u[idx] / a[idx], 0))
    for v in range(net.nodes):
        if find(v) != find(0) and all(v not in arc for arc in arcs):
            rel.append((v, 0, 1.0 + 0j, 0))
    # components of the face missing node 0 hang off it with coordinate 1
    roots = {find(v) for arc in arcs for v in arc}
    for r in roots:
        if r != find(0):
            rep = min(v for v in range(net.nodes) if find(v) == r)
            rel.append((rep, 0, 1.0 + 0j, 0))
            parent[r] = find(0)
    try:
        x, _ = _propagate(net, rel)
    except OrbitCheckFailed:
        return None
    xs = np.concatenate([[1.0], x])
    mono = np.array([xs[i] / xs[j] for i, j in arcs])
    Q = np.zeros((net.n, len(arcs)))
    for col, (i, j) in enumerate(arcs):
        if i:
            Q[i - 1, col] += 1
        if j:
            Q[j - 1, col] -= 1
    res = np.max(np.abs(Q @ (mono * a)))
    return x if res < 1e-8 * max(1.0, float(np.max(np.abs(mono * a)))) else None
