from fractions import Fraction

import numpy as np
import pytest
from _nets import (
    C4_STRATA,
    c4,
    corpus,
    cycle,
    net,
    path,
    shared_edge_pair,
    with_pendants,
)

from kcensus.algsys import facial_system, kuramoto_system, randomized_system
from kcensus.census import balanced_subnetworks
from kcensus.errors import (
    InhomogeneousFrequencies,
    NoBalancedSubnetwork,
    NonUniformMagnitude,
    NotUnicycle,
    OddCycle,
    WrongCouplingPattern,
)
from kcensus.homotopy import (
    SOLVER_BOUND,
    Solution,
    facial_torus_zero,
    lifted_homotopy,
    real_orbit,
    real_orbits,
    screen_real,
    shared_edge_orbit,
    sine_residual,
    solve,
    start_coefficients,
    start_solution,
    thread_count,
    unicycle_orbit,
    unicycle_orbits,
    verify_orbit,
)
from kcensus.network import resolve_generic
from kcensus.polytope import adjacency_polytope, faces, triangulate

C4_EDGES = [(0, 1), (1, 2), (2, 3), (3, 0)]


def c4_with(ks, freq="homogeneous"):
    return net(4, [(i, j, k) for (i, j), k in zip(C4_EDGES, ks)], freq)


def _concrete(g, seed=0):
    return resolve_generic(g, seed)[0] if g.has_generic() else g


# --- homotopy pieces ---------------------------------------------------------------


def test_lifted_homotopy_at_t_one_is_the_system():
    g = _concrete(c4("generic"))
    sys_ = kuramoto_system(g)
    tri = triangulate(g, 0, SOLVER_BOUND)
    for idx in range(len(tri)):
        hom = lifted_homotopy(sys_, tri, idx, theta=0.0)
        np.testing.assert_array_equal(hom.P * 1.0 ** hom.q[None, :], sys_.coeffs)


def test_lifted_heights_are_symmetric():
    g = _concrete(c4("generic"))
    sys_ = kuramoto_system(g)
    tri = triangulate(g, 3, SOLVER_BOUND)
    hom = lifted_homotopy(sys_, tri, 0, theta=1.0)
    h = np.asarray(hom.heights) - hom.heights[0]
    lift = np.array([float(v) for v in tri.lifting.values])
    # heights differ from the lifting by a linear function, so pairs (p, -p) sum alike
    for e in range(len(g.edges)):
        assert lift[2 * e + 1] == lift[2 * e + 2]
        assert h[2 * e + 1] + h[2 * e + 2] == pytest.approx(2 * lift[2 * e + 1])


def test_start_solution_single_arc():
    g = net(2, [(0, 1, 1)], [0, 1])
    sys_ = kuramoto_system(g)
    tri = triangulate(g)
    cfg = tri.cfg
    plus = cfg.points.index((1,))
    (x1,) = start_solution(sys_.coeffs, tri, (plus,))
    a = 1 / 2j
    assert x1 == pytest.approx(0.5 / a)


def _tree_system(sys_, cell):
    keep = np.zeros(sys_.coeffs.shape[1], bool)
    keep[[0, *cell]] = True
    return sys_.with_coeffs(np.where(keep[None, :], sys_.coeffs, 0))


@pytest.mark.parametrize("g", [path(3), c4("generic"), c4("stratum3")])
def test_start_solution_is_a_regular_zero(g):
    g = _concrete(g)
    sys_ = kuramoto_system(g)
    tri = triangulate(g, 0, SOLVER_BOUND)
    start = sys_.with_coeffs(start_coefficients(sys_, np.random.default_rng(1)))
    for cell in tri.cells:
        tree = _tree_system(start, cell)
        x = start_solution(start.coeffs, tri, cell)
        assert tree.residual(x) < 1e-13
        assert np.linalg.cond(tree.jacobian(x)) < 1e10


def test_start_solution_path_back_substitution():
    g = net(3, [(0, 1, 1), (1, 2, 2)], [0, 1, 2])
    sys_ = kuramoto_system(g)
    tri = triangulate(g)
    cfg = tri.cfg
    cell = (cfg.arcs.index((1, 0)), cfg.arcs.index((2, 1)))
    a10, a21 = 1 / 2j, 2 / 2j
    w1, w2 = (complex(w) for w in g.w_bar())
    # node 2 is the leaf: w2 - a21 x2/x1 = 0, then node 1: w1 - a10 x1 + a21 x2/x1 = 0
    m21 = w2 / a21
    x1 = (w1 + a21 * m21) / a10
    np.testing.assert_allclose(start_solution(sys_.coeffs, tri, cell), [x1, x1 * m21])


# --- solving -----------------------------------------------------------------------


def test_k2_two_endpoints():
    sols = solve(net(2, [(0, 1, "generic")]), seed=4)
    assert sols.raw_path_count == sols.distinct_count == 2
    assert sols.failed == sols.diverged == 0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_c4_generic_twelve_distinct(seed):
    g = _concrete(cycle(4), seed)
    sols = solve(g, seed)
    assert sols.raw_path_count == 12 and sols.distinct_count == 12
    xs = [s.x for s in sols.solutions]
    for i in range(12):
        for j in range(i):
            assert np.max(np.abs(xs[i] - xs[j])) > 1e-6
    assert all(s.jacobian_condition < 1e10 for s in sols.solutions)
    assert sols.max_residual < 1e-10


@pytest.mark.parametrize("m", [3, 5, 6])
def test_path_count_equals_volume(m):
    g = _concrete(cycle(m), m)
    sols = solve(g, m)
    assert sols.raw_path_count == len(triangulate(g, m, SOLVER_BOUND))
    assert sols.distinct_count == sols.raw_path_count


def test_randomization_invariance():
    g = _concrete(c4("stratum3"))
    sys_ = kuramoto_system(g)
    rand, _ = randomized_system(sys_, seed=9)
    sols = solve(g, 0)
    assert all(rand.residual(s.x) < 1e-9 for s in sols.solutions)
    assert all(sys_.residual(s.x) < 1e-9 for s in sols.solutions)


def _key(sols):
    return [(p.cell, p.status, p.steps) for p in sols.paths], [s.x.tolist() for s in sols.solutions]


def test_solver_is_deterministic():
    g = corpus("c4_stratum2")
    a, b = solve(g, 5, threads=1), solve(g, 5, threads=4)
    assert _key(a) == _key(b)
    assert a.theta == b.theta and a.attempts == b.attempts


def test_thread_cap(monkeypatch):
    monkeypatch.setenv("KCENSUS_THREADS", "1")
    assert thread_count() == 1
    monkeypatch.setenv("KCENSUS_THREADS", "junk")
    assert thread_count() >= 1


@pytest.mark.parametrize("stratum", list(C4_STRATA))
def test_strata_counts(stratum):
    assert solve(c4(stratum), 0).distinct_count == C4_STRATA[stratum][1]


def test_leaf_doubles_solver_count():
    base = _concrete(c4("generic"))
    ks = [str(base.coupling(i, j)) for i, j in C4_EDGES]
    edges = [(i, j, k) for (i, j), k in zip(C4_EDGES, ks)] + [(1, 4, "3/2")]
    leafy = net(5, edges, [str(w) for w in base.frequencies] + ["1/3"])
    assert solve(leafy, 0).distinct_count == 2 * solve(base, 0).distinct_count


# --- realness ---------------------------------------------------------------------


def _net_with_zero_at(theta, ks=(1, 1, 1, 1)):
    """C4 whose frequencies make exp(i theta) an exact zero."""
    th = np.concatenate([[0.0], theta])
    w = np.zeros(4)
    for (i, j), k in zip(C4_EDGES, ks):
        w[i] += k * np.sin(th[i] - th[j])
        w[j] += k * np.sin(th[j] - th[i])
    return c4_with(ks, w.tolist())


def test_screen_real_examples():
    g = _net_with_zero_at(np.array([np.pi, np.pi / 2, 0.0]))
    sys_ = kuramoto_system(g)
    assert sys_.residual(np.array([-1, 1j, 1])) < 1e-12
    assert screen_real(np.array([-1, 1j, 1]), sys_)
    assert screen_real(np.array([1, -1, 1j]), kuramoto_system(_net_with_zero_at(np.array([0, np.pi, np.pi / 2]))))
    assert not screen_real(np.array([2, 1, 1]), sys_)


def test_screen_sets_flag():
    g = _net_with_zero_at(np.array([0.3, 0.5, 0.2]))
    sys_ = kuramoto_system(g)
    x = np.exp(1j * np.array([0.3, 0.5, 0.2]))
    sol = Solution(x, sys_.residual(x), 0.0, 1.0)
    assert screen_real(sol, sys_) and sol.is_real_torus


def test_real_solutions_satisfy_sine_form():
    g = c4_with([1, "3/2", 2, "5/4"], [0, "1/10", "-1/5", "1/10"])
    sols = solve(g, 0)
    real = [s for s in sols.solutions if s.is_real_torus]
    assert real
    for s in real:
        assert np.max(np.abs(sine_residual(g, s.angles))) < 1e-9


# --- orbits -------------------------------------------------------------------------


def test_uniform_c4_has_three_orbits():
    g = corpus("c4_uniform_homogeneous")
    orbits = unicycle_orbits(g)
    assert len(orbits) == 3
    sys_ = kuramoto_system(g)
    for o in orbits:
        assert np.any(o.mu)
        assert verify_orbit(g, o, 20) < 1e-10
        for r in (1e-2, 1e2):
            for ang in np.linspace(0, 2 * np.pi, 10, endpoint=False):
                x = o(r * np.exp(1j * ang))
                scale = max(1.0, float(np.max(np.abs(x))) ** 2)
                assert sys_.residual(x) < 1e-10 * scale


def _paper_forms(k10, k12, k32, k30):
    k01, k03 = k10, k30
    return [
        lambda lam: [-2j * lam / k10, -k12 / k10, 2j * lam / k30],
        lambda lam: [2j * lam / k10, -k12 / k10, k03 / (2j * lam)],
        lambda lam: [k01 / (2j * lam), -k01 * k12 / (4 * lam**2), -k03 / (2j * lam)],
    ]


@pytest.mark.parametrize("ks", [(1, 1, 1, 1), (2, -2, -2, 2), (3, 3, -3, -3)])
def test_c4_orbits_match_closed_forms(ks):
    k10, k12, k32, k30 = ks
    g = c4_with([k10, k12, k32, k30])
    orbits = unicycle_orbits(g)
    assert len(orbits) == 3
    hits = []
    for form in _paper_forms(*ks):
        on = [idx for idx, o in enumerate(orbits) if all(o.contains(np.array(form(lam))) for lam in (0.4 + 0.3j, -1.2 + 2j, 3j))]
        assert len(on) == 1
        hits += on
    assert sorted(hits) == [0, 1, 2]


def test_balanced_without_uniform_squares():
    g = c4_with([2, 1, 3, 6])  # k10 k32 = k12 k30 but k**2 is not constant
    assert balanced_subnetworks(g)
    with pytest.raises(NonUniformMagnitude):
        unicycle_orbits(g)


def test_perturbed_orbit_is_detected():
    g = corpus("c4_uniform_homogeneous")
    o = unicycle_orbit(g)
    bad = type(o)(o.base + 1e-3, o.mu, o.tree_arcs, o.eta, o.subnetwork)
    assert verify_orbit(g, bad) > 1e-4


def test_pendant_orbits():
    g = with_pendants([(i, j, 1) for i, j in C4_EDGES], 4, [1], "homogeneous")
    plus = unicycle_orbits(g)
    minus = unicycle_orbits(g, signs=[-1])
    for a, b in zip(plus, minus):
        assert verify_orbit(g, a) < 1e-10 and verify_orbit(g, b) < 1e-10
        assert a.base[3] == pytest.approx(a.base[0]) and b.base[3] == pytest.approx(-b.base[0])


def test_orbit_errors():
    with pytest.raises(NoBalancedSubnetwork):
        unicycle_orbits(c4_with([1, "13/10", "-7/10", "9/5"]))
    with pytest.raises(OddCycle):
        unicycle_orbits(net(3, [(0, 1, 1), (1, 2, 1), (0, 2, 1)], "homogeneous"))
    with pytest.raises(NotUnicycle):
        unicycle_orbits(net(4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)], "homogeneous"))
    with pytest.raises(InhomogeneousFrequencies):
        unicycle_orbits(c4("uniform"))
    with pytest.raises(NonUniformMagnitude):
        real_orbits(c4_with([2, 1, 3, 6]))
    with pytest.raises(NonUniformMagnitude):
        real_orbits(c4_with(["2j", "2j", "2j", "2j"]))


def test_real_orbits_lie_on_torus():
    g = corpus("c4_uniform_homogeneous")
    orbits = real_orbits(g)
    assert len(orbits) == 3
    sys_ = kuramoto_system(g)
    for o in orbits:
        for t in np.linspace(0, 2 * np.pi, 64, endpoint=False):
            x = o.real_point(t)
            assert np.max(np.abs(np.abs(x) - 1)) < 1e-12
            assert sys_.residual(x) < 1e-10
            np.testing.assert_allclose(np.exp(1j * o.angles(t)), x, atol=1e-12)
    offsets = sorted(tuple(np.round(o.angle_offsets / np.pi).astype(int) % 2) for o in orbits)
    assert all(set(off) <= {0, 1} for off in offsets)


def test_real_orbit_uniform_scaling():
    for s in (1, 3):
        g = c4_with([s] * 4)
        assert verify_orbit(g, real_orbit(g)) < 1e-10


@pytest.mark.parametrize("s", [1, 2, "1/2"])
def test_shared_edge_orbit_closed_form(s):
    g = shared_edge_pair(s)
    o = shared_edge_orbit(g)
    sv = float(Fraction(s))
    assert verify_orbit(g, o) < 1e-10
    for lam in (0.5 + 0.5j, -2 + 0.1j, 1.7j):
        assert o.contains(np.array([-2j * lam / sv, 1, 2j * lam / sv, -1, 2j * lam / sv]))


def test_shared_edge_real_set():
    o = shared_edge_orbit(shared_edge_pair(1))
    for t in np.linspace(0, 2 * np.pi, 16, endpoint=False):
        expected = np.mod([t + np.pi, 0, t, np.pi, t], 2 * np.pi)
        got = o.angles(t)
        assert np.max(np.abs(np.angle(np.exp(1j * (got - expected))))) < 1e-12


def test_shared_edge_errors():
    bad = net(6, [(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (0, 5, 1), (1, 4, 3)], "homogeneous")
    with pytest.raises(WrongCouplingPattern):
        shared_edge_orbit(bad)


def test_shared_edge_single_cycle_delegates():
    g = corpus("c4_uniform_homogeneous")
    assert shared_edge_orbit(g).real_scale is not None


def test_facial_torus_zero_on_balanced_face():
    g = corpus("c4_uniform_homogeneous")
    H = balanced_subnetworks(g)[0]
    x = facial_torus_zero(g, H.arcs, seed=0)
    assert x is not None
    cfg = adjacency_polytope(g)
    face = next(f for f in faces(cfg, triangulate(g)) if {cfg.arcs[p] for p in f.points} == set(H.arcs))
    assert facial_system(kuramoto_system(g, cfg), face).residual(x) < 1e-8
