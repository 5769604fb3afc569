"""Laurent systems attached to a network: Kuramoto, power-flow, phase-delay.

All systems share the support of the adjacency polytope, stored densely:
``exponents`` is (m, n) with one row per point in configuration order and
``coeffs`` is (n, m) with one row per equation (nodes 1..n).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    MissingDelays,
    MissingPFData,
    NearZeroCoordinate,
    SingularRandomizer,
    UnresolvedGeneric,
)
from .network import Network, is_generic, reduced_incidence
from .polytope import Face, PointConfiguration, adjacency_polytope, face_subdigraph

NEAR_ZERO = 1e-14
MAX_RANDOMIZER_COND = 1e8


@dataclass(frozen=True)
class LaurentPoly:
    terms: tuple  # ((exponent tuple, complex coefficient), ...)

    def __len__(self):
        return len(self.terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return sum(c * np.prod(x ** np.array(e)) for e, c in self.terms)


@dataclass(frozen=True, eq=False)
class LaurentSystem:
    exponents: np.ndarray
    coeffs: np.ndarray
    provenance: str = "kuramoto"
    face: Face | None = None

    @property
    def n(self) -> int:
        return self.exponents.shape[1]

    @property
    def polys(self) -> tuple:
        out = []
        for row in self.coeffs:
            terms = tuple(
                (tuple(int(v) for v in self.exponents[k]), complex(c)) for k, c in enumerate(row) if c != 0
            )
            out.append(LaurentPoly(terms))
        return tuple(out)

    def term_counts(self) -> list:
        return [int(np.count_nonzero(row)) for row in self.coeffs]

    def _check(self, x):
        x = np.asarray(x, dtype=np.complex128)
        if np.any(np.abs(x) < NEAR_ZERO):
            raise NearZeroCoordinate("coordinate within 1e-14 of zero")
        return x

    def __call__(self, x) -> np.ndarray:
        x = self._check(x)
        return _kernels.evaluate(self.exponents, self.coeffs, x)

    def jacobian(self, x) -> np.ndarray:
        x = self._check(x)
        return _kernels.jacobian(self.exponents, self.coeffs, x)

    def residual(self, x) -> float:
        return float(np.max(np.abs(self(x))))

    def with_coeffs(self, coeffs, provenance=None, face=None) -> LaurentSystem:
        return LaurentSystem(self.exponents, np.asarray(coeffs, dtype=np.complex128), provenance or self.provenance, face)


@dataclass(frozen=True, eq=False)
class CycleForm:
    """init_F of the Kuramoto system written as -Q (x^Q o a)^T."""

    arcs: tuple
    Q: np.ndarray  # n x |F| reduced incidence
    a: np.ndarray  # coefficient a_ij per arc

    def monomials(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return np.prod(x[:, None] ** self.Q, axis=0)

    def __call__(self, x) -> np.ndarray:
        return self.Q @ (self.monomials(x) * self.a)


def _num(v, what):
    if is_generic(v):
        raise UnresolvedGeneric(f"{what} is GENERIC; resolve it first")
    return complex(v)


def _edge_system(net, cfg, own, cross, const, provenance):
    """Row i: const_i + own_e * x_i/x_j + cross_e * x_j/x_i for each edge e = {i, j}."""
    n = net.n
    coeffs = np.zeros((n, len(cfg)), dtype=np.complex128)
    coeffs[:, 0] = const
    for e, (i, j) in enumerate(net.edges):
        p_ij, p_ji = 2 * e + 1, 2 * e + 2
        if i:
            coeffs[i - 1, p_ij] += own[e]
            coeffs[i - 1, p_ji] += cross[e]
        if j:
            coeffs[j - 1, p_ji] += own[e]
            coeffs[j - 1, p_ij] += cross[e]
    return LaurentSystem(np.array(cfg.points, dtype=np.int64), coeffs, provenance)


def coupling_coefficients(net: Network) -> np.ndarray:
    """a_ij = k_ij / (2i) per edge."""
    return np.array([_num(k, "coupling") / 2j for k in net.couplings], dtype=np.complex128)


def kuramoto_system(net: Network, cfg: PointConfiguration | None = None) -> LaurentSystem:
    cfg = cfg or adjacency_polytope(net)
    a = coupling_coefficients(net)
    w = np.array([_num(v, "frequency") for v in net.w_bar()], dtype=np.complex128)
    return _edge_system(net, cfg, -a, a, w, "kuramoto")


def power_flow_system(net: Network, cfg: PointConfiguration | None = None) -> LaurentSystem:
    """P_i - sum g_ij (x_i/x_j + x_j/x_i) + b_ij (x_i/x_j - x_j/x_i)."""
    if net.pf is None:
        raise MissingPFData("power-flow variant needs 'pf' data")
    cfg = cfg or adjacency_polytope(net)
    g = np.array([_num(v, "g") for v in net.pf.g])
    b = np.array([_num(v, "b") for v in net.pf.b])
    P = np.array([_num(v, "P") for v in net.pf.P])
    return _edge_system(net, cfg, -(g + b), b - g, P, "pf")


def delayed_system(net: Network, cfg: PointConfiguration | None = None) -> LaurentSystem:
    """w_i - sum a_ij (x_i C_ij / x_j - x_j / (x_i C_ij)), C_ij = exp(i delta_ij), one delta per edge."""
    if net.delays is None:
        raise MissingDelays("phase-delay variant needs 'delays'")
    cfg = cfg or adjacency_polytope(net)
    a = coupling_coefficients(net)
    C = np.exp(1j * np.array([float(_num(d, "delay").real) for d in net.delays]))
    w = np.array([_num(v, "frequency") for v in net.w_bar()], dtype=np.complex128)
    return _edge_system(net, cfg, -a * C, a / C, w, "delay")


def build_system(net: Network, variant: str = "kuramoto", cfg=None) -> LaurentSystem:
    builders = {"kuramoto": kuramoto_system, "pf": power_flow_system, "delay": delayed_system}
    return builders[variant](net, cfg)


def random_unitary_entries(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.exp(2j * np.pi * rng.uniform(size=(n, n)))


def randomized_system(system: LaurentSystem, seed: int) -> tuple[LaurentSystem, np.ndarray]:
    """R f with unit-modulus random R."""
    R = random_unitary_entries(system.coeffs.shape[0], seed)
    if np.linalg.cond(R) > MAX_RANDOMIZER_COND:
        raise SingularRandomizer("randomizer condition number above 1e8", seed=seed)
    return system.with_coeffs(R @ system.coeffs, provenance=system.provenance + "*"), R


def facial_system(system: LaurentSystem, face: Face) -> LaurentSystem:
    """init_F: keep only the terms whose exponents lie in the face."""
    keep = np.zeros(system.coeffs.shape[1], dtype=bool)
    keep[list(face.points)] = True
    return system.with_coeffs(np.where(keep[None, :], system.coeffs, 0), face=face)


def cycle_form(net: Network, face: Face, cfg: PointConfiguration | None = None) -> CycleForm:
    cfg = cfg or adjacency_polytope(net)
    dg = face_subdigraph(cfg, face)
    a = coupling_coefficients(net)
    per_arc = np.array([a[net.edge_index(*arc)] for arc in dg.arcs], dtype=np.complex128)
    return CycleForm(dg.arcs, reduced_incidence(dg, net.n), per_arc)


def pyramid_system(net: Network, face: Face, cfg: PointConfiguration | None = None) -> LaurentSystem:
    """Restriction of the Kuramoto system to the origin plus a facet: w_bar - Q (x^Q o a)^T."""
    system = kuramoto_system(net, cfg)
    keep = np.zeros(system.coeffs.shape[1], dtype=bool)
    keep[[0, *face.points]] = True
    return system.with_coeffs(np.where(keep[None, :], system.coeffs, 0), provenance="pyramid", face=face)

