"""Per-element discrete spaces for the free Schrodinger operator.

Four families are supported:

* ``trefftz``: polynomials of degree <= 2p that lie exactly in the kernel
  of i d/dt + (1/2) Delta_x.  Each basis function is seeded by a spatial
  polynomial m(x) at the element-center time and completed upward in j_t by
  the coefficient recurrence

      C[jx, jt+1] = i h_t / (2 (jt+1) h_x^2)
                    * sum_l (jx_l + 1)(jx_l + 2) C[jx + 2 e_l, jt]

  (zero once |jx| > 2p - 2), which cancels the operator exactly.
* ``quasi-trefftz``: degree-p polynomials whose operator image has a zero
  of order p - 2 at the element center (d = 1 only).
* ``full``: all scaled monomials of total degree <= p.
* ``planewave``: exp(i (k x - k^2 t / 2)) with 2p + 1 equispaced
  wavenumbers k = -2p, -2p + 2, ..., 2p (d = 1 only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

import numpy as np

from .poly import MultiIndex, ScaledPolynomial, eval_poly_many, mi, space_multi_indices

FAMILIES = ("trefftz", "quasi-trefftz", "full", "planewave")


@dataclass(frozen=True)
class SpaceKind:
    """Tagged choice of the local discrete space."""

    family: str
    p: int
    seed_choice: str = "a"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.p < 0:
            raise ValueError("p must be >= 0")
        if self.family in ("quasi-trefftz", "planewave") and self.p < 1:
            raise ValueError(f"{self.family} requires p >= 1")
        if self.seed_choice not in ("a", "b"):
            raise ValueError("seed_choice must be 'a' or 'b'")

    @classmethod
    def trefftz(cls, p: int, seed_choice: str = "a") -> "SpaceKind":
        return cls("trefftz", p, seed_choice)

    @classmethod
    def quasi_trefftz(cls, p: int) -> "SpaceKind":
        return cls("quasi-trefftz", p)

    @classmethod
    def full_poly(cls, p: int) -> "SpaceKind":
        return cls("full", p)

    @classmethod
    def plane_wave(cls, p: int) -> "SpaceKind":
        return cls("planewave", p)

    @property
    def is_trefftz_exact(self) -> bool:
        """Whether members annihilate the operator identically."""
        return self.family in ("trefftz", "planewave")

    @property
    def needs_volume_term(self) -> bool:
        return not self.is_trefftz_exact

    def dim(self, d: int = 1) -> int:
        if self.family == "trefftz":
            return math.comb(2 * self.p + d, d)
        if self.family == "full":
            return math.comb(self.p + d + 1, d + 1)
        if d != 1:
            raise ValueError(f"{self.family} space is defined for d = 1 only")
        return 2 * self.p + 1


@dataclass(frozen=True)
class Wave:
    """exp(i (k x - k^2 t / 2)); center and scales recorded for provenance."""

    k: float
    center: tuple[float, float]
    scales: tuple[float, float]


BasisFunction = Union[ScaledPolynomial, Wave]


@dataclass(frozen=True)
class ElementBasis:
    element_id: int
    kind: SpaceKind
    functions: tuple[BasisFunction, ...]

    @property
    def dim(self) -> int:
        return len(self.functions)


def eval_basis_many(b: BasisFunction, xs, ts, deriv: MultiIndex | None = None) -> np.ndarray:
    """Vectorized D^deriv b at points (order <= 2 for wave functions)."""
    if isinstance(b, Wave):
        if deriv is None:
            ax = at = 0
        else:
            ax, at = sum(deriv.jx), deriv.jt
        if ax + at > 2:
            raise ValueError("wave derivatives supported up to total order 2")
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        xs, ts = np.broadcast_arrays(xs, ts)
        k = b.k
        vals = np.exp(1j * (k * xs - 0.5 * k * k * ts))
        return (1j * k) ** ax * (-0.5j * k * k) ** at * vals
    return eval_poly_many(b, xs, ts, deriv)


def eval_basis(b: BasisFunction, point, deriv: MultiIndex | None = None) -> complex:
    x, t = point
    return complex(eval_basis_many(b, np.asarray([x], dtype=float),
                                   np.asarray([t], dtype=float), deriv)[0])


def _propagate_trefftz(seed: dict[tuple[int, ...], complex], d: int, p: int,
                       hx: float, ht: float) -> dict[MultiIndex, complex]:
    """Complete a spatial seed (coefficients at j_t = 0) to a kernel polynomial."""
    coeffs: dict[MultiIndex, complex] = {mi(jx, 0): c for jx, c in seed.items() if c != 0}
    level = {jx: c for jx, c in seed.items() if c != 0}
    for jt in range(2 * p):
        fac = ht / (2.0 * (jt + 1) * hx * hx)
        nxt: dict[tuple[int, ...], complex] = {}
        for jx, c in sorted(level.items()):
            for ell in range(d):
                e = jx[ell]
                if e >= 2:
                    tgt = jx[:ell] + (e - 2,) + jx[ell + 1:]
                    nxt[tgt] = nxt.get(tgt, 0.0) + 1j * fac * (e - 1) * e * c
        level = {jx: c for jx, c in nxt.items() if c != 0}
        if not level:
            break
        for jx, c in level.items():
            coeffs[mi(jx, jt + 1)] = c
    return coeffs


def _trefftz_seeds(d: int, p: int, hx: float, seed_choice: str
                   ) -> list[dict[tuple[int, ...], complex]]:
    if d == 1:
        # Exponents e = 0..2p.  Choice "a" seeds the plain scaled monomial
        # ((x - x_K)/h_x)^e; choice "b" seeds (x - x_K)^e / h_x^ceil(e/2),
        # whose recurrence completion keeps every function O(1) on the
        # element and tames the matrix conditioning.
        seeds = []
        for e in range(2 * p + 1):
            if seed_choice == "a":
                coeff = 1.0
            else:
                coeff = hx ** (e - math.ceil(e / 2))
            seeds.append({(e,): complex(coeff)})
        return seeds
    if seed_choice != "a":
        raise ValueError("seed choice 'b' is defined for d = 1 only")
    return [{jx: 1.0 + 0.0j} for jx in space_multi_indices(d, 2 * p)]


@lru_cache(maxsize=None)
def _trefftz_local_coeffs(d: int, p: int, hx: float, ht: float, seed_choice: str
                          ) -> tuple[dict, ...]:
    return tuple(_propagate_trefftz(seed, d, p, hx, ht)
                 for seed in _trefftz_seeds(d, p, hx, seed_choice))


def trefftz_basis(d: int, p: int, center, scales, seed_choice: str = "a",
                  element_id: int = 0) -> ElementBasis:
    """Kernel polynomials of degree <= 2p; dimension C(2p + d, d)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    hx, ht = float(scales[0]), float(scales[1])
    funcs = [
        ScaledPolynomial.from_terms(coeffs, center=center, scales=(hx, ht), d=d,
                                    degree_bound=2 * p)
        for coeffs in _trefftz_local_coeffs(d, p, hx, ht, seed_choice)
    ]
    return ElementBasis(element_id, SpaceKind.trefftz(p, seed_choice), tuple(funcs))


@lru_cache(maxsize=None)
def _quasi_trefftz_local_coeffs(p: int, hx: float, ht: float) -> tuple[dict, ...]:
    # Free coefficients: (jx, 0) for jx <= p, plus (p - jt, jt) for jt >= 1.
    # The rest follow from requiring the operator image to vanish to order
    # p - 2 at the center:
    #   C[jx, jt+1] = i h_t (jx+1)(jx+2) / (2 (jt+1) h_x^2) C[jx+2, jt]
    # for jx + jt <= p - 2.
    free = [(jx, 0) for jx in range(p + 1)] + [(p - jt, jt) for jt in range(1, p + 1)]
    out = []
    for f in free:
        c: dict[tuple[int, int], complex] = {f: 1.0 + 0.0j}
        for jt in range(p - 1):
            for jx in range(p - 1 - jt):
                src = c.get((jx + 2, jt), 0.0)
                val = 1j * ht * (jx + 1) * (jx + 2) / (2.0 * (jt + 1) * hx * hx) * src
                if val != 0:
                    c[(jx, jt + 1)] = val
        out.append({mi(jx, jt): v for (jx, jt), v in c.items()})
    return tuple(out)


def quasi_trefftz_basis(p: int, center, scales, element_id: int = 0) -> ElementBasis:
    """Degree-p quasi-kernel polynomials centered at the element center (d = 1)."""
    if p < 1:
        raise ValueError("quasi-Trefftz space requires p >= 1")
    hx, ht = float(scales[0]), float(scales[1])
    funcs = [
        ScaledPolynomial.from_terms(coeffs, center=center, scales=(hx, ht), d=1,
                                    degree_bound=p)
        for coeffs in _quasi_trefftz_local_coeffs(p, hx, ht)
    ]
    return ElementBasis(element_id, SpaceKind.quasi_trefftz(p), tuple(funcs))


def full_poly_basis(p: int, center, scales, d: int = 1, element_id: int = 0) -> ElementBasis:
    """All scaled monomials of total degree <= p."""
    if p < 0:
        raise ValueError("p must be >= 0")
    funcs = []
    indices = [mi(jx, jt) for jx in space_multi_indices(d, p)
               for jt in range(p - sum(jx) + 1)]
    for j in sorted(indices):
        funcs.append(ScaledPolynomial.from_terms({j: 1.0}, center=center, scales=scales,
                                                 d=d, degree_bound=p))
    return ElementBasis(element_id, SpaceKind.full_poly(p), tuple(funcs))


def plane_wave_basis(p: int, center, scales, element_id: int = 0) -> ElementBasis:
    """2p + 1 pseudo-plane waves with wavenumbers -2p, -2p + 2, ..., 2p."""
    if p < 1:
        raise ValueError("plane-wave space requires p >= 1")
    ks = [-2.0 * p + 2.0 * (ell - 1) for ell in range(1, 2 * p + 2)]
    cx, ct = center
    cx = float(cx[0]) if isinstance(cx, (tuple, list)) else float(cx)
    funcs = tuple(Wave(k, (cx, float(ct)), (float(scales[0]), float(scales[1]))) for k in ks)
    return ElementBasis(element_id, SpaceKind.plane_wave(p), funcs)


def element_basis(kind: SpaceKind, center, scales, element_id: int = 0) -> ElementBasis:
    """Dispatch to the family builder (d = 1 element geometry)."""
    if kind.family == "trefftz":
        return trefftz_basis(1, kind.p, center, scales, kind.seed_choice, element_id)
    if kind.family == "quasi-trefftz":
        return quasi_trefftz_basis(kind.p, center, scales, element_id)
    if kind.family == "full":
        return full_poly_basis(kind.p, center, scales, d=1, element_id=element_id)
    return plane_wave_basis(kind.p, center, scales, element_id)
