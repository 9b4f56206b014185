"""Mesh-dependent DG norms of piecewise fields, plus L2 slice diagnostics.

With [w]_t the time jump on space-like facets, [w]_N / <w> the normal jump
and average on time-like facets, and n the outward normal on the Dirichlet
boundary:

    |||w|||_DG^2  = 1/2 ( ||[w]_t||^2_space + ||w||^2_{final+initial}
                    + ||a^(1/2) [w]_N||^2_time + ||b^(1/2) [w_x]_N||^2_time
                    + ||a^(1/2) w||^2_dirichlet )

    |||w|||_DG+^2 = |||w|||_DG^2 + 1/2 ( ||w^-||^2_space
                    + ||a^(-1/2) <w_x>||^2_time + ||a^(-1/2) n w_x||^2_dirichlet
                    + ||b^(-1/2) <w>||^2_time )

A field exposes one-sided traces via value(elem_id, xs, ts) and
dx(elem_id, xs, ts); jumps are always formed from two one-sided traces.
"""

from __future__ import annotations

import math

import numpy as np

from .mesh import FacetKind, Mesh
from .poly import ScaledPolynomial, eval_poly_many, mi
from .quadrature import mapped_interval

_DX = mi(1, 0)


class ClosedFormField:
    """A globally defined field; element ids are ignored."""

    def __init__(self, value_fn, dx_fn):
        self._value = value_fn
        self._dx = dx_fn

    def value(self, eid, xs, ts):
        xs, ts = np.broadcast_arrays(np.atleast_1d(xs), np.atleast_1d(ts))
        return np.asarray(self._value(xs, ts), dtype=complex)

    def dx(self, eid, xs, ts):
        xs, ts = np.broadcast_arrays(np.atleast_1d(xs), np.atleast_1d(ts))
        return np.asarray(self._dx(xs, ts), dtype=complex)


def exact_field(sol) -> ClosedFormField:
    """Field view of a solution object with value/dx methods."""
    return ClosedFormField(sol.value, sol.dx)


class PiecewisePolyField:
    """One polynomial per element, e.g. an elementwise interpolant."""

    def __init__(self, polys: list[ScaledPolynomial]):
        self.polys = polys

    def value(self, eid, xs, ts):
        return eval_poly_many(self.polys[eid], xs, ts)

    def dx(self, eid, xs, ts):
        return eval_poly_many(self.polys[eid], xs, ts, _DX)


class DifferenceField:
    def __init__(self, a, b):
        self.a = a
        self.b = b

    def value(self, eid, xs, ts):
        return self.a.value(eid, xs, ts) - self.b.value(eid, xs, ts)

    def dx(self, eid, xs, ts):
        return self.a.dx(eid, xs, ts) - self.b.dx(eid, xs, ts)


def _wsum_sq(wq, z) -> float:
    z = np.asarray(z)
    return float(np.sum(wq * (z.real * z.real + z.imag * z.imag)))


def _norm_terms(field, mesh: Mesh, n: int, with_plus: bool) -> tuple[float, float]:
    s_dg = 0.0
    s_plus = 0.0
    for f in mesh.facets:
        if f.kind is FacetKind.SPACE_INTERIOR:
            xq, wq = mapped_interval(f.span[0], f.span[1], n)
            wm = field.value(f.below, xq, f.fixed)
            wp = field.value(f.above, xq, f.fixed)
            s_dg += _wsum_sq(wq, wm - wp)
            if with_plus:
                s_plus += _wsum_sq(wq, wm)
        elif f.kind in (FacetKind.INITIAL, FacetKind.FINAL):
            e = f.above if f.kind is FacetKind.INITIAL else f.below
            xq, wq = mapped_interval(f.span[0], f.span[1], n)
            s_dg += _wsum_sq(wq, field.value(e, xq, f.fixed))
        elif f.kind is FacetKind.TIME_INTERIOR:
            tq, wq = mapped_interval(f.span[0], f.span[1], n)
            v1 = field.value(f.left, f.fixed, tq)
            v2 = field.value(f.right, f.fixed, tq)
            g1 = field.dx(f.left, f.fixed, tq)
            g2 = field.dx(f.right, f.fixed, tq)
            s_dg += f.alpha * _wsum_sq(wq, v1 - v2) + f.beta * _wsum_sq(wq, g1 - g2)
            if with_plus:
                s_plus += _wsum_sq(wq, 0.5 * (g1 + g2)) / f.alpha
                s_plus += _wsum_sq(wq, 0.5 * (v1 + v2)) / f.beta
        elif f.kind is FacetKind.DIRICHLET:
            e = f.owner
            tq, wq = mapped_interval(f.span[0], f.span[1], n)
            s_dg += f.alpha * _wsum_sq(wq, field.value(e, f.fixed, tq))
            if with_plus:
                s_plus += _wsum_sq(wq, field.dx(e, f.fixed, tq)) / f.alpha
    return s_dg, s_plus


def dg_norm(field, mesh: Mesh, n: int = 20) -> float:
    s_dg, _ = _norm_terms(field, mesh, n, with_plus=False)
    return math.sqrt(0.5 * s_dg)


def dg_plus_norm(field, mesh: Mesh, n: int = 20) -> float:
    s_dg, s_plus = _norm_terms(field, mesh, n, with_plus=True)
    return math.sqrt(0.5 * (s_dg + s_plus))


def l2_slice_error(field, t: float, mesh: Mesh, n: int = 20) -> float:
    """Elementwise L2(Omega) norm of the field at fixed time.

    At slab interfaces the one-sided trace from the earlier slab is used.
    """
    if not 0.0 <= t <= mesh.domain.t_final:
        raise ValueError("t outside the time interval")
    slab = 0
    for s in range(mesh.n_slabs):
        t0, t1 = mesh.elements[mesh.slab_elements[s][0]].t_range
        if t0 < t <= t1 or (s == 0 and t <= t0):
            slab = s
            break
    acc = 0.0
    for e in mesh.slab_elements[slab]:
        el = mesh.elements[e]
        xq, wq = mapped_interval(el.x_range[0], el.x_range[1], n)
        acc += _wsum_sq(wq, field.value(e, xq, t))
    return math.sqrt(acc)
