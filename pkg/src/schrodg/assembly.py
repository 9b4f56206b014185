"""Ultra-weak space-time DG assembly for i u_t + (1/2) u_xx = 0 (d = 1).

All derivatives sit on facets; with trial u and test v (conjugated) the
sesquilinear form reads

    A(u, v) = i ( int_{space-like} u^- conj([v]_t) + int_{final} u conj(v) )
            + 1/2 int_{time-like} ( <u_x> conj([v]_N) + i alpha [u]_N conj([v]_N)
                                    - <u> conj([v_x]_N) + i beta [u_x]_N conj([v_x]_N) )
            + 1/2 int_{dirichlet} ( n u_x + i alpha u ) conj(v)

    l(v)    = i int_{initial} psi0 conj(v)
            + 1/2 int_{dirichlet} g ( n conj(v_x) + i alpha conj(v) )

with the time jump [w]_t = w^- - w^+ (earlier minus later trace) and, on a
vertical facet with left element 1 and right element 2 (n1 = +1, n2 = -1),
<w> = (w1 + w2)/2 and [w]_N = w1 n1 + w2 n2.  For discrete spaces that are
not exactly in the operator kernel the volume term

    sum_K int_K u conj(i v_t + (1/2) v_xx)

is added, which restores consistency of the ultra-weak formulation.

The upwind space-like flux makes the global system block lower-triangular
by time slab, so the default solve marches slab by slab; the assembled
global system is kept as a testing oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.io
import scipy.sparse

from .basis import ElementBasis, SpaceKind, Wave, element_basis, eval_basis_many
from .linalg import FactoredMatrix, SingularMatrixError, cond2
from .mesh import FacetKind, FacetRole, Mesh
from .poly import apply_schrodinger, eval_poly_many, mi, poly_combination
from .quadrature import data_rule_size, mapped_interval, poly_rule_size, rect_rule

_DX = mi(1, 0)
_COND_FLAG_DEFAULT = 1e14


@dataclass(frozen=True)
class BoundaryData:
    """Initial datum psi0(x) and Dirichlet datum g_D(x, t), both vectorized."""

    psi0: Callable
    g_D: Callable


def constant_data(value: complex = 1.0) -> BoundaryData:
    return BoundaryData(psi0=lambda x: np.full(np.shape(x), complex(value)),
                        g_D=lambda x, t: np.full(np.shape(x), complex(value)))


def solution_data(sol) -> BoundaryData:
    """Boundary data manufactured from an exact solution object."""
    return BoundaryData(psi0=lambda x: sol.value(x, 0.0), g_D=lambda x, t: sol.value(x, t))


class SlabSolveError(RuntimeError):
    def __init__(self, slab: int, cond_estimate: float, reason: str = "ill-conditioned"):
        super().__init__(f"slab {slab}: {reason} (cond2 ~ {cond_estimate:.3e})")
        self.slab = slab
        self.cond_estimate = cond_estimate


@dataclass(frozen=True)
class SlabSystem:
    slab: int
    matrix: np.ndarray
    rhs: np.ndarray
    dof_map: dict[tuple[int, int], int]
    element_ids: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.matrix.shape[0]


def export_matrix_market(matrix: np.ndarray, path) -> None:
    """Write a dense complex matrix in Matrix Market coordinate format."""
    scipy.io.mmwrite(str(path), scipy.sparse.coo_matrix(matrix))


class DiscreteSolution:
    """Per-element coefficient vectors over a chosen discrete space.

    Evaluable anywhere in the cylinder through one-sided element traces;
    polynomial spaces collapse each element to a single combined polynomial
    for fast evaluation.
    """

    def __init__(self, mesh: Mesh, space: SpaceKind, bases: list[ElementBasis],
                 coeffs: list[np.ndarray | None] | None = None):
        self.mesh = mesh
        self.space = space
        self.bases = bases
        self.coeffs: list[np.ndarray | None] = coeffs if coeffs is not None \
            else [None] * mesh.n_elements
        self._combined: list = [None] * mesh.n_elements

    def set_coeffs(self, eid: int, vec: np.ndarray) -> None:
        self.coeffs[eid] = np.asarray(vec, dtype=complex)
        self._combined[eid] = None

    def has_slab(self, slab: int) -> bool:
        return all(self.coeffs[e] is not None for e in self.mesh.slab_elements[slab])

    @property
    def is_complete(self) -> bool:
        return all(c is not None for c in self.coeffs)

    def _poly(self, eid: int):
        if self._combined[eid] is None:
            funcs = self.bases[eid].functions
            self._combined[eid] = poly_combination(funcs, self.coeffs[eid])
        return self._combined[eid]

    def _eval(self, eid: int, xs, ts, deriv) -> np.ndarray:
        c = self.coeffs[eid]
        if c is None:
            raise ValueError(f"element {eid} has no coefficients yet")
        funcs = self.bases[eid].functions
        if any(isinstance(f, Wave) for f in funcs):
            rows = np.stack([eval_basis_many(f, xs, ts, deriv) for f in funcs])
            return c @ rows
        return eval_poly_many(self._poly(eid), xs, ts, deriv)

    def value(self, eid: int, xs, ts) -> np.ndarray:
        return self._eval(eid, xs, ts, None)

    def dx(self, eid: int, xs, ts) -> np.ndarray:
        return self._eval(eid, xs, ts, _DX)


def element_bases(mesh: Mesh, space: SpaceKind) -> list[ElementBasis]:
    """Local bases for every element (coefficient maps shared across congruent ones)."""
    return [element_basis(space, el.center, (el.h_x, el.h_t), el.id)
            for el in mesh.elements]


def _rule_sizes(space: SpaceKind, n_quad: int | None) -> tuple[int, int]:
    if n_quad is not None:
        return n_quad, n_quad
    return poly_rule_size(space.p), data_rule_size(space.p)


def _values(funcs, xs, ts, deriv=None) -> np.ndarray:
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    xs, ts = np.broadcast_arrays(xs, ts)
    return np.stack([eval_basis_many(f, xs, ts, deriv) for f in funcs])


def _offsets(bases, elem_ids) -> tuple[dict[int, int], int]:
    off: dict[int, int] = {}
    n = 0
    for e in elem_ids:
        off[e] = n
        n += bases[e].dim
    return off, n


def _dof_map(bases, elem_ids, off) -> dict[tuple[int, int], int]:
    return {(e, i): off[e] + i for e in elem_ids for i in range(bases[e].dim)}


def _add_time_facet(M, facet, funcs_l, funcs_r, off_l, off_r, n_facet):
    tq, wq = mapped_interval(facet.span[0], facet.span[1], n_facet)
    sides = []
    for funcs, off, nrm in ((funcs_l, off_l, 1.0), (funcs_r, off_r, -1.0)):
        v = _values(funcs, facet.fixed, tq)
        g = _values(funcs, facet.fixed, tq, _DX)
        sides.append((off, v, g, nrm))
    al, be = facet.alpha, facet.beta
    for oa, va, ga, na in sides:
        vaw = va.conj() * wq
        gaw = ga.conj() * wq
        for ob, vb, gb, nb in sides:
            block = 0.5 * (0.5 * na * (vaw @ gb.T)
                           + 1j * al * na * nb * (vaw @ vb.T)
                           - 0.5 * na * (gaw @ vb.T)
                           + 1j * be * na * nb * (gaw @ gb.T))
            M[oa:oa + va.shape[0], ob:ob + vb.shape[0]] += block


def _add_dirichlet_matrix(M, facet, funcs, off, n_facet):
    tq, wq = mapped_interval(facet.span[0], facet.span[1], n_facet)
    v = _values(funcs, facet.fixed, tq)
    g = _values(funcs, facet.fixed, tq, _DX)
    vaw = v.conj() * wq
    d = v.shape[0]
    M[off:off + d, off:off + d] += 0.5 * (facet.normal_sign * (vaw @ g.T)
                                          + 1j * facet.alpha * (vaw @ v.T))


def _add_volume(M, mesh, eid, funcs, off, n_vol):
    xg, tg, wg = rect_rule(mesh.elements[eid].x_range, mesh.elements[eid].t_range, n_vol)
    v = _values(funcs, xg, tg)
    sv = np.stack([
        np.zeros_like(xg, dtype=complex) if isinstance(f, Wave)
        else _values([apply_schrodinger(f)], xg, tg)[0]
        for f in funcs
    ])
    d = v.shape[0]
    M[off:off + d, off:off + d] += (sv.conj() * wg) @ v.T


def _slab_matrix(mesh: Mesh, slab: int, bases, space: SpaceKind,
                 n_poly: int, n_data: int) -> tuple[np.ndarray, dict[int, int], int]:
    elems = mesh.slab_elements[slab]
    off, n = _offsets(bases, elems)
    n_facet = n_data if space.family == "planewave" else n_poly
    M = np.zeros((n, n), dtype=complex)
    for e in elems:
        funcs = bases[e].functions
        oe = off[e]
        de = len(funcs)
        for fid, role in mesh.element_facets[e]:
            f = mesh.facets[fid]
            if role is FacetRole.BELOW:  # top facet: space-like interior or final
                xq, wq = mapped_interval(f.span[0], f.span[1], n_facet)
                v = _values(funcs, xq, f.fixed)
                M[oe:oe + de, oe:oe + de] += 1j * ((v.conj() * wq) @ v.T)
            elif role is FacetRole.LEFT and f.kind is FacetKind.TIME_INTERIOR:
                _add_time_facet(M, f, funcs, bases[f.right].functions,
                                oe, off[f.right], n_facet)
            elif f.kind is FacetKind.DIRICHLET:
                _add_dirichlet_matrix(M, f, funcs, oe, n_facet)
        if space.needs_volume_term:
            _add_volume(M, mesh, e, funcs, oe, n_poly)
    return M, off, n


def _slab_rhs(mesh: Mesh, slab: int, bases, space: SpaceKind, data: BoundaryData,
              below: DiscreteSolution | None, off, n, n_data: int) -> np.ndarray:
    rhs = np.zeros(n, dtype=complex)
    for e in mesh.slab_elements[slab]:
        funcs = bases[e].functions
        oe = off[e]
        for fid, role in mesh.element_facets[e]:
            f = mesh.facets[fid]
            if role is FacetRole.ABOVE:  # bottom facet: initial or space-like
                xq, wq = mapped_interval(f.span[0], f.span[1], n_data)
                v = _values(funcs, xq, f.fixed)
                if f.kind is FacetKind.INITIAL:
                    vals = np.asarray(data.psi0(xq), dtype=complex)
                else:
                    vals = np.asarray(below.value(f.below, xq, f.fixed), dtype=complex)
                rhs[oe:oe + len(funcs)] += 1j * ((v.conj() * wq) @ vals)
            elif f.kind is FacetKind.DIRICHLET:
                tq, wq = mapped_interval(f.span[0], f.span[1], n_data)
                v = _values(funcs, f.fixed, tq)
                g = _values(funcs, f.fixed, tq, _DX)
                gv = np.asarray(data.g_D(np.full_like(tq, f.fixed), tq), dtype=complex)
                rhs[oe:oe + len(funcs)] += 0.5 * (f.normal_sign * ((g.conj() * wq) @ gv)
                                                  + 1j * f.alpha * ((v.conj() * wq) @ gv))
    return rhs


def assemble_slab(mesh: Mesh, slab: int, space: SpaceKind, data: BoundaryData,
                  below: DiscreteSolution | None = None,
                  n_quad: int | None = None) -> SlabSystem:
    """Matrix and right-hand side for one time slab.

    ``below`` must be the solved solution covering slab - 1, or None on the
    first slab (the initial datum is used instead).
    """
    if not 0 <= slab < mesh.n_slabs:
        raise ValueError(f"invalid slab {slab}")
    if slab == 0:
        if below is not None:
            raise ValueError("slab 0 takes its trace from the initial datum, not a solution")
    else:
        if below is None or not below.has_slab(slab - 1):
            raise ValueError(f"below-solution does not cover slab {slab - 1}")
    bases = below.bases if below is not None else element_bases(mesh, space)
    n_poly, n_data = _rule_sizes(space, n_quad)
    M, off, n = _slab_matrix(mesh, slab, bases, space, n_poly, n_data)
    rhs = _slab_rhs(mesh, slab, bases, space, data, below, off, n, n_data)
    elems = mesh.slab_elements[slab]
    return SlabSystem(slab, M, rhs, _dof_map(bases, elems, off), elems)


def march(mesh: Mesh, space: SpaceKind, data: BoundaryData,
          n_quad: int | None = None, max_cond: float | None = None) -> DiscreteSolution:
    """Solve slab systems in time order, feeding each top trace downstream.

    On uniform meshes the slab matrix is identical for every slab for the
    translation-invariant polynomial families, so a single factorization is
    reused.  Plane-wave systems are screened against ``max_cond`` (default
    1e14) and rejected with a SlabSolveError when numerically unusable.
    """
    bases = element_bases(mesh, space)
    n_poly, n_data = _rule_sizes(space, n_quad)
    if max_cond is None and space.family == "planewave":
        max_cond = _COND_FLAG_DEFAULT
    sol = DiscreteSolution(mesh, space, bases)
    reuse = mesh.is_uniform and space.family != "planewave"
    factor = None
    off: dict[int, int] = {}
    for slab in range(mesh.n_slabs):
        if factor is None or not reuse:
            M, off, n = _slab_matrix(mesh, slab, bases, space, n_poly, n_data)
            if max_cond is not None and n <= 2000:
                c = cond2(M)
                if not np.isfinite(c) or c > max_cond:
                    raise SlabSolveError(slab, c)
            try:
                factor = FactoredMatrix(M)
            except SingularMatrixError as exc:
                raise SlabSolveError(slab, float("inf"), "singular matrix") from exc
        else:
            # offsets repeat the slab-0 layout shifted by nx elements
            off = {e: off[e - mesh.nx] for e in mesh.slab_elements[slab]} \
                if slab > 0 else off
        rhs = _slab_rhs(mesh, slab, bases, space, data,
                        sol if slab > 0 else None, off, factor.n, n_data)
        coeffs = factor.solve(rhs)
        for e in mesh.slab_elements[slab]:
            sol.set_coeffs(e, coeffs[off[e]:off[e] + bases[e].dim])
    return sol


GLOBAL_DOF_CAP = 5000


def assemble_global(mesh: Mesh, space: SpaceKind, data: BoundaryData,
                    n_quad: int | None = None
                    ) -> tuple[np.ndarray, np.ndarray, dict[tuple[int, int], int]]:
    """The fully coupled system over all slabs (dense testing oracle)."""
    bases = element_bases(mesh, space)
    elem_ids = [el.id for el in mesh.elements]
    off, n = _offsets(bases, elem_ids)
    if n > GLOBAL_DOF_CAP:
        raise ValueError(f"global system of size {n} exceeds cap {GLOBAL_DOF_CAP}")
    n_poly, n_data = _rule_sizes(space, n_quad)
    n_facet = n_data if space.family == "planewave" else n_poly
    M = np.zeros((n, n), dtype=complex)
    rhs = np.zeros(n, dtype=complex)

    for f in mesh.facets:
        if f.kind in (FacetKind.SPACE_INTERIOR, FacetKind.FINAL):
            e = f.below
            funcs = bases[e].functions
            xq, wq = mapped_interval(f.span[0], f.span[1], n_facet)
            v = _values(funcs, xq, f.fixed)
            oe, de = off[e], len(funcs)
            M[oe:oe + de, oe:oe + de] += 1j * ((v.conj() * wq) @ v.T)
            if f.kind is FacetKind.SPACE_INTERIOR:
                up = f.above
                vu = _values(bases[up].functions, xq, f.fixed)
                ou, du = off[up], bases[up].dim
                M[ou:ou + du, oe:oe + de] -= 1j * ((vu.conj() * wq) @ v.T)
        elif f.kind is FacetKind.INITIAL:
            e = f.above
            xq, wq = mapped_interval(f.span[0], f.span[1], n_data)
            v = _values(bases[e].functions, xq, f.fixed)
            vals = np.asarray(data.psi0(xq), dtype=complex)
            rhs[off[e]:off[e] + bases[e].dim] += 1j * ((v.conj() * wq) @ vals)
        elif f.kind is FacetKind.TIME_INTERIOR:
            _add_time_facet(M, f, bases[f.left].functions, bases[f.right].functions,
                            off[f.left], off[f.right], n_facet)
        elif f.kind is FacetKind.DIRICHLET:
            e = f.owner
            funcs = bases[e].functions
            _add_dirichlet_matrix(M, f, funcs, off[e], n_facet)
            tq, wq = mapped_interval(f.span[0], f.span[1], n_data)
            v = _values(funcs, f.fixed, tq)
            g = _values(funcs, f.fixed, tq, _DX)
            gv = np.asarray(data.g_D(np.full_like(tq, f.fixed), tq), dtype=complex)
            rhs[off[e]:off[e] + len(funcs)] += 0.5 * (
                f.normal_sign * ((g.conj() * wq) @ gv)
                + 1j * f.alpha * ((v.conj() * wq) @ gv))

    if space.needs_volume_term:
        for e in elem_ids:
            _add_volume(M, mesh, e, bases[e].functions, off[e], n_poly)

    return M, rhs, _dof_map(bases, elem_ids, off)


def solve_global(mesh: Mesh, space: SpaceKind, data: BoundaryData,
                 n_quad: int | None = None) -> DiscreteSolution:
    """Solve the fully coupled system at once (oracle for the marching path)."""
    M, rhs, dof_map = assemble_global(mesh, space, data, n_quad)
    x = FactoredMatrix(M).solve(rhs)
    bases = element_bases(mesh, space)
    sol = DiscreteSolution(mesh, space, bases)
    for el in mesh.elements:
        rows = [dof_map[(el.id, i)] for i in range(bases[el.id].dim)]
        sol.set_coeffs(el.id, x[rows])
    return sol


def apply_form_to_field(mesh: Mesh, space: SpaceKind, field,
                        n_quad: int | None = None) -> np.ndarray:
    """A(field, phi_a) for every global test dof, with the field's one-sided traces.

    The field must expose value(elem_id, xs, ts) and dx(elem_id, xs, ts).
    Used for consistency and Galerkin-orthogonality checks.
    """
    bases = element_bases(mesh, space)
    elem_ids = [el.id for el in mesh.elements]
    off, n = _offsets(bases, elem_ids)
    _, n_data = _rule_sizes(space, n_quad)
    out = np.zeros(n, dtype=complex)

    for f in mesh.facets:
        if f.kind in (FacetKind.SPACE_INTERIOR, FacetKind.FINAL):
            xq, wq = mapped_interval(f.span[0], f.span[1], n_data)
            fm = np.asarray(field.value(f.below, xq, f.fixed), dtype=complex)
            e = f.below
            v = _values(bases[e].functions, xq, f.fixed)
            out[off[e]:off[e] + bases[e].dim] += 1j * ((v.conj() * wq) @ fm)
            if f.kind is FacetKind.SPACE_INTERIOR:
                up = f.above
                vu = _values(bases[up].functions, xq, f.fixed)
                out[off[up]:off[up] + bases[up].dim] -= 1j * ((vu.conj() * wq) @ fm)
        elif f.kind is FacetKind.TIME_INTERIOR:
            tq, wq = mapped_interval(f.span[0], f.span[1], n_data)
            v1 = np.asarray(field.value(f.left, f.fixed, tq), dtype=complex)
            v2 = np.asarray(field.value(f.right, f.fixed, tq), dtype=complex)
            g1 = np.asarray(field.dx(f.left, f.fixed, tq), dtype=complex)
            g2 = np.asarray(field.dx(f.right, f.fixed, tq), dtype=complex)
            avg_g, jump_v = 0.5 * (g1 + g2), v1 - v2
            avg_v, jump_g = 0.5 * (v1 + v2), g1 - g2
            for e, na in ((f.left, 1.0), (f.right, -1.0)):
                v = _values(bases[e].functions, f.fixed, tq)
                g = _values(bases[e].functions, f.fixed, tq, _DX)
                contrib = 0.5 * (na * ((v.conj() * wq) @ avg_g)
                                 + 1j * f.alpha * na * ((v.conj() * wq) @ jump_v)
                                 - na * ((g.conj() * wq) @ avg_v)
                                 + 1j * f.beta * na * ((g.conj() * wq) @ jump_g))
                out[off[e]:off[e] + bases[e].dim] += contrib
        elif f.kind is FacetKind.DIRICHLET:
            e = f.owner
            tq, wq = mapped_interval(f.span[0], f.span[1], n_data)
            fv = np.asarray(field.value(e, f.fixed, tq), dtype=complex)
            fg = np.asarray(field.dx(e, f.fixed, tq), dtype=complex)
            v = _values(bases[e].functions, f.fixed, tq)
            flux = f.normal_sign * fg + 1j * f.alpha * fv
            out[off[e]:off[e] + bases[e].dim] += 0.5 * ((v.conj() * wq) @ flux)

    if space.needs_volume_term:
        for e in elem_ids:
            el = mesh.elements[e]
            xg, tg, wg = rect_rule(el.x_range, el.t_range, n_data)
            fv = np.asarray(field.value(e, xg, tg), dtype=complex)
            sv = np.stack([
                np.zeros_like(xg, dtype=complex) if isinstance(fn, Wave)
                else _values([apply_schrodinger(fn)], xg, tg)[0]
                for fn in bases[e].functions
            ])
            out[off[e]:off[e] + bases[e].dim] += (sv.conj() * wg) @ fv

    return out


def assemble_functional(mesh: Mesh, space: SpaceKind, data: BoundaryData,
                        n_quad: int | None = None) -> np.ndarray:
    """l(phi_a) for every global test dof."""
    _, rhs, _ = assemble_global(mesh, space, data, n_quad)
    return rhs
