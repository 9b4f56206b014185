"""Gauss-Legendre quadrature on intervals and tensor rules on rectangles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

MAX_NODES = 64


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes in (-1, 1) and positive weights summing to 2."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.nodes)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadratureRule:
    if not 1 <= n <= MAX_NODES:
        raise ValueError(f"node count {n} outside [1, {MAX_NODES}]")
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return QuadratureRule(x, w)


@lru_cache(maxsize=8192)
def mapped_interval(lo: float, hi: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Rule mapped affinely to (lo, hi); cached since meshes reuse few spans."""
    rule = gauss_legendre(n)
    half = 0.5 * (hi - lo)
    pts = 0.5 * (lo + hi) + half * rule.nodes
    wts = half * rule.weights
    pts.flags.writeable = False
    wts.flags.writeable = False
    return pts, wts


@lru_cache(maxsize=8192)
def rect_rule(x_range: tuple[float, float], t_range: tuple[float, float], n: int
              ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tensor rule on a rectangle, flattened to (xg, tg, wg)."""
    xq, wx = mapped_interval(x_range[0], x_range[1], n)
    tq, wt = mapped_interval(t_range[0], t_range[1], n)
    xg, tg = np.meshgrid(xq, tq, indexing="ij")
    wg = np.outer(wx, wt)
    out = (xg.ravel(), tg.ravel(), wg.ravel())
    for a in out:
        a.flags.writeable = False
    return out


def box_rule(ranges, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor rule on a d-dimensional box; returns points (nq, d) and weights."""
    axes = [mapped_interval(lo, hi, n) for lo, hi in ranges]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    wts = np.ones(pts.shape[0])
    d = len(axes)
    for k, (_, w) in enumerate(axes):
        shape = [1] * d
        shape[k] = len(w)
        wts = wts * np.broadcast_to(w.reshape(shape), [len(a[0]) for a in axes]).ravel()
    return pts, wts


def integrate_interval(f, interval: tuple[float, float], n: int) -> complex:
    """Integrate a complex-valued integrand over (lo, hi).

    The integrand is called once with the array of quadrature points; plain
    scalar functions are evaluated pointwise as a fallback.
    """
    lo, hi = interval
    if not lo < hi:
        raise ValueError("interval must satisfy lo < hi")
    pts, wts = mapped_interval(lo, hi, n)
    try:
        vals = np.asarray(f(pts), dtype=complex)
        if vals.ndim == 0:
            vals = np.full(pts.shape, complex(vals))
        elif vals.shape != pts.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([f(float(x)) for x in pts], dtype=complex)
    return complex(np.sum(wts * vals))


def integrate_rect(f, x_range, t_range, n: int) -> complex:
    """Tensor-rule integral of f(x, t) over a rectangle."""
    xg, tg, wg = rect_rule(tuple(x_range), tuple(t_range), n)
    vals = np.asarray(f(xg, tg), dtype=complex)
    return complex(np.sum(wg * vals))


def poly_rule_size(p: int) -> int:
    """Nodes for polynomial x polynomial facet integrands of degree <= 4p."""
    return 2 * p + 2


def data_rule_size(p: int) -> int:
    """Oversampled rule for integrands involving exponentials."""
    return max(20, 2 * p + 2)
