"""Adaptive Gauss quadrature helpers and direction grids.

All integrators take vectorized integrands: a callable receiving an
``(N,)`` array (1D) or an ``(N, 3)`` array (3D) and returning ``(N,)``
values, real or complex.  Adaptivity is plain panel bisection driven by
a coarse-vs-refined error estimate, with a hard evaluation budget that
turns into :class:`~bslab.errors.QuadratureNotConverged` when exceeded.
"""

from __future__ import annotations

import heapq
from functools import lru_cache

import numpy as np

from .errors import QuadratureNotConverged


@lru_cache(maxsize=64)
def gauss_rule(order: int):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def fixed_gauss(f, a: float, b: float, order: int = 16):
    """Non-adaptive Gauss-Legendre integral of a vectorized integrand."""
    x, w = gauss_rule(order)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * np.sum(w * f(mid + half * x))


def _panel_values(f, edges, order):
    """Integrals of f over each panel defined by consecutive edges."""
    x, w = gauss_rule(order)
    left = edges[:-1]
    half = 0.5 * np.diff(edges)
    mid = left + half
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(nodes)).reshape(len(half), order)
    return half * (vals @ w)


def adaptive_line(f, a: float, b: float, tol: float = 1e-8, order: int = 12,
                  breakpoints=None, max_panels: int = 20000):
    """Adaptive panel quadrature of a vectorized integrand over [a, b].

    ``breakpoints`` seeds the initial panel edges (interior points are
    clipped to (a, b)); callers use it to pre-split at known kinks or
    near-singular points and to seed oscillation-resolving panels.
    Returns (value, error_estimate).
    """
    if b <= a:
        return 0.0 * np.asarray(f(np.array([a]))).ravel()[0], 0.0
    edges = [a, b]
    if breakpoints is not None:
        edges.extend(float(t) for t in breakpoints if a < t < b)
    edges = np.unique(np.asarray(edges, dtype=float))

    coarse = _panel_values(f, edges, order)
    # refined estimate: split each panel in two
    halves = np.repeat(edges, 2)[1:-1].reshape(-1, 2).mean(axis=1)
    fine_edges = np.sort(np.concatenate([edges, halves]))
    fine = _panel_values(f, fine_edges, order)
    fine_pairs = fine[0::2] + fine[1::2]
    errs = np.abs(fine_pairs - coarse)

    heap = []
    total = 0.0 + 0.0j
    total_err = 0.0
    counter = 0
    for i in range(len(coarse)):
        heapq.heappush(heap, (-errs[i], counter, edges[i], edges[i + 1],
                              fine_pairs[i], errs[i]))
        counter += 1
        total += fine_pairs[i]
        total_err += errs[i]
    n_panels = len(coarse)

    while total_err > tol and heap:
        neg_err, _, lo, hi, val, err = heapq.heappop(heap)
        if err <= 0.0:
            heapq.heappush(heap, (neg_err, counter, lo, hi, val, err))
            counter += 1
            break
        if n_panels >= max_panels:
            raise QuadratureNotConverged(
                f"1D quadrature: {n_panels} panels, error {total_err:.3e} > tol {tol:.3e}",
                estimate=total, error=total_err)
        mid = 0.5 * (lo + hi)
        sub_edges = np.array([lo, mid, hi])
        sub_coarse = _panel_values(f, sub_edges, order)
        sub_fine = _panel_values(
            f, np.array([lo, 0.5 * (lo + mid), mid, 0.5 * (mid + hi), hi]), order)
        for j in range(2):
            v = sub_fine[2 * j] + sub_fine[2 * j + 1]
            e = abs(v - sub_coarse[j])
            heapq.heappush(heap, (-e, counter, sub_edges[j], sub_edges[j + 1], v, e))
            counter += 1
            total += v
            total_err += e
        total -= val
        total_err -= err
        n_panels += 1

    value = total if np.iscomplexobj(coarse) else total.real
    return value, total_err


def _cube_tensor(f, lo, hi, order):
    """Tensor Gauss integral of f over the box [lo, hi] (both (3,))."""
    x, w = gauss_rule(order)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    axes = [mid[d] + half[d] * x for d in range(3)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
    vals = np.asarray(f(pts)).reshape(order, order, order)
    wx = w * half[0]
    wy = w * half[1]
    wz = w * half[2]
    return np.einsum("ijk,i,j,k->", vals, wx, wy, wz)


def _cube_children(lo, hi):
    mid = 0.5 * (lo + hi)
    kids = []
    for ix in range(2):
        for iy in range(2):
            for iz in range(2):
                clo = np.array([lo[0] if ix == 0 else mid[0],
                                lo[1] if iy == 0 else mid[1],
                                lo[2] if iz == 0 else mid[2]])
                chi = np.array([mid[0] if ix == 0 else hi[0],
                                mid[1] if iy == 0 else hi[1],
                                mid[2] if iz == 0 else hi[2]])
                kids.append((clo, chi))
    return kids


def adaptive_cube(f, lo, hi, tol: float = 1e-8, order: int = 6,
                  init_split: int = 1, max_refine: int = 3000):
    """Adaptive tensor-Gauss integral of a vectorized integrand over a box.

    Each cell's error is estimated as |coarse - sum of 8 children|; the
    worst cell is refined until the summed error estimate meets ``tol``.
    Returns (value, error_estimate); raises QuadratureNotConverged when
    the refinement budget runs out.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    init_split = max(1, int(init_split))
    xs = [np.linspace(lo[d], hi[d], init_split + 1) for d in range(3)]

    heap = []
    counter = 0
    total = 0.0 + 0.0j
    total_err = 0.0

    def push(clo, chi):
        nonlocal counter, total, total_err
        coarse = _cube_tensor(f, clo, chi, order)
        fine = 0.0 + 0.0j
        kids = _cube_children(clo, chi)
        for klo, khi in kids:
            fine += _cube_tensor(f, klo, khi, order)
        err = abs(fine - coarse)
        heapq.heappush(heap, (-err, counter, clo, chi, fine, err))
        counter += 1
        total += fine
        total_err += err

    for i in range(init_split):
        for j in range(init_split):
            for k in range(init_split):
                push(np.array([xs[0][i], xs[1][j], xs[2][k]]),
                     np.array([xs[0][i + 1], xs[1][j + 1], xs[2][k + 1]]))

    refines = 0
    while total_err > tol and heap:
        neg_err, _, clo, chi, val, err = heapq.heappop(heap)
        if err <= 0.0:
            heapq.heappush(heap, (neg_err, counter, clo, chi, val, err))
            counter += 1
            break
        if refines >= max_refine:
            raise QuadratureNotConverged(
                f"3D quadrature: {refines} refinements, error {total_err:.3e} > tol {tol:.3e}",
                estimate=total, error=total_err)
        total -= val
        total_err -= err
        for klo, khi in _cube_children(clo, chi):
            push(klo, khi)
        refines += 1

    return total, total_err


def fibonacci_sphere(count: int) -> np.ndarray:
    """Deterministic near-uniform direction grid on the unit sphere."""
    i = np.arange(count)
    z = 1.0 - (2.0 * i + 1.0) / count
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def tangent_frame(direction: np.ndarray):
    """Two unit vectors orthogonal to ``direction`` and to each other."""
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    helper = np.array([0.0, 0.0, 1.0])
    if abs(d @ helper) > 0.9:
        helper = np.array([1.0, 0.0, 0.0])
    e1 = np.cross(d, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(d, e1)
    return e1, e2


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f, lo: float, hi: float, iters: int = 40):
    """Golden-section search for the maximum of a scalar unimodal f."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    xm = 0.5 * (a + b)
    return xm, f(xm)


def sphere_ascent(f, start: np.ndarray, step: float = 0.2, rounds: int = 2):
    """Local refinement of a maximizer of f on the unit sphere.

    Runs golden-section searches along two orthogonal great circles
    through the incumbent, shrinking the angular step each round.
    """
    best = np.asarray(start, dtype=float)
    best = best / np.linalg.norm(best)
    fbest = f(best)
    for _ in range(rounds):
        for axis in range(2):
            e1, e2 = tangent_frame(best)
            t = e1 if axis == 0 else e2

            def along(angle, b=best, tv=t):
                v = np.cos(angle) * b + np.sin(angle) * tv
                return f(v / np.linalg.norm(v))

            ang, val = golden_section_max(along, -step, step, iters=25)
            if val > fbest:
                best = np.cos(ang) * best + np.sin(ang) * t
                best /= np.linalg.norm(best)
                fbest = val
        step *= 0.25
    return best, fbest
