"""Derivative-free scalar and low-dimensional search routines.

These are deliberately small: the objectives here are cheap pure-Python
functions of two to four variables, and per-iteration overhead of general
purpose optimisers dominates their cost.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class NMResult:
    x: list
    fun: float
    nfev: int
    nit: int
    converged: bool


def nelder_mead(f, x0, step=0.05, xatol=1e-7, fatol=1e-12, maxfev=2000) -> NMResult:
    """Minimise ``f`` from ``x0`` with the standard Nelder-Mead simplex
    (reflection 1, expansion 2, contraction 1/2, shrink 1/2).

    Stops when every vertex lies within ``xatol`` (max-norm) of the best one
    and their values within ``fatol``, or after ``maxfev`` evaluations.
    """
    n = len(x0)
    simplex = [list(map(float, x0))]
    for i in range(n):
        v = list(simplex[0])
        v[i] += step
        simplex.append(v)
    fs = [f(v) for v in simplex]
    nfev = n + 1
    nit = 0
    converged = False
    while nfev < maxfev:
        order = sorted(range(n + 1), key=fs.__getitem__)
        simplex = [simplex[i] for i in order]
        fs = [fs[i] for i in order]
        best = simplex[0]
        if (fs[-1] - fs[0] <= fatol
                and max(abs(v[j] - best[j]) for v in simplex[1:] for j in range(n)) <= xatol):
            converged = True
            break
        nit += 1
        centroid = [sum(v[j] for v in simplex[:-1]) / n for j in range(n)]
        worst = simplex[-1]
        xr = [2.0 * c - w for c, w in zip(centroid, worst)]
        fr = f(xr)
        nfev += 1
        if fr < fs[0]:
            xe = [3.0 * c - 2.0 * w for c, w in zip(centroid, worst)]
            fe = f(xe)
            nfev += 1
            if fe < fr:
                simplex[-1], fs[-1] = xe, fe
            else:
                simplex[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            simplex[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = [1.5 * c - 0.5 * w for c, w in zip(centroid, worst)]
        else:
            xc = [0.5 * c + 0.5 * w for c, w in zip(centroid, worst)]
        fc = f(xc)
        nfev += 1
        if fc < min(fr, fs[-1]):
            simplex[-1], fs[-1] = xc, fc
            continue
        for i in range(1, n + 1):
            simplex[i] = [0.5 * (b + v) for b, v in zip(best, simplex[i])]
            fs[i] = f(simplex[i])
        nfev += n
    i = min(range(n + 1), key=fs.__getitem__)
    return NMResult(simplex[i], fs[i], nfev, nit, converged)


def golden_section_max(f, lo, hi, tol=1e-8):
    """Maximise a unimodal ``f`` on [lo, hi]; returns (x, f(x)).

    The endpoints are also evaluated, so a monotone profile returns its
    boundary maximum.
    """
    a, b = float(lo), float(hi)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    best = max(((c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))), key=lambda t: t[1])
    return best


def bisect(g, lo, hi, tol=1e-12, maxiter=200):
    """Root of ``g`` on [lo, hi] where g(lo), g(hi) have opposite signs (or one
    is zero)."""
    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo > 0) == (ghi > 0):
        raise ValueError(f"root not bracketed: g({lo})={glo}, g({hi})={ghi}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0 or hi - lo < tol:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)
