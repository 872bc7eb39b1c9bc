"""Derivative-free optimization over products of unitary groups.

The decomposition searches optimize smooth objectives over one unitary
per side. A point is stored as the unitary matrix itself; coordinate
moves are elementary factors applied on the left: a Givens rotation of
two rows (real or quarter-phase flavour) or a single-row phase. Together
these span the full tangent space, so coordinate descent with a
one-dimensional line search per move can reach any local optimum.
"""

from __future__ import annotations

import numpy as np

INVPHI = (np.sqrt(5.0) - 1.0) / 2.0
INVPHI2 = (3.0 - np.sqrt(5.0)) / 2.0


def golden_section_max(fn, lo: float, hi: float, tol: float = 1e-10, max_iter: int = 80):
    """Maximize ``fn`` on [lo, hi] assuming unimodality; returns (x, fn(x))."""
    a, b = float(lo), float(hi)
    h = b - a
    c, d = a + INVPHI2 * h, a + INVPHI * h
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if h <= tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            h = b - a
            c = a + INVPHI2 * h
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + INVPHI * h
            fd = fn(d)
    if fc > fd:
        return c, fc
    return d, fd


def line_search_periodic(fn, period: float, grid: int = 11, refine_tol: float = 1e-11):
    """Maximize a smooth ``period``-periodic function of one angle.

    Scans a uniform grid to locate the best basin, then refines with a
    golden-section pass over the bracketing interval. Returns (x, fn(x)).
    """
    xs = np.linspace(-period / 2.0, period / 2.0, grid, endpoint=False)
    vals = [fn(x) for x in xs]
    best = int(np.argmax(vals))
    step = period / grid
    x, v = golden_section_max(fn, xs[best] - step, xs[best] + step, tol=refine_tol)
    if vals[best] > v:
        return float(xs[best]), float(vals[best])
    return float(x), float(v)


def rotation_factor(m: int, a: int, b: int, theta: float, quarter_phase: bool) -> np.ndarray:
    """Elementary two-row rotation; ``quarter_phase`` picks the i-phased flavour."""
    u = np.eye(m, dtype=np.complex128)
    c, s = np.cos(theta), np.sin(theta)
    if quarter_phase:
        u[a, a] = c
        u[a, b] = -1j * s
        u[b, a] = -1j * s
        u[b, b] = c
    else:
        u[a, a] = c
        u[a, b] = -s
        u[b, a] = s
        u[b, b] = c
    return u


def phase_factor(m: int, a: int, beta: float) -> np.ndarray:
    u = np.eye(m, dtype=np.complex128)
    u[a, a] = np.exp(1j * beta)
    return u
