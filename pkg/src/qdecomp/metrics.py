"""Distance measures, discrimination bounds and the discrimination game.

Covers the classical variation distance and collision complement for
probability vectors, the trace distance and Hilbert-Schmidt product for
states, the decomposition-averaged trace distance with its lower/upper
bounds, the optimal two-outcome (Helstrom) measurement, and a Monte Carlo
simulation of the guessing game those quantities describe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import NotPSD, NotUnitTrace, PreconditionViolated, RadicandOutOfRange
from .linalg import DensityMatrix, hermitize, max_abs
from .rng import generator

if TYPE_CHECKING:  # pragma: no cover
    from .decompose import Decomposition

WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class ClassicalDistribution:
    """A finite probability vector: entries >= 0 summing to 1 within 1e-12."""

    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size == 0 or np.any(p < 0):
            raise NotPSD(float(p.min()) if p.size else 0.0)
        s = float(p.sum())
        if abs(s - 1.0) > 1e-12:
            raise NotUnitTrace(abs(s - 1.0))
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class BoundsReport:
    """Lower/upper bounds on the decomposition-averaged trace distance."""

    lower: float
    upper: float
    hs_product: float

    def __post_init__(self):
        if not (-1e-10 <= self.lower <= self.upper + 1e-10 <= 1 + 2e-10):
            raise RadicandOutOfRange(self.lower - self.upper)


@dataclass(frozen=True)
class HelstromMeasurement:
    """Optimal two-outcome measurement: projector for the accept-rho outcome."""

    projector: np.ndarray
    success_prob: float

    def __post_init__(self):
        p = np.asarray(self.projector, dtype=np.complex128)
        p.flags.writeable = False
        object.__setattr__(self, "projector", p)


def _padded(p: ClassicalDistribution, q: ClassicalDistribution) -> tuple[np.ndarray, np.ndarray]:
    a, b = p.probs, q.probs
    n = max(a.size, b.size)
    return np.pad(a, (0, n - a.size)), np.pad(b, (0, n - b.size))


def classical_variation_distance(p: ClassicalDistribution, q: ClassicalDistribution) -> float:
    """Half the l1 distance between two probability vectors.

    Shorter vectors are zero-padded. Equals 1 - sum_i min(p_i, q_i).
    """
    a, b = _padded(p, q)
    return float(0.5 * np.sum(np.abs(a - b)))


def collision_complement(p: ClassicalDistribution, q: ClassicalDistribution) -> float:
    """1 - sum_i p_i q_i: the chance two independent draws do not collide."""
    a, b = _padded(p, q)
    return float(1.0 - np.dot(a, b))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """Half the sum of absolute eigenvalues of rho - sigma."""
    w = np.linalg.eigvalsh(hermitize(rho.matrix - sigma.matrix))
    return float(0.5 * np.sum(np.abs(w)))


def pure_trace_distance(overlap2: float) -> float:
    """Trace distance between two pure states from their squared overlap."""
    return float(np.sqrt(max(1.0 - overlap2, 0.0)))


def hs_inner_product(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """tr(rho sigma), guaranteed real for Hermitian inputs."""
    t = complex(np.sum(rho.matrix * sigma.matrix.T))
    assert abs(t.imag) <= 1e-12
    return float(t.real)


def _delta_matrix(d_rho: "Decomposition", d_sigma: "Decomposition"):
    """Weights and the pairwise pure-state trace-distance matrix.

    Elements with weight below 1e-12 are dropped first.
    """
    pw, pv = d_rho.weights, d_rho.state_matrix
    qw, qv = d_sigma.weights, d_sigma.state_matrix
    pk = pw >= WEIGHT_FLOOR
    qk = qw >= WEIGHT_FLOOR
    pw, pv = pw[pk], pv[:, pk]
    qw, qv = qw[qk], qv[:, qk]
    overlap2 = np.abs(pv.conj().T @ qv) ** 2
    deltas = np.sqrt(np.clip(1.0 - overlap2, 0.0, None))
    return pw, qw, deltas


def average_trace_distance(d_rho: "Decomposition", d_sigma: "Decomposition") -> float:
    """Weighted mean of pairwise trace distances across two decompositions."""
    pw, qw, deltas = _delta_matrix(d_rho, d_sigma)
    return float(pw @ deltas @ qw)


def bounds(rho: DensityMatrix, sigma: DensityMatrix) -> BoundsReport:
    """Trace-distance lower bound and sqrt(1 - tr(rho sigma)) upper bound.

    The radicand is clamped into [0, 1] when within 1e-12 of either
    boundary; anything below -1e-12 raises :class:`RadicandOutOfRange`.
    """
    hs = hs_inner_product(rho, sigma)
    radicand = 1.0 - hs
    if radicand < -1e-12:
        raise RadicandOutOfRange(radicand)
    radicand = min(max(radicand, 0.0), 1.0)
    return BoundsReport(lower=trace_distance(rho, sigma), upper=float(np.sqrt(radicand)), hs_product=hs)


def helstrom(rho: DensityMatrix, sigma: DensityMatrix) -> HelstromMeasurement:
    """Projector onto the nonnegative eigenspace of rho - sigma.

    Zero eigenvalues are assigned to the accept-rho outcome so the output
    is reproducible. The success probability is computed from the
    projector and checked against (1 + trace_distance)/2.
    """
    diff = hermitize(rho.matrix - sigma.matrix)
    w, v = np.linalg.eigh(diff)
    keep = w >= 0.0
    proj = v[:, keep] @ v[:, keep].conj().T
    succ = 0.5 * float(
        np.trace(proj @ rho.matrix).real + np.trace((np.eye(rho.dim) - proj) @ sigma.matrix).real
    )
    assert max_abs(proj @ proj - proj) <= 1e-10
    assert abs(succ - (1.0 + 0.5 * np.sum(np.abs(w))) / 2.0) <= 1e-10
    return HelstromMeasurement(projector=proj, success_prob=succ)


def simulate_game(d_rho: "Decomposition", d_sigma: "Decomposition", shots: int, seed: int) -> float:
    """Empirical success rate of discrimination with side information.

    Each shot samples an element index from each decomposition, a true
    owner (rho or sigma with equal odds), and the outcome of the optimal
    measurement for that element pair applied to the true state. The four
    uniform draws per shot are consumed in that order. Deterministic for
    a fixed seed.
    """
    if shots < 1:
        raise PreconditionViolated("shots must be >= 1")
    pw, pv = d_rho.weights, d_rho.state_matrix
    qw, qv = d_sigma.weights, d_sigma.state_matrix

    # success-prob lookup per (i, j): p_rho[i,j] = tr(P rho_i), p_sig[i,j] = tr(P sigma_j)
    m, n = pw.size, qw.size
    accept_rho = np.empty((m, n))
    accept_sig = np.empty((m, n))
    for i in range(m):
        rho_i = DensityMatrix(np.outer(pv[:, i], pv[:, i].conj()))
        for j in range(n):
            sig_j = DensityMatrix(np.outer(qv[:, j], qv[:, j].conj()))
            meas = helstrom(rho_i, sig_j)
            accept_rho[i, j] = float(np.trace(meas.projector @ rho_i.matrix).real)
            accept_sig[i, j] = float(np.trace(meas.projector @ sig_j.matrix).real)

    u = generator(seed).random((shots, 4))
    i_idx = np.searchsorted(np.cumsum(pw), u[:, 0] * pw.sum(), side="right").clip(0, m - 1)
    j_idx = np.searchsorted(np.cumsum(qw), u[:, 1] * qw.sum(), side="right").clip(0, n - 1)
    owner_is_rho = u[:, 2] < 0.5
    p_accept = np.where(owner_is_rho, accept_rho[i_idx, j_idx], accept_sig[i_idx, j_idx])
    outcome_rho = u[:, 3] < p_accept
    success = outcome_rho == owner_is_rho
    return float(np.count_nonzero(success) / shots)
