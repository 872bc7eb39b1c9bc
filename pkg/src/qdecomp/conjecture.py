"""Empirical machinery around the tightness and feasibility conjectures.

Random state generation, a derivative-free search for unbiased
decomposition pairs, a feasibility hunt with one side held fixed, batch
fuzzing with sandwich verification, and the contextuality gap values.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import metrics
from .decompose import (
    Decomposition,
    DecompositionPair,
    _haar_unitary,
    _mix_arrays,
    eigen_decomposition,
    make_pair,
    max_mixed_pair,
    rank2_left_against,
    unbiased_against,
)
from .errors import NoConvergence, PreconditionViolated, TheoremViolation
from .linalg import DensityMatrix, PureState, maximally_mixed, validate_density
from .metrics import average_trace_distance, bounds, hs_inner_product
from .optimize import golden_section_max, phase_factor, rotation_factor
from .rng import child_seed, generator

SANDWICH_SLACK = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    """Budget and behaviour knobs for the decomposition searches."""

    gap_tol: float = 1e-4
    feas_tol: float = 1e-3
    restarts: int = 8
    stall_restarts: int = 3
    max_sweeps: int = 40
    sweep_tol: float = 1e-13
    grid_points: int = 11
    extra_states: int = 0
    objective: str = "delta"
    seed: int = 0


DEFAULT_CONFIG = SearchConfig()


@dataclass(frozen=True)
class TrialReport:
    """Outcome record of one search run.

    ``wall_time`` is bookkeeping, not part of the deterministic record: it
    is excluded from equality and from default serialization.
    """

    seed: int
    dim: int
    ranks: tuple[int, int]
    hs_product: float
    lower: float
    upper: float
    best_delta: float
    max_deviation: float
    converged: bool
    restarts_used: int
    wall_time: float = field(compare=False)

    def __post_init__(self):
        if self.converged and not (
            self.lower - SANDWICH_SLACK <= self.best_delta <= self.upper + SANDWICH_SLACK
        ):
            raise TheoremViolation(
                f"converged delta {self.best_delta!r} escapes "
                f"[{self.lower!r}, {self.upper!r}]"
            )


@dataclass(frozen=True)
class ContextualityReport:
    """Gap between the unbiased and the identical-decomposition averages for I/d."""

    dim: int
    delta_unbiased: float
    delta_noncontextual_max: float
    gap: float


@dataclass(frozen=True)
class FuzzResult:
    reports: list
    summary: dict


def random_density(dim: int, rank: int, seed: int) -> DensityMatrix:
    """Random state GG†/tr(GG†) with G a dim x rank complex Gaussian matrix."""
    if not 1 <= rank <= dim:
        raise PreconditionViolated(f"rank {rank} outside [1, {dim}]")
    rng = generator(seed)
    g = (rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))) / np.sqrt(2.0)
    a = g @ g.conj().T
    return validate_density(a / float(np.trace(a).real))


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary (QR of a complex Gaussian with phase fix)."""
    return _haar_unitary(dim, rng)


# -- search internals ---------------------------------------------------------


class _Side:
    """One side of the search: a base decomposition and its current unitary.

    Element vectors are W = B U[:m, :] where B holds sqrt-weighted base
    states; with ``extra`` additional columns the first m rows of a larger
    unitary act as a row-orthonormal isometry, which reaches every
    decomposition into m + extra elements.
    """

    def __init__(self, base: Decomposition, extra: int):
        self.base = base
        self.m = len(base)
        self.size = self.m + extra
        self.b = base.state_matrix * np.sqrt(base.weights)

    def elements(self, u: np.ndarray) -> np.ndarray:
        return self.b @ u[..., : self.m, :]


def _pq_g2(wl: np.ndarray, wr: np.ndarray):
    """Weight products and squared raw overlaps; either side may carry a batch axis."""
    p = np.sum(np.abs(wl) ** 2, axis=-2)
    q = np.sum(np.abs(wr) ** 2, axis=-2)
    pq = p[..., :, None] * q[..., None, :]
    g2 = np.abs(np.swapaxes(wl, -2, -1).conj() @ wr) ** 2
    return pq, g2


def _delta_of(wl: np.ndarray, wr: np.ndarray):
    """Average pairwise pure-state trace distance (batch-aware)."""
    pq, g2 = _pq_g2(wl, wr)
    vals = np.sum(np.sqrt(np.clip(pq * (pq - g2), 0.0, None)), axis=(-2, -1))
    return vals if vals.ndim else float(vals)


def _neg_sq_deviation_fn(hs: float):
    def value(wl: np.ndarray, wr: np.ndarray):
        pq, g2 = _pq_g2(wl, wr)
        num = (g2 - hs * pq) ** 2
        terms = np.divide(num, pq, out=np.zeros_like(num), where=pq > 1e-300)
        vals = -np.sum(terms, axis=(-2, -1))
        return vals if vals.ndim else float(vals)

    return value


def _coordinate_moves(size: int, active: int):
    """Elementary moves on U(size) that act on the first ``active`` rows."""
    moves = [("phase", a, 0) for a in range(min(active, size))]
    for a in range(size):
        for b in range(a + 1, size):
            if a < active or b < active:
                moves.append(("rot", a, b))
                moves.append(("rot_q", a, b))
    return moves


def _factor_stack(kind: str, a: int, b: int, ts: np.ndarray, m: int) -> np.ndarray:
    """Stack of elementary factors, one per angle in ``ts``."""
    u = np.tile(np.eye(m, dtype=np.complex128), (ts.size, 1, 1))
    if kind == "phase":
        u[:, a, a] = np.exp(1j * ts)
    else:
        c, s = np.cos(ts), np.sin(ts)
        off = -1j * s if kind == "rot_q" else -s
        mirror = -1j * s if kind == "rot_q" else s
        u[:, a, a] = c
        u[:, b, b] = c
        u[:, a, b] = off
        u[:, b, a] = mirror
    return u


def _apply_move(kind: str, a: int, b: int, t: float, u: np.ndarray) -> np.ndarray:
    m = u.shape[0]
    if kind == "phase":
        return phase_factor(m, a, t) @ u
    return rotation_factor(m, a, b, t, kind == "rot_q") @ u


def _ascend(sides, us, value_fn, config: SearchConfig, gap_scale):
    """Coordinate ascent over the side unitaries; returns (best, us, sweeps).

    The grid stage of every line search is evaluated as one batched matrix
    product. A sweep stops the loop when its improvement falls below the
    absolute floor or below 1e-4 of the remaining ``gap_scale`` (so runs
    stuck far from the target give up quickly while near-converged runs
    keep polishing).
    """
    ws = [side.elements(u) for side, u in zip(sides, us)]
    best = value_fn(ws[0], ws[1])
    sweeps = 0
    period = 2.0 * np.pi
    for _ in range(config.max_sweeps):
        sweeps += 1
        start = best
        for idx, side in enumerate(sides):
            if side.size == 1 or side.base is None:
                continue
            other = ws[1 - idx]
            for kind, a, b in _coordinate_moves(side.size, side.m):
                ts = np.linspace(-period / 2, period / 2, config.grid_points, endpoint=False)
                stack = _factor_stack(kind, a, b, ts, side.size) @ us[idx]
                w_stack = side.elements(stack)
                grid_vals = value_fn(w_stack, other) if idx == 0 else value_fn(other, w_stack)
                gi = int(np.argmax(grid_vals))

                def fn(t: float) -> float:
                    u_t = _apply_move(kind, a, b, t, us[idx])
                    w_t = side.elements(u_t)
                    return value_fn(w_t, other) if idx == 0 else value_fn(other, w_t)

                step = period / config.grid_points
                t_best, v_best = golden_section_max(
                    fn, ts[gi] - step, ts[gi] + step, tol=1e-7
                )
                if grid_vals[gi] > v_best:
                    t_best, v_best = float(ts[gi]), float(grid_vals[gi])
                if v_best > best + 1e-15:
                    us[idx] = _apply_move(kind, a, b, t_best, us[idx])
                    ws[idx] = side.elements(us[idx])
                    best = v_best
        if best - start < max(config.sweep_tol, 1e-4 * gap_scale(best)):
            break
    return best, us, sweeps


def _decomposition_from(side: _Side, u: np.ndarray) -> Decomposition:
    w, vecs = _mix_arrays(side.base.weights, side.base.state_matrix, u[: side.m, :])
    keep = w >= 1e-12
    return Decomposition(
        weights=w[keep],
        states=tuple(PureState(vecs[:, i]) for i in np.flatnonzero(keep)),
        target=side.base.target,
    )


def _seed_unitary(base: Decomposition, guess: Decomposition, size: int) -> np.ndarray:
    """Unitary mapping ``base`` onto ``guess`` via the mixture theorem, embedded in U(size)."""
    m = len(base)
    scaled = guess.state_matrix * np.sqrt(guess.weights)
    mat = (base.state_matrix.conj().T @ scaled) / np.sqrt(base.weights)[:, None]
    u_svd, _, v_svd = np.linalg.svd(mat)
    u = np.eye(size, dtype=np.complex128)
    u[:m, :m] = u_svd @ v_svd
    return u


def _safe_unbiased_seed(rho, sigma, seed):
    try:
        return unbiased_against(rho, sigma, seed=seed)
    except NoConvergence:
        return eigen_decomposition(rho)


def search_unbiased(
    rho: DensityMatrix, sigma: DensityMatrix, config: SearchConfig = DEFAULT_CONFIG
) -> tuple[DecompositionPair, TrialReport]:
    """Search for an unbiased decomposition pair of (rho, sigma).

    Both sides range over minimal decompositions (plus ``extra_states``
    elements when configured), parameterized by a unitary mixing of the
    eigenbasis decomposition. The default objective maximizes the average
    trace distance; ``objective="deviation"`` minimizes the weighted
    squared deviation of the overlaps from tr(rho sigma) instead. Restarts
    start from decompositions equalized against the opposite state, then
    from random unitaries. Non-convergence is reported, never raised.
    """
    t0 = time.perf_counter()
    rep = bounds(rho, sigma)
    left_base = eigen_decomposition(rho)
    right_base = eigen_decomposition(sigma)
    sides = [_Side(left_base, config.extra_states), _Side(right_base, config.extra_states)]

    hs = rep.hs_product
    if config.objective == "delta":
        value_fn = _delta_of
        gap_scale = lambda v: max(rep.upper - v, 0.0)
    elif config.objective == "deviation":
        value_fn = _neg_sq_deviation_fn(hs)
        gap_scale = lambda v: max(-v, 0.0)
    else:
        raise PreconditionViolated(f"unknown objective {config.objective!r}")

    seed_left = _seed_unitary(
        left_base, _safe_unbiased_seed(rho, sigma, config.seed), sides[0].size
    )
    seed_right = _seed_unitary(
        right_base, _safe_unbiased_seed(sigma, rho, config.seed), sides[1].size
    )

    best_value = -np.inf
    best_us = None
    restarts_used = 0
    stalled = 0
    for restart in range(config.restarts):
        restarts_used = restart + 1
        if restart == 0:
            us = [seed_left.copy(), seed_right.copy()]
        else:
            rng = generator(config.seed, restart)
            us = [random_unitary(s.size, rng) for s in sides]
        value, us, _ = _ascend(sides, us, value_fn, config, gap_scale)
        if value > best_value + 1e-12:
            best_value = value
            best_us = [u.copy() for u in us]
            stalled = 0
        else:
            stalled += 1
        best_delta_so_far = _delta_of(sides[0].elements(best_us[0]), sides[1].elements(best_us[1]))
        if rep.upper - best_delta_so_far <= 0.02 * config.gap_tol:
            break
        if stalled >= config.stall_restarts:
            break

    left = _decomposition_from(sides[0], best_us[0])
    right = _decomposition_from(sides[1], best_us[1])
    pair = make_pair(left, right)
    report = TrialReport(
        seed=config.seed,
        dim=rho.dim,
        ranks=(rho.rank, sigma.rank),
        hs_product=hs,
        lower=rep.lower,
        upper=rep.upper,
        best_delta=pair.delta_avg,
        max_deviation=pair.max_deviation,
        converged=bool(rep.upper - pair.delta_avg <= config.gap_tol),
        restarts_used=restarts_used,
        wall_time=time.perf_counter() - t0,
    )
    return pair, report


def fixed_sigma_feasibility(
    rho: DensityMatrix, sigma_decomp: Decomposition, config: SearchConfig = DEFAULT_CONFIG
) -> TrialReport:
    """Search for a decomposition of rho unbiased against a fixed sigma decomposition.

    Every element of ``sigma_decomp`` must already satisfy
    tr(rho sigma_j) = tr(rho sigma) within 1e-8. Only the rho side is
    optimized; the report carries the smallest maximal overlap deviation
    found, and ``converged`` means it dropped to the feasibility
    tolerance.
    """
    t0 = time.perf_counter()
    sigma = sigma_decomp.target
    if sigma.dim != rho.dim:
        raise PreconditionViolated("dimension mismatch")
    hs = hs_inner_product(rho, sigma)
    marg = [
        float(np.real(np.vdot(st.amplitudes, rho.matrix @ st.amplitudes)))
        for st in sigma_decomp.states
    ]
    worst = max(abs(v - hs) for v in marg)
    if worst > 1e-8:
        raise PreconditionViolated(
            f"sigma decomposition element deviates from tr(rho sigma) by {worst:.3e}"
        )
    rep = bounds(rho, sigma)

    left_base = eigen_decomposition(rho)
    side = _Side(left_base, config.extra_states)
    fixed = sigma_decomp.state_matrix * np.sqrt(sigma_decomp.weights)
    sides = [side, _FixedSide(fixed)]
    value_fn = _neg_sq_deviation_fn(hs)
    gap_scale = lambda v: max(-v, 0.0)

    seeds = [_seed_unitary(left_base, _safe_unbiased_seed(rho, sigma, config.seed), side.size)]
    if sigma.rank == 2 and rho.rank >= 2:
        try:
            constructed = rank2_left_against(
                rho,
                sigma_decomp.states[0].amplitudes,
                sigma_decomp.states[1].amplitudes,
                hs,
                seed=config.seed,
            )
            seeds.append(_seed_unitary(left_base, constructed, side.size))
        except (NoConvergence, PreconditionViolated):
            pass

    best_value = -np.inf
    best_u = None
    restarts_used = 0
    stalled = 0
    total = len(seeds) + config.restarts
    for restart in range(total):
        restarts_used = restart + 1
        if restart < len(seeds):
            us = [seeds[restart].copy(), np.eye(1)]
        else:
            rng = generator(config.seed, restart)
            us = [random_unitary(side.size, rng), np.eye(1)]
        value, us, _ = _ascend(sides, us, value_fn, config, gap_scale)
        if value > best_value + 1e-12:
            best_value = value
            best_u = us[0].copy()
            stalled = 0
        else:
            stalled += 1
        if _max_dev_against_fixed(side, best_u, fixed, hs) <= 1e-3 * config.feas_tol:
            break
        if restart >= len(seeds) and stalled >= config.stall_restarts:
            break

    left = _decomposition_from(side, best_u)
    pair = make_pair(left, sigma_decomp)
    return TrialReport(
        seed=config.seed,
        dim=rho.dim,
        ranks=(rho.rank, sigma.rank),
        hs_product=hs,
        lower=rep.lower,
        upper=rep.upper,
        best_delta=pair.delta_avg,
        max_deviation=pair.max_deviation,
        converged=bool(pair.max_deviation <= config.feas_tol),
        restarts_used=restarts_used,
        wall_time=time.perf_counter() - t0,
    )


class _FixedSide:
    """A search side whose element vectors never change."""

    def __init__(self, w: np.ndarray):
        self.base = None
        self.m = w.shape[1]
        self.size = 1
        self._w = w

    def elements(self, _u: np.ndarray) -> np.ndarray:
        return self._w


def _max_dev_against_fixed(side: _Side, u: np.ndarray, fixed: np.ndarray, hs: float) -> float:
    wl = side.elements(u)
    p = np.sum(np.abs(wl) ** 2, axis=0)
    q = np.sum(np.abs(fixed) ** 2, axis=0)
    keep_l = p >= 1e-12
    g2 = np.abs(wl[:, keep_l].conj().T @ fixed) ** 2
    overlaps = g2 / np.outer(p[keep_l], q)
    return float(np.max(np.abs(overlaps - hs)))


def contextuality_gap(dim: int) -> ContextualityReport:
    """Average-distance gap for two decompositions of I/d.

    Both values are computed by building the decompositions and averaging
    pairwise distances, then checked against the closed forms
    sqrt(1 - 1/d) and 1 - 1/d.
    """
    if dim < 2:
        raise PreconditionViolated("dim must be >= 2")
    mm = maximally_mixed(dim)
    unbiased = max_mixed_pair(mm)
    delta_unbiased = average_trace_distance(unbiased.left, unbiased.right)
    eigen = eigen_decomposition(mm)
    delta_identical = average_trace_distance(eigen, eigen)

    expect_unbiased = float(np.sqrt(1.0 - 1.0 / dim))
    expect_identical = 1.0 - 1.0 / dim
    if abs(delta_unbiased - expect_unbiased) > 1e-10:
        raise TheoremViolation(
            f"unbiased average {delta_unbiased!r} != sqrt(1-1/d) {expect_unbiased!r}"
        )
    if abs(delta_identical - expect_identical) > 1e-10:
        raise TheoremViolation(
            f"identical-decomposition average {delta_identical!r} != 1-1/d"
        )
    return ContextualityReport(
        dim=dim,
        delta_unbiased=delta_unbiased,
        delta_noncontextual_max=delta_identical,
        gap=delta_unbiased - delta_identical,
    )


# -- batch fuzzing -------------------------------------------------------------


def _fuzz_trial(args) -> TrialReport:
    dim, index, seed, config = args
    tseed = child_seed(seed, dim, index)
    rng = generator(tseed, 0)
    rank_rho = int(rng.integers(1, dim + 1))
    rank_sigma = int(rng.integers(1, dim + 1))
    rho = random_density(dim, rank_rho, child_seed(tseed, 1))
    sigma = random_density(dim, rank_sigma, child_seed(tseed, 2))
    _, report = search_unbiased(rho, sigma, replace(config, seed=tseed))
    return report


def fuzz(
    dims: list[int],
    trials_per_dim: int,
    seed: int,
    config: SearchConfig = DEFAULT_CONFIG,
    jobs: int = 1,
) -> FuzzResult:
    """Random (rho, sigma) searches over each dimension with sandwich checks.

    Reports are merged in trial order, so the output is identical for any
    worker count. A sandwich violation (a returned average outside
    [lower - 1e-9, upper + 1e-9]) is recorded in the summary as a hard
    failure; the CLI turns it into exit code 2.
    """
    tasks = [(d, t, seed, config) for d in dims for t in range(trials_per_dim)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(_fuzz_trial, tasks, chunksize=4))
    else:
        reports = [_fuzz_trial(t) for t in tasks]

    violations = []
    per_dim = {}
    for (d, t, _, _), rep in zip(tasks, reports):
        stats = per_dim.setdefault(d, {"trials": 0, "converged": 0, "worst_gap": 0.0})
        stats["trials"] += 1
        stats["converged"] += int(rep.converged)
        stats["worst_gap"] = max(stats["worst_gap"], rep.upper - rep.best_delta)
        sandwiched = (
            rep.lower - SANDWICH_SLACK <= rep.best_delta <= rep.upper + SANDWICH_SLACK
        )
        if not sandwiched:
            violations.append({"dim": d, "trial": t, "seed": rep.seed})
    total = len(reports)
    converged = sum(int(r.converged) for r in reports)
    summary = {
        "dims": list(dims),
        "trials_per_dim": trials_per_dim,
        "seed": seed,
        "trials": total,
        "converged": converged,
        "convergence_rate": converged / total if total else 1.0,
        "worst_gap": max((r.upper - r.best_delta for r in reports), default=0.0),
        "sandwich_violations": violations,
        "per_dim": {
            str(d): {
                "trials": s["trials"],
                "converged": s["converged"],
                "worst_gap": s["worst_gap"],
            }
            for d, s in sorted(per_dim.items())
        },
    }
    return FuzzResult(reports=reports, summary=summary)
