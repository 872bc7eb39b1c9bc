"""Convex decompositions of density matrices into pure states.

The central construction problem: given states rho and sigma, produce
decompositions rho = sum_i p_i |psi_i><psi_i| and sigma = sum_j q_j
|phi_j><phi_j| whose cross overlaps |<psi_i|phi_j>|^2 all equal
tr(rho sigma). Four constructive routes are implemented (qubits,
maximally mixed sigma, pure sigma, rank-two sigma) on top of the mixing
machinery and an iterative equalization of any convex-linear functional
over the decomposition elements.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metrics
from .errors import (
    IndexOutOfRange,
    NoConvergence,
    NotHermitian,
    NotUnitary,
    PathDegenerate,
    PreconditionViolated,
)
from .linalg import (
    RANK_TOL,
    DensityMatrix,
    PureState,
    canonical_phase,
    complete_basis,
    hermitian_eig,
    hermitize,
    max_abs,
    maximally_mixed,
    projector,
    support_inverse,
)
from .rng import generator

WEIGHT_FLOOR = 1e-12
RECONSTRUCTION_TOL = 1e-8
CERTIFICATE_TOL = 1e-7


@dataclass(frozen=True)
class Decomposition:
    """Weights and pure states reconstructing a target density matrix.

    Invariants checked at construction: all weights positive and summing
    to 1 within 1e-10, and the weighted projector sum reproducing the
    target entrywise within 1e-8. ``minimal`` is true when the number of
    elements equals the rank of the target.
    """

    weights: np.ndarray
    states: tuple[PureState, ...]
    target: DensityMatrix

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size == 0 or np.any(w <= 0):
            raise PreconditionViolated("decomposition weights must be positive")
        if abs(float(w.sum()) - 1.0) > 1e-10:
            raise PreconditionViolated(
                f"decomposition weights sum to {w.sum():.17g}, not 1"
            )
        if len(self.states) != w.size:
            raise PreconditionViolated("weight/state count mismatch")
        w = w.copy()
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)
        err = self.reconstruction_error()
        if err > RECONSTRUCTION_TOL:
            raise PreconditionViolated(
                f"decomposition reconstructs target with error {err:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.target.dim

    def __len__(self) -> int:
        return self.weights.size

    @property
    def state_matrix(self) -> np.ndarray:
        """States as columns of a dim x m matrix."""
        return np.column_stack([s.amplitudes for s in self.states])

    @property
    def minimal(self) -> bool:
        return len(self) == self.target.rank

    def reconstruct(self) -> np.ndarray:
        v = self.state_matrix
        return (v * self.weights) @ v.conj().T

    def reconstruction_error(self) -> float:
        return max_abs(self.reconstruct() - self.target.matrix)


@dataclass(frozen=True)
class DecompositionPair:
    """Two decompositions with their joint overlap statistics.

    ``max_deviation`` is the largest distance of any squared cross overlap
    from tr(rho sigma); the pair is certified unbiased when it is at most
    the certificate tolerance.
    """

    left: Decomposition
    right: Decomposition
    hs_product: float
    max_deviation: float
    delta_avg: float

    def is_unbiased(self, tol: float = CERTIFICATE_TOL) -> bool:
        return self.max_deviation <= tol

    def overlaps(self) -> np.ndarray:
        g = self.left.state_matrix.conj().T @ self.right.state_matrix
        return np.abs(g) ** 2


def make_pair(left: Decomposition, right: Decomposition) -> DecompositionPair:
    """Assemble a pair, computing its overlap statistics."""
    hs = metrics.hs_inner_product(left.target, right.target)
    g = left.state_matrix.conj().T @ right.state_matrix
    max_dev = float(np.max(np.abs(np.abs(g) ** 2 - hs)))
    delta = metrics.average_trace_distance(left, right)
    return DecompositionPair(
        left=left, right=right, hs_product=hs, max_deviation=max_dev, delta_avg=delta
    )


def swapped(pair: DecompositionPair) -> DecompositionPair:
    """The same pair with the roles of the two decompositions exchanged."""
    return make_pair(pair.right, pair.left)


def eigen_decomposition(rho: DensityMatrix, rank_tol: float = RANK_TOL) -> Decomposition:
    """Minimal decomposition of rho into its eigenbasis."""
    spec = hermitian_eig(rho, rank_tol)
    w = spec.eigenvalues[: spec.rank]
    states = tuple(PureState(spec.vectors[:, k]) for k in range(spec.rank))
    return Decomposition(weights=w / float(w.sum()), states=states, target=rho)


def _mix_arrays(weights: np.ndarray, vectors: np.ndarray, u: np.ndarray):
    """Core of the mixture theorem on raw arrays.

    ``vectors`` holds states as columns; ``u`` has one row per old element
    and one column per new element. Returns unnormalized weights and
    normalized state columns; zero-weight columns are kept (callers drop).
    """
    scaled = vectors * np.sqrt(weights)
    new_vecs = scaled @ u
    new_w = np.sum(np.abs(new_vecs) ** 2, axis=0)
    norms = np.sqrt(np.where(new_w > 0, new_w, 1.0))
    return new_w, new_vecs / norms


def mix(d: Decomposition, u: np.ndarray) -> Decomposition:
    """Transform a decomposition by a unitary acting on the element index.

    New elements are |v_i> = sum_k U_ki sqrt(p_k) |psi_k>, renormalized;
    elements with weight below 1e-12 are dropped. The target is unchanged.
    """
    u = np.asarray(u, dtype=np.complex128)
    m = len(d)
    if u.shape != (m, m):
        raise NotUnitary(float("inf"))
    dev = max_abs(u.conj().T @ u - np.eye(m))
    if dev > 1e-10:
        raise NotUnitary(dev)
    new_w, new_v = _mix_arrays(d.weights, d.state_matrix, u)
    keep = new_w >= WEIGHT_FLOOR
    states = tuple(PureState(new_v[:, i]) for i in np.flatnonzero(keep))
    return Decomposition(weights=new_w[keep], states=states, target=d.target)


def swap_unitary(m: int, k: int, l: int, theta: float) -> np.ndarray:
    """Rotation exchanging components k and l as theta runs from 0 to pi."""
    u = np.eye(m, dtype=np.complex128)
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    u[k, k] = c
    u[l, k] = -s
    u[k, l] = s
    u[l, l] = c
    return u


def continuous_swap(d: Decomposition, k: int, l: int, theta: float) -> Decomposition:
    """Mix with the two-component rotation that swaps elements k and l at theta=pi."""
    m = len(d)
    if not (0 <= k < m and 0 <= l < m) or k == l:
        raise IndexOutOfRange(f"indices ({k}, {l}) invalid for {m} elements")
    return mix(d, swap_unitary(m, k, l, theta))


def _element_functional_values(vectors: np.ndarray, observable: np.ndarray) -> np.ndarray:
    return np.real(np.einsum("ji,jk,ki->i", vectors.conj(), observable, vectors))


def _equalize_pass(weights, vectors, observable, target, tol, max_rounds, history):
    """Equalization rounds on raw arrays. Returns (weights, vectors, converged)."""
    f = _element_functional_values(vectors, observable)
    merit = float(np.sum(np.abs(f - target)))
    if history is not None:
        history.append(
            {
                "merit": merit,
                "weighted_merit": float(np.sum(weights * np.abs(f - target))),
                "mean": float(np.dot(weights, f)),
            }
        )
    rounds = 0
    while merit > tol and rounds < max_rounds:
        k = int(np.argmax(f))
        l = int(np.argmin(f))
        if k == l:
            break
        sk = np.sqrt(weights[k]) * vectors[:, k]
        sl = np.sqrt(weights[l]) * vectors[:, l]

        def g(theta: float) -> float:
            c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
            vk = c * sk - s * sl
            vl = s * sk + c * sl
            nk2 = float(np.vdot(vk, vk).real)
            nl2 = float(np.vdot(vl, vl).real)
            fk = float(np.vdot(vk, observable @ vk).real) / max(nk2, 1e-300)
            fl = float(np.vdot(vl, observable @ vl).real) / max(nl2, 1e-300)
            return fk - fl

        lo, hi = 0.0, np.pi
        theta = 0.5 * np.pi
        for _ in range(200):
            theta = 0.5 * (lo + hi)
            val = g(theta)
            if abs(val) <= tol / 10.0:
                break
            if val > 0:
                lo = theta
            else:
                hi = theta

        c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
        vk = c * sk - s * sl
        vl = s * sk + c * sl
        nk, nl = float(np.linalg.norm(vk)), float(np.linalg.norm(vl))
        weights = weights.copy()
        vectors = vectors.copy()
        weights[k], weights[l] = nk**2, nl**2
        if nk > 0:
            vectors[:, k] = vk / nk
        if nl > 0:
            vectors[:, l] = vl / nl

        f = _element_functional_values(vectors, observable)
        merit = float(np.sum(np.abs(f - target)))
        if history is not None:
            history.append(
                {
                    "merit": merit,
                    "weighted_merit": float(np.sum(weights * np.abs(f - target))),
                    "mean": float(np.dot(weights, f)),
                }
            )
        rounds += 1
    return weights, vectors, merit <= tol, merit


def equalize(
    rho: DensityMatrix,
    observable: np.ndarray,
    tol: float = 1e-9,
    max_rounds: int | None = None,
    seed: int = 0,
    start: Decomposition | None = None,
    history: list | None = None,
) -> Decomposition:
    """Minimal decomposition whose elements all share the target functional value.

    The functional is tau -> tr(tau F) for the Hermitian ``observable`` F;
    the common value is tr(rho F). Starting from the eigenbasis
    decomposition (or ``start`` when given), each round picks the elements
    with the largest and smallest functional values (lowest index on ties)
    and rotates the two until their values cross, locating the crossing by
    bisection on (0, pi). Iteration stops when the summed deviation
    sum_i |tr(rho_i F) - tr(rho F)| drops to ``tol``.

    Convergence of this iteration is heuristic: if ``max_rounds`` (default
    200 rank^2) is exhausted, the loop restarts from a random remix, up to
    five times, before raising :class:`NoConvergence`. When ``history`` is
    a list, a record per round is appended with the summed deviation, the
    weight-weighted deviation (which provably decreases every round) and
    the weighted mean of the functional values.
    """
    observable = np.asarray(observable, dtype=np.complex128)
    if observable.shape != (rho.dim, rho.dim):
        raise PreconditionViolated("observable dimension mismatch")
    asym = max_abs(observable - observable.conj().T)
    if asym > 1e-12:
        raise NotHermitian(asym)
    observable = hermitize(observable)

    base = start if start is not None else eigen_decomposition(rho)
    target = float(np.trace(rho.matrix @ observable).real)
    m = len(base)
    if max_rounds is None:
        max_rounds = 200 * m * m

    weights, vectors = base.weights.copy(), base.state_matrix
    final_merit = np.inf
    for restart in range(6):
        weights, vectors, ok, final_merit = _equalize_pass(
            weights, vectors, observable, target, tol, max_rounds, history
        )
        if ok:
            states = tuple(PureState(canonical_phase(vectors[:, i])) for i in range(m))
            return Decomposition(weights=weights, states=states, target=rho)
        rng = generator(seed, restart)
        u = _haar_unitary(m, rng)
        weights, vectors = _mix_arrays(weights, vectors, u)
    raise NoConvergence("equalization did not converge", final_merit)


def _haar_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d.conj() / np.abs(d))


def unbiased_against(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    tol: float = 1e-9,
    seed: int = 0,
    start: Decomposition | None = None,
    history: list | None = None,
) -> Decomposition:
    """Minimal decomposition of rho with every element's tr(rho_i sigma) equal to tr(rho sigma)."""
    if sigma.dim != rho.dim:
        raise PreconditionViolated("dimension mismatch")
    return equalize(rho, sigma.matrix, tol=tol, seed=seed, start=start, history=history)


# -- qubit construction ------------------------------------------------------

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


def bloch_vector(rho: DensityMatrix) -> np.ndarray:
    """Real 3-vector (tr(rho X), tr(rho Y), tr(rho Z)) of a qubit state."""
    if rho.dim != 2:
        raise PreconditionViolated("Bloch coordinates need dim 2")
    return np.array([float(np.trace(rho.matrix @ p).real) for p in _PAULI])


def state_from_bloch(n: np.ndarray) -> PureState:
    """Pure qubit state with unit Bloch vector ``n``."""
    nx, ny, nz = (float(x) for x in n / np.linalg.norm(n))
    if nz >= 0:
        v = np.array([1.0 + nz, nx + 1j * ny], dtype=np.complex128)
    else:
        v = np.array([nx - 1j * ny, 1.0 - nz], dtype=np.complex128)
    return PureState.from_vector(v)


def _orthonormal_frame(r_vec: np.ndarray, s_vec: np.ndarray):
    """Frame with e3 along r_vec and s_vec in the span of (e1, e3), e1-component >= 0."""
    r = float(np.linalg.norm(r_vec))
    e3 = r_vec / r if r > 1e-14 else np.array([0.0, 0.0, 1.0])
    w = s_vec - np.dot(s_vec, e3) * e3
    wn = float(np.linalg.norm(w))
    if wn > 1e-14:
        e1 = w / wn
    else:
        pick = int(np.argmin(np.abs(e3)))
        e1 = np.zeros(3)
        e1[pick] = 1.0
        e1 = e1 - np.dot(e1, e3) * e3
        e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def qubit_pair(rho: DensityMatrix, sigma: DensityMatrix) -> DecompositionPair:
    """Unbiased decomposition pair for any two qubit states.

    In a frame with rho's Bloch vector along z and sigma's in the x-z
    plane, rho splits across the two pure states at (0, +-sqrt(1-r^2), r)
    and sigma across (+-sqrt(1-s_z^2), 0, s_z); every cross product of
    Bloch vectors then equals r s_z, matching tr(rho sigma). Pure inputs
    collapse to single-element decompositions.
    """
    if rho.dim != 2 or sigma.dim != 2:
        raise PreconditionViolated("qubit construction needs dim 2")
    r_vec, s_vec = bloch_vector(rho), bloch_vector(sigma)
    e1, e2, e3 = _orthonormal_frame(r_vec, s_vec)

    def one_sided(target: DensityMatrix, axis_long: np.ndarray, axis_perp: np.ndarray):
        vec = bloch_vector(target)
        if target.rank == 1:
            return Decomposition(
                weights=np.array([1.0]),
                states=(hermitian_eig(target).states()[0],),
                target=target,
            )
        z = float(np.dot(vec, axis_long))
        x = float(np.dot(vec, axis_perp))
        h = float(np.sqrt(max(1.0 - z * z, 0.0)))
        w_plus = 0.5 * (1.0 + x / h)
        w_minus = 0.5 * (1.0 - x / h)
        blochs = [z * axis_long + h * axis_perp, z * axis_long - h * axis_perp]
        weights = [w_plus, w_minus]
        keep = [i for i, w in enumerate(weights) if w >= WEIGHT_FLOOR]
        return Decomposition(
            weights=np.array([weights[i] for i in keep]),
            states=tuple(state_from_bloch(blochs[i]) for i in keep),
            target=target,
        )

    left = one_sided(rho, e3, e2)
    right = one_sided(sigma, e3, e1)
    return make_pair(left, right)


# -- maximally mixed sigma ---------------------------------------------------


def fourier_basis(basis: np.ndarray) -> np.ndarray:
    """Discrete-Fourier mix of the columns of ``basis``; mutually unbiased to it."""
    d = basis.shape[1]
    k = np.arange(d)
    w = np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)
    return basis @ w


def max_mixed_pair(rho: DensityMatrix, rank_tol: float = RANK_TOL) -> DecompositionPair:
    """Unbiased pair for sigma = I/d: rho's eigenbasis against its Fourier transform.

    A rank-deficient rho keeps only its nonzero-weight eigenbasis elements;
    the basis is first completed to full dimension (deterministically,
    against the standard basis) so the Fourier columns still overlap every
    element with squared modulus exactly 1/d.
    """
    d = rho.dim
    spec = hermitian_eig(rho, rank_tol)
    left = eigen_decomposition(rho, rank_tol)
    full = complete_basis(spec.vectors[:, : spec.rank], d)
    phi = fourier_basis(full)
    right = Decomposition(
        weights=np.full(d, 1.0 / d),
        states=tuple(PureState.from_vector(phi[:, j]) for j in range(d)),
        target=maximally_mixed(d),
    )
    return make_pair(left, right)


# -- rank-one and rank-two sigma ---------------------------------------------


def max_weight(rho: DensityMatrix, psi: PureState, rank_tol: float = RANK_TOL) -> float:
    """Largest weight rho can assign to |psi><psi| in any decomposition.

    Equals 1/<psi|rho^-1|psi> on the support; subtracting that much of the
    projector leaves a positive matrix of rank one less.
    """
    return 1.0 / support_inverse(rho, psi, rank_tol)


def deflate(rho: DensityMatrix, psi: PureState, weight: float) -> DensityMatrix:
    """Residual state (rho - weight |psi><psi|) / (1 - weight)."""
    m = hermitize((rho.matrix - weight * projector(psi.amplitudes)) / (1.0 - weight))
    return DensityMatrix(m / float(np.trace(m).real))


def pure_sigma_pair(
    rho: DensityMatrix, sigma: DensityMatrix, tol: float = 1e-9, seed: int = 0
) -> DecompositionPair:
    """Unbiased pair when sigma is pure: equalize rho against it."""
    if sigma.dim != rho.dim:
        raise PreconditionViolated("dimension mismatch")
    if sigma.rank != 1:
        raise PreconditionViolated("sigma must have rank 1")
    right = Decomposition(
        weights=np.array([1.0]),
        states=(hermitian_eig(sigma).states()[0],),
        target=sigma,
    )
    left = unbiased_against(rho, sigma, tol=tol, seed=seed)
    return make_pair(left, right)


def _sphere_path(a: np.ndarray, b: np.ndarray, t: float) -> np.ndarray:
    """Continuous unit-sphere path from ``a`` (t=0) to ``b`` (t=1).

    Uses great-circle interpolation carrying the relative phase. Because
    the sphere is complex, antipodal endpoints reduce to a pure phase
    rotation and the path never degenerates for unit inputs.
    """
    z = complex(np.vdot(a, b))
    w = b - z * a
    wn = float(np.linalg.norm(w))
    if wn < 1e-9:
        # parallel up to phase: rotate the phase only
        ang = np.angle(z) if abs(z) > 0 else 0.0
        return a * np.exp(1j * ang * t)
    c0 = (1.0 - t) + t * z
    c1 = t * wn
    norm = float(np.sqrt(abs(c0) ** 2 + c1 * c1))
    if norm < 1e-12:  # pragma: no cover - unreachable for unit inputs
        raise PathDegenerate("interpolation path collapsed")
    return (c0 * a + c1 * (w / wn)) / norm


def _unbiased_element(rho: DensityMatrix, phi1: np.ndarray, phi2: np.ndarray, hs: float, tol: float, seed: int) -> PureState:
    """A state in the support of rho with squared overlap ``hs`` on both phi vectors.

    Starts from a decomposition of rho equalized against |phi1><phi1|,
    pins each element's component along phi1 to the exact value the
    constraint dictates, and walks the remaining sphere between an element
    overlapping phi2 too much and one overlapping too little until the
    second constraint is met.
    """
    spec = hermitian_eig(rho)
    n = spec.rank
    support = spec.vectors[:, :n]

    phi1_s = support.conj().T @ phi1
    phi1_norm = float(np.linalg.norm(phi1_s))
    if phi1_norm < 1e-12:
        raise PreconditionViolated("phi1 orthogonal to the support but tr(rho sigma) > 0")
    b1 = phi1_s / phi1_norm
    basis = complete_basis(b1.reshape(-1, 1), n)

    c1 = float(np.sqrt(hs)) / phi1_norm
    c1 = min(c1, 1.0)
    tail_norm = float(np.sqrt(max(1.0 - c1 * c1, 0.0)))

    def assemble(tail: np.ndarray) -> np.ndarray:
        coords = np.concatenate(([c1], tail))
        return support @ (basis @ coords)

    if tail_norm < 1e-9 or n == 1:
        return PureState.from_vector(assemble(np.zeros(n - 1, dtype=np.complex128)))

    d1 = unbiased_against(rho, DensityMatrix(projector(phi1)), tol=tol, seed=seed)
    tails = []
    h_vals = []
    for st in d1.states:
        coords = basis.conj().T @ (support.conj().T @ st.amplitudes)
        head = coords[0]
        if abs(head) > 1e-12:
            coords = coords * (head.conjugate() / abs(head))
        tail = coords[1:]
        tn = float(np.linalg.norm(tail))
        tail = tail / tn * tail_norm if tn > 1e-14 else np.zeros(n - 1, dtype=np.complex128)
        psi = assemble(tail)
        tails.append(tail)
        h_vals.append(float(abs(np.vdot(psi, phi2)) ** 2))
    h_vals = np.array(h_vals)

    hi_idx = int(np.argmax(h_vals))
    lo_idx = int(np.argmin(h_vals))
    if h_vals[hi_idx] <= hs:
        # bracket collapsed from above: the closest element is the answer
        return PureState.from_vector(assemble(tails[hi_idx]))
    if h_vals[lo_idx] >= hs:
        return PureState.from_vector(assemble(tails[lo_idx]))

    a = tails[hi_idx] / np.linalg.norm(tails[hi_idx])
    b = tails[lo_idx] / np.linalg.norm(tails[lo_idx])

    def h_of(t: float) -> float:
        tail = _sphere_path(a, b, t) * tail_norm
        return float(abs(np.vdot(assemble(tail), phi2)) ** 2)

    lo_t, hi_t = 0.0, 1.0
    t = 0.5
    for _ in range(200):
        t = 0.5 * (lo_t + hi_t)
        val = h_of(t)
        if abs(val - hs) <= 1e-13:
            break
        if val > hs:
            lo_t = t
        else:
            hi_t = t
    return PureState.from_vector(assemble(_sphere_path(a, b, t) * tail_norm))


def rank2_left_against(
    rho: DensityMatrix,
    phi1: np.ndarray,
    phi2: np.ndarray,
    hs: float,
    tol: float = 1e-9,
    seed: int = 0,
) -> Decomposition:
    """Decomposition of rho unbiased against the fixed pure pair (phi1, phi2).

    Requires tr(rho |phi_j><phi_j|) = hs for both vectors. Extracts one
    element at a time: a state of the current support unbiased against
    both vectors, at the largest weight the mixture allows, then deflates
    and recurses on the rank-reduced residual (which keeps the same
    traces against both vectors).
    """
    weights = []
    states = []
    remaining = 1.0
    current = rho
    step = 0
    while True:
        if current.rank == 1:
            weights.append(remaining)
            states.append(hermitian_eig(current).states()[0])
            break
        psi = _unbiased_element(current, phi1, phi2, hs, tol, seed + 7919 * step)
        p = max_weight(current, psi)
        weights.append(remaining * p)
        states.append(psi)
        current = deflate(current, psi, p)
        remaining *= 1.0 - p
        step += 1
    return Decomposition(weights=np.array(weights), states=tuple(states), target=rho)


def rank2_sigma_pair(
    rho: DensityMatrix, sigma: DensityMatrix, tol: float = 1e-9, seed: int = 0
) -> DecompositionPair:
    """Unbiased pair when sigma has rank two.

    sigma is first split into two pure states whose traces against rho
    both equal tr(rho sigma); the rho side is then deflated element by
    element against that fixed pair.
    """
    if sigma.dim != rho.dim:
        raise PreconditionViolated("dimension mismatch")
    if sigma.rank != 2:
        raise PreconditionViolated("sigma must have rank 2")
    if rho.rank == 1:
        return swapped(pure_sigma_pair(sigma, rho, tol=tol, seed=seed))

    hs = metrics.hs_inner_product(rho, sigma)
    if hs < 1e-14:
        # orthogonal supports: eigenbases are already unbiased (all overlaps 0)
        return make_pair(eigen_decomposition(rho), eigen_decomposition(sigma))

    right = unbiased_against(sigma, rho, tol=tol, seed=seed)
    left = rank2_left_against(
        rho, right.states[0].amplitudes, right.states[1].amplitudes, hs, tol=tol, seed=seed
    )
    return make_pair(left, right)


# -- verification -------------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    """Recomputed pair statistics with a pass/fail verdict per check."""

    left_error: float
    right_error: float
    hs_product: float
    max_deviation: float
    delta_avg: float
    lower: float
    upper: float
    checks: dict
    passed: bool


def verify_pair(pair: DecompositionPair, tol: float = CERTIFICATE_TOL) -> VerificationReport:
    """Recompute reconstructions, overlaps and bounds; judge each check."""
    left_err = pair.left.reconstruction_error()
    right_err = pair.right.reconstruction_error()
    hs = metrics.hs_inner_product(pair.left.target, pair.right.target)
    overlaps = pair.overlaps()
    max_dev = float(np.max(np.abs(overlaps - hs)))
    delta = metrics.average_trace_distance(pair.left, pair.right)
    rep = metrics.bounds(pair.left.target, pair.right.target)
    checks = {
        "left_reconstruction": left_err <= RECONSTRUCTION_TOL,
        "right_reconstruction": right_err <= RECONSTRUCTION_TOL,
        "unbiased": max_dev <= tol,
        "delta_avg_consistent": abs(delta - pair.delta_avg) <= 1e-10,
        "saturates_upper": abs(delta - rep.upper) <= 10.0 * tol,
        "sandwich": rep.lower - 1e-10 <= delta <= rep.upper + 1e-10,
    }
    return VerificationReport(
        left_error=left_err,
        right_error=right_err,
        hs_product=hs,
        max_deviation=max_dev,
        delta_avg=delta,
        lower=rep.lower,
        upper=rep.upper,
        checks=checks,
        passed=all(checks.values()),
    )
