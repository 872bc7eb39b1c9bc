"""Validated state types and dense Hermitian linear algebra for small dimensions.

Everything here is immutable after construction and safe to share across
threads. Matrices are dense row-major complex128; dimensions are tiny
(d <= 64), so no attempt is made at sparsity or blocking.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    ConvergenceFailure,
    NotHermitian,
    NotPSD,
    NotUnitTrace,
    OutsideSupport,
)

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
RANK_TOL = 1e-10
PHASE_TOL = 1e-9


def hermitize(a: np.ndarray) -> np.ndarray:
    """Return the Hermitian part (A + A†)/2."""
    return (a + a.conj().T) / 2


def max_abs(a: np.ndarray) -> float:
    """Entrywise max-norm."""
    return float(np.max(np.abs(a))) if a.size else 0.0


def projector(amplitudes: np.ndarray) -> np.ndarray:
    """Rank-1 projector |psi><psi| from a state vector."""
    return np.outer(amplitudes, amplitudes.conj())


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Fix the global phase so the first non-negligible amplitude is real >= 0.

    Bit-level idempotent: the pivot amplitude is pinned to its exact
    modulus, so re-canonicalizing (e.g. after a serialization round trip)
    reproduces the same vector.
    """
    for k, x in enumerate(v):
        r = abs(x)
        if r > PHASE_TOL:
            if x.imag == 0.0 and x.real > 0.0:
                return v.copy()
            w = v * (x.conjugate() / r)
            w[k] = r
            return w
    return v.copy()


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class DensityMatrix:
    """A d x d Hermitian, PSD, unit-trace complex matrix.

    Construct through :func:`validate_density`; direct construction skips
    the invariant checks and is reserved for internal code that builds
    matrices which are valid by construction.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NotHermitian(float("inf"))
        object.__setattr__(self, "matrix", _freeze(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @cached_property
    def spectrum(self) -> "Spectrum":
        return hermitian_eig(self)

    @property
    def rank(self) -> int:
        return self.spectrum.rank


@dataclass(frozen=True)
class PureState:
    """A unit-norm complex vector with canonical global phase."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        n = float(np.linalg.norm(v))
        if abs(n - 1.0) > 1e-12:
            raise NotUnitTrace(abs(n - 1.0))
        object.__setattr__(self, "amplitudes", _freeze(canonical_phase(v)))

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "PureState":
        """Normalize ``v`` and wrap it. Raises for (near-)zero vectors."""
        v = np.asarray(v, dtype=np.complex128).reshape(-1)
        n = float(np.linalg.norm(v))
        if n < 1e-12:
            raise NotUnitTrace(1.0)
        return cls(v / n)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def overlap2(self, other: "PureState") -> float:
        """|<self|other>|^2."""
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def density(self) -> DensityMatrix:
        return DensityMatrix(projector(self.amplitudes))


@dataclass(frozen=True)
class Spectrum:
    """Eigendecomposition of a density matrix.

    ``eigenvalues`` are sorted descending; column k of ``vectors`` is the
    (phase-canonical) eigenvector for eigenvalue k. ``rank`` counts
    eigenvalues strictly above the rank tolerance used at construction.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _freeze(np.asarray(self.eigenvalues, dtype=float)))
        object.__setattr__(self, "vectors", _freeze(np.asarray(self.vectors, dtype=np.complex128)))

    def states(self) -> tuple[PureState, ...]:
        return tuple(PureState(self.vectors[:, k]) for k in range(self.vectors.shape[1]))

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.conj().T


def validate_density(raw: np.ndarray, tol: float | None = None) -> DensityMatrix:
    """Check Hermiticity, unit trace and positivity, then wrap.

    Entries are symmetrized as (A + A†)/2 before the checks. When ``tol``
    is given it replaces all three per-check defaults (1e-12 for
    Hermiticity and trace, -1e-10 for the smallest eigenvalue).
    """
    a = np.asarray(raw, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotHermitian(float("inf"))
    herm_tol = HERMITIAN_TOL if tol is None else tol
    trace_tol = TRACE_TOL if tol is None else tol
    psd_tol = PSD_TOL if tol is None else tol

    asym = max_abs(a - a.conj().T)
    if asym > herm_tol:
        raise NotHermitian(asym)
    a = hermitize(a)

    trace_err = abs(float(np.trace(a).real) - 1.0)
    if trace_err > trace_tol:
        raise NotUnitTrace(trace_err)

    lam_min = float(np.linalg.eigvalsh(a)[0])
    if lam_min < -psd_tol:
        raise NotPSD(lam_min)

    return DensityMatrix(a)


def hermitian_eig(a: DensityMatrix, rank_tol: float = RANK_TOL) -> Spectrum:
    """Eigendecomposition with eigenvalues sorted descending.

    Raises :class:`ConvergenceFailure` if the underlying iterative solver
    does not converge (essentially unreachable at these dimensions).
    """
    try:
        w, v = np.linalg.eigh(a.matrix)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise ConvergenceFailure(str(exc)) from exc
    w = w[::-1]
    v = v[:, ::-1]
    v = np.column_stack([canonical_phase(v[:, k]) for k in range(v.shape[1])])
    rank = int(np.count_nonzero(w > rank_tol))
    return Spectrum(eigenvalues=w, vectors=v, rank=rank)


def support_inverse(a: DensityMatrix, v: PureState, rank_tol: float = RANK_TOL) -> float:
    """<v|A^-1|v> with the inverse taken on the support of A.

    ``v`` must lie in the support: any component outside it of norm above
    1e-8 raises :class:`OutsideSupport`.
    """
    spec = hermitian_eig(a, rank_tol)
    overlaps = spec.vectors.conj().T @ v.amplitudes
    inside = spec.eigenvalues > rank_tol
    outside_norm = float(np.linalg.norm(overlaps[~inside]))
    if outside_norm > 1e-8:
        raise OutsideSupport(outside_norm)
    return float(np.sum(np.abs(overlaps[inside]) ** 2 / spec.eigenvalues[inside]))


def support_basis(a: DensityMatrix, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal columns spanning the support of ``a``."""
    spec = hermitian_eig(a, rank_tol)
    return spec.vectors[:, : spec.rank].copy()


def complete_basis(columns: np.ndarray, dim: int) -> np.ndarray:
    """Extend orthonormal ``columns`` to a full orthonormal basis of C^dim.

    Completion is deterministic: standard basis vectors are orthogonalized
    against the running set in index order and kept when their residual is
    non-negligible.
    """
    cols = [columns[:, k] for k in range(columns.shape[1])]
    for j in range(dim):
        if len(cols) == dim:
            break
        e = np.zeros(dim, dtype=np.complex128)
        e[j] = 1.0
        for c in cols:
            e = e - np.vdot(c, e) * c
        n = float(np.linalg.norm(e))
        if n > 1e-8:
            # second orthogonalization pass for numerical cleanliness
            e = e / n
            for c in cols:
                e = e - np.vdot(c, e) * c
            cols.append(e / np.linalg.norm(e))
    if len(cols) != dim:  # pragma: no cover - defensive
        raise ConvergenceFailure("basis completion failed")
    return np.column_stack(cols)


def maximally_mixed(dim: int) -> DensityMatrix:
    """I/d as a validated state."""
    return DensityMatrix(np.eye(dim, dtype=np.complex128) / dim)
