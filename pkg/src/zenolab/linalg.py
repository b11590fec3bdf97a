"""Dense complex linear algebra core.

Carriers for operators and propagators (validated Hermitian / unitary /
projector wrappers around ``numpy`` arrays), Hermitian eigendecomposition,
and matrix exponentials of (complex-)scaled Hermitian generators.  All
generators in scope are Hermitian, so the exponential goes through the
eigendecomposition only: for a purely imaginary scale the result is unitary
up to eigensolver quality, with no scaling-and-squaring path needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import get_tolerances


class ToleranceViolation(ValueError):
    """An operator failed a structural invariant (carries the diagnostic norm)."""


class DimensionMismatch(ValueError):
    """Operands of incompatible dimension."""


class EigenSolverError(RuntimeError):
    """The eigensolver failed to converge or produced an unusable factorization."""


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and normalize a square, finite complex matrix.

    Returns a read-only complex128 copy so wrapped values behave like
    immutable value types.
    """
    arr = np.array(getattr(m, "matrix", m), dtype=np.complex128, copy=True)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be a square 2-D array, got shape {arr.shape}")
    if arr.shape[0] < 1:
        raise ValueError(f"{name} must have dimension >= 1")
    if not np.all(np.isfinite(arr.view(float))):
        raise ValueError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


def frob_norm(m) -> float:
    """Frobenius norm."""
    arr = np.asarray(getattr(m, "matrix", m))
    return float(np.linalg.norm(arr))


def op_norm(m) -> float:
    """Operator (spectral) norm: sqrt of the largest eigenvalue of M^dagger M."""
    arr = as_complex_matrix(m, "op_norm input")
    gram = arr.conj().T @ arr
    try:
        eigs = np.linalg.eigvalsh(gram)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"operator-norm eigensolve failed: {exc}") from exc
    return float(np.sqrt(max(float(eigs[-1]), 0.0)))


@dataclass(frozen=True)
class HermitianOperator:
    """Square complex matrix certified Hermitian within the active tolerance."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = as_complex_matrix(self.matrix, "HermitianOperator")
        scale = max(1.0, frob_norm(arr))
        defect = frob_norm(arr - arr.conj().T)
        tol = get_tolerances().hermiticity_tol
        if defect > tol * scale:
            raise ToleranceViolation(
                f"matrix is not Hermitian: |M - M^dagger|_F = {defect:.3e} "
                f"exceeds {tol:.1e} * |M|_F = {tol * scale:.3e}"
            )
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class UnitaryOperator:
    """Square complex matrix certified unitary within the active tolerance."""

    matrix: np.ndarray

    def __post_init__(self):
        arr = as_complex_matrix(self.matrix, "UnitaryOperator")
        defect = frob_norm(arr.conj().T @ arr - np.eye(arr.shape[0]))
        tol = get_tolerances().unitarity_tol
        if defect > tol:
            raise ToleranceViolation(
                f"matrix is not unitary: |U^dagger U - I|_F = {defect:.3e} exceeds {tol:.1e}"
            )
        object.__setattr__(self, "matrix", arr)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class Projector:
    """Hermitian idempotent matrix; rank is certified against the trace."""

    matrix: np.ndarray
    rank: int = -1  # filled from trace when left at the sentinel

    def __post_init__(self):
        arr = as_complex_matrix(self.matrix, "Projector")
        tol = get_tolerances()
        scale = max(1.0, frob_norm(arr))
        herm_defect = frob_norm(arr - arr.conj().T)
        if herm_defect > tol.hermiticity_tol * scale:
            raise ToleranceViolation(
                f"projector is not Hermitian: |P - P^dagger|_F = {herm_defect:.3e}"
            )
        idem_defect = frob_norm(arr @ arr - arr)
        if idem_defect > tol.idempotency_tol:
            raise ToleranceViolation(
                f"projector is not idempotent: |P^2 - P|_F = {idem_defect:.3e} "
                f"exceeds {tol.idempotency_tol:.1e}"
            )
        trace = float(np.real(np.trace(arr)))
        rank = int(round(trace)) if self.rank < 0 else int(self.rank)
        if abs(trace - rank) > tol.projector_trace_tol:
            raise ToleranceViolation(
                f"projector trace {trace!r} is not within {tol.projector_trace_tol:.1e} "
                f"of rank {rank}"
            )
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "rank", rank)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def complement(self) -> "Projector":
        """The orthogonal complement I - P."""
        return Projector(np.eye(self.dim) - self.matrix)


def check_same_dim(*ops) -> int:
    dims = [getattr(op, "dim", None) or np.asarray(getattr(op, "matrix", op)).shape[0] for op in ops]
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"operands have mismatched dimensions {dims}")
    return dims[0]


def eig_hermitian(h: HermitianOperator) -> tuple[np.ndarray, UnitaryOperator]:
    """Eigendecomposition of a Hermitian operator.

    Returns ascending real eigenvalues and the unitary of eigenvectors
    (columns).  The reconstruction ``V diag(w) V^dagger`` is checked against
    the input to the active reconstruction tolerance.
    """
    try:
        eigenvalues, vectors = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"Hermitian eigensolve did not converge: {exc}") from exc
    residual = frob_norm((vectors * eigenvalues) @ vectors.conj().T - h.matrix)
    tol = get_tolerances().eig_reconstruction_tol * max(1.0, frob_norm(h.matrix))
    if residual > tol:
        raise EigenSolverError(
            f"eigendecomposition reconstruction residual {residual:.3e} exceeds {tol:.3e}"
        )
    return eigenvalues, UnitaryOperator(vectors)


def expm_hermitian(h: HermitianOperator, scale: complex) -> np.ndarray:
    """exp(scale * H) for Hermitian H via eigendecomposition.

    With a purely imaginary scale the result is unitary (a propagator); with
    a negative real scale it is a contraction (an absorber).
    """
    scale = complex(scale)
    if not (np.isfinite(scale.real) and np.isfinite(scale.imag)):
        raise ValueError(f"scale must be finite, got {scale!r}")
    eigenvalues, vectors = eig_hermitian(h)
    v = vectors.matrix
    return (v * np.exp(scale * eigenvalues)) @ v.conj().T
