"""Operator constructions: spectral projections, Zeno Hamiltonians, models.

Spectral decompositions cluster nearly-degenerate eigenvalues (or unitary
eigenphases, with wrap-around at +/- pi) into single projectors; the Zeno
Hamiltonian compresses an operator onto the resulting block structure,
``H_Z = sum_n P_n H P_n``.  A small registry of named model systems provides
the deterministic fixtures used by the experiment harness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .config import get_tolerances
from .linalg import (
    HermitianOperator,
    Projector,
    ToleranceViolation,
    UnitaryOperator,
    check_same_dim,
    eig_hermitian,
    frob_norm,
)
from .rng import Lcg64

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)

# structural tolerances of a decomposition (mutual orthogonality, completeness)
_STRUCTURE_TOL = 1e-9

HERMITIAN_KIND = "hermitian-eigenvalues"
UNITARY_KIND = "unitary-eigenphases"


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ordered (value, projector) pairs after degeneracy clustering.

    ``kind`` records whether the values are Hermitian eigenvalues or unitary
    eigenphases in (-pi, pi].  Projectors are mutually orthogonal and
    complete; post-clustering values are pairwise separated by more than
    ``cluster_tol``.
    """

    entries: tuple[tuple[float, Projector], ...]
    kind: str
    cluster_tol: float

    def __post_init__(self):
        if self.kind not in (HERMITIAN_KIND, UNITARY_KIND):
            raise ValueError(f"unknown decomposition kind {self.kind!r}")
        if not self.entries:
            raise ValueError("decomposition must contain at least one entry")
        projs = [p.matrix for _, p in self.entries]
        dim = check_same_dim(*[p for _, p in self.entries])
        for i in range(len(projs)):
            for j in range(i + 1, len(projs)):
                cross = frob_norm(projs[i] @ projs[j])
                if cross > _STRUCTURE_TOL:
                    raise ToleranceViolation(
                        f"projectors {i} and {j} are not orthogonal: |P_i P_j|_F = {cross:.3e}"
                    )
        completeness = frob_norm(sum(projs) - np.eye(dim))
        if completeness > _STRUCTURE_TOL:
            raise ToleranceViolation(
                f"projectors are not complete: |sum P_n - I|_F = {completeness:.3e}"
            )
        values = [v for v, _ in self.entries]
        gaps = [(a, b) for a, b in zip(values, values[1:])]
        if self.kind == UNITARY_KIND and len(values) > 1:
            gaps.append((values[-1], values[0] + 2.0 * math.pi))  # seam gap
        for a, b in gaps:
            if abs(b - a) <= self.cluster_tol:
                raise ToleranceViolation(
                    f"post-clustering values {a!r} and {b!r} are closer than "
                    f"cluster_tol {self.cluster_tol!r}"
                )

    @property
    def dim(self) -> int:
        return self.entries[0][1].dim

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.entries)

    @property
    def projectors(self) -> tuple[Projector, ...]:
        return tuple(p for _, p in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _cluster_indices(values: np.ndarray, tol: float, circular: bool) -> list[list[int]]:
    """Group sorted positions whose gaps are <= tol; optionally merge across +/- pi."""
    order = np.argsort(values, kind="stable")
    clusters: list[list[int]] = [[int(order[0])]]
    for idx in order[1:]:
        if values[idx] - values[clusters[-1][-1]] <= tol:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    if circular and len(clusters) > 1:
        seam_gap = (values[clusters[0][0]] + 2.0 * math.pi) - values[clusters[-1][-1]]
        if seam_gap <= tol:
            clusters[0] = clusters.pop() + clusters[0]
    return clusters


def _wrap_phase(phi: float) -> float:
    """Map an angle to (-pi, pi]."""
    out = math.remainder(phi, 2.0 * math.pi)
    if out <= -math.pi:
        out += 2.0 * math.pi
    return out


def spectral_projections(
    h: HermitianOperator, cluster_tol: float | None = None
) -> SpectralDecomposition:
    """Eigenprojections of a Hermitian operator with degeneracy clustering.

    Eigenvalues within `cluster_tol` of each other (single-linkage on the
    sorted spectrum) are merged into one projector built from the cluster's
    orthonormal eigenvectors.
    """
    tol = get_tolerances().cluster_tol if cluster_tol is None else float(cluster_tol)
    if tol <= 0:
        raise ValueError(f"cluster_tol must be positive, got {tol!r}")
    eigenvalues, vectors = eig_hermitian(h)
    v = vectors.matrix
    entries = []
    for cluster in _cluster_indices(eigenvalues, tol, circular=False):
        cols = v[:, cluster]
        projector = Projector(cols @ cols.conj().T, rank=len(cluster))
        entries.append((float(np.mean(eigenvalues[cluster])), projector))
    entries.sort(key=lambda item: item[0])
    return SpectralDecomposition(tuple(entries), HERMITIAN_KIND, tol)


def spectral_projections_unitary(
    u: UnitaryOperator, cluster_tol: float | None = None
) -> SpectralDecomposition:
    """Eigenphase projections of a unitary, clustered on the circle.

    Phases lambda_n live in (-pi, pi] with ``U = sum_n exp(-i lambda_n) P_n``;
    clustering is wrap-around aware, so phases just below and just above the
    +/- pi seam merge.  The Schur basis keeps the projectors exactly
    orthonormal even for tightly clustered phases.
    """
    tol = get_tolerances().cluster_tol if cluster_tol is None else float(cluster_tol)
    if tol <= 0:
        raise ValueError(f"cluster_tol must be positive, got {tol!r}")
    defect = frob_norm(u.matrix.conj().T @ u.matrix - np.eye(u.matrix.shape[0]))
    if defect > get_tolerances().unitarity_tol:
        raise ToleranceViolation(
            f"input is not unitary: |U^dagger U - I|_F = {defect:.3e}"
        )
    t, q = scipy.linalg.schur(u.matrix, output="complex")
    # u is unitary hence normal: t is diagonal up to roundoff
    phases = np.array([_wrap_phase(-np.angle(t[k, k])) for k in range(u.dim)])
    entries = []
    for cluster in _cluster_indices(phases, tol, circular=True):
        cols = q[:, cluster]
        projector = Projector(cols @ cols.conj().T, rank=len(cluster))
        mean_vec = np.mean(np.exp(1j * phases[cluster]))
        entries.append((_wrap_phase(float(np.angle(mean_vec))), projector))
    entries.sort(key=lambda item: item[0])
    return SpectralDecomposition(tuple(entries), UNITARY_KIND, tol)


def unitary_power(decomp: SpectralDecomposition, exponent: float) -> np.ndarray:
    """U^n from a unitary's spectral decomposition (phases multiplied by n)."""
    if decomp.kind != UNITARY_KIND:
        raise ValueError("unitary_power requires a unitary-eigenphase decomposition")
    dim = decomp.dim
    out = np.zeros((dim, dim), dtype=complex)
    for value, projector in decomp:
        out += np.exp(-1j * value * exponent) * projector.matrix
    return out


def zeno_hamiltonian(h: HermitianOperator, decomp: SpectralDecomposition) -> HermitianOperator:
    """Block compression ``sum_n P_n H P_n`` onto the decomposition's sectors."""
    check_same_dim(h, *decomp.projectors)
    out = np.zeros_like(h.matrix)
    for _, projector in decomp:
        p = projector.matrix
        out = out + p @ h.matrix @ p
    return HermitianOperator(out)


def zeno_hamiltonian_single(h: HermitianOperator, p: Projector) -> HermitianOperator:
    """Single-sector compression ``P H P``."""
    check_same_dim(h, p)
    return HermitianOperator(p.matrix @ h.matrix @ p.matrix)


@dataclass(frozen=True)
class ModelSystem:
    """A named operator cast: system Hamiltonian plus optional partner pieces.

    ``auxiliary`` is the second generator of the model (the splitting partner,
    the coupling/kick generator, or the Floquet potential); ``projector`` is
    the measured subspace for projective/absorbing evolutions.
    """

    name: str
    h: HermitianOperator
    auxiliary: HermitianOperator | None = None
    projector: Projector | None = None
    rng_seed: int = 0
    description: str = ""

    def __post_init__(self):
        members = [m for m in (self.h, self.auxiliary, self.projector) if m is not None]
        check_same_dim(*members)

    @property
    def dim(self) -> int:
        return self.h.dim


class UnknownModelError(ValueError):
    """Requested model name is not in the registry."""


def _build_qubit_sx_pz(dim: int, seed: int) -> ModelSystem:
    _require_dim("qubit-sx-pz", dim, 2)
    return ModelSystem(
        name="qubit-sx-pz",
        h=HermitianOperator(PAULI_X),
        projector=Projector(np.diag([1.0, 0.0]).astype(complex)),
        rng_seed=seed,
        description="qubit, H = sigma_x, measured subspace |0><0|",
    )


def _build_qubit_sx_scz(dim: int, seed: int) -> ModelSystem:
    _require_dim("qubit-sx-scz", dim, 2)
    return ModelSystem(
        name="qubit-sx-scz",
        h=HermitianOperator(PAULI_X),
        auxiliary=HermitianOperator(PAULI_Z),
        rng_seed=seed,
        description="qubit, H = sigma_x with sigma_z partner (split / coupling / kick generator)",
    )


def _build_random_split(dim: int, seed: int) -> ModelSystem:
    if dim < 1:
        raise ValueError(f"model 'random-split' needs dim >= 1, got {dim}")
    rng = Lcg64(seed)
    t_part = HermitianOperator(rng.hermitian(dim))
    v_part = HermitianOperator(rng.hermitian(dim))
    return ModelSystem(
        name="random-split",
        h=t_part,
        auxiliary=v_part,
        rng_seed=seed,
        description="H = T + V with independent seeded Hermitian draws T (h) and V (auxiliary)",
    )


def _build_three_level_block(dim: int, seed: int) -> ModelSystem:
    _require_dim("three-level-block", dim, 3)
    return ModelSystem(
        name="three-level-block",
        h=HermitianOperator(np.ones((3, 3), dtype=complex)),
        auxiliary=HermitianOperator(np.diag([0.0, 1.0, 1.0]).astype(complex)),
        projector=Projector(np.diag([1.0, 0.0, 0.0]).astype(complex)),
        rng_seed=seed,
        description="all-ones 3x3 Hamiltonian with 1+2 block structure",
    )


def _build_kicked_floquet(dim: int, seed: int) -> ModelSystem:
    if dim < 1:
        raise ValueError(f"model 'kicked-floquet' needs dim >= 1, got {dim}")
    rng = Lcg64(seed)
    t_part = HermitianOperator(rng.hermitian(dim))
    v_part = HermitianOperator(rng.hermitian(dim))
    return ModelSystem(
        name="kicked-floquet",
        h=t_part,
        auxiliary=v_part,
        rng_seed=seed,
        description="seeded kinetic (h) and potential (auxiliary) pair for Floquet iteration",
    )


def _require_dim(name: str, dim: int, expected: int) -> None:
    if dim != expected:
        raise ValueError(f"model {name!r} is fixed at dim={expected}, got dim={dim}")


_REGISTRY = {
    "qubit-sx-pz": _build_qubit_sx_pz,
    "qubit-sx-scz": _build_qubit_sx_scz,
    "random-split": _build_random_split,
    "three-level-block": _build_three_level_block,
    "kicked-floquet": _build_kicked_floquet,
}


def model_names() -> list[str]:
    return sorted(_REGISTRY)


def model_library(name: str, dim: int, seed: int) -> ModelSystem:
    """Build a named model system; deterministic for fixed (name, dim, seed)."""
    try:
        builder = _REGISTRY[name]
    except KeyError:
        raise UnknownModelError(
            f"unknown model {name!r}; known models: {model_names()}"
        ) from None
    return builder(int(dim), int(seed))
