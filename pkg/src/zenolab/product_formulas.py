"""Discrete product evolutions and their frequent-intervention limits.

Each operation builds an N-step product propagator by explicit sequential
multiplication (the factor written rightmost acts first on states), pairs it
with the predicted N -> infinity limit object, and reports the operator-norm
gap:

* Trotter splitting          (e^{-i(t/N)A} e^{-i(t/N)B})^N  -> e^{-it(A+B)}
* projective Zeno product    (e^{-i(t/N)H} P)^N             -> e^{-itPHP} P
* optical-potential product  (e^{-i(t/N)H} e^{-gamma Q})^N  -> e^{-itPHP} P
* unitary-kick product       (e^{-i(t/N)H} U_kick)^N        -> e^{-itH_Z} U_kick^N
* Floquet iteration          (e^{-i tau T} e^{-i tau0 V})^N at fixed tau
                             (a large-time map, not a limit; unitarity drift
                             is tracked instead of an error).

For the projective and absorbing variants the limit is unitary only on the
range of P, so a restricted error (difference compressed by P) is reported
alongside the full-space one; for the kick product the fast rotating factor
U_kick^N is stripped off before comparing with e^{-itH_Z}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (
    HermitianOperator,
    Projector,
    UnitaryOperator,
    check_same_dim,
    expm_hermitian,
    frob_norm,
    op_norm,
)
from .operators import (
    SpectralDecomposition,
    spectral_projections_unitary,
    unitary_power,
    zeno_hamiltonian,
    zeno_hamiltonian_single,
)

SCALE_KINDS = ("feynman", "plain")


@dataclass(frozen=True)
class ProductResult:
    """An N-step product propagator with its limit object and error norms."""

    propagator: np.ndarray
    limit_object: np.ndarray
    error: float
    n_steps: int
    t: float
    error_restricted: float | None = None
    error_phase_stripped: float | None = None
    survival_amplitude: complex | None = None
    survival_probability: float | None = None


def _sequential_power(factor: np.ndarray, n: int) -> np.ndarray:
    """factor^n by n explicit multiplications (time-ordered reading)."""
    out = np.eye(factor.shape[0], dtype=complex)
    for _ in range(n):
        out = factor @ out
    return out


def _check_steps(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"step count must be >= 1, got {n}")
    return n


def trotter_product(
    a: HermitianOperator,
    b: HermitianOperator,
    t: float,
    n: int,
    scale_kind: str = "feynman",
) -> ProductResult:
    """First-order splitting of the evolution generated by A + B.

    ``scale_kind='feynman'`` uses factors e^{-i(t/N)A} e^{-i(t/N)B} with limit
    e^{-it(A+B)}.  ``scale_kind='plain'`` is the time-free convention with
    exponents A/N, B/N (multiplied by -i internally so the product stays
    unitary) and limit e^{-i(A+B)}; the `t` argument is not used there.
    """
    n = _check_steps(n)
    check_same_dim(a, b)
    if scale_kind not in SCALE_KINDS:
        raise ValueError(f"scale_kind must be one of {SCALE_KINDS}, got {scale_kind!r}")
    t_eff = float(t) if scale_kind == "feynman" else 1.0
    step = -1j * t_eff / n
    factor = expm_hermitian(a, step) @ expm_hermitian(b, step)
    propagator = _sequential_power(factor, n)
    limit = expm_hermitian(HermitianOperator(a.matrix + b.matrix), -1j * t_eff)
    return ProductResult(
        propagator=propagator,
        limit_object=limit,
        error=op_norm(propagator - limit),
        n_steps=n,
        t=t_eff,
    )


def zeno_product(
    h: HermitianOperator,
    p: Projector,
    t: float,
    n: int,
    initial_state: np.ndarray | None = None,
) -> ProductResult:
    """Projective Zeno product (e^{-i(t/N)H} P)^N against e^{-itPHP} P.

    When `initial_state` is given, the survival amplitude <psi|U_N|psi> and
    probability are attached to the result.
    """
    n = _check_steps(n)
    check_same_dim(h, p)
    factor = expm_hermitian(h, -1j * float(t) / n) @ p.matrix
    propagator = _sequential_power(factor, n)
    limit = expm_hermitian(zeno_hamiltonian_single(h, p), -1j * float(t)) @ p.matrix
    diff = propagator - limit
    amplitude = probability = None
    if initial_state is not None:
        psi = np.asarray(initial_state, dtype=complex).reshape(-1)
        if psi.shape[0] != h.dim:
            raise ValueError(f"initial state length {psi.shape[0]} != dim {h.dim}")
        amplitude = complex(np.vdot(psi, propagator @ psi))
        probability = abs(amplitude) ** 2
    return ProductResult(
        propagator=propagator,
        limit_object=limit,
        error=op_norm(diff),
        n_steps=n,
        t=float(t),
        error_restricted=op_norm(p.matrix @ diff @ p.matrix),
        survival_amplitude=amplitude,
        survival_probability=probability,
    )


def optical_potential_product(
    h: HermitianOperator,
    q: Projector,
    gamma: float,
    t: float,
    n: int,
) -> ProductResult:
    """Absorbing product (e^{-i(t/N)H} e^{-gamma Q})^N.

    e^{-gamma Q} = (I - Q) + e^{-gamma} Q damps the Q-component each step,
    mimicking the projection P = I - Q; the limit object is the same as the
    projective Zeno product's.
    """
    n = _check_steps(n)
    check_same_dim(h, q)
    gamma = float(gamma)
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    p = q.complement()
    absorber = expm_hermitian(HermitianOperator(q.matrix), -gamma)
    factor = expm_hermitian(h, -1j * float(t) / n) @ absorber
    propagator = _sequential_power(factor, n)
    limit = expm_hermitian(zeno_hamiltonian_single(h, p), -1j * float(t)) @ p.matrix
    diff = propagator - limit
    return ProductResult(
        propagator=propagator,
        limit_object=limit,
        error=op_norm(diff),
        n_steps=n,
        t=float(t),
        error_restricted=op_norm(p.matrix @ diff @ p.matrix),
    )


def kicked_product(
    h: HermitianOperator,
    u_kick: UnitaryOperator,
    t: float,
    n: int,
    cluster_tol: float | None = None,
    decomposition: SpectralDecomposition | None = None,
) -> ProductResult:
    """Bang-bang product (e^{-i(t/N)H} U_kick)^N against e^{-itH_Z} U_kick^N.

    H_Z compresses H onto the kick's eigenphase sectors; rapidly rotating
    relative phases between sectors decouple them.  Because H_Z is
    block-diagonal it commutes with U_kick^N, and the phase-stripped error
    |U_N U_kick^{-N} - e^{-itH_Z}| isolates the slow part of the dynamics.
    """
    n = _check_steps(n)
    check_same_dim(h, u_kick)
    decomp = decomposition
    if decomp is None:
        decomp = spectral_projections_unitary(u_kick, cluster_tol)
    h_z = zeno_hamiltonian(h, decomp)
    factor = expm_hermitian(h, -1j * float(t) / n) @ u_kick.matrix
    propagator = _sequential_power(factor, n)
    slow = expm_hermitian(h_z, -1j * float(t))
    limit = slow @ unitary_power(decomp, n)
    return ProductResult(
        propagator=propagator,
        limit_object=limit,
        error=op_norm(propagator - limit),
        n_steps=n,
        t=float(t),
        error_phase_stripped=op_norm(propagator @ unitary_power(decomp, -n) - slow),
    )


@dataclass(frozen=True)
class FloquetResult:
    """Iterated single-period map with unitarity drift at checkpoints."""

    propagator: UnitaryOperator
    drift: tuple[tuple[int, float], ...]  # (kick count, |U^dagger U - I|_F)


def _default_checkpoints(n_kicks: int) -> list[int]:
    points = []
    k = 1
    while k < n_kicks:
        points.append(k)
        k *= 2
    points.append(n_kicks)
    return points


def floquet_iterate(
    t_op: HermitianOperator,
    v_op: HermitianOperator,
    tau: float,
    tau0: float,
    n_kicks: int,
    checkpoints: list[int] | None = None,
) -> FloquetResult:
    """Iterate the kicked one-period map (e^{-i tau T} e^{-i tau0 V})^n.

    tau is fixed, so this is a stroboscopic large-time map; the kick strength
    tau0 is not scaled down with the kick count.  Unitarity drift is recorded
    at logarithmically spaced kick counts (or at the given checkpoints).
    """
    n_kicks = _check_steps(n_kicks)
    check_same_dim(t_op, v_op)
    tau, tau0 = float(tau), float(tau0)
    if tau < 0 or tau0 < 0:
        raise ValueError(f"tau and tau0 must be >= 0, got {tau!r}, {tau0!r}")
    factor = expm_hermitian(t_op, -1j * tau) @ expm_hermitian(v_op, -1j * tau0)
    marks = sorted(set(checkpoints)) if checkpoints else _default_checkpoints(n_kicks)
    if any(m < 1 or m > n_kicks for m in marks):
        raise ValueError(f"checkpoints must lie in [1, {n_kicks}], got {marks}")
    mark_set = set(marks)
    eye = np.eye(t_op.dim)
    out = np.eye(t_op.dim, dtype=complex)
    drift = []
    for k in range(1, n_kicks + 1):
        out = factor @ out
        if k in mark_set:
            drift.append((k, frob_norm(out.conj().T @ out - eye)))
    return FloquetResult(propagator=UnitaryOperator(out), drift=tuple(drift))


def floquet_power(
    t_op: HermitianOperator,
    v_op: HermitianOperator,
    tau: float,
    tau0: float,
    n_kicks: int,
) -> np.ndarray:
    """Same map as :func:`floquet_iterate` but via repeated squaring (cross-check)."""
    n_kicks = _check_steps(n_kicks)
    check_same_dim(t_op, v_op)
    factor = expm_hermitian(t_op, -1j * float(tau)) @ expm_hermitian(v_op, -1j * float(tau0))
    out = np.eye(t_op.dim, dtype=complex)
    base = factor
    k = n_kicks
    while k:
        if k & 1:
            out = base @ out
        base = base @ base
        k >>= 1
    return out
