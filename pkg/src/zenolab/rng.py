"""Seeded random fixtures with a byte-exact, language-neutral specification.

All randomized models and test fixtures are drawn from the small generator
below rather than from ``numpy.random``, so that any reimplementation (in any
language) reproduces the same matrices from the same seed.  The algorithm:

* State update (Knuth's MMIX linear congruential generator)::

      x_{k+1} = (6364136223846793005 * x_k + 1442695040888963407)  mod 2^64

  with initial state ``x_0 = seed mod 2^64``.  Every draw advances the state
  first and then uses it.

* Uniform double in [0, 1): the top 53 bits of the state,
  ``u = (x >> 11) / 2^53``.

* Standard normal via Box-Muller, two uniforms per normal (no caching)::

      z = sqrt(-2 ln(1 - u1)) * cos(2 pi u2)

* Hermitian draw of dimension d: fill a d x d complex matrix ``A`` row-major
  with d^2 normals for the real parts followed by d^2 normals for the
  imaginary parts, then return ``(A + A^dagger) / 2``.

Integer arithmetic is exact and the floating-point steps use only basic IEEE
double operations, so streams are bit-identical on one platform and agree to
roundoff across platforms.
"""

from __future__ import annotations

import math

import numpy as np

_MULT = 6364136223846793005
_INC = 1442695040888963407
_MASK = (1 << 64) - 1


class Lcg64:
    """Deterministic 64-bit LCG with uniform/normal/matrix draws."""

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_u64(self) -> int:
        self.state = (_MULT * self.state + _INC) & _MASK
        return self.state

    def uniform(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) / float(1 << 53)

    def normal(self) -> float:
        """Standard normal; consumes exactly two uniforms."""
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def normals(self, n: int) -> np.ndarray:
        return np.array([self.normal() for _ in range(n)], dtype=float)

    def hermitian(self, dim: int) -> np.ndarray:
        """Random Hermitian matrix, standard-normal entries symmetrized."""
        re = self.normals(dim * dim).reshape(dim, dim)
        im = self.normals(dim * dim).reshape(dim, dim)
        a = re + 1j * im
        return (a + a.conj().T) / 2.0

    def projector(self, dim: int, rank: int) -> np.ndarray:
        """Random rank-`rank` orthogonal projector (from a Hermitian draw's eigenbasis)."""
        if not 0 <= rank <= dim:
            raise ValueError(f"rank must lie in [0, {dim}], got {rank}")
        _, v = np.linalg.eigh(self.hermitian(dim))
        cols = v[:, :rank]
        return cols @ cols.conj().T
