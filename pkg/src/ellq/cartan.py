"""Weight combinatorics of sl_N.

Weights live in the Cartan subalgebra spanned by eps_1..eps_N subject to
sum_i eps_i = 0; the canonical representative subtracts the coordinate mean,
so equality and hashing are exact.  Coordinates are AffineShift so that
symbolic weights like (Lambda-k) eps_1 + k eps_2 are first-class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .theta import AffineShift, ZERO_SHIFT

__all__ = [
    "Weight",
    "eps",
    "varpi",
    "alpha",
    "zero_weight",
    "ell_level",
    "lambda_ij",
    "weight_depth",
    "StateBasis",
    "enumerate_zero_weight_states",
]


@dataclass(frozen=True)
class Weight:
    """Canonical (mean-zero) coordinate tuple in the eps basis."""

    coords: tuple[AffineShift, ...]

    @staticmethod
    def make(coords: Sequence[AffineShift | int | Fraction]) -> "Weight":
        cs = [AffineShift.of(c) for c in coords]
        n = len(cs)
        mean = ZERO_SHIFT
        for c in cs:
            mean = mean + c
        mean = mean * Fraction(1, n)
        return Weight(tuple(c - mean for c in cs))

    @property
    def n(self) -> int:
        return len(self.coords)

    def __add__(self, other: "Weight") -> "Weight":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        return Weight(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Weight") -> "Weight":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        return Weight.make(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-c for c in self.coords))

    def scale(self, s: AffineShift | int | Fraction) -> "Weight":
        """Scale by a rational, or by an AffineShift when coords are rational."""
        if isinstance(s, AffineShift) and not s.is_constant:
            scaled = []
            for c in self.coords:
                scaled.append(s * c.as_fraction())
            return Weight.make(scaled)
        f = s.as_fraction() if isinstance(s, AffineShift) else Fraction(s)
        return Weight(tuple(c * f for c in self.coords))

    def is_zero(self) -> bool:
        return all(c == ZERO_SHIFT for c in self.coords)

    def to_vector(self, assignment: Mapping[str, complex] | None = None) -> np.ndarray:
        return np.array([c.evaluate(assignment) for c in self.coords], dtype=complex)

    def rename(self, mapping: Mapping[str, str]) -> "Weight":
        return Weight(tuple(c.rename(mapping) for c in self.coords))

    def sort_key(self):
        return tuple(c.sort_key() for c in self.coords)

    def __str__(self) -> str:
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


def zero_weight(n: int) -> Weight:
    return Weight(tuple(ZERO_SHIFT for _ in range(n)))


def eps(i: int, n: int) -> Weight:
    """eps_i, 1-based."""
    if not 1 <= i <= n:
        raise IndexError(f"eps index {i} out of range 1..{n}")
    return Weight.make(tuple(Fraction(1 if j == i - 1 else 0) for j in range(n)))


def varpi(k: int, n: int) -> Weight:
    """Fundamental weight varpi_k = eps_1 + ... + eps_k; varpi_0 = varpi_N = 0."""
    if not 0 <= k <= n:
        raise IndexError(f"varpi index {k} out of range 0..{n}")
    return Weight.make(tuple(Fraction(1 if j < k else 0) for j in range(n)))


def alpha(i: int, n: int) -> Weight:
    """Simple root alpha_i = eps_i - eps_{i+1}, 1 <= i <= N-1."""
    if not 1 <= i <= n - 1:
        raise IndexError(f"alpha index {i} out of range 1..{n - 1}")
    return eps(i, n) - eps(i + 1, n)


def ell_level(k: int, n: int) -> Fraction:
    """The half-integer ell_k = (N-k-1)/2 entering the fundamental e-weights."""
    return Fraction(n - k - 1, 2)


def lambda_ij(lam: Sequence[complex], i: int, j: int) -> complex:
    """lambda_{ij}: send sum c_i eps_i to c_i - c_j (1-based indices)."""
    n = len(lam)
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"indices ({i},{j}) out of range 1..{n}")
    return complex(lam[i - 1]) - complex(lam[j - 1])


def weight_depth(beta: Weight, anchor: Weight) -> tuple[int, ...]:
    """alpha-coordinates of anchor - beta, as non-negative integers.

    anchor - beta must lie in the non-negative integer span of the simple
    roots; partial sums of the canonical eps coordinates give the
    alpha-coordinates.
    """
    n = anchor.n
    diff = anchor - beta
    out = []
    running = ZERO_SHIFT
    for i in range(n - 1):
        running = running + diff.coords[i]
        if not running.is_constant:
            raise ValueError(f"difference {diff} is not in the root lattice")
        f = running.as_fraction()
        if f.denominator != 1 or f < 0:
            raise ValueError(
                f"difference {diff} is not a non-negative integer span of simple roots"
            )
        out.append(int(f))
    total = running + diff.coords[n - 1]
    if not (total.is_constant and total.as_fraction() == 0):
        raise ValueError(f"difference {diff} does not close up to zero")
    return tuple(out)


@dataclass(frozen=True)
class StateBasis:
    """Ordered basis of the zero-weight space of the ell-fold vector power.

    states are ell-tuples over the alphabet {1..N} in which every letter
    appears exactly ell/N times, listed in lexicographic order.
    """

    n: int
    ell: int
    states: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.states)

    def index(self, state: tuple[int, ...]) -> int:
        return self.states.index(state)


def _multiset_tuples(counts: list[int], ell: int) -> Iterable[tuple[int, ...]]:
    """All arrangements, lexicographically, of the multiset given by counts."""
    if ell == 0:
        yield ()
        return
    for letter in range(1, len(counts) + 1):
        if counts[letter - 1] > 0:
            counts[letter - 1] -= 1
            for rest in _multiset_tuples(counts, ell - 1):
                yield (letter,) + rest
            counts[letter - 1] += 1


def enumerate_zero_weight_states(n: int, ell: int) -> StateBasis:
    """Basis of V^{x ell}[0]: tuples with equal letter multiplicities."""
    if n < 2:
        raise ValueError("need N >= 2")
    if ell % n != 0:
        raise ValueError(f"ell = {ell} is not a multiple of N = {n}")
    kappa = ell // n
    states = tuple(_multiset_tuples([kappa] * n, ell))
    return StateBasis(n, ell, states)
