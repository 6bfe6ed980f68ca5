"""Partitions, Young tableaux, and the tableau q-character formula.

Cells of the diagram of mu = (mu_1 >= ... >= mu_N) are pairs (i, j) with
1 <= j <= mu_i, where row i is counted from the bottom of the picture and
column j from the right (rows right-justified).  A tableau is a filling
T: cells -> {1..N} that weakly increases along rows left to right
(T(i, j+1) <= T(i, j)) and strictly increases down columns
(T(i+1, j) < T(i, j)).  The cell (i, j) contributes the generator
box_{T(i,j), a+j-i}, and

    qc(S_{mu,a}) = sum over tableaux of prod over cells of these boxes.

The Kirillov-Reshetikhin module W^{(r)}_{k,a} is S_{k varpi_r, a - ell_r}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cartan import ell_level
from .eweights import EWeight, QCharacter, gen_box
from .theta import AffineShift

__all__ = [
    "Partition",
    "Tableau",
    "enumerate_tableaux",
    "tableau_monomial",
    "highest_weight",
    "qchar_evaluation",
    "qchar_KR",
    "kr_leading_term",
]


@dataclass(frozen=True)
class Partition:
    """Weakly decreasing tuple of non-negative integers."""

    parts: tuple[int, ...]

    def __post_init__(self):
        ps = tuple(int(p) for p in self.parts)
        if any(p < 0 for p in ps):
            raise ValueError(f"negative part in {ps}")
        if any(ps[i] < ps[i + 1] for i in range(len(ps) - 1)):
            raise ValueError(f"parts {ps} are not weakly decreasing")
        object.__setattr__(self, "parts", ps)

    @staticmethod
    def rectangle(rows: int, width: int, n: int) -> "Partition":
        return Partition(tuple([width] * rows + [0] * (n - rows)))

    def cells(self) -> list[tuple[int, int]]:
        return [(i + 1, j + 1) for i, p in enumerate(self.parts) for j in range(p)]

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def nrows(self) -> int:
        return sum(1 for p in self.parts if p > 0)


@dataclass(frozen=True)
class Tableau:
    """Filling of a partition's cells by letters 1..N."""

    shape: Partition
    entries: tuple[tuple[tuple[int, int], int], ...]  # ((i, j), letter), sorted

    def __call__(self, i: int, j: int) -> int:
        return dict(self.entries)[(i, j)]

    def reading_word(self) -> tuple[int, ...]:
        return tuple(letter for _, letter in self.entries)


def enumerate_tableaux(mu: Partition, n: int) -> list[Tableau]:
    """All fillings with entries <= N, deterministic row-reading order.

    Backtracks cell by cell down each column: within row i entries weakly
    decrease as j grows (weakly increase left to right in the picture), down
    a shared column (i+1, j) -> (i, j) entries strictly increase.
    """
    if mu.nrows > n:
        raise ValueError(f"shape {mu.parts} has more than {n} rows")
    cells = sorted(mu.cells())  # row-major: (1,1), (1,2), ..., (2,1), ...
    filled: dict[tuple[int, int], int] = {}
    out: list[Tableau] = []

    def rec(pos: int):
        if pos == len(cells):
            out.append(Tableau(mu, tuple(sorted(filled.items()))))
            return
        i, j = cells[pos]
        hi = n
        if j > 1:
            hi = min(hi, filled[(i, j - 1)])  # weakly increasing along the row
        lo = 1
        if (i + 1, j) in filled:
            lo = max(lo, filled[(i + 1, j)] + 1)  # strict down the column
        for letter in range(lo, hi + 1):
            filled[(i, j)] = letter
            rec(pos + 1)
        filled.pop((i, j), None)

    # fill upper rows first so the column constraint sees (i+1, j)
    cells = sorted(mu.cells(), key=lambda c: (-c[0], c[1]))
    rec(0)
    out.sort(key=lambda t: t.reading_word())
    return out


def tableau_monomial(t: Tableau, a: AffineShift, n: int) -> EWeight:
    e = EWeight.one(n)
    for (i, j), letter in t.entries:
        e = e * gen_box(n, letter, a + (j - i))
    return e


def qchar_evaluation(mu: Partition, a, n: int) -> QCharacter:
    """Tableau sum for the evaluation module S_{mu,a}."""
    a = AffineShift.of(a)
    terms: dict[EWeight, int] = {}
    for t in enumerate_tableaux(mu, n):
        e = tableau_monomial(t, a, n)
        terms[e] = terms.get(e, 0) + 1
    return QCharacter.from_dict(n, terms, anchor=highest_weight(mu, a, n).weight)


def highest_weight(mu: Partition, a: AffineShift, n: int) -> EWeight:
    """theta_{mu,a} as a Psi-monomial: the term of the column-minimal tableau."""
    e = EWeight.one(n)
    for (i, j) in mu.cells():
        hj = sum(1 for p in mu.parts if p >= j)  # column height
        e = e * gen_box(n, hj - i + 1, a + (j - i))
    return e


def qchar_KR(r: int, k: int, a, n: int) -> QCharacter:
    """q-character of the KR module W^{(r)}_{k,a}; r = 0 gives the unit and
    r = N the one-dimensional level-N class."""
    if not 0 <= r <= n:
        raise ValueError(f"KR node {r} out of range 0..{n}")
    if k < 0:
        raise ValueError("k must be non-negative")
    a = AffineShift.of(a)
    if r == 0 or k == 0:
        return QCharacter.unit(n)
    mu = Partition.rectangle(r, k, n)
    return qchar_evaluation(mu, a - ell_level(r, n), n)


def kr_leading_term(r: int, k: int, a, n: int) -> EWeight:
    """The asymptotic e-weight Psi_{r,a+k} Psi_{r,a}^{-1}."""
    from .eweights import gen_psi

    a = AffineShift.of(a)
    if r == 0 or k == 0:
        return EWeight.one(n)
    return gen_psi(n, r, a + k) * gen_psi(n, r, a).inv()
