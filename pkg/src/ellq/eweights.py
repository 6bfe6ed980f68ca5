"""The symbolic ring of e-weights.

An e-weight is a monomial in the prefundamental generators Psi_{k,s}
(level k in 1..N, shift s an exact AffineShift in units of hbar) together
with its sl_N weight; Psi_{k,s} carries weight s*varpi_k and component
functions theta(z+(s-ell_k)hbar) in the first k slots.  The Y, A and box
generators are derived constructors:

    Y_k,a   = Psi_{k,a+1/2} / Psi_{k,a-1/2}
    A_i,a   = prod_j Psi_{j,a+c_ij/2} / Psi_{j,a-c_ij/2},  c_ij = 2 d_ij - d_{i,j+-1}
    box_k,a = Y_{k,a+ell_k+1/2} * Y_{k-1,a+ell_k}^{-1},     Y_0 = 1

Q-characters are finite integer combinations of e-weights with an optional
depth cap relative to an anchor weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .cartan import Weight, varpi, weight_depth, zero_weight, ell_level
from .theta import AffineShift, EllipticParams, ZERO_SHIFT, theta_reduced

__all__ = [
    "EWeight",
    "QCharacter",
    "gen_psi",
    "gen_Y",
    "gen_A",
    "gen_box",
    "components",
    "minor_value",
    "y_exponents",
    "is_right_negative",
    "is_dominant",
    "factor_into_A_inverses",
    "eweight_to_json",
    "eweight_from_json",
    "qchar_to_json",
    "qchar_from_json",
]

PsiKey = tuple[int, AffineShift]


@dataclass(frozen=True)
class EWeight:
    """Psi-monomial with exact exponents; the unit is EWeight.one(N)."""

    n: int
    psi: tuple[tuple[PsiKey, int], ...]  # sorted by key, exponents nonzero

    @staticmethod
    def one(n: int) -> "EWeight":
        return EWeight(n, ())

    @staticmethod
    def from_dict(n: int, d: Mapping[PsiKey, int]) -> "EWeight":
        items = []
        for (k, s), e in d.items():
            if not 1 <= k <= n:
                raise ValueError(f"Psi level {k} out of range 1..{n}")
            if e != 0:
                items.append(((k, AffineShift.of(s)), int(e)))
        items.sort(key=lambda kv: (kv[0][0], kv[0][1].sort_key()))
        return EWeight(n, tuple(items))

    def psi_dict(self) -> dict[PsiKey, int]:
        return dict(self.psi)

    def __mul__(self, other: "EWeight") -> "EWeight":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        d = self.psi_dict()
        for key, e in other.psi:
            e2 = d.get(key, 0) + e
            if e2:
                d[key] = e2
            else:
                del d[key]
        return EWeight.from_dict(self.n, d)

    def inv(self) -> "EWeight":
        return EWeight(self.n, tuple((k, -e) for k, e in self.psi))

    def __pow__(self, m: int) -> "EWeight":
        if m == 0:
            return EWeight.one(self.n)
        return EWeight(self.n, tuple((k, e * m) for k, e in self.psi))

    @property
    def weight(self) -> Weight:
        w = zero_weight(self.n)
        for (k, s), e in self.psi:
            w = w + varpi(k, self.n).scale(s * e)
        return w

    def rename(self, mapping: Mapping[str, str]) -> "EWeight":
        d = {(k, s.rename(mapping)): e for (k, s), e in self.psi}
        return EWeight.from_dict(self.n, d)

    def sort_key(self):
        return tuple(((k, s.sort_key()), e) for (k, s), e in self.psi)

    def __str__(self) -> str:
        if not self.psi:
            return "1"
        parts = []
        for (k, s), e in self.psi:
            base = f"Psi({k};{s})"
            parts.append(base if e == 1 else f"{base}^{e}")
        return "*".join(parts)


# -- generators ---------------------------------------------------------------


def gen_psi(n: int, k: int, s) -> EWeight:
    if not 1 <= k <= n:
        raise ValueError(f"Psi level {k} out of range 1..{n}")
    return EWeight.from_dict(n, {(k, AffineShift.of(s)): 1})


def gen_Y(n: int, k: int, s) -> EWeight:
    if not 1 <= k <= n:
        raise ValueError(f"Y level {k} out of range 1..{n}")
    a = AffineShift.of(s)
    half = Fraction(1, 2)
    return EWeight.from_dict(n, {(k, a + half): 1, (k, a - half): -1})


def gen_A(n: int, i: int, s) -> EWeight:
    if not 1 <= i <= n - 1:
        raise ValueError(f"A level {i} out of range 1..{n - 1}")
    a = AffineShift.of(s)
    d: dict[PsiKey, int] = {}

    def bump(k: int, sh: AffineShift, e: int):
        key = (k, sh)
        d[key] = d.get(key, 0) + e
        if d[key] == 0:
            del d[key]

    for j in range(1, n + 1):
        cij = 2 if j == i else (-1 if abs(j - i) == 1 else 0)
        if cij == 0:
            continue
        half_c = Fraction(cij, 2)
        bump(j, a + half_c, 1)
        bump(j, a - half_c, -1)
    return EWeight.from_dict(n, d)


def gen_box(n: int, k: int, s) -> EWeight:
    if not 1 <= k <= n:
        raise ValueError(f"box level {k} out of range 1..{n}")
    a = AffineShift.of(s)
    lk = ell_level(k, n)
    out = gen_Y(n, k, a + lk + Fraction(1, 2))
    if k > 1:
        out = out * gen_Y(n, k - 1, a + lk).inv()
    return out


# -- components and numeric evaluation ----------------------------------------


def components(e: EWeight) -> tuple[dict[AffineShift, int], ...]:
    """Per slot i in 1..N, the multiset {shift: exponent} meaning
    prod theta(z + shift*hbar)^exponent."""
    slots: list[dict[AffineShift, int]] = [dict() for _ in range(e.n)]
    for (k, s), expo in e.psi:
        sh = s - ell_level(k, e.n)
        for i in range(k):
            slot = slots[i]
            slot[sh] = slot.get(sh, 0) + expo
            if slot[sh] == 0:
                del slot[sh]
    return tuple(slots)


def component_value(e: EWeight, slot: int, z: complex, params: EllipticParams,
                    assignment: Mapping[str, complex] | None = None) -> complex:
    """Numeric value of the slot-th (1-based) component function at z."""
    val = 1.0 + 0j
    for sh, expo in components(e)[slot - 1].items():
        val *= theta_reduced(z + sh.evaluate(assignment) * params.hbar, params) ** expo
    return val


def minor_value(e: EWeight, l: int, z: complex, params: EllipticParams,
                assignment: Mapping[str, complex] | None = None) -> complex:
    """D_l-eigenvalue attached to e:
    f_N(z) f_{N-1}(z+hbar) ... f_{N-l+1}(z+(l-1)hbar)."""
    if not 1 <= l <= e.n:
        raise ValueError(f"minor level {l} out of range 1..{e.n}")
    val = 1.0 + 0j
    for j in range(l):
        val *= component_value(e, e.n - j, z + j * params.hbar, params, assignment)
    return val


# -- Y-basis conversion and classification predicates --------------------------


def _chains(exps: dict[AffineShift, int]) -> list[list[tuple[AffineShift, int]]]:
    """Group shifts whose differences are integers; each group sorted descending."""
    groups: list[list[tuple[AffineShift, int]]] = []
    for sh, e in exps.items():
        for g in groups:
            diff = sh - g[0][0]
            if diff.is_constant and diff.as_fraction().denominator == 1:
                g.append((sh, e))
                break
        else:
            groups.append([(sh, e)])
    out = []
    for g in groups:
        base = g[0][0]
        out.append(sorted(g, key=lambda t: -(t[0] - base).as_fraction()))
    return out


def y_exponents(e: EWeight) -> tuple[dict[tuple[int, AffineShift], int], dict[AffineShift, int]]:
    """Rewrite e as a Y-monomial (levels < N) times a level-N Psi part.

    Returns ({(level, shift): exponent}, {level-N shift: exponent}).  Raises
    ValueError when some level-(k<N) part is not a product of Y_k's, i.e.
    its exponents do not telescope within each integer-spaced shift chain.
    """
    y: dict[tuple[int, AffineShift], int] = {}
    level_n: dict[AffineShift, int] = {}
    by_level: dict[int, dict[AffineShift, int]] = {}
    for (k, s), expo in e.psi:
        by_level.setdefault(k, {})[s] = expo
    for k, exps in by_level.items():
        if k == e.n:
            level_n.update(exps)
            continue
        for chain in _chains(exps):
            total = 0
            prefix = 0
            prev_shift = None
            for sh, expo in chain:  # descending
                if prev_shift is not None:
                    gap = int((prev_shift - sh).as_fraction())
                    if prefix != 0:
                        # prefix persists on the half-integer points strictly
                        # between the two Psi shifts
                        for m in range(1, gap):
                            y[(k, prev_shift - m - Fraction(1, 2))] = prefix
                prefix += expo
                total += expo
                if prefix != 0:
                    y[(k, sh - Fraction(1, 2))] = prefix
                prev_shift = sh
            if total != 0:
                raise ValueError(
                    f"level-{k} part of {e} is not in the Y-span "
                    f"(chain exponents sum to {total})"
                )
    return y, level_n


def _comparable_min_shift(shifts: Iterable[AffineShift]) -> AffineShift:
    shifts = list(shifts)
    base = shifts[0]
    vals = []
    for s in shifts:
        d = s - base
        if not d.is_constant:
            raise ValueError("Y shifts do not lie on one half-integer lattice")
        f = d.as_fraction()
        if f.denominator > 2:
            raise ValueError("Y shifts do not lie on one half-integer lattice")
        vals.append((f, s))
    return min(vals, key=lambda t: t[0])[1]


def is_right_negative(e: EWeight) -> bool:
    """Among Y-factors of levels 1..N-1 with minimal shift, all exponents
    are negative (and there is at least one Y-factor)."""
    y, _ = y_exponents(e)
    if not y:
        return False
    mshift = _comparable_min_shift([s for (_, s) in y])
    at_min = [expo for (k, s), expo in y.items() if s == mshift]
    return all(expo < 0 for expo in at_min)


def is_dominant(e: EWeight) -> bool:
    """All Y-exponents at levels 1..N-1 are non-negative."""
    y, _ = y_exponents(e)
    return all(expo >= 0 for expo in y.values())


def factor_into_A_inverses(m: EWeight, max_shifts: int = 64) -> dict[tuple[int, AffineShift], int] | None:
    """Express m as a product of A_{i,x}^{-1}; None when impossible.

    Backtracking over candidate shifts read off m's Psi support; the number
    of A_i^{-1} factors per node is pinned by the alpha-depth of m's weight.
    """
    n = m.n
    try:
        depth = weight_depth(m.weight, zero_weight(n))
    except ValueError:
        return None
    candidates: set[AffineShift] = set()
    for (_, s), _e in m.psi:
        for d in (-1, Fraction(-1, 2), 0, Fraction(1, 2), 1):
            candidates.add(s + d)
    cand = sorted(candidates, key=lambda s: s.sort_key())
    if len(cand) > max_shifts:
        return None

    def rec(target: EWeight, remaining: tuple[int, ...],
            used: dict[tuple[int, AffineShift], int]):
        if all(r == 0 for r in remaining):
            return dict(used) if target == EWeight.one(n) else None
        i = next(idx for idx, r in enumerate(remaining) if r > 0) + 1
        rem2 = list(remaining)
        rem2[i - 1] -= 1
        for x in cand:
            a_inv = gen_A(n, i, x).inv()
            key = (i, x)
            used[key] = used.get(key, 0) + 1
            res = rec(target * a_inv.inv(), tuple(rem2), used)
            if res is not None:
                return res
            used[key] -= 1
            if used[key] == 0:
                del used[key]
        return None

    return rec(m, depth, {})


# -- q-characters ---------------------------------------------------------------


@dataclass(frozen=True)
class QCharacter:
    """Finite integer-coefficient formal sum of e-weights.

    anchor, when set, is the reference weight for depth grading; depth_limit
    caps the total alpha-depth of retained terms under multiplication.
    """

    n: int
    terms: tuple[tuple[EWeight, int], ...]
    anchor: Weight | None = None
    depth_limit: int | None = None

    @staticmethod
    def from_dict(n: int, d: Mapping[EWeight, int], anchor: Weight | None = None,
                  depth_limit: int | None = None) -> "QCharacter":
        items = [(e, int(c)) for e, c in d.items() if c != 0]
        items.sort(key=lambda ec: ec[0].sort_key())
        return QCharacter(n, tuple(items), anchor, depth_limit)

    @staticmethod
    def unit(n: int) -> "QCharacter":
        return QCharacter.from_dict(n, {EWeight.one(n): 1}, zero_weight(n))

    @staticmethod
    def monomial(e: EWeight, coeff: int = 1) -> "QCharacter":
        return QCharacter.from_dict(e.n, {e: coeff}, e.weight)

    def terms_dict(self) -> dict[EWeight, int]:
        return dict(self.terms)

    @property
    def nterms(self) -> int:
        return len(self.terms)

    def coefficient(self, e: EWeight) -> int:
        return self.terms_dict().get(e, 0)

    def depth_of(self, e: EWeight) -> tuple[int, ...]:
        if self.anchor is None:
            raise ValueError("q-character has no anchor")
        return weight_depth(e.weight, self.anchor)

    def _keep(self, e: EWeight, anchor: Weight | None, limit: int | None) -> bool:
        if limit is None or anchor is None:
            return True
        return sum(weight_depth(e.weight, anchor)) <= limit

    def __add__(self, other: "QCharacter") -> "QCharacter":
        if self.n != other.n:
            raise ValueError("rank mismatch")
        d = self.terms_dict()
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return QCharacter.from_dict(self.n, d, self.anchor or other.anchor,
                                    self.depth_limit)

    def __sub__(self, other: "QCharacter") -> "QCharacter":
        return self + other.scale(-1)

    def scale(self, c: int) -> "QCharacter":
        return QCharacter.from_dict(self.n, {e: c * x for e, x in self.terms},
                                    self.anchor, self.depth_limit)

    def __mul__(self, other) -> "QCharacter":
        if isinstance(other, EWeight):
            other = QCharacter.monomial(other)
        if isinstance(other, int):
            return self.scale(other)
        if self.n != other.n:
            raise ValueError("rank mismatch")
        anchor = None
        if self.anchor is not None and other.anchor is not None:
            anchor = self.anchor + other.anchor
        limit = self.depth_limit if self.depth_limit is not None else other.depth_limit
        d: dict[EWeight, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = e1 * e2
                if not self._keep(e, anchor, limit):
                    continue
                d[e] = d.get(e, 0) + c1 * c2
        return QCharacter.from_dict(self.n, d, anchor, limit)

    def leading_terms(self) -> list[tuple[EWeight, int]]:
        """Terms of depth zero relative to the anchor."""
        return [(e, c) for e, c in self.terms if sum(self.depth_of(e)) == 0]

    def rename(self, mapping: Mapping[str, str]) -> "QCharacter":
        d = {e.rename(mapping): c for e, c in self.terms}
        anchor = self.anchor.rename(mapping) if self.anchor is not None else None
        return QCharacter.from_dict(self.n, d, anchor, self.depth_limit)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{e}" if c != 1 else str(e) for e, c in self.terms)


# -- canonical JSON ---------------------------------------------------------------


def _shift_to_json(s: AffineShift) -> str:
    return str(s)


def eweight_to_json(e: EWeight) -> dict:
    return {
        "n": e.n,
        "psi": [[k, _shift_to_json(s), expo] for (k, s), expo in e.psi],
    }


def eweight_from_json(obj: dict) -> EWeight:
    from .theta import parse_shift

    d = {(int(k), parse_shift(s)): int(expo) for k, s, expo in obj["psi"]}
    return EWeight.from_dict(int(obj["n"]), d)


def qchar_to_json(q: QCharacter) -> dict:
    return {
        "n": q.n,
        "terms": [[eweight_to_json(e), c] for e, c in q.terms],
    }


def qchar_from_json(obj: dict) -> QCharacter:
    d = {eweight_from_json(ej): int(c) for ej, c in obj["terms"]}
    return QCharacter.from_dict(int(obj["n"]), d)
