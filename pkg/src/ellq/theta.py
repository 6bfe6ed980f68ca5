"""Jacobi theta kernel and exact arithmetic on shift parameters.

The theta function used throughout is

    theta(z|tau) = -sum_j exp(i*pi*(j+1/2)^2*tau + 2*i*pi*(j+1/2)*(z+1/2)),

an odd entire function with zeros on the lattice Z + Z*tau and
quasi-periodicity theta(z+1) = -theta(z),
theta(z+tau) = -exp(-i*pi*tau - 2*i*pi*z) theta(z).

Shift parameters (the a, k, d, t measured in units of hbar) are kept exact
as ``AffineShift``: a rational constant plus rational multiples of opaque
indeterminates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

__all__ = [
    "EllipticParams",
    "AffineShift",
    "ThetaStripError",
    "MissingIndeterminateError",
    "theta",
    "theta_reduced",
    "eval_shift",
    "parse_shift",
]

#: magnitude above which a series term signals an unreduced argument
_OVERFLOW_BOUND = 1e40

#: search window of the hbar genericity probe: p*hbar = m + n*tau
_GENERICITY_RANGE = 16


class ThetaStripError(ValueError):
    """Raised when theta() is fed an argument outside the reduced strip."""


class MissingIndeterminateError(KeyError):
    """Raised when an AffineShift is evaluated without a needed assignment."""


@dataclass(frozen=True)
class EllipticParams:
    """Modular parameter, deformation parameter and numeric knobs.

    series_terms is the truncation half-width J: the series is summed over
    j in [-J, J-1].  hbar is rejected if p*hbar lands on Z + Z*tau for some
    0 < |p| <= 16 (within tol), since the e-weight normal form relies on no
    lattice coincidences among shifts.
    """

    tau: complex
    hbar: complex
    series_terms: int = 60
    tol: float = 1e-12

    def __post_init__(self):
        if self.tau.imag <= 0:
            raise ValueError(f"tau = {self.tau} must have positive imaginary part")
        if self.series_terms < 1:
            raise ValueError("series_terms must be a positive integer")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        self._check_hbar_generic()

    def _check_hbar_generic(self):
        tau = self.tau
        for p in range(1, _GENERICITY_RANGE + 1):
            w = p * self.hbar
            n = round(w.imag / tau.imag)
            m = round((w - n * tau).real)
            if abs(n) <= _GENERICITY_RANGE and abs(m) <= _GENERICITY_RANGE:
                if abs(w - m - n * tau) < max(self.tol, 1e-9):
                    raise ValueError(
                        f"hbar = {self.hbar} fails the genericity probe: "
                        f"{p}*hbar = {m} + {n}*tau within tolerance"
                    )


# Static per-parameter series data for the pair-summed form of the series:
# pairing j with -1-j in the defining sum over j in [-J, J-1] gives
# 2 sum_{j>=0} (-1)^j exp(i*pi*(j+1/2)^2*tau) sin((2j+1)*pi*z),
# which keeps theta exactly odd in floating point.
_SERIES_CACHE: dict[tuple[complex, int], tuple[np.ndarray, np.ndarray]] = {}


def _series_data(params: EllipticParams) -> tuple[np.ndarray, np.ndarray]:
    key = (params.tau, params.series_terms)
    data = _SERIES_CACHE.get(key)
    if data is None:
        J = params.series_terms
        jhalf = np.arange(J) + 0.5
        signs = np.where(np.arange(J) % 2 == 0, 1.0, -1.0)
        qfac = 2.0 * signs * np.exp(1j * math.pi * jhalf * jhalf * params.tau)
        data = (jhalf, qfac)
        _SERIES_CACHE[key] = data
    return data


def theta(z: complex, params: EllipticParams) -> complex:
    """Truncated theta series at z; caller must reduce z to the strip first.

    The defining sum over j in [-J, J-1] is evaluated in the symmetric
    pairs (j, -1-j).  Accurate (relative truncation error below params.tol)
    for |Im z| <= Im tau; signals ThetaStripError when a term overflows the
    magnitude bound, which happens only for unreduced arguments.
    """
    jhalf, qfac = _series_data(params)
    with np.errstate(over="ignore", invalid="ignore"):
        terms = qfac * np.sin(2.0 * math.pi * jhalf * z)
    if not np.all(np.isfinite(terms.view(float))) or np.max(np.abs(terms)) > _OVERFLOW_BOUND:
        raise ThetaStripError(f"theta argument z = {z} outside reduced strip")
    return complex(np.sum(terms))


def theta_reduced(z: complex, params: EllipticParams) -> complex:
    """theta(z) for arbitrary z, via lattice reduction and the exact cocycle.

    Writes z = z0 + m + n*tau with z0 in the fundamental strip and applies
    theta(z0 + m + n*tau) = (-1)^(m+n) exp(-i*pi*n^2*tau - 2*i*pi*n*z0) theta(z0).
    """
    tau = params.tau
    n = round(z.imag / tau.imag)
    z1 = z - n * tau
    m = round(z1.real)
    z0 = z1 - m
    mult = (-1) ** ((m + n) % 2) * cmath.exp(-1j * math.pi * n * n * tau - 2j * math.pi * n * z0)
    return mult * theta(z0, params)


def _coerce_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class AffineShift:
    """Exact number of the form rational + sum of rational * indeterminate.

    The universal currency for spectral and dynamical shifts measured in
    units of hbar.  Canonical form stores no zero coefficients; equality is
    exact field-wise comparison.  Indeterminates are opaque names and no
    relations among them are ever assumed.
    """

    const: Fraction = Fraction(0)
    linear: tuple[tuple[str, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "const", _coerce_fraction(self.const))
        items = [(str(n), _coerce_fraction(c)) for n, c in self.linear]
        cleaned = tuple(sorted((n, c) for n, c in items if c != 0))
        names = [n for n, _ in cleaned]
        if len(set(names)) != len(names):
            raise ValueError(f"repeated indeterminate in {items}")
        object.__setattr__(self, "linear", cleaned)

    # -- construction helpers -------------------------------------------------

    @staticmethod
    def of(x: Union["AffineShift", int, Fraction, str]) -> "AffineShift":
        """Coerce an int/Fraction/"p/q" string into a constant shift."""
        if isinstance(x, AffineShift):
            return x
        return AffineShift(_coerce_fraction(x))

    @staticmethod
    def var(name: str, coeff: Union[int, Fraction] = 1) -> "AffineShift":
        return AffineShift(Fraction(0), ((name, _coerce_fraction(coeff)),))

    # -- exact arithmetic ------------------------------------------------------

    def _lin_dict(self) -> dict[str, Fraction]:
        return dict(self.linear)

    def __add__(self, other) -> "AffineShift":
        other = AffineShift.of(other)
        lin = self._lin_dict()
        for n, c in other.linear:
            lin[n] = lin.get(n, Fraction(0)) + c
        return AffineShift(self.const + other.const, tuple(lin.items()))

    __radd__ = __add__

    def __neg__(self) -> "AffineShift":
        return AffineShift(-self.const, tuple((n, -c) for n, c in self.linear))

    def __sub__(self, other) -> "AffineShift":
        return self + (-AffineShift.of(other))

    def __rsub__(self, other) -> "AffineShift":
        return AffineShift.of(other) - self

    def __mul__(self, scalar) -> "AffineShift":
        s = _coerce_fraction(scalar)
        return AffineShift(self.const * s, tuple((n, c * s) for n, c in self.linear))

    __rmul__ = __mul__

    # -- queries ---------------------------------------------------------------

    @property
    def is_constant(self) -> bool:
        return not self.linear

    def as_fraction(self) -> Fraction:
        if self.linear:
            raise ValueError(f"{self} is not a constant shift")
        return self.const

    def evaluate(self, assignment: Mapping[str, complex] | None = None) -> complex:
        assignment = assignment or {}
        value = complex(self.const)
        for name, coeff in self.linear:
            if name not in assignment:
                raise MissingIndeterminateError(name)
            value += complex(coeff) * complex(assignment[name])
        return value

    def rename(self, mapping: Mapping[str, str]) -> "AffineShift":
        return AffineShift(
            self.const, tuple((mapping.get(n, n), c) for n, c in self.linear)
        )

    def sort_key(self):
        return (
            tuple((n, c.numerator, c.denominator) for n, c in self.linear),
            self.const.numerator,
            self.const.denominator,
        )

    def __str__(self) -> str:
        parts = []
        for name, coeff in self.linear:
            if coeff == 1:
                parts.append(name)
            elif coeff == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{coeff}*{name}")
        if self.const != 0 or not parts:
            parts.append(str(self.const))
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


ZERO_SHIFT = AffineShift()
HALF = AffineShift(Fraction(1, 2))


def eval_shift(s: AffineShift, assignment: Mapping[str, complex] | None = None,
               params: EllipticParams | None = None) -> complex:
    """Map an exact shift to a complex number; params is accepted for API
    symmetry but the evaluation is purely arithmetic."""
    return AffineShift.of(s).evaluate(assignment)


def parse_shift(text: str) -> AffineShift:
    """Parse "3/2", "-1", "k", "k+1/2", "2*k-t" into an AffineShift."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty shift")
    # split into signed terms
    terms: list[str] = []
    cur = ""
    for ch in s:
        if ch in "+-" and cur and cur[-1] not in "+-*/":
            terms.append(cur)
            cur = ch
        else:
            cur += ch
    terms.append(cur)
    out = ZERO_SHIFT
    for t in terms:
        sign = 1
        while t and t[0] in "+-":
            if t[0] == "-":
                sign = -sign
            t = t[1:]
        if not t:
            raise ValueError(f"malformed shift {text!r}")
        if "*" in t:
            coeff_s, name = t.split("*", 1)
            out = out + AffineShift.var(name, sign * Fraction(coeff_s))
        elif t[0].isalpha():
            out = out + AffineShift.var(t, sign)
        else:
            out = out + AffineShift(sign * Fraction(t))
    return out
