"""Concrete modules as matrices of difference-operator evaluators.

A bound operator (Dop) is a matrix-valued function of the dynamical
parameter lam together with the numeric right bi-degree beta; composition
obeys the difference-map contract

    [Phi1 o Phi2](lam) = [Phi1](lam) @ [Phi2](lam + hbar*beta1).

Dynamical parameters are passed as plain C^N coordinate vectors; all
entries built here depend on lam only through differences lam_i - lam_j
except for the small-elliptic-group extraction, which uses the
representative coordinates stored per basis vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Callable, Mapping, Sequence

import numpy as np

from .cartan import Weight, eps, weight_depth
from .rmatrix import POLE_GUARD, PoleError, r_matrix
from .theta import AffineShift, EllipticParams, theta_reduced

__all__ = [
    "Dop",
    "EModule",
    "vector_module",
    "one_dim_module",
    "shift_module",
    "scale_module",
    "tensor_module",
    "gauge_module",
    "gauge_vector_module",
    "rll_residual",
    "DifferenceOperator",
    "quantum_minor",
    "asymptotic_sl2_module",
    "small_e_extract",
    "small_e_relation_residuals",
]


def _lam_key(lam: np.ndarray) -> bytes:
    return np.asarray(lam, dtype=complex).tobytes()


@dataclass
class Dop:
    """Matrix evaluator with difference-composition bookkeeping."""

    hbar: complex
    beta: np.ndarray
    fn: Callable[[np.ndarray], np.ndarray]
    _cache: dict = field(default_factory=dict, repr=False)

    def eval(self, lam: Sequence[complex]) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        key = _lam_key(lam)
        got = self._cache.get(key)
        if got is None:
            got = np.asarray(self.fn(lam), dtype=complex)
            self._cache[key] = got
        return got

    def compose(self, other: "Dop") -> "Dop":
        shift = self.hbar * self.beta

        def fn(lam, a=self, b=other, shift=shift):
            return a.eval(lam) @ b.eval(lam + shift)

        return Dop(self.hbar, self.beta + other.beta, fn)

    def __add__(self, other: "Dop") -> "Dop":
        if not np.allclose(self.beta, other.beta):
            raise ValueError("cannot add operators of different bi-degree")
        return Dop(self.hbar, self.beta, lambda lam, a=self, b=other: a.eval(lam) + b.eval(lam))

    def scale(self, c: complex) -> "Dop":
        return Dop(self.hbar, self.beta, lambda lam, a=self, c=c: c * a.eval(lam))


@dataclass
class EModule:
    """Finite weight-graded module with L-operator evaluators.

    wt_rep holds representative coordinate vectors of the basis weights
    (built from the natural eps_i -> e_i assignment); wt_exact/anchor carry
    the exact weights used for depth grading in transfer matrices.
    """

    n: int
    params: EllipticParams
    labels: tuple
    wt_rep: tuple[np.ndarray, ...]
    wt_exact: tuple[Weight, ...]
    anchor: Weight
    assignment: dict
    lfn: Callable[[int, int, complex], Dop]
    desc: str = ""
    _lcache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def L(self, i: int, j: int, z: complex) -> Dop:
        """L_{ij}(z) as a bound operator, 1-based indices."""
        if not (1 <= i <= self.n and 1 <= j <= self.n):
            raise IndexError(f"L indices ({i},{j}) out of range 1..{self.n}")
        key = (i, j, complex(z))
        op = self._lcache.get(key)
        if op is None:
            op = self.lfn(i, j, z)
            self._lcache[key] = op
        return op

    def depths(self) -> tuple[tuple[int, ...], ...]:
        return tuple(weight_depth(w, self.anchor) for w in self.wt_exact)

    def moment_right(self, g: Callable[[np.ndarray], complex]) -> Dop:
        """mu_r(g): multiplication by g(lam)."""
        dim = self.dim
        return Dop(self.params.hbar, np.zeros(self.n),
                   lambda lam: g(lam) * np.eye(dim, dtype=complex))

    def moment_left(self, g: Callable[[np.ndarray], complex]) -> Dop:
        """mu_l(g): multiplication by g(lam + hbar*wt) on each weight space."""
        hbar = self.params.hbar
        reps = self.wt_rep

        def fn(lam):
            return np.diag([g(lam + hbar * w) for w in reps])

        return Dop(hbar, np.zeros(self.n), fn)


def _eps_rep(i: int, n: int) -> np.ndarray:
    v = np.zeros(n, dtype=complex)
    v[i - 1] = 1.0
    return v


def vector_module(n: int, a, params: EllipticParams,
                  assignment: Mapping[str, complex] | None = None) -> EModule:
    """The vector representation V(a): L_{ij}(z) v_k = (theta(z'+hbar)/theta(z'))
    R^{jk}_{il}(z';lam) v_l with z' = z + a*hbar.
    """
    aval = AffineShift.of(a).evaluate(assignment) if isinstance(a, (AffineShift, int, Fraction, str)) \
        else complex(a)
    hbar = params.hbar
    rcache: dict = {}

    def lfn(i: int, j: int, z: complex) -> Dop:
        zp = z + aval * hbar

        def fn(lam):
            key = _lam_key(lam)
            R = rcache.get((zp, key))
            if R is None:
                R = r_matrix(n, zp, lam, params)
                rcache[(zp, key)] = R
            t0 = theta_reduced(zp, params)
            if abs(t0) < POLE_GUARD:
                raise PoleError(f"theta(z + a*hbar) vanished at z' = {zp}")
            pref = theta_reduced(zp + hbar, params) / t0
            mat = np.zeros((n, n), dtype=complex)
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    mat[l - 1, k - 1] = pref * R.entry(i, l, j, k)
            return mat

        return Dop(hbar, _eps_rep(j, n), fn)

    return EModule(
        n=n, params=params,
        labels=tuple(f"v{i}" for i in range(1, n + 1)),
        wt_rep=tuple(_eps_rep(i, n) for i in range(1, n + 1)),
        wt_exact=tuple(eps(i, n) for i in range(1, n + 1)),
        anchor=eps(1, n),
        assignment=dict(assignment or {}),
        lfn=lfn,
        desc=f"V({a})",
    )


def one_dim_module(n: int, g: Callable[[complex], complex], params: EllipticParams,
                   desc: str = "S(g)") -> EModule:
    """One-dimensional module of highest weight g(z) and weight zero."""
    from .cartan import zero_weight

    hbar = params.hbar

    def lfn(i: int, j: int, z: complex) -> Dop:
        val = g(z) if i == j else 0.0

        def fn(lam, val=val):
            return np.array([[val]], dtype=complex)

        return Dop(hbar, _eps_rep(j, n), fn)

    return EModule(
        n=n, params=params, labels=("w",),
        wt_rep=(np.zeros(n, dtype=complex),),
        wt_exact=(zero_weight(n),),
        anchor=zero_weight(n),
        assignment={},
        lfn=lfn, desc=desc,
    )


def shift_module(x: EModule, u: complex) -> EModule:
    """Pullback by the spectral shift: L(z) -> L(z + u*hbar)."""
    uval = complex(u)

    def lfn(i, j, z):
        return x.L(i, j, z + uval * x.params.hbar)

    return EModule(x.n, x.params, x.labels, x.wt_rep, x.wt_exact, x.anchor,
                   x.assignment, lfn, desc=f"shift({x.desc},{u})")


def scale_module(x: EModule, g: Callable[[complex], complex],
                 desc: str | None = None) -> EModule:
    """Tensor with the one-dimensional module of highest weight g(z):
    every L_{ij}(z) is multiplied by the scalar g(z)."""

    def lfn(i, j, z):
        return x.L(i, j, z).scale(g(z))

    return EModule(x.n, x.params, x.labels, x.wt_rep, x.wt_exact, x.anchor,
                   x.assignment, lfn, desc=desc or f"{x.desc}*S(g)")


def tensor_module(x: EModule, y: EModule) -> EModule:
    """Dynamical tensor product with
    [Phi (x) Psi]_{(b'c'),(bc)}(lam) = [Phi]_{b'b}(lam + hbar*wt(c')) [Psi]_{c'c}(lam)."""
    if x.n != y.n or x.params is not y.params and x.params != y.params:
        raise ValueError("tensor factors must share N and params")
    n, hbar = x.n, x.params.hbar
    dx, dy = x.dim, y.dim

    def lfn(i, j, z):
        pairs = [(x.L(i, k, z), y.L(k, j, z)) for k in range(1, n + 1)]

        def fn(lam):
            mat = np.zeros((dx * dy, dx * dy), dtype=complex)
            for a_op, b_op in pairs:
                b_mat = b_op.eval(lam)
                for cp in range(dy):
                    a_mat = a_op.eval(lam + hbar * y.wt_rep[cp])
                    # rows (b', cp), cols (b, c)
                    mat[cp::dy, :] += np.kron(a_mat, b_mat[cp, :].reshape(1, dy))
            return mat

        return Dop(hbar, _eps_rep(j, n), fn)

    return EModule(
        n=n, params=x.params,
        labels=tuple((a, b) for a in x.labels for b in y.labels),
        wt_rep=tuple(wa + wb for wa in x.wt_rep for wb in y.wt_rep),
        wt_exact=tuple(wa + wb for wa in x.wt_exact for wb in y.wt_exact),
        anchor=x.anchor + y.anchor,
        assignment={**x.assignment, **y.assignment},
        lfn=lfn,
        desc=f"{x.desc} (x) {y.desc}",
    )


def gauge_module(x: EModule, gs: Sequence[Callable[[np.ndarray], complex]],
                 desc: str | None = None) -> EModule:
    """Basis change v_b -> g_b(lam) v_b:
    [L~]_{b'b}(lam) = [L]_{b'b}(lam) g_b(lam + hbar*eps_j) / g_{b'}(lam)."""
    n, hbar = x.n, x.params.hbar

    def lfn(i, j, z):
        base = x.L(i, j, z)
        shift = hbar * _eps_rep(j, n)

        def fn(lam):
            m = base.eval(lam)
            col = np.array([g(lam + shift) for g in gs])
            row = np.array([g(lam) for g in gs])
            return (m * col[None, :]) / row[:, None]

        return Dop(hbar, _eps_rep(j, n), fn)

    return EModule(x.n, x.params, x.labels, x.wt_rep, x.wt_exact, x.anchor,
                   x.assignment, lfn, desc=desc or f"gauged({x.desc})")


def gauge_vector_module(x: EModule) -> EModule:
    """The gauged basis v~_i = v_i prod_{l>i} theta(lam_il + hbar)."""
    n, params = x.n, x.params

    def g(i):
        def gi(lam):
            val = 1.0 + 0j
            for l in range(i + 1, n + 1):
                val *= theta_reduced(lam[i - 1] - lam[l - 1] + params.hbar, params)
            return val
        return gi

    return gauge_module(x, [g(i) for i in range(1, n + 1)], desc=f"gauged {x.desc}")


# -- RLL ------------------------------------------------------------------------


def rll_residual(x: EModule, z: complex, w: complex, lam: Sequence[complex],
                 rows: int | None = None) -> float:
    """Max-norm residual of the dynamical RLL relation on x at one sample.

    rows restricts the compared entries to the leading block (used for
    depth-truncated modules, whose last level has no exact b-action).
    """
    n, params = x.n, x.params
    hbar = params.hbar
    lam = np.asarray(lam, dtype=complex)
    dim = x.dim
    rows = dim if rows is None else rows

    r_at = {}

    def rval(lv: np.ndarray):
        key = _lam_key(lv)
        if key not in r_at:
            r_at[key] = r_matrix(n, z - w, lv, params)
        return r_at[key]

    r_right = rval(lam)
    r_left_rows = [rval(lam + hbar * x.wt_rep[b]) for b in range(dim)]

    mz = {(p, i): x.L(p, i, z).eval(lam) for p in range(1, n + 1) for i in range(1, n + 1)}
    mw = {(q, j): x.L(q, j, w).eval(lam) for q in range(1, n + 1) for j in range(1, n + 1)}
    mw_shift = {(q, j, i): x.L(q, j, w).eval(lam + hbar * _eps_rep(i, n))
                for q in range(1, n + 1) for j in range(1, n + 1) for i in range(1, n + 1)}
    mz_shift = {(m, p, q): x.L(m, p, z).eval(lam + hbar * _eps_rep(q, n))
                for m in range(1, n + 1) for p in range(1, n + 1) for q in range(1, n + 1)}

    worst = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for m in range(1, n + 1):
                for nn in range(1, n + 1):
                    lhs = np.zeros((dim, dim), dtype=complex)
                    rhs = np.zeros((dim, dim), dtype=complex)
                    for p in range(1, n + 1):
                        for q in range(1, n + 1):
                            coeffs = np.array(
                                [r_left_rows[b].entry(m, nn, p, q) for b in range(dim)])
                            if np.any(coeffs != 0):
                                lhs += coeffs[:, None] * (mz[(p, i)] @ mw_shift[(q, j, i)])
                            c = r_right.entry(p, q, i, j)
                            if c != 0:
                                rhs += c * (mw[(nn, q)] @ mz_shift[(m, p, q)])
                    diff = np.max(np.abs((lhs - rhs)[:rows, :rows]))
                    worst = max(worst, float(diff))
    return worst


# -- elliptic quantum minors -------------------------------------------------------


@dataclass
class DifferenceOperator:
    """A z-family of bound operators (used for the quantum minors)."""

    module: EModule
    builder: Callable[[complex], Dop]
    bidegree: tuple[Weight, Weight]
    _cache: dict = field(default_factory=dict, repr=False)

    def at(self, z: complex) -> Dop:
        key = complex(z)
        if key not in self._cache:
            self._cache[key] = self.builder(z)
        return self._cache[key]

    def eval(self, z: complex, lam: Sequence[complex]) -> np.ndarray:
        return self.at(z).eval(lam)


def quantum_minor(x: EModule, k: int, convention: str = "last_k") -> DifferenceOperator:
    """The k-th elliptic quantum minor

    D_k(z) = mu_r(Theta_k)/mu_l(Theta_k) sum_sigma sign(sigma)
             L_{sigma(N),N}(z) L_{sigma(N-1),N-1}(z+hbar) ...
             L_{sigma(N-k+1),N-k+1}(z+(k-1)hbar),

    with sigma over permutations of the last k letters (convention
    "last_k"); the degenerate literal reading (permute the first N-k) is
    kept behind convention="literal" for audit.
    """
    n, params = x.n, x.params
    hbar = params.hbar
    if not 1 <= k <= n:
        raise ValueError(f"minor index {k} out of range 1..{n}")
    if convention == "last_k":
        moved = list(range(n - k + 1, n + 1))
    elif convention == "literal":
        moved = list(range(1, n - k + 1))
    else:
        raise ValueError(f"unknown convention {convention!r}")

    def theta_k(lam):
        val = 1.0 + 0j
        for i in range(n - k + 1, n + 1):
            for j in range(i + 1, n + 1):
                val *= theta_reduced(lam[i - 1] - lam[j - 1], params)
        return val

    def build(z: complex) -> Dop:
        total: Dop | None = None
        for perm in permutations(moved):
            sigma = {a: b for a, b in zip(moved, perm)}
            op: Dop | None = None
            for col in range(n, n - k, -1):
                row = sigma.get(col, col)
                factor = x.L(row, col, z + (n - col) * hbar)
                op = factor if op is None else op.compose(factor)
            sign = _perm_sign(moved, perm)
            op = op.scale(sign) if sign < 0 else op
            total = op if total is None else total + op

        def with_prefactor(lam, core=total):
            t_lam = theta_k(lam)
            m = core.eval(lam)
            pref = np.array([t_lam / theta_k(lam + hbar * wr) for wr in x.wt_rep])
            return pref[:, None] * m

        return Dop(hbar, total.beta, with_prefactor)

    from .cartan import varpi

    bidg = (varpi(n - k, n).scale(-1), varpi(n - k, n).scale(-1))
    return DifferenceOperator(x, build, bidg)


def _perm_sign(domain: list[int], image: Sequence[int]) -> int:
    perm = list(image)
    sign = 1
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


# -- the explicit sl2 asymptotic module ---------------------------------------------


def asymptotic_sl2_module(lam_top, depth: int, params: EllipticParams,
                          assignment: Mapping[str, complex] | None = None) -> EModule:
    """Depth-truncated asymptotic module of E_{tau,hbar}(sl_2) on v_0..v_depth.

    (a,b,c,d) = (L_11, L_12, L_21, L_22) act through the explicit
    theta-function formulas with lam = lam_12 and top weight parameter
    Lambda; the b-action out of v_depth is truncated to zero.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    assignment = dict(assignment or {})
    if isinstance(lam_top, AffineShift):
        lam_shift = lam_top
    elif isinstance(lam_top, (int, Fraction)):
        lam_shift = AffineShift.of(lam_top)
    else:
        lam_shift = AffineShift.var("Lambda")
        assignment.setdefault("Lambda", complex(lam_top))
    lam_val = lam_shift.evaluate(assignment)
    hbar = params.hbar
    dim = depth + 1

    def th(wv):
        return theta_reduced(wv, params)

    def lfn(i, j, z):
        def fn(lam):
            l12 = complex(lam[0]) - complex(lam[1])
            t_w = th(z)
            if abs(t_w) < POLE_GUARD:
                raise PoleError(f"theta(w) vanished at w = {z}")
            for dcheck, name in ((l12, "theta(lam)"), (l12 - hbar, "theta(lam-hbar)")):
                if abs(th(dcheck)) < POLE_GUARD:
                    raise PoleError(f"{name} vanished at lam_12 = {l12}")
            mat = np.zeros((dim, dim), dtype=complex)
            for kk in range(dim):
                lk = lam_val - kk
                if (i, j) == (1, 1):
                    den = th(l12 + (1 - kk) * hbar)
                    if abs(den) < POLE_GUARD:
                        raise PoleError("theta(lam + (1-k)hbar) vanished")
                    mat[kk, kk] = (th(z + lk * hbar) / t_w) * th(l12 + (lk + 1) * hbar) / den
                elif (i, j) == (1, 2) and kk < depth:
                    mat[kk + 1, kk] = (th(z + l12 + (lk - 1) * hbar) / t_w) \
                        * th(lk * hbar) * th(hbar) / (th(l12 - hbar) * th(l12))
                elif (i, j) == (2, 1) and kk > 0:
                    mat[kk - 1, kk] = -(th(z - l12 + (kk - 1) * hbar) / t_w) \
                        * th(kk * hbar) / th(hbar)
                elif (i, j) == (2, 2):
                    mat[kk, kk] = (th(z + kk * hbar) / t_w) \
                        * th(l12 - (kk + 1) * hbar) * th(l12 - kk * hbar) \
                        / (th(l12 - hbar) * th(l12))
            return mat

        return Dop(hbar, _eps_rep(j, 2), fn)

    wt_exact = tuple(Weight.make([lam_shift - kk, AffineShift.of(kk)]) for kk in range(dim))
    wt_rep = tuple(np.array([lam_val - kk, kk], dtype=complex) for kk in range(dim))
    return EModule(
        n=2, params=params,
        labels=tuple(f"v{kk}" for kk in range(dim)),
        wt_rep=wt_rep, wt_exact=wt_exact, anchor=wt_exact[0],
        assignment=assignment, lfn=lfn,
        desc=f"W(1,{lam_top})@depth{depth}",
    )


# -- small elliptic quantum group extraction ------------------------------------------


def small_e_extract(x: EModule, a, z_samples: Sequence[complex],
                    lam: Sequence[complex],
                    assignment: Mapping[str, complex] | None = None,
                    tol: float = 1e-9) -> tuple[dict[tuple[int, int], Dop], float]:
    """Extract z-independent generators t_{pq} from an evaluation module at a:

        [t_pq]_{b'b}(lam) = theta(z') / theta(z' + lam^{2}_q - lam^{1}_p)
                            * [L_qp(z)]_{b'b}(lam),

    z' = z + a*hbar, lam^{1} = lam, lam^{2} = lam + hbar*wt(b') in the
    representative coordinates.  Returns the operators and the max spread of
    the extraction across z_samples; spread above tol means the module is
    not an evaluation module at a.
    """
    n, params = x.n, x.params
    hbar = params.hbar
    aval = AffineShift.of(a).evaluate(assignment) if isinstance(a, (AffineShift, int, Fraction, str)) \
        else complex(a)
    lam = np.asarray(lam, dtype=complex)
    if len(z_samples) < 2:
        raise ValueError("need at least two z samples to certify z-independence")

    def extract_at(p: int, q: int, z: complex) -> np.ndarray:
        zp = z + aval * hbar
        m = x.L(q, p, z).eval(lam)
        out = np.zeros_like(m)
        for bp in range(x.dim):
            arg = zp + (lam[q - 1] + hbar * x.wt_rep[bp][q - 1]) - lam[p - 1]
            den = theta_reduced(arg, params)
            if abs(den) < POLE_GUARD:
                raise PoleError(f"extraction denominator vanished for t_{p}{q}")
            out[bp, :] = m[bp, :] * theta_reduced(zp, params) / den
        return out

    ops: dict[tuple[int, int], Dop] = {}
    spread = 0.0
    for p in range(1, n + 1):
        for q in range(1, n + 1):
            mats = [extract_at(p, q, z) for z in z_samples]
            base = mats[0]
            for m in mats[1:]:
                spread = max(spread, float(np.max(np.abs(m - base))))

            def fn(lv, p=p, q=q, z0=z_samples[0]):
                return extract_at_lam(x, p, q, z0, lv, aval)

            ops[(p, q)] = Dop(hbar, _eps_rep(p, n), fn)
    if spread > tol:
        raise PoleError(
            f"z-dependence {spread:.2e} detected: module is not an evaluation module at {a}")
    return ops, spread


def extract_at_lam(x: EModule, p: int, q: int, z: complex, lam: np.ndarray,
                   aval: complex) -> np.ndarray:
    params = x.params
    hbar = params.hbar
    lam = np.asarray(lam, dtype=complex)
    zp = z + aval * hbar
    m = x.L(q, p, z).eval(lam)
    out = np.zeros_like(m)
    for bp in range(x.dim):
        arg = zp + (lam[q - 1] + hbar * x.wt_rep[bp][q - 1]) - lam[p - 1]
        den = theta_reduced(arg, params)
        if abs(den) < POLE_GUARD:
            raise PoleError(f"extraction denominator vanished for t_{p}{q}")
        out[bp, :] = m[bp, :] * theta_reduced(zp, params) / den
    return out


def small_e_relation_residuals(x: EModule, ops: Mapping[tuple[int, int], Dop],
                               lam: Sequence[complex]) -> dict[str, float]:
    """Residuals of the defining exchange relations on the extracted t_{pq}.

    Checked as operator identities with the composition contract; the
    M_2-coefficients act as diagonal operators evaluated at
    (lam^{1}, lam^{2}) = (lam, lam + hbar*wt(row)).
    """
    n, params = x.n, x.params
    hbar = params.hbar
    lam = np.asarray(lam, dtype=complex)

    def th(v):
        return theta_reduced(v, params)

    def lam1(i, j, _row):
        return lam[i - 1] - lam[j - 1]

    def lam2(i, j, row):
        shifted = lam + hbar * x.wt_rep[row]
        return shifted[i - 1] - shifted[j - 1]

    def diag_rows(fn_of_row):
        return np.diag([fn_of_row(r) for r in range(x.dim)])

    out: dict[str, float] = {}

    # t_ij t_ik = t_ik t_ij
    worst = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                if j == k:
                    continue
                lhs = ops[(i, j)].compose(ops[(i, k)]).eval(lam)
                rhs = ops[(i, k)].compose(ops[(i, j)]).eval(lam)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    out["commuting_pairs"] = worst

    # t_ik t_jk = theta(lam1_ij - hbar)/theta(lam1_ij + hbar) t_jk t_ik
    worst = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            for k in range(1, n + 1):
                lhs = ops[(i, k)].compose(ops[(j, k)]).eval(lam)
                coeff = diag_rows(lambda r: th(lam1(i, j, r) - hbar) / th(lam1(i, j, r) + hbar))
                rhs = coeff @ ops[(j, k)].compose(ops[(i, k)]).eval(lam)
                worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    out["exchange"] = worst

    # four-term relation for i != k, j != l
    worst = 0.0
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(1, n + 1):
                for l in range(1, n + 1):
                    if i == k or j == l:
                        continue
                    c1 = diag_rows(lambda r: th(lam2(j, l, r) - hbar) / th(lam2(j, l, r)))
                    c2 = diag_rows(lambda r: th(lam1(i, k, r) - hbar) / th(lam1(i, k, r)))
                    c3 = diag_rows(
                        lambda r: th(lam1(i, k, r) + lam2(j, l, r)) * th(-hbar)
                        / (th(lam1(i, k, r)) * th(lam2(j, l, r))))
                    lhs = c1 @ ops[(i, j)].compose(ops[(k, l)]).eval(lam) \
                        - c2 @ ops[(k, l)].compose(ops[(i, j)]).eval(lam)
                    rhs = c3 @ ops[(i, l)].compose(ops[(k, j)]).eval(lam)
                    worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    out["four_term"] = worst
    return out
