"""The dynamical R-matrix and the quantum dynamical Yang-Baxter equation.

    R(z;lam) = sum_i E_ii(x)E_ii
             + sum_{i!=j} [ theta(z) theta(lam_ij - hbar)
                            / (theta(z + hbar) theta(lam_ij)) E_ii(x)E_jj
                          + theta(z + lam_ij) theta(hbar)
                            / (theta(z + hbar) theta(lam_ij)) E_ij(x)E_ji ].

Entries are indexed so that R(v_i (x) v_j) = sum_{p,q} R^{ij}_{pq} v_p (x) v_q.
The dynamical shift h^{(m)} substitutes lam -> lam + hbar*eps_{i_m} keyed on
the basis index of tensor leg m.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .theta import EllipticParams, theta_reduced

__all__ = ["PoleError", "RMatrixValue", "r_matrix", "dybe_residual", "POLE_GUARD"]

#: denominators with |theta| below this trip the pole guard
POLE_GUARD = 1e-8


class PoleError(ArithmeticError):
    """A theta denominator vanished at the sampled point."""


@dataclass(frozen=True)
class RMatrixValue:
    """Dense N^2 x N^2 value of R(z;lam) on the tensor-square basis."""

    n: int
    mat: np.ndarray

    def entry(self, p: int, q: int, i: int, j: int) -> complex:
        """R^{ij}_{pq}, all indices 1-based."""
        n = self.n
        return complex(self.mat[(p - 1) * n + (q - 1), (i - 1) * n + (j - 1)])


def r_matrix(n: int, z: complex, lam: Sequence[complex], params: EllipticParams) -> RMatrixValue:
    """Evaluate R(z;lam); raises PoleError naming any vanished denominator."""
    if len(lam) != n:
        raise ValueError(f"lambda must have {n} coordinates")
    th = lambda w: theta_reduced(w, params)
    hbar = params.hbar
    den_z = th(z + hbar)
    if abs(den_z) < POLE_GUARD:
        raise PoleError(f"theta(z + hbar) vanished at z = {z}")
    tz = th(z)
    thb = th(hbar)
    mat = np.zeros((n * n, n * n), dtype=complex)
    for i in range(n):
        mat[i * n + i, i * n + i] = 1.0
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            lam_ij = complex(lam[i]) - complex(lam[j])
            den_l = th(lam_ij)
            if abs(den_l) < POLE_GUARD:
                raise PoleError(f"theta(lambda_{i + 1}{j + 1}) vanished at {lam_ij}")
            alpha = tz * th(lam_ij - hbar) / (den_z * den_l)
            gamma = th(z + lam_ij) * thb / (den_z * den_l)
            # R(v_i (x) v_j) = alpha_ij v_i (x) v_j + ...; the exchange term
            # E_ij (x) E_ji sends v_j (x) v_i to v_i (x) v_j
            mat[i * n + j, i * n + j] = alpha
            mat[i * n + j, j * n + i] = gamma
    return RMatrixValue(n, mat)


def _embed_three(n: int, z: complex, lam: np.ndarray, params: EllipticParams,
                 legs: tuple[int, int], dyn_leg: int | None) -> np.ndarray:
    """R acting on two legs of a triple tensor, with the dynamical shift
    lam + hbar*eps_{index of dyn_leg} applied blockwise."""
    dim = n ** 3
    out = np.zeros((dim, dim), dtype=complex)
    spectator = ({0, 1, 2} - set(legs)).pop()
    cache: dict[int, RMatrixValue] = {}
    for s in range(n):
        if dyn_leg is None:
            key = -1
        else:
            key = s
        if key not in cache:
            lam_s = np.array(lam, dtype=complex)
            if dyn_leg is not None:
                lam_s[s] += params.hbar
            cache[key] = r_matrix(n, z, lam_s, params)
        R = cache[key].mat
        for i_in in range(n):
            for j_in in range(n):
                for p_out in range(n):
                    for q_out in range(n):
                        val = R[p_out * n + q_out, i_in * n + j_in]
                        if val == 0:
                            continue
                        src = [0, 0, 0]
                        dst = [0, 0, 0]
                        src[legs[0]], src[legs[1]], src[spectator] = i_in, j_in, s
                        dst[legs[0]], dst[legs[1]], dst[spectator] = p_out, q_out, s
                        out[(dst[0] * n + dst[1]) * n + dst[2],
                            (src[0] * n + src[1]) * n + src[2]] += val
    return out


def dybe_residual(n: int, z: complex, w: complex, lam: Sequence[complex],
                  params: EllipticParams) -> float:
    """Max-norm residual of the quantum dynamical Yang-Baxter equation

    R12(z-w; lam+h3) R13(z; lam) R23(w; lam+h1)
      = R23(w; lam) R13(z; lam+h2) R12(z-w; lam).
    """
    lam = np.array(lam, dtype=complex)
    r12_d3 = _embed_three(n, z - w, lam, params, (0, 1), dyn_leg=2)
    r13 = _embed_three(n, z, lam, params, (0, 2), dyn_leg=None)
    r23_d1 = _embed_three(n, w, lam, params, (1, 2), dyn_leg=0)
    lhs = r12_d3 @ r13 @ r23_d1
    r23 = _embed_three(n, w, lam, params, (1, 2), dyn_leg=None)
    r13_d2 = _embed_three(n, z, lam, params, (0, 2), dyn_leg=1)
    r12 = _embed_three(n, z - w, lam, params, (0, 1), dyn_leg=None)
    rhs = r23 @ r13_d2 @ r12
    return float(np.max(np.abs(lhs - rhs)))
