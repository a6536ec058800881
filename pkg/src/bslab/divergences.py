"""Umegaki and Belavkin-Staszewski relative entropies (natural log, nats)."""

from __future__ import annotations

import math
import warnings

import numpy as np

from . import linalg as la
from .errors import ConditioningWarning, DimensionMismatch
from .states import BipartiteState, DensityMatrix, as_density, marginals

CONDITIONING_FLOOR = 1e-6


def _pair(rho, sigma) -> tuple[DensityMatrix, DensityMatrix]:
    r = as_density(rho, require_full_rank=True)
    s = as_density(sigma, require_full_rank=True)
    if r.dim != s.dim:
        raise DimensionMismatch(f"states of dims {r.dim} and {s.dim}")
    if s.min_eigenvalue < CONDITIONING_FLOOR:
        warnings.warn(
            f"reference state has minimum eigenvalue {s.min_eigenvalue:.3g}",
            ConditioningWarning,
            stacklevel=3,
        )
    return r, s


# phi(t) = t log t - t + 1 >= 0; below this |t - 1| its Taylor series is used
_SERIES_RADIUS = 0.25
_SERIES_COEF = np.array([(-1.0) ** k / (k * (k - 1)) for k in range(2, 32)])


def _phi(t: np.ndarray) -> np.ndarray:
    """``t log t - t + 1`` without cancellation near ``t = 1``."""
    t = np.asarray(t, dtype=float)
    u = t - 1.0
    out = np.empty_like(t)
    near = np.abs(u) < _SERIES_RADIUS
    un = u[near]
    acc = np.zeros_like(un)
    for c in _SERIES_COEF[::-1]:
        acc = acc * un + c
    out[near] = acc * un * un
    tf = t[~near]
    out[~near] = tf * np.log(tf) - tf + 1.0
    return out


def _trace_offset(a: np.ndarray, b: np.ndarray) -> float:
    """``sum(a) - sum(b)`` with a single rounding; floating-point states are
    only unit-trace to about one ulp, and that offset matters for tiny divergences."""
    return math.fsum(np.concatenate([a, -b]))


def umegaki(rho, sigma) -> float:
    """``tr[rho (log rho - log sigma)]`` for full-rank states.

    Evaluated as ``sum_ij |<r_i|s_j>|^2 s_j phi(r_i / s_j)`` over the two
    eigenbases. Every term is non-negative, so nearby states keep their
    relative accuracy instead of cancelling two O(1) traces. The
    remainder is ``tr rho - tr sigma``.
    """
    r, s = _pair(rho, sigma)
    p, u = la.hermitian_eig(r.matrix)
    q, v = la.hermitian_eig(s.matrix)
    overlap = np.abs(u.conj().T @ v) ** 2
    ratio = p[:, None] / q[None, :]
    return float(np.sum(overlap * q[None, :] * _phi(ratio))) + _trace_offset(p, q)


def bs_entropy(rho, sigma) -> float:
    """``tr[rho log(rho^{1/2} sigma^{-1} rho^{1/2})]`` for full-rank states.

    Equal to ``tr[sigma f(T)]`` with ``T = sigma^{-1/2} rho sigma^{-1/2}`` and
    ``f(t) = t log t``. With ``T = sum_k t_k |k><k|`` and weights
    ``w_k = <k|sigma|k>`` (which sum to one, as do ``w_k t_k``), this is
    ``sum_k w_k phi(t_k)``, a sum of non-negative terms, plus
    ``tr rho - tr sigma``.
    """
    r, s = _pair(rho, sigma)
    s_inv_half = la.powm(s.matrix, -0.5)
    t, vecs = la.hermitian_eig(la.hermitize(s_inv_half @ r.matrix @ s_inv_half))
    w = np.einsum("ik,ij,jk->k", vecs.conj(), s.matrix, vecs).real
    offset = _trace_offset(np.diagonal(r.matrix).real, np.diagonal(s.matrix).real)
    return float(np.sum(w * _phi(t))) + offset


def _conditional(div, s_rho: BipartiteState, s_sigma: BipartiteState, cond_on: str) -> float:
    if (s_rho.d_a, s_rho.d_b) != (s_sigma.d_a, s_sigma.d_b):
        raise DimensionMismatch("bipartitions differ")
    if cond_on not in ("A", "B"):
        raise ValueError(f"cond_on must be 'A' or 'B', not {cond_on!r}")
    rho_a, rho_b = marginals(s_rho)
    sigma_a, sigma_b = marginals(s_sigma)
    # conditioning on A subtracts the divergence of the B-marginals
    if cond_on == "A":
        return div(s_rho, s_sigma) - div(rho_b, sigma_b)
    return div(s_rho, s_sigma) - div(rho_a, sigma_a)


def conditional_umegaki(s_rho: BipartiteState, s_sigma: BipartiteState, cond_on: str = "A") -> float:
    return _conditional(umegaki, s_rho, s_sigma, cond_on)


def conditional_bs(s_rho: BipartiteState, s_sigma: BipartiteState, cond_on: str = "A") -> float:
    return _conditional(bs_entropy, s_rho, s_sigma, cond_on)
