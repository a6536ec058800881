"""Weak quasi-factorization bounds for the BS-entropy on bipartite states.

Two upper bounds on ``D_BS(rho_AB || sigma_AB)`` in terms of the conditional
BS-entropies are evaluated here, together with the Umegaki analogue that
uses the same multiplicative factor ``1/(1 - 2||H(sigma)||)``:

* T1: factor ``M = 1/(1 - 2 sigma_min^-2 ||sigma - sigma_A x sigma_B|| / (d_A d_B))``
  and additive term ``L = M (<sigma_A x sigma_B, sigma_A^-1 x sigma_B^-1>_{rho_A x rho_B} - 1)``.
* T2: factor ``1/(1 - 2||H||)`` and an additive term built from how far
  ``eta_A``, ``eta_B`` are from the marginals of ``rho``.

Every intermediate inequality used to derive them is exposed through
:func:`step_diagnostics` so it can be checked numerically.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import linalg as la
from .divergences import bs_entropy, umegaki
from .errors import DimensionMismatch, NotApplicable, NotHermitian
from .states import BipartiteState, as_density, marginals

THEOREMS = ("T1", "T2", "Umegaki")
ILL_CONDITIONED_SIGMA_MIN = 1e-6
SLACK = 1e-9
# distances below RESOLUTION * d_A d_B * eps (scaled by ||sigma|| or cond(sigma))
# are rounding noise from the partial traces and are reported as exact zeros
RESOLUTION = 4.0
_EPS = float(np.finfo(float).eps)


class _Pair:
    """Marginals and spectral functions shared by the bound computations."""

    def __init__(self, s_rho: BipartiteState, s_sigma: BipartiteState):
        if (s_rho.d_a, s_rho.d_b) != (s_sigma.d_a, s_sigma.d_b):
            raise DimensionMismatch("bipartitions differ")
        as_density(s_rho, require_full_rank=True)
        as_density(s_sigma, require_full_rank=True)
        self.s_rho, self.s_sigma = s_rho, s_sigma
        self.d_a, self.d_b = s_rho.d_a, s_rho.d_b
        self.rho = s_rho.matrix
        self.sigma = s_sigma.matrix
        self.rho_a, self.rho_b = marginals(s_rho)
        self.sigma_a, self.sigma_b = marginals(s_sigma)

    @cached_property
    def sigma_min(self) -> float:
        return float(la.eigvalsh(self.sigma)[0])

    @cached_property
    def sigma_prod(self) -> np.ndarray:
        return np.kron(self.sigma_a.matrix, self.sigma_b.matrix)

    @property
    def noise_floor(self) -> float:
        return RESOLUTION * self.d_a * self.d_b * _EPS

    @cached_property
    def op_distance(self) -> float:
        dist = la.norm(la.hermitize(self.sigma - self.sigma_prod), "operator")
        return 0.0 if dist <= self.noise_floor else dist

    @cached_property
    def h(self) -> np.ndarray:
        return h_operator(self.s_sigma)

    @cached_property
    def h_norm(self) -> float:
        value = la.norm(self.h, "operator")
        return 0.0 if value <= self.noise_floor / self.sigma_min else value

    @cached_property
    def eta_a(self) -> np.ndarray:
        return eta_operator(self.rho_a, self.sigma_a)

    @cached_property
    def eta_b(self) -> np.ndarray:
        return eta_operator(self.rho_b, self.sigma_b)

    @cached_property
    def eta_a_dist(self) -> float:
        return la.norm(la.hermitize(self.eta_a - self.rho_a.matrix), "trace")

    @cached_property
    def eta_b_dist(self) -> float:
        return la.norm(la.hermitize(self.eta_b - self.rho_b.matrix), "trace")

    @cached_property
    def kms_product(self) -> float:
        """``<sigma_A x sigma_B, sigma_A^-1 x sigma_B^-1>_{rho_A x rho_B}``."""
        inv = np.kron(la.invm(self.sigma_a.matrix), la.invm(self.sigma_b.matrix))
        w = np.kron(self.rho_a.matrix, self.rho_b.matrix)
        return la.kms_inner(self.sigma_prod, inv, w).real

    @cached_property
    def bs(self) -> tuple[float, float, float]:
        """(global, marginal A, marginal B) BS-entropies."""
        return (
            bs_entropy(self.s_rho, self.s_sigma),
            bs_entropy(self.rho_a, self.sigma_a),
            bs_entropy(self.rho_b, self.sigma_b),
        )

    @cached_property
    def umegaki(self) -> tuple[float, float, float]:
        return (
            umegaki(self.s_rho, self.s_sigma),
            umegaki(self.rho_a, self.sigma_a),
            umegaki(self.rho_b, self.sigma_b),
        )


def eta_operator(rho, sigma) -> np.ndarray:
    """``sigma^{1/2} rho^{1/2} sigma^{-1} rho^{1/2} sigma^{1/2}`` (Hermitized)."""
    r, s = as_density(rho, True), as_density(sigma, True)
    rh, sh = la.sqrtm(r.matrix), la.sqrtm(s.matrix)
    return la.hermitize(sh @ rh @ la.invm(s.matrix) @ rh @ sh)


def h_operator(s_sigma: BipartiteState) -> np.ndarray:
    """``(sigma_A^-1/2 x sigma_B^-1/2) sigma_AB (sigma_A^-1/2 x sigma_B^-1/2) - 1``."""
    as_density(s_sigma, require_full_rank=True)
    sigma_a, sigma_b = marginals(s_sigma)
    k = np.kron(la.powm(sigma_a.matrix, -0.5), la.powm(sigma_b.matrix, -0.5))
    return la.hermitize(k @ s_sigma.matrix @ k - np.eye(s_sigma.state.dim))


class Theorem1Factors(NamedTuple):
    multiplicative: float
    additive: float
    applicable: bool
    hypothesis: float  # ||sigma - sigma_A x sigma_B||_inf * sigma_min^-2
    sigma_min: float


class Theorem2Factors(NamedTuple):
    multiplicative: float
    additive: float
    eta_a: np.ndarray
    eta_b: np.ndarray
    applicable: bool
    h_norm: float


def _theorem1(p: _Pair) -> Theorem1Factors:
    dd = p.d_a * p.d_b
    hyp = p.op_distance / p.sigma_min**2
    if not hyp < dd / 2:
        raise NotApplicable("T1", hyp, dd / 2)
    m = 1.0 / (1.0 - 2.0 * hyp / dd)
    return Theorem1Factors(m, m * (p.kms_product - 1.0), True, hyp, p.sigma_min)


def _theorem2(p: _Pair) -> Theorem2Factors:
    h = p.h_norm
    if not h < 0.5:
        raise NotApplicable("T2", h, 0.5)
    na, nb = p.eta_a_dist, p.eta_b_dist
    add = (1 + 2 * h) / (1 - 2 * h) * (na * nb + na + nb)
    return Theorem2Factors(1.0 / (1.0 - 2.0 * h), add, p.eta_a, p.eta_b, True, h)


def theorem1_factors(s_rho: BipartiteState, s_sigma: BipartiteState) -> Theorem1Factors:
    """Multiplicative and additive factors of the first bound.

    Raises :class:`NotApplicable` unless
    ``||sigma - sigma_A x sigma_B||_inf * sigma_min^-2 < d_A d_B / 2``.
    """
    return _theorem1(_Pair(s_rho, s_sigma))


def theorem2_factors(s_rho: BipartiteState, s_sigma: BipartiteState) -> Theorem2Factors:
    """Factors of the second bound; needs ``||H(sigma)||_inf < 1/2``."""
    return _theorem2(_Pair(s_rho, s_sigma))


@dataclass(frozen=True)
class QFReport:
    theorem: str
    applicable: bool
    multiplicative: float
    additive: float
    lhs: float
    rhs: float
    gap: float
    h_norm: float
    sigma_min: float
    cond_a: float
    cond_b: float
    ill_conditioned: bool

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(self).items()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> QFReport:
        return cls(**{k: (math.nan if v is None else v) for k, v in doc.items()})


def _report(p: _Pair, theorem: str) -> QFReport:
    if theorem not in THEOREMS:
        raise ValueError(f"theorem must be one of {THEOREMS}, not {theorem!r}")
    glob, marg_a, marg_b = p.umegaki if theorem == "Umegaki" else p.bs
    # conditional in A subtracts the B-marginal divergence and vice versa
    cond_a, cond_b = glob - marg_b, glob - marg_a
    try:
        if theorem == "T1":
            mult, add = _theorem1(p)[:2]
        elif theorem == "T2":
            mult, add = _theorem2(p)[:2]
        else:
            if not p.h_norm < 0.5:
                raise NotApplicable("Umegaki", p.h_norm, 0.5)
            mult, add = 1.0 / (1.0 - 2.0 * p.h_norm), 0.0
        applicable = True
        rhs = mult * (cond_a + cond_b) + add
    except NotApplicable:
        applicable = False
        mult = add = rhs = math.nan
    return QFReport(
        theorem=theorem,
        applicable=applicable,
        multiplicative=mult,
        additive=add,
        lhs=glob,
        rhs=rhs,
        gap=rhs - glob,
        h_norm=p.h_norm,
        sigma_min=p.sigma_min,
        cond_a=cond_a,
        cond_b=cond_b,
        ill_conditioned=p.sigma_min < ILL_CONDITIONED_SIGMA_MIN,
    )


def evaluate_qf(s_rho: BipartiteState, s_sigma: BipartiteState, theorem: str = "T1") -> QFReport:
    """Evaluate one quasi-factorization bound.

    A report is returned even when the theorem's hypothesis fails; then
    ``applicable`` is False and the factors, ``rhs`` and ``gap`` are NaN
    while ``lhs`` and the conditionals keep their values.
    """
    return _report(_Pair(s_rho, s_sigma), theorem)


def evaluate_all(s_rho: BipartiteState, s_sigma: BipartiteState) -> dict[str, QFReport]:
    """All three reports, sharing the spectral work."""
    p = _Pair(s_rho, s_sigma)
    return {t: _report(p, t) for t in THEOREMS}


def superadditivity_gap(s_rho: BipartiteState, sigma_a, sigma_b) -> float:
    """``D_BS(rho_AB || sigma_A x sigma_B) - D_BS(rho_A || sigma_A) - D_BS(rho_B || sigma_B)``.

    Negative values are counterexamples to superadditivity.
    """
    sa, sb = as_density(sigma_a, True), as_density(sigma_b, True)
    if (sa.dim, sb.dim) != (s_rho.d_a, s_rho.d_b):
        raise DimensionMismatch("reference marginals do not match the bipartition")
    rho_a, rho_b = marginals(s_rho)
    joint = bs_entropy(s_rho, np.kron(sa.matrix, sb.matrix))
    return joint - bs_entropy(rho_a, sa) - bs_entropy(rho_b, sb)


@dataclass(frozen=True)
class StepDiagnostics:
    """Intermediate quantities behind both bounds.

    The chain runs
    ``bs_gap <= neg_rel_omega <= log_tr_omega <= step1_rhs <= step2_rhs``
    with ``step2_rhs = z_ab + x_a*x_b - 1``. The cross term ``z_ab`` is then
    bounded by ``step3_rhs``, and ``step2_rhs`` as a whole by ``step3bis_rhs``.
    """

    bs_global: float
    bs_gap: float
    neg_rel_omega: float
    log_tr_omega: float
    step1_rhs: float
    x_a: float
    x_b: float
    y_ab: float
    z_ab: float
    step2_rhs: float
    p_a_norm: float
    p_b_norm: float
    trace_dist_a: float
    trace_dist_b: float
    sigma_a_inv_norm: float
    sigma_b_inv_norm: float
    op_distance: float
    sigma_min: float
    d_a: int
    d_b: int
    step3_rhs: float
    h_norm: float
    eta_a_dist: float
    eta_b_dist: float
    step3bis_rhs: float

    def checks(self, tol: float = SLACK) -> dict[str, bool]:
        """Each proof inequality, keyed by name, evaluated with slack ``tol``."""
        return {
            "step1_re_bs": self.bs_gap <= self.neg_rel_omega + tol,
            "step1_normalization": self.neg_rel_omega <= self.log_tr_omega + tol,
            "step1_golden_thompson": self.log_tr_omega <= self.step1_rhs + tol,
            "step2_log_bound": self.step1_rhs <= self.step2_rhs + tol,
            "step2_identity": abs(
                (self.y_ab + self.x_a + self.x_b - 2) - (self.z_ab + self.x_a * self.x_b - 1)
            ) <= tol,
            "step3_holder": self.z_ab <= self.op_distance * self.p_a_norm * self.p_b_norm + tol,
            "step3_similarity_a": self.p_a_norm <= self.sigma_a_inv_norm * self.trace_dist_a + tol,
            "step3_similarity_b": self.p_b_norm <= self.sigma_b_inv_norm * self.trace_dist_b + tol,
            "step3_marginal_inverse_a": self.sigma_a_inv_norm
            <= 1.0 / (self.sigma_min * self.d_b) * (1 + tol),
            "step3_marginal_inverse_b": self.sigma_b_inv_norm
            <= 1.0 / (self.sigma_min * self.d_a) * (1 + tol),
            "step3": self.z_ab <= self.step3_rhs + tol,
            "step3bis": self.step2_rhs <= self.step3bis_rhs + tol,
        }

    def to_dict(self) -> dict:
        return asdict(self)


def step_diagnostics(s_rho: BipartiteState, s_sigma: BipartiteState) -> StepDiagnostics:
    p = _Pair(s_rho, s_sigma)
    ra, rb = p.rho_a.matrix, p.rho_b.matrix
    sa, sb = p.sigma_a.matrix, p.sigma_b.matrix
    bs_glob, bs_a, bs_b = p.bs
    bs_gap = bs_a + bs_b - bs_glob

    rh_a, rh_b = la.sqrtm(ra), la.sqrtm(rb)
    sa_inv, sb_inv = la.invm(sa), la.invm(sb)
    rh_ab = np.kron(rh_a, rh_b)
    q = la.hermitize(rh_ab @ np.kron(sa_inv, sb_inv) @ rh_ab)
    log_omega = la.logm(p.sigma) + la.logm(q)
    neg_rel_omega = float(np.trace(p.rho @ (log_omega - la.logm(p.rho))).real)
    log_tr_omega = math.log(np.trace(la.expm(la.hermitize(log_omega))).real)
    step1_rhs = math.log(np.trace(p.sigma @ q).real)

    x_a = float(np.trace(sa @ rh_a @ sa_inv @ rh_a).real)
    x_b = float(np.trace(sb @ rh_b @ sb_inv @ rh_b).real)
    p_a = la.hermitize(rh_a @ (sa_inv - la.invm(ra)) @ rh_a)
    p_b = la.hermitize(rh_b @ (sb_inv - la.invm(rb)) @ rh_b)
    pp = np.kron(p_a, p_b)
    y_ab = float(np.trace(p.sigma @ pp).real)
    z_ab = float(np.trace((p.sigma - p.sigma_prod) @ pp).real)

    dd = p.d_a * p.d_b
    step3_rhs = 2.0 / (p.sigma_min**2 * dd) * p.op_distance * bs_glob
    h = p.h_norm
    na, nb = p.eta_a_dist, p.eta_b_dist
    step3bis_rhs = 2 * h * bs_glob + (1 + 2 * h) * (na + nb + na * nb)

    return StepDiagnostics(
        bs_global=bs_glob,
        bs_gap=bs_gap,
        neg_rel_omega=neg_rel_omega,
        log_tr_omega=log_tr_omega,
        step1_rhs=step1_rhs,
        x_a=x_a,
        x_b=x_b,
        y_ab=y_ab,
        z_ab=z_ab,
        step2_rhs=z_ab + x_a * x_b - 1,
        p_a_norm=la.norm(p_a, "trace"),
        p_b_norm=la.norm(p_b, "trace"),
        trace_dist_a=la.norm(la.hermitize(ra - sa), "trace"),
        trace_dist_b=la.norm(la.hermitize(rb - sb), "trace"),
        sigma_a_inv_norm=la.norm(sa_inv, "operator"),
        sigma_b_inv_norm=la.norm(sb_inv, "operator"),
        op_distance=p.op_distance,
        sigma_min=p.sigma_min,
        d_a=p.d_a,
        d_b=p.d_b,
        step3_rhs=step3_rhs,
        h_norm=h,
        eta_a_dist=na,
        eta_b_dist=nb,
        step3bis_rhs=step3bis_rhs,
    )


def golden_thompson_check(x, y) -> tuple[float, float]:
    """``(tr e^{X+Y}, tr e^X e^Y)`` for Hermitian ``X``, ``Y``."""
    a, b = la.as_matrix(x), la.as_matrix(y)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape}")
    for m in (a, b):
        if not la.is_hermitian(m):
            raise NotHermitian("Golden-Thompson needs Hermitian arguments")
    a, b = la.hermitize(a), la.hermitize(b)
    lhs = np.trace(la.expm(a + b)).real
    rhs = np.trace(la.expm(a) @ la.expm(b)).real
    return float(lhs), float(rhs)


class RemarkBound(NamedTuple):
    eta_dist: float  # ||eta - rho||_1
    normality_defect: float  # ||X X* - X* X||_inf, X = rho^{1/2} sigma^{-1/2}
    commutator_norm: float  # ||[rho^{1/2}, sigma^{-1/2}]||_inf
    commutator_bound: float  # c^2 + 2c


def remark_bound(rho, sigma) -> RemarkBound:
    """How far ``rho^{1/2} sigma^{-1/2}`` is from normal, three ways."""
    r, s = as_density(rho, True), as_density(sigma, True)
    rh = la.sqrtm(r.matrix)
    s_isqrt = la.powm(s.matrix, -0.5)
    eta_dist = la.norm(la.hermitize(eta_operator(r, s) - r.matrix), "trace")
    x = rh @ s_isqrt
    defect = la.norm(la.hermitize(x @ x.conj().T - x.conj().T @ x), "operator")
    # [rho^{1/2}, sigma^{-1/2}] is skew-Hermitian; i times it is Hermitian
    c = la.commutator(rh, s_isqrt)
    c_norm = float(np.max(np.abs(la.eigvalsh(la.hermitize(1j * c)))))
    return RemarkBound(eta_dist, defect, c_norm, c_norm**2 + 2 * c_norm)
