"""Density matrices: validation, bipartite structure, sampling and JSON I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import linalg as la
from .errors import DimensionMismatch, NotFullRank, NotHermitian, NotPositive, TraceNotOne

STATE_TOL = 1e-10
FULL_RANK_FLOOR = 1e-8
MAX_RESAMPLES = 100


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated quantum state. Build through :func:`validate_density`."""

    matrix: np.ndarray = field(repr=False)
    min_eigenvalue: float

    def __post_init__(self):
        self.matrix.setflags(write=False)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def full_rank(self) -> bool:
        return self.min_eigenvalue > FULL_RANK_FLOOR


@dataclass(frozen=True, eq=False)
class BipartiteState:
    state: DensityMatrix
    d_a: int
    d_b: int

    def __post_init__(self):
        if self.d_a < 1 or self.d_b < 1 or self.state.dim != self.d_a * self.d_b:
            raise DimensionMismatch(
                f"state of dim {self.state.dim} cannot be split as {self.d_a}x{self.d_b}"
            )

    def __array__(self, dtype=None, copy=None):
        return self.state.__array__(dtype)

    @property
    def matrix(self) -> np.ndarray:
        return self.state.matrix

    def full_rank(self) -> bool:
        return self.state.full_rank()


def validate_density(M, require_full_rank: bool = False) -> DensityMatrix:
    """Check that ``M`` is a density matrix and wrap it.

    The matrix is stored exactly as given (no re-symmetrization), so
    serialization round-trips stay bit-faithful.
    """
    a = la.as_matrix(M).copy()
    defect = la.hermiticity_defect(a)
    if defect > STATE_TOL:
        raise NotHermitian(f"hermiticity defect {defect:.3g}")
    tr = np.trace(a).real
    if abs(tr - 1.0) > STATE_TOL:
        raise TraceNotOne(f"trace is {tr!r}")
    lam_min = float(la.eigvalsh(a)[0])
    if lam_min < -STATE_TOL:
        raise NotPositive(f"minimum eigenvalue {lam_min:.3g}")
    rho = DensityMatrix(a, lam_min)
    if require_full_rank and not rho.full_rank():
        raise NotFullRank(f"minimum eigenvalue {lam_min:.3g} <= {FULL_RANK_FLOOR:g}")
    return rho


def as_density(x, require_full_rank: bool = False) -> DensityMatrix:
    """Pass DensityMatrix/BipartiteState through, validate anything else."""
    if isinstance(x, BipartiteState):
        x = x.state
    if isinstance(x, DensityMatrix):
        if require_full_rank and not x.full_rank():
            raise NotFullRank(f"minimum eigenvalue {x.min_eigenvalue:.3g} <= {FULL_RANK_FLOOR:g}")
        return x
    return validate_density(x, require_full_rank)


def bipartite(M, d_a: int, d_b: int, require_full_rank: bool = False) -> BipartiteState:
    return BipartiteState(as_density(M, require_full_rank), d_a, d_b)


def maximally_mixed(d: int) -> DensityMatrix:
    return validate_density(np.eye(d) / d)


# -- sampling ---------------------------------------------------------------


def sample_rng(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 stream for sample ``index`` of run ``seed``.

    Streams are keyed by ``SeedSequence(seed, spawn_key=(index,))`` so any
    sample can be regenerated on its own, in any order or process.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex Gaussians by Box-Muller (real and imaginary parts N(0, 1))."""
    u1 = 1.0 - rng.random(shape)  # (0, 1]
    u2 = rng.random(shape)
    return np.sqrt(-2.0 * np.log(u1)) * np.exp(2j * np.pi * u2)


def sample_ginibre_density(d: int, rng: np.random.Generator) -> DensityMatrix:
    """Hilbert-Schmidt random state ``G G^dagger / tr(G G^dagger)``.

    Draws whose smallest eigenvalue is at or below the full-rank floor are
    rejected, up to 100 attempts.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    for _ in range(MAX_RESAMPLES):
        g = complex_gaussian(rng, (d, d))
        w = g @ g.conj().T
        w = la.hermitize(w / np.trace(w).real)
        lam_min = float(la.eigvalsh(w)[0])
        if lam_min > FULL_RANK_FLOOR:
            return DensityMatrix(w, lam_min)
    raise NotFullRank(f"no full-rank sample in {MAX_RESAMPLES} draws at d={d}")


def sample_haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR factorization of a Ginibre matrix."""
    q, r = np.linalg.qr(complex_gaussian(rng, (d, d)))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def sample_bipartite(d_a: int, d_b: int, rng: np.random.Generator) -> BipartiteState:
    return BipartiteState(sample_ginibre_density(d_a * d_b, rng), d_a, d_b)


def perturbed_product(eta_a, eta_b, lam_ab, epsilon: float) -> BipartiteState:
    """``(eta_a (x) eta_b + epsilon*lam_ab) / tr[...]`` as a bipartite state."""
    ea, eb, lam = as_density(eta_a), as_density(eta_b), as_density(lam_ab)
    if lam.dim != ea.dim * eb.dim:
        raise DimensionMismatch(f"perturbation of dim {lam.dim} vs {ea.dim}x{eb.dim}")
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    num = np.kron(ea.matrix, eb.matrix) + epsilon * lam.matrix
    num = la.hermitize(num / np.trace(num).real)
    return BipartiteState(validate_density(num), ea.dim, eb.dim)


def marginals(s: BipartiteState) -> tuple[DensityMatrix, DensityMatrix]:
    """(tr_B, tr_A) of a bipartite state, each validated."""
    m = s.matrix
    rho_a = la.hermitize(la.partial_trace(m, s.d_a, s.d_b, keep="A"))
    rho_b = la.hermitize(la.partial_trace(m, s.d_a, s.d_b, keep="B"))
    return validate_density(rho_a), validate_density(rho_b)


def product_state(rho_a, rho_b) -> BipartiteState:
    a, b = as_density(rho_a), as_density(rho_b)
    return BipartiteState(validate_density(np.kron(a.matrix, b.matrix)), a.dim, b.dim)


def werner_state(p: float) -> BipartiteState:
    """Two-qubit Werner state ``p*Phi + (1-p)*1/4``."""
    phi = np.zeros(4, dtype=complex)
    phi[0] = phi[3] = 1 / np.sqrt(2)
    m = p * np.outer(phi, phi.conj()) + (1 - p) * np.eye(4) / 4
    return BipartiteState(validate_density(m), 2, 2)


# -- JSON -------------------------------------------------------------------


def state_to_dict(s: BipartiteState) -> dict:
    m = s.matrix
    return {"d_a": s.d_a, "d_b": s.d_b, "re": m.real.tolist(), "im": m.imag.tolist()}


def state_from_dict(doc: dict, require_full_rank: bool = False) -> BipartiteState:
    try:
        d_a, d_b = int(doc["d_a"]), int(doc["d_b"])
        re = np.array(doc["re"], dtype=float)
        im = np.array(doc["im"], dtype=float)
        m = np.empty(re.shape, dtype=complex)
        m.real, m.imag = re, im
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed state document: {exc}") from exc
    return BipartiteState(validate_density(m, require_full_rank), d_a, d_b)


def save_state(s: BipartiteState, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(s)))


def load_state(path, require_full_rank: bool = False) -> BipartiteState:
    return state_from_dict(json.loads(Path(path).read_text()), require_full_rank)
