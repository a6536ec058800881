"""Dense complex linear algebra for small Hermitian problems.

Everything here works on square ``complex128`` numpy arrays. The
eigensolver is a cyclic complex Jacobi iteration compiled with numba;
numpy's LAPACK bindings are deliberately not used on the library path so
that the test-suite can use them as an independent oracle.
"""

from __future__ import annotations

from typing import Callable, NamedTuple

import numba
import numpy as np

from .errors import DimensionMismatch, NoConvergence, NotHermitian, SingularOperator

MAX_SWEEPS = 100
OFFDIAG_RTOL = 1e-14
HERMITIAN_RTOL = 1e-10
POSITIVITY_FLOOR = 1e-12
SQRT_CLAMP = -1e-12


class HermitianEigen(NamedTuple):
    eigenvalues: np.ndarray  # real, ascending
    eigenvectors: np.ndarray  # columns orthonormal

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def as_matrix(M) -> np.ndarray:
    """Coerce ``M`` to a finite square complex128 array."""
    a = np.asarray(M, dtype=np.complex128)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DimensionMismatch(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def hermitize(M: np.ndarray) -> np.ndarray:
    return (M + M.conj().T) / 2


def hermiticity_defect(M: np.ndarray) -> float:
    """Relative Frobenius distance of ``M`` from its adjoint."""
    return float(np.linalg.norm(M - M.conj().T) / max(1.0, np.linalg.norm(M)))


def is_hermitian(M, rtol: float = HERMITIAN_RTOL) -> bool:
    return hermiticity_defect(as_matrix(M)) <= rtol


@numba.njit(cache=True)
def _jacobi(a, max_sweeps, rtol):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    fro = 0.0
    for i in range(n):
        for j in range(n):
            fro += a[i, j].real ** 2 + a[i, j].imag ** 2
    thresh = rtol * np.sqrt(fro)
    sweeps = 0
    converged = False
    while True:
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j].real ** 2 + a[i, j].imag ** 2
        if np.sqrt(off) <= thresh:
            converged = True
            break
        if sweeps >= max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                b = abs(apq)
                if b == 0.0:
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * b)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # G = diag(1, e^{-i phi}) . [[c, s], [-s, c]] on the (p, q) plane
                phc = np.conj(apq / b)
                gpp = c + 0j
                gpq = s + 0j
                gqp = -s * phc
                gqq = c * phc
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = akp * gpp + akq * gqp
                    a[k, q] = akp * gpq + akq * gqq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = np.conj(gpp) * apk + np.conj(gqp) * aqk
                    a[q, k] = np.conj(gpq) * apk + np.conj(gqq) * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = vkp * gpp + vkq * gqp
                    v[k, q] = vkp * gpq + vkq * gqq
    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i].real
    return w, v, converged


def hermitian_eig(M) -> HermitianEigen:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.

    The input is symmetrized as ``(M + M^dagger)/2`` before iterating, which
    absorbs rounding drift in products that are Hermitian only analytically.
    Eigenvalues are returned in ascending order.
    """
    a = as_matrix(M)
    defect = hermiticity_defect(a)
    if defect > HERMITIAN_RTOL:
        raise NotHermitian(f"relative hermiticity defect {defect:.3g} exceeds {HERMITIAN_RTOL:g}")
    w, v, converged = _jacobi(np.ascontiguousarray(hermitize(a)), MAX_SWEEPS, OFFDIAG_RTOL)
    if not converged:
        raise NoConvergence(f"Jacobi iteration did not converge in {MAX_SWEEPS} sweeps")
    order = np.argsort(w, kind="stable")
    return HermitianEigen(w[order], v[:, order])


def eigvalsh(M) -> np.ndarray:
    return hermitian_eig(M).eigenvalues


def _singular_guard(w: np.ndarray, name: str) -> None:
    if w[0] <= POSITIVITY_FLOOR:
        raise SingularOperator(
            f"{name}: eigenvalue {w[0]:.3g} is at or below the positivity floor {POSITIVITY_FLOOR:g}"
        )


def _clamp_psd(w: np.ndarray, name: str) -> np.ndarray:
    if w[0] < SQRT_CLAMP:
        raise SingularOperator(f"{name}: negative eigenvalue {w[0]:.3g}")
    return np.maximum(w, 0.0)


def _spectral_map(func: str, power: float | None) -> Callable[[np.ndarray], np.ndarray]:
    if func == "log":
        def f(w):
            _singular_guard(w, "log")
            return np.log(w)
    elif func == "inv":
        def f(w):
            _singular_guard(w, "inv")
            return 1.0 / w
    elif func == "sqrt":
        def f(w):
            return np.sqrt(_clamp_psd(w, "sqrt"))
    elif func == "exp":
        f = np.exp
    elif func == "pow":
        if power is None:
            raise ValueError("func='pow' needs a power")
        t = float(power)

        def f(w):
            if t < 0:
                _singular_guard(w, f"pow({t:g})")
                return w**t
            if t == 0:
                return np.ones_like(w)
            if t == int(t):
                return w**t
            return _clamp_psd(w, f"pow({t:g})") ** t
    else:
        raise ValueError(f"unknown matrix function {func!r}")
    return f


def matrix_fn(M, func: str, power: float | None = None) -> np.ndarray:
    """Apply ``func`` to a Hermitian matrix through its spectrum.

    ``func`` is one of ``"log"``, ``"sqrt"``, ``"inv"``, ``"exp"`` or
    ``"pow"`` (with ``power``). ``log``, ``inv`` and negative powers raise
    :class:`SingularOperator` when an eigenvalue is at or below 1e-12;
    ``sqrt`` clamps eigenvalues in ``[-1e-12, 0)`` to zero.
    """
    f = _spectral_map(func, power)
    eig = hermitian_eig(M)
    v = eig.eigenvectors
    return hermitize((v * f(eig.eigenvalues)) @ v.conj().T)


def logm(M) -> np.ndarray:
    return matrix_fn(M, "log")


def sqrtm(M) -> np.ndarray:
    return matrix_fn(M, "sqrt")


def invm(M) -> np.ndarray:
    return matrix_fn(M, "inv")


def expm(M) -> np.ndarray:
    return matrix_fn(M, "exp")


def powm(M, t: float) -> np.ndarray:
    return matrix_fn(M, "pow", t)


def kron(A, B) -> np.ndarray:
    return np.kron(as_matrix(A), as_matrix(B))


def partial_trace(M, d_a: int, d_b: int, keep: str = "A") -> np.ndarray:
    """Trace out one tensor factor of an operator on ``C^d_a (x) C^d_b``."""
    a = as_matrix(M)
    if a.shape[0] != d_a * d_b:
        raise DimensionMismatch(f"matrix of dim {a.shape[0]} is not {d_a}x{d_b}")
    t = a.reshape(d_a, d_b, d_a, d_b)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', not {keep!r}")


def singular_values(M) -> np.ndarray:
    """Singular values, descending.

    Hermitian and skew-Hermitian inputs use their own spectrum; anything
    else goes through the eigenvalues of ``M^dagger M``.
    """
    a = as_matrix(M)
    scale = np.linalg.norm(a)
    if np.linalg.norm(a - a.conj().T) <= OFFDIAG_RTOL * scale:
        s = np.abs(eigvalsh(a))
    elif np.linalg.norm(a + a.conj().T) <= OFFDIAG_RTOL * scale:
        s = np.abs(eigvalsh(1j * a))
    else:
        s = np.sqrt(np.maximum(eigvalsh(a.conj().T @ a), 0.0))
    return np.sort(s)[::-1]


def norm(M, which: str = "trace") -> float:
    """Schatten norm of ``M``: ``"trace"`` (1), ``"operator"`` (inf) or ``"frobenius"`` (2)."""
    if which == "frobenius":
        return float(np.linalg.norm(as_matrix(M)))
    s = singular_values(M)
    if which == "trace":
        return float(s.sum())
    if which == "operator":
        return float(s[0])
    raise ValueError(f"unknown norm {which!r}")


def commutator(A, B) -> np.ndarray:
    a, b = as_matrix(A), as_matrix(B)
    if a.shape != b.shape:
        raise DimensionMismatch(f"commutator of shapes {a.shape} and {b.shape}")
    return a @ b - b @ a


def kms_inner(A, B, rho) -> complex:
    """State-weighted inner product ``tr[A^dagger rho^{1/2} B rho^{1/2}]``."""
    a, b, r = as_matrix(A), as_matrix(B), as_matrix(rho)
    if not (a.shape == b.shape == r.shape):
        raise DimensionMismatch(f"shapes {a.shape}, {b.shape}, {r.shape} differ")
    rh = sqrtm(r)
    return complex(np.trace(a.conj().T @ rh @ b @ rh))
