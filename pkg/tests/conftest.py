import numpy as np
import pytest

from bslab import linalg as la
from bslab.states import (
    BipartiteState,
    sample_ginibre_density,
    sample_haar_unitary,
    validate_density,
)

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n, scale=1.0):
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (g + g.conj().T) / 2


def random_state(rng, d):
    return sample_ginibre_density(d, rng)


def random_bipartite(rng, d_a, d_b):
    return BipartiteState(sample_ginibre_density(d_a * d_b, rng), d_a, d_b)


def random_probs(rng, d, floor=0.0):
    p = rng.random(d) + floor
    return p / p.sum()


def commuting_pair(rng, d):
    """Two full-rank states diagonal in one Haar-random basis."""
    u = sample_haar_unitary(d, rng)
    p, q = random_probs(rng, d, 0.05), random_probs(rng, d, 0.05)
    rho = validate_density(la.hermitize((u * p) @ u.conj().T), True)
    sigma = validate_density(la.hermitize((u * q) @ u.conj().T), True)
    return rho, sigma, p, q


def commuting_with(rng, rho):
    """A full-rank state sharing ``rho``'s eigenbasis, with fresh eigenvalues."""
    v = np.linalg.eigh(np.asarray(rho))[1]
    q = random_probs(rng, v.shape[0], 0.2)
    return validate_density(la.hermitize((v * q) @ v.conj().T), True)


def scalar_kl(p, q):
    return float(np.sum(p * np.log(p / q)))
