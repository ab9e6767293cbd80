"""Pure states, random generators and the unitary evolution of prepared states."""
from dataclasses import dataclass

import numpy as np

from .exceptions import InvalidInputError, InvalidParameterError
from .linalg import check_hermitian, eig_hermitian, hermitize

DEFAULT_T_TOT = 300
RATE_NUMERATOR = 1.3


def make_rng(seed):
    """PCG64 stream; the same seed yields the same draws on every platform."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    return np.random.Generator(np.random.PCG64(int(seed)))


def _check_dim(d):
    if int(d) != d or d < 2:
        raise InvalidParameterError(f"dimension must be an integer >= 2, got {d}")
    return int(d)


def check_pure(psi, name="state"):
    psi = np.asarray(psi)
    if psi.ndim != 1 or psi.size < 2:
        raise InvalidInputError(f"{name} must be a vector of length >= 2, got shape {psi.shape}")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise InvalidInputError(f"{name} is not normalized")
    return psi


def haar_random_pure(d, rng):
    """Haar-distributed pure state: normalized vector of iid complex Gaussians."""
    d = _check_dim(d)
    rng = make_rng(rng)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_hermitian(d, rng):
    """GUE draw ``(A + A^dagger)/2`` rescaled to unit spectral norm."""
    d = _check_dim(d)
    rng = make_rng(rng)
    a = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    h = hermitize(a)
    return h / np.max(np.abs(np.linalg.eigvalsh(h)))


def pauli_z_general(d):
    """``diag(1, ..., 1, -(d-1)) / sqrt(d)``; for ``d = 3`` the qutrit Pauli Z."""
    d = _check_dim(d)
    diag = np.ones(d)
    diag[-1] = -(d - 1)
    return np.diag(diag / np.sqrt(d)).astype(complex)


def density_of(psi):
    """Projector ``|psi><psi|``."""
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class EvolutionSpec:
    """Stroboscopic evolution ``exp(-i * generator * rate * t)``.

    ``t`` counts measurement iterations; ``rate`` is in radians per iteration.
    """

    generator: np.ndarray
    rate: float
    total_iterations: int = DEFAULT_T_TOT

    def __post_init__(self):
        check_hermitian(self.generator, "generator")
        if self.total_iterations < 1:
            raise InvalidParameterError("total_iterations must be positive")

    @classmethod
    def default(cls, generator, total_iterations=DEFAULT_T_TOT):
        """Rate ``1.3 / total_iterations``: the state swings away and back once over a run."""
        return cls(np.asarray(generator, dtype=complex), RATE_NUMERATOR / total_iterations,
                   int(total_iterations))

    @property
    def dim(self):
        return self.generator.shape[0]

    def propagator(self, t):
        """Unitary taking the initial state to iteration ``t``."""
        values, vectors = eig_hermitian(self.generator)
        phases = np.exp(-1j * values * self.rate * t)
        return (vectors * phases) @ vectors.conj().T


def evolve(psi0, spec, t):
    """State at iteration ``t``; ``t = 0`` returns ``psi0`` unchanged."""
    psi0 = check_pure(psi0, "psi0")
    if psi0.size != spec.dim:
        raise InvalidInputError(f"state dim {psi0.size} != generator dim {spec.dim}")
    if t < 0 or t > spec.total_iterations:
        raise InvalidParameterError(f"t must lie in [0, {spec.total_iterations}], got {t}")
    if t == 0:
        return psi0.copy()
    psi = spec.propagator(t) @ psi0
    # unitary to ~1e-15; renormalize so the norm contract holds exactly
    return psi / np.linalg.norm(psi)
