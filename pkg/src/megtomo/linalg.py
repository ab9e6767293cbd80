"""Dense Hermitian kernel: eigendecomposition, exp/log, fidelity and purity.

Matrices are plain ``numpy.ndarray`` objects of complex dtype. Every routine
that promises a Hermitian result symmetrizes it explicitly, so the output is
Hermitian to machine precision regardless of roundoff in the products.
"""
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidInputError, InvalidParameterError

HERMITIAN_ATOL = 1e-12
DEFAULT_LOG_FLOOR = 1e-12

# exp(709.78) is the largest finite double
_EXP_LIMIT = 709.0


class EigenSystem(NamedTuple):
    """Eigenvalues in ascending order; column ``k`` of ``vectors`` pairs with ``values[k]``."""

    values: np.ndarray
    vectors: np.ndarray


def hermitize(a):
    """Return the Hermitian part ``(A + A^dagger) / 2``."""
    a = np.asarray(a)
    return 0.5 * (a + a.conj().T)


def is_hermitian(a, atol=HERMITIAN_ATOL):
    """Check Hermiticity with a tolerance scaled by the largest entry."""
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol * scale)


def check_hermitian(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] < 2:
        raise InvalidInputError(f"{name} must have dimension >= 2, got {a.shape[0]}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries")
    if not is_hermitian(a):
        raise InvalidInputError(f"{name} is not Hermitian")
    return a


def is_density_matrix(rho, atol=HERMITIAN_ATOL):
    """True when ``rho`` is Hermitian, unit-trace and positive semidefinite within ``atol``."""
    rho = np.asarray(rho)
    if not is_hermitian(rho, atol):
        return False
    if abs(np.trace(rho).real - 1.0) > atol or abs(np.trace(rho).imag) > atol:
        return False
    return bool(np.linalg.eigvalsh(hermitize(rho))[0] >= -atol)


def eig_hermitian(h):
    """Eigendecomposition of a Hermitian matrix.

    Eigenvalues come back ascending. Within a degenerate eigenspace the
    vectors are an arbitrary orthonormal basis.

    Raises:
        InvalidInputError: if ``h`` is not square and Hermitian.
    """
    h = check_hermitian(h, "H")
    try:
        values, vectors = np.linalg.eigh(hermitize(h))
    except np.linalg.LinAlgError as exc:
        raise InvalidInputError(f"eigendecomposition failed: {exc}") from exc
    return EigenSystem(values, vectors)


def _from_eigen(values, vectors):
    return hermitize((vectors * values) @ vectors.conj().T)


def exp_hermitian(h):
    """Matrix exponential of a Hermitian matrix via its eigenbasis.

    Raises:
        OverflowError: if an eigenvalue is too large for ``exp`` to stay finite.
            Callers should shift the spectrum first.
    """
    values, vectors = eig_hermitian(h)
    if values[-1] > _EXP_LIMIT:
        raise OverflowError(
            f"largest eigenvalue {values[-1]:.6g} overflows exp; shift the spectrum first"
        )
    return _from_eigen(np.exp(values), vectors)


def log_psd(rho, floor=DEFAULT_LOG_FLOOR):
    """Matrix logarithm of a positive semidefinite matrix.

    Eigenvalues below ``floor`` are raised to ``floor`` before the log so that
    rank-deficient estimates still have a finite logarithm.
    """
    if not floor > 0:
        raise InvalidParameterError(f"floor must be positive, got {floor}")
    values, vectors = eig_hermitian(rho)
    return _from_eigen(np.log(np.maximum(values, floor)), vectors)


def _clip_roundoff(values):
    # eigenvalues within roundoff of zero are zero; sqrt would amplify them to ~1e-8
    tol = 10 * values.size * np.finfo(float).eps * max(1.0, float(np.max(np.abs(values))))
    return np.where(values > tol, values, 0.0)


def sqrt_psd(a):
    """Principal square root; eigenvalues at roundoff level or below are set to zero."""
    values, vectors = eig_hermitian(a)
    return _from_eigen(np.sqrt(_clip_roundoff(values)), vectors)


def fidelity(rho, omega):
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) omega sqrt(rho)))**2``, clipped to ``[0, 1]``."""
    rho = np.asarray(rho)
    omega = np.asarray(omega)
    if rho.shape != omega.shape:
        raise InvalidInputError(f"dimension mismatch: {rho.shape} vs {omega.shape}")
    root = sqrt_psd(rho)
    inner = np.linalg.eigvalsh(hermitize(root @ omega @ root))
    f = float(np.sum(np.sqrt(_clip_roundoff(inner))) ** 2)
    return min(max(f, 0.0), 1.0)


def purity(rho):
    """``tr(rho^2)``."""
    rho = np.asarray(rho)
    # tr(A A) = sum_ij A_ij A_ji = sum_ij |A_ij|^2 for Hermitian A
    return float(np.sum(np.abs(rho) ** 2))
