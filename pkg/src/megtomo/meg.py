"""Matrix-exponentiated-gradient (MEG) online state estimation.

Each iteration supplies one measured basis together with its ``d``
outcome frequencies ``y``. The estimate is updated by

    rho <- exp(log(rho) - eta * grad) / tr(exp(log(rho) - eta * grad))

with ``grad = 2 * sum_i (tr(rho X_i) - y_i) X_i`` the gradient of the
squared loss ``sum_i (tr(rho X_i) - y_i)**2`` over the basis projectors
``X_i``. The update keeps the estimate a density matrix by construction.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exceptions import EstimatorStepError, InvalidInputError, InvalidParameterError
from .linalg import DEFAULT_LOG_FLOOR, EigenSystem, eig_hermitian, hermitize
from .measurements import MeasurementBasis
from .photons import CountRecord, measure_iteration
from .states import check_pure, make_rng

CONSTANT = "constant"
INVERSE_SQRT = "inverse_sqrt"
SCHEDULES = (CONSTANT, INVERSE_SQRT)

_TIE_TOL = 1e-9


@dataclass(frozen=True)
class MegConfig:
    """Learning rate and numerical knobs.

    ``schedule="inverse_sqrt"`` uses ``eta / sqrt(t)`` at update ``t``; the
    default constant rate is what tracking needs.
    """

    learning_rate: float = 5.0
    log_floor: float = DEFAULT_LOG_FLOOR
    dim: int = 3
    schedule: str = CONSTANT

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise InvalidParameterError(f"learning_rate must be positive, got {self.learning_rate}")
        if not self.log_floor > 0:
            raise InvalidParameterError(f"log_floor must be positive, got {self.log_floor}")
        if self.schedule not in SCHEDULES:
            raise InvalidParameterError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")

    def rate_at(self, t):
        if self.schedule == INVERSE_SQRT:
            return self.learning_rate / np.sqrt(t)
        return self.learning_rate


@dataclass(frozen=True, eq=False)
class EstimatorState:
    """Estimate after ``iteration`` updates.

    ``eigen`` optionally caches the eigensystem of ``estimate`` so that the
    next update and the pure projection avoid recomputing it.
    """

    estimate: np.ndarray
    iteration: int = 0
    eigen: Optional[EigenSystem] = field(default=None, repr=False)

    def eigensystem(self):
        if self.eigen is not None:
            return self.eigen
        return eig_hermitian(self.estimate)


def initial_state(d):
    """Maximally mixed ``I/d`` with its (trivial) eigensystem."""
    values = np.full(d, 1.0 / d)
    return EstimatorState(np.eye(d, dtype=complex) / d, 0, EigenSystem(values, np.eye(d, dtype=complex)))


def _vectors(basis):
    if isinstance(basis, MeasurementBasis):
        return basis.vectors
    v = np.asarray(basis)
    return v[:, None] if v.ndim == 1 else v


def _residual(rho, vectors, y):
    y = np.asarray(y, dtype=float)
    if rho.shape[0] != vectors.shape[0] or y.shape != (vectors.shape[1],):
        raise InvalidInputError(
            f"dimension mismatch: rho {rho.shape}, basis {vectors.shape}, y {y.shape}"
        )
    predicted = np.einsum("ki,kl,li->i", vectors.conj(), rho, vectors).real
    return predicted - y


def loss(rho, basis, y):
    """Squared error between predicted and measured outcome probabilities.

    ``basis`` may be a ``MeasurementBasis`` or an array whose columns are the
    measured states; a single column gives the one-outcome loss.
    """
    r = _residual(np.asarray(rho), _vectors(basis), y)
    return float(r @ r)


def gradient(rho, basis, y):
    """``2 sum_i (tr(rho X_i) - y_i) X_i`` as a Hermitian matrix."""
    vectors = _vectors(basis)
    r = _residual(np.asarray(rho), vectors, y)
    return hermitize(2.0 * (vectors * r) @ vectors.conj().T)


def meg_step(state, basis, y, cfg, shift=True):
    """One MEG update.

    The exponent is shifted by its largest eigenvalue before exponentiation;
    the shift cancels in the trace normalization and keeps ``exp`` finite.
    ``shift=False`` exists only to demonstrate that equivalence.

    Raises:
        EstimatorStepError: if an eigendecomposition fails or the result is
            not finite.
    """
    t = state.iteration + 1
    try:
        values, vectors = state.eigensystem()
        log_rho = (vectors * np.log(np.maximum(values, cfg.log_floor))) @ vectors.conj().T
        exponent = hermitize(log_rho - cfg.rate_at(t) * gradient(state.estimate, basis, y))
        g_values, g_vectors = np.linalg.eigh(exponent)
    except (np.linalg.LinAlgError, InvalidInputError) as exc:
        raise EstimatorStepError(str(exc), t) from exc
    if shift:
        g_values = g_values - g_values[-1]
    with np.errstate(over="ignore", invalid="ignore"):
        weights = np.exp(g_values)
        weights = weights / weights.sum()
    if not np.all(np.isfinite(weights)):
        raise EstimatorStepError("non-finite spectrum in update", t)
    estimate = hermitize((g_vectors * weights) @ g_vectors.conj().T)
    return EstimatorState(estimate, t, EigenSystem(weights, g_vectors))


def _canonical_phase(vec):
    idx = np.flatnonzero(np.abs(vec) > 1e-10)[0]
    return vec * (abs(vec[idx]) / vec[idx])


def pure_projection(rho, eigen=None):
    """Eigenvector of the largest eigenvalue, with a canonical global phase.

    If the top eigenvalue is degenerate, the first computational basis
    vector with a nonzero projection onto that eigenspace is projected and
    normalized. The first nonzero amplitude of the result is real positive.
    """
    values, vectors = eigen if eigen is not None else eig_hermitian(rho)
    top = values >= values[-1] - _TIE_TOL
    if top.sum() == 1:
        return _canonical_phase(vectors[:, -1])
    block = vectors[:, top]
    proj = block @ block.conj().T
    for i in range(proj.shape[0]):
        if np.linalg.norm(proj[:, i]) > 1e-8:
            vec = proj[:, i] / np.linalg.norm(proj[:, i])
            return _canonical_phase(vec)
    raise AssertionError("empty eigenspace")  # pragma: no cover


@dataclass(eq=False)
class TrackTrace:
    """Per-iteration record of one tracking run; row ``k`` is iteration ``k + 1``.

    ``p_pred`` are the computational-basis probabilities of the pure
    projection of the estimate, ``p_true`` those of the prepared state.
    """

    infidelity: np.ndarray
    purity: np.ndarray
    p_true: np.ndarray
    p_pred: np.ndarray
    basis_index: np.ndarray
    basis_labels: list
    counts: np.ndarray
    degenerate: np.ndarray
    seed: Optional[object] = None

    @property
    def iterations(self):
        return np.arange(1, len(self.infidelity) + 1)

    def __len__(self):
        return len(self.infidelity)

    def count_records(self):
        out = []
        for k, t in enumerate(self.iterations):
            c = self.counts[k]
            total = c.sum()
            probs = c / total if total > 0 else np.full(c.size, 1.0 / c.size)
            out.append(CountRecord(self.basis_labels[k], c, probs, bool(self.degenerate[k]), int(t)))
        return out


def track(psi0, evo, fam, noise, cfg, rng, t_tot=None):
    """Run online tomography against a (possibly evolving) prepared state.

    For ``t = 1 .. t_tot``: evolve the prepared state, draw a basis uniformly
    from ``fam``, simulate its counts, update the estimate, and record the
    infidelity between the pure projection and the prepared state.
    """
    psi0 = check_pure(psi0, "psi0")
    d = psi0.size
    if fam.dim != d or evo.dim != d:
        raise InvalidInputError(f"dimension mismatch: state {d}, family {fam.dim}, generator {evo.dim}")
    t_tot = evo.total_iterations if t_tot is None else t_tot
    rng = make_rng(rng)

    sigma_values, sigma_vectors = eig_hermitian(evo.generator)
    psi0_eig = sigma_vectors.conj().T @ psi0

    infid = np.empty(t_tot)
    pur = np.empty(t_tot)
    p_true = np.empty((t_tot, d))
    p_pred = np.empty((t_tot, d))
    basis_index = np.empty(t_tot, dtype=int)
    counts = np.empty((t_tot, d), dtype=np.int64)
    degenerate = np.zeros(t_tot, dtype=bool)
    labels = []

    state = initial_state(d)
    for k in range(t_tot):
        t = k + 1
        psi = sigma_vectors @ (np.exp(-1j * sigma_values * evo.rate * t) * psi0_eig)
        psi = psi / np.linalg.norm(psi)
        b = int(rng.integers(len(fam)))
        basis = fam[b]
        record = measure_iteration(psi, basis, noise, rng, iteration=t)
        state = meg_step(state, basis, record.probabilities, cfg)
        phi = pure_projection(state.estimate, state.eigen)

        infid[k] = pure_infidelity(phi, psi)
        pur[k] = float(np.sum(state.eigen.values ** 2))
        p_true[k] = np.abs(psi) ** 2
        p_pred[k] = np.abs(phi) ** 2
        basis_index[k] = b
        labels.append(basis.label)
        counts[k] = record.counts
        degenerate[k] = record.degenerate
    return TrackTrace(infid, pur, p_true, p_pred, basis_index, labels, counts, degenerate)


def estimate_from_records(records, fam, cfg, d=None):
    """Replay recorded ``CountRecord``s (e.g. experimental data) through MEG.

    Returns the list of estimator states after each record.
    """
    by_label = {b.label: b for b in fam.bases}
    state = initial_state(d or fam.dim)
    states = []
    for rec in records:
        try:
            basis = by_label[rec.basis_label]
        except KeyError:
            raise InvalidInputError(f"record basis {rec.basis_label!r} not in family") from None
        state = meg_step(state, basis, rec.probabilities, cfg)
        states.append(state)
    return states


def pure_infidelity(phi, psi):
    """``1 - |<phi|psi>|**2``; equals one minus the fidelity of the two projectors."""
    return 1.0 - min(abs(np.vdot(phi, psi)) ** 2, 1.0)

