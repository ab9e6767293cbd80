"""Prepare-and-measure photon counting simulator.

One iteration measures every state of a chosen basis in turn, one
projective setting at a time, with a single detector. Each setting records
Poissonian counts whose mean is the signal share ``N |<psi_i|psi>|**2`` plus
the dark, background and extra (light bulb) offsets. The measurement window
is one second, so rates in Hz and counts per setting coincide.
"""
import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidInputError, InvalidParameterError
from .states import make_rng

SNR_EPS = 1e-12


def snr(signal, noise):
    """``signal / noise``; a vanishing noise rate is capped at ``SNR_EPS``."""
    return signal / max(noise, SNR_EPS)


@dataclass(frozen=True)
class NoiseConfig:
    """Expected counts per measurement window.

    ``subtract_offsets`` switches on known-offset subtraction: the expected
    dark + background + extra counts are removed from each setting's counts
    (clipped at zero) before normalization. It is off by default.
    """

    signal_rate: float = 1e6
    dark_rate: float = 100.0
    background_rate: float = 50.0
    extra_background_rate: float = 0.0
    subtract_offsets: bool = False

    def __post_init__(self):
        for name in ("signal_rate", "dark_rate", "background_rate", "extra_background_rate"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise InvalidParameterError(f"{name} must be finite and >= 0, got {value}")

    @property
    def offset(self):
        return self.dark_rate + self.background_rate + self.extra_background_rate

    def snr(self):
        return snr(self.signal_rate, self.offset)

    @classmethod
    def noiseless(cls, signal_rate=1e6):
        return cls(signal_rate, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class CountRecord:
    basis_label: str
    counts: np.ndarray
    probabilities: np.ndarray
    degenerate: bool = False
    iteration: int = field(default=0, compare=False)


def expected_counts(psi, basis, noise):
    """Mean counts for each of the ``d`` settings of ``basis``."""
    psi = np.asarray(psi)
    if psi.shape != (basis.dim,):
        raise InvalidInputError(f"state dim {psi.shape} does not match basis dim {basis.dim}")
    return noise.signal_rate * basis.probabilities(psi) + noise.offset


def sample_counts(means, rng):
    """Independent Poisson draws, one per setting."""
    means = np.asarray(means, dtype=float)
    if np.any(means < 0) or not np.all(np.isfinite(means)):
        raise InvalidParameterError("Poisson means must be finite and >= 0")
    return make_rng(rng).poisson(means)


def _normalize(counts, noise):
    weights = counts.astype(float)
    if noise.subtract_offsets:
        weights = np.clip(weights - noise.offset, 0.0, None)
    total = weights.sum()
    if total <= 0:
        return None
    return weights / total


def measure_iteration(psi, basis, noise, rng, iteration=0):
    """Simulate one iteration and turn the counts into outcome probabilities.

    If every setting reports zero, the draw is repeated once; a second
    all-zero draw yields uniform probabilities and ``degenerate=True``.
    """
    rng = make_rng(rng)
    means = expected_counts(psi, basis, noise)
    for _ in range(2):
        counts = sample_counts(means, rng)
        probs = _normalize(counts, noise)
        if probs is not None:
            return CountRecord(basis.label, counts, probs, False, iteration)
    d = basis.dim
    return CountRecord(basis.label, counts, np.full(d, 1.0 / d), True, iteration)


def write_counts_csv(path, records):
    """Raw counts, one row per iteration: ``iteration, basis_label, count_0..count_{d-1}``."""
    records = list(records)
    d = len(records[0].counts) if records else 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "basis_label"] + [f"count_{i}" for i in range(d)])
        for r in records:
            writer.writerow([r.iteration, r.basis_label] + [int(c) for c in r.counts])


def read_counts_csv(path, noise=None):
    """Load raw counts (simulated or from an experiment) back into ``CountRecord``s.

    ``noise`` only matters when it asks for offset subtraction.
    """
    noise = noise or NoiseConfig(0.0, 0.0, 0.0, 0.0)
    records = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["iteration", "basis_label"]:
            raise InvalidInputError(f"{path}: unexpected header {header}")
        for row in reader:
            counts = np.array([int(c) for c in row[2:]])
            probs = _normalize(counts, noise)
            degenerate = probs is None
            if degenerate:
                probs = np.full(counts.size, 1.0 / counts.size)
            records.append(CountRecord(row[1], counts, probs, degenerate, int(row[0])))
    return records
