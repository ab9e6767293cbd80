"""Ensemble benchmarks: Haar-random state ensembles, summary statistics, noise sweeps.

Seeds are derived from ``(master_seed, state index, repeat index)`` through
``numpy.random.SeedSequence`` spawn keys. The prepared state and its random
generator depend on the state index only, so every repeat and every noise
level sees the same states. Results are keyed by ``(state, repeat)``, which
makes the output independent of how many worker processes run them.
"""
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .exceptions import EnsembleError, InvalidInputError, InvalidParameterError
from .measurements import MUB, SCHEMES, make_family
from .meg import MegConfig, track
from .photons import NoiseConfig, snr
from .states import (
    DEFAULT_T_TOT,
    EvolutionSpec,
    haar_random_pure,
    make_rng,
    pauli_z_general,
    random_hermitian,
)

STATIONARY = "stationary"
PAULI_Z = "pauli_z"
RANDOM_HERMITIAN = "random_hermitian"
EVOLUTIONS = (STATIONARY, PAULI_Z, RANDOM_HERMITIAN)

QUARTILE_METHOD = "linear"


@dataclass(frozen=True)
class ScenarioConfig:
    dim: int = 3
    scheme: str = MUB
    evolution: str = STATIONARY
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    meg: MegConfig = field(default_factory=MegConfig)
    t_tot: int = DEFAULT_T_TOT
    n_states: int = 50
    n_noise_repeats: int = 20
    master_seed: int = 0
    threshold: float = 0.1

    def __post_init__(self):
        if self.dim < 2:
            raise InvalidParameterError("dim must be >= 2")
        if self.scheme not in SCHEMES:
            raise InvalidParameterError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.evolution not in EVOLUTIONS:
            raise InvalidParameterError(f"evolution must be one of {EVOLUTIONS}, got {self.evolution!r}")
        if self.n_states < 1 or self.n_noise_repeats < 1:
            raise InvalidParameterError("n_states and n_noise_repeats must be >= 1")
        if self.t_tot < 1:
            raise InvalidParameterError("t_tot must be >= 1")
        if not 0 < self.threshold < 1:
            raise InvalidParameterError("threshold must lie in (0, 1)")
        if self.meg.dim != self.dim:
            object.__setattr__(self, "meg", replace(self.meg, dim=self.dim))


def state_seed(master_seed, state):
    return np.random.SeedSequence(master_seed, spawn_key=(0, state))


def run_seed(master_seed, state, repeat):
    return np.random.SeedSequence(master_seed, spawn_key=(1, state, repeat))


def prepared_state(cfg, state):
    """Initial state and evolution for ensemble member ``state``."""
    rng = make_rng(state_seed(cfg.master_seed, state))
    psi0 = haar_random_pure(cfg.dim, rng)
    if cfg.evolution == STATIONARY:
        generator = np.zeros((cfg.dim, cfg.dim), dtype=complex)
    elif cfg.evolution == PAULI_Z:
        generator = pauli_z_general(cfg.dim)
    else:
        generator = random_hermitian(cfg.dim, rng)
    return psi0, EvolutionSpec.default(generator, cfg.t_tot)


def run_member(cfg, state, repeat, family=None):
    family = family or make_family(cfg.scheme, cfg.dim)
    psi0, evo = prepared_state(cfg, state)
    rng = make_rng(run_seed(cfg.master_seed, state, repeat))
    trace = track(psi0, evo, family, cfg.noise, cfg.meg, rng, cfg.t_tot)
    trace.seed = (cfg.master_seed, state, repeat)
    return trace


def _run_state(args):
    cfg, state = args
    family = make_family(cfg.scheme, cfg.dim)
    out = {}
    for repeat in range(cfg.n_noise_repeats):
        try:
            out[(state, repeat)] = run_member(cfg, state, repeat, family)
        except Exception as exc:  # collected and reported after the ensemble finishes
            out[(state, repeat)] = exc
    return out


def run_ensemble(cfg, jobs=1):
    """``n_states x n_noise_repeats`` tracking runs, ordered by ``(state, repeat)``.

    Raises:
        EnsembleError: after all members ran, if any of them failed.
    """
    tasks = [(cfg, s) for s in range(cfg.n_states)]
    results = {}
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for part in pool.map(_run_state, tasks):
                results.update(part)
    else:
        for task in tasks:
            results.update(_run_state(task))
    failures = {k: v for k, v in results.items() if isinstance(v, Exception)}
    traces = {k: v for k, v in results.items() if not isinstance(v, Exception)}
    if failures:
        raise EnsembleError(failures, traces)
    return [traces[k] for k in sorted(traces)]


def iterations_to_threshold(trace, threshold):
    """First iteration (1-based) with infidelity below ``threshold``, or ``None``."""
    if not 0 < threshold < 1:
        raise InvalidParameterError("threshold must lie in (0, 1)")
    infid = trace.infidelity if hasattr(trace, "infidelity") else np.asarray(trace)
    hits = np.flatnonzero(np.asarray(infid) < threshold)
    return int(hits[0]) + 1 if hits.size else None


def mean_infidelity(trace, burn_in=0):
    """Mean infidelity over iterations strictly after ``burn_in``."""
    infid = np.asarray(trace.infidelity if hasattr(trace, "infidelity") else trace)
    if not 0 <= burn_in < len(infid):
        raise InvalidParameterError(f"burn_in must lie in [0, {len(infid)}), got {burn_in}")
    return float(np.mean(infid[burn_in:]))


def quartiles(values, axis=None):
    """``(q25, median, q75)`` with linear interpolation between order statistics."""
    q = np.percentile(values, [25, 50, 75], axis=axis, method=QUARTILE_METHOD)
    return q[0], q[1], q[2]


@dataclass(frozen=True)
class Summary:
    median: Optional[float]
    q25: Optional[float]
    q75: Optional[float]

    @classmethod
    def of(cls, values):
        """Quartiles of ``values``; ``None`` entries rank above every number.

        A quartile that falls on (or interpolates into) a ``None`` is
        reported as ``None``.
        """
        arr = np.sort(np.array([np.inf if v is None else v for v in values], dtype=float))
        if arr.size == 0:
            raise InvalidInputError("no values to summarize")
        out = []
        for q in (0.25, 0.5, 0.75):
            # linear interpolation, written out so a zero weight on +inf stays finite
            pos = q * (arr.size - 1)
            k = int(np.floor(pos))
            frac = pos - k
            if frac == 0:
                x = arr[k]
            elif np.isinf(arr[k + 1]):
                x = np.inf
            else:
                x = arr[k] + frac * (arr[k + 1] - arr[k])
            out.append(None if not np.isfinite(x) else float(x))
        return cls(out[1], out[0], out[2])

    def as_dict(self):
        return {"median": self.median, "q25": self.q25, "q75": self.q75}


@dataclass(frozen=True, eq=False)
class AggregateStats:
    """Pointwise quartiles over an ensemble plus per-trace summary statistics.

    ``mean_infidelity`` averages each trace after its own threshold crossing
    (whole trace for traces that never cross). ``mean_infidelity_full``
    averages whole traces, ``tail_infidelity`` the last half of each trace.
    """

    median: np.ndarray
    q25: np.ndarray
    q75: np.ndarray
    threshold: float
    iterations_to_threshold: Summary
    censored_fraction: float
    mean_infidelity: Summary
    mean_infidelity_full: Summary
    tail_infidelity: Summary
    median_purity: float
    n_traces: int


def aggregate(traces, threshold=0.1, burn_in=None):
    """Aggregate equal-length traces.

    ``burn_in=None`` uses each trace's own iterations-to-threshold as its
    burn-in; an integer applies the same burn-in to all traces.
    """
    traces = list(traces)
    if not traces:
        raise InvalidInputError("cannot aggregate an empty ensemble")
    lengths = {len(t) for t in traces}
    if len(lengths) != 1:
        raise InvalidInputError(f"traces differ in length: {sorted(lengths)}")
    (n,) = lengths
    infid = np.array([t.infidelity for t in traces])
    q25, med, q75 = quartiles(infid, axis=0)

    hits = [iterations_to_threshold(t, threshold) for t in traces]
    means = []
    for t, hit in zip(traces, hits):
        if burn_in is not None:
            b = burn_in
        elif hit is None:
            b = 0
        else:
            b = min(hit, n - 1)
        means.append(mean_infidelity(t, b))
    full = [mean_infidelity(t, 0) for t in traces]
    tail = [mean_infidelity(t, n // 2) for t in traces]
    return AggregateStats(
        median=med,
        q25=q25,
        q75=q75,
        threshold=threshold,
        iterations_to_threshold=Summary.of(hits),
        censored_fraction=sum(h is None for h in hits) / len(hits),
        mean_infidelity=Summary.of(means),
        mean_infidelity_full=Summary.of(full),
        tail_infidelity=Summary.of(tail),
        median_purity=float(np.median([t.purity[-1] for t in traces])),
        n_traces=len(traces),
    )


@dataclass(frozen=True, eq=False)
class SweepPoint:
    """Aggregate for one extra-background level.

    ``snr`` is signal over the extra background alone (capped when the level
    is zero); ``snr_total`` also counts dark and ambient background.
    """

    level: float
    snr: float
    snr_total: float
    stats: AggregateStats
    config: ScenarioConfig


def noise_sweep(base, extra_background_levels, jobs=1, burn_in=None):
    """Re-run ``base`` once per extra-background level, nothing else changed."""
    levels = list(extra_background_levels)
    if any(level < 0 for level in levels):
        raise InvalidParameterError("extra background levels must be >= 0")
    out = {}
    for level in levels:
        cfg = replace(base, noise=replace(base.noise, extra_background_rate=float(level)))
        stats = aggregate(run_ensemble(cfg, jobs), cfg.threshold, burn_in)
        out[level] = SweepPoint(
            float(level), snr(cfg.noise.signal_rate, float(level)), cfg.noise.snr(), stats, cfg
        )
    return out
