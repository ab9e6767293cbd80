import numpy as np
import pytest

from megtomo.exceptions import EstimatorStepError, InvalidInputError, InvalidParameterError
from megtomo.linalg import fidelity, is_density_matrix
from megtomo.measurements import mub_family, pauli_family
from megtomo.meg import (
    EstimatorState,
    MegConfig,
    estimate_from_records,
    gradient,
    initial_state,
    loss,
    meg_step,
    pure_infidelity,
    pure_projection,
    track,
)
from megtomo.photons import NoiseConfig, measure_iteration
from megtomo.states import EvolutionSpec, density_of, haar_random_pure, make_rng

from conftest import random_density, random_herm

MUB3 = mub_family(3)
COMP = MUB3[0]


def fd_directional(rho, basis, y, direction, h=1e-5):
    return (loss(rho + h * direction, basis, y) - loss(rho - h * direction, basis, y)) / (2 * h)


def random_y(rng, d):
    y = rng.random(d)
    return y / y.sum()


def test_loss_examples():
    assert loss(density_of(COMP.states[0]), COMP, [1, 0, 0]) == pytest.approx(0, abs=1e-30)
    assert loss(np.eye(3) / 3, COMP, [1, 0, 0]) == pytest.approx(2 / 3, abs=1e-15)


def test_loss_nonnegative_zero_iff_match(rng):
    for _ in range(100):
        rho = random_density(3, rng)
        basis = MUB3[rng.integers(4)]
        y = random_y(rng, 3)
        assert loss(rho, basis, y) >= 0
        pred = np.einsum("ki,kl,li->i", basis.vectors.conj(), rho, basis.vectors).real
        assert loss(rho, basis, pred) == pytest.approx(0, abs=1e-28)
        assert loss(rho, basis, y) == pytest.approx(np.sum((pred - y) ** 2), abs=1e-14)


def test_gradient_examples():
    rho = random_density(3, np.random.default_rng(0))
    basis = MUB3[2]
    pred = np.einsum("ki,kl,li->i", basis.vectors.conj(), rho, basis.vectors).real
    np.testing.assert_allclose(gradient(rho, basis, pred), 0, atol=1e-15)
    g = gradient(np.eye(3) / 3, COMP, [1, 0, 0])
    np.testing.assert_allclose(g, 2 * np.diag([1 / 3 - 1, 1 / 3, 1 / 3]), atol=1e-15)


def test_gradient_matches_finite_differences(rng):
    worst = 0.0
    for _ in range(100):
        d = 3
        rho = random_density(d, rng)
        fam = MUB3 if rng.random() < 0.5 else pauli_family(3)
        basis = fam[rng.integers(len(fam))]
        y = random_y(rng, d)
        g = gradient(rho, basis, y)
        direction = random_herm(d, rng)
        analytic = np.trace(g @ direction).real
        numeric = fd_directional(rho, basis, y, direction)
        worst = max(worst, abs(analytic - numeric) / max(abs(analytic), 1e-12))
    assert worst <= 1e-6


def test_single_outcome_reduction(rng):
    for _ in range(20):
        rho = random_density(3, rng)
        v = haar_random_pure(3, rng)
        y = rng.random()
        x = density_of(v)
        direct_loss = (np.trace(rho @ x).real - y) ** 2
        direct_grad = 2 * (np.trace(rho @ x).real - y) * x
        assert loss(rho, v, [y]) == pytest.approx(direct_loss, abs=1e-14)
        np.testing.assert_allclose(gradient(rho, v, [y]), direct_grad, atol=1e-14)
        # the basis form is the sum of its single-outcome terms
        basis = MUB3[rng.integers(4)]
        yy = random_y(rng, 3)
        total = sum(loss(rho, basis.vectors[:, i], [yy[i]]) for i in range(3))
        assert loss(rho, basis, yy) == pytest.approx(total, abs=1e-14)


def test_loss_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        loss(np.eye(2) / 2, COMP, [1, 0, 0])
    with pytest.raises(InvalidInputError):
        gradient(np.eye(3) / 3, COMP, [1, 0])


def test_config_validation():
    with pytest.raises(InvalidParameterError):
        MegConfig(learning_rate=0)
    with pytest.raises(InvalidParameterError):
        MegConfig(schedule="adaptive")
    cfg = MegConfig(learning_rate=4.0, schedule="inverse_sqrt")
    assert cfg.rate_at(4) == pytest.approx(2.0)
    assert MegConfig().rate_at(100) == 5.0


def test_initial_state_is_maximally_mixed():
    s = initial_state(3)
    np.testing.assert_allclose(s.estimate, np.eye(3) / 3)
    np.testing.assert_allclose(np.diag(s.estimate).real, [1 / 3] * 3)
    assert s.iteration == 0


def test_zero_gradient_is_fixpoint(rng):
    cfg = MegConfig()
    for _ in range(50):
        rho = random_density(3, rng)
        basis = MUB3[rng.integers(4)]
        pred = np.einsum("ki,kl,li->i", basis.vectors.conj(), rho, basis.vectors).real
        new = meg_step(EstimatorState(rho, 7), basis, pred, cfg)
        assert new.iteration == 8
        assert np.linalg.norm(new.estimate - rho) <= 1e-9


def test_shift_does_not_change_result(rng):
    cfg = MegConfig()
    for _ in range(50):
        rho = random_density(3, rng)
        basis = MUB3[rng.integers(4)]
        y = random_y(rng, 3)
        a = meg_step(EstimatorState(rho), basis, y, cfg, shift=True).estimate
        b = meg_step(EstimatorState(rho), basis, y, cfg, shift=False).estimate
        np.testing.assert_allclose(a, b, atol=1e-9)


def test_step_survives_huge_learning_rate():
    cfg = MegConfig(learning_rate=1e4)
    state = meg_step(initial_state(3), COMP, [1, 0, 0], cfg)
    assert is_density_matrix(state.estimate)
    # without the shift the exponent overflows
    with pytest.raises(EstimatorStepError):
        meg_step(initial_state(3), COMP, [0, 0.5, 0.5], MegConfig(learning_rate=1e4), shift=False)


def test_physicality_property(rng):
    noise = NoiseConfig(100, 100, 50)
    for _ in range(200):
        cfg = MegConfig(learning_rate=float(rng.choice([0.5, 5, 50])))
        state = EstimatorState(random_density(3, rng))
        psi = haar_random_pure(3, rng)
        for _ in range(5):
            basis = MUB3[rng.integers(4)]
            y = measure_iteration(psi, basis, noise, rng).probabilities
            state = meg_step(state, basis, y, cfg)
            rho = state.estimate
            assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
            assert abs(np.trace(rho).real - 1) <= 1e-12
            assert np.linalg.eigvalsh(rho)[0] >= -1e-12


def test_pure_projection_of_depolarized_state(rng):
    lam = 0.7
    phi = haar_random_pure(3, rng)
    rho = lam * density_of(phi) + (1 - lam) * np.eye(3) / 3
    out = pure_projection(rho)
    assert abs(np.vdot(out, phi)) ** 2 == pytest.approx(1, abs=1e-12)
    assert np.linalg.eigvalsh(rho)[-1] == pytest.approx(0.8, abs=1e-12)


def test_pure_projection_of_pure_state(rng):
    phi = haar_random_pure(4, rng)
    out = pure_projection(density_of(phi))
    # canonical phase: first nonzero amplitude real positive
    expected = phi * abs(phi[0]) / phi[0]
    np.testing.assert_allclose(out, expected, atol=1e-12)
    assert out[0].imag == 0 and out[0].real > 0


def test_pure_projection_fidelity_equals_top_eigenvalue(rng):
    for _ in range(50):
        rho = random_density(3, rng)
        out = pure_projection(rho)
        assert fidelity(density_of(out), rho) == pytest.approx(np.linalg.eigvalsh(rho)[-1], abs=1e-9)


def test_pure_projection_tie_break_is_deterministic():
    out = pure_projection(np.eye(3) / 3)
    np.testing.assert_array_equal(out, [1, 0, 0])
    rho = np.diag([0.1, 0.45, 0.45]).astype(complex)
    np.testing.assert_allclose(pure_projection(rho), [0, 1, 0], atol=1e-15)


def test_track_first_update_starts_from_mixed_state():
    # first estimate: one step away from I/3 with the first record's probabilities
    psi0 = haar_random_pure(3, make_rng(1))
    evo = EvolutionSpec.default(np.zeros((3, 3)), 5)
    noise = NoiseConfig.noiseless(1e6)
    trace = track(psi0, evo, MUB3, noise, MegConfig(), make_rng(2))
    rng = make_rng(2)
    basis = MUB3[int(rng.integers(4))]
    rec = measure_iteration(psi0, basis, noise, rng)
    manual = meg_step(initial_state(3), basis, rec.probabilities, MegConfig())
    assert trace.basis_labels[0] == basis.label
    phi = pure_projection(manual.estimate)
    np.testing.assert_allclose(trace.p_pred[0], np.abs(phi) ** 2, atol=1e-12)


def test_track_noiseless_stationary_converges():
    rng = make_rng(100)
    finals = []
    for _ in range(50):
        psi0 = haar_random_pure(3, rng)
        evo = EvolutionSpec.default(np.zeros((3, 3)), 300)
        trace = track(psi0, evo, MUB3, NoiseConfig.noiseless(1e6), MegConfig(), rng)
        finals.append(trace.infidelity[-1])
    assert np.mean(np.array(finals) < 1e-3) >= 0.9


def test_track_records_are_consistent():
    psi0 = haar_random_pure(3, make_rng(3))
    evo = EvolutionSpec.default(np.zeros((3, 3)), 30)
    trace = track(psi0, evo, MUB3, NoiseConfig(100, 100, 50), MegConfig(), make_rng(4))
    assert len(trace) == 30
    np.testing.assert_array_equal(trace.iterations, np.arange(1, 31))
    np.testing.assert_allclose(trace.p_true, np.tile(np.abs(psi0) ** 2, (30, 1)), atol=1e-14)
    np.testing.assert_allclose(trace.p_pred.sum(axis=1), 1, atol=1e-12)
    assert np.all((trace.purity >= 1 / 3 - 1e-12) & (trace.purity <= 1 + 1e-12))
    assert [MUB3[i].label for i in trace.basis_index] == trace.basis_labels


def test_median_infidelity_monotone_during_convergence():
    # exact probabilities; past t ~ 20 the median sits near 1e-6 and moves less than
    # its own sampling error across 50 states, so only the transient is checked
    rng = make_rng(5)
    cfg = MegConfig()
    traces = []
    for _ in range(50):
        psi = haar_random_pure(3, rng)
        state = initial_state(3)
        infid = []
        for _ in range(20):
            basis = MUB3[rng.integers(4)]
            state = meg_step(state, basis, basis.probabilities(psi), cfg)
            infid.append(pure_infidelity(pure_projection(state.estimate, state.eigen), psi))
        traces.append(infid)
    med = np.median(traces, axis=0)[4:]
    violations = np.sum(np.diff(med) > 0)
    assert violations <= 0.05 * (len(med) - 1)


def test_track_dimension_mismatch():
    evo = EvolutionSpec.default(np.zeros((2, 2)), 5)
    with pytest.raises(InvalidInputError):
        track(haar_random_pure(3, make_rng(0)), evo, MUB3, NoiseConfig(), MegConfig(), make_rng(0))


def test_replay_from_records_matches_track():
    psi0 = haar_random_pure(3, make_rng(6))
    evo = EvolutionSpec.default(np.zeros((3, 3)), 25)
    trace = track(psi0, evo, MUB3, NoiseConfig(1e6, 100, 50), MegConfig(), make_rng(7))
    states = estimate_from_records(trace.count_records(), MUB3, MegConfig())
    phi = pure_projection(states[-1].estimate)
    np.testing.assert_allclose(np.abs(phi) ** 2, trace.p_pred[-1], atol=1e-12)
