import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctrlscore import (
    TemporalSystem,
    TrajectoryBundle,
    ValidationError,
    check_spanning,
    generate_trajectories,
    gramians_datadriven,
    gramians_lyapunov,
    gramians_quadrature,
    propagate_adjoint,
    read_trajectories,
    write_trajectories,
)
from ctrlscore.datadriven import max_relative_error
from ctrlscore.errors import AssumptionViolation
from ctrlscore.networks import builtin_system

from conftest import random_stable_switched


def constant_bundle(X0, T=1.0, steps=10):
    t = np.linspace(0, T, steps + 1)
    return TrajectoryBundle(t, np.broadcast_to(X0, (steps + 1,) + X0.shape))


def test_spanning_identity():
    rep = check_spanning(constant_bundle(np.eye(4)))
    assert rep and rep.rank == 4 and rep.sigma_ratio == pytest.approx(1.0)


def test_spanning_too_few():
    rep = check_spanning(constant_bundle(np.eye(4)[:, :3]))
    assert not rep and rep.rank == 3 and rep.sigma_ratio == 0.0


def test_spanning_random_unit_sphere():
    b = generate_trajectories(builtin_system("net1"), 12, 1e-2, seed=3)
    assert check_spanning(b).spanning


def test_zero_dynamics_exact():
    gs = gramians_datadriven(constant_bundle(np.eye(3), T=2.0))
    for i in range(3):
        expected = np.zeros((3, 3))
        expected[i, i] = 2.0
        np.testing.assert_allclose(gs.W[i], expected, atol=1e-14)


def test_network_one_accuracy():
    sys = builtin_system("net1")
    b = generate_trajectories(sys, 12, 1e-3, seed=0)
    assert max_relative_error(gramians_datadriven(b), gramians_quadrature(sys, 1e-3)) < 1e-2


def test_too_few_trajectories_large_error():
    sys = builtin_system("net1")
    b = generate_trajectories(sys, 9, 1e-3, seed=0)
    with pytest.raises(AssumptionViolation):
        gramians_datadriven(b)
    err = max_relative_error(gramians_datadriven(b, require_spanning=False),
                             gramians_quadrature(sys, 1e-3))
    assert err > 1e-1


def test_rank_loss_reports_time():
    X = np.stack([np.eye(2), np.eye(2), np.diag([1.0, 0.0])])
    b = TrajectoryBundle([0.0, 0.5, 1.0], X)
    with pytest.raises(AssumptionViolation, match="t=1"):
        gramians_datadriven(b)


def test_generator_unit_norm_and_determinism():
    sys = builtin_system("net1")
    b1 = generate_trajectories(sys, 5, 1e-2, seed=11)
    b2 = generate_trajectories(sys, 5, 1e-2, seed=11)
    np.testing.assert_allclose(np.linalg.norm(b1.X[0], axis=0), 1.0, rtol=1e-14)
    assert np.array_equal(b1.X, b2.X)
    assert not np.array_equal(b1.X, generate_trajectories(sys, 5, 1e-2, seed=12).X)


def test_generator_zero_dynamics_constant():
    b = generate_trajectories(TemporalSystem.from_matrices([np.zeros((3, 3))], [1.0]), 4, 0.1)
    assert np.array_equal(b.X, np.broadcast_to(b.X[0], b.X.shape))


def test_generator_needs_aligned_durations():
    sys = TemporalSystem.from_matrices([-np.eye(2), -np.eye(2)], [0.105, 0.2])
    with pytest.raises(ValidationError, match="multiples"):
        generate_trajectories(sys, 2, 1e-2)


def test_generator_rejects_bad_count():
    sys = TemporalSystem.from_matrices([np.zeros((2, 2))], [1.0])
    for N in (0, 2.5):
        with pytest.raises(ValidationError):
            generate_trajectories(sys, N)


def test_bundle_validation():
    with pytest.raises(ValidationError):
        TrajectoryBundle([0.0], np.zeros((1, 2, 2)))
    with pytest.raises(ValidationError, match="uniform"):
        TrajectoryBundle([0.0, 0.1, 0.3], np.zeros((3, 2, 2)))
    with pytest.raises(ValidationError, match="t = 0"):
        TrajectoryBundle([0.1, 0.2], np.zeros((2, 2, 2)))
    with pytest.raises(ValidationError):
        TrajectoryBundle([0.0, 0.1], np.zeros((3, 2, 2)))
    with pytest.raises(ValidationError):
        TrajectoryBundle([0.0, 0.1], np.full((2, 2, 2), np.inf))


def test_file_roundtrip(tmp_path):
    b = generate_trajectories(builtin_system("net1"), 3, 0.05, seed=1)
    path = tmp_path / "traj.csv"
    write_trajectories(b, path)
    back = read_trajectories(path)
    assert np.array_equal(back.X, b.X) and np.array_equal(back.times, b.times)
    assert path.read_text().splitlines()[0] == "t,traj_id," + ",".join(f"x{a}" for a in range(1, 11))


@pytest.mark.parametrize("text, fragment", [
    ("", "empty"),
    ("t,id,x1\n0,1,1\n", "header"),
    ("t,traj_id,x1\n0,1,abc\n", "non-numeric"),
    ("t,traj_id,x1\n0,1,1\n0,2,1\n0.1,1,1\n", "multiple"),
    ("t,traj_id,x1\n0,2,1\n0,1,1\n", "order"),
    ("t,traj_id,x1\n0,1,1\n0.5,1,1\n0.7,1,1\n", "uniform"),
    ("t,traj_id,x1,x2\n0,1,1\n", "fields"),
])
def test_reader_rejects_bad_files(tmp_path, text, fragment):
    path = tmp_path / "bad.csv"
    path.write_text(text)
    with pytest.raises(ValidationError, match=fragment):
        read_trajectories(path)


def test_representation_identity(rng):
    # X(t_m) pinv(X(t)) e_i equals Phi(t_m, t) e_i
    sys = random_stable_switched(rng, 4, 2, quantum=1e-2)
    b = generate_trajectories(sys, 6, 1e-2, seed=5)
    Y = propagate_adjoint(sys, 1e-2).values
    for ell in (0, len(b.times) // 3, len(b.times) - 1):
        Z = b.X[-1] @ np.linalg.pinv(b.X[ell])
        np.testing.assert_allclose(Z, Y[ell].T, rtol=1e-6, atol=1e-9)


def test_nullspace_perturbation_changes_nothing(rng):
    # any solution of X(t) alpha = e_i gives the same X(t_m) alpha
    sys = random_stable_switched(rng, 3, 1)
    b = generate_trajectories(sys, 7, 1e-2, seed=2)
    for ell in (0, 40, len(b.times) - 1):
        X = b.X[ell]
        alpha = np.linalg.pinv(X)
        _, _, Vt = np.linalg.svd(X)
        null = Vt[3:].T
        alt = alpha + null @ rng.standard_normal((null.shape[1], 3))
        np.testing.assert_allclose(X @ alt, np.eye(3), atol=1e-10)
        np.testing.assert_allclose(b.X[-1] @ alt, b.X[-1] @ alpha, atol=1e-10)


def test_halving_step_reduces_error(rng):
    sys = random_stable_switched(rng, 3, 2, quantum=4e-2)
    exact = gramians_lyapunov(sys)
    errs = [max_relative_error(gramians_datadriven(generate_trajectories(sys, 3, h, seed=0)), exact)
            for h in (4e-2, 2e-2, 1e-2)]
    assert errs[0] > errs[1] > errs[2]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 5), st.integers(0, 3))
def test_datadriven_psd_and_close_to_model(seed, n, extra):
    r = np.random.default_rng(seed)
    sys = random_stable_switched(r, n, 2, quantum=1e-2)
    b = generate_trajectories(sys, n + extra, 1e-2, seed=seed)
    gs = gramians_datadriven(b)
    for w in gs.W:
        assert np.linalg.eigvalsh(w).min() >= -1e-12 * np.abs(w).max()
    assert max_relative_error(gs, gramians_quadrature(sys, 1e-2)) < 1e-5
