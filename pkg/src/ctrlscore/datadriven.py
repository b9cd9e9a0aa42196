"""Gramians from sampled free-response trajectories, without the system matrix.

If the initial states of ``N`` trajectories span ``R^n``, then for every
sample time there is ``alpha_i(t)`` with ``X(t) alpha_i(t) = e_i`` and

    Phi(t_m, t) e_i = X(t_m) alpha_i(t),

so ``W_i`` is the integral of ``z_i z_i^T`` with ``z_i = X(t_m) alpha_i(t)``.
The least-norm ``alpha_i`` for all ``i`` at once is the pseudoinverse of
``X(t)``, obtained from one SVD per sample time.

Trajectory files are comma-separated text with header ``t,traj_id,x1,..,xn``
and one row per (sample time, trajectory), trajectories numbered from 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import AssumptionViolation, ValidationError
from .gramian import GramianSet
from .sysmodel import TemporalSystem
from .transition import DEFAULT_DTAU, make_grid, propagate_state

__all__ = [
    "TrajectoryBundle",
    "SpanningReport",
    "check_spanning",
    "gramians_datadriven",
    "generate_trajectories",
    "write_trajectories",
    "read_trajectories",
    "max_relative_error",
]

GRID_RTOL = 1e-6


@dataclass(frozen=True)
class TrajectoryBundle:
    """``X[l]`` is the ``n x N`` matrix of all states at ``times[l]``."""

    times: np.ndarray
    X: np.ndarray

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        X = np.array(self.X, dtype=float)
        if t.ndim != 1 or len(t) < 2:
            raise ValidationError("need at least two sample times")
        if X.ndim != 3 or X.shape[0] != len(t):
            raise ValidationError(f"state array of shape {X.shape} does not match {len(t)} samples")
        if X.shape[2] < 1:
            raise ValidationError("bundle holds no trajectories")
        if abs(t[0]) > 1e-12:
            raise ValidationError("sampling must start at t = 0")
        dt = np.diff(t)
        if np.any(dt <= 0) or np.ptp(dt) > GRID_RTOL * dt.mean():
            raise ValidationError("sample times must form a uniform increasing grid")
        if not np.all(np.isfinite(X)):
            raise ValidationError("trajectory data contain non-finite values")
        t.setflags(write=False)
        X.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "X", X)

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def N(self) -> int:
        return self.X.shape[2]

    @property
    def dtau(self) -> float:
        return float(np.diff(self.times).mean())

    @property
    def t_final(self) -> float:
        return float(self.times[-1])


@dataclass(frozen=True)
class SpanningReport:
    spanning: bool
    rank: int
    sigma_ratio: float

    def __bool__(self):
        return self.spanning


def _rank_tol(n, N, smax):
    return max(n, N) * np.finfo(float).eps * smax


def check_spanning(bundle: TrajectoryBundle) -> SpanningReport:
    """Whether the initial states span ``R^n`` (numerical rank of ``X(0)``)."""
    s = np.linalg.svd(bundle.X[0], compute_uv=False)
    if s[0] == 0:
        return SpanningReport(False, 0, 0.0)
    rank = int(np.sum(s > _rank_tol(bundle.n, bundle.N, s[0])))
    smin = s[bundle.n - 1] if len(s) >= bundle.n else 0.0
    return SpanningReport(rank == bundle.n, rank, float(smin / s[0]))


def _pinv_stack(X, require_spanning, times):
    n, N = X.shape[1:]
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    keep = s > _rank_tol(n, N, s[:, :1])
    rank = keep.sum(axis=1)
    if require_spanning and np.any(rank < n):
        l = int(np.argmax(rank < n))
        raise AssumptionViolation(
            f"trajectory data do not span R^{n} at t={times[l]:.6g} (rank {rank[l]})")
    sinv = np.where(keep, 1.0 / np.where(keep, s, 1.0), 0.0)
    # pinv(X) = V diag(1/s) U^T, shape (G, N, n)
    return np.einsum("lkN,lk,lak->lNa", Vt, sinv, U, optimize=True)


def gramians_datadriven(bundle: TrajectoryBundle, require_spanning: bool = True) -> GramianSet:
    """Least-norm data-driven Gramians with trapezoid weights over the sample grid.

    With ``require_spanning=False`` rank-deficient data are accepted and the
    least-norm solutions are used as they are; the result is then only an
    approximation of unknown quality.
    """
    if require_spanning and not check_spanning(bundle):
        raise AssumptionViolation("initial states do not span R^n")
    pinv = _pinv_stack(bundle.X, require_spanning, bundle.times)
    Z = np.einsum("aN,lNb->lab", bundle.X[-1], pinv, optimize=True)
    dt = np.diff(bundle.times)
    w = np.zeros(len(bundle.times))
    w[:-1] += dt / 2
    w[1:] += dt / 2
    W = np.einsum("l,lai,lbi->iab", w, Z, Z, optimize=True)
    return GramianSet(W, "datadriven", {"dtau": bundle.dtau, "N": bundle.N})


def generate_trajectories(sys: TemporalSystem, N: int, dtau: float = DEFAULT_DTAU,
                          seed=0) -> TrajectoryBundle:
    """``N`` free responses from initial states uniform on the unit sphere.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts.
    """
    if int(N) != N or N < 1:
        raise ValidationError(f"trajectory count must be a positive integer, got {N}")
    steps = np.array([sp.step for sp in make_grid(sys, dtau).spans])
    if np.ptp(steps) > GRID_RTOL * steps.mean():
        raise ValidationError(
            f"segment durations must be multiples of the sampling step {dtau} "
            "for uniformly sampled trajectories")
    rng = np.random.default_rng(seed)
    x0 = rng.standard_normal((sys.n, int(N)))
    x0 /= np.linalg.norm(x0, axis=0)
    traj = propagate_state(sys, x0, dtau)
    return TrajectoryBundle(traj.times, traj.values)


def write_trajectories(bundle: TrajectoryBundle, path) -> None:
    n, N = bundle.n, bundle.N
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "traj_id"] + [f"x{a + 1}" for a in range(n)])
        for t, X in zip(bundle.times, bundle.X):
            for k in range(N):
                w.writerow([repr(float(t)), k + 1] + [repr(float(v)) for v in X[:, k]])


def read_trajectories(path) -> TrajectoryBundle:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValidationError(f"{path}: empty trajectory file")
    header = [h.strip() for h in rows[0]]
    n = len(header) - 2
    if n < 1 or header[:2] != ["t", "traj_id"] or header[2:] != [f"x{a + 1}" for a in range(n)]:
        raise ValidationError(f"{path}: header must be t,traj_id,x1..xn")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric entry ({exc})") from exc
    if data.ndim != 2 or data.shape[1] != n + 2:
        raise ValidationError(f"{path}: every row needs {n + 2} fields")
    ids = data[:, 1].astype(int)
    N = int(ids.max())
    if len(data) % N:
        raise ValidationError(f"{path}: row count is not a multiple of the trajectory count {N}")
    data = data.reshape(-1, N, n + 2)
    if np.any(data[:, :, 1].astype(int) != np.arange(1, N + 1)):
        raise ValidationError(f"{path}: each time must list trajectories 1..{N} in order")
    if np.any(data[:, :, 0] != data[:, :1, 0]):
        raise ValidationError(f"{path}: inconsistent time stamps within a sample block")
    return TrajectoryBundle(data[:, 0, 0], data[:, :, 2:].transpose(0, 2, 1))


def max_relative_error(approx: GramianSet, exact: GramianSet) -> float:
    """``max_i ||W~_i - W_i||_F / ||W_i||_F``."""
    num = np.linalg.norm(approx.W - exact.W, axis=(1, 2))
    den = np.linalg.norm(exact.W, axis=(1, 2))
    return float(np.max(num / den))
