"""State transition matrices of piecewise LTV systems.

Both propagators share one time grid: segment ``k`` is cut into
``ceil(dt_k / dtau)`` equal sub-steps, so every switching time is a grid
point and no step ever straddles a discontinuity of ``A(t)``.  Constant
segments are stepped exactly with a matrix exponential; other segments use
classical fixed-step RK4.

The adjoint propagation returns ``Y(t) = Phi(t_m, t)^T``, the solution of
``dY/dt = -A(t)^T Y`` with ``Y(t_m) = I``.  Row ``i`` of ``Y(t)`` is
``(Phi(t_m, t) e_i)^T``, whose outer products integrate to the per-node
Gramian ``W_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericalError, ValidationError
from .sysmodel import ConstantMatrix, TemporalSystem

__all__ = [
    "DEFAULT_DTAU",
    "matrix_exponential",
    "TimeGrid",
    "make_grid",
    "AdjointTrajectory",
    "StateTrajectory",
    "propagate_adjoint",
    "propagate_state",
]

DEFAULT_DTAU = 1e-3
MAX_GRID_POINTS = 5_000_000


def matrix_exponential(M, s: float = 1.0) -> np.ndarray:
    """``exp(s M)`` by scaling and squaring with a degree-13 Pade approximant."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {M.shape}")
    if not (np.all(np.isfinite(M)) and np.isfinite(s)):
        raise ValidationError("matrix exponential of non-finite input")
    return scipy.linalg.expm(s * M)


@dataclass(frozen=True)
class SegmentSpan:
    """Grid indices ``first..last`` (inclusive) covering segment ``index``."""

    index: int
    first: int
    last: int
    step: float


@dataclass(frozen=True)
class TimeGrid:
    times: np.ndarray
    spans: tuple[SegmentSpan, ...]

    def __len__(self):
        return len(self.times)

    def trapezoid_weights(self) -> np.ndarray:
        """Composite trapezoid weights, applied segment by segment."""
        w = np.zeros(len(self.times))
        for sp in self.spans:
            w[sp.first:sp.last + 1] += sp.step
            w[sp.first] -= sp.step / 2
            w[sp.last] -= sp.step / 2
        return w


def make_grid(sys: TemporalSystem, dtau: float, max_points: int = MAX_GRID_POINTS) -> TimeGrid:
    if not (np.isfinite(dtau) and dtau > 0):
        raise ValidationError(f"time step must be positive, got {dtau}")
    tm = sys.t_final
    if tm <= 0:
        raise ValidationError("zero horizon: all segment durations are 0")
    steps = []
    for seg in sys.segments:
        # tolerate round-off such as 2.1 / 1e-3 = 2100.0000000000005
        steps.append(math.ceil(seg.duration / dtau - 1e-9) if seg.duration > 0 else 0)
    if sum(steps) + 1 > max_points:
        raise ValidationError(
            f"grid of {sum(steps) + 1} points exceeds the budget of {max_points}; increase dtau")
    starts = sys.switch_times
    times = [np.array([0.0])]
    spans = []
    idx = 0
    for k, (seg, nk) in enumerate(zip(sys.segments, steps)):
        if nk == 0:
            continue
        pts = np.linspace(starts[k], starts[k + 1], nk + 1)
        times.append(pts[1:])
        spans.append(SegmentSpan(k, idx, idx + nk, seg.duration / nk))
        idx += nk
    t = np.concatenate(times)
    t.setflags(write=False)
    return TimeGrid(t, tuple(spans))


@dataclass(frozen=True)
class AdjointTrajectory:
    """``values[l] = Y(times[l]) = Phi(t_m, times[l])^T``."""

    grid: TimeGrid
    values: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


@dataclass(frozen=True)
class StateTrajectory:
    """``values[l]`` is the state (vector or ``n x N`` block) at ``times[l]``."""

    grid: TimeGrid
    values: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


def _rk4_step(a_of, t, y, h, sign):
    """One RK4 step of ``dy/dt = sign * a_of(t) @ y`` from ``t`` to ``t + h``."""
    # overflow surfaces as non-finite values, which the caller reports
    with np.errstate(over="ignore", invalid="ignore"):
        k1 = sign * (a_of(t) @ y)
        k2 = sign * (a_of(t + h / 2) @ (y + h / 2 * k1))
        k3 = sign * (a_of(t + h / 2) @ (y + h / 2 * k2))
        k4 = sign * (a_of(t + h) @ (y + h * k3))
        return y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _check_finite(y, t):
    if not np.all(np.isfinite(y)):
        raise NumericalError(f"propagation blew up (non-finite values) at t={t:.6g}")


def propagate_adjoint(sys: TemporalSystem, dtau: float = DEFAULT_DTAU) -> AdjointTrajectory:
    """Integrate ``dY/dt = -A(t)^T Y`` backward from ``Y(t_m) = I``."""
    grid = make_grid(sys, dtau)
    n = sys.n
    out = np.empty((len(grid), n, n))
    y = np.eye(n)
    out[-1] = y
    starts = sys.switch_times
    for sp in reversed(grid.spans):
        src = sys.segments[sp.index].source
        h = sp.step
        if isinstance(src, ConstantMatrix):
            step = matrix_exponential(src.matrix.T, h)
            for l in range(sp.last, sp.first, -1):
                y = step @ y
                out[l - 1] = y
        else:
            def a_t(s, src=src):
                return src.at(s).T

            for l in range(sp.last, sp.first, -1):
                s = (l - sp.first) * h
                y = _rk4_step(a_t, s, y, -h, -1.0)
                out[l - 1] = y
                _check_finite(y, starts[sp.index] + s - h)
        _check_finite(y, starts[sp.index])
    out[-1] = np.eye(n)
    out.setflags(write=False)
    return AdjointTrajectory(grid, out)


def propagate_state(sys: TemporalSystem, x0, dtau: float = DEFAULT_DTAU) -> StateTrajectory:
    """Integrate ``dx/dt = A(t) x`` forward; ``x0`` may be a vector or an ``n x N`` block."""
    x = np.array(x0, dtype=float)
    if x.shape[0] != sys.n or x.ndim not in (1, 2):
        raise ValidationError(f"initial state of shape {x.shape} does not match n={sys.n}")
    grid = make_grid(sys, dtau)
    out = np.empty((len(grid),) + x.shape)
    out[0] = x
    starts = sys.switch_times
    for sp in grid.spans:
        src = sys.segments[sp.index].source
        h = sp.step
        if isinstance(src, ConstantMatrix):
            step = matrix_exponential(src.matrix, h)
            for l in range(sp.first, sp.last):
                x = step @ x
                out[l + 1] = x
        else:
            for l in range(sp.first, sp.last):
                s = (l - sp.first) * h
                x = _rk4_step(src.at, s, x, h, 1.0)
                out[l + 1] = x
                _check_finite(x, starts[sp.index] + s + h)
        _check_finite(x, starts[sp.index + 1])
    out.setflags(write=False)
    return StateTrajectory(grid, out)
