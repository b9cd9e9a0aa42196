"""Per-node controllability Gramians.

For node ``i`` the Gramian is

    W_i = int_0^{t_m} Phi(t_m, tau) e_i e_i^T Phi(t_m, tau)^T dtau

and the Gramian of the input allocation ``p`` is ``W(p) = sum_i p_i W_i``.
Three model-based backends are provided:

* ``quadrature`` -- trapezoid rule over the adjoint trajectory;
* ``legendre`` -- truncated normalized-Legendre expansion per segment;
* ``lyapunov`` -- one Lyapunov solve per segment and node (switched systems).

The data-driven backend lives in :mod:`ctrlscore.datadriven`.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import AssumptionViolation, NotControllableError, NumericalError, ValidationError
from .sysmodel import TemporalSystem
from .transition import DEFAULT_DTAU, matrix_exponential, propagate_adjoint

__all__ = [
    "BACKENDS",
    "GramianSet",
    "AssembledGramian",
    "gramians_quadrature",
    "gramians_legendre",
    "gramians_lyapunov",
    "compute_gramians",
    "normalized_legendre",
    "assemble",
    "min_control_energy",
    "save_gramians",
    "load_gramians",
]

BACKENDS = ("quadrature", "legendre", "lyapunov", "datadriven")
DEFAULT_LEGENDRE_ORDER = 20
PSD_TOL = 1e-8
PD_TOL = 1e-10


def _clean_psd(w: np.ndarray, i: int) -> np.ndarray:
    w = (w + w.T) / 2
    scale = np.abs(w).max()
    if scale == 0:
        return w
    ev, v = np.linalg.eigh(w)
    norm = np.abs(ev).max()
    if ev[0] < -PSD_TOL * norm:
        raise NumericalError(
            f"W_{i + 1} is indefinite: eigenvalue {ev[0]:.3e} against norm {norm:.3e}")
    # round-off-sized negatives are left alone so that cleaning is idempotent
    if ev[0] < -64 * np.finfo(float).eps * w.shape[0] * norm:
        w = (v * np.clip(ev, 0, None)) @ v.T
        w = (w + w.T) / 2
    return w


@dataclass(frozen=True)
class GramianSet:
    """The ``n`` per-node Gramians, stacked as ``W[i]`` (symmetrized, PSD-cleaned)."""

    W: np.ndarray
    backend: str = "unknown"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.array(self.W, dtype=float)
        if w.ndim != 3 or w.shape[0] != w.shape[1] or w.shape[1] != w.shape[2]:
            raise ValidationError(f"expected an (n, n, n) stack of Gramians, got {w.shape}")
        if not np.all(np.isfinite(w)):
            raise NumericalError("Gramian stack has non-finite entries")
        w = np.stack([_clean_psd(wi, i) for i, wi in enumerate(w)])
        w.setflags(write=False)
        object.__setattr__(self, "W", w)
        object.__setattr__(self, "params", dict(self.params))

    @property
    def n(self) -> int:
        return self.W.shape[0]

    def __len__(self):
        return self.n

    def __getitem__(self, i):
        return self.W[i]

    def total(self) -> np.ndarray:
        """``sum_i W_i``, the Gramian of the full-input system ``B = I``."""
        return self.W.sum(axis=0)


@dataclass(frozen=True)
class AssembledGramian:
    matrix: np.ndarray
    p: np.ndarray


def _weighted_outer(weights, Y):
    # y_i = Phi(t_m, tau) e_i is row i of Y = Phi(t_m, tau)^T
    return np.einsum("l,lia,lib->iab", weights, Y, Y, optimize=True)


def gramians_quadrature(sys: TemporalSystem, dtau: float = DEFAULT_DTAU) -> GramianSet:
    traj = propagate_adjoint(sys, dtau)
    w = traj.grid.trapezoid_weights()
    return GramianSet(_weighted_outer(w, traj.values), "quadrature", {"dtau": dtau})


def normalized_legendre(order: int, x) -> np.ndarray:
    """Values ``phi_j(x)``, ``j = 0..order``, orthonormal on ``[-1, 1]``; shape ``(order+1, len(x))``."""
    x = np.asarray(x, dtype=float)
    P = np.empty((order + 1,) + x.shape)
    P[0] = 1.0
    if order >= 1:
        P[1] = x
    for j in range(1, order):
        P[j + 1] = ((2 * j + 1) * x * P[j] - j * P[j - 1]) / (j + 1)
    scale = np.sqrt((2 * np.arange(order + 1) + 1) / 2)
    return P * scale.reshape((-1,) + (1,) * x.ndim)


def gramians_legendre(sys: TemporalSystem, dtau: float = DEFAULT_DTAU,
                      order: int = DEFAULT_LEGENDRE_ORDER) -> GramianSet:
    """Sum over segments of the truncated Parseval series of ``y_i`` on each segment."""
    if int(order) != order or order < 0:
        raise ValidationError(f"truncation order must be a nonnegative integer, got {order}")
    order = int(order)
    traj = propagate_adjoint(sys, dtau)
    n = sys.n
    W = np.zeros((n, n, n))
    starts = sys.switch_times
    for sp in traj.grid.spans:
        dt = sys.segments[sp.index].duration
        t = traj.times[sp.first:sp.last + 1]
        Y = traj.values[sp.first:sp.last + 1]
        x = 2.0 * (t - starts[sp.index]) / dt - 1.0
        wq = np.full(len(t), sp.step)
        wq[[0, -1]] = sp.step / 2
        phi = normalized_legendre(order, x)
        # q[j, i, :] = sqrt(2/dt) * int y_i(tau) phi_j(x(tau)) dtau
        q = np.sqrt(2.0 / dt) * np.einsum("jl,l,lia->jia", phi, wq, Y, optimize=True)
        W += np.einsum("jia,jib->iab", q, q)
    return GramianSet(W, "legendre", {"dtau": dtau, "order": order})


def _eigen_clash(a: np.ndarray, tol: float = 1e-8) -> bool:
    lam = np.linalg.eigvals(a)
    scale = max(1.0, np.abs(lam).max())
    return bool(np.min(np.abs(lam[:, None] + lam[None, :])) <= tol * scale)


def _lyapunov_operator(a: np.ndarray, k: int):
    n = a.shape[0]
    eye = np.eye(n)
    op = np.kron(a, eye) + np.kron(eye, a)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(op, check_finite=False)
    d = np.abs(np.diag(lu))
    if d.min() <= 1e-13 * d.max():
        raise AssumptionViolation(f"segment {k + 1}: Lyapunov operator is singular")
    return lu, piv


def gramians_lyapunov(sys: TemporalSystem) -> GramianSet:
    """Switched systems only; needs ``A_k`` and ``-A_k`` to have no common eigenvalue.

    Segments are visited last to first while ``E = e^{A_m dt_m} ... e^{A_{k+1} dt_{k+1}}``
    accumulates, and each segment adds ``E W_i^{(k)} E^T`` with
    ``A_k X + X A_k^T = -e_i e_i^T + e^{A_k dt_k} e_i e_i^T e^{A_k^T dt_k}``.
    The Lyapunov equation is solved densely through its ``n^2 x n^2``
    Kronecker form, factored once per segment and reused for every node.
    """
    mats = sys.constant_matrices()
    n = sys.n
    W = np.zeros((n, n, n))
    E = np.eye(n)
    for k in range(sys.m - 1, -1, -1):
        a, dt = mats[k], sys.segments[k].duration
        if dt == 0:
            continue
        if _eigen_clash(a):
            raise AssumptionViolation(
                f"segment {k + 1}: A_k and -A_k share an eigenvalue; the Lyapunov equation "
                "has no unique solution")
        lu, piv = _lyapunov_operator(a, k)
        ea = matrix_exponential(a, dt)
        rhs = np.einsum("ai,bi->iab", ea, ea)
        rhs[:, np.arange(n), np.arange(n)] -= np.eye(n)
        X = scipy.linalg.lu_solve((lu, piv), rhs.reshape(n, n * n).T, check_finite=False)
        X = X.T.reshape(n, n, n)
        W += np.einsum("ab,ibc,dc->iad", E, X, E, optimize=True)
        E = E @ ea
    return GramianSet(W, "lyapunov", {})


def compute_gramians(sys: TemporalSystem | None, backend: str = "quadrature", *,
                     dtau: float = DEFAULT_DTAU, order: int = DEFAULT_LEGENDRE_ORDER,
                     bundle=None) -> GramianSet:
    """Dispatch on backend name; ``datadriven`` needs a trajectory ``bundle``."""
    if backend == "quadrature":
        return gramians_quadrature(sys, dtau)
    if backend == "legendre":
        return gramians_legendre(sys, dtau, order)
    if backend == "lyapunov":
        return gramians_lyapunov(sys)
    if backend == "datadriven":
        from .datadriven import gramians_datadriven

        if bundle is None:
            raise ValidationError("the datadriven backend needs trajectory data")
        return gramians_datadriven(bundle)
    raise ValidationError(f"unknown backend {backend!r}; choose from {', '.join(BACKENDS)}")


def _check_simplex(p, n, tol=1e-8) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ValidationError(f"score vector of shape {p.shape} does not match n={n}")
    if np.any(p < -tol) or abs(p.sum() - 1) > tol:
        raise ValidationError("score vector is not on the probability simplex")
    return p


def assemble(gs: GramianSet, p) -> AssembledGramian:
    p = _check_simplex(p, gs.n)
    w = np.tensordot(p, gs.W, axes=1)
    return AssembledGramian((w + w.T) / 2, p.copy())


def min_control_energy(W, x_f) -> float:
    """``x_f^T W^{-1} x_f``: least input energy steering the origin to ``x_f``."""
    w = W.matrix if isinstance(W, AssembledGramian) else np.asarray(W, dtype=float)
    x = np.asarray(x_f, dtype=float)
    if x.shape != (w.shape[0],):
        raise ValidationError(f"target of shape {x.shape} does not match n={w.shape[0]}")
    ev = np.linalg.eigvalsh(w)
    if ev[-1] <= 0 or ev[0] <= PD_TOL * ev[-1]:
        raise NotControllableError("system not controllable on [0, t_m] with this p")
    c = scipy.linalg.cho_factor(w)
    return float(x @ scipy.linalg.cho_solve(c, x))


def save_gramians(gs: GramianSet, path) -> None:
    """Write ``n``, backend tag, parameters and the row-major stack to ``.npz``."""
    with open(path, "wb") as fh:
        np.savez(fh, W=np.ascontiguousarray(gs.W), n=np.int64(gs.n),
                 backend=np.str_(gs.backend), params=np.str_(json.dumps(gs.params, sort_keys=True)))


def load_gramians(path) -> GramianSet:
    try:
        with np.load(path, allow_pickle=False) as z:
            W = z["W"]
            n = int(z["n"])
            backend = str(z["backend"])
            params = json.loads(str(z["params"]))
    except (OSError, KeyError, ValueError) as exc:
        raise ValidationError(f"cannot read Gramian bundle {path}: {exc}") from exc
    if W.shape != (n, n, n):
        raise ValidationError(f"Gramian bundle declares n={n} but holds shape {W.shape}")
    return GramianSet(W, backend, params)
