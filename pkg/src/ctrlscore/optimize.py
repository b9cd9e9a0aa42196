"""Controllability scores by projected gradient over the probability simplex.

Two convex objectives of the input allocation ``p`` are supported:

* ``vcs``  -- ``g(p) = -log det W(p)`` (volume of the reachable ellipsoid);
* ``aecs`` -- ``h(p) = tr(W(p)^{-1})`` (average minimum control energy).

Gramians of unstable networks are badly conditioned (condition numbers of
1e9 are routine), and evaluating ``g`` or ``h`` on the raw matrices then
carries rounding noise larger than the decrease the line search has to
certify.  :class:`Objective` therefore works in coordinates whitened at the
uniform allocation, ``W~_i = T W_i T^T`` with ``T W(u) T^T = I``.  Both
objectives transform exactly:

    -log det W(p) = -log det W~(p) + log det W(u)
    tr(W(p)^{-1}) = tr(W~(p)^{-1} D),   D = T T^T

and the gradients are unchanged, so the iterates are those of the plain
method, only computed with far smaller rounding error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotControllableError, NumericalError, ValidationError
from .gramian import PD_TOL, GramianSet
from .sysmodel import TemporalSystem
from .transition import DEFAULT_DTAU, propagate_adjoint

__all__ = [
    "KINDS",
    "Objective",
    "SolveReport",
    "Certificate",
    "project_simplex",
    "objective_value",
    "objective_gradient",
    "armijo_step",
    "solve",
    "uniqueness_certificate",
]

KINDS = ("vcs", "aecs")
DEFAULT_EPS = 1e-7
DEFAULT_SIGMA = 1e-4
DEFAULT_RHO = 0.5
DEFAULT_ALPHA0 = 1.0
DEFAULT_MAX_ITERS = 50_000
DEFAULT_MAX_TRIALS = 60


def project_simplex(v) -> np.ndarray:
    """Euclidean projection onto ``{p : p >= 0, sum p = 1}`` (sort-based, O(n log n))."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise ValidationError("projection needs a nonempty vector")
    if not np.all(np.isfinite(v)):
        raise ValidationError("cannot project a vector with non-finite entries")
    if v.min() >= 0 and abs(v.sum() - 1.0) <= 1e-12:
        return v.copy()
    u = np.sort(v, kind="stable")[::-1]
    css = np.cumsum(u) - 1.0
    j = np.arange(1, v.size + 1)
    r = np.nonzero(u - css / j > 0)[0][-1]
    theta = css[r] / (r + 1)
    return np.maximum(v - theta, 0.0)


class Objective:
    """VCS or AECS objective over a fixed :class:`GramianSet`.

    ``whiten=False`` evaluates on the raw Gramians; it exists for
    cross-checking and is not recommended for ill-conditioned problems.
    """

    def __init__(self, kind: str, gramians: GramianSet, whiten: bool = True):
        if kind not in KINDS:
            raise ValidationError(f"unknown score kind {kind!r}; choose vcs or aecs")
        self.kind = kind
        self.gramians = gramians
        n = gramians.n
        W = np.asarray(gramians.W)
        ev, U = np.linalg.eigh(W.mean(axis=0))
        if whiten and ev[0] > PD_TOL * ev[-1]:
            T = U.T / np.sqrt(ev)[:, None]
            Wt = np.einsum("ab,ibc,dc->iad", T, W, T, optimize=True)
            self._W = (Wt + Wt.transpose(0, 2, 1)) / 2
            self._D = 1.0 / ev
            self._logdet_shift = float(np.sum(np.log(ev)))
        else:
            self._W = W
            self._D = np.ones(n)
            self._logdet_shift = 0.0

    @property
    def n(self) -> int:
        return self.gramians.n

    def _factor(self, p):
        w = np.tensordot(p, self._W, axes=1)
        lam, V = np.linalg.eigh((w + w.T) / 2)
        if not lam[-1] > 0 or lam[0] <= PD_TOL * lam[-1]:
            return None
        return lam, V

    def value(self, p) -> float:
        f = self._factor(np.asarray(p, dtype=float))
        if f is None:
            return np.inf
        lam, V = f
        if self.kind == "vcs":
            return float(-np.sum(np.log(lam)) - self._logdet_shift)
        # tr(W~^{-1} D) = sum_k (v_k^T D v_k) / lam_k
        return float(np.sum((V * V * self._D[:, None]).sum(axis=0) / lam))

    def gradient(self, p) -> np.ndarray:
        f = self._factor(np.asarray(p, dtype=float))
        if f is None:
            raise NotControllableError("W(p) is not positive definite; gradient undefined")
        lam, V = f
        if self.kind == "vcs":
            B = (V / lam) @ V.T
        else:
            Winv = (V / lam) @ V.T
            B = (Winv * self._D) @ Winv
        # tr(B W~_i) for every i in one contraction
        return -np.einsum("ab,iba->i", B, self._W, optimize=True)


def objective_value(obj: Objective, p) -> float:
    """Objective at ``p``; ``+inf`` when ``W(p)`` is not positive definite."""
    return obj.value(p)


def objective_gradient(obj: Objective, p) -> np.ndarray:
    return obj.gradient(p)


def _armijo(obj, p, fp, grad, sigma, rho, alpha0, max_trials):
    if not (0 < sigma < 1 and 0 < rho < 1 and alpha0 > 0):
        raise ValidationError("need sigma, rho in (0, 1) and alpha0 > 0")
    alpha = alpha0
    for trial in range(max_trials):
        q = project_simplex(p - alpha * grad)
        fq = obj.value(q)
        if fq <= fp + sigma * float(grad @ (q - p)):
            return alpha, q, fq
        alpha *= rho
    raise NumericalError(f"Armijo backtracking found no acceptable step in {max_trials} trials")


def armijo_step(obj: Objective, p, grad, sigma: float = DEFAULT_SIGMA, rho: float = DEFAULT_RHO,
                alpha0: float = DEFAULT_ALPHA0, max_trials: int = DEFAULT_MAX_TRIALS) -> float:
    """Largest ``alpha0 * rho^k`` passing the projected sufficient-decrease test."""
    p = np.asarray(p, dtype=float)
    return _armijo(obj, p, obj.value(p), np.asarray(grad, dtype=float),
                   sigma, rho, alpha0, max_trials)[0]


@dataclass
class SolveReport:
    p: np.ndarray
    value: float
    iterations: int
    converged: bool
    terminal_gap: float
    kind: str
    history: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    iterates: list | None = None


def solve(obj: Objective, eps: float = DEFAULT_EPS, sigma: float = DEFAULT_SIGMA,
          rho: float = DEFAULT_RHO, alpha0: float = DEFAULT_ALPHA0,
          max_iters: int = DEFAULT_MAX_ITERS, p0=None, keep_iterates: bool = False,
          max_trials: int = DEFAULT_MAX_TRIALS) -> SolveReport:
    """Projected gradient with Armijo steps, started at the uniform allocation.

    Stops when two consecutive iterates are within ``eps``.  ``p0`` overrides
    the starting point (it must be feasible).
    """
    n = obj.n
    p = np.full(n, 1.0 / n) if p0 is None else project_simplex(p0)
    fp = obj.value(p)
    if not np.isfinite(fp):
        where = "uniform allocation" if p0 is None else "the given starting point"
        raise NotControllableError(f"system not controllable under {where}")
    report = SolveReport(p, fp, 0, False, np.inf, obj.kind, [fp])
    if keep_iterates:
        report.iterates = [p]
    if n == 1:
        report.converged, report.terminal_gap = True, 0.0
        return report
    for k in range(1, max_iters + 1):
        grad = obj.gradient(p)
        try:
            alpha, q, fq = _armijo(obj, p, fp, grad, sigma, rho, alpha0, max_trials)
        except NumericalError:
            # every step length moves p by at most the full-step displacement;
            # if that is already below eps the method has converged
            gap = float(np.linalg.norm(project_simplex(p - alpha0 * grad) - p))
            if gap > eps:
                raise
            report.converged, report.terminal_gap = True, gap
            return report
        gap = float(np.linalg.norm(q - p))
        p, fp = q, fq
        report.p, report.value, report.iterations, report.terminal_gap = p, fp, k, gap
        report.history.append(fp)
        report.steps.append(alpha)
        if keep_iterates:
            report.iterates.append(p)
        if gap <= eps:
            report.converged = True
            break
    return report


@dataclass(frozen=True)
class Certificate:
    """``R_ij = int_0^{t_m} Phi(t_m, tau)_ij^2 dtau``; regular ``R`` implies unique scores."""

    R: np.ndarray
    det_R: float
    min_singular_value: float
    singular_ratio: float
    verdict: str


REGULAR_RATIO = 1e-8
SINGULAR_RATIO = 1e-12


def uniqueness_certificate(sys: TemporalSystem, dtau: float = DEFAULT_DTAU) -> Certificate:
    traj = propagate_adjoint(sys, dtau)
    w = traj.grid.trapezoid_weights()
    # Phi(t_m, tau)_ij = Y(tau)_ji
    R = np.einsum("l,lji->ij", w, traj.values ** 2)
    s = np.linalg.svd(R, compute_uv=False)
    ratio = float(s[-1] / s[0]) if s[0] > 0 else 0.0
    if ratio > REGULAR_RATIO:
        verdict = "regular"
    elif ratio < SINGULAR_RATIO:
        verdict = "singular"
    else:
        verdict = "near-singular"
    return Certificate(R, float(np.linalg.det(R)), float(s[-1]), ratio, verdict)
