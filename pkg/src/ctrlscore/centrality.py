"""Comparison centralities: control-energy indices and per-snapshot scores."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import CtrlScoreError, ValidationError
from .gramian import DEFAULT_LEGENDRE_ORDER, GramianSet, compute_gramians
from .optimize import Objective, solve
from .sysmodel import TemporalSystem
from .transition import DEFAULT_DTAU

__all__ = ["CentralityTable", "control_energy_centralities", "generalized_scores"]


@dataclass(frozen=True)
class CentralityTable:
    """One value per node; ``ranking`` lists 0-based nodes by decreasing value."""

    kind: str
    values: np.ndarray
    network: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def ranking(self) -> np.ndarray:
        return np.argsort(-self.values, kind="stable")


def _positive_spectrum(w):
    lam = np.linalg.eigvalsh(w)
    top = lam[-1]
    if top <= 0:
        return lam[:0]
    tol = max(w.shape[0] * np.finfo(float).eps * top, 1e-12 * top)
    return lam[lam > tol]


def control_energy_centralities(gs: GramianSet, network: str = "") -> dict[str, CentralityTable]:
    """Volumetric (VCE), average control energy (ACE) and average controllability (AC).

    VCE sums the logs of the positive eigenvalues of ``W_i``; ACE is
    ``-tr(pinv(W_i))`` over the same spectrum; AC is ``tr(W_i)``.
    """
    vce, ace, ac = [], [], []
    for w in gs.W:
        lam = _positive_spectrum(w)
        vce.append(float(np.sum(np.log(lam))))
        ace.append(float(-np.sum(1.0 / lam)))
        ac.append(float(np.trace(w)))
    meta = {"backend": gs.backend}
    return {
        "VCE": CentralityTable("VCE", np.array(vce), network, meta),
        "ACE": CentralityTable("ACE", np.array(ace), network, meta),
        "AC": CentralityTable("AC", np.array(ac), network, meta),
    }


def generalized_scores(sys: TemporalSystem, kind: str = "vcs", backend: str = "lyapunov",
                       dtau: float = DEFAULT_DTAU, order: int = DEFAULT_LEGENDRE_ORDER,
                       **solver) -> list[np.ndarray]:
    """Score vector of each snapshot's LTI system ``A_k`` on ``[0, dt_k]``.

    This is the per-snapshot reading of the generalized controllability
    score: snapshots are scored independently, so reordering snapshots only
    reorders the output.
    """
    if not sys.is_switched:
        raise ValidationError("generalized scores need constant snapshot matrices")
    out = []
    for k, seg in enumerate(sys.segments):
        if seg.duration <= 0:
            raise ValidationError(f"snapshot {k + 1} has zero duration")
        lti = TemporalSystem((seg,), sys.node_labels)
        try:
            gs = compute_gramians(lti, backend, dtau=dtau, order=order)
            out.append(solve(Objective(kind, gs), **solver).p)
        except CtrlScoreError as exc:
            raise type(exc)(f"snapshot {k + 1}: {exc}") from exc
    return out
