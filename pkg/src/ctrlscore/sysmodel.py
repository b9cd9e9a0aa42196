"""Piecewise linear time-varying network systems.

A system ``dx/dt = A(t) x`` on ``[0, t_m]`` is stored as an ordered list of
segments.  Segment ``k`` carries a matrix source ``A_k(s)`` in *local* time
``s in [0, dt_k]`` and its duration ``dt_k``; the global matrix is
``A(t) = A_k(t - t_{k-1})`` for ``t_{k-1} <= t < t_k`` and the last segment
is closed on the right.

Network description documents are JSON objects::

    {"n": 10, "self_loop": -0.2, "directed": true,
     "snapshots": [{"duration": 2.0, "edges": [[7, 2, 1.0], ...]}, ...]}

Edges are 1-based ``[from, to, weight]``.  An edge ``i -> j`` sets
``A[j, i] = weight``: column is the source, row the target, so that the entry
carries the influence of ``x_i`` on ``dx_j/dt``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ValidationError

__all__ = [
    "ConstantMatrix",
    "AnalyticMatrix",
    "Segment",
    "TemporalSystem",
    "Snapshot",
    "NetworkSpec",
    "parse_network",
    "serialize_network",
    "load_network",
    "snapshot_matrix",
    "build_system",
    "aggregate",
    "evaluate_A",
]


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ConstantMatrix:
    """Time-invariant segment matrix (temporal networks, switched systems)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError(f"segment matrix must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValidationError("segment matrix has non-finite entries")
        object.__setattr__(self, "matrix", m)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def at(self, s: float) -> np.ndarray:
        return self.matrix


@dataclass(frozen=True)
class AnalyticMatrix:
    """Segment matrix given by a callable of local time.

    ``evaluator(s)`` must return an ``n x n`` array for every ``s`` in
    ``[0, duration]``.  Continuity on the closed segment and analyticity on
    its interior are the caller's responsibility; nothing here checks them.
    """

    evaluator: Callable[[float], np.ndarray]
    n: int

    def at(self, s: float) -> np.ndarray:
        a = np.asarray(self.evaluator(float(s)), dtype=float)
        if a.shape != (self.n, self.n):
            raise ValidationError(
                f"evaluator returned shape {a.shape} at s={s}, expected {(self.n, self.n)}"
            )
        return a


MatrixSource = ConstantMatrix | AnalyticMatrix


@dataclass(frozen=True)
class Segment:
    source: MatrixSource
    duration: float

    def __post_init__(self):
        d = float(self.duration)
        if not np.isfinite(d) or d < 0:
            raise ValidationError(f"segment duration must be finite and >= 0, got {self.duration}")
        object.__setattr__(self, "duration", d)


@dataclass(frozen=True)
class TemporalSystem:
    """Ordered segments sharing one state dimension."""

    segments: tuple[Segment, ...]
    node_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ValidationError("a temporal system needs at least one segment")
        n = segs[0].source.n
        for k, seg in enumerate(segs):
            if seg.source.n != n:
                raise ValidationError(f"segment {k + 1} has dimension {seg.source.n}, expected {n}")
        object.__setattr__(self, "segments", segs)
        if self.node_labels is not None:
            labels = tuple(str(s) for s in self.node_labels)
            if len(labels) != n:
                raise ValidationError(f"{len(labels)} node labels for {n} nodes")
            object.__setattr__(self, "node_labels", labels)

    @classmethod
    def from_matrices(cls, matrices: Sequence, durations: Sequence[float], node_labels=None):
        """Switched system with one constant matrix per segment."""
        if len(matrices) != len(durations):
            raise ValidationError("need exactly one duration per matrix")
        segs = tuple(Segment(ConstantMatrix(a), d) for a, d in zip(matrices, durations))
        return cls(segs, node_labels)

    @property
    def n(self) -> int:
        return self.segments[0].source.n

    @property
    def m(self) -> int:
        return len(self.segments)

    @property
    def durations(self) -> np.ndarray:
        return np.array([s.duration for s in self.segments])

    @property
    def switch_times(self) -> np.ndarray:
        """``t_0 = 0, t_1, ..., t_m``."""
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    @property
    def t_final(self) -> float:
        return float(self.durations.sum())

    @property
    def is_switched(self) -> bool:
        return all(isinstance(s.source, ConstantMatrix) for s in self.segments)

    def constant_matrices(self) -> list[np.ndarray]:
        if not self.is_switched:
            raise ValidationError("system has non-constant segments")
        return [s.source.matrix for s in self.segments]


@dataclass(frozen=True)
class Snapshot:
    duration: float
    edges: tuple[tuple[int, int, float], ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class NetworkSpec:
    """File-level description of a temporal network (1-based node indices)."""

    n: int
    self_loop: float
    directed: bool
    snapshots: tuple[Snapshot, ...]
    node_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        _validate_spec(self)


def _validate_spec(spec: NetworkSpec) -> None:
    if not isinstance(spec.n, (int, np.integer)) or isinstance(spec.n, bool) or spec.n < 1:
        raise ValidationError(f"n must be a positive integer, got {spec.n!r}")
    if not np.isfinite(spec.self_loop):
        raise ValidationError("self_loop must be finite")
    if not spec.snapshots:
        raise ValidationError("at least one snapshot is required")
    for k, snap in enumerate(spec.snapshots, start=1):
        if not np.isfinite(snap.duration) or snap.duration < 0:
            raise ValidationError(f"snapshot {k}: negative or non-finite duration {snap.duration}")
        seen = set()
        for e in snap.edges:
            i, j, w = e
            for v in (i, j):
                if not 1 <= v <= spec.n:
                    raise ValidationError(f"snapshot {k}: node index {v} outside [1, {spec.n}]")
            if not np.isfinite(w):
                raise ValidationError(f"snapshot {k}: non-finite weight on edge {i}->{j}")
            key = (i, j) if spec.directed else (min(i, j), max(i, j))
            if key in seen:
                raise ValidationError(f"snapshot {k}: duplicate edge {i}->{j}")
            seen.add(key)
    if spec.node_labels is not None and len(spec.node_labels) != spec.n:
        raise ValidationError("node_labels length must equal n")


def _as_int(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or float(v) != int(v):
        raise ValidationError(f"{what} must be an integer, got {v!r}")
    return int(v)


def _as_float(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{what} must be a number, got {v!r}")
    return float(v)


def parse_network(text: str) -> NetworkSpec:
    """Parse a JSON network description into a validated :class:`NetworkSpec`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed network document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError("network document must be a JSON object")
    missing = {"n", "snapshots"} - doc.keys()
    if missing:
        raise ValidationError(f"network document lacks field(s): {', '.join(sorted(missing))}")
    n = _as_int(doc["n"], "n")
    self_loop = _as_float(doc.get("self_loop", 0.0), "self_loop")
    directed = doc.get("directed", True)
    if not isinstance(directed, bool):
        raise ValidationError("directed must be a boolean")
    if not isinstance(doc["snapshots"], list):
        raise ValidationError("snapshots must be an array")
    snaps = []
    for k, s in enumerate(doc["snapshots"], start=1):
        if not isinstance(s, dict) or "duration" not in s:
            raise ValidationError(f"snapshot {k} must be an object with a duration")
        edges = []
        for e in s.get("edges", []):
            if not isinstance(e, list) or len(e) not in (2, 3):
                raise ValidationError(f"snapshot {k}: edge must be [from, to] or [from, to, weight]")
            w = _as_float(e[2], "weight") if len(e) == 3 else 1.0
            edges.append((_as_int(e[0], "node index"), _as_int(e[1], "node index"), w))
        snaps.append(Snapshot(_as_float(s["duration"], "duration"), tuple(edges)))
    labels = doc.get("node_labels")
    return NetworkSpec(n, self_loop, directed, tuple(snaps),
                       tuple(labels) if labels is not None else None)


def serialize_network(spec: NetworkSpec) -> str:
    doc = {
        "n": spec.n,
        "self_loop": spec.self_loop,
        "directed": spec.directed,
        "snapshots": [
            {"duration": s.duration, "edges": [[i, j, w] for i, j, w in s.edges]}
            for s in spec.snapshots
        ],
    }
    if spec.node_labels is not None:
        doc["node_labels"] = list(spec.node_labels)
    return json.dumps(doc, indent=2)


def load_network(path) -> NetworkSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_network(fh.read())


def snapshot_matrix(spec: NetworkSpec, k: int) -> np.ndarray:
    """System matrix of snapshot ``k`` (0-based)."""
    n = spec.n
    a = np.zeros((n, n))
    for i, j, w in spec.snapshots[k].edges:
        a[j - 1, i - 1] += w
        if not spec.directed and i != j:
            a[i - 1, j - 1] += w
    # applied once, after edges, in both modes
    a[np.diag_indices(n)] += spec.self_loop
    return a


def build_system(spec: NetworkSpec) -> TemporalSystem:
    mats = [snapshot_matrix(spec, k) for k in range(len(spec.snapshots))]
    return TemporalSystem.from_matrices(mats, [s.duration for s in spec.snapshots],
                                        spec.node_labels)


def aggregate(sys: TemporalSystem) -> TemporalSystem:
    """Single-segment LTI surrogate with the duration-weighted mean matrix."""
    if not sys.is_switched:
        raise ValidationError("aggregation needs constant segments only")
    tm = sys.t_final
    if tm <= 0:
        raise ValidationError("cannot aggregate a system with zero horizon")
    if sys.m == 1:
        return sys
    mats = sys.constant_matrices()
    a = sum(d * m for d, m in zip(sys.durations, mats)) / tm
    return TemporalSystem.from_matrices([a], [tm], sys.node_labels)


def _locate(sys: TemporalSystem, t: float) -> tuple[int, float]:
    """Segment index and local time for global time ``t``."""
    tm = sys.t_final
    if not 0.0 <= t <= tm:
        raise ValidationError(f"time {t} outside [0, {tm}]")
    if tm == 0:
        return 0, 0.0
    starts = sys.switch_times
    last = max(k for k, s in enumerate(sys.segments) if s.duration > 0)
    for k in range(last + 1):
        if sys.segments[k].duration > 0 and (t < starts[k + 1] or k == last):
            return k, min(t - starts[k], sys.segments[k].duration)
    raise AssertionError("unreachable")


def evaluate_A(sys: TemporalSystem, t: float) -> np.ndarray:
    """``A(t)`` with right-open segments, the last one closed; empty segments skipped."""
    k, s = _locate(sys, float(t))
    return sys.segments[k].source.at(s)
