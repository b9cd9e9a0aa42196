"""Built-in benchmark temporal networks.

Ten nodes, four snapshot graphs (a)-(d) with unit edge weights and a
self-loop of -0.2 on every node.  Seven temporal networks differ in edge
orientation, snapshot order and durations; every one has horizon 8.
``aggK`` is the duration-weighted aggregate of ``netK``.
"""

from __future__ import annotations

from .errors import ValidationError
from .sysmodel import NetworkSpec, Snapshot, TemporalSystem, aggregate, build_system

N_NODES = 10
SELF_LOOP = -0.2

SNAPSHOT_EDGES = {
    "a": ((2, 10), (3, 8), (7, 2), (7, 3), (9, 1), (10, 6)),
    "b": ((4, 6), (7, 1), (7, 4), (9, 1)),
    "c": ((1, 5), (2, 10), (3, 8), (7, 2), (7, 3), (10, 6)),
    "d": ((1, 5), (4, 6), (7, 1), (7, 4)),
}

# network id -> (directed, snapshot order, durations)
TEMPORAL_NETWORKS = {
    1: (True, "abcd", (2.0, 2.0, 2.0, 2.0)),
    2: (False, "abcd", (2.0, 2.0, 2.0, 2.0)),
    3: (True, "abcd", (1.9, 2.1, 2.2, 1.8)),
    4: (True, "abcd", (0.5, 2.8, 1.8, 2.9)),
    5: (True, "bdac", (2.0, 2.0, 2.0, 2.0)),
    6: (True, "bdac", (2.1, 1.8, 1.9, 2.2)),
    7: (True, "bdac", (2.8, 2.9, 0.5, 1.8)),
}

BUILTIN_IDS = tuple(f"net{k}" for k in TEMPORAL_NETWORKS) + tuple(
    f"agg{k}" for k in TEMPORAL_NETWORKS)


def network_spec(k: int) -> NetworkSpec:
    try:
        directed, order, durations = TEMPORAL_NETWORKS[k]
    except KeyError:
        raise ValidationError(f"no built-in temporal network {k}") from None
    snaps = tuple(
        Snapshot(d, tuple((i, j, 1.0) for i, j in SNAPSHOT_EDGES[s]))
        for s, d in zip(order, durations)
    )
    return NetworkSpec(N_NODES, SELF_LOOP, directed, snaps)


def builtin_system(name: str) -> TemporalSystem:
    """``"net1"``..``"net7"`` or ``"agg1"``..``"agg7"``."""
    if name not in BUILTIN_IDS:
        raise ValidationError(f"unknown built-in network {name!r}; choose from {', '.join(BUILTIN_IDS)}")
    sys = build_system(network_spec(int(name[3:])))
    return aggregate(sys) if name.startswith("agg") else sys
