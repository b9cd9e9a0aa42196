"""Scores and energy centralities of the ten-node benchmark network.

Computes per-node Gramians once, solves for both score vectors, and prints
them next to the three control energy centralities.  The temporal network
and its time-averaged aggregate give different rankings.

    python3 demos/score_benchmark.py
"""

import numpy as np

from ctrlscore import Objective, builtin_system, control_energy_centralities, gramians_quadrature, solve


def table(name):
    gs = gramians_quadrature(builtin_system(name))
    vcs = solve(Objective("vcs", gs)).p
    aecs = solve(Objective("aecs", gs)).p
    cent = control_energy_centralities(gs, name)
    print(f"\n{name}")
    print(" node    VCS   AECS      VCE      ACE       AC")
    for i in range(gs.n):
        print(f"{i + 1:5d} {vcs[i]:6.3f} {aecs[i]:6.3f} {cent['VCE'].values[i]:8.3f} "
              f"{cent['ACE'].values[i]:8.3f} {cent['AC'].values[i]:8.3f}")
    return vcs, aecs


if __name__ == "__main__":
    v1, a1 = table("net1")
    v0, a0 = table("agg1")
    print(f"\nVCS top node: temporal {np.argmax(v1) + 1}, aggregate {np.argmax(v0) + 1}")
    print(f"AECS top node: temporal {np.argmax(a1) + 1}, aggregate {np.argmax(a0) + 1}")
