"""How snapshot durations and order move the scores.

Networks 1, 3, 4 share the snapshot order (a, b, c, d) with increasingly
uneven durations; networks 5, 6, 7 use (b, d, a, c).  Small duration changes
move the scores a little, large ones move them more.  The uniqueness
certificate is checked first so each score vector is the only optimum.

    python3 demos/time_parameters.py
"""

import numpy as np

from ctrlscore import Objective, builtin_system, gramians_quadrature, solve, uniqueness_certificate

scores = {}
for k in (1, 3, 4, 5, 6, 7):
    sys = builtin_system(f"net{k}")
    cert = uniqueness_certificate(sys)
    scores[k] = solve(Objective("vcs", gramians_quadrature(sys))).p
    second = np.argsort(-scores[k], kind="stable")[1] + 1
    print(f"net{k}: certificate {cert.verdict} (ratio {cert.singular_ratio:.1e}), "
          f"VCS second node {second}")

for a, b in ((1, 3), (1, 4), (5, 6), (5, 7)):
    print(f"max |VCS(net{a}) - VCS(net{b})| = {np.abs(scores[a] - scores[b]).max():.4f}")
