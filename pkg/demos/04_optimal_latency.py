"""
Optimal latency against outage target
=====================================

For each outage target the compression ratio that minimises the 95th
percentile is found by the bound-pruned grid search.  Compressing pays off
when the link is slow; as the outage target relaxes the best ratio falls
back to 1 and both designs coincide.
"""

import numpy as np

from edgeloop.optimize import sweep_epsilon
from edgeloop.scenario import CALIBRATED_SCENARIO, load_scenario

base = load_scenario(CALIBRATED_SCENARIO).to_params()
eps = np.geomspace(1e-4, 1e-2, 5)
for f_r in (1e9, 5e9, 10e9):
    print(f"\nrobot CPU {f_r / 1e9:g} GHz")
    print(f"{'epsilon':>9} {'q_opt':>6} {'compress ms':>12} {'raw ms':>8}")
    for r in sweep_epsilon(base.with_robot_freq(f_r), list(eps), 0.95):
        print(f"{r.epsilon:9.1e} {r.q_case1:6.2f} {r.tau_case1 * 1e3:12.0f} {r.tau_case2 * 1e3:8.0f}")
