"""
Quantile bounds around the convolved latency
============================================

The 95th percentile of the loop latency always lands between the largest
component percentile and the sum of component percentiles.  The gaps are
listed for the raw-offload design across outage targets.
"""

import numpy as np

from edgeloop.bounds import bound_gap_surface
from edgeloop.loop import Case
from edgeloop.scenario import CALIBRATED_SCENARIO, load_scenario

s = load_scenario(CALIBRATED_SCENARIO).to_params()
rows = bound_gap_surface(s, Case.RAW_OFFLOAD, [1.0], np.geomspace(1e-4, 1e-2, 6), 0.95)
print(f"{'epsilon':>9} {'lower':>8} {'tau*':>8} {'upper':>8}   (ms)")
for r in rows:
    print(f"{r.epsilon:9.1e} {r.tau_lower * 1e3:8.1f} {r.tau_opt * 1e3:8.1f} {r.tau_upper * 1e3:8.1f}")

# with compression the sandwich holds on the whole (Q, epsilon) grid too
grid = bound_gap_surface(s, Case.COMPRESS_AT_ROBOT, np.arange(1.05, 1.51, 0.05), [1e-4, 1e-3, 1e-2], 0.95)
print("\nsmallest gaps on the compression grid (ms):",
      round(min(r.gap_lower for r in grid) * 1e3, 2), round(min(r.gap_upper for r in grid) * 1e3, 2))
