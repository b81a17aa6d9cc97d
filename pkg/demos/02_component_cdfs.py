"""
Component latency distributions
===============================

Transmission time against outage target, and compression time against
compression ratio.  Both are read off the discretized component laws.
"""

from edgeloop.dist import discretize
from edgeloop.loop import COMPRESS, TX_FB, build_case1, build_case2
from edgeloop.scenario import CALIBRATED_SCENARIO, load_scenario

s = load_scenario(CALIBRATED_SCENARIO).to_params()
step = 1e-3

# uplink of the raw sensing data: higher outage tolerance -> faster rate
# the spread is tiny next to the shift, so percentiles say more than a CDF table
print("uplink time percentiles (ms)")
print("epsilon        5%       50%       95%")
for eps in (1e-4, 1e-3, 1e-2):
    p = discretize(build_case2(s, eps).component(TX_FB), 1e-4)
    print(f"{eps:7.0e}  " + "".join(f"{p.quantile(r) * 1e3:10.1f}" for r in (0.05, 0.5, 0.95)))

# compression on a 5 GHz robot CPU: larger ratios cost more cycles per bit
fast = s.with_robot_freq(5e9)
print("\nP(compression time <= t), f_R = 5 GHz")
ts = [0.002, 0.005, 0.01, 0.02]
print("Q     " + "".join(f"{t * 1e3:>8.0f}ms" for t in ts))
for q in (1.1, 1.2, 1.3):
    p = discretize(build_case1(fast, q, 1e-3).component(COMPRESS), step)
    print(f"{q:<5} " + "".join(f"{p.cdf_at(t):10.4f}" for t in ts))

# Q = 1 means nothing to compress: a step at zero
p = discretize(build_case1(s, 1.0, 1e-3).component(COMPRESS), step)
print("\nQ = 1 compression PMF:", list(p.to_rows()))
