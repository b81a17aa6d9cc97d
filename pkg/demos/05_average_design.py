"""
Percentile design against mean design
=====================================

Minimising the mean latency picks a different compression ratio and, read
as a latency budget, holds only a little over half of the time.
"""

from edgeloop.loop import Case
from edgeloop.optimize import solve_p1, solve_p2_average
from edgeloop.scenario import CALIBRATED_SCENARIO, load_scenario

s = load_scenario(CALIBRATED_SCENARIO).to_params().with_robot_freq(5e9)
eps = 1e-4
avg = solve_p2_average(s, Case.COMPRESS_AT_ROBOT, eps)
print(f"mean design: Q = {avg.q_opt:.3f}, mean latency {avg.tau_opt_s * 1e3:.1f} ms, "
      f"met with probability {avg.rho_achieved:.3f}")

print(f"\n{'rho_th':>7} {'Q':>5} {'tau ms':>8}")
for rho in (0.6, 0.8, 0.9, 0.95, 0.99):
    r = solve_p1(s, Case.COMPRESS_AT_ROBOT, eps, rho)
    print(f"{rho:7.2f} {r.q_opt:5.2f} {r.tau_opt_s * 1e3:8.0f}")
