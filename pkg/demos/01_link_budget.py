"""
Link budget and retransmission delay
====================================

How a link's outage target turns into a transmission rate, a packet
airtime and finally a random block transmission time.
"""

import numpy as np

from edgeloop.radio import avg_snr, packet_count, packet_time, rate, tx_time_model
from edgeloop.scenario import CALIBRATED_SCENARIO, load_scenario

s = load_scenario(CALIBRATED_SCENARIO).to_params()
link = s.link_robot
print(f"mean SNR on the robot uplink: {avg_snr(link):.1f}")

# A stricter outage target forces a lower SNR threshold, hence a slower rate.
# Fewer retransmissions do not make up for it: the block takes longer.
n = packet_count(s.sensing_bits, link.packet_bits)
print(f"\n{n} packets of {link.packet_bits} bits")
print(f"{'epsilon':>9} {'rate Mbit/s':>12} {'t_p ms':>8} {'mean ms':>9} {'sd ms':>7}")
for eps in np.geomspace(1e-4, 1e-2, 5):
    tx = tx_time_model(n, eps, packet_time(link, eps))
    print(f"{eps:9.1e} {rate(link, eps) / 1e6:12.3f} {tx.t_packet_s * 1e3:8.3f} "
          f"{tx.mu_s * 1e3:9.2f} {tx.sigma_s * 1e3:7.3f}")
