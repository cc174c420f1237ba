"""
Pulse shapes of the two diffracted fields.

Walks from the readout kernels to the D and D' signals at I_t = 1.3, then
passes the same traces through a 0.5 us detector.
"""
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pulsepair import (IntensityParams, build_kernel, detector_convolve,
                       equal_writing_state, eval_fr, eval_gr, pulse_signals)
from pulsepair.scan import microseconds_to_units

# %% The two kernels
# Every pulse is built from f_r and g_r, which depend on the total read
# intensity only.  At I_t = 1.3 both ring once and decay within ~20/Gamma.
t = np.linspace(0, 20, 2001)
k = build_kernel(1.3)
fig, ax = plt.subplots()
ax.plot(t, eval_fr(k, t), label="f_r")
ax.plot(t, eval_gr(k, t), label="g_r")
ax.set_xlabel("Gamma t")
ax.legend()
fig.savefig("kernels.png", dpi=120)

# %% Four read splits
# ratio is I_R'/I_R.  With almost all light in R the D' pulse is tiny; at
# equal split the two pulses differ only through f_r versus g_r weighting.
stored = equal_writing_state()
ratios = [0.02, 0.57, 1.04, 1.76]
traces = [pulse_signals(IntensityParams.from_ratio(1.3, r), stored, t) for r in ratios]

fig, axes = plt.subplots(4, 1, sharex=True, figsize=(5, 8))
for ax, r, tr in zip(axes, ratios, traces):
    ax.plot(tr.times, tr.s_d, label="D")
    ax.plot(tr.times, tr.s_dp, label="D'")
    ax.set_title(f"I_R'/I_R = {r}", fontsize=9)
axes[0].legend()
axes[-1].set_xlabel("Gamma t")
fig.tight_layout()
fig.savefig("pulse_shapes.png", dpi=120)

# %%
"""
Slow detector.  The cesium D2 linewidth makes 0.5 us about 16/Gamma, so the
measured pulses are mostly detector response.  Energies survive the filter.
"""
tau = microseconds_to_units(0.5)
for r, tr in zip(ratios, traces):
    sm = detector_convolve(tr, tau)
    print(f"ratio {r}: raw energies {tr.energies()}, filtered {sm.energies()}")
