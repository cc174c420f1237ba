"""
Where the read energy goes, and recovering I_t from pulse energies.
"""
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pulsepair import (IntensityParams, fit_it, full_budget,
                       synthetic_fit_data)

# %% Emission budget at I_t = 10
# Spontaneous and stimulated totals do not care how the light is split.  The
# non-phase-matched term scales like I_R I_R' and peaks at the balanced split,
# which is what carves the dip in the diffracted energy.
i_t = 10.0
fr = np.linspace(0, 1, 21)
rows = [full_budget(IntensityParams(i_t * x, i_t * (1 - x))).as_row() for x in fr]
fig, ax = plt.subplots()
for key in ("u_spont", "u_stim_total", "u_npm_total"):
    ax.plot(fr, [r[key] for r in rows], label=key)
ax.set_xlabel("I_R / I_t")
ax.legend()
fig.savefig("budget.png", dpi=120)

# %% Fit round trip
# Two free channel scales are eliminated in closed form, leaving a 1-D search
# over I_t.  With 11 points and 2% noise the estimate scatters by about 0.08.
clean = synthetic_fit_data(1.3)
print("noiseless:", fit_it(clean).i_t_hat)
est = [fit_it(synthetic_fit_data(1.3, noise=0.02, seed=s)).i_t_hat for s in range(20)]
print(f"2% noise, 20 seeds: mean {np.mean(est):.3f}, std {np.std(est):.3f}")
