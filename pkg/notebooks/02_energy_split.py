"""
Total diffracted energy against the read split.

The balanced split gives the least energy once I_t is past ~1, and the
depth of that dip saturates at large intensity.
"""
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pulsepair import asymptote_curve, energy_scan, find_minimum

# %% Scans at five total intensities
fig, ax = plt.subplots()
for i_t in (0.01, 0.1, 1.3, 10, 100):
    curve = energy_scan(i_t, 101)
    res = find_minimum(curve)
    ax.plot(curve.i_r / i_t, curve.u_t, label=f"I_t = {i_t}")
    print(f"I_t={i_t}: min at I_R/I_t = {res.i_r_star / i_t:.3f}, "
          f"U_T = {res.u_t_star:.4f}, interior = {res.has_interior_min}")
ax.set_xlabel("I_R / I_t")
ax.set_ylabel("U_T / U_T(I_R = 0)")
ax.legend()
fig.savefig("energy_split.png", dpi=120)

# %%
"""
Depth of the dip.  For small I_t the kernels nearly coincide and the curve is
flat; for large I_t the ratio settles just above 0.275.
"""
curve = asymptote_curve(np.logspace(-3, 4, 25))
i_t, ratio = np.array(curve).T
fig, ax = plt.subplots()
ax.semilogx(i_t, ratio, "o-")
ax.axhline(ratio[-1], ls=":", c="k")
ax.set_xlabel("I_t")
ax.set_ylabel("U_T(I_t/2) / U_T(0)")
fig.savefig("asymptote.png", dpi=120)
print("ratio at I_t = 1e4:", ratio[-1])
