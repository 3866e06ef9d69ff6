"""Linear dispersion and the conjugate-flow functions.

The linearization about the laminar flow has a nontrivial bounded kernel
exactly when gamma + alpha = k coth(k) for a real wavenumber k.  Since
k coth(k) >= 1 with equality only at k = 0, no such wavenumber exists in
the solitary regime gamma + alpha < 1: the solitary branch bifurcates
from the long-wave limit k = 0 at alpha_cr = 1 - gamma.

The second panel shows the laminar Bernoulli constant qhat(d) and flow
force shat(d) as functions of the asymptotic depth d.  qhat is strictly
convex with qhat(1) = 1, and the unique conjugate depth d* != 1 with
qhat(d*) = qhat(1) always carries a different flow force: front-type
(bore) solutions connecting two distinct depths are impossible.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from solwave import Parameters, conjugate_depth, d_critical, dispersion_root, qhat, shat
from solwave.strip_harmonics import dtn_symbol

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

# --- dispersion: the symbol and a few roots --------------------------------
k = np.linspace(0.0, 4.0, 400)
fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
ax1.plot(k, dtn_symbol(k), label=r"$k\,\coth k$")
for target, style in ((0.9, "C3"), (1.2, "C2"), (2.0, "C4")):
    ax1.axhline(target, color=style, lw=0.8, ls="--")
    root = dispersion_root(0.0, target)
    status = "no root" if root.k is None else f"k = {root.k:.4f}"
    print(f"gamma + alpha = {target}: {status}")
    if root.k is not None:
        ax1.plot([root.k], [target], "o", color=style)
ax1.set_xlabel("k")
ax1.set_ylabel(r"$k\,\coth k$")
ax1.set_title("dispersion relation: no real root below the minimum 1")
ax1.legend()

# --- conjugate flows for gamma = -1, alpha = 0.5 ---------------------------
p = Parameters(gamma=-1.0, alpha=0.5)
d = np.linspace(0.3, 4.0, 400)
dcr, dstar = d_critical(p), conjugate_depth(p)
print(f"gamma={p.gamma}, alpha={p.alpha}: d_cr = {dcr:.6f}, d_* = {dstar:.6f}")
print(f"shat(d_*) - shat(1) = {shat(dstar, p) - shat(1.0, p):.6f} (> 0: no bores)")
ax2.plot(d, [qhat(x, p) for x in d], label=r"$\hat{Q}(d)$")
ax2.plot(d, [shat(x, p) for x in d], label=r"$\hat{S}(d)$")
ax2.axvline(1.0, color="k", lw=0.8)
ax2.axvline(dstar, color="C3", lw=0.8, ls="--")
ax2.annotate("unit depth", (1.0, qhat(1.0, p)), textcoords="offset points",
             xytext=(5, 10))
ax2.annotate(r"$d_*$", (dstar, qhat(dstar, p)), textcoords="offset points",
             xytext=(5, 10))
ax2.set_xlabel("asymptotic depth d")
ax2.set_title("conjugate flows share qhat but never shat")
ax2.legend()

fig.tight_layout()
fig.savefig(os.path.join(OUT, "dispersion_and_conjugate_flows.png"), dpi=130)
print(f"wrote {OUT}/dispersion_and_conjugate_flows.png")
