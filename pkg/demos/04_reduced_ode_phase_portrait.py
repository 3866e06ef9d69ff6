"""Phase portrait of the reduced center-manifold ODE.

In scaled variables the dynamics near the critical speed collapse to
Q_XX = 3Q - (3/2)(gamma^2 - 3gamma + 3) Q^2: a saddle at the origin whose
stable and unstable manifolds coincide in the explicit homoclinic loop
through (Q0, 0) with Q0 = 3/(gamma^2 - 3gamma + 3).  The loop is the
small-amplitude solitary wave; orbits inside it are periodic waves.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from solwave import explicit_homoclinic, explicit_homoclinic_slope, integrate_reduced_ode
from solwave.asymptotics import homoclinic_peak, reduced_ode_energy

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

gamma = -1.0
q0 = homoclinic_peak(gamma)
print(f"gamma = {gamma}: homoclinic loop crosses the Q axis at Q0 = {q0:.6f}")

fig, ax = plt.subplots(figsize=(6.5, 5))

# the homoclinic loop itself, by shooting from deep on the unstable manifold
traj = integrate_reduced_ode(
    explicit_homoclinic(gamma, -12.0), explicit_homoclinic_slope(gamma, -12.0),
    gamma, (-12.0, 12.0), 1e-3)
ax.plot(traj[:, 1], traj[:, 2], "C3", lw=2, label="homoclinic loop")
drift = np.max(np.abs(reduced_ode_energy(traj[:, 1], traj[:, 2], gamma)))
print(f"energy drift along the shot homoclinic: {drift:.2e}")

# closed orbits inside the loop, runaway orbits outside
for q_start in (0.32, 0.36, 0.40):
    t = integrate_reduced_ode(q_start, 0.0, gamma, (0.0, 12.0), 1e-3)
    ax.plot(t[:, 1], t[:, 2], "C0", lw=0.9)
for q_start in (-0.02, -0.05):
    t = integrate_reduced_ode(q_start, 0.0, gamma, (0.0, 1.8), 1e-3)
    ax.plot(t[:, 1], t[:, 2], "C7", lw=0.9)
    ax.plot(t[:, 1], -t[:, 2], "C7", lw=0.9)

ax.plot([0, q0], [0, 0], "ko", ms=5)
ax.annotate("saddle", (0, 0), textcoords="offset points", xytext=(6, 8))
ax.annotate(r"$(Q_0, 0)$", (q0, 0), textcoords="offset points", xytext=(6, 8))
ax.set_xlabel("Q")
ax.set_ylabel("P = dQ/dX")
ax.set_title(f"reduced ODE phase portrait, gamma = {gamma}")
ax.set_xlim(-0.12, 0.55)
ax.set_ylim(-0.28, 0.28)
ax.legend(loc="lower right")

fig.tight_layout()
fig.savefig(os.path.join(OUT, "phase_portrait.png"), dpi=130)
print(f"wrote {OUT}/phase_portrait.png")
