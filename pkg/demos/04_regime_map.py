# %% [markdown]
# # When does PLA(2) beat F1?
#
# F1 has the lower DC limit, since its second-order static term cancels, but
# PLA(2) filters harder.  The ratio of their predicted infidelities over
# (ω/Ω, σ/Ω) shows a triangular window where PLA(2) wins.  The dashed lines
# are the closed-form asymptotic boundaries.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pla_forge import get, regime_boundaries, regime_map

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

# %%
ref, alt = get("F1"), get("PLA2_1")
w = np.geomspace(1e-4, 0.5, 150)
s = np.geomspace(1e-4, 1e-1, 100)
ratio = regime_map(ref, alt, w, s)
lower, upper = regime_boundaries(ref, alt, s)

fig, ax = plt.subplots(figsize=(6, 4))
mesh = ax.pcolormesh(w, s, np.log10(ratio), cmap="RdBu_r", vmin=-3, vmax=3, shading="auto")
ax.plot(lower, s, "k--", upper, s, "k--")
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlim(w[0], w[-1])
ax.set_xlabel("ω/Ω")
ax.set_ylabel("σ/Ω")
fig.colorbar(mesh, label="log10 infidelity ratio PLA(2)/F1")
fig.tight_layout()
fig.savefig(OUT / "regime_map.png", dpi=120)

rabi = 2 * np.pi * 239e3
print(f"at Ω = 2π·239 kHz the window spans {lower[0] * rabi / (2 * np.pi):.0f} Hz "
      f"to {upper[0] * rabi / (2 * np.pi) / 1e3:.1f} kHz")
