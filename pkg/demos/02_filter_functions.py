# %% [markdown]
# # Filter functions: a ladder of high-pass filters
#
# The amplitude filter function h_a(f) of a PLA(n) sequence rolls off as
# f^(2n+4) at low frequency.  The primitive pulse and the Knill sequence set
# the baseline.

# %%
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pla_forge import catalog, filter_function, filter_order

OUT = Path(__file__).with_name("output")
OUT.mkdir(exist_ok=True)

# %%
seqs = catalog()
rabi = seqs[0].rabi
w = np.geomspace(1e-4, 10, 400)
f = w * rabi / (2 * np.pi)

fig, ax = plt.subplots(figsize=(6, 4))
for seq in seqs:
    fo = filter_order(seq)
    ax.loglog(w, filter_function(seq, f), label=f"{seq.name} (slope {fo.slope:.2f})")
ax.set_xlabel("ω/Ω")
ax.set_ylabel("h_a")
ax.set_ylim(1e-40, 10)
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "filter_functions.png", dpi=120)
print("wrote", OUT / "filter_functions.png")
