# %% [markdown]
# # Designing drift-robust π pulses
#
# A sequence of N π pulses with phases φ_l suppresses amplitude drifts up to
# t^n when its toggling-frame moments c'_p vanish for p ≤ n.  For n = 1 and
# N = 5 there are exactly two solution families; for larger n a multistart
# solver finds instances.

# %%
import numpy as np

from pla_forge import PulseSequence, design, get
from pla_forge.sequences import toggling_phases

np.set_printoptions(precision=4, suppress=True)

# %% [markdown]
# ## The two five-pulse PLA(1) families

# %%
for variant in ("F1", "PLA1_2"):
    seq = design.closed_form_pla1(variant)
    rep = design.check_pla(seq, 1)
    print(f"{variant:7s} lab phases (deg) {np.degrees(seq.phases)}")
    print(f"        toggling (deg)   {np.degrees(toggling_phases(seq))}")
    print(f"        residuals {np.array(rep.residuals)}  satisfied={rep.satisfied}")

# %% [markdown]
# A blind multistart search lands only in those two families.

# %%
cfg = design.SolverConfig(n=1, pulses=5, restarts=40, seed=0)
found = [c for c in design.multistart(cfg) if c.converged]
labels = []
for c in found:
    seq = PulseSequence("candidate", c.phases)
    labels.append("F1" if design.equivalent(seq, get("F1")) else
                  "PLA1_2" if design.equivalent(seq, get("PLA1_2")) else "other")
print({k: labels.count(k) for k in ("F1", "PLA1_2", "other")})

# %% [markdown]
# ## Higher orders
#
# PLA(2) with nine pulses and PLA(3) with eleven.

# %%
for n, pulses in ((2, 9), (3, 11)):
    seq = design.solve_pla(design.SolverConfig(n=n, pulses=pulses, restarts=10, seed=1))
    rep = design.check_pla(seq, n)
    print(f"PLA({n}) N={pulses}: max residual {max(rep.residuals):.1e}")
    print("  phases (deg)", np.degrees(seq.phases))
