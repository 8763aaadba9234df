# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # Maximum finding and state preparation
#
# Two applications built on the transform engines.

# %%
import numpy as np

from ampforge.applications import MaxFindSpec, StatePrepSpec, find_maximum, prepare_state
from ampforge.approx import approx_gaussian
from ampforge.instances import oracle_from_real, planted_gap_state

# %% [markdown]
# ## Largest amplitude
#
# A steep erf mask centred just below the known top amplitude suppresses
# every other entry.  The state has a planted gap of 0.2 between the two
# largest amplitudes.

# %%
v, top = planted_gap_state(3, 0.2, seed=4)
print("amplitudes:", np.round(v, 4), "true index:", top)

index, rep = find_maximum(MaxFindSpec(oracle_from_real(v), float(v[top]), 0.2, 0.1))
print("found index:", index, "top probability:", round(rep.details["top_probability"], 6))

# %% [markdown]
# ## Sampling a Gaussian into amplitudes
#
# `prepare_state` returns a state within `eps` of the normalized samples of
# `f` on a uniform grid of `2^n` points.

# %%
f = approx_gaussian(10, 1.0)
state, rep = prepare_state(StatePrepSpec(f, (-1.0, 1.0), 8, 1e-2))
samples = f.func(np.linspace(-1, 1, 256))
print("l2 error:", np.linalg.norm(state.amplitudes - samples / np.linalg.norm(samples)))
print("queries:", rep.controlled_U_queries)
