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
# # Importance vs uniform amplitude transforms
#
# Both engines prepare `sum_j P(psi_j)|j> / norm`.  The uniform engine
# applies `P` to the diagonal encoding acting on `|+>^n`, so its success
# probability carries a factor `1/N`.  The importance engine applies
# `P(x)/x` to `|psi>` itself and avoids that factor when `P(0) = 0`.

# %%
import numpy as np

from ampforge.applications import benchmark_tanh, loglog_slope, relative_spread
from ampforge.approx import approx_tanh
from ampforge.engine import function_transform
from ampforge.instances import random_real_state

# %% [markdown]
# ## One transform
#
# `function_transform` picks the polynomial degree from the error budget and
# routes to the importance engine because the tanh series vanishes at zero.

# %%
u = random_real_state(5, seed=1)
state, rep = function_transform(u, approx_tanh(10), 1e-2)
for key, value in rep.to_dict().items():
    print(f"{key:>22}: {value}")

# %% [markdown]
# ## Query counts against `n`
#
# The importance engine's query count stays flat; the uniform engine's grows
# like `2^(n/2)`.

# %%
rows = benchmark_tanh(range(4, 11), 1e-2, 0)
print(" n  importance   uniform")
for r in rows:
    print(f"{r['n']:>2}  {r['queries_importance']:>10}  {r['queries_uniform']:>8}")

spread = relative_spread([r["queries_importance"] for r in rows])
slope = loglog_slope([2 ** (r["n"] / 2) for r in rows], [r["queries_uniform"] for r in rows])
print(f"importance spread {spread:.3f}, uniform slope vs 2^(n/2) {slope:.3f}")
