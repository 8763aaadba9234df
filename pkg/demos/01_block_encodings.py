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
# # Diagonal block-encodings of amplitudes
#
# A state-preparation oracle `U|0> = sum_j psi_j |j>` can be turned into a
# unitary whose top-left block is `diag(psi)`.  This notebook builds that
# circuit for a small random state, checks the block, and then looks at the
# sin-ladder encoding used for grid states.

# %%
import numpy as np

from ampforge.block_encoding import extract_block, verify_encoding
from ampforge.circuits import build_diag_encoding, build_sin_ladder
from ampforge.instances import random_real_state

np.set_printoptions(precision=4, suppress=True)

# %% [markdown]
# ## A seeded oracle
#
# Qubit 0 is the most significant bit, and ancillas come first, so the
# encoded block is the top-left corner of the full matrix.

# %%
u = random_real_state(3, seed=7)
psi = u.real_amplitudes()
print("amplitudes:", psi)

be = build_diag_encoding(u)
print("qubits:", be.unitary.n_qubits, "ancillas:", be.ancillas, "queries:", be.unitary.controlled_U_queries)

# %% [markdown]
# `extract_block` returns `alpha` times the top-left block, so it should
# equal `diag(psi)` to machine precision.

# %%
block = extract_block(be)
print(np.diag(block).real)
print("max deviation:", verify_encoding(be, np.diag(psi)))

# %% [markdown]
# ## The sin ladder
#
# Controlled `Ry` rotations with angles `2^-j` encode `sin(x_k)` on the
# grid `x_k = k / 2^n`.  The normalization `alpha` stays below 4 as `n`
# grows.

# %%
for n in range(1, 9):
    ladder = build_sin_ladder(n)
    print(f"n={n}  alpha={ladder.alpha:.4f}")
