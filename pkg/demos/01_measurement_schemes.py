# %% [markdown]
# # Measurement schemes for a qutrit
#
# Two informationally complete families of projective measurements:
# the four mutually unbiased bases (MUBs) and the eigenbases of the eight
# generalized Pauli (Gell-Mann) operators.

# %%
import numpy as np

from megtomo import generalized_pauli_operators, is_informationally_complete, mub_family, pauli_family

np.set_printoptions(precision=3, suppress=True)

# %%
mubs = mub_family(3)
for basis in mubs.bases:
    print(basis.label)
    print(basis.vectors)

# %% [markdown]
# Any state of one basis overlaps every state of another basis with
# probability exactly 1/3.

# %%
overlap = np.abs(mubs[1].vectors.conj().T @ mubs[3].vectors) ** 2
print(overlap)

# %% [markdown]
# The generalized Pauli operators are traceless, Hermitian and orthogonal
# under the trace inner product, with tr(A B) = 2 when A = B.

# %%
ops = generalized_pauli_operators(3)
gram = np.array([[np.trace(a @ b).real for b in ops] for a in ops])
print(gram)
print(ops[-1] * np.sqrt(3))

# %%
for fam in (mubs, pauli_family(3)):
    print(fam.scheme, len(fam), "bases, complete:", is_informationally_complete(fam))
