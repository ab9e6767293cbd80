# %% [markdown]
# # Tracking one qutrit
#
# A Haar-random state evolves under a random Hamiltonian. Each iteration
# measures one randomly chosen MUB with photon counting, and the estimator
# takes one matrix-exponentiated-gradient step.

# %%
import numpy as np

from megtomo import EvolutionSpec, MegConfig, NoiseConfig, haar_random_pure, make_rng, mub_family, track
from megtomo.states import random_hermitian

rng = make_rng(3)
psi0 = haar_random_pure(3, rng)
evolution = EvolutionSpec.default(random_hermitian(3, rng), 300)
noise = NoiseConfig(signal_rate=1e6, dark_rate=100, background_rate=50)

trace = track(psi0, evolution, mub_family(3), noise, MegConfig(), rng)

# %%
for t in (1, 2, 3, 4, 5, 10, 50, 100, 300):
    k = t - 1
    print(f"t={t:3d}  infidelity={trace.infidelity[k]:.2e}  purity={trace.purity[k]:.4f}  "
          f"|p_pred - p_true|={np.mean(np.abs(trace.p_pred[k] - trace.p_true[k])):.3f}")

# %% [markdown]
# The predicted computational-basis probabilities follow the rotating state:

# %%
print(np.column_stack([trace.p_true[::50], trace.p_pred[::50]]))
