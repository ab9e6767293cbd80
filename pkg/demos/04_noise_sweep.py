# %% [markdown]
# # Extra background light
#
# A constant extra background is added to every detector while the signal
# stays at 100 photons per window. Probabilities are normalized raw counts,
# so at low SNR the estimate drifts toward the maximally mixed state.
# A smaller ensemble keeps this demo under a minute.

# %%
from dataclasses import replace

from megtomo import noise_sweep
from megtomo.config import load_preset, scenario_from_dict

base = replace(scenario_from_dict(*load_preset("noise_mub_1e2")), n_states=20, n_noise_repeats=2)

# %%
points = noise_sweep(base, [0, 100, 500, 1000, 2000, 2500])
for level, point in points.items():
    tail = point.stats.tail_infidelity
    print(f"extra {level:6g}/window  SNR {point.snr:10.3g}  converged infidelity "
          f"{tail.median:.3f} [{tail.q25:.3f}, {tail.q75:.3f}]")

# %% [markdown]
# The same sweep with the known dark and ambient offsets subtracted from the
# counts before normalization:

# %%
sub = replace(base, noise=replace(base.noise, subtract_offsets=True))
for level, point in noise_sweep(sub, [0, 1000, 2500]).items():
    print(f"extra {level:6g}/window  converged infidelity {point.stats.tail_infidelity.median:.3f}")
