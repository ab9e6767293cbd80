# %% [markdown]
# # Convergence statistics over Haar-random states
#
# Runs the shipped presets for the stationary qutrit at low and high signal,
# and reports iterations to reach 10 % infidelity as median with quartiles.
# Each ensemble of 50 states takes a few seconds.

# %%
from megtomo import aggregate, run_ensemble
from megtomo.config import load_preset, scenario_from_dict

# %%
for name in ("table1_mub_1e6_stationary", "table1_mub_1e2_stationary",
             "table1_pauli_1e2_stationary"):
    cfg = scenario_from_dict(*load_preset(name))
    stats = aggregate(run_ensemble(cfg), cfg.threshold)
    its = stats.iterations_to_threshold
    mean = stats.mean_infidelity
    print(f"{name:30s} iterations {its.median} (+{its.q75 - its.median:g}/-{its.median - its.q25:g})"
          f"  mean infidelity {100 * mean.median:.2f}%  censored {stats.censored_fraction:.0%}")
