# %% [markdown]
# Monte Carlo sweeps
#
# ``run_trials`` repeats encode, noise, correct and compare with one seeded
# generator per trial; ``sweep`` varies one parameter.  Rates come with a
# 95% Wilson interval.

# %%
from dataclasses import replace

from probeqec import NoiseSpec, ProbeMode
from probeqec.codes import SyndromeMode
from probeqec.experiments import ExperimentConfig, sweep


def show(rows, axis):
    print(f"{axis:>10s}  rate      95% CI              mean fidelity")
    for r in rows:
        lo, hi = r.stats.wilson_95
        print(f"{r.value:10.4g}  {r.stats.logical_error_rate:.4f}   [{lo:.4f}, {hi:.4f}]   "
              f"{r.stats.mean_fidelity:.5f}")


# %% Bit-flip code under iid X noise: the rate follows 3p^2 - 2p^3
base = ExperimentConfig(code="bitflip3", trials=2000, seed=1,
                        syndrome_mode=SyndromeMode.MOD4)
show(sweep(base, "p_x", [0.01, 0.05, 0.1, 0.2]), "p_x")

# %% Probe loss dephases the qubits through the light that escapes
parity = ExperimentConfig(code="parity", parity_input="even", trials=5000,
                          probe=ProbeMode(30.9))
show(sweep(parity, "eta2", [0.0, 0.035 ** 2, 0.1 ** 2]), "eta2")

# %% Erasure code under random loss
erasure = ExperimentConfig(code="erasure", n=3, trials=1000,
                           noise=NoiseSpec(p_loss=0.05), seed=4)
show(sweep(erasure, "p_loss", [0.02, 0.05, 0.1]), "p_loss")

# %% Coupling-strength jitter on the Shor code
shor = replace(ExperimentConfig(code="shor9", trials=60, seed=2), noise=NoiseSpec())
show(sweep(shor, "theta_jitter", [0.0, 0.02, 0.05]), "jitter")
