# %% [markdown]
# Probe read-out errors
#
# |alpha> and |alpha e^{+-i theta}> are not orthogonal, so a homodyne
# measurement sometimes files an odd state under "even".  The closed form is
# erfc(|alpha| sin(theta) / sqrt(2)) / 2.  Photon counting on the displaced
# probe misses with probability exp(-4 |alpha|^2 sin^2(theta/2)).

# %%
import math

from probeqec import Backend, ProbeMode, p_err, p_miss_photon
from probeqec.experiments import ExperimentConfig, run_trials

theta = 0.1

# %% The closed forms over a range of probe strengths
print(" |a|sin(t)     P_err(homodyne)   P_miss(photon count)")
for x in (1.0, 2.0, 3.09, 4.0):
    alpha = x / math.sin(theta)
    print(f"{x:10.2f}   {p_err(alpha, theta):14.4e}   {p_miss_photon(alpha, theta):14.4e}")

# %% Monte Carlo check at |alpha| sin(theta) = 3.09 with a million shots
alpha = 3.09 / math.sin(theta)
for backend in (Backend.HOMODYNE, Backend.PHOTON_NUMBER):
    cfg = ExperimentConfig(code="parity", parity_input="odd", theta=theta, trials=1_000_000,
                           probe=ProbeMode(alpha, backend=backend), seed=7)
    st = run_trials(cfg)
    lo, hi = st.wilson_95
    print(f"{backend.value:14s} misread rate {st.logical_error_rate:.3e}  95% CI [{lo:.3e}, {hi:.3e}]")
print(f"closed form (homodyne): {p_err(alpha, theta):.3e}")
