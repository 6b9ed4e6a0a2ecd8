# %% [markdown]
# Parity gate walkthrough
#
# A coherent probe passes two qubits, picking up +theta from the first and
# -theta from the second when they are |1>.  Even-parity branches leave the
# probe where it started, odd ones shift it by +-theta, so reading the probe
# tells the two subspaces apart without touching the superposition inside
# each one.

# %%
import numpy as np

from probeqec import HybridState, ProbeMode, init_state, parity_gate

rng = np.random.default_rng(2024)
probe = ProbeMode(alpha=30.9)
theta = 0.1

# %% Couple the probe by hand to see the branch phases
state = init_state(["+", "+"])
pid = state.attach_probe(probe)
state.apply_conditional_phase(0, pid, theta)
state.apply_conditional_phase(1, pid, -theta)
print("qubits and probe phase after both couplings:")
print(state.format_branches())

# %% The full gate: measure the probe, keep the matching subspace
for trial in range(4):
    s = init_state(["+", "+"])
    out = parity_gate(s, 0, 1, probe, theta, rng)
    print(f"trial {trial}: {out.parity.name:4s}")
    print(s.format_branches())

# %% convert_to_even flips the second qubit on an odd outcome, so the
# output is always c0|00> + c1|11>: the basic entangler
s = HybridState.from_amplitudes(2, {0b00: 0.5, 0b01: 0.5, 0b10: 0.5, 0b11: 0.5})
out = parity_gate(s, 0, 1, probe, theta, rng, convert_to_even=True)
print("read", out.parity.name, "->")
print(s.format_branches())
