# %% [markdown]
# Bell-pair erasure code
#
# Logical |0> is a product of n copies of (|00>+|11>)/sqrt(2) and logical |1>
# uses (|01>+|10>)/sqrt(2).  When a qubit is lost at a known place, its
# partner is measured in the +/- basis and a logical phase fix is applied if
# needed.  The code is one Bell pair shorter afterwards and can be grown back.

# %%
import numpy as np

from probeqec.codes import (ProbeSettings, UnrecoverableLossError, erasure_encode, erasure_grow,
                            erasure_recover, input_state, logical_state)
from probeqec.noise import lose_qubit

rng = np.random.default_rng(5)
probes = ProbeSettings()
c0, c1 = 0.6, 0.8j
n = 3

# %% Encode, lose every qubit in turn, recover, regrow
for lost in range(2 * n):
    s, lay = input_state("erasure", c0, c1, n)
    erasure_encode(s, lay, probes, rng)
    lose_qubit(s, lost, rng)
    small = erasure_recover(s, lay, lost, probes, rng)
    f_small = s.extract(small.qubits).fidelity(logical_state("erasure", c0, c1, n - 1))
    big = erasure_grow(s, small, probes, rng)
    f_big = s.extract(big.qubits).fidelity(logical_state("erasure", c0, c1, n))
    print(f"lost qubit {lost + 1}: n-1 pairs fidelity {f_small:.10f}, regrown {f_big:.10f}")

# %% Losing both halves of a Bell pair is beyond repair
s, lay = input_state("erasure", c0, c1, n)
erasure_encode(s, lay, probes, rng)
lose_qubit(s, 2, rng)
lose_qubit(s, 3, rng)
try:
    erasure_recover(s, lay, 2, probes, rng)
except UnrecoverableLossError as exc:
    print("double loss:", exc)
