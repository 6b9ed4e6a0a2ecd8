"""Acceptance suite: one marked group per criterion.

The terminal summary prints a PASS/FAIL line for each criterion (see
``conftest.py``).  Run on its own with ``pytest tests/test_acceptance.py``.
"""

import itertools
import math
import time

import mpmath
import numpy as np
import pytest

from probeqec import Backend, HybridState, ProbeMode, parity_gate, symmetrizer_gate
from probeqec.cli import main
from probeqec.codes import (ProbeSettings, SyndromeMode, bitflip3_correct,
                            bitflip3_encode, disentangle_block, erasure_encode, erasure_grow,
                            erasure_recover, input_state, logical_state, shor_correct_cycle)
from probeqec.experiments import ExperimentConfig, encode, run_trials
from probeqec.noise import lose_qubit

from conftest import KET, S2, dense_fidelity, kron, random_vector

P = ProbeSettings()


def criterion(number, title):
    return pytest.mark.criterion(number, title)


# -- 1 ------------------------------------------------------------------------

@criterion(1, "homodyne misclassification at |alpha| sin(theta) = 3.09 matches erfc/2")
def test_intrinsic_error_anchor():
    theta = 0.1
    alpha = 3.09 / math.sin(theta)
    target = float(mpmath.erfc(mpmath.mpf("3.09") / mpmath.sqrt(2)) / 2)
    assert target == pytest.approx(1.0e-3, rel=0.01)
    n = 10_000_000
    cfg = ExperimentConfig(code="parity", parity_input="odd", theta=theta, trials=n, seed=1,
                           probe=ProbeMode(alpha, backend=Backend.HOMODYNE))
    t0 = time.perf_counter()
    stats = run_trials(cfg)
    elapsed = time.perf_counter() - t0
    sigma = math.sqrt(target * (1 - target) / n)
    print(f"rate {stats.logical_error_rate:.6g} target {target:.6g} sigma {sigma:.3g} "
          f"in {elapsed:.1f}s")
    assert abs(stats.logical_error_rate - target) < 3 * sigma
    assert elapsed <= 60


# -- 2 ------------------------------------------------------------------------

@criterion(2, "probe-loss dephasing of the odd branches decays as exp(-gamma)")
def test_dephasing_anchor():
    eta, theta = 0.035, 0.1
    alpha = 3.09 / theta
    gamma = eta ** 2 * alpha ** 2 * theta ** 2 / 2
    assert gamma == pytest.approx(5.85e-3, rel=1e-3)
    target = math.exp(-gamma)
    probe = ProbeMode(alpha, eta2=eta ** 2)
    rng = np.random.default_rng(2)
    n = 100_000
    samples = np.empty(n)
    for i in range(n):
        s = HybridState.from_amplitudes(2, {0b01: S2, 0b10: S2})
        parity_gate(s, 0, 1, probe, theta, rng)
        a = s.amplitudes()
        samples[i] = 2 * (a[0b10] * np.conj(a[0b01])).real
    mean = samples.mean()
    sigma = samples.std(ddof=1) / math.sqrt(n)
    print(f"coherence {mean:.6f} target {target:.6f} sigma {sigma:.2g}")
    assert abs(mean - target) < 3 * sigma


# -- 3 ------------------------------------------------------------------------

# flipped qubit (0-based) -> binary syndrome, mod-4 syndrome
SYNDROME_TABLE = {None: ((1, 1), 0), 0: ((-1, 1), 2), 1: ((-1, -1), 3), 2: ((1, -1), 1)}


@criterion(3, "bit-flip syndrome table reproduced in binary and mod-4 modes")
def test_syndrome_table():
    t0 = time.perf_counter()
    ref = logical_state("bitflip3", 0.6, 0.8)
    rng = np.random.default_rng(3)
    for flipped, (binary, mod4) in SYNDROME_TABLE.items():
        for mode, want in ((SyndromeMode.BINARY, binary), (SyndromeMode.MOD4, mod4)):
            s, lay = input_state("bitflip3", 0.6, 0.8)
            bitflip3_encode(s, lay, P, rng, mode)
            if flipped is not None:
                s.apply_gate(flipped, "X")
            rec = bitflip3_correct(s, lay, P, rng, mode)
            assert rec.entries[0].value == want, (flipped, mode)
            assert s.fidelity(ref) == pytest.approx(1, abs=1e-10)
    assert time.perf_counter() - t0 < 1


# -- 4 ------------------------------------------------------------------------

@criterion(4, "Shor code corrects all 27 single-qubit Pauli errors")
def test_shor_sweep():
    t0 = time.perf_counter()
    rng = np.random.default_rng(4)
    c0, c1 = 0.6, 0.8j
    ref = logical_state("shor9", c0, c1)
    for q, kind in itertools.product(range(9), "XYZ"):
        s, lay = input_state("shor9", c0, c1)
        encode(s, lay, P, rng)
        s.apply_gate(q, kind)
        shor_correct_cycle(s, lay, P, rng)
        assert s.fidelity(ref) == pytest.approx(1, abs=1e-10), (q, kind)
    assert time.perf_counter() - t0 < 10


@criterion(4, "Shor code corrects all 27 single-qubit Pauli errors")
@pytest.mark.parametrize("sign", [1, -1])
def test_disentangling_identity(sign):
    rng = np.random.default_rng(40)
    lead = KET["+"] if sign > 0 else KET["-"]
    phi = (kron(KET["0"], KET["0"]) + kron(KET["1"], KET["1"])) * S2
    for _ in range(20):
        s = HybridState.from_amplitudes(3, {0b000: S2, 0b111: sign * S2})
        disentangle_block(s, (0, 1, 2), P, rng)
        assert dense_fidelity(s.to_vector(), kron(lead, phi)) == pytest.approx(1, abs=1e-10)


# -- 5 ------------------------------------------------------------------------

@criterion(5, "erasure code recovers each single loss and regrows (n = 2, 3)")
@pytest.mark.parametrize("n", [2, 3])
def test_erasure_sweep(n):
    rng = np.random.default_rng(50 + n)
    c0, c1 = 0.6, 0.8j
    for lost in range(2 * n):
        for _ in range(10):
            s, lay = input_state("erasure", c0, c1, n)
            erasure_encode(s, lay, P, rng)
            lose_qubit(s, lost, rng)
            small = erasure_recover(s, lay, lost, P, rng)
            assert s.extract(small.qubits).fidelity(logical_state("erasure", c0, c1, n - 1)) \
                == pytest.approx(1, abs=1e-10)
            big = erasure_grow(s, small, P, rng)
            assert s.extract(big.qubits).fidelity(logical_state("erasure", c0, c1, n)) \
                == pytest.approx(1, abs=1e-10)


@criterion(5, "erasure code recovers each single loss and regrows (n = 2, 3)")
@pytest.mark.parametrize("lost", range(4))
def test_loss_marginals(lost):
    rng = np.random.default_rng(60 + lost)
    s0, lay = input_state("erasure", 0.6, 0.8j, 2)
    erasure_encode(s0, lay, P, rng)
    keep = [q for q in range(4) if q != lost]
    psi = np.moveaxis(s0.to_vector().reshape(2, 2, 2, 2), lost, 0).reshape(2, 8)
    oracle = psi.T @ psi.conj()
    n = 10_000
    acc = np.empty((n, 8, 8), dtype=complex)
    for i in range(n):
        s = s0.copy()
        lose_qubit(s, lost, rng)
        v = s.extract(keep).to_vector()
        acc[i] = np.outer(v, v.conj())
    mean = acc.mean(axis=0)
    sd = np.sqrt(acc.real.var(axis=0, ddof=1) + acc.imag.var(axis=0, ddof=1))
    tol = 3 * sd / math.sqrt(n) + 1e-12
    assert np.all(np.abs(mean - oracle) <= tol)


# -- 6 ------------------------------------------------------------------------

def fock_coherent(alpha, dim):
    c = np.empty(dim, dtype=complex)
    c[0] = math.exp(-abs(alpha) ** 2 / 2)
    for k in range(1, dim):
        c[k] = c[k - 1] * alpha / math.sqrt(k)
    return c


def branch_to_fock(state, pid, alpha, dim):
    """Rebuild sum_b amp_b |bits_b> |alpha e^{i phi_b}> in the truncated space."""
    n = state.num_qubits
    out = np.zeros((1 << n) * dim, dtype=complex)
    for b in state.branches:
        idx = int("".join(map(str, b.bits)), 2)
        basis = np.zeros(1 << n)
        basis[idx] = 1
        coh = fock_coherent(alpha * np.exp(1j * b.probe_phase[pid]), dim)
        out += b.amplitude * np.kron(basis, coh)
    return out


GATES = {"X": np.array([[0, 1], [1, 0]]), "Z": np.diag([1, -1]),
         "H": np.array([[1, 1], [1, -1]]) * S2}


@criterion(6, "branch-analytic probe evolution matches truncated Fock brute force")
def test_fock_oracle():
    rng = np.random.default_rng(6)
    for case in range(30):
        n = int(rng.integers(1, 5))
        alpha = float(rng.uniform(0.5, 4.0))
        dim = int(math.ceil(alpha ** 2 + 10 * alpha + 20))
        v = random_vector(rng, n)
        s = HybridState.from_vector(v)
        pid = s.attach_probe(ProbeMode(alpha))
        joint = np.kron(v, fock_coherent(alpha, dim))
        number = np.arange(dim)
        for _ in range(int(rng.integers(1, 7))):
            q = int(rng.integers(n))
            theta = float(rng.uniform(-math.pi, math.pi))
            s.apply_conditional_phase(q, pid, theta)
            # exp(+i theta |1><1|_q n): phase theta * n on the |1> half of qubit q
            bit = (np.arange(1 << n) >> (n - 1 - q)) & 1
            joint = joint * np.exp(1j * theta * np.outer(bit, number)).ravel()
            if rng.random() < 0.5:
                g = str(rng.choice(list(GATES)))
                s.apply_gate(q, g)
                op = kron(*[GATES[g] if i == q else np.eye(2) for i in range(n)])
                joint = np.kron(op, np.eye(dim)) @ joint
        overlap = abs(np.vdot(branch_to_fock(s, pid, alpha, dim), joint)) ** 2
        assert overlap >= 1 - 1e-8, (case, overlap)


# -- 7 ------------------------------------------------------------------------

@criterion(7, "gate identities: symmetrizer, parity preservation, encode = direct")
def test_symmetrizer_eigenstate():
    rng = np.random.default_rng(70)
    xx = np.kron(GATES["X"], GATES["X"])
    for bits in range(4):
        for _ in range(10):
            v = np.zeros(4, dtype=complex)
            v[bits] = 1
            s = HybridState.from_vector(v)
            symmetrizer_gate(s, 0, 1, P.probe, P.theta, rng)
            w = s.to_vector()
            assert np.allclose(xx @ w, w, atol=1e-10)


@criterion(7, "gate identities: symmetrizer, parity preservation, encode = direct")
def test_parity_preserves_subspaces():
    rng = np.random.default_rng(71)
    for subspace in ((0b00, 0b11), (0b01, 0b10)):
        for _ in range(50):
            c = random_vector(rng, 1)
            v = np.zeros(4, dtype=complex)
            v[list(subspace)] = c
            s = HybridState.from_vector(v)
            out = parity_gate(s, 0, 1, P.probe, P.theta, rng)
            assert out.even == (subspace[0] == 0b00)
            assert dense_fidelity(s.to_vector(), v) == pytest.approx(1, abs=1e-10)


@criterion(7, "gate identities: symmetrizer, parity preservation, encode = direct")
@pytest.mark.parametrize("code,n", [("bitflip3", None), ("phaseflip3", None), ("shor9", None),
                                    ("erasure", 1), ("erasure", 2), ("erasure", 3)])
def test_encode_equals_direct(code, n):
    rng = np.random.default_rng(72)
    for mode in SyndromeMode:
        for _ in range(5):
            c = random_vector(rng, 1)
            s, lay = input_state(code, c[0], c[1], n)
            encode(s, lay, P, rng, mode)
            assert s.fidelity(logical_state(code, c[0], c[1], n)) == pytest.approx(1, abs=1e-10)


# -- 8 ------------------------------------------------------------------------

DETERMINISM_CONFIG = """\
[experiment]
code = shor9
trials = 30
seed = 8
haar = true

[probe]
alpha = 30.9
theta = 0.1

[noise]
p_x = 0.03
p_z = 0.03
theta_jitter = 0.02

[sweep]
axis = p_z
values = 0.0, 0.03, 0.1
"""


@criterion(8, "config + seed reproduces byte-identical CSV")
@pytest.mark.parametrize("command", ["run", "sweep"])
def test_determinism(tmp_path, command):
    # ``run`` also sweeps when a [sweep] section is present; drop it for a single row
    text = DETERMINISM_CONFIG if command == "sweep" else DETERMINISM_CONFIG.split("[sweep]")[0]
    cfg = tmp_path / "exp.ini"
    cfg.write_text(text)
    outs = []
    for k in range(2):
        out = tmp_path / f"{command}{k}.csv"
        assert main([command, str(cfg), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert len(outs[0].splitlines()) == (2 if command == "run" else 4)
