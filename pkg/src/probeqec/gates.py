"""Parity, symmetrizer and single-probe syndrome gates.

A probe picks up its phase from each qubit in turn.  Photon loss happens while
the probe travels between consecutive couplings: a gate with ``m`` couplings
has ``m - 1`` lossy legs, each losing ``1 - (1 - eta2)**(1/(m-1))`` of the
photons, so the whole gate loses ``eta2``.  For the two-qubit parity gate the
lost light has only seen the first qubit, which dephases the qubit pair at
rate ``eta2 |alpha|^2 (1 - cos theta)``.
"""

from __future__ import annotations

from .measurement import (Mod4Config, Mod4Syndrome, Parity, ParityOutcome,
                          measure_probe_parity, measure_probe_phase_mod4)
from .noise import jittered_theta
from .state import HybridState, ProbeMode, apply_probe_dephasing


def couple(state: HybridState, probe: ProbeMode, couplings, rng, jitter: float = 0.0) -> int:
    """Attach ``probe`` and run it past ``[(qubit, theta), ...]`` in order.

    Returns the probe id.  The probe is left attached for read-out.
    """
    qubits = [q for q, _ in couplings]
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubits must be distinct, got {qubits}")
    for q in qubits:
        state._check_live(q)
    pid = state.attach_probe(probe)
    legs = len(couplings) - 1
    leg_loss = 1.0 - (1.0 - probe.eta2) ** (1.0 / legs) if legs and probe.eta2 > 0 else 0.0
    for i, (q, theta) in enumerate(couplings):
        if i and leg_loss:
            apply_probe_dephasing(state, pid, rng, fraction=leg_loss)
        state.apply_conditional_phase(q, pid, jittered_theta(theta, jitter, rng))
    return pid


def parity_gate(state: HybridState, q1: int, q2: int, probe: ProbeMode, theta: float,
                rng, convert_to_even: bool = False, jitter: float = 0.0) -> ParityOutcome:
    """Project qubits ``q1, q2`` onto even or odd Z-parity.

    With ``convert_to_even`` an odd outcome is followed by X on ``q2``.
    """
    pid = couple(state, probe, [(q1, theta), (q2, -theta)], rng, jitter)
    outcome = measure_probe_parity(state, pid, rng, theta=theta, strict=not jitter)
    if convert_to_even and outcome.parity is Parity.ODD:
        state.apply_gate(q2, "X")
    return outcome


def _hh(state, q1, q2):
    state.apply_gate(q1, "H")
    state.apply_gate(q2, "H")


def parity_gate_pm(state: HybridState, q1: int, q2: int, probe: ProbeMode, theta: float,
                   rng, jitter: float = 0.0) -> ParityOutcome:
    """Parity gate in the |+>/|-> basis, i.e. a measurement of X1 X2."""
    _hh(state, q1, q2)
    try:
        return parity_gate(state, q1, q2, probe, theta, rng, jitter=jitter)
    finally:
        _hh(state, q1, q2)


def symmetrizer_gate(state: HybridState, q1: int, q2: int, probe: ProbeMode, theta: float,
                     rng, jitter: float = 0.0) -> ParityOutcome:
    """Map ``|xy>`` to ``(|xy> + |x'y'>)/sqrt(2)``, the X1 X2 = +1 eigenstate.

    The returned outcome is the X-parity that was measured before the
    feed-forward (a Z on ``q2`` in the computational frame).  Callers that
    share ``q1`` with other qubits may need it for their own bookkeeping.
    """
    _hh(state, q1, q2)
    outcome = parity_gate(state, q1, q2, probe, theta, rng, convert_to_even=True, jitter=jitter)
    _hh(state, q1, q2)
    return outcome


def syndrome_gate_mod4(state: HybridState, q1: int, q2: int, q3: int, cfg: Mod4Config,
                       probe: ProbeMode, rng, jitter: float = 0.0) -> Mod4Syndrome:
    """One probe, three couplings: read the bit-flip syndrome as a mod-4 value."""
    pid = couple(state, probe, [(q1, cfg.theta1), (q2, cfg.theta2), (q3, cfg.theta3)],
                 rng, jitter)
    return measure_probe_phase_mod4(state, pid, cfg, rng, strict=not jitter)
