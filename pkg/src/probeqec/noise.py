"""Error injection: Pauli errors, known-location qubit loss and coupling jitter."""

from __future__ import annotations

from dataclasses import dataclass

from .state import HybridState

PAULIS = ("X", "Y", "Z")


@dataclass(frozen=True)
class NoiseSpec:
    """iid per-qubit channel applied at each label in ``schedule``.

    ``theta_jitter`` is the relative spread of every coupling phase.
    ``ancilla_eps`` drives the reference model of a conventional ancilla
    measurement, where one ancilla fault flips both data qubits it touched.
    """

    p_x: float = 0.0
    p_z: float = 0.0
    p_loss: float = 0.0
    theta_jitter: float = 0.0
    ancilla_eps: float = 0.0
    schedule: tuple[str, ...] = ("round1",)

    def __post_init__(self):
        for name in ("p_x", "p_z", "p_loss", "ancilla_eps"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if not self.theta_jitter >= 0:
            raise ValueError(f"theta_jitter must be >= 0, got {self.theta_jitter}")
        object.__setattr__(self, "schedule", tuple(self.schedule))

    @property
    def silent(self) -> bool:
        return not (self.p_x or self.p_z or self.p_loss or self.ancilla_eps)


def inject_pauli(state: HybridState, qubit: int, kind: str):
    kind = kind.upper()
    if kind not in PAULIS:
        raise ValueError(f"not a Pauli error: {kind!r}")
    state.apply_gate(qubit, kind)


def sample_channel(spec: NoiseSpec, num_qubits: int, rng) -> list[tuple[int, str]]:
    """Draw one round of iid errors as ``[(qubit, 'X'|'Y'|'Z'|'loss'), ...]``.

    Pauli events come before loss events.  Each qubit consumes exactly three
    uniforms, so the draw pattern does not depend on the probabilities.
    """
    paulis, losses = [], []
    for q in range(num_qubits):
        u = rng.random(3)
        x, z = u[0] < spec.p_x, u[1] < spec.p_z
        if x and z:
            paulis.append((q, "Y"))
        elif x:
            paulis.append((q, "X"))
        elif z:
            paulis.append((q, "Z"))
        if u[2] < spec.p_loss:
            losses.append((q, "loss"))
    return paulis + losses


def sample_ancilla_faults(eps: float, pairs, rng) -> list[tuple[int, str]]:
    """Reference channel for ancilla-based parity checks.

    With probability ``eps`` per checked pair the ancilla fault propagates as
    X on both data qubits.  This is a comparison model, not part of the
    probe-based scheme.
    """
    events = []
    for a, b in pairs:
        if rng.random() < eps:
            events += [(a, "X"), (b, "X")]
    return events


def lose_qubit(state: HybridState, qubit: int, rng) -> int:
    """Lose ``qubit``: one trajectory of tracing it out.

    The qubit is measured in the computational basis and flagged lost; the
    outcome is returned for diagnostics but a protocol must not use it.
    """
    if qubit in state.lost:
        raise ValueError(f"qubit {qubit} is already lost")
    outcome = state.measure_qubit(qubit, rng)
    state.lost.add(qubit)
    return outcome


def jittered_theta(theta: float, spec, rng) -> float:
    """``theta * (1 + delta)`` with ``delta ~ Normal(0, jitter**2)``.

    ``spec`` is a :class:`NoiseSpec` or the relative jitter itself.  No random
    numbers are drawn when the jitter is zero.
    """
    jitter = getattr(spec, "theta_jitter", spec)
    if not jitter:
        return theta
    return theta * (1.0 + jitter * rng.standard_normal())


def apply_events(state: HybridState, events, qubit_map, rng):
    """Apply sampled events; ``qubit_map`` translates event indices to register indices."""
    for q, ev in events:
        phys = qubit_map[q]
        if ev == "loss":
            if phys not in state.lost:
                lose_qubit(state, phys, rng)
        elif phys not in state.lost:
            inject_pauli(state, phys, ev)
