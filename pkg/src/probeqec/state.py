"""Qubit register entangled with coherent probe modes.

The register is stored branch-sparse: every computational-basis branch carries
a complex amplitude and, for each attached probe, the phase its coherent state
has picked up so far.  Because the qubit-probe coupling is diagonal in the
computational basis, a probe that starts in ``|alpha>`` stays a coherent state
``|alpha e^{i phi}>`` inside every branch, so the phase is all we need to keep.

Qubits are indexed from 0.  In bitstrings and dense vectors qubit 0 is the
leftmost (most significant) position.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

NORM_TOL = 1e-10
PRUNE_TOL = 1e-14
# phases closer than this are treated as equal when merging or grouping
PHASE_TOL = 1e-9

_SQRT1_2 = 1.0 / math.sqrt(2.0)


class LostQubitError(RuntimeError):
    """A gate or coupling was scheduled on a qubit flagged as lost."""


class NormalizationError(ValueError):
    pass


class UnsupportedComparisonError(RuntimeError):
    """Fidelity was requested while a probe is still attached."""


class Backend(str, enum.Enum):
    IDEAL = "ideal"
    HOMODYNE = "homodyne"
    PHOTON_NUMBER = "photon_number"


@dataclass(frozen=True)
class ProbeMode:
    """A coherent probe ``|alpha>`` and how it is read out.

    ``eta2`` is the fraction of probe photons lost while the probe travels
    through a gate.
    """

    alpha: float
    eta2: float = 0.0
    backend: Backend = Backend.IDEAL

    def __post_init__(self):
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if not 0.0 <= self.eta2 <= 1.0:
            raise ValueError(f"eta2 must lie in [0, 1], got {self.eta2}")
        object.__setattr__(self, "backend", Backend(self.backend))


@dataclass(frozen=True)
class QubitInit:
    """Single-qubit preparation ``c0|0> + c1|1>``."""

    c0: complex
    c1: complex

    def __post_init__(self):
        norm = abs(self.c0) ** 2 + abs(self.c1) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise NormalizationError(
                f"|c0|^2 + |c1|^2 = {norm!r}, expected 1 within {NORM_TOL}")

    @classmethod
    def zero(cls):
        return cls(1.0, 0.0)

    @classmethod
    def one(cls):
        return cls(0.0, 1.0)

    @classmethod
    def plus(cls):
        return cls(_SQRT1_2, _SQRT1_2)

    @classmethod
    def minus(cls):
        return cls(_SQRT1_2, -_SQRT1_2)


_SHORTHAND = {"0": QubitInit.zero, "1": QubitInit.one,
              "+": QubitInit.plus, "-": QubitInit.minus}


def _as_init(spec) -> QubitInit:
    if isinstance(spec, QubitInit):
        return spec
    if isinstance(spec, str):
        try:
            return _SHORTHAND[spec]()
        except KeyError:
            raise ValueError(f"unknown qubit preparation {spec!r}") from None
    c0, c1 = spec
    return QubitInit(complex(c0), complex(c1))


@dataclass
class BasisBranch:
    bits: tuple[int, ...]
    amplitude: complex
    probe_phase: dict[int, float] = field(default_factory=dict)


def _phase_key(phases):
    return tuple(round(p, 11) + 0.0 for p in phases)


def _accumulate(out, bits, phases, amp):
    key = (bits, _phase_key(phases))
    rec = out.get(key)
    if rec is None:
        out[key] = [amp, phases]
    else:
        rec[0] += amp


def _pruned(raw):
    return {k: (v[0], v[1]) for k, v in raw.items() if abs(v[0]) >= PRUNE_TOL}


class HybridState:
    """Sparse joint state of ``num_qubits`` qubits and any attached probes."""

    def __init__(self, num_qubits: int):
        if num_qubits < 1:
            raise ValueError("a register needs at least one qubit")
        self.num_qubits = num_qubits
        self.probes: dict[int, ProbeMode] = {}
        self.lost: set[int] = set()
        # (bits, phase_key) -> (amplitude, exact phases)
        self._branches: dict = {}
        self._next_probe = 0

    # -- construction -----------------------------------------------------

    @classmethod
    def from_amplitudes(cls, num_qubits: int, amps: dict[int, complex]):
        """Probe-free state from a ``{basis index: amplitude}`` map."""
        state = cls(num_qubits)
        for bits, a in amps.items():
            if not 0 <= bits < 1 << num_qubits:
                raise ValueError(f"basis index {bits} out of range")
            if abs(a) >= PRUNE_TOL:
                state._branches[(bits, ())] = (complex(a), ())
        state._check_norm()
        return state

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=complex)
        n = int(round(math.log2(vec.size)))
        if 1 << n != vec.size:
            raise ValueError("vector length must be a power of two")
        return cls.from_amplitudes(n, {i: a for i, a in enumerate(vec) if a != 0})

    def copy(self) -> HybridState:
        new = HybridState.__new__(HybridState)
        new.num_qubits = self.num_qubits
        new.probes = dict(self.probes)
        new.lost = set(self.lost)
        new._branches = dict(self._branches)
        new._next_probe = self._next_probe
        return new

    # -- inspection -------------------------------------------------------

    def _mask(self, qubit: int) -> int:
        if not 0 <= qubit < self.num_qubits:
            raise IndexError(f"qubit {qubit} out of range for {self.num_qubits} qubits")
        return 1 << (self.num_qubits - 1 - qubit)

    def _check_live(self, qubit: int):
        if qubit in self.lost:
            raise LostQubitError(f"qubit {qubit} has been lost")

    def _probe_slot(self, probe_id: int) -> int:
        try:
            return list(self.probes).index(probe_id)
        except ValueError:
            raise KeyError(f"probe {probe_id} is not attached") from None

    def bitstring(self, bits: int) -> str:
        return format(bits, f"0{self.num_qubits}b")

    @property
    def branches(self) -> list[BasisBranch]:
        ids = list(self.probes)
        out = []
        for (bits, _), (amp, phases) in sorted(self._branches.items(), key=lambda kv: kv[0]):
            out.append(BasisBranch(
                tuple(int(c) for c in self.bitstring(bits)), amp,
                dict(zip(ids, phases))))
        return out

    def __len__(self):
        return len(self._branches)

    def norm(self) -> float:
        return math.fsum(abs(a) ** 2 for a, _ in self._branches.values())

    def _check_norm(self):
        nrm = self.norm()
        if abs(nrm - 1.0) > NORM_TOL:
            raise NormalizationError(f"state norm {nrm!r} deviates from 1")

    def amplitudes(self) -> dict[int, complex]:
        """Basis index -> amplitude.  Only defined with no probe attached."""
        if self.probes:
            raise UnsupportedComparisonError(
                "probe still attached; amplitudes are entangled with the probe")
        return {bits: amp for (bits, _), (amp, _) in self._branches.items()}

    def to_vector(self) -> np.ndarray:
        vec = np.zeros(1 << self.num_qubits, dtype=complex)
        for bits, amp in self.amplitudes().items():
            vec[bits] = amp
        return vec

    def fidelity(self, reference: HybridState) -> float:
        """``|<reference|self>|^2``; insensitive to global phase."""
        if self.num_qubits != reference.num_qubits:
            raise ValueError("registers differ in size")
        mine = self.amplitudes()
        theirs = reference.amplitudes()
        ov = sum(theirs[b].conjugate() * a for b, a in mine.items() if b in theirs)
        return min(1.0, abs(ov) ** 2)

    def probability_one(self, qubit: int) -> float:
        m = self._mask(qubit)
        return math.fsum(abs(a) ** 2 for (bits, _), (a, _) in self._branches.items() if bits & m)

    def format_branches(self, digits: int = 6) -> str:
        lines = []
        ids = list(self.probes)
        for (bits, _), (amp, phases) in sorted(self._branches.items(), key=lambda kv: kv[0]):
            a = complex(round(amp.real, digits) + 0.0, round(amp.imag, digits) + 0.0)
            line = f"  |{self.bitstring(bits)}>  {a.real:+.{digits}f}{a.imag:+.{digits}f}j"
            if ids:
                line += "  " + " ".join(f"phi[{i}]={p:+.{digits}f}" for i, p in zip(ids, phases))
            lines.append(line)
        return "\n".join(lines)

    # -- register surgery ----------------------------------------------------

    def add_qubits(self, inits) -> list[int]:
        """Append fresh qubits prepared as ``inits``; returns their indices."""
        inits = [_as_init(s) for s in inits]
        k = len(inits)
        first = self.num_qubits
        out = {}
        for (bits, _), (amp, phases) in self._branches.items():
            for tail, tamp in _product_amplitudes(inits):
                _accumulate(out, (bits << k) | tail, phases, amp * tamp)
        self.num_qubits += k
        self._branches = _pruned(out)
        return list(range(first, first + k))

    def extract(self, qubits, tol: float = 1e-10) -> HybridState:
        """Probe-free state of ``qubits``, which must be unentangled from the rest.

        Raises ValueError if the discarded qubits are still entangled with the
        kept ones.  The global phase of the result is arbitrary.
        """
        qubits = list(qubits)
        masks = [self._mask(q) for q in qubits]
        rest_mask = (1 << self.num_qubits) - 1
        for m in masks:
            rest_mask &= ~m
        groups: dict[int, dict[int, complex]] = {}
        for bits, a in self.amplitudes().items():
            idx = 0
            for m in masks:
                idx = (idx << 1) | (1 if bits & m else 0)
            groups.setdefault(bits & rest_mask, {})[idx] = a
        weight = {r: math.fsum(abs(a) ** 2 for a in g.values()) for r, g in groups.items()}
        ref = groups[max(weight, key=weight.get)]
        wref = math.fsum(abs(a) ** 2 for a in ref.values())
        for r, g in groups.items():
            ov = sum(ref[i].conjugate() * a for i, a in g.items() if i in ref)
            if abs(abs(ov) ** 2 - wref * weight[r]) > tol:
                raise ValueError("kept qubits are entangled with the discarded ones")
        s = 1.0 / math.sqrt(wref)
        return HybridState.from_amplitudes(len(qubits), {i: a * s for i, a in ref.items()})

    # -- probes ----------------------------------------------------------------

    def attach_probe(self, probe: ProbeMode) -> int:
        pid = self._next_probe
        self._next_probe += 1
        self.probes[pid] = probe
        out = {}
        for (bits, _), (amp, phases) in self._branches.items():
            _accumulate(out, bits, phases + (0.0,), amp)
        self._branches = _pruned(out)
        return pid

    def apply_conditional_phase(self, qubit: int, probe_id: int, theta: float):
        """Shift the probe by ``theta`` in every branch where ``qubit`` is 1."""
        self._check_live(qubit)
        m = self._mask(qubit)
        slot = self._probe_slot(probe_id)
        out = {}
        for (bits, _), (amp, phases) in self._branches.items():
            if bits & m:
                phases = phases[:slot] + (phases[slot] + theta,) + phases[slot + 1:]
            _accumulate(out, bits, phases, amp)
        self._branches = _pruned(out)

    def probe_phases(self, probe_id: int) -> dict:
        """Branch key -> accumulated phase of ``probe_id``."""
        slot = self._probe_slot(probe_id)
        return {k: phases[slot] for k, (_, phases) in self._branches.items()}

    def project(self, keep) -> float:
        """Keep only branches whose key is in ``keep``; renormalise.

        Returns the Born weight of the kept part.  If that weight is zero the
        state is left untouched and 0 is returned.
        """
        kept = {k: v for k, v in self._branches.items() if k in keep}
        w = math.fsum(abs(a) ** 2 for a, _ in kept.values())
        if w <= PRUNE_TOL ** 2:
            return 0.0
        s = 1.0 / math.sqrt(w)
        self._branches = {k: (a * s, ph) for k, (a, ph) in kept.items()}
        return w

    def detach_probe(self, probe_id: int):
        """Drop a probe that has been measured out."""
        slot = self._probe_slot(probe_id)
        out = {}
        for (bits, _), (amp, phases) in self._branches.items():
            _accumulate(out, bits, phases[:slot] + phases[slot + 1:], amp)
        del self.probes[probe_id]
        self._branches = _pruned(out)
        self._renormalize()

    def update_probe(self, probe_id: int, probe: ProbeMode):
        self._probe_slot(probe_id)
        self.probes[probe_id] = probe

    def random_phase_kick(self, values: dict, beta2: float, rng):
        """Trajectory unravelling of an environment that holds ``|beta e^{i v_b}>``.

        On average the coherence between branches b and b' is multiplied by
        ``exp(-beta2 * (1 - cos(v_b - v_b')))``.  With only two distinct
        values this is done with a random sign flip on one class (a discrete
        phase-flip error); otherwise every branch picks up ``e^{i k v_b}`` with
        ``k`` a difference of two Poisson(beta2/2) counts.
        """
        if beta2 <= 0:
            return
        distinct = []
        for v in values.values():
            if not any(_close_mod_2pi(v, d) for d in distinct):
                distinct.append(v)
        if len(distinct) < 2:
            return
        if len(distinct) == 2:
            p = 0.5 * (1.0 - math.exp(-beta2 * (1.0 - math.cos(distinct[1] - distinct[0]))))
            if rng.random() < p:
                flip = distinct[1]
                self._branches = {
                    k: ((-a if _close_mod_2pi(values[k], flip) else a), ph)
                    for k, (a, ph) in self._branches.items()}
            return
        k = int(rng.poisson(beta2 / 2.0)) - int(rng.poisson(beta2 / 2.0))
        if k:
            self._branches = {
                key: (a * complex(math.cos(k * values[key]), math.sin(k * values[key])), ph)
                for key, (a, ph) in self._branches.items()}

    # -- qubit operations ------------------------------------------------------

    def apply_gate(self, qubit: int, kind: str):
        """Apply X, Y, Z or H.  Y is realised as Z.X (global phase dropped)."""
        self._check_live(qubit)
        m = self._mask(qubit)
        kind = kind.upper()
        if kind == "X":
            self._branches = {((bits ^ m), pk): v for (bits, pk), v in self._branches.items()}
        elif kind == "Z":
            self._branches = {(bits, pk): ((-a if bits & m else a), ph)
                              for (bits, pk), (a, ph) in self._branches.items()}
        elif kind == "Y":
            self.apply_gate(qubit, "X")
            self.apply_gate(qubit, "Z")
        elif kind == "H":
            out = {}
            for (bits, _), (amp, phases) in self._branches.items():
                a = amp * _SQRT1_2
                _accumulate(out, bits & ~m, phases, a)
                _accumulate(out, bits | m, phases, -a if bits & m else a)
            self._branches = _pruned(out)
        else:
            raise ValueError(f"unsupported gate {kind!r}")

    def measure_qubit(self, qubit: int, rng, basis: str = "computational") -> int:
        """Projective measurement; returns the outcome bit.

        ``basis='pm'`` measures in the |+>/|-> basis (outcome 1 means |->) and
        leaves the qubit in that eigenstate.  Lost qubits may be measured: this
        is how a loss is realised along a trajectory.
        """
        if basis not in ("computational", "pm"):
            raise ValueError(f"unknown basis {basis!r}")
        m = self._mask(qubit)
        if basis == "pm":
            self._apply_h_unchecked(qubit)
        p1 = self.probability_one(qubit)
        outcome = 1 if rng.random() < p1 else 0
        want = m if outcome else 0
        self._branches = {k: v for k, v in self._branches.items() if k[0] & m == want}
        self._renormalize()
        if basis == "pm":
            self._apply_h_unchecked(qubit)
        return outcome

    def _apply_h_unchecked(self, qubit):
        lost = self.lost
        self.lost = set()
        try:
            self.apply_gate(qubit, "H")
        finally:
            self.lost = lost

    def _renormalize(self):
        nrm = self.norm()
        s = 1.0 / math.sqrt(nrm)
        self._branches = {k: (a * s, ph) for k, (a, ph) in self._branches.items()}


def _close_mod_2pi(a, b, tol=PHASE_TOL):
    d = math.remainder(a - b, 2 * math.pi)
    return abs(d) <= tol


def _product_amplitudes(inits):
    terms = [(0, 1.0 + 0j)]
    for q in inits:
        nxt = []
        for bits, amp in terms:
            if q.c0 != 0:
                nxt.append((bits << 1, amp * q.c0))
            if q.c1 != 0:
                nxt.append(((bits << 1) | 1, amp * q.c1))
        terms = nxt
    return terms


def init_state(inits) -> HybridState:
    """Product state from per-qubit preparations.

    Each entry is a :class:`QubitInit`, one of the shorthands ``'0'``, ``'1'``,
    ``'+'``, ``'-'``, or a ``(c0, c1)`` pair.
    """
    inits = [_as_init(s) for s in inits]
    if not inits:
        raise ValueError("need at least one qubit")
    state = HybridState(len(inits))
    for bits, amp in _product_amplitudes(inits):
        if abs(amp) >= PRUNE_TOL:
            state._branches[(bits, ())] = (complex(amp), ())
    return state


def fidelity(state: HybridState, reference: HybridState) -> float:
    return state.fidelity(reference)


def apply_probe_dephasing(state: HybridState, probe_id: int, rng, fraction: float | None = None):
    """Lose ``fraction`` of the probe's photons (default: the probe's ``eta2``).

    The lost photons carry away which-path information about the phase the
    probe has accumulated so far, dephasing the qubits; the surviving probe
    amplitude shrinks to ``alpha * sqrt(1 - fraction)``.
    """
    probe = state.probes[probe_id]
    if fraction is None:
        fraction = probe.eta2
    if fraction <= 0:
        return
    beta2 = fraction * probe.alpha ** 2
    state.random_phase_kick(state.probe_phases(probe_id), beta2, rng)
    state.update_probe(probe_id, ProbeMode(probe.alpha * math.sqrt(1.0 - fraction),
                                           probe.eta2, probe.backend))
