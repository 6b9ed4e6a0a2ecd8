"""Bit-flip, phase-flip, Shor and Bell-pair erasure codes driven by probe gates.

Encoding reuses syndrome extraction: the data qubit is placed next to helper
qubits in a known state, the syndrome is measured, and the feed-forward
steers the register into the code space.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .gates import parity_gate, symmetrizer_gate, syndrome_gate_mod4
from .measurement import Mod4Config, Parity
from .state import HybridState, ProbeMode, init_state


class UnrecoverableLossError(RuntimeError):
    pass


class Code(str, enum.Enum):
    BITFLIP3 = "bitflip3"
    PHASEFLIP3 = "phaseflip3"
    SHOR9 = "shor9"
    ERASURE = "erasure"


class SyndromeMode(str, enum.Enum):
    BINARY = "binary"
    MOD4 = "mod4"


# (Z1Z2, Z2Z3) or modulo(4) value -> position of the flipped qubit
BINARY_TABLE = {(1, 1): None, (-1, 1): 0, (-1, -1): 1, (1, -1): 2}
MOD4_FLIP = {0: None, 2: 0, 3: 1, 1: 2}


@dataclass(frozen=True)
class CodeLayout:
    code: Code
    qubits: tuple[int, ...]
    n: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "code", Code(self.code))
        object.__setattr__(self, "qubits", tuple(self.qubits))
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"layout qubits must be distinct: {self.qubits}")
        if self.code is Code.ERASURE:
            if self.n is None or self.n < 1:
                raise ValueError("erasure layout needs n >= 1 Bell pairs")
            want = 2 * self.n
        else:
            want = 9 if self.code is Code.SHOR9 else 3
        if len(self.qubits) != want:
            raise ValueError(f"{self.code.value} needs {want} qubits, got {len(self.qubits)}")

    @classmethod
    def default(cls, code, n: int | None = None) -> CodeLayout:
        code = Code(code)
        size = {Code.BITFLIP3: 3, Code.PHASEFLIP3: 3, Code.SHOR9: 9}.get(code)
        if code is Code.ERASURE:
            size = 2 * n
        return cls(code, tuple(range(size)), n)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        q = self.qubits
        return [(q[2 * i], q[2 * i + 1]) for i in range(len(q) // 2)]

    @property
    def blocks(self) -> list[tuple[int, int, int]]:
        q = self.qubits
        return [q[i:i + 3] for i in range(0, len(q), 3)]


@dataclass(frozen=True)
class ProbeSettings:
    """Everything a gate needs to know about its probe."""

    probe: ProbeMode = ProbeMode(30.9)
    theta: float = 0.1
    jitter: float = 0.0
    mod4: Mod4Config | None = None

    @property
    def mod4_config(self) -> Mod4Config:
        return self.mod4 if self.mod4 is not None else Mod4Config.default(self.theta)


@dataclass
class SyndromeEntry:
    label: str
    block: tuple[int, ...]
    value: object
    correction: tuple[str, tuple[int, ...]] | None = None


@dataclass
class SyndromeRecord:
    entries: list[SyndromeEntry] = field(default_factory=list)

    def add(self, label, block, value, correction=None) -> SyndromeEntry:
        e = SyndromeEntry(label, tuple(block), value, correction)
        self.entries.append(e)
        return e

    def extend(self, other: SyndromeRecord):
        self.entries.extend(other.entries)

    def corrections(self, label_prefix: str = "") -> list:
        return [e.correction for e in self.entries
                if e.correction and e.label.startswith(label_prefix)]

    def signature(self) -> str:
        return ";".join(f"{e.label}={_fmt_value(e.value)}" for e in self.entries)


def _fmt_value(v):
    if isinstance(v, tuple):
        return ",".join(f"{x:+d}" for x in v)
    return str(v)


# -- three-qubit blocks -------------------------------------------------------

def bitflip3_syndrome(state: HybridState, qubits, mode, probes: ProbeSettings, rng):
    """Measure the bit-flip syndrome of ``qubits``.

    Returns ``(value, flipped)`` where ``value`` is ``(Z1Z2, Z2Z3)`` in binary
    mode or the mod-4 integer, and ``flipped`` the block position (0..2) the
    syndrome points at, or None.
    """
    q1, q2, q3 = qubits
    mode = SyndromeMode(mode)
    if mode is SyndromeMode.BINARY:
        a = parity_gate(state, q1, q2, probes.probe, probes.theta, rng, jitter=probes.jitter)
        b = parity_gate(state, q2, q3, probes.probe, probes.theta, rng, jitter=probes.jitter)
        value = (1 if a.parity is Parity.EVEN else -1, 1 if b.parity is Parity.EVEN else -1)
        return value, BINARY_TABLE[value]
    s = syndrome_gate_mod4(state, q1, q2, q3, probes.mod4_config, probes.probe, rng,
                           jitter=probes.jitter)
    return s.value, MOD4_FLIP[s.value]


def _correct_block(state, qubits, mode, probes, rng, record, label):
    value, flipped = bitflip3_syndrome(state, qubits, mode, probes, rng)
    corr = None
    if flipped is not None:
        state.apply_gate(qubits[flipped], "X")
        corr = ("X", (qubits[flipped],))
    record.add(label, qubits, value, corr)


def _encode_block(state, qubits, mode, probes, rng, record, label):
    # the data qubit is assumed error-free, so "qubit 1 flipped" means 2 and 3 are
    value, flipped = bitflip3_syndrome(state, qubits, mode, probes, rng)
    if flipped == 0:
        targets = (qubits[1], qubits[2])
    elif flipped is None:
        targets = ()
    else:
        targets = (qubits[flipped],)
    for q in targets:
        state.apply_gate(q, "X")
    record.add(label, qubits, value, ("X", targets) if targets else None)


def _h_all(state, qubits):
    for q in qubits:
        state.apply_gate(q, "H")


def bitflip3_encode(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
                    mode=SyndromeMode.MOD4) -> SyndromeRecord:
    """``(c0|0> + c1|1>)|+>|+>`` -> ``c0|000> + c1|111>`` on the layout."""
    record = SyndromeRecord()
    _encode_block(state, layout.qubits, mode, probes, rng, record, "encode")
    return record


def bitflip3_correct(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
                     mode=SyndromeMode.MOD4) -> SyndromeRecord:
    record = SyndromeRecord()
    _correct_block(state, layout.qubits, mode, probes, rng, record, "bit")
    return record


def phaseflip3_encode(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
                      mode=SyndromeMode.MOD4) -> SyndromeRecord:
    """``(c0|0> + c1|1>)|+>|+>`` -> ``c0|+++> + c1|--->``."""
    record = bitflip3_encode(state, layout, probes, rng, mode)
    _h_all(state, layout.qubits)
    return record


def phaseflip3_correct(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
                       mode=SyndromeMode.MOD4) -> SyndromeRecord:
    record = SyndromeRecord()
    _h_all(state, layout.qubits)
    _correct_block(state, layout.qubits, mode, probes, rng, record, "phase")
    _h_all(state, layout.qubits)
    for e in record.entries:
        if e.correction:
            e.correction = ("Z", e.correction[1])
    return record


# -- Shor code --------------------------------------------------------------

def shor_encode(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
                mode=SyndromeMode.MOD4) -> SyndromeRecord:
    """First qubit holds the data, the other eight start in |+>."""
    record = SyndromeRecord()
    leads = tuple(b[0] for b in layout.blocks)
    _encode_block(state, leads, mode, probes, rng, record, "encode-outer")
    _h_all(state, leads)
    for i, block in enumerate(layout.blocks):
        _encode_block(state, block, mode, probes, rng, record, f"encode-block{i}")
    return record


def disentangle_block(state: HybridState, block, probes: ProbeSettings, rng):
    """``|000> +- |111>`` -> ``|+->(|00> + |11>)/sqrt(2)`` on a three-qubit block.

    The symmetrizer on the last two qubits measures their X-parity; an odd
    reading also flips the sign carried by the lead qubit, which is undone
    with Z on the lead.
    """
    lead, a, b = block
    out = symmetrizer_gate(state, a, b, probes.probe, probes.theta, rng, jitter=probes.jitter)
    if out.parity is Parity.ODD:
        state.apply_gate(lead, "Z")
    return out


def shor_correct_cycle(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
                       mode=SyndromeMode.MOD4) -> SyndromeRecord:
    """Bit-flip blocks, disentangle, phase-flip code on the leads, re-encode."""
    record = SyndromeRecord()
    blocks = layout.blocks
    for i, block in enumerate(blocks):
        _correct_block(state, block, mode, probes, rng, record, f"bit-block{i}")
    for i, block in enumerate(blocks):
        out = disentangle_block(state, block, probes, rng)
        record.add(f"sym-block{i}", block[1:], out.parity.name.lower(),
                   ("Z", (block[0],)) if out.parity is Parity.ODD else None)
    leads = tuple(b[0] for b in blocks)
    _h_all(state, leads)
    phase = SyndromeRecord()
    _correct_block(state, leads, mode, probes, rng, phase, "phase")
    _h_all(state, leads)
    for e in phase.entries:
        if e.correction:
            e.correction = ("Z", e.correction[1])
    record.extend(phase)
    for i, block in enumerate(blocks):
        _encode_block(state, block, mode, probes, rng, record, f"reencode-block{i}")
    return record


# -- erasure code -----------------------------------------------------------

def _encode_two_pairs(state, a, b, c, d, probes, rng, record, label):
    # a holds the data, b, c, d are |0>
    state.apply_gate(c, "H")
    out = parity_gate(state, a, c, probes.probe, probes.theta, rng, convert_to_even=True,
                      jitter=probes.jitter)
    record.add(f"{label}-parity", (a, c), out.parity.name.lower(),
               ("X", (c,)) if out.parity is Parity.ODD else None)
    for p, q in ((a, b), (c, d)):
        out = symmetrizer_gate(state, p, q, probes.probe, probes.theta, rng, jitter=probes.jitter)
        record.add(f"{label}-sym", (p, q), out.parity.name.lower())


def erasure_encode(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng
                   ) -> SyndromeRecord:
    """``c0|0> + c1|1>`` on the first qubit, the rest |0>, to the n-pair code."""
    record = SyndromeRecord()
    pairs = layout.pairs
    if len(pairs) == 1:
        a, b = pairs[0]
        out = symmetrizer_gate(state, a, b, probes.probe, probes.theta, rng, jitter=probes.jitter)
        record.add("encode-sym", (a, b), out.parity.name.lower())
        return record
    (a, b), (c, d) = pairs[:2]
    _encode_two_pairs(state, a, b, c, d, probes, rng, record, "encode")
    for k in range(2, len(pairs)):
        _grow(state, pairs[k - 1], pairs[k], probes, rng, record)
    return record


def _grow(state, last_pair, fresh_pair, probes, rng, record):
    a, b = last_pair
    m = state.measure_qubit(b, rng)
    if m:
        # |11> / |01> branch: local flips restore the |00> / |10> form
        state.apply_gate(a, "X")
        state.apply_gate(b, "X")
    record.add("grow-measure", (b,), m, ("X", (a, b)) if m else None)
    c, d = fresh_pair
    _encode_two_pairs(state, a, b, c, d, probes, rng, record, "grow")


def erasure_grow(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
                 fresh: tuple[int, int] | None = None, record: SyndromeRecord | None = None
                 ) -> CodeLayout:
    """Add one Bell pair: n-1 pairs -> n pairs.

    ``fresh`` names two qubits in |0>; if omitted they are appended to the
    register.  Returns the enlarged layout.
    """
    if fresh is None:
        fresh = tuple(state.add_qubits(["0", "0"]))
    record = record if record is not None else SyndromeRecord()
    _grow(state, layout.pairs[-1], fresh, probes, rng, record)
    return CodeLayout(Code.ERASURE, layout.qubits + tuple(fresh), layout.n + 1)


def erasure_recover(state: HybridState, layout: CodeLayout, lost_qubit: int,
                    probes: ProbeSettings, rng, regrow: bool = False,
                    record: SyndromeRecord | None = None) -> CodeLayout:
    """Recover from the known loss of ``lost_qubit``; returns the surviving layout.

    The partner of the lost qubit is measured in the |+>/|-> basis; on |->
    the logical phase flip Z Z is applied to the first surviving pair.  The
    code shrinks by one pair, and ``regrow`` puts it back.
    """
    if lost_qubit not in state.lost:
        raise ValueError(f"qubit {lost_qubit} is not flagged as lost")
    pairs = layout.pairs
    hit = [p for p in pairs if lost_qubit in p]
    if not hit:
        raise ValueError(f"qubit {lost_qubit} is not part of the layout")
    pair = hit[0]
    partner = pair[1] if pair[0] == lost_qubit else pair[0]
    if partner in state.lost:
        raise UnrecoverableLossError(f"both qubits of pair {pair} are lost")
    survivors = [p for p in pairs if p != pair]
    if not survivors:
        raise UnrecoverableLossError("the only Bell pair has been hit; nothing left to recover")
    record = record if record is not None else SyndromeRecord()
    m = state.measure_qubit(partner, rng, basis="pm")
    if m:
        for q in survivors[0]:
            state.apply_gate(q, "Z")
    record.add("recover", (partner,), "-" if m else "+", ("Z", survivors[0]) if m else None)
    new = CodeLayout(Code.ERASURE, tuple(q for p in survivors for q in p), len(survivors))
    if regrow:
        new = erasure_grow(state, new, probes, rng, record=record)
    return new


# -- reference states ---------------------------------------------------------

def input_state(code, c0: complex, c1: complex, n: int | None = None
                ) -> tuple[HybridState, CodeLayout]:
    """Unencoded register ready for the code's encoder."""
    layout = CodeLayout.default(code, n)
    data = (c0, c1)
    if layout.code is Code.ERASURE:
        rest = ["0"] * (len(layout.qubits) - 1)
    else:
        rest = ["+"] * (len(layout.qubits) - 1)
    return init_state([data] + rest), layout


def _block_amps(code, n):
    """(logical-0 amplitudes, logical-1 amplitudes) as {bits: amp}."""
    if code is Code.BITFLIP3:
        return {0b000: 1.0}, {0b111: 1.0}
    if code is Code.PHASEFLIP3:
        plus = {b: 1 / (2 * math.sqrt(2)) for b in range(8)}
        minus = {b: (-1) ** bin(b).count("1") / (2 * math.sqrt(2)) for b in range(8)}
        return plus, minus
    if code is Code.SHOR9:
        s = 1 / math.sqrt(2)
        zero = {0b000: s, 0b111: s}
        one = {0b000: s, 0b111: -s}
        return _tensor([zero] * 3, 3), _tensor([one] * 3, 3)
    s = 1 / math.sqrt(2)
    phi = {0b00: s, 0b11: s}
    psi = {0b01: s, 0b10: s}
    return _tensor([phi] * n, 2), _tensor([psi] * n, 2)


def _tensor(factors, width):
    out = {0: 1.0}
    for f in factors:
        out = {(a << width) | b: x * y for a, x in out.items() for b, y in f.items()}
    return out


def logical_state(code, c0: complex, c1: complex, n: int | None = None) -> HybridState:
    """``c0|0>_L + c1|1>_L`` built directly, qubits in layout order."""
    code = Code(code)
    zero, one = _block_amps(code, n)
    size = {Code.BITFLIP3: 3, Code.PHASEFLIP3: 3, Code.SHOR9: 9}.get(code) or 2 * n
    amps = {}
    for b, a in zero.items():
        amps[b] = amps.get(b, 0) + c0 * a
    for b, a in one.items():
        amps[b] = amps.get(b, 0) + c1 * a
    return HybridState.from_amplitudes(size, amps)
