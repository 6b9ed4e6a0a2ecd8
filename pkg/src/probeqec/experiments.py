"""Seeded Monte Carlo runs: encode, inject noise, correct, compare.

Every trial owns its generator, derived from ``(seed, trial_index)``, so a run
gives the same statistics whether trials execute in order or in parallel.
"""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import codes
from .codes import (Code, CodeLayout, ProbeSettings, SyndromeMode, SyndromeRecord,
                    UnrecoverableLossError)
from .gates import couple, parity_gate
from .measurement import Parity, collapse_parity, parity_groups, sample_parity_declarations
from .noise import NoiseSpec, apply_events, sample_ancilla_faults, sample_channel
from .state import Backend, HybridState, ProbeMode

FAIL_THRESHOLD = 1.0 - 1e-6
WILSON_Z = 1.959963984540054

EXPERIMENT_CODES = ("parity",) + tuple(c.value for c in Code)
SWEEP_AXES = ("alpha", "theta", "eta2", "p_x", "p_z", "p_loss", "theta_jitter", "trials")
PARITY_INPUTS = ("odd", "even", "plus")


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    code: str = "bitflip3"
    n: int = 2
    probe: ProbeMode = ProbeMode(30.9)
    theta: float = 0.1
    syndrome_mode: SyndromeMode = SyndromeMode.MOD4
    noise: NoiseSpec = NoiseSpec()
    trials: int = 1000
    seed: int = 0
    c0: complex = 0.6
    c1: complex = 0.8
    haar: bool = False
    parity_input: str = "odd"

    def validate(self):
        if self.code not in EXPERIMENT_CODES:
            raise ConfigError("code", f"unknown code {self.code!r}")
        if self.trials < 1:
            raise ConfigError("trials", "need at least one trial")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        if self.code == "erasure" and self.n < 1:
            raise ConfigError("n", "erasure code needs n >= 1")
        if not 0 < self.theta < math.pi:
            raise ConfigError("theta", "must lie in (0, pi)")
        if abs(abs(self.c0) ** 2 + abs(self.c1) ** 2 - 1) > 1e-10:
            raise ConfigError("c0", "|c0|^2 + |c1|^2 must be 1")
        if self.noise.p_loss and self.code != "erasure":
            raise ConfigError("p_loss", "qubit loss is only handled by the erasure code")
        if self.parity_input not in PARITY_INPUTS:
            raise ConfigError("parity_input", f"must be one of {PARITY_INPUTS}")
        uses_mod4 = self.code in ("bitflip3", "phaseflip3", "shor9")
        if (uses_mod4 and SyndromeMode(self.syndrome_mode) is SyndromeMode.MOD4
                and self.probe.backend is not Backend.IDEAL):
            raise ConfigError("backend", "mod-4 syndrome read-out requires the ideal back-end")
        return self

    @property
    def probes(self) -> ProbeSettings:
        return ProbeSettings(self.probe, self.theta, self.noise.theta_jitter)


@dataclass
class TrialStats:
    trials: int
    failures: int
    mean_fidelity: float
    histogram: dict[str, int] = field(default_factory=dict)

    @property
    def logical_error_rate(self) -> float:
        return self.failures / self.trials

    @property
    def wilson_95(self) -> tuple[float, float]:
        return wilson_interval(self.failures, self.trials)


def wilson_interval(k: int, n: int, z: float = WILSON_Z) -> tuple[float, float]:
    p = k / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial_index,)))


def _logical_input(config, rng):
    if not config.haar:
        return complex(config.c0), complex(config.c1)
    v = rng.standard_normal(4)
    c = np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]])
    c /= np.linalg.norm(c)
    return complex(c[0]), complex(c[1])


# -- parity-gate experiment -------------------------------------------------

_S = 1 / math.sqrt(2)
_PARITY_INPUT_AMPS = {
    "odd": {0b01: _S, 0b10: _S},
    "even": {0b00: _S, 0b11: _S},
    "plus": {b: 0.5 for b in range(4)},
}


def _parity_reference():
    return HybridState.from_amplitudes(2, {0b00: _S, 0b11: _S})


def _parity_trial(config, rng):
    state = HybridState.from_amplitudes(2, _PARITY_INPUT_AMPS[config.parity_input])
    if not config.noise.silent:
        apply_events(state, sample_channel(config.noise, 2, rng), (0, 1), rng)
    out = parity_gate(state, 0, 1, config.probe, config.theta, rng, convert_to_even=True,
                      jitter=config.noise.theta_jitter)
    return state.fidelity(_parity_reference()), out.parity.name.lower()


def _parity_batch(config) -> TrialStats:
    """Vectorised run when the probe read-out is the only random step."""
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    state = HybridState.from_amplitudes(2, _PARITY_INPUT_AMPS[config.parity_input])
    pid = couple(state, config.probe, [(0, config.theta), (1, -config.theta)], rng)
    odd = sample_parity_declarations(state, pid, rng, config.trials, theta=config.theta)
    n_odd = int(odd.sum())
    counts = {Parity.EVEN: config.trials - n_odd, Parity.ODD: n_odd}
    _, labels, nominal = parity_groups(state, pid, config.theta)
    fails, fsum, hist = 0, 0.0, {}
    for declared, count in counts.items():
        if not count:
            continue
        post = state.copy()
        collapse_parity(post, pid, declared, labels, nominal, rng)
        if declared is Parity.ODD:
            post.apply_gate(1, "X")
        f = post.fidelity(_parity_reference())
        fsum += f * count
        fails += count if f < FAIL_THRESHOLD else 0
        hist[declared.name.lower()] = count
    return TrialStats(config.trials, fails, fsum / config.trials, dict(sorted(hist.items())))


# -- code experiments -------------------------------------------------------

def encode(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
           mode=SyndromeMode.MOD4) -> SyndromeRecord:
    """Run the encoder that matches ``layout.code``."""
    code = layout.code
    if code is Code.BITFLIP3:
        return codes.bitflip3_encode(state, layout, probes, rng, mode)
    if code is Code.PHASEFLIP3:
        return codes.phaseflip3_encode(state, layout, probes, rng, mode)
    if code is Code.SHOR9:
        return codes.shor_encode(state, layout, probes, rng, mode)
    return codes.erasure_encode(state, layout, probes, rng)


def _check_pairs(layout):
    if layout.code is Code.SHOR9:
        return [p for b in layout.blocks for p in ((b[0], b[1]), (b[1], b[2]))]
    if layout.code is Code.ERASURE:
        return []
    q = layout.qubits
    return [(q[0], q[1]), (q[1], q[2])]


def correct(state: HybridState, layout: CodeLayout, probes: ProbeSettings, rng,
            mode=SyndromeMode.MOD4, n: int | None = None):
    """Run one correction round for ``layout.code``; returns (layout, record).

    For the erasure code every lost qubit in the layout is recovered and the
    code is grown back to ``n`` pairs.
    """
    code = layout.code
    if code is Code.BITFLIP3:
        return layout, codes.bitflip3_correct(state, layout, probes, rng, mode)
    if code is Code.PHASEFLIP3:
        return layout, codes.phaseflip3_correct(state, layout, probes, rng, mode)
    if code is Code.SHOR9:
        return layout, codes.shor_correct_cycle(state, layout, probes, rng, mode)
    record = SyndromeRecord()
    for q in [q for q in layout.qubits if q in state.lost]:
        if q in layout.qubits:
            layout = _recover_one(state, layout, q, probes, rng, record)
    target = n if n is not None else layout.n
    while layout.n < target:
        layout = codes.erasure_grow(state, layout, probes, rng, record=record)
    return layout, record


def _recover_one(state, layout, q, probes, rng, record):
    # the logical Z fix must land on a pair with no lost qubit
    pairs = layout.pairs
    hit = next(p for p in pairs if q in p)
    clean = [p for p in pairs if p != hit and not (set(p) & state.lost)]
    if not clean:
        raise UnrecoverableLossError("no intact Bell pair left")
    order = [hit] + clean + [p for p in pairs if p != hit and p not in clean]
    reordered = CodeLayout(Code.ERASURE, tuple(x for p in order for x in p), layout.n)
    return codes.erasure_recover(state, reordered, q, probes, rng, record=record)


def _code_trial(config, rng):
    code = Code(config.code)
    mode = SyndromeMode(config.syndrome_mode)
    probes = config.probes
    c0, c1 = _logical_input(config, rng)
    n = config.n if code is Code.ERASURE else None
    state, layout = codes.input_state(code, c0, c1, n)
    encode(state, layout, probes, rng, mode)
    record = SyndromeRecord()
    try:
        for _ in config.noise.schedule:
            events = sample_channel(config.noise, len(layout.qubits), rng)
            if config.noise.ancilla_eps:
                pos = {q: i for i, q in enumerate(layout.qubits)}
                events += [(pos[q], e) for q, e in
                           sample_ancilla_faults(config.noise.ancilla_eps,
                                                 _check_pairs(layout), rng)]
            apply_events(state, events, layout.qubits, rng)
            layout, rec = correct(state, layout, probes, rng, mode, n)
            record.extend(rec)
    except UnrecoverableLossError:
        return 0.0, "unrecoverable"
    ref = codes.logical_state(code, c0, c1, n)
    return state.extract(layout.qubits).fidelity(ref), record.signature()


def _one_trial(config, index):
    rng = trial_rng(config.seed, index)
    if config.code == "parity":
        return _parity_trial(config, rng)
    return _code_trial(config, rng)


def _trial_chunk(args):
    config, start, stop = args
    return [_one_trial(config, i) for i in range(start, stop)]


def _aggregate(config, results) -> TrialStats:
    fids = [f for f, _ in results]
    hist = Counter(sig for _, sig in results)
    return TrialStats(
        trials=config.trials,
        failures=sum(f < FAIL_THRESHOLD for f in fids),
        mean_fidelity=math.fsum(fids) / len(fids),
        histogram=dict(sorted(hist.items())),
    )


def run_trials(config: ExperimentConfig, jobs: int = 1) -> TrialStats:
    """Run ``config.trials`` independent trials and aggregate them.

    Parity-gate runs whose only randomness is the probe read-out are drawn in
    one vectorised batch from the stream ``SeedSequence(seed)``.
    """
    config.validate()
    if (config.code == "parity" and config.noise.silent and not config.noise.theta_jitter
            and config.probe.eta2 == 0):
        return _parity_batch(config)
    if jobs <= 1:
        results = [_one_trial(config, i) for i in range(config.trials)]
    else:
        step = max(1, -(-config.trials // (4 * jobs)))
        chunks = [(config, s, min(s + step, config.trials))
                  for s in range(0, config.trials, step)]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = [r for part in pool.map(_trial_chunk, chunks) for r in part]
    return _aggregate(config, results)


def with_axis(config: ExperimentConfig, axis: str, value) -> ExperimentConfig:
    if axis in ("alpha", "eta2"):
        return replace(config, probe=replace(config.probe, **{axis: float(value)}))
    if axis == "theta":
        return replace(config, theta=float(value))
    if axis in ("p_x", "p_z", "p_loss", "theta_jitter"):
        return replace(config, noise=replace(config.noise, **{axis: float(value)}))
    if axis == "trials":
        return replace(config, trials=int(value))
    raise ConfigError("axis", f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")


@dataclass
class SweepRow:
    value: float
    config: ExperimentConfig
    stats: TrialStats


def sweep(config: ExperimentConfig, axis: str, values, jobs: int = 1) -> list[SweepRow]:
    """One run per value, seeded ``config.seed + index``, in input order."""
    if axis not in SWEEP_AXES:
        raise ConfigError("axis", f"unknown sweep axis {axis!r}; expected one of {SWEEP_AXES}")
    rows = []
    for i, v in enumerate(values):
        cfg = replace(with_axis(config, axis, v), seed=(config.seed + i) % 2 ** 64)
        rows.append(SweepRow(v, cfg, run_trials(cfg, jobs)))
    return rows
