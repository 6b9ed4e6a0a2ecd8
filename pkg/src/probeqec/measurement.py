"""Probe read-out: parity projection, homodyne and photon counting, mod-4 phase.

Quadrature convention: a coherent state ``|alpha e^{i phi}>`` read out on the
phase quadrature gives a unit-variance Gaussian centred on
``2 alpha sin(phi)``.  An odd-parity branch (phase ``+-theta``) is misread as
even when the sample falls inside ``|x| < alpha sin(theta)``, which happens
with probability ``erfc(alpha sin(theta) / sqrt(2)) / 2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .state import PHASE_TOL, Backend, HybridState, _close_mod_2pi


class FootprintError(ValueError):
    """Probe phases do not match the pattern the read-out expects."""


class Parity(enum.IntEnum):
    EVEN = 0
    ODD = 1


@dataclass(frozen=True)
class ParityOutcome:
    parity: Parity
    raw: float | int | None = None

    @property
    def even(self) -> bool:
        return self.parity is Parity.EVEN


@dataclass(frozen=True)
class Mod4Config:
    """Per-qubit phases for single-probe syndrome extraction on three qubits."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self):
        t = (self.theta1, self.theta2, self.theta3)
        if abs(sum(t)) > 1e-12:
            raise ValueError(f"phases must sum to zero, got {sum(t)!r}")
        mags = [abs(x) for x in t]
        if any(abs(a - b) <= 1e-12 for i, a in enumerate(mags) for b in mags[i + 1:]):
            raise ValueError("phase magnitudes must be pairwise distinct")
        pts = [0.0] + [s * x for x in t for s in (1, -1)]
        for i, a in enumerate(pts):
            for b in pts[i + 1:]:
                if _close_mod_2pi(a, b, 1e-12):
                    raise ValueError("the seven probe phases must be distinct modulo 2*pi")

    @classmethod
    def default(cls, theta: float) -> Mod4Config:
        return cls(theta, 2 * theta, -3 * theta)


@dataclass(frozen=True)
class Mod4Syndrome:
    value: int

    def __post_init__(self):
        if self.value not in (0, 1, 2, 3):
            raise ValueError(f"mod-4 syndrome must be 0..3, got {self.value}")


# group index (0: no shift, k: +-theta_k) -> modulo(4) syndrome value
MOD4_TABLE = {0: 0, 1: 2, 2: 3, 3: 1}


def p_err(alpha: float, theta: float) -> float:
    """Probability that an odd-parity probe is read as even on homodyne."""
    return 0.5 * float(erfc(alpha * math.sin(theta) / math.sqrt(2.0)))


def p_miss_photon(alpha: float, theta: float) -> float:
    """Probability that a displaced odd-parity probe shows zero photons."""
    return math.exp(-4.0 * alpha ** 2 * math.sin(theta / 2.0) ** 2)


def _nearest(phase, nominals):
    """Index of the nominal phase within half a spacing of ``phase``, or None."""
    best, best_d = None, None
    for i, v in enumerate(nominals):
        d = abs(math.remainder(phase - v, 2 * math.pi))
        if best_d is None or d < best_d:
            best, best_d = i, d
    return best, best_d


def infer_theta(state: HybridState, probe_id: int) -> float:
    phases = state.probe_phases(probe_id).values()
    return max((abs(math.remainder(p, 2 * math.pi)) for p in phases), default=0.0)


def parity_groups(state: HybridState, probe_id: int, theta: float | None = None,
                  strict: bool = True):
    """Split branches by parity footprint.

    Returns ``(theta, labels, nominal)``: branch key -> Parity, and branch key
    -> the nominal phase (0, +theta or -theta) it was assigned to.  With
    ``strict`` a phase more than theta/2 from every nominal raises; without it
    (jittered couplings) the nearest nominal wins.
    """
    if theta is None:
        theta = infer_theta(state, probe_id)
    phases = state.probe_phases(probe_id)
    if theta <= PHASE_TOL:
        # nothing distinguishes the branches: everything reads even
        if any(abs(math.remainder(p, 2 * math.pi)) > PHASE_TOL for p in phases.values()):
            raise FootprintError("non-zero probe phase with theta = 0")
        return theta, {k: Parity.EVEN for k in phases}, {k: 0.0 for k in phases}
    nominals = (0.0, theta, -theta)
    labels, nominal = {}, {}
    for k, p in phases.items():
        i, d = _nearest(p, nominals)
        if strict and d > theta / 2:
            raise FootprintError(
                f"probe phase {p!r} is not in {{0, +-{theta!r}}}")
        labels[k] = Parity.EVEN if i == 0 else Parity.ODD
        nominal[k] = nominals[i]
    return theta, labels, nominal


def _group_weights(state, labels):
    w = [0.0, 0.0]
    amps = state._branches
    for k, par in labels.items():
        w[par] += abs(amps[k][0]) ** 2
    return w


def _branch_table(state, probe_id):
    keys = list(state._branches)
    weights = np.array([abs(state._branches[k][0]) ** 2 for k in keys])
    phases = state.probe_phases(probe_id)
    return keys, weights / weights.sum(), np.array([phases[k] for k in keys])


def _residual_dephasing(state, probe_id, nominal, rng):
    """Phases that differ from their nominal value leak which-path information."""
    phases = state.probe_phases(probe_id)
    dev = {k: phases[k] - nominal[k] for k in phases}
    alpha = state.probes[probe_id].alpha
    state.random_phase_kick(dev, alpha ** 2, rng)


def collapse_parity(state: HybridState, probe_id: int, declared: Parity, labels, nominal, rng):
    """Project onto the declared parity group and detach the probe.

    If the declared group carries no weight (a misread of a state with a
    single parity) the qubits are left as they are: the probe measurement
    cannot create support that is not there.
    """
    keep = {k for k, par in labels.items() if par is declared}
    state.project(keep)
    _residual_dephasing(state, probe_id, nominal, rng)
    state.detach_probe(probe_id)


def sample_parity_declarations(state: HybridState, probe_id: int, rng, size: int,
                               theta: float | None = None, chunk: int = 1_000_000) -> np.ndarray:
    """Draw ``size`` independent read-outs of the probe; True where odd is declared.

    The state is not modified.  Uses the probe's back-end.
    """
    theta, labels, _ = parity_groups(state, probe_id, theta)
    probe = state.probes[probe_id]
    keys, weights, phases = _branch_table(state, probe_id)
    odd = np.array([labels[k] is Parity.ODD for k in keys])
    out = np.empty(size, dtype=bool)
    done = 0
    while done < size:
        n = min(chunk, size - done)
        idx = rng.choice(len(keys), size=n, p=weights)
        if probe.backend is Backend.IDEAL:
            out[done:done + n] = odd[idx]
        elif probe.backend is Backend.HOMODYNE:
            x = 2.0 * probe.alpha * np.sin(phases[idx]) + rng.standard_normal(n)
            out[done:done + n] = np.abs(x) >= probe.alpha * math.sin(theta)
        else:
            mean = 4.0 * probe.alpha ** 2 * np.sin(phases[idx] / 2.0) ** 2
            out[done:done + n] = rng.poisson(mean) > 0
        done += n
    return out


def measure_probe_parity(state: HybridState, probe_id: int, rng,
                         theta: float | None = None, strict: bool = True) -> ParityOutcome:
    """Read the probe and project the qubits onto the declared parity subspace.

    Every branch phase must sit near 0, +theta or -theta; ``theta`` is taken
    from the largest phase present when not given.  ``strict=False`` assigns
    stray phases to the nearest nominal instead of raising.
    """
    theta, labels, nominal = parity_groups(state, probe_id, theta, strict)
    probe = state.probes[probe_id]
    raw = None
    if probe.backend is Backend.IDEAL:
        w_even, w_odd = _group_weights(state, labels)
        declared = Parity.ODD if rng.random() * (w_even + w_odd) >= w_even else Parity.EVEN
    else:
        keys, weights, phases = _branch_table(state, probe_id)
        i = rng.choice(len(keys), p=weights)
        if probe.backend is Backend.HOMODYNE:
            raw = float(2.0 * probe.alpha * math.sin(phases[i]) + rng.standard_normal())
            declared = Parity.EVEN if abs(raw) < probe.alpha * math.sin(theta) else Parity.ODD
        else:
            raw = int(rng.poisson(4.0 * probe.alpha ** 2 * math.sin(phases[i] / 2.0) ** 2))
            declared = Parity.EVEN if raw == 0 else Parity.ODD
    collapse_parity(state, probe_id, declared, labels, nominal, rng)
    return ParityOutcome(declared, raw)


def mod4_groups(state: HybridState, probe_id: int, cfg: Mod4Config, strict: bool = True):
    """Branch key -> phase group (0 for no shift, k for +-theta_k), plus nominal phases."""
    nominals = [0.0]
    group_of = [0]
    for g, t in enumerate((cfg.theta1, cfg.theta2, cfg.theta3), start=1):
        nominals += [t, -t]
        group_of += [g, g]
    spacing = min(abs(math.remainder(a - b, 2 * math.pi))
                  for i, a in enumerate(nominals) for b in nominals[i + 1:])
    groups, nominal = {}, {}
    for k, p in state.probe_phases(probe_id).items():
        i, d = _nearest(p, nominals)
        if strict and d > spacing / 2:
            raise FootprintError(f"probe phase {p!r} is outside the mod-4 constellation")
        groups[k] = group_of[i]
        nominal[k] = nominals[i]
    return groups, nominal


def measure_probe_phase_mod4(state: HybridState, probe_id: int, cfg: Mod4Config,
                             rng, strict: bool = True) -> Mod4Syndrome:
    """Resolve which of the four phase groups the probe is in (ideal read-out only)."""
    if state.probes[probe_id].backend is not Backend.IDEAL:
        raise NotImplementedError("mod-4 read-out is only modelled for the ideal back-end")
    groups, nominal = mod4_groups(state, probe_id, cfg, strict)
    weights = [0.0] * 4
    for k, g in groups.items():
        weights[g] += abs(state._branches[k][0]) ** 2
    r = rng.random() * sum(weights)
    g = 0
    acc = weights[0]
    while r >= acc and g < 3:
        g += 1
        acc += weights[g]
    state.project({k for k, gg in groups.items() if gg == g})
    _residual_dephasing(state, probe_id, nominal, rng)
    state.detach_probe(probe_id)
    return Mod4Syndrome(MOD4_TABLE[g])
