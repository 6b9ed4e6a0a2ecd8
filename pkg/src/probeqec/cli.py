"""Command-line front end.

Exit codes: 0 success, 1 fidelity check failed (demo), 2 usage, parse or
validation error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import os
import re
import sys
from dataclasses import replace

import numpy as np

from . import __version__, codes
from .codes import Code, ProbeSettings, SyndromeMode
from .experiments import (SWEEP_AXES, ConfigError, ExperimentConfig, TrialStats, correct,
                          encode, run_trials, sweep)
from .noise import NoiseSpec, inject_pauli, lose_qubit
from .state import Backend, ProbeMode

CSV_COLUMNS = ("code", "syndrome_mode", "alpha", "theta", "eta2", "p_x", "p_z", "p_loss",
               "theta_jitter", "trials", "seed", "failures", "logical_error_rate",
               "wilson_lo", "wilson_hi", "mean_fidelity")

SEED_ENV = "PROBEQEC_SEED"

# section -> key -> (converter, default)
SCHEMA = {
    "experiment": {
        "code": (str, "bitflip3"), "n": (int, 2), "syndrome_mode": (str, "mod4"),
        "trials": (int, 1000), "seed": (int, None), "c0": (complex, 0.6),
        "c1": (complex, 0.8), "haar": ("bool", False), "parity_input": (str, "odd"),
    },
    "probe": {
        "alpha": (float, 30.9), "theta": (float, 0.1), "eta2": (float, 0.0),
        "backend": (str, "ideal"),
    },
    "noise": {
        "p_x": (float, 0.0), "p_z": (float, 0.0), "p_loss": (float, 0.0),
        "theta_jitter": (float, 0.0), "ancilla_eps": (float, 0.0),
        "schedule": ("list", ["round1"]),
    },
    "sweep": {"axis": (str, None), "values": ("floats", None)},
}

# ExperimentConfig field name -> (section, key), for line-anchored messages
_FIELD_SOURCE = {k: (s, k) for s, keys in SCHEMA.items() for k in keys}


class ConfigFileError(Exception):
    pass


def _fmt(x) -> str:
    if isinstance(x, complex):
        if x.imag == 0:
            return _fmt(x.real)
        if x.real == 0:
            return f"{x.imag:.9g}j"
        return f"{x.real:.9g}{x.imag:+.9g}j"
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def csv_row(config: ExperimentConfig, stats: TrialStats) -> list[str]:
    lo, hi = stats.wilson_95
    vals = (config.code, SyndromeMode(config.syndrome_mode).value, float(config.probe.alpha),
            float(config.theta), float(config.probe.eta2), float(config.noise.p_x),
            float(config.noise.p_z), float(config.noise.p_loss),
            float(config.noise.theta_jitter), config.trials, config.seed, stats.failures,
            float(stats.logical_error_rate), float(lo), float(hi), float(stats.mean_fidelity))
    return [_fmt(v) for v in vals]


def write_csv(rows, out):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for config, stats in rows:
        w.writerow(csv_row(config, stats))


# -- config files -----------------------------------------------------------

def _key_lines(text):
    """(section, key) -> line number, for error messages."""
    lines, section = {}, None
    for i, line in enumerate(text.splitlines(), start=1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip().lower()
            continue
        m = re.match(r"\s*([A-Za-z_][\w]*)\s*[=:]", line)
        if m and section:
            lines.setdefault((section, m.group(1).lower()), i)
    return lines


def _convert(kind, raw):
    raw = raw.strip()
    if kind == "bool":
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")
    if kind == "list":
        return [s.strip() for s in raw.split(",") if s.strip()]
    if kind == "floats":
        return [float(s) for s in raw.split(",") if s.strip()]
    if kind is complex:
        return complex(raw.replace(" ", ""))
    return kind(raw)


def parse_config(text: str, name: str = "<config>"):
    """Parse config text.

    Returns ``(config, sweep axis or None, sweep values or None, file seed or
    None)``.  Seed precedence is handled by the caller, so ``config.seed`` is
    only a placeholder when the file has no seed.
    """
    lines = _key_lines(text)
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=name)
    except configparser.Error as exc:
        raise ConfigFileError(str(exc)) from None

    def where(section, key):
        ln = lines.get((section, key))
        return f"{name}:{ln}" if ln else name

    values = {}
    for section in parser.sections():
        if section.lower() not in SCHEMA:
            raise ConfigFileError(f"{name}: unknown section [{section}]")
        for key, raw in parser.items(section):
            spec = SCHEMA[section.lower()].get(key)
            if spec is None:
                raise ConfigFileError(f"{where(section.lower(), key)}: unknown key {key!r}")
            try:
                values[key] = _convert(spec[0], raw)
            except ValueError as exc:
                raise ConfigFileError(f"{where(section.lower(), key)}: {key}: {exc}") from None
    for keys in SCHEMA.values():
        for key, (_, default) in keys.items():
            values.setdefault(key, default)

    def fail(field_name, message):
        section, key = _FIELD_SOURCE.get(field_name, ("experiment", field_name))
        return ConfigFileError(f"{where(section, key)}: {field_name}: {message}")

    try:
        probe = ProbeMode(values["alpha"], values["eta2"], Backend(values["backend"]))
    except ValueError as exc:
        field_name = ("alpha" if "alpha" in str(exc) else "eta2" if "eta2" in str(exc)
                      else "backend")
        raise fail(field_name, exc) from None
    try:
        noise = NoiseSpec(values["p_x"], values["p_z"], values["p_loss"],
                          values["theta_jitter"], values["ancilla_eps"],
                          tuple(values["schedule"]))
    except ValueError as exc:
        field_name = str(exc).split(" ", 1)[0]
        raise fail(field_name, exc) from None
    try:
        mode = SyndromeMode(values["syndrome_mode"])
    except ValueError:
        raise fail("syndrome_mode", f"expected 'binary' or 'mod4', got {values['syndrome_mode']!r}") from None
    config = ExperimentConfig(
        code=values["code"], n=values["n"], probe=probe, theta=values["theta"],
        syndrome_mode=mode, noise=noise, trials=values["trials"],
        seed=values["seed"] if values["seed"] is not None else 0,
        c0=values["c0"], c1=values["c1"], haar=values["haar"],
        parity_input=values["parity_input"])
    try:
        config.validate()
    except ConfigError as exc:
        raise fail(exc.field, str(exc).split(": ", 1)[1]) from None
    axis = values["axis"]
    if axis is not None and axis not in SWEEP_AXES:
        raise fail("axis", f"unknown sweep axis {axis!r}")
    if axis is not None and not values["values"]:
        raise fail("values", "sweep needs at least one value")
    return config, axis, values["values"], values["seed"]


def _resolve_seed(cli_seed, file_seed):
    if cli_seed is not None:
        return cli_seed
    if file_seed is not None:
        return file_seed
    env = os.environ.get(SEED_ENV)
    if env:
        return int(env)
    return 0


# -- commands -----------------------------------------------------------------

def cmd_run(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 3
    try:
        config, axis, values, file_seed = parse_config(text, args.config)
        seed = _resolve_seed(args.seed, file_seed)
        if not 0 <= seed < 2 ** 64:
            raise ConfigFileError(f"seed: must be an unsigned 64-bit integer, got {seed}")
    except (ConfigFileError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    config = replace(config, seed=seed)
    if args.command == "sweep" and axis is None:
        print(f"error: {args.config}: sweep needs a [sweep] section", file=sys.stderr)
        return 2
    if axis is None:
        rows = [(config, run_trials(config, args.jobs))]
    else:
        rows = [(r.config, r.stats) for r in sweep(config, axis, values, args.jobs)]
    buf = io.StringIO()
    write_csv(rows, buf)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(buf.getvalue())
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def _parse_error(spec):
    m = re.fullmatch(r"([XYZxyz]):(\d+)", spec)
    if not m:
        raise argparse.ArgumentTypeError(f"expected KIND:QUBIT such as X:2, got {spec!r}")
    return m.group(1).upper(), int(m.group(2))


def _show(title, state):
    print(f"-- {title}")
    print(state.format_branches())


def cmd_demo(args) -> int:
    code = Code(args.code)
    rng = np.random.default_rng(_resolve_seed(args.seed, None))
    probes = ProbeSettings(ProbeMode(args.alpha), args.theta)
    mode = SyndromeMode(args.mode)
    c0, c1 = complex(args.c0), complex(args.c1)
    n = args.n if code is Code.ERASURE else None
    state, layout = codes.input_state(code, c0, c1, n)
    print(f"{code.value}: c0={_fmt(c0)}, c1={_fmt(c1)}"
          + (f", n={n}" if n else "") + (f", syndrome mode {mode.value}"
                                         if code is not Code.ERASURE else ""))
    _show("input", state)
    rec = encode(state, layout, probes, rng, mode)
    _show("encoded", state)
    print(f"   encode record: {rec.signature()}")
    size = len(layout.qubits)
    for kind, q in args.error:
        if not 1 <= q <= size:
            print(f"error: qubit {q} outside 1..{size}", file=sys.stderr)
            return 2
        inject_pauli(state, layout.qubits[q - 1], kind)
        _show(f"after {kind} on qubit {q}", state)
    if args.lose is not None:
        if code is not Code.ERASURE or not 1 <= args.lose <= size:
            print("error: --lose needs the erasure code and a qubit in range", file=sys.stderr)
            return 2
        lose_qubit(state, layout.qubits[args.lose - 1], rng)
        _show(f"after losing qubit {args.lose}", state)
    try:
        layout, rec = correct(state, layout, probes, rng, mode, n)
    except codes.UnrecoverableLossError as exc:
        print(f"unrecoverable: {exc}")
        return 1
    for e in rec.entries:
        block = ",".join(str(q + 1) for q in e.block)
        corr = (f" -> {e.correction[0]} on " + ",".join(str(q + 1) for q in e.correction[1])
                if e.correction else "")
        print(f"   {e.label} [{block}]: {codes._fmt_value(e.value)}{corr}")
    final = state.extract(layout.qubits)
    _show("corrected (code qubits " + ",".join(str(q + 1) for q in layout.qubits) + ")", final)
    f = final.fidelity(codes.logical_state(code, c0, c1, n))
    print(f"fidelity {f:.12f}")
    return 0 if f >= 1 - 1e-10 else 1


def build_parser():
    p = argparse.ArgumentParser(prog="probeqec",
                                description="Probe-mediated quantum error correction simulator")
    sub = p.add_subparsers(dest="command", required=True)

    d = sub.add_parser("demo", help="walk through one noiseless encode/error/correct cycle")
    d.add_argument("code", choices=[c.value for c in Code])
    d.add_argument("--error", action="append", default=[], type=_parse_error,
                   metavar="KIND:QUBIT", help="Pauli error, qubits numbered from 1")
    d.add_argument("--lose", type=int, help="erasure code: lose this qubit (from 1)")
    d.add_argument("--n", type=int, default=2, help="Bell pairs for the erasure code")
    d.add_argument("--mode", choices=[m.value for m in SyndromeMode], default="mod4")
    d.add_argument("--c0", default="0.6")
    d.add_argument("--c1", default="0.8")
    d.add_argument("--alpha", type=float, default=30.9)
    d.add_argument("--theta", type=float, default=0.1)
    d.add_argument("--seed", type=int)
    d.set_defaults(func=cmd_demo)

    for name in ("run", "sweep"):
        r = sub.add_parser(name, help="run trials (or a sweep) from a config file, emit CSV")
        r.add_argument("config")
        r.add_argument("--out")
        r.add_argument("--seed", type=int)
        r.add_argument("--jobs", type=int, default=1)
        r.add_argument("--format", choices=["csv"], default="csv")
        r.set_defaults(func=cmd_run)

    v = sub.add_parser("version")
    v.set_defaults(func=lambda args: print(__version__) or 0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
