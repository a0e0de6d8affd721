"""Command line: ``bimodal-cqed {simulate,sweep,verify,diagnose}``.

Exit codes: 0 success, 1 numerical failure (or failed verification),
2 configuration error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .checks import run_checks
from .propagator import PropagationError
from .protocol import run_protocol
from .sweep import effective_params, sweep

EXIT_OK, EXIT_NUMERICAL, EXIT_CONFIG = 0, 1, 2

_FLAG_KEYS = (
    "variant", "model", "full_solver", "g_a", "g_b", "omega_a", "omega_b", "delta",
    "kappa", "gamma", "delay", "stage_b_offset", "n_max", "samples", "tolerance",
)
_SWEEP_KEYS = ("sweep_param", "sweep_min", "sweep_max", "sweep_steps", "workers")


def _add_config_flags(p: argparse.ArgumentParser, keys) -> None:
    p.add_argument("--config", help="key=value config file; flags override its values")
    p.add_argument("--out", help="output CSV path")
    for key in keys:
        p.add_argument("--" + key.replace("_", "-"), dest=key, metavar=key.upper())


def _gather(args, keys) -> dict:
    values = io.read_config(args.config) if args.config else {}
    for key in keys + ("out",):
        raw = getattr(args, key, None)
        if raw is not None:
            values[key] = io.convert_value(key, raw, f"--{key.replace('_', '-')}: ")
    return values


def _write_script(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")


def cmd_simulate(args) -> int:
    values = _gather(args, _FLAG_KEYS)
    cfg = io.protocol_config(values)
    res = run_protocol(cfg)
    out = Path(values.get("out", f"{cfg.variant}_{cfg.model}.csv"))
    io.write_trajectory_csv(res, out)
    script = out.with_suffix(".gp")
    _write_script(script, io.trajectory_plot_script(out, script, cfg.variant))
    s = res.schedule
    lines = [
        f"variant={cfg.variant} model={cfg.model} delta={cfg.params.delta:.6g} "
        f"kappa={cfg.params.kappa:.6g} gamma={cfg.params.gamma:.6g} n_max={cfg.n_max}",
        f"schedule: t1={s.t1:.12g} delay={s.delay:.12g} stage_b={s.stage_b_duration:.12g} t2={s.t2:.12g}",
        f"stage A: P_A={res.p_a:.12g} F_A={res.f_a:.12g}",
        f"stage B: P_B={res.p_b:.12g} F_B={res.f_b:.12g}",
        f"success probability P={res.success_probability:.12g} (squared-norm readout {res.success_probability_literal:.12g})",
        f"fidelity: conditional={res.fidelity_conditional:.12g} unconditional={res.fidelity_unconditional:.12g}",
        f"wrote {out} and {script}",
    ]
    if res.overrides:
        lines.append("non-standard settings: " + ", ".join(res.overrides))
    if cfg.params.detuning_advisory:
        lines.append("note: detuning is not large compared with the couplings")
    print("\n".join(lines))
    return EXIT_OK


def cmd_sweep(args) -> int:
    values = _gather(args, _FLAG_KEYS + _SWEEP_KEYS)
    spec = io.sweep_spec(values)
    rows = sweep(spec, workers=values.get("workers", 1))
    out = Path(values.get("out", f"sweep_{spec.parameter}.csv"))
    io.write_sweep_csv(rows, spec.parameter, out)
    script = out.with_suffix(".gp")
    _write_script(script, io.sweep_plot_script(out, script, spec.parameter))
    failed = [r for r in rows if r.error]
    for r in failed:
        print(f"{spec.parameter}={r.value:.6g}: {r.error}", file=sys.stderr)
    print(f"wrote {len(rows)} rows to {out} and {script}")
    return EXIT_NUMERICAL if failed else EXIT_OK


def cmd_verify(args) -> int:
    results = run_checks(tolerance=args.tolerance, draws=args.draws)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_diagnose(args) -> int:
    values = _gather(args, _FLAG_KEYS)
    cfg = io.protocol_config(values)
    for stage in ("A", "B"):
        print(f"stage {stage}:")
        for line in effective_params(cfg.params, stage).lines():
            print("  " + line)
    if cfg.params.detuning_advisory:
        print("note: detuning is not large compared with the couplings")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bimodal-cqed", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the protocol and write a trajectory CSV")
    _add_config_flags(p, _FLAG_KEYS)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="sweep one parameter and write P/F columns")
    _add_config_flags(p, _FLAG_KEYS + _SWEEP_KEYS)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="check closed forms against numerics and invariants")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.add_argument("--draws", type=int, default=100)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagnose", help="effective couplings and cooperativity")
    _add_config_flags(p, _FLAG_KEYS)
    p.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except io.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PropagationError, RuntimeError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
