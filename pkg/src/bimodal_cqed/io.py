"""Flat-file formats: ``key=value`` run configs, CSV tables, gnuplot scripts.

Numbers are written with 12 significant digits (``%.12g``) and ``\\n`` line
endings so repeated runs produce byte-identical files.
"""
from __future__ import annotations

import csv
import os
from dataclasses import replace
from pathlib import Path

from .oracle import VARIANTS
from .propagator import PHOTON, populations
from .protocol import FULL_SOLVERS, MODELS, ProtocolConfig, SimResult, figure_labels, make_params
from .sweep import SWEEPABLE, SweepRow, SweepSpec

__all__ = [
    "ConfigError",
    "convert_value",
    "CONFIG_KEYS",
    "parse_config",
    "read_config",
    "protocol_config",
    "sweep_spec",
    "TRAJECTORY_HEADER",
    "trajectory_rows",
    "write_trajectory_csv",
    "write_sweep_csv",
    "read_csv",
    "trajectory_plot_script",
    "sweep_plot_script",
    "fmt",
]


class ConfigError(ValueError):
    """Invalid run configuration (unknown key, bad value, malformed line)."""


def _choice(options):
    def parse(text):
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return parse


def _nonneg_int(text):
    value = int(text)
    if value < 0:
        raise ValueError("must be nonnegative")
    return value


CONFIG_KEYS = {
    "variant": _choice(VARIANTS),
    "model": _choice(MODELS),
    "full_solver": _choice(FULL_SOLVERS),
    "g_a": float,
    "g_b": float,
    "omega_a": float,
    "omega_b": float,
    "delta": float,
    "kappa": float,
    "gamma": float,
    "delay": float,
    "stage_b_offset": float,
    "n_max": _nonneg_int,
    "samples": _nonneg_int,
    "tolerance": float,
    "out": str,
    "sweep_param": _choice(SWEEPABLE),
    "sweep_min": float,
    "sweep_max": float,
    "sweep_steps": _nonneg_int,
    "workers": _nonneg_int,
}


def convert_value(key: str, raw: str, where: str):
    if key not in CONFIG_KEYS:
        raise ConfigError(f"{where}unknown key {key!r}")
    try:
        return CONFIG_KEYS[key](raw)
    except ValueError as exc:
        raise ConfigError(f"{where}bad value {raw!r} for {key!r}: {exc}") from None


def parse_config(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = convert_value(key, raw, f"line {lineno}: ")
    return values


def read_config(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def protocol_config(values: dict) -> ProtocolConfig:
    """Build a :class:`ProtocolConfig` from parsed config values."""
    variant = values.get("variant", "qubit")
    physical = {k: values[k] for k in ("g_a", "g_b", "omega_a", "omega_b", "delta", "kappa", "gamma") if k in values}
    try:
        cfg = ProtocolConfig(
            variant=variant,
            model=values.get("model", "effective"),
            params=make_params(variant, **physical),
            n_max=values.get("n_max", 2),
            sample_count=values.get("samples", 400),
            tolerance=values.get("tolerance", 1e-10),
            stage_b_offset=values.get("stage_b_offset", 0.0),
            full_solver=values.get("full_solver", "adaptive"),
        )
        if "delay" in values:
            cfg = replace(cfg, schedule=replace(cfg.resolved_schedule(), delay=values["delay"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def sweep_spec(values: dict) -> SweepSpec:
    try:
        return SweepSpec(
            parameter=values.get("sweep_param", "kappa"),
            start=values.get("sweep_min", 0.0),
            stop=values.get("sweep_max", 0.2),
            steps=values.get("sweep_steps", 50),
            base=protocol_config(values),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def fmt(x) -> str:
    """Locale-independent 12-significant-digit formatting."""
    if isinstance(x, str):
        return x
    x = float(x)
    if x == 0:
        return "0"
    return "%.12g" % x


TRAJECTORY_HEADER = ("t", "stage", "P1", "P2", "P3", "P4", "P5", "Pp", "norm2")


def trajectory_rows(result: SimResult):
    """Rows of the trajectory table; time is reported as ``g_A t``."""
    variant = result.config.variant
    g_a = result.config.params.g_a
    stages = (
        ("A", "A", result.stage_a_trajectory),
        ("delay", "B", result.delay_trajectory),
        ("B", "B", result.stage_b_trajectory),
    )
    for name, label_stage, traj in stages:
        labels = figure_labels(variant, label_stage)
        pops = populations(traj, list(labels) + [PHOTON])
        norms = traj.norms
        for k, t in enumerate(traj.times):
            cols = list(pops[: len(labels), k]) + [0.0] * (5 - len(labels))
            yield [g_a * t, name, *cols, pops[-1, k], norms[k]]


def _write_rows(path, header, rows) -> None:
    path = Path(path)
    if path.parent != Path(""):
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(x) for x in row])


def write_trajectory_csv(result: SimResult, path) -> None:
    _write_rows(path, TRAJECTORY_HEADER, trajectory_rows(result))


def write_sweep_csv(rows: list[SweepRow], parameter: str, path) -> None:
    header = (parameter, "P_A", "F_A", "P_B", "F_B")
    _write_rows(path, header, ([r.value, r.p_a, r.f_a, r.p_b, r.f_b] for r in rows))


def read_csv(path):
    """Read a CSV written by this package; numeric fields become floats."""

    def conv(text):
        try:
            return float(text)
        except ValueError:
            return text

    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[conv(x) for x in row] for row in reader]
    return header, rows


def _relative(csv_path, script_path) -> str:
    return os.path.relpath(Path(csv_path).resolve(), Path(script_path).resolve().parent)


def trajectory_plot_script(csv_path, script_path, variant: str) -> str:
    """Gnuplot script plotting both stages of a trajectory CSV."""
    data = _relative(csv_path, script_path)
    png = Path(script_path).with_suffix(".png").name
    n_b = len(figure_labels(variant, "B"))

    def curves(stage, count, prime):
        parts = [
            f"'{data}' using 1:(strcol(2) eq '{stage}' ? ${k + 3} : 1/0) with lines title \"P{prime}{k + 1}\""
            for k in range(count)
        ]
        parts.append(f"'{data}' using 1:(strcol(2) eq '{stage}' ? $8 : 1/0) with lines dt 2 title \"P{prime}p\"")
        return ", \\\n     ".join(parts)

    return "\n".join(
        [
            f"# populations for the {variant} protocol; run: gnuplot {Path(script_path).name}",
            "set datafile separator ','",
            "set terminal pngcairo size 900,900",
            f"set output '{png}'",
            "set multiplot layout 2,1",
            "set yrange [0:1.05]",
            "set ylabel 'population'",
            "set xlabel 'g_A t'",
            "set title 'stage A'",
            "plot " + curves("A", 3, ""),
            "set title 'stage B'",
            "plot " + curves("B", n_b, "'"),
            "unset multiplot",
            "",
        ]
    )


def sweep_plot_script(csv_path, script_path, parameter: str) -> str:
    data = _relative(csv_path, script_path)
    png = Path(script_path).with_suffix(".png").name
    return "\n".join(
        [
            f"# success probability and fidelity versus {parameter}; run: gnuplot {Path(script_path).name}",
            "set datafile separator ','",
            "set key autotitle columnhead",
            "set terminal pngcairo size 900,900",
            f"set output '{png}'",
            "set multiplot layout 2,1",
            f"set xlabel '{parameter} / g_A'",
            "set ylabel 'success probability'",
            f"plot '{data}' using 1:2 with linespoints, '' using 1:4 with linespoints",
            "set ylabel 'fidelity'",
            f"plot '{data}' using 1:3 with linespoints, '' using 1:5 with linespoints",
            "unset multiplot",
            "",
        ]
    )
