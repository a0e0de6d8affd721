"""One-dimensional parameter sweeps and effective-coupling diagnostics."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .hamiltonians import PhysicalParams
from .protocol import ProtocolConfig, run_protocol

__all__ = [
    "SWEEPABLE",
    "SweepSpec",
    "SweepRow",
    "EffectiveDiagnostics",
    "sweep",
    "effective_params",
]

SWEEPABLE = ("kappa", "delta", "n_max", "delay")

# "Much greater than" in the strong-coupling verdict.
STRONG_COUPLING_RATIO = 10.0


@dataclass(frozen=True)
class SweepSpec:
    parameter: str = "kappa"
    start: float = 0.0
    stop: float = 0.2
    steps: int = 50
    base: ProtocolConfig = ProtocolConfig()

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ValueError(f"cannot sweep {self.parameter!r}; choose from {SWEEPABLE}")
        if self.start > self.stop:
            raise ValueError("sweep start must not exceed stop")
        if self.steps < 2:
            raise ValueError("a sweep needs at least 2 steps")

    def values(self) -> np.ndarray:
        vals = np.linspace(self.start, self.stop, self.steps)
        if self.parameter == "n_max":
            vals = np.unique(np.round(vals).astype(int))
        return vals

    def config_at(self, value) -> ProtocolConfig:
        base = self.base
        if self.parameter == "n_max":
            return replace(base, n_max=int(value))
        if self.parameter == "delay":
            sched = replace(base.resolved_schedule(), delay=float(value))
            return replace(base, schedule=sched)
        if self.parameter == "delta" and base.schedule is not None:
            raise ValueError("a fixed schedule cannot follow a detuning sweep")
        return replace(base, params=base.params.replace(**{self.parameter: float(value)}))


@dataclass(frozen=True)
class SweepRow:
    value: float
    p_a: float = math.nan
    f_a: float = math.nan
    p_b: float = math.nan
    f_b: float = math.nan
    error: str | None = None


def _run_point(spec: SweepSpec, value) -> SweepRow:
    try:
        res = run_protocol(spec.config_at(value))
    except (ValueError, RuntimeError) as exc:
        return SweepRow(float(value), error=f"{type(exc).__name__}: {exc}")
    return SweepRow(float(value), res.p_a, res.f_a, res.p_b, res.f_b)


def sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Run the protocol at every grid point; rows are in ascending parameter order.

    Failures at individual points are recorded in ``SweepRow.error`` rather
    than aborting the sweep. ``workers > 1`` evaluates points concurrently.
    """
    values = spec.values()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda v: _run_point(spec, v), values))
    return [_run_point(spec, v) for v in values]


@dataclass(frozen=True)
class EffectiveDiagnostics:
    omega_eff: float
    gamma_eff: float
    kappa: float
    cooperativity: float
    strong_coupling_ok: bool

    def lines(self) -> list[str]:
        def ratio(a, b):
            return math.inf if b == 0 else a / b

        return [
            f"omega_eff     = {self.omega_eff:.6g}",
            f"gamma_eff     = {self.gamma_eff:.6g}",
            f"kappa         = {self.kappa:.6g}",
            f"cooperativity = {self.cooperativity:.6g}",
            f"omega_eff/gamma_eff = {ratio(self.omega_eff, self.gamma_eff):.6g}",
            f"omega_eff/kappa     = {ratio(self.omega_eff, self.kappa):.6g}",
            "strong coupling (omega_eff >> gamma_eff and omega_eff >> kappa): "
            + ("yes" if self.strong_coupling_ok else "no"),
        ]


def effective_params(params: PhysicalParams, stage: str = "A") -> EffectiveDiagnostics:
    """Raman coupling ``W g / D``, induced decay ``W^2 gamma / D^2`` and cooperativity.

    ``stage`` selects which drive and coupling (A or B) enter. Cooperativity
    ``g^2 / (kappa gamma)`` is infinite when either rate vanishes.
    """
    if params.delta <= 0:
        raise ValueError("delta must be positive")
    if stage == "A":
        om, g = params.omega_a, params.g_a
    elif stage == "B":
        om, g = params.omega_b, params.g_b
    else:
        raise ValueError(f"stage must be 'A' or 'B', got {stage!r}")
    omega_eff = abs(om) * g / params.delta
    gamma_eff = om**2 * params.gamma / params.delta**2
    denom = params.kappa * params.gamma
    coop = math.inf if denom == 0 else g**2 / denom
    ok = omega_eff >= STRONG_COUPLING_RATIO * gamma_eff and omega_eff >= STRONG_COUPLING_RATIO * params.kappa
    return EffectiveDiagnostics(omega_eff, gamma_eff, params.kappa, coop, ok)
