"""Two-stage entangling protocol: run, score and compare models.

Atom A (prepared in ``ga``) interacts with the driven cavity for ``t1`` and
leaves behind a photon entangled with it. After a field-free delay, atom B
(prepared in ``g0``) absorbs the photon during ``stage_b_duration``, leaving
the atoms entangled and the cavity empty. Cavity decay acts throughout,
including the delay.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import hamiltonians as ham
from .hamiltonians import PhysicalParams
from .oracle import VARIANTS, ProtocolSchedule, drive_ratio, schedule
from .propagator import (
    DEFAULT_SAMPLES,
    DEFAULT_TOLERANCE,
    EXCITED,
    PHOTON,
    TWO_PHOTON,
    PropagationError,
    Trajectory,
    evolve_constant_trajectory,
    evolve_rotating_frame,
    evolve_timedep,
    populations,
)
from .space import BasisLabel, HilbertSpace, StateVector, basis_state, build_space, overlap

__all__ = [
    "MODELS",
    "FULL_SOLVERS",
    "ProtocolConfig",
    "SimResult",
    "ModelComparison",
    "make_params",
    "figure_labels",
    "target_state",
    "initial_state",
    "run_protocol",
    "compare_models",
]

logger = logging.getLogger(__name__)

MODELS = ("effective", "full")
FULL_SOLVERS = ("adaptive", "rotating_frame")

# Population allowed in the n_L + n_R = 2 sector before a run is rejected.
TWO_PHOTON_LIMIT = 1e-10

_L = BasisLabel.of
INITIAL_LABEL = _L("ga", "g0", 0, 0)
STAGE_A_LABELS = (_L("ga", "g0", 0, 0), _L("gL", "g0", 1, 0), _L("gR", "g0", 0, 1))
STAGE_B_QUBIT_LABELS = (
    _L("gL", "g0", 1, 0),
    _L("gR", "g0", 0, 1),
    _L("gL", "gR", 0, 0),
    _L("gR", "gL", 0, 0),
)
STAGE_B_QUTRIT_LABELS = (_L("ga", "g0", 0, 0),) + STAGE_B_QUBIT_LABELS


def make_params(variant: str = "qubit", **overrides) -> PhysicalParams:
    """Physical parameters with the variant's drive strengths filled in.

    ``omega_a`` defaults to ``sqrt(2) g_a`` (qubit) or ``(1 + sqrt(3)) g_a``
    (qutrit), ``omega_b`` to ``g_b``.
    """
    g_a = overrides.get("g_a", 1.0)
    g_b = overrides.get("g_b", 1.0)
    overrides.setdefault("omega_a", drive_ratio(variant) * g_a)
    overrides.setdefault("omega_b", g_b)
    return PhysicalParams(**overrides)


def figure_labels(variant: str, stage: str) -> tuple[BasisLabel, ...]:
    """Basis states whose populations are plotted for a stage (``"A"`` or ``"B"``)."""
    if stage == "A":
        return STAGE_A_LABELS
    if stage == "B":
        return STAGE_B_QUBIT_LABELS if variant == "qubit" else STAGE_B_QUTRIT_LABELS
    raise ValueError(f"stage must be 'A' or 'B', got {stage!r}")


def initial_state(space: HilbertSpace) -> StateVector:
    return basis_state(space, INITIAL_LABEL)


def target_state(space: HilbertSpace, variant: str, stage: str, literal: bool = False) -> StateVector:
    """Ideal state at the end of ``stage``, up to an overall phase.

    For the qutrit variant the stage-B dynamics leaves the spectator branch
    ``|ga,g0>`` with the opposite sign to the two transferred branches (the
    photon-to-atom transfer is half a Raman period and contributes -1). The
    default target carries that sign; ``literal=True`` returns the all-plus
    superposition instead, whose overlap with the produced state is 1/9.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    if stage == "A":
        labels = STAGE_A_LABELS[1:] if variant == "qubit" else STAGE_A_LABELS
        signs = [1.0] * len(labels)
    elif stage == "B":
        labels = [_L("gL", "gR"), _L("gR", "gL")]
        signs = [1.0, 1.0]
        if variant == "qutrit":
            labels.insert(0, _L("ga", "g0"))
            signs.insert(0, 1.0 if literal else -1.0)
    else:
        raise ValueError(f"stage must be 'A' or 'B', got {stage!r}")
    w = 1 / math.sqrt(len(labels))
    return StateVector.superposition(space, [(s * w, lbl) for s, lbl in zip(signs, labels)])


@dataclass(frozen=True)
class ProtocolConfig:
    """Everything needed to run the protocol once.

    ``params=None`` uses :func:`make_params` for the variant; ``schedule=None``
    derives the timings. ``full_solver`` picks the adaptive Runge-Kutta route or
    the exact rotating-frame route for ``model="full"``.
    """

    variant: str = "qubit"
    model: str = "effective"
    params: PhysicalParams | None = None
    schedule: ProtocolSchedule | None = None
    n_max: int = 2
    sample_count: int = DEFAULT_SAMPLES
    tolerance: float = DEFAULT_TOLERANCE
    stage_b_offset: float = 0.0
    full_solver: str = "adaptive"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.full_solver not in FULL_SOLVERS:
            raise ValueError(f"full_solver must be one of {FULL_SOLVERS}")
        if self.sample_count < 2:
            raise ValueError("sample_count must be at least 2")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.params is None:
            object.__setattr__(self, "params", make_params(self.variant))

    def resolved_schedule(self) -> ProtocolSchedule:
        return self.schedule if self.schedule is not None else schedule(self.variant, self.params)

    def overrides(self) -> tuple[str, ...]:
        """Deviations from the derived protocol, for flagging in output."""
        flags = []
        derived = schedule(self.variant, self.params)
        if self.schedule is not None and self.schedule != derived:
            flags.append("schedule")
        if not math.isclose(self.params.omega_a, derived.omega_a, rel_tol=1e-12):
            flags.append("omega_a")
        if not math.isclose(self.params.omega_b, derived.omega_b, rel_tol=1e-12):
            flags.append("omega_b")
        if self.stage_b_offset:
            flags.append("stage_b_offset")
        return tuple(flags)


@dataclass(frozen=True, eq=False)
class SimResult:
    config: ProtocolConfig
    schedule: ProtocolSchedule
    stage_a_trajectory: Trajectory
    delay_trajectory: Trajectory
    stage_b_trajectory: Trajectory
    p_a: float
    f_a: float
    p_b: float
    f_b: float
    fidelity_conditional: float
    overrides: tuple[str, ...] = field(default=())

    @property
    def final_state(self) -> StateVector:
        return self.stage_b_trajectory.final

    @property
    def success_probability(self) -> float:
        return self.p_b

    @property
    def success_probability_literal(self) -> float:
        """Square of the norm squared, the alternative success readout."""
        return self.p_b**2

    @property
    def fidelity_unconditional(self) -> float:
        return self.f_b

    @property
    def trajectories(self) -> tuple[Trajectory, Trajectory, Trajectory]:
        return (self.stage_a_trajectory, self.delay_trajectory, self.stage_b_trajectory)


def _stage_generators(config: ProtocolConfig, space: HilbertSpace):
    p = config.params
    if config.model == "effective":
        gen_a = ham.stage_a_effective(space, p)
        gen_b = ham.stage_b_effective(space, p)
    else:
        gen_a = ham.stage_a_full(space, p)
        gen_b = ham.stage_b_full(space, p, offset=config.stage_b_offset)
    return ham.add_conditional_decay(gen_a, space, p), ham.add_conditional_decay(gen_b, space, p)


def _evolve(config: ProtocolConfig, generator, psi0: StateVector, duration: float, stage: str) -> Trajectory:
    try:
        if isinstance(generator, ham.DrivenHamiltonian):
            if config.full_solver == "rotating_frame":
                return evolve_rotating_frame(generator, psi0, duration, config.sample_count)
            return evolve_timedep(generator, psi0, duration, config.tolerance, config.sample_count)
        return evolve_constant_trajectory(generator, psi0, duration, config.sample_count)
    except PropagationError as exc:
        raise PropagationError(f"stage {stage}: {exc}", exc.time_reached) from exc


def _fidelity(target: StateVector, state: StateVector) -> float:
    return abs(overlap(target, state)) ** 2


def run_protocol(config: ProtocolConfig) -> SimResult:
    """Run stage A, the delay and stage B, then score against the ideal targets.

    Trajectory times are global: stage A spans ``[0, t1]``, the delay
    ``[t1, t1']`` and stage B ``[t1', t2]``.
    """
    sched = config.resolved_schedule()
    space = build_space(config.n_max)
    gen_a, gen_b = _stage_generators(config, space)

    traj_a = _evolve(config, gen_a, initial_state(space), sched.t1, "A")
    psi_a = traj_a.final

    delay_gen = ham.decay_only(space, config.params)
    traj_d = evolve_constant_trajectory(delay_gen, psi_a, sched.delay, 2).shifted(sched.t1)

    traj_b = _evolve(config, gen_b, traj_d.final, sched.stage_b_duration, "B")
    traj_b = traj_b.shifted(sched.t1_prime)
    psi_b = traj_b.final

    if space.n_max >= 2:
        leak = max(populations(tr, [TWO_PHOTON]).max() for tr in (traj_a, traj_d, traj_b))
        if leak > TWO_PHOTON_LIMIT:
            raise RuntimeError(f"two-photon sector populated ({leak:.3g}); excitation number not conserved")

    target_b = target_state(space, config.variant, "B")
    p_b = psi_b.norm2
    f_cond = _fidelity(target_b, psi_b.normalized()) if p_b > 0 else 0.0
    overrides = config.overrides()
    if overrides:
        logger.info("non-standard protocol settings: %s", ", ".join(overrides))
    return SimResult(
        config=config,
        schedule=sched,
        stage_a_trajectory=traj_a,
        delay_trajectory=traj_d,
        stage_b_trajectory=traj_b,
        p_a=psi_a.norm2,
        f_a=_fidelity(target_state(space, config.variant, "A"), psi_a),
        p_b=p_b,
        f_b=_fidelity(target_b, psi_b),
        fidelity_conditional=f_cond,
        overrides=overrides,
    )


@dataclass(frozen=True)
class ModelComparison:
    """Effective versus full model on a common schedule and time grid."""

    max_population_deviation: float
    column_deviations: dict
    final_fidelity: float
    max_excited_population: float
    effective: SimResult = field(repr=False)
    full: SimResult = field(repr=False)


def _figure_series(result: SimResult) -> dict[str, np.ndarray]:
    variant = result.config.variant
    out = {}
    for stage, traj in (("A", result.stage_a_trajectory), ("B", result.stage_b_trajectory)):
        labels = figure_labels(variant, stage)
        rows = populations(traj, list(labels) + [PHOTON])
        for k in range(len(labels)):
            out[f"{stage}:P{k + 1}"] = rows[k]
        out[f"{stage}:Pp"] = rows[-1]
    return out


def compare_models(
    variant: str,
    params: PhysicalParams | None = None,
    n_max: int = 1,
    sample_count: int = DEFAULT_SAMPLES,
    tolerance: float = 1e-9,
    full_solver: str = "adaptive",
    reference: SimResult | None = None,
) -> ModelComparison:
    """Run the effective and full models on identical schedules and compare.

    Reports the largest absolute deviation of any plotted population (both
    stages, photon probability included), the fidelity between the two final
    states, and the peak excited-state population of the full model.
    ``reference`` may supply a precomputed run to compare against instead of
    the full model.
    """
    params = params if params is not None else make_params(variant)
    base = dict(variant=variant, params=params, n_max=n_max, sample_count=sample_count, tolerance=tolerance)
    eff = run_protocol(ProtocolConfig(model="effective", **base))
    full = reference if reference is not None else run_protocol(
        ProtocolConfig(model="full", full_solver=full_solver, **base)
    )
    s_eff, s_full = _figure_series(eff), _figure_series(full)
    devs = {k: float(np.max(np.abs(s_eff[k] - s_full[k]))) for k in s_eff}
    a, b = eff.final_state, full.final_state
    fid = abs(overlap(a, b)) ** 2 / (a.norm2 * b.norm2)
    excited = max(float(populations(tr, [EXCITED]).max()) for tr in full.trajectories)
    return ModelComparison(max(devs.values()), devs, fid, excited, eff, full)
