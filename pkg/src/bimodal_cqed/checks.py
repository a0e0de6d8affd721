"""Self-checks: closed forms against numerics, plus structural invariants.

Used by ``bimodal-cqed verify``. Hamiltonian builders are looked up on the
:mod:`bimodal_cqed.hamiltonians` module at call time so that a deliberately
broken builder can be swapped in to confirm the checks catch it.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import hamiltonians as ham
from .oracle import stage_a_coeffs, stage_b_coeffs
from .propagator import PHOTON, evolve_constant, populations
from .protocol import (
    STAGE_A_LABELS,
    ProtocolConfig,
    figure_labels,
    initial_state,
    make_params,
    run_protocol,
    target_state,
)
from .space import build_space

__all__ = ["CheckResult", "oracle_equivalence", "run_checks"]

STRUCTURAL_LIMIT = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    limit: float
    passed: bool

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name:<40s} {self.value:.3e}  (limit {self.limit:.1e})"


def _below(name, value, limit) -> CheckResult:
    return CheckResult(name, float(value), float(limit), bool(value <= limit))


def _random_params(rng):
    om_a, om_b, g_a, g_b = rng.uniform(0.3, 3.0, size=4)
    delta = rng.uniform(5.0, 50.0)
    return ham.PhysicalParams(g_a=g_a, g_b=g_b, omega_a=om_a, omega_b=om_b, delta=delta)


def oracle_equivalence(draws: int = 100, seed: int = 20120901, n_max: int = 1) -> dict[str, float]:
    """Largest |closed form - numerics| over random parameters and times.

    Returns the maximum deviation for stage A and for stage B of each
    variant. Stage B starts from the equal-weight hand-off state.
    """
    rng = np.random.default_rng(seed)
    space = build_space(n_max)
    psi0 = initial_state(space)
    handoff = {v: target_state(space, v, "A") for v in ("qubit", "qutrit")}
    worst = {"stage A": 0.0, "stage B qubit": 0.0, "stage B qutrit": 0.0}
    for _ in range(draws):
        p = _random_params(rng)
        t_a, t_b = rng.uniform(0.0, 60.0, size=2)

        numeric = evolve_constant(ham.stage_a_effective(space, p), psi0, t_a)
        exact = stage_a_coeffs(p.g_a, p.omega_a, p.delta, t_a).as_array()
        got = np.array([numeric.amplitude(lbl) for lbl in STAGE_A_LABELS])
        worst["stage A"] = max(worst["stage A"], np.max(np.abs(got - exact)))

        h_b = ham.stage_b_effective(space, p)
        for variant, start in handoff.items():
            numeric = evolve_constant(h_b, start, t_b)
            exact = stage_b_coeffs(variant, p.g_b, p.omega_b, p.delta, t_b).as_array()
            got = np.array([numeric.amplitude(lbl) for lbl in figure_labels(variant, "B")])
            key = f"stage B {variant}"
            worst[key] = max(worst[key], np.max(np.abs(got - exact)))
    return worst


def _structural(n_max: int = 2) -> list[CheckResult]:
    rng = np.random.default_rng(7)
    space = build_space(n_max)
    p = make_params("qutrit", delta=13.0, g_b=0.8, omega_b=1.3)
    q_a, q_b = ham.excitation_number_a(space), ham.excitation_number_b(space)
    full_a, full_b = ham.stage_a_full(space, p), ham.stage_b_full(space, p)
    eff_a, eff_b = ham.stage_a_effective(space, p), ham.stage_b_effective(space, p)
    out = []
    herm = comm = 0.0
    for t in rng.uniform(0, 10, size=5):
        ha, hb = full_a(t), full_b(t)
        herm = max(herm, np.abs(ha - ha.conj().T).max(), np.abs(hb - hb.conj().T).max())
        comm = max(comm, np.abs(ha @ q_a - q_a @ ha).max(), np.abs(hb @ q_b - q_b @ hb).max())
    herm = max(herm, np.abs(eff_a - eff_a.conj().T).max(), np.abs(eff_b - eff_b.conj().T).max())
    comm = max(comm, np.abs(eff_a @ q_a - q_a @ eff_a).max(), np.abs(eff_b @ q_b - q_b @ eff_b).max())
    out.append(_below("Hermiticity residual", herm, STRUCTURAL_LIMIT))
    out.append(_below("excitation-number commutators", comm, STRUCTURAL_LIMIT))

    contraction = 0.0
    for full, eff in ((full_a, eff_a), (full_b, eff_b)):
        a = full.raising
        contraction = max(contraction, np.abs(a.conj().T @ a / p.delta - eff).max())
    out.append(_below("effective = second-order contraction", contraction, STRUCTURAL_LIMIT))

    decayed = ham.add_conditional_decay(eff_a, space, p.replace(kappa=0.1, gamma=0.05))
    out.append(_below("decay eigenvalues Im <= 0", np.linalg.eigvals(decayed).imag.max(), STRUCTURAL_LIMIT))
    return out


def run_checks(tolerance: float = 1e-6, draws: int = 100) -> list[CheckResult]:
    """Every verification property; ``tolerance`` bounds the numerical checks."""
    results = [
        _below(f"oracle equivalence, {k}", v, tolerance)
        for k, v in oracle_equivalence(draws).items()
    ]
    results.extend(_structural())
    for variant in ("qubit", "qutrit"):
        res = run_protocol(ProtocolConfig(variant=variant))
        results.append(_below(f"{variant}: 1 - fidelity", 1 - res.f_b, tolerance))
        results.append(_below(f"{variant}: |1 - success probability|", abs(1 - res.p_b), tolerance))
        p_stage_a = populations(res.stage_a_trajectory, [PHOTON])[0, -1]
        expected = 1.0 if variant == "qubit" else 2.0 / 3.0
        results.append(_below(f"{variant}: photon probability after A", abs(p_stage_a - expected), tolerance))
        p_end = populations(res.stage_b_trajectory, [PHOTON])[0, -1]
        results.append(_below(f"{variant}: photon probability after B", p_end, tolerance))

        lossy = run_protocol(ProtocolConfig(variant=variant, params=make_params(variant, kappa=0.05)))
        norms = np.concatenate([tr.norms for tr in lossy.trajectories])
        results.append(_below(f"{variant}: norm increase under decay", max(np.diff(norms).max(), 0.0), STRUCTURAL_LIMIT))
    return results
