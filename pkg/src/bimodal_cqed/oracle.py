"""Closed-form amplitudes and timings of the ideal (decay-free) protocol.

These are independent of the matrix machinery and serve as the reference the
numerical propagation is checked against.

Stage A, from ``|ga>|0>``::

    c1 = (2 g^2 + W^2 exp(-i eta t / D)) / eta
    c2 = c3 = g W (exp(-i eta t / D) - 1) / eta,      eta = 2 g^2 + W^2

Stage B, from the equal-weight hand-off state (weight ``1/sqrt(m)`` with
``m = 2`` for qubits and ``m = 3`` for qutrits)::

    photon branches  (W^2 + g^2 exp(-i xi t / D)) / (sqrt(m) xi)
    atomic branches  g W (exp(-i xi t / D) - 1) / (sqrt(m) xi),   xi = g^2 + W^2

plus, for qutrits, the spectator branch ``|ga>|g0>|0>`` fixed at ``1/sqrt(3)``.

With ``W_A = sqrt(2) g_A`` the stage-A populations reach ``(0, 1/2, 1/2)`` at
``t1 = pi D / (4 g_A^2)``. With ``W_A = (1 + sqrt(3)) g_A`` one has
``eta = 2 (3 + sqrt(3)) g_A^2``, and at ``eta t / D = pi`` all three amplitudes
equal ``-1/sqrt(3)``. With ``W_B = g_B`` stage B completes at
``pi D / (2 g_B^2)``. The literal formula values are returned, so protocol-time
amplitudes carry an overall sign of -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hamiltonians import PhysicalParams

__all__ = [
    "VARIANTS",
    "StageACoefficients",
    "StageBCoefficients",
    "ProtocolSchedule",
    "drive_ratio",
    "stage_a_coeffs",
    "stage_b_coeffs",
    "schedule",
]

VARIANTS = ("qubit", "qutrit")
SQRT3 = math.sqrt(3.0)

# Consistency slack for a hand-off state passed to stage_b_coeffs.
HANDOFF_TOLERANCE = 1e-6


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant


def drive_ratio(variant: str) -> float:
    """Stage-A drive ``Omega_A / g_A`` producing the variant's superposition."""
    return math.sqrt(2.0) if _check_variant(variant) == "qubit" else 1.0 + SQRT3


@dataclass(frozen=True)
class StageACoefficients:
    c1: complex
    c2: complex
    c3: complex
    eta: float

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3])


@dataclass(frozen=True)
class StageBCoefficients:
    """Qubit: ``d1..d4`` over ``|gL,g0,L>, |gR,g0,R>, |gL,gR,0>, |gR,gL,0>``.

    Qutrit: ``d'1..d'5`` with ``|ga,g0,0>`` prepended.
    """

    variant: str
    amplitudes: tuple
    xi: float

    def as_array(self) -> np.ndarray:
        return np.array(self.amplitudes)


@dataclass(frozen=True)
class ProtocolSchedule:
    """Drive strengths and stage durations (times in ``1/g_A``)."""

    variant: str
    omega_a: float
    omega_b: float
    t1: float
    delay: float
    stage_b_duration: float

    def __post_init__(self):
        _check_variant(self.variant)
        for name in ("t1", "delay", "stage_b_duration"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def t1_prime(self) -> float:
        """Start of stage B."""
        return self.t1 + self.delay

    @property
    def t2(self) -> float:
        """End of stage B."""
        return self.t1_prime + self.stage_b_duration


def stage_a_coeffs(g_a: float, omega_a: float, delta: float, t: float) -> StageACoefficients:
    if delta <= 0:
        raise ValueError("delta must be positive")
    eta = 2 * g_a**2 + omega_a**2
    ph = np.exp(-1j * eta * t / delta)
    c1 = (2 * g_a**2 + omega_a**2 * ph) / eta
    c23 = (g_a * omega_a * ph - g_a * omega_a) / eta
    return StageACoefficients(complex(c1), complex(c23), complex(c23), eta)


def _check_handoff(variant: str, stage_a_final: StageACoefficients) -> None:
    c = stage_a_final.as_array()
    tol = HANDOFF_TOLERANCE
    if not np.isclose(c[1], c[2], atol=tol):
        raise ValueError("hand-off state must weight the L and R branches equally")
    if variant == "qubit":
        ok = abs(c[0]) < tol and abs(abs(c[1]) - 1 / math.sqrt(2)) < tol
    else:
        ok = np.allclose(c, c[0], atol=tol) and abs(abs(c[0]) - 1 / SQRT3) < tol
    if not ok:
        raise ValueError(f"stage-A amplitudes {np.round(c, 6)} are not a {variant} hand-off state")


def stage_b_coeffs(
    variant: str,
    g_b: float,
    omega_b: float,
    delta: float,
    t: float,
    stage_a_final: StageACoefficients | None = None,
) -> StageBCoefficients:
    """Stage-B amplitudes at time ``t`` after atom B enters.

    ``stage_a_final``, when given, is checked to be the equal-weight hand-off
    state the formulas assume; its overall phase is not propagated.
    """
    _check_variant(variant)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if stage_a_final is not None:
        _check_handoff(variant, stage_a_final)
    xi = g_b**2 + omega_b**2
    m = 2 if variant == "qubit" else 3
    ph = np.exp(-1j * xi * t / delta)
    photon = complex((omega_b**2 + g_b**2 * ph) / (math.sqrt(m) * xi))
    atomic = complex((g_b * omega_b * ph - g_b * omega_b) / (math.sqrt(m) * xi))
    amps = (photon, photon, atomic, atomic)
    if variant == "qutrit":
        amps = (complex(1 / SQRT3),) + amps
    return StageBCoefficients(variant, amps, xi)


def schedule(variant: str, params: PhysicalParams, delay_fraction: float = 0.1) -> ProtocolSchedule:
    """Derived drives and timings for ``variant``; the delay is ``delay_fraction * t1``."""
    _check_variant(variant)
    g_a, g_b, d = params.g_a, params.g_b, params.delta
    if variant == "qubit":
        t1 = math.pi * d / (4 * g_a**2)
    else:
        t1 = math.pi * d / (2 * (3 + SQRT3) * g_a**2)
    return ProtocolSchedule(
        variant=variant,
        omega_a=drive_ratio(variant) * g_a,
        omega_b=g_b,
        t1=t1,
        delay=delay_fraction * t1,
        stage_b_duration=math.pi * d / (2 * g_b**2),
    )
