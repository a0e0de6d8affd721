"""Time evolution of state vectors.

Constant generators (possibly non-Hermitian) are exponentiated directly;
explicitly time-dependent generators are integrated with an embedded adaptive
Runge-Kutta scheme (Dormand-Prince 8(5,3)) whose step control resolves the
fast ``exp(-i delta t)`` phases of the interaction picture.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .space import HilbertSpace, StateVector

__all__ = [
    "PropagationError",
    "Trajectory",
    "PHOTON",
    "TWO_PHOTON",
    "EXCITED",
    "propagator",
    "evolve_constant",
    "evolve_constant_trajectory",
    "evolve_timedep",
    "evolve_rotating_frame",
    "populations",
]

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
DEFAULT_SAMPLES = 400
# Above this eigenvector condition number the eigen route is abandoned.
EIG_CONDITION_LIMIT = 1e8
# Step propagators sparser than this are applied in CSR form.
SPARSE_STEP_FRACTION = 0.1


class PropagationError(RuntimeError):
    """Raised when an integration cannot reach the requested time."""

    def __init__(self, message: str, time_reached: float | None = None):
        super().__init__(message)
        self.time_reached = time_reached


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled evolution: ``states[k]`` is the state at ``times[k]``."""

    space: HilbertSpace
    times: np.ndarray
    amplitudes: np.ndarray  # shape (n_times, dim)

    def __post_init__(self):
        times = np.asarray(self.times, float)
        amps = np.asarray(self.amplitudes, complex)
        if times.ndim != 1 or amps.shape != (times.size, self.space.dim):
            raise ValueError("times and amplitudes have inconsistent shapes")
        if times.size > 1 and np.any(np.diff(times) <= 0):
            raise ValueError("trajectory times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "amplitudes", amps)

    def __len__(self) -> int:
        return self.times.size

    @property
    def norms(self) -> np.ndarray:
        return np.einsum("ij,ij->i", self.amplitudes.conj(), self.amplitudes).real

    def state(self, k: int) -> StateVector:
        return StateVector(self.space, self.amplitudes[k])

    @property
    def states(self) -> list[StateVector]:
        return [self.state(k) for k in range(len(self))]

    @property
    def final(self) -> StateVector:
        return self.state(-1)

    def shifted(self, dt: float) -> "Trajectory":
        return Trajectory(self.space, self.times + dt, self.amplitudes)


def _check_dims(h: np.ndarray, psi0: StateVector) -> None:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"generator must be square, got shape {h.shape}")
    if h.shape[0] != psi0.space.dim:
        raise ValueError(f"generator dim {h.shape[0]} does not match state dim {psi0.space.dim}")


def propagator(h: np.ndarray, t: float, method: str = "expm") -> np.ndarray:
    """``exp(-i h t)`` for a square, possibly non-Hermitian, ``h``.

    ``method="expm"`` uses scaling and squaring with Pade approximants.
    ``method="eig"`` diagonalizes ``h`` and falls back to ``expm`` when the
    eigenvector matrix is ill-conditioned (defective or nearly so).
    """
    h = np.asarray(h, complex)
    diag = np.diagonal(h)
    if np.count_nonzero(h) == np.count_nonzero(diag):
        return np.diag(np.exp(-1j * t * diag))
    if method == "eig":
        w, v = scipy.linalg.eig(h)
        cond = np.linalg.cond(v)
        if np.isfinite(cond) and cond < EIG_CONDITION_LIMIT:
            return (v * np.exp(-1j * w * t)) @ np.linalg.inv(v)
        logger.debug("eigenvector condition %.3g too large, using expm", cond)
    elif method != "expm":
        raise ValueError(f"unknown method {method!r}")
    return scipy.linalg.expm(-1j * t * h)


def evolve_constant(h, psi0: StateVector, t: float, method: str = "expm") -> StateVector:
    """Return ``exp(-i h t) psi0``."""
    h = np.asarray(h)
    _check_dims(h, psi0)
    if t < 0:
        raise ValueError("duration must be nonnegative")
    return StateVector(psi0.space, propagator(h, t, method) @ psi0.amplitudes)


def evolve_constant_trajectory(h, psi0: StateVector, duration: float, sample_count: int = DEFAULT_SAMPLES) -> Trajectory:
    """Uniformly sampled trajectory under a constant generator.

    One step propagator is formed and applied repeatedly.
    """
    h = np.asarray(h)
    _check_dims(h, psi0)
    times = _sample_times(duration, sample_count)
    if times.size == 1:
        return Trajectory(psi0.space, times, psi0.amplitudes[None, :])
    step = propagator(h, times[1] - times[0])
    if np.count_nonzero(step) < SPARSE_STEP_FRACTION * step.size:
        step = sp.csr_matrix(step)
    amps = np.empty((times.size, psi0.space.dim), complex)
    amps[0] = psi0.amplitudes
    for k in range(1, times.size):
        amps[k] = step @ amps[k - 1]
    return Trajectory(psi0.space, times, amps)


def _sample_times(duration: float, sample_count: int) -> np.ndarray:
    if duration < 0:
        raise ValueError("duration must be nonnegative")
    if sample_count < 2:
        raise ValueError("sample_count must be at least 2")
    if duration == 0:
        return np.zeros(1)
    return np.linspace(0.0, duration, sample_count)


def evolve_timedep(
    hamiltonian,
    psi0: StateVector,
    duration: float,
    tolerance: float = DEFAULT_TOLERANCE,
    sample_count: int = DEFAULT_SAMPLES,
    max_step: float | None = None,
) -> Trajectory:
    """Integrate ``i d/dt psi = H(t) psi`` with adaptive step control.

    Parameters
    ----------
    hamiltonian : callable or DrivenHamiltonian
        Either ``t -> matrix`` or an object providing ``apply(t, y)``.
    psi0 : StateVector
        Initial state at ``t = 0``.
    duration : float
        Length of the integration interval.
    tolerance : float
        Relative and absolute local error bound per step.
    sample_count : int
        Number of uniformly spaced output samples, endpoints included.
    max_step : float, optional
        Upper bound on the step size. Defaults to a fifth of the fastest
        period when ``hamiltonian`` exposes ``frequency``, so the controller
        cannot step over the rotating terms.

    Raises
    ------
    PropagationError
        If the step size underflows before ``duration`` is reached.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    times = _sample_times(duration, sample_count)
    if times.size == 1:
        return Trajectory(psi0.space, times, psi0.amplitudes[None, :])

    apply = getattr(hamiltonian, "apply", None)
    if apply is None:
        def apply(t, y):
            return np.asarray(hamiltonian(t)) @ y

    if max_step is None:
        freq = getattr(hamiltonian, "frequency", 0.0)
        max_step = 2 * np.pi / abs(freq) / 5 if freq else np.inf

    def rhs(t, y):
        return -1j * apply(t, y)

    sol = solve_ivp(
        rhs,
        (0.0, times[-1]),
        np.array(psi0.amplitudes),
        method="DOP853",
        t_eval=times,
        rtol=tolerance,
        atol=tolerance,
        max_step=max_step,
    )
    if sol.status != 0:
        reached = float(sol.t[-1]) if sol.t.size else 0.0
        raise PropagationError(
            f"integration stopped at t={reached:.6g} of {duration:.6g}: {sol.message}",
            time_reached=reached,
        )
    amps = sol.y.T.copy()
    amps[0] = psi0.amplitudes
    return Trajectory(psi0.space, times, amps)


def evolve_rotating_frame(hamiltonian, psi0: StateVector, duration: float, sample_count: int = DEFAULT_SAMPLES) -> Trajectory:
    """Exact evolution of a :class:`DrivenHamiltonian` via its rotating frame.

    Independent of the Runge-Kutta route: the single drive frequency is
    removed by ``exp(i D (t + t0) P_e)``, the resulting static generator is
    exponentiated, and the samples are mapped back to the interaction picture.
    """
    k = hamiltonian.rotating_generator()
    start = psi0.amplitudes * hamiltonian.frame_phases(0.0)
    framed = evolve_constant_trajectory(k, StateVector(psi0.space, start), duration, sample_count)
    amps = np.array(framed.amplitudes)
    for i, t in enumerate(framed.times):
        amps[i] /= hamiltonian.frame_phases(t)
    return Trajectory(psi0.space, framed.times, amps)


# Selector sentinels for :func:`populations`.
PHOTON = "photon"
TWO_PHOTON = "two_photon"
EXCITED = "excited"


def _selector_mask(space: HilbertSpace, selector) -> np.ndarray:
    if isinstance(selector, str):
        if selector == PHOTON:
            return space.photon_numbers() >= 1
        if selector == TWO_PHOTON:
            return space.photon_numbers() >= 2
        if selector == EXCITED:
            return space.mask(lambda l: l.atom_a.is_excited or l.atom_b.is_excited)
        raise ValueError(f"unknown selector {selector!r}")
    if callable(selector):
        return space.mask(selector)
    if len(selector) == 4 and not isinstance(selector[0], (tuple, list)):
        selector = [selector]
    mask = np.zeros(space.dim, bool)
    for label in selector:
        mask[space.index(label)] = True
    return mask


def populations(traj: Trajectory, selectors) -> np.ndarray:
    """Population time series, one row per selector.

    A selector is a basis label, a list of labels (summed), a predicate on
    labels, or one of :data:`PHOTON` (any state with ``n_L + n_R >= 1``),
    :data:`TWO_PHOTON` or :data:`EXCITED`.
    """
    probs = np.abs(traj.amplitudes) ** 2
    return np.array([probs[:, _selector_mask(traj.space, s)].sum(axis=1) for s in selectors])
