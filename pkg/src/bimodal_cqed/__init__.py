"""Deterministic two-atom entanglement in a bimodal cavity at large detuning.

Two atoms cross a two-mode (left/right circular) cavity one after the other.
The first, Raman-driven, emits a photon entangled with its ground-state
sublevel; the second absorbs it, leaving the atoms in a two-qubit or two-qutrit
entangled state. The package builds the full and adiabatically eliminated
Hamiltonians, propagates them (with cavity loss as a non-Hermitian term),
checks them against closed-form amplitudes, and sweeps loss rates.

Modules
-------
space         product basis, states, overlaps
hamiltonians  full/effective Hamiltonians for both stages, decay terms
propagator    matrix exponentials, adaptive integration, populations
oracle        closed-form amplitudes and protocol timings
protocol      end-to-end runs, targets, model comparison
sweep         parameter sweeps and effective-coupling diagnostics
io, cli       config files, CSV/gnuplot output, command line
"""
from .hamiltonians import PhysicalParams, params_from_mhz
from .oracle import ProtocolSchedule, schedule, stage_a_coeffs, stage_b_coeffs
from .propagator import PHOTON, Trajectory, evolve_constant, evolve_timedep, populations
from .protocol import (
    ProtocolConfig,
    SimResult,
    compare_models,
    make_params,
    run_protocol,
    target_state,
)
from .space import AtomLevel, BasisLabel, StateVector, basis_state, build_space, overlap
from .sweep import SweepSpec, effective_params

__version__ = "0.1.0"
