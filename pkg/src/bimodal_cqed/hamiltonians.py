"""Hamiltonians for the two interaction stages, full and adiabatically eliminated.

All frequencies are in units of the stage-A coupling ``g_A`` and ``hbar = 1``.
The laboratory benchmark ``(g, kappa, gamma) / 2pi = (750, 2.6, 3.5) MHz``
becomes ``(1, 0.003467, 0.004667)`` in these units, see
:func:`params_from_mhz`.

Stage A couples atom A (``ga <-> e0`` by the classical drive, ``gL/gR <-> e0``
by the left/right cavity modes). Stage B couples atom B (``gL/gR <-> eL/eR`` by
the drive, ``g0 <-> eR`` via ``a_L`` and ``g0 <-> eL`` via ``a_R``).

The full interaction-picture Hamiltonians have the form
``H(t) = S + exp(-i D (t + t0)) A + h.c.`` where ``A`` maps ground levels of the
active atom to its excited levels. They are returned as
:class:`DrivenHamiltonian` objects, which can be evaluated at any time, applied
to vectors cheaply, or mapped to an exactly equivalent static generator in the
frame rotating at ``D`` on the excited levels.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp

from .space import N_LEVELS, AtomLevel, HilbertSpace

__all__ = [
    "PhysicalParams",
    "HamiltonianTerm",
    "DrivenHamiltonian",
    "params_from_mhz",
    "mode_annihilator",
    "number_operator",
    "atom_projector",
    "excitation_number_a",
    "excitation_number_b",
    "stage_a_raising",
    "stage_b_raising",
    "stage_a_full",
    "stage_b_full",
    "stage_a_effective_terms",
    "stage_b_effective_terms",
    "stage_a_effective",
    "stage_b_effective",
    "add_conditional_decay",
    "decay_only",
]

BENCHMARK_MHZ = {"g": 750.0, "kappa": 2.6, "gamma": 3.5}

# "Large" detuning: delta at least this multiple of every coupling.
LARGE_DETUNING_RATIO = 5.0


@dataclass(frozen=True)
class PhysicalParams:
    """Couplings, drives, detuning and decay rates in units of ``g_A``.

    ``kappa`` is the cavity field decay rate entering ``-i kappa (n_L + n_R)``;
    ``gamma`` is the excited-state decay rate entering ``-i gamma/2`` on each
    excited level.
    """

    g_a: float = 1.0
    g_b: float = 1.0
    omega_a: float = math.sqrt(2.0)
    omega_b: float = 1.0
    delta: float = 10.0
    kappa: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("g_a", "g_b", "delta"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        for name in ("kappa", "gamma"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be nonnegative, got {getattr(self, name)}")
        for name in ("omega_a", "omega_b"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def detuning_advisory(self) -> bool:
        """True when the detuning is too small for adiabatic elimination to be trusted."""
        largest = max(self.g_a, self.g_b, abs(self.omega_a), abs(self.omega_b))
        return self.delta < LARGE_DETUNING_RATIO * largest

    def replace(self, **changes) -> "PhysicalParams":
        return replace(self, **changes)


def params_from_mhz(g: float, kappa: float, gamma: float = 0.0, **kwargs) -> PhysicalParams:
    """Convert rates quoted as ``rate / 2pi`` in MHz into units of ``g``."""
    return PhysicalParams(kappa=kappa / g, gamma=gamma / g, **kwargs)


@dataclass(frozen=True)
class HamiltonianTerm:
    description: str
    matrix: np.ndarray


# -- elementary operators -------------------------------------------------------


def _lowering(n_max: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1, n_max + 1, dtype=float)), offsets=1, format="csr", dtype=complex)


def _ketbra(i: int, j: int, n: int = N_LEVELS) -> sp.csr_matrix:
    return sp.csr_matrix(([1.0 + 0j], ([i], [j])), shape=(n, n))


def _embed(space: HilbertSpace, atom_a=None, atom_b=None, mode_l=None, mode_r=None) -> sp.csr_matrix:
    eye_atom = sp.identity(N_LEVELS, dtype=complex, format="csr")
    eye_mode = sp.identity(space.mode_dim, dtype=complex, format="csr")
    factors = [
        eye_atom if atom_a is None else atom_a,
        eye_atom if atom_b is None else atom_b,
        eye_mode if mode_l is None else mode_l,
        eye_mode if mode_r is None else mode_r,
    ]
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return out


def _sp_annihilator(space: HilbertSpace, polarization: str) -> sp.csr_matrix:
    a = _lowering(space.n_max)
    if polarization == "L":
        return _embed(space, mode_l=a)
    if polarization == "R":
        return _embed(space, mode_r=a)
    raise ValueError(f"polarization must be 'L' or 'R', got {polarization!r}")


def _sp_projector(space: HilbertSpace, atom: str, ket, bra=None) -> sp.csr_matrix:
    ket = AtomLevel.parse(ket)
    bra = ket if bra is None else AtomLevel.parse(bra)
    local = _ketbra(ket, bra)
    if atom == "A":
        return _embed(space, atom_a=local)
    if atom == "B":
        return _embed(space, atom_b=local)
    raise ValueError(f"atom must be 'A' or 'B', got {atom!r}")


def mode_annihilator(space: HilbertSpace, polarization: str) -> np.ndarray:
    """Truncated lowering operator of the ``"L"`` or ``"R"`` cavity mode."""
    return _sp_annihilator(space, polarization).toarray()


def number_operator(space: HilbertSpace) -> np.ndarray:
    """Total photon number ``n_L + n_R`` (diagonal)."""
    return np.diag(space.photon_numbers().astype(complex))


def atom_projector(space: HilbertSpace, atom: str, ket, bra=None) -> np.ndarray:
    """``|ket><bra|`` on atom ``"A"`` or ``"B"``; ``bra`` defaults to ``ket``."""
    return _sp_projector(space, atom, ket, bra).toarray()


def _excited_mask(space: HilbertSpace, atom: str) -> np.ndarray:
    if atom == "A":
        return space.mask(lambda lbl: lbl.atom_a.is_excited)
    return space.mask(lambda lbl: lbl.atom_b.is_excited)


def excitation_number_a(space: HilbertSpace) -> np.ndarray:
    """Conserved quantity of stage A: ``n_L + n_R + [atom A in {ga, e0}]``."""
    q = space.photon_numbers() + space.mask(
        lambda lbl: lbl.atom_a in (AtomLevel.ga, AtomLevel.e0)
    )
    return np.diag(q.astype(complex))


def excitation_number_b(space: HilbertSpace) -> np.ndarray:
    """Conserved quantity of stage B: ``n_L + n_R + [atom B not in {g0, ga}]``."""
    q = space.photon_numbers() + space.mask(
        lambda lbl: lbl.atom_b not in (AtomLevel.g0, AtomLevel.ga)
    )
    return np.diag(q.astype(complex))


# -- full interaction-picture Hamiltonians -------------------------------------------


@dataclass(frozen=True, eq=False)
class DrivenHamiltonian:
    """``H(t) = static + exp(-i frequency (t + offset)) raising + h.c.``

    ``raising`` must map ground levels of one atom onto its excited levels
    (flagged by ``excited``), and ``static`` must commute with that projector.
    Time ``t`` is measured from the start of the stage.
    """

    raising: np.ndarray
    frequency: float
    excited: np.ndarray
    static: np.ndarray | None = None
    offset: float = 0.0
    _sparse: tuple = field(init=False, repr=False)

    def __post_init__(self):
        static = self.static
        if static is None:
            static = np.zeros_like(self.raising)
        object.__setattr__(self, "static", static)
        object.__setattr__(
            self,
            "_sparse",
            (
                sp.csr_matrix(self.raising),
                sp.csr_matrix(self.raising.conj().T),
                sp.csr_matrix(static),
            ),
        )

    @property
    def dim(self) -> int:
        return self.raising.shape[0]

    def phase(self, t: float) -> complex:
        return np.exp(-1j * self.frequency * (t + self.offset))

    def __call__(self, t: float) -> np.ndarray:
        p = self.phase(t)
        return self.static + p * self.raising + np.conj(p) * self.raising.conj().T

    def apply(self, t: float, y: np.ndarray) -> np.ndarray:
        """``H(t) @ y`` without forming the dense matrix."""
        up, down, static = self._sparse
        p = self.phase(t)
        return p * (up @ y) + np.conj(p) * (down @ y) + static @ y

    def with_static(self, static: np.ndarray) -> "DrivenHamiltonian":
        return DrivenHamiltonian(self.raising, self.frequency, self.excited, static, self.offset)

    def rotating_generator(self) -> np.ndarray:
        """Static generator in the frame ``exp(i frequency (t + offset) P_e)``.

        In that frame the dynamics is exactly ``i d/dt phi = K phi`` with
        ``K = static - frequency P_e + raising + raising^dagger``.
        """
        return (
            self.static
            - self.frequency * np.diag(self.excited.astype(complex))
            + self.raising
            + self.raising.conj().T
        )

    def frame_phases(self, t: float) -> np.ndarray:
        """Diagonal of ``exp(i frequency (t + offset) P_e)``."""
        return np.where(self.excited, np.exp(1j * self.frequency * (t + self.offset)), 1.0)


def stage_a_raising(space: HilbertSpace, params: PhysicalParams) -> np.ndarray:
    """Ground-to-excited part of stage A: drive on ``ga`` and cavity on ``gL``, ``gR``."""
    e0 = AtomLevel.e0
    a_l = _sp_annihilator(space, "L")
    a_r = _sp_annihilator(space, "R")
    op = (
        params.omega_a * _sp_projector(space, "A", e0, AtomLevel.ga)
        + params.g_a * a_r @ _sp_projector(space, "A", e0, AtomLevel.gR)
        + params.g_a * a_l @ _sp_projector(space, "A", e0, AtomLevel.gL)
    )
    return op.toarray()


def stage_b_raising(space: HilbertSpace, params: PhysicalParams) -> np.ndarray:
    """Ground-to-excited part of stage B."""
    lv = AtomLevel
    a_l = _sp_annihilator(space, "L")
    a_r = _sp_annihilator(space, "R")
    op = (
        params.omega_b * _sp_projector(space, "B", lv.eL, lv.gL)
        + params.omega_b * _sp_projector(space, "B", lv.eR, lv.gR)
        + params.g_b * a_l @ _sp_projector(space, "B", lv.eR, lv.g0)
        + params.g_b * a_r @ _sp_projector(space, "B", lv.eL, lv.g0)
    )
    return op.toarray()


def stage_a_full(space: HilbertSpace, params: PhysicalParams, offset: float = 0.0) -> DrivenHamiltonian:
    """Interaction-picture Hamiltonian of stage A; call the result with ``t``."""
    return DrivenHamiltonian(
        stage_a_raising(space, params), params.delta, _excited_mask(space, "A"), offset=offset
    )


def stage_b_full(space: HilbertSpace, params: PhysicalParams, offset: float = 0.0) -> DrivenHamiltonian:
    """Interaction-picture Hamiltonian of stage B.

    The clock starts at zero when atom B enters; ``offset`` shifts it to study
    the drive-phase convention across the hand-off.
    """
    return DrivenHamiltonian(
        stage_b_raising(space, params), params.delta, _excited_mask(space, "B"), offset=offset
    )


# -- effective Hamiltonians ---------------------------------------------------


def stage_a_effective_terms(space: HilbertSpace, params: PhysicalParams) -> list[HamiltonianTerm]:
    lv = AtomLevel
    g, om, d = params.g_a, params.omega_a, params.delta
    a_l = _sp_annihilator(space, "L")
    a_r = _sp_annihilator(space, "R")
    a_ld, a_rd = a_l.conj().T, a_r.conj().T

    def proj(k, b):
        return _sp_projector(space, "A", k, b)

    raman = om * g / d * (a_rd @ proj(lv.gR, lv.ga) + a_ld @ proj(lv.gL, lv.ga))
    terms = [
        ("Stark shift of ga", om**2 / d * proj(lv.ga, lv.ga)),
        (
            "cavity shifts and L/R exchange",
            g**2
            / d
            * (
                a_ld @ a_l @ proj(lv.gL, lv.gL)
                + a_rd @ a_r @ proj(lv.gR, lv.gR)
                + a_ld @ a_r @ proj(lv.gL, lv.gR)
                + a_rd @ a_l @ proj(lv.gR, lv.gL)
            ),
        ),
        ("Raman ga -> gL/gR with photon emission", raman + raman.conj().T),
    ]
    return [HamiltonianTerm(text, m.toarray()) for text, m in terms]


def stage_b_effective_terms(space: HilbertSpace, params: PhysicalParams) -> list[HamiltonianTerm]:
    lv = AtomLevel
    g, om, d = params.g_b, params.omega_b, params.delta
    a_l = _sp_annihilator(space, "L")
    a_r = _sp_annihilator(space, "R")

    def proj(k, b):
        return _sp_projector(space, "B", k, b)

    raman = om * g / d * (a_r @ proj(lv.gL, lv.g0) + a_l @ proj(lv.gR, lv.g0))
    n_modes = a_r.conj().T @ a_r + a_l.conj().T @ a_l
    terms = [
        ("Stark shifts of gL, gR", om**2 / d * (proj(lv.gL, lv.gL) + proj(lv.gR, lv.gR))),
        ("cavity shift of g0", g**2 / d * n_modes @ proj(lv.g0, lv.g0)),
        ("Raman g0 -> gL/gR with photon absorption", raman + raman.conj().T),
    ]
    return [HamiltonianTerm(text, m.toarray()) for text, m in terms]


def stage_a_effective(space: HilbertSpace, params: PhysicalParams) -> np.ndarray:
    """Adiabatically eliminated stage-A Hamiltonian (time independent, Hermitian)."""
    return sum(term.matrix for term in stage_a_effective_terms(space, params))


def stage_b_effective(space: HilbertSpace, params: PhysicalParams) -> np.ndarray:
    """Adiabatically eliminated stage-B Hamiltonian (time independent, Hermitian)."""
    return sum(term.matrix for term in stage_b_effective_terms(space, params))


# -- decay -------------------------------------------------------------------


def _decay_diagonal(space: HilbertSpace, params: PhysicalParams) -> np.ndarray:
    diag = -1j * params.kappa * space.photon_numbers().astype(complex)
    if params.gamma:
        n_excited = space.mask(lambda l: l.atom_a.is_excited).astype(float) + space.mask(
            lambda l: l.atom_b.is_excited
        )
        diag = diag - 0.5j * params.gamma * n_excited
    return diag


def add_conditional_decay(hamiltonian, space: HilbertSpace, params: PhysicalParams):
    """No-jump generator ``H - i kappa (n_L + n_R) - i gamma/2 sum |e><e|``.

    Accepts a dense matrix or a :class:`DrivenHamiltonian`; with
    ``kappa == gamma == 0`` the input is returned unchanged.
    """
    if params.kappa == 0 and params.gamma == 0:
        return hamiltonian
    decay = np.diag(_decay_diagonal(space, params))
    if isinstance(hamiltonian, DrivenHamiltonian):
        return hamiltonian.with_static(hamiltonian.static + decay)
    hamiltonian = np.asarray(hamiltonian)
    if hamiltonian.shape != (space.dim, space.dim):
        raise ValueError(f"Hamiltonian shape {hamiltonian.shape} does not match dim {space.dim}")
    return hamiltonian + decay


def decay_only(space: HilbertSpace, params: PhysicalParams) -> np.ndarray:
    """Generator for the field-free interval between the stages."""
    return np.diag(_decay_diagonal(space, params))

