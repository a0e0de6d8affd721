"""Composite state space: two seven-level atoms and two truncated cavity modes.

The basis is the tensor product ``atom A (7) x atom B (7) x n_L x n_R`` and is
enumerated lexicographically over ``(atom_a, atom_b, n_l, n_r)`` with the atom
levels in :class:`AtomLevel` declaration order. That ordering coincides with
``numpy.kron`` ordering of the factors, which is how operators are assembled
in :mod:`bimodal_cqed.hamiltonians`.

Both atoms carry the full level alphabet so that the hand-off between the two
stages of the protocol is a pure change of Hamiltonian.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

__all__ = [
    "AtomLevel",
    "BasisLabel",
    "HilbertSpace",
    "StateVector",
    "build_space",
    "basis_state",
    "overlap",
    "NORM_TOLERANCE",
]

# Slack allowed above unit norm for protocol states.
NORM_TOLERANCE = 1e-9


class AtomLevel(enum.IntEnum):
    """Atomic levels; ``gL, g0, gR, ga`` are ground, ``eL, e0, eR`` excited."""

    gL = 0
    g0 = 1
    gR = 2
    ga = 3
    eL = 4
    e0 = 5
    eR = 6

    @property
    def is_excited(self) -> bool:
        return self in (AtomLevel.eL, AtomLevel.e0, AtomLevel.eR)

    @classmethod
    def parse(cls, value: "AtomLevel | str | int") -> "AtomLevel":
        if isinstance(value, AtomLevel):
            return value
        if isinstance(value, str):
            try:
                return cls[value]
            except KeyError:
                raise ValueError(f"unknown atom level {value!r}") from None
        return cls(value)


N_LEVELS = len(AtomLevel)
EXCITED_LEVELS = tuple(lvl for lvl in AtomLevel if lvl.is_excited)


class BasisLabel(NamedTuple):
    """Product basis label ``|atom_a, atom_b, n_l, n_r>``."""

    atom_a: AtomLevel
    atom_b: AtomLevel
    n_l: int
    n_r: int

    @classmethod
    def of(cls, atom_a, atom_b, n_l: int = 0, n_r: int = 0) -> "BasisLabel":
        """Build a label, accepting level names such as ``"gL"``."""
        return cls(AtomLevel.parse(atom_a), AtomLevel.parse(atom_b), int(n_l), int(n_r))

    def __str__(self) -> str:
        return f"|{self.atom_a.name},{self.atom_b.name},{self.n_l}L,{self.n_r}R>"


@dataclass(frozen=True)
class HilbertSpace:
    """Immutable description of the truncated product space.

    Use :func:`build_space` rather than constructing directly.
    """

    n_max: int
    labels: tuple[BasisLabel, ...] = field(repr=False, compare=False)
    _index: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def mode_dim(self) -> int:
        return self.n_max + 1

    def index(self, label: BasisLabel) -> int:
        label = BasisLabel.of(*label)
        for n in (label.n_l, label.n_r):
            if not 0 <= n <= self.n_max:
                raise ValueError(
                    f"photon number {n} outside truncation [0, {self.n_max}] for {label}"
                )
        return self._index[label]

    def label(self, index: int) -> BasisLabel:
        return self.labels[index]

    def mask(self, predicate) -> np.ndarray:
        """Boolean array over the basis selecting labels where ``predicate(label)``."""
        return np.fromiter((bool(predicate(lbl)) for lbl in self.labels), bool, self.dim)

    def photon_numbers(self) -> np.ndarray:
        """Total photon number ``n_L + n_R`` of every basis state."""
        return np.array([lbl.n_l + lbl.n_r for lbl in self.labels])


def build_space(n_max: int = 2) -> HilbertSpace:
    """Create the product space with photon truncation ``n_max`` per mode.

    Parameters
    ----------
    n_max : int
        Largest photon occupation kept in each cavity mode. Must be at least 1,
        since the protocol passes a single photon between the atoms.

    Returns
    -------
    HilbertSpace
        Space of dimension ``49 * (n_max + 1)**2``.
    """
    n_max = int(n_max)
    if n_max < 1:
        raise ValueError(
            f"n_max={n_max}: at least one photon per mode is needed to represent the protocol"
        )
    photons = range(n_max + 1)
    labels = tuple(
        BasisLabel(a, b, nl, nr)
        for a, b, nl, nr in itertools.product(AtomLevel, AtomLevel, photons, photons)
    )
    return HilbertSpace(n_max, labels, {lbl: i for i, lbl in enumerate(labels)})


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes over a :class:`HilbertSpace`.

    The norm may drop below one under the conditional (no-jump) evolution.
    """

    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.space.dim,):
            raise ValueError(f"expected {self.space.dim} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def amplitude(self, label) -> complex:
        return complex(self.amplitudes[self.space.index(label)])

    def population(self, label) -> float:
        return abs(self.amplitude(label)) ** 2

    def normalized(self) -> "StateVector":
        n = np.sqrt(self.norm2)
        if n == 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.space, self.amplitudes / n)

    @classmethod
    def superposition(cls, space: HilbertSpace, terms) -> "StateVector":
        """State ``sum_k c_k |label_k>`` from an iterable of ``(c_k, label_k)``."""
        amps = np.zeros(space.dim, complex)
        for coeff, label in terms:
            amps[space.index(label)] += coeff
        return cls(space, amps)

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same_space(self, other)
        return StateVector(self.space, self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same_space(self, other)
        return StateVector(self.space, self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "StateVector":
        return StateVector(self.space, self.amplitudes * scalar)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "StateVector":
        return StateVector(self.space, self.amplitudes / scalar)


def _check_same_space(a: StateVector, b: StateVector) -> None:
    if a.space is not b.space and a.space.n_max != b.space.n_max:
        raise ValueError(
            f"states live in different spaces (n_max={a.space.n_max} vs {b.space.n_max})"
        )


def basis_state(space: HilbertSpace, label) -> StateVector:
    """Unit vector on a single basis label; raises for out-of-range photon numbers."""
    amps = np.zeros(space.dim, complex)
    amps[space.index(label)] = 1.0
    return StateVector(space, amps)


def overlap(a: StateVector, b: StateVector) -> complex:
    """Inner product ``<a|b>``, conjugate-linear in ``a``."""
    _check_same_space(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes))
