"""Single- and two-qubit constants, the Bell basis, and the two-qubit state type.

Computational amplitudes are ordered |00>, |01>, |10>, |11> with qubit 1 as the
most significant bit.  Bell states follow

    beta_AB = (|0,B> + (-1)^A |1,1-B>) / sqrt(2)

and are ordered (beta_00, beta_01, beta_10, beta_11), which in sign labels is
(beta_--, beta_-+, beta_+-, beta_++).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BasisMismatch, NotNormalized

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI = (X, Y, Z)

BASES = ("bell", "computational")


def _bell_column(a: int, b: int) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[b] += 1.0
    v[2 + (1 - b)] += (-1.0) ** a
    return v / np.sqrt(2)


# Columns are the Bell states written in the computational basis.  The same
# matrix equals CNOT_12 (H x I), so it maps |AB> to beta_AB.
BELL_MATRIX = np.column_stack([_bell_column(a, b) for a in (0, 1) for b in (0, 1)])
BELL_MATRIX.setflags(write=False)

BELL_LABELS = ("00", "01", "10", "11")


def sign_to_bit(s: int) -> int:
    return 0 if s < 0 else 1


def bell_index(mu: int, nu: int) -> int:
    """Row index of beta_{mu nu} for sign labels mu, nu in {-1, +1}."""
    if mu not in (-1, 1) or nu not in (-1, 1):
        raise ValueError(f"Bell labels must be +-1, got ({mu}, {nu})")
    return 2 * sign_to_bit(mu) + sign_to_bit(nu)


def bell_labels(index: int) -> tuple[int, int]:
    return (-1 if index < 2 else 1, -1 if index % 2 == 0 else 1)


@dataclass(frozen=True)
class TwoQubitState:
    amplitudes: np.ndarray
    basis: str = "computational"

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(4)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.basis not in BASES:
            raise ValueError(f"unknown basis {self.basis!r}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def require_normalized(self, tol: float = 1e-10) -> None:
        if abs(self.norm - 1.0) > tol:
            raise NotNormalized(f"state norm is {self.norm!r}, expected 1")

    def to_computational(self) -> "TwoQubitState":
        if self.basis == "computational":
            return self
        return TwoQubitState(BELL_MATRIX @ self.amplitudes, "computational")

    def to_bell(self) -> "TwoQubitState":
        if self.basis == "bell":
            return self
        return TwoQubitState(BELL_MATRIX.conj().T @ self.amplitudes, "bell")

    def in_basis(self, basis: str) -> "TwoQubitState":
        if basis == "bell":
            return self.to_bell()
        if basis == "computational":
            return self.to_computational()
        raise BasisMismatch(f"unknown basis {basis!r}")

    def overlap(self, other: "TwoQubitState") -> complex:
        """<self|other>, converting ``other`` into this state's basis."""
        return complex(np.vdot(self.amplitudes, other.in_basis(self.basis).amplitudes))

    def equals_up_to_phase(self, other: "TwoQubitState", tol: float = 1e-10) -> bool:
        return abs(abs(self.overlap(other)) - self.norm * other.norm) < tol


def bell_state(mu: int, nu: int) -> TwoQubitState:
    amps = np.zeros(4, dtype=complex)
    amps[bell_index(mu, nu)] = 1.0
    return TwoQubitState(amps, "bell")


def computational_state(a: int, b: int) -> TwoQubitState:
    amps = np.zeros(4, dtype=complex)
    amps[2 * a + b] = 1.0
    return TwoQubitState(amps, "computational")
