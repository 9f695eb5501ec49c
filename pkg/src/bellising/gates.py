"""Circuit-gate readings of the exchange forms, and teleportation through one of them.

Two conventions matter here:

* Bell labels are read as classical bits (- -> 0, + -> 1), so beta_{mu nu}
  is the "label state" |A B>.  Gates in the identities below act on those
  labels, not on the physical qubits.
* Gate products are written as operators: ``X C X`` applies the right-hand X first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import BasisMismatch, NotNormalized, ValidationError
from .evolution import UnitaryBell
from .states import BELL_MATRIX, HADAMARD, I2, X, Y, Z
from .synthesis import antidiagonal_form, standard_signs

P0 = np.diag([1, 0]).astype(complex)
P1 = np.diag([0, 1]).astype(complex)
CNOT = np.kron(P0, I2) + np.kron(P1, X)
# Maps computational basis states onto Bell states: CNOT (H x I).
BELL_CIRCUIT = CNOT @ np.kron(HADAMARD, I2)


@dataclass(frozen=True)
class GateExpr:
    name: str
    matrix: np.ndarray

    def __matmul__(self, other: "GateExpr") -> "GateExpr":
        return GateExpr(f"{self.name} {other.name}", self.matrix @ other.matrix)


def on_channel(g: np.ndarray, channel: int, name: str = "G") -> GateExpr:
    m = np.kron(g, I2) if channel == 1 else np.kron(I2, g)
    return GateExpr(f"{name}{channel}", m)


def controlled(g: np.ndarray, control, name: str = "G") -> GateExpr:
    """C^1(g_2), C^2(g_1) or C^{1+2}(g): the last applies the 4x4 g on odd-parity labels."""
    if control == 1:
        return GateExpr(f"C1({name}2)", np.kron(P0, I2) + np.kron(P1, g))
    if control == 2:
        return GateExpr(f"C2({name}1)", np.kron(I2, P0) + np.kron(g, P1))
    if control == "1^2":
        odd = np.diag([0, 1, 1, 0]).astype(complex)
        return GateExpr(f"C1^2({name})", (np.eye(4) - odd) + g @ odd)
    raise ValidationError(f"unknown control {control!r}")


def to_computational(U: UnitaryBell) -> UnitaryBell:
    if U.basis != "bell":
        raise BasisMismatch("expected a Bell-basis operator")
    W = BELL_CIRCUIT
    return UnitaryBell(W @ U.matrix @ W.conj().T, "computational")


def to_bell(U: UnitaryBell) -> UnitaryBell:
    if U.basis != "computational":
        raise BasisMismatch("expected a computational-basis operator")
    W = BELL_CIRCUIT
    return UnitaryBell(W.conj().T @ U.matrix @ W, "bell")


def exchange_form(axis: int, j: int, flip: bool = False) -> np.ndarray:
    """A_{h,j}^{0, pi/2} with the first-row sign convention (inverted when ``flip``)."""
    S = standard_signs(axis, j)
    if flip:
        S = (-S[0], -S[1])
    return antidiagonal_form(axis, j, 0.0, math.pi / 2, S)


def equivalence_table() -> list[tuple[int, int, GateExpr]]:
    iY = 1j * Y
    X1 = on_channel(X, 1, "X")
    X2 = on_channel(X, 2, "X")
    c1 = controlled(iY, 1, "iY")
    c2 = controlled(iY, 2, "iY")
    cx = controlled(1j * np.kron(X, X), "1^2", "iX1X2")
    return [
        (1, 1, X1 @ c1 @ X1),
        (1, 2, c1),
        (2, 1, X1 @ cx @ X1),
        (2, 2, cx),
        (3, 1, X2 @ c2 @ X2),
        (3, 2, c2),
    ]


def verify_equivalences(tol: float = 1e-10, flip_signs: bool = False) -> list[dict]:
    report = []
    for h, j, expr in equivalence_table():
        res = float(np.abs(exchange_form(h, j, flip_signs) - expr.matrix).max())
        report.append({"identity": f"A[{h},{j}] = {expr.name}", "residual": res, "pass": res < tol})
    return report


# ---------------------------------------------------------------------------
# Teleportation

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = (KET0 + KET1) / math.sqrt(2)
MINUS = (KET0 - KET1) / math.sqrt(2)
GATES_1Q = {"I": I2, "X": X, "Z": Z, "H": HADAMARD}


def _word(ops: str) -> np.ndarray:
    m = np.eye(2, dtype=complex)
    for op in ops.split():
        m = m @ GATES_1Q[op]
    return m


# outcome -> (post-measurement state of qubit 3 as a function of (a, b), correction word)
TABLE = {
    ("computational", "00"): (lambda a, b: a * PLUS - b * MINUS, "Z H"),
    ("computational", "01"): (lambda a, b: -a * MINUS + b * PLUS, "X Z H"),
    ("computational", "10"): (lambda a, b: a * PLUS + b * MINUS, "H"),
    ("computational", "11"): (lambda a, b: a * MINUS + b * PLUS, "X H"),
    ("bell", "--"): (lambda a, b: a * KET0 + b * KET1, "I"),
    ("bell", "-+"): (lambda a, b: a * KET1 + b * KET0, "X"),
    ("bell", "+-"): (lambda a, b: a * KET1 - b * KET0, "Z X"),
    ("bell", "++"): (lambda a, b: -a * KET0 + b * KET1, "Z"),
}


def correction_rule(basis: str, label: str) -> str:
    """Correction from the closed rules: X^B Z^(1+A) H, or Z^((1+a)/2) X^((1-ab)/2)."""
    if basis == "computational":
        A, B = int(label[0]), int(label[1])
        word = ["X"] * B + ["Z"] * ((1 + A) % 2) + ["H"]
    else:
        al, be = (1 if c == "+" else -1 for c in label)
        word = ["Z"] * ((1 + al) // 2) + ["X"] * ((1 - al * be) // 2)
    return " ".join(word) or "I"


@dataclass(frozen=True)
class TeleportOutcome:
    basis: str
    label: str
    probability: float
    post_state: np.ndarray
    table_state: np.ndarray
    correction: str
    fidelity: float

    @property
    def matches_table(self) -> bool:
        return bool(abs(abs(np.vdot(self.table_state, self.post_state)) - 1) < 1e-10)

    def to_dict(self) -> dict:
        return {
            "basis": self.basis,
            "outcome": self.label,
            "probability": self.probability,
            "post_state": [[z.real, z.imag] for z in self.post_state],
            "correction": self.correction,
            "matches_table": bool(self.matches_table),
            "fidelity": self.fidelity,
        }


def _measurement_vectors(basis: str) -> Mapping[str, np.ndarray]:
    if basis == "computational":
        return {f"{A}{B}": np.eye(4, dtype=complex)[2 * A + B] for A in (0, 1) for B in (0, 1)}
    if basis == "bell":
        labels = {0: "-", 1: "+"}
        return {labels[A] + labels[B]: BELL_MATRIX[:, 2 * A + B] for A in (0, 1) for B in (0, 1)}
    raise ValidationError(f"measurement basis must be 'computational' or 'bell', got {basis!r}")


def teleport(a: complex, b: complex, measurement_basis: str = "computational") -> dict:
    """Send a|0> + b|1> through A_{1,2}^{0,pi/2} acting on qubits 1, 2 of (a|0>+b|1>) x beta_00.

    Qubits are ordered (1, 2, 3); qubit 3 is the receiver's half of the pair.
    """
    if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > 1e-10:
        raise NotNormalized("|a|^2 + |b|^2 must be 1")
    vectors = _measurement_vectors(measurement_basis)
    pair = BELL_MATRIX[:, 0]
    psi = np.kron(np.array([a, b], dtype=complex), pair)
    gate = BELL_CIRCUIT @ exchange_form(1, 2) @ BELL_CIRCUIT.conj().T
    psi = np.kron(gate, I2) @ psi
    target = np.array([a, b], dtype=complex)
    out = {}
    for label, v in vectors.items():
        # <v| on qubits 1,2 leaves the unnormalized qubit-3 state
        rest = v.conj() @ psi.reshape(4, 2)
        p = float(np.vdot(rest, rest).real)
        post = rest / math.sqrt(p)
        expected, word = TABLE[(measurement_basis, label)]
        fixed = _word(word) @ post
        fid = float(abs(np.vdot(target, fixed)) ** 2)
        out[label] = TeleportOutcome(measurement_basis, label, p, post, expected(a, b), word, fid)
    return out
