"""Physical parameters of one rectangular field pulse and the quantities derived from them.

The Hamiltonian is

    H_h = -sum_k J_k s1_k s2_k + B1h s1_h + B2h s2_h

with the field restricted to axis ``h``.  Units are hbar = 1.  For each axis the
two couplings other than J_h form the pair {h}; sums and differences of that
pair, together with B_h+- = B1h +- B2h, set the two Rabi frequencies

    R_h+- = sqrt(B_h+-^2 + J_{h}-+^2).

The pair for axis 2 is taken as (J_1, J_3).  With that ordering the printed
eigenvectors and propagator blocks agree with direct diagonalization; the
cyclic ordering (J_3, J_1) flips the sign of J_{2}- and breaks one sector.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ParseError, ValidationError
from .states import BELL_MATRIX, I2, PAULI, bell_index

COUPLING_PAIRS = {1: (2, 3), 2: (1, 3), 3: (1, 2)}

# With R below this the ratios b = B/R and j = J/R are undefined.
DEGENERATE_R = 1e-14


@dataclass(frozen=True)
class PhysicalParams:
    """Input to a single pulse: couplings J, per-qubit field amplitudes and the field axis."""

    J: tuple[float, float, float]
    B1: float = 0.0
    B2: float = 0.0
    axis: int = 1

    def __post_init__(self):
        try:
            J = tuple(float(v) for v in self.J)
        except TypeError as exc:
            raise ValidationError(f"J must be a triple of reals: {exc}") from None
        if len(J) != 3:
            raise ValidationError(f"J must have three entries, got {len(J)}")
        object.__setattr__(self, "J", J)
        object.__setattr__(self, "B1", float(self.B1))
        object.__setattr__(self, "B2", float(self.B2))
        if not all(math.isfinite(v) for v in (*J, self.B1, self.B2)):
            raise ValidationError("couplings and fields must be finite")
        if self.axis not in (1, 2, 3) or isinstance(self.axis, bool):
            raise ValidationError(f"axis must be 1, 2 or 3, got {self.axis!r}")

    @classmethod
    def from_fields(cls, J, Bplus: float, Bminus: float, axis: int) -> "PhysicalParams":
        """Build from the combined fields B_h+ = B1+B2 and B_h- = B1-B2."""
        return cls(J, 0.5 * (Bplus + Bminus), 0.5 * (Bplus - Bminus), axis)

    def with_fields(self, B1: float, B2: float) -> "PhysicalParams":
        return PhysicalParams(self.J, B1, B2, self.axis)

    def to_dict(self) -> dict:
        return {"J": list(self.J), "B1": self.B1, "B2": self.B2, "axis": self.axis}

    @classmethod
    def from_dict(cls, data: Mapping) -> "PhysicalParams":
        if not isinstance(data, Mapping):
            raise ValidationError("parameters must be a JSON object")
        missing = {"J", "B1", "B2", "axis"} - set(data)
        if missing:
            raise ValidationError(f"missing keys: {sorted(missing)}")
        return cls(data["J"], data["B1"], data["B2"], data["axis"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "PhysicalParams":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from None
        return cls.from_dict(data)


@dataclass(frozen=True)
class DerivedParams:
    axis: int
    Jh: float
    Jsum: float
    Jdiff: float
    Bplus: float
    Bminus: float
    Rplus: float
    Rminus: float
    bplus: float
    bminus: float
    jplus: float
    jminus: float
    degenerate_plus: bool = False
    degenerate_minus: bool = False

    @property
    def degenerate(self) -> bool:
        return self.degenerate_plus or self.degenerate_minus

    # Sign-indexed accessors: s is +1 or -1 and selects the "+" or "-" quantity.
    def R(self, s: int) -> float:
        return self.Rplus if s > 0 else self.Rminus

    def b(self, s: int) -> float:
        return self.bplus if s > 0 else self.bminus

    def j(self, s: int) -> float:
        return self.jplus if s > 0 else self.jminus

    def B(self, s: int) -> float:
        return self.Bplus if s > 0 else self.Bminus

    def Jpair(self, s: int) -> float:
        """J_{h}+ for s = +1 and J_{h}- for s = -1."""
        return self.Jsum if s > 0 else self.Jdiff


def derive(params: PhysicalParams) -> DerivedParams:
    h = params.axis
    i, k = COUPLING_PAIRS[h]
    Ji, Jk = params.J[i - 1], params.J[k - 1]
    Jsum, Jdiff = Ji + Jk, Ji - Jk
    Bplus, Bminus = params.B1 + params.B2, params.B1 - params.B2
    Rplus = math.hypot(Bplus, Jdiff)
    Rminus = math.hypot(Bminus, Jsum)
    deg_p = Rplus < DEGENERATE_R
    deg_m = Rminus < DEGENERATE_R
    return DerivedParams(
        axis=h,
        Jh=params.J[h - 1],
        Jsum=Jsum,
        Jdiff=Jdiff,
        Bplus=Bplus,
        Bminus=Bminus,
        Rplus=Rplus,
        Rminus=Rminus,
        bplus=0.0 if deg_p else Bplus / Rplus,
        bminus=0.0 if deg_m else Bminus / Rminus,
        jplus=0.0 if deg_p else Jdiff / Rplus,
        jminus=0.0 if deg_m else Jsum / Rminus,
        degenerate_plus=deg_p,
        degenerate_minus=deg_m,
    )


def hamiltonian_computational(params: PhysicalParams) -> np.ndarray:
    H = np.zeros((4, 4), dtype=complex)
    for k, s in enumerate(PAULI):
        H -= params.J[k] * np.kron(s, s)
    s = PAULI[params.axis - 1]
    H += params.B1 * np.kron(s, I2) + params.B2 * np.kron(I2, s)
    return H


def hamiltonian_bell(params: PhysicalParams) -> np.ndarray:
    """Hamiltonian as a 4x4 Hermitian matrix in the ordered Bell basis."""
    W = BELL_MATRIX
    H = W.conj().T @ hamiltonian_computational(params) @ W
    # Conjugation leaves ~1e-17 imaginary dust on a Hermitian matrix; symmetrize it away.
    return 0.5 * (H + H.conj().T)


@dataclass(frozen=True)
class EnergySpectrum:
    """Energies E_{mu nu} = mu J_h + nu R_{h,-mu}, keyed by sign labels."""

    E: Mapping[tuple[int, int], float]

    def as_array(self) -> np.ndarray:
        """Energies in Bell-label order (--, -+, +-, ++)."""
        return np.array([self.E[(mu, nu)] for mu in (-1, 1) for nu in (-1, 1)])

    def levels(self) -> np.ndarray:
        """The four levels E^(1..4) = (-J-R+, -J+R+, J-R-, J+R-)."""
        return self.as_array()


def spectrum(params: PhysicalParams) -> EnergySpectrum:
    d = derive(params)
    E = {(mu, nu): mu * d.Jh + nu * d.R(-mu) for mu in (-1, 1) for nu in (-1, 1)}
    return EnergySpectrum(E)


@dataclass(frozen=True)
class EigenBasis:
    vectors: Mapping[tuple[int, int], np.ndarray]
    degenerate: bool = False

    def matrix(self) -> np.ndarray:
        """Eigenvectors as columns in (--, -+, +-, ++) label order."""
        return np.column_stack([self.vectors[(mu, nu)] for mu in (-1, 1) for nu in (-1, 1)])


def _closed_form_vector(d: DerivedParams, mu: int, nu: int) -> np.ndarray:
    h = d.axis
    jj, bb = d.j(-mu), d.b(-mu)
    v = np.zeros(4, dtype=complex)
    for eps in (-1, 1):
        if h == 1:
            num = (eps == 1) * nu * (1 + mu * nu * jj) - (eps == -1) * mu * bb
            v[bell_index(mu, eps)] += num / (math.sqrt(2) * math.sqrt(1 + nu * mu * jj))
        elif h == 2:
            num = (eps == 1) * 1j * nu * (1 + mu * nu * jj) + (eps == -1) * mu * eps * bb
            v[bell_index(mu * eps, eps)] += num / (math.sqrt(2) * math.sqrt(1 + nu * mu * jj))
        else:
            num = (1 + nu * bb) + nu * eps * jj
            v[bell_index(eps, mu)] += num / (2 * math.sqrt(1 + nu * bb))
    return v


def _denominator(d: DerivedParams, mu: int, nu: int) -> float:
    if d.axis == 3:
        return 1 + nu * d.b(-mu)
    return 1 + nu * mu * d.j(-mu)


def eigenbasis(params: PhysicalParams, tol: float = 1e-9) -> EigenBasis:
    """Eigenvectors |phi_{mu nu}> in the Bell basis.

    The closed form divides by sqrt(1 + nu mu j) (or sqrt(1 + nu b) for axis 3),
    which vanishes at the Bell-state limits.  In that case, and when a Rabi
    frequency is zero, the vectors come from a dense eigensolver on each
    2x2 sector instead and ``degenerate`` is set.
    """
    d = derive(params)
    use_closed = not d.degenerate and all(
        _denominator(d, mu, nu) > tol for mu in (-1, 1) for nu in (-1, 1)
    )
    if use_closed:
        vecs = {(mu, nu): _closed_form_vector(d, mu, nu) for mu in (-1, 1) for nu in (-1, 1)}
        return EigenBasis(vecs, degenerate=False)
    return EigenBasis(_numerical_vectors(params, d), degenerate=True)


def _numerical_vectors(params: PhysicalParams, d: DerivedParams) -> dict:
    from .evolution import SECTORS

    H = hamiltonian_bell(params)
    vecs = {}
    for sec in SECTORS[d.axis]:
        rows = list(sec.rows)
        w, v = np.linalg.eigh(H[np.ix_(rows, rows)])
        mu = sec.alpha
        # eigh sorts ascending: nu = -1 is the lower level of this sector.
        for col, nu in enumerate((-1, 1)):
            full = np.zeros(4, dtype=complex)
            full[rows] = v[:, col]
            vecs[(mu, nu)] = full
    return vecs
