"""Closed-form Bell-basis propagators, their 2x2 sector structure and an independent oracle.

Time-evolution sign: the closed forms equal ``exp(+i H t)`` for the Hamiltonian
built in :mod:`bellising.model`, so :func:`spectral_oracle` uses the same sign.
``TIME_SIGN`` records the choice and the regression test
``test_time_sign_first_order`` pins it through dU/dt at t = 0.

For a field along axis ``h`` each propagator splits into two 2x2 sectors
j = 1, 2 with rows (k_j, l_j).  Sector j carries the sign label
alpha = (-1)^(h+j+1): its phase is exp(i alpha J_h t) and its Rabi frequency is
R_{h,-alpha}.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BasisMismatch, PatternViolation, ValidationError
from .model import PhysicalParams, derive, hamiltonian_bell, DerivedParams
from .states import BASES, TwoQubitState

TIME_SIGN = +1

CLOSED_FORM_TOL = 1e-10
COMPOSITE_TOL = 1e-8


@dataclass(frozen=True)
class SectorInfo:
    axis: int
    j: int
    rows: tuple[int, int]
    alpha: int
    beta: int
    q: int


def _sector_info(h: int, j: int, k: int, l: int) -> SectorInfo:
    # k, l are 1-based row labels, as in the sign rules for alpha, beta, q.
    alpha = (-1) ** (h + j + 1)
    beta = (-1) ** (j * (h + l - k + 1))
    q = beta * (-1) ** (h + 1)
    return SectorInfo(h, j, (k - 1, l - 1), alpha, beta, q)


_ROWS = {1: ((1, 2), (3, 4)), 2: ((1, 4), (2, 3)), 3: ((1, 3), (2, 4))}
SECTORS = {
    h: tuple(_sector_info(h, j, *_ROWS[h][j - 1]) for j in (1, 2)) for h in (1, 2, 3)
}


def sector_for_alpha(axis: int, alpha: int) -> SectorInfo:
    return next(s for s in SECTORS[axis] if s.alpha == alpha)


def pattern_mask(axis: int) -> np.ndarray:
    """Boolean 4x4 mask of the entries a single-axis propagator may populate."""
    mask = np.zeros((4, 4), dtype=bool)
    for sec in SECTORS[axis]:
        mask[np.ix_(sec.rows, sec.rows)] = True
    return mask


@dataclass(frozen=True)
class UnitaryBell:
    matrix: np.ndarray
    basis: str = "bell"

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValidationError(f"expected a 4x4 matrix, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if self.basis not in BASES:
            raise ValidationError(f"unknown basis {self.basis!r}")

    def unitarity_error(self) -> float:
        m = self.matrix
        return float(np.linalg.norm(m.conj().T @ m - np.eye(4)))

    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def to_dict(self) -> dict:
        return {
            "basis": self.basis,
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.matrix],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UnitaryBell":
        try:
            m = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
            basis = data.get("basis", "bell")
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"malformed unitary: {exc}") from None
        return cls(m, basis)


@dataclass(frozen=True)
class PhaseVars:
    """Per-sector phases Delta and the e, d combinations at one instant.

    ``delta_plus[a]`` is a J_h t, ``delta_minus[a]`` is R_{h,-a} t, and
    ``e[(a, b)]`` = cos(delta_minus[a]) + i b j_{h,-a} sin(delta_minus[a]).
    """

    delta_plus: dict
    delta_minus: dict
    e: dict
    d: dict


def phase_vars(derived: DerivedParams, t: float) -> PhaseVars:
    dp, dm, e, dd = {}, {}, {}, {}
    for a in (-1, 1):
        dp[a] = a * derived.Jh * t
        dm[a] = derived.R(-a) * t
        c, s = math.cos(dm[a]), math.sin(dm[a])
        for b in (-1, 1):
            e[(a, b)] = complex(c, b * derived.j(-a) * s)
        dd[a] = derived.b(-a) * s
    return PhaseVars(dp, dm, e, dd)


@dataclass(frozen=True)
class SectorMatrix:
    matrix: np.ndarray
    info: SectorInfo

    @property
    def j(self) -> int:
        return self.info.j

    @property
    def rows(self) -> tuple[int, int]:
        return self.info.rows


def sector_block(derived: DerivedParams, info: SectorInfo, t: float) -> np.ndarray:
    pv = phase_vars(derived, t)
    a, b, q, h = info.alpha, info.beta, info.q, info.axis
    e = pv.e[(a, b)]
    d = pv.d[a]
    ih = 1j**h
    block = np.array([[e.conjugate(), -q * ih * d], [q * ih.conjugate() * d, e]])
    return np.exp(1j * pv.delta_plus[a]) * block


def propagator(params: PhysicalParams, t: float) -> UnitaryBell:
    """Closed-form U_h(t) in the Bell basis.

    Entries outside the sector pattern are exact zeros.  When a Rabi frequency
    vanishes the sector reduces to its phase exp(i alpha J_h t), which the
    closed form still produces because b and j are then set to zero.
    """
    if not t >= 0:
        raise ValidationError(f"pulse duration must be non-negative, got {t!r}")
    derived = derive(params)
    U = np.zeros((4, 4), dtype=complex)
    for info in SECTORS[params.axis]:
        U[np.ix_(info.rows, info.rows)] = sector_block(derived, info, t)
    return UnitaryBell(U)


def spectral_oracle(params: PhysicalParams, t: float) -> UnitaryBell:
    """exp(+i H t) from a dense eigendecomposition of the Bell-basis Hamiltonian."""
    w, v = np.linalg.eigh(hamiltonian_bell(params))
    U = (v * np.exp(TIME_SIGN * 1j * w * t)) @ v.conj().T
    return UnitaryBell(U)


def sector(U: UnitaryBell, j: int, axis: int, tol: float = CLOSED_FORM_TOL) -> SectorMatrix:
    if j not in (1, 2):
        raise ValidationError(f"sector index must be 1 or 2, got {j!r}")
    m = U.matrix
    off = np.abs(m[~pattern_mask(axis)]).max()
    if off > tol:
        raise PatternViolation(
            f"off-pattern magnitude {off:.3e} exceeds {tol:.1e}: not a single-axis-{axis} propagator"
        )
    info = SECTORS[axis][j - 1]
    return SectorMatrix(m[np.ix_(info.rows, info.rows)].copy(), info)


def _check_basis(*ops) -> str:
    bases = {o.basis for o in ops}
    if len(bases) != 1:
        raise BasisMismatch(f"operands live in different bases: {sorted(bases)}")
    return bases.pop()


def compose(a: UnitaryBell, b: UnitaryBell) -> UnitaryBell:
    """Operator product a @ b: ``b`` acts first."""
    basis = _check_basis(a, b)
    return UnitaryBell(a.matrix @ b.matrix, basis)


def compose_all(ops) -> UnitaryBell:
    """Product of operators listed in time order (first applied first)."""
    ops = list(ops)
    if not ops:
        return UnitaryBell(np.eye(4))
    out = ops[0]
    for op in ops[1:]:
        out = compose(op, out)
    return out


def adjoint(a: UnitaryBell) -> UnitaryBell:
    return UnitaryBell(a.matrix.conj().T, a.basis)


def apply(a: UnitaryBell, s: TwoQubitState) -> TwoQubitState:
    if a.basis != s.basis:
        raise BasisMismatch(f"operator is in {a.basis} basis, state in {s.basis}")
    return TwoQubitState(a.matrix @ s.amplitudes, s.basis)


def evolve_sequence(pulses, t_total: Optional[float] = None) -> UnitaryBell:
    """Propagator of consecutive pulses given as (params, duration) pairs.

    With ``t_total`` the sequence is truncated at that elapsed time, which is
    how trajectories are sampled mid-pulse.
    """
    ops = []
    elapsed = 0.0
    for params, duration in pulses:
        if t_total is not None:
            remaining = t_total - elapsed
            if remaining <= 0:
                break
            duration = min(duration, remaining)
        ops.append(propagator(params, duration))
        elapsed += duration
    return compose_all(ops)


def phase_overlap(a: np.ndarray, b: np.ndarray) -> float:
    """|tr(a^dagger b)| / 4; equals 1 iff a and b agree up to a global phase."""
    return float(abs(np.trace(np.asarray(a).conj().T @ np.asarray(b))) / 4)


def equal_up_to_phase(a, b, tol: float = COMPOSITE_TOL) -> bool:
    a = a.matrix if isinstance(a, UnitaryBell) else a
    b = b.matrix if isinstance(b, UnitaryBell) else b
    return phase_overlap(a, b) >= 1 - tol


def align_phase(a: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """``a`` times the global phase that best matches ``reference``."""
    ov = np.trace(np.asarray(a).conj().T @ np.asarray(reference))
    if abs(ov) == 0:
        return np.asarray(a)
    return np.asarray(a) * (ov / abs(ov))


@dataclass(frozen=True)
class FormClass:
    """Outcome of :func:`classify_form`.

    ``kind`` is one of ``identity_loop``, ``diagonal``, ``diag_antidiag`` or
    ``general``.  Phases are reported modulo the global phase: for diagonal
    forms ``phi`` is half the relative phase between the two sectors, and for
    diagonal-antidiagonal forms ``varphi`` is half the phase between the two
    antidiagonal entries.
    """

    kind: str
    axis: Optional[int] = None
    j: Optional[int] = None
    phase: Optional[complex] = None
    sign: Optional[int] = None
    phi: Optional[float] = None
    varphi: Optional[float] = None
    sector_values: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for name in ("axis", "j", "sign", "phi", "varphi"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        if self.phase is not None:
            out["phase"] = [self.phase.real, self.phase.imag]
        return out


def _is_scalar_pair(block: np.ndarray, tol: float) -> bool:
    return (
        abs(block[0, 1]) < tol
        and abs(block[1, 0]) < tol
        and abs(block[0, 0] - block[1, 1]) < tol
        and abs(abs(block[0, 0]) - 1) < tol
    )


def _is_antidiagonal_pair(block: np.ndarray, tol: float) -> bool:
    return (
        abs(block[0, 0]) < tol
        and abs(block[1, 1]) < tol
        and abs(abs(block[0, 1]) - 1) < tol
        and abs(abs(block[1, 0]) - 1) < tol
    )


def classify_form(U, tol: float = COMPOSITE_TOL) -> FormClass:
    m = U.matrix if isinstance(U, UnitaryBell) else np.asarray(U, dtype=complex)
    tr = np.trace(m)
    if abs(tr) > 1e-12:
        ph = tr / abs(tr)
        if np.abs(m - ph * np.eye(4)).max() < tol:
            sign = None
            if abs(ph - 1) < tol:
                sign = 1
            elif abs(ph + 1) < tol:
                sign = -1
            return FormClass("identity_loop", phase=complex(ph), sign=sign)
    for h in (1, 2, 3):
        if np.abs(m[~pattern_mask(h)]).max() >= tol:
            continue
        blocks = [m[np.ix_(s.rows, s.rows)] for s in SECTORS[h]]
        diag = [_is_scalar_pair(b, tol) for b in blocks]
        anti = [_is_antidiagonal_pair(b, tol) for b in blocks]
        if all(diag):
            c1, c2 = blocks[0][0, 0], blocks[1][0, 0]
            return FormClass(
                "diagonal",
                axis=h,
                phi=float(0.5 * np.angle(c1 / c2)),
                sector_values=(complex(c1), complex(c2)),
            )
        for jj in (1, 2):
            a, d = jj - 1, 2 - jj
            if anti[a] and diag[d]:
                blk = blocks[a]
                return FormClass(
                    "diag_antidiag",
                    axis=h,
                    j=jj,
                    phi=float(0.5 * np.angle(blk[0, 1] * blk[1, 0] / blocks[d][0, 0] ** 2)),
                    varphi=float(0.5 * np.angle(blk[0, 1] / blk[1, 0])),
                    sector_values=(complex(blk[0, 1]), complex(blk[1, 0]), complex(blocks[d][0, 0])),
                )
    return FormClass("general")
