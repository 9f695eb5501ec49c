"""Concurrence of pure two-qubit states and fields that shape its time dependence."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InfeasibleRadicand, ValidationError
from .evolution import apply, propagator
from .model import DEGENERATE_R, PhysicalParams, derive
from .states import TwoQubitState, bell_state


def concurrence(state: TwoQubitState, tol: float = 1e-10) -> float:
    """Pure-state concurrence 2|a00 a11 - a01 a10| from computational amplitudes."""
    state.require_normalized(tol)
    a = state.to_computational().amplitudes
    return float(min(1.0, 2 * abs(a[0] * a[3] - a[1] * a[2])))


def bell_sector_sign(axis: int, mu: int, nu: int) -> int:
    """f such that a state started at beta_{mu nu} only feels R_{h,-f}."""
    return {1: mu, 2: mu * nu, 3: nu}[axis]


def bell_concurrence_closed(params: PhysicalParams, mu: int, nu: int, t: float) -> float:
    """Concurrence of U(t) beta_{mu nu}: sqrt(1 - 4 j^2 b^2 sin^4(R t)) on the pairing -f.

    Evaluated as

        C^2 = ((|B| - |J|)^2 + 2|BJ| cos^2)((|B| + |J|)^2 - 2|BJ| cos^2) / R^4,

    which is the same polynomial without the cancellation near C = 0.
    """
    if mu not in (-1, 1) or nu not in (-1, 1):
        raise ValidationError("mu and nu must be +1 or -1")
    d = derive(params)
    f = bell_sector_sign(params.axis, mu, nu)
    B, J, R = abs(d.B(-f)), abs(d.Jpair(f)), d.R(-f)
    if R < DEGENERATE_R:
        return 1.0
    c2 = math.cos(R * t) ** 2
    lo = (B - J) ** 2 + 2 * B * J * c2
    hi = (B + J) ** 2 - 2 * B * J * c2
    return min(1.0, math.sqrt(max(lo * hi, 0.0)) / (R * R))


@dataclass(frozen=True)
class ConcurrenceTrace:
    axis: int
    mu: int
    nu: int
    rabi: float
    t: np.ndarray
    C: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "C", "axis", "mu", "nu"])
        for t, c in zip(self.t, self.C):
            w.writerow([f"{t:.12g}", f"{c:.12g}", self.axis, self.mu, self.nu])
        return buf.getvalue()


def concurrence_trace(params: PhysicalParams, mu: int, nu: int, times: Sequence[float],
                      closed: bool = True) -> ConcurrenceTrace:
    times = np.asarray(times, dtype=float)
    if closed:
        C = [bell_concurrence_closed(params, mu, nu, t) for t in times]
    else:
        start = bell_state(mu, nu)
        C = [concurrence(apply(propagator(params, t), start)) for t in times]
    f = bell_sector_sign(params.axis, mu, nu)
    return ConcurrenceTrace(params.axis, mu, nu, derive(params).R(-f), times, np.asarray(C))


# ---------------------------------------------------------------------------
# Tuning fields


@dataclass(frozen=True)
class TuningField:
    """Field corrections.

    ``offsets`` are homogeneous shifts B0 added to both qubits (so B+ moves by
    2 B0); ``deltas`` are per-qubit shifts (dB1, dB2).  Either list holds every
    admissible root, preferred one first.
    """

    mode: str
    offsets: tuple = ()
    deltas: tuple = ()
    n_minus: Optional[int] = None
    n_plus: Optional[int] = None

    def apply(self, params: PhysicalParams, index: int = 0) -> PhysicalParams:
        if self.offsets:
            b0 = self.offsets[index]
            return params.with_fields(params.B1 + b0, params.B2 + b0)
        d1, d2 = self.deltas[index]
        return params.with_fields(params.B1 + d1, params.B2 + d2)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "offsets": list(self.offsets),
            "deltas": [list(d) for d in self.deltas],
            "n_minus": self.n_minus,
            "n_plus": self.n_plus,
        }


def tuning_field_commensurate(params: PhysicalParams, n_minus: int, n_plus: int) -> TuningField:
    """Offsets B0 giving n+ R'- = n- R'+, so both Rabi frequencies share a period.

    Only R+ moves (B+ -> B+ + 2 B0):  B0 = (-B+ +- sqrt((n+/n-)^2 R-^2 - J_{h}-^2)) / 2.
    """
    if n_minus <= 0 or n_plus <= 0:
        raise ValidationError("n_minus and n_plus must be positive integers")
    d = derive(params)
    rad = (n_plus / n_minus) ** 2 * d.Rminus ** 2 - d.Jdiff ** 2
    if rad < 0:
        raise InfeasibleRadicand(f"radicand {rad:.6g} < 0: R+ cannot reach (n+/n-) R-")
    root = math.sqrt(rad)
    offsets = tuple(0.5 * (-d.Bplus + s * root) for s in (1, -1))
    return TuningField("commensurate", offsets=offsets, n_minus=n_minus, n_plus=n_plus)


def amplitude_maximizing_field(params: PhysicalParams) -> TuningField:
    """Offsets making |B'+| = |J_{h}-|, so 4 j+^2 b+^2 = 1 and C touches 0 every period."""
    d = derive(params)
    offsets = tuple(0.5 * (-d.Bplus + s * abs(d.Jdiff)) for s in (1, -1))
    offsets = tuple(sorted(offsets, key=abs))
    return TuningField("max-amplitude", offsets=offsets)


def selective_fields(params: PhysicalParams) -> TuningField:
    """Per-qubit shifts with dB1 - dB2 = -B- +- |J_{h}+|, i.e. |B'-| = |J_{h}+|.

    The minimal-norm split of a difference D is (D/2, -D/2); the smaller |D| comes first.
    """
    d = derive(params)
    diffs = sorted((-d.Bminus + s * abs(d.Jsum) for s in (1, -1)), key=abs)
    return TuningField("selective", deltas=tuple((D / 2, -D / 2) for D in diffs))
