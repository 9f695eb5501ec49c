"""A three-angle chart on real two-qubit states, projections onto it and sampled trajectories.

    |psi> = sa sb cg |00> + sa sb sg |01> + sa cb |11> + ca |10>

The maps (a, b, g) -> (2pi - a, pi - b, g + pi) and (a, -b, g + pi) leave the
state unchanged and (pi - a, pi - b, g + pi) negates it, so every real state
has a representative in the cube [0, pi)^3.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .entanglement import concurrence
from .errors import ValidationError
from .evolution import apply, evolve_sequence
from .states import TwoQubitState

TWO_PI = 2 * math.pi
CLAMP_WARN = 1e-8
DEGENERATE_SIN = 1e-12


@dataclass(frozen=True)
class ChartPoint:
    alpha: float
    beta: float
    gamma: float
    degenerate: bool = False
    clamped: float = 0.0

    @property
    def angles(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.gamma])

    @property
    def canonical(self) -> bool:
        return all(0 <= a < math.pi for a in (self.alpha, self.beta, self.gamma))


def _amplitudes(alpha: float, beta: float, gamma: float) -> np.ndarray:
    """Computational-order amplitudes (|00>, |01>, |10>, |11>)."""
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    return np.array([sa * sb * math.cos(gamma), sa * sb * math.sin(gamma), ca, sa * cb])


def chart_state(alpha: float, beta: float, gamma: float) -> TwoQubitState:
    return TwoQubitState(_amplitudes(alpha, beta, gamma), "computational")


def chart_concurrence(alpha: float, beta: float, gamma: float) -> float:
    sa2, sb2 = math.sin(alpha) ** 2, math.sin(beta) ** 2
    cross = math.cos(alpha) * math.cos(gamma) + math.sin(alpha) * math.sin(gamma) * math.cos(beta)
    c2 = 4 * sa2 * sb2 * (1 - sa2 * sb2 - cross * cross)
    return math.sqrt(min(max(c2, 0.0), 1.0))


def _arccos_spill(x: float) -> float:
    return max(abs(x) - 1.0, 0.0)


def _invert(a00: float, a01: float, a11: float, a10: float, rest: float = 0.0) -> ChartPoint:
    """Chart angles from four real components of a unit vector.

    This is the chain alpha = arccos a10, beta = arccos(a11 / sin alpha),
    gamma = arccos(a00 / (sin alpha sin beta)).  Each sine is rebuilt from the
    remaining components (``rest`` is whatever weight the four numbers do not
    carry, e.g. imaginary parts), so the atan2 form below equals the chain
    without its loss of precision near +-1.  ``clamped`` reports how far the
    literal arccos arguments left [-1, 1].
    """
    s_ab2 = a00 * a00 + a01 * a01 + rest
    s_a = math.sqrt(s_ab2 + a11 * a11)
    s_ab = math.sqrt(s_ab2)
    alpha = math.atan2(s_a, a10)
    beta = gamma = 0.0
    spill = _arccos_spill(a10)
    degenerate = True
    if s_a >= DEGENERATE_SIN:
        beta = math.atan2(s_ab, a11)
        spill = max(spill, _arccos_spill(a11 / s_a))
        if s_ab >= DEGENERATE_SIN:
            gamma = math.atan2(math.sqrt(a01 * a01 + rest), a00)
            spill = max(spill, _arccos_spill(a00 / s_ab))
            degenerate = False
    if spill > CLAMP_WARN:
        warnings.warn(f"chart projection clamped an arccos argument by {spill:.3g}", RuntimeWarning)
    return ChartPoint(alpha, beta, gamma, degenerate, spill)


def _components(state: TwoQubitState) -> np.ndarray:
    state.require_normalized()
    return state.to_computational().amplitudes


def project_magnitude(state: TwoQubitState) -> ChartPoint:
    """Angles from |A10|, |A11|, |A00|; lands in the octant where every amplitude is >= 0."""
    a00, a01, a10, a11 = np.abs(_components(state))
    return _invert(a00, a01, a11, a10)


def project_real(state: TwoQubitState) -> ChartPoint:
    """Angles from Re A10, Re A11, Re A00.

    Imaginary parts are discarded, so states reached through purely imaginary
    entries all land on alpha = pi/2.
    """
    a = _components(state)
    r = a.real
    return _invert(r[0], r[1], r[3], r[2], float(np.sum(a.imag ** 2)))


def fold_chart(p: ChartPoint) -> ChartPoint:
    """Representative of p in [0, pi)^3 describing the same state up to sign."""
    if p.canonical:
        return p
    a00, a01, a10, a11 = _amplitudes(p.alpha, p.beta, p.gamma)
    vec = np.array([a01, a00, a11, a10])
    nz = np.flatnonzero(np.abs(vec) > 1e-15)
    sign = 1.0 if nz.size == 0 or vec[nz[0]] > 0 else -1.0
    a00, a01, a10, a11 = sign * a00, sign * a01, sign * a10, sign * a11
    # after the sign fix a01 > 0, or a01 = 0 with a00 > 0, so gamma = atan2(a01, a00) is in [0, pi)
    alpha = math.atan2(math.sqrt(a00 * a00 + a01 * a01 + a11 * a11), a10)
    if math.sin(alpha) < DEGENERATE_SIN:
        return ChartPoint(0.0, 0.0, 0.0, True)
    beta = math.atan2(math.hypot(a00, a01), a11)
    if math.sin(beta) < DEGENERATE_SIN:
        return ChartPoint(alpha, 0.0, 0.0, True)
    gamma = max(math.atan2(a01, a00), 0.0)
    return ChartPoint(alpha, beta, gamma, p.degenerate)


def _orbit(p: np.ndarray) -> list[np.ndarray]:
    a, b, g = p
    base = [np.array([a, b, g]), np.array([-a, math.pi - b, g + math.pi])]
    out = []
    for q in base:
        out.append(q)
        out.append(np.array([q[0], -q[1], q[2] + math.pi]))
    # sign flip: same ray in state space
    out += [np.array([math.pi - q[0], math.pi - q[1], q[2] + math.pi]) for q in list(out)]
    return out


def _nearest(candidates: list[np.ndarray], prev: np.ndarray) -> np.ndarray:
    best, best_d = None, math.inf
    for c in candidates:
        c = c + TWO_PI * np.round((prev - c) / TWO_PI)
        dist = float(np.linalg.norm(c - prev))
        if dist < best_d:
            best, best_d = c, dist
    return best


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    point: ChartPoint
    concurrence: float
    state: TwoQubitState


@dataclass(frozen=True)
class Trajectory:
    samples: tuple
    folded: bool
    projection: str
    max_step: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "alpha", "beta", "gamma", "concurrence", "folded", "degenerate"])
        for s in self.samples:
            p = s.point
            w.writerow([f"{s.t:.12g}", f"{p.alpha:.12g}", f"{p.beta:.12g}", f"{p.gamma:.12g}",
                        f"{s.concurrence:.12g}", int(self.folded), int(p.degenerate)])
        return buf.getvalue()

    @property
    def closes(self) -> bool:
        first, last = self.samples[0].state, self.samples[-1].state
        return first.equals_up_to_phase(last, 1e-8)


PROJECTIONS = {"magnitude": project_magnitude, "real": project_real}


def sample_trajectory(pulses: Sequence, initial: TwoQubitState, steps: int,
                      projection: str = "magnitude", folded: bool = True,
                      step_bound: Optional[float] = None) -> Trajectory:
    """Chart coordinates of the evolving state at ``steps`` evenly spaced times.

    Unfolded mode replaces each projected point by the chart-equivalent point
    closest to its predecessor so the curve stays continuous; ``step_bound``
    turns large jumps into a warning.
    """
    if steps < 2:
        raise ValidationError("steps must be at least 2")
    if projection not in PROJECTIONS:
        raise ValidationError(f"projection must be one of {sorted(PROJECTIONS)}")
    project = PROJECTIONS[projection]
    start = initial.to_bell()
    total = sum(d for _, d in pulses)
    samples, prev = [], None
    max_step = 0.0
    for t in np.linspace(0.0, total, steps):
        U = evolve_sequence(pulses, float(t)) if t > 0 else None
        state = apply(U, start) if U is not None else start
        p = project(state)
        if folded:
            p = fold_chart(p)
        elif prev is not None and not p.degenerate:
            ang = _nearest(_orbit(p.angles), prev)
            p = ChartPoint(*ang, p.degenerate, p.clamped)
        if prev is not None:
            max_step = max(max_step, float(np.linalg.norm(p.angles - prev)))
        prev = p.angles
        samples.append(TrajectorySample(float(t), p, concurrence(state), state))
    if step_bound is not None and not folded and max_step >= step_bound:
        warnings.warn(f"trajectory step {max_step:.3g} exceeds bound {step_bound:.3g}", RuntimeWarning)
    return Trajectory(tuple(samples), folded, projection, max_step)
