"""Pulse prescriptions for evolution loops, Bell-pair exchanges and the D / A gate families.

Selector conventions
--------------------
One-pulse loops take integers (m_s, n_s) for each sector sign s = +-1 and need

    T = (m_s - n_s) pi / (s J_h) > 0           (same T for both sectors)
    B_{h,-s}^2 = (J_h n_s / (m_s - n_s))^2 - J_{h}s^2 >= 0

which makes sector s equal to (-1)^{m_s} I_2.

Two-pulse exchanges label the antidiagonal sector with ``n_anti`` / ``n_anti_prime``
(its Rabi phase is (2n+1) pi / 2 in each pulse) and the diagonal sector with
``m_diag`` / ``n_diag``: the diagonal Rabi phases add to n_diag pi and the
J_h phases add to (m_diag + n_diag) pi, so the diagonal sector ends at
(-1)^{m_diag} I_2.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import (
    Infeasible,
    InfeasibleSelectors,
    NoRoot,
    PhaseUnsatisfiable,
    SingularBranch,
    ValidationError,
)
from .evolution import (
    COMPOSITE_TOL,
    SECTORS,
    UnitaryBell,
    align_phase,
    classify_form,
    compose,
    equal_up_to_phase,
    evolve_sequence,
    propagator,
    sector_for_alpha,
)
from .model import PhysicalParams, derive

NMAX_DEFAULT = 8


def _pair(J, axis: int, s: int) -> float:
    """J_{h}+ (s=+1) or J_{h}- (s=-1) for couplings J."""
    return derive(PhysicalParams(J, 0.0, 0.0, axis)).Jpair(s)


def _fields_for(J, axis: int, B_by_sign: Mapping[int, float]) -> PhysicalParams:
    return PhysicalParams.from_fields(J, B_by_sign[1], B_by_sign[-1], axis)


@dataclass(frozen=True)
class PulseSpec:
    axis: int
    duration: float
    params: PhysicalParams
    selectors: dict
    target: str = "identity_loop"
    verification: dict = field(default_factory=dict)

    @property
    def pulses(self) -> list:
        return [(self.params, self.duration)]

    def unitary(self) -> UnitaryBell:
        return propagator(self.params, self.duration)

    def to_dict(self) -> dict:
        return {
            "kind": "pulse",
            "axis": self.axis,
            "target": self.target,
            "pulses": [{"params": self.params.to_dict(), "duration": self.duration}],
            "selectors": dict(self.selectors),
            "verification": dict(self.verification),
        }


@dataclass(frozen=True)
class TwoPulseSpec:
    axis: int
    j: int
    first: tuple
    second: tuple
    selectors: dict
    target: str = "diag_antidiag"
    details: dict = field(default_factory=dict)
    verification: dict = field(default_factory=dict)

    @property
    def pulses(self) -> list:
        return [self.first, self.second]

    @property
    def t(self) -> float:
        return self.first[1]

    @property
    def t_prime(self) -> float:
        return self.second[1]

    def unitary(self) -> UnitaryBell:
        return evolve_sequence(self.pulses)

    def to_dict(self) -> dict:
        return {
            "kind": "two_pulse",
            "axis": self.axis,
            "j": self.j,
            "target": self.target,
            "pulses": [
                {"params": p.to_dict(), "duration": d} for p, d in (self.first, self.second)
            ],
            "selectors": dict(self.selectors),
            "details": dict(self.details),
            "verification": dict(self.verification),
        }


def spec_from_dict(data: Mapping):
    """Rebuild the pulse list of a serialized spec: [(PhysicalParams, duration), ...]."""
    try:
        return [
            (PhysicalParams.from_dict(p["params"]), float(p["duration"])) for p in data["pulses"]
        ]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed pulse spec: {exc}") from None


# ---------------------------------------------------------------------------
# One-pulse evolution loops


def _loop_from_sector_selectors(J, axis: int, sel: Mapping[int, tuple[int, int]]) -> PulseSpec:
    Jh = float(J[axis - 1])
    if Jh == 0:
        raise ValidationError("J_h must be non-zero for a one-pulse loop")
    periods = {}
    for s in (1, -1):
        m, n = sel[s]
        if m == n:
            raise InfeasibleSelectors(f"sector {s:+d}: m == n gives T = 0")
        periods[s] = (m - n) * math.pi / (s * Jh)
    if not math.isclose(periods[1], periods[-1], rel_tol=0, abs_tol=1e-12 * abs(periods[1])):
        raise InfeasibleSelectors(
            "sector periods differ: m_a - n_a must equal n_-a - m_-a "
            f"(T+ = {periods[1]:.6g}, T- = {periods[-1]:.6g})"
        )
    T = periods[1]
    if T <= 0:
        raise InfeasibleSelectors(f"T = {T:.6g} violates T > 0")
    B = {}
    for s in (1, -1):
        m, n = sel[s]
        b2 = (Jh * n / (m - n)) ** 2 - _pair(J, axis, s) ** 2
        if b2 < -1e-12:
            raise InfeasibleSelectors(
                f"B_(h,{-s:+d})^2 = {b2:.6g} < 0 for sector {s:+d} (m={m}, n={n})"
            )
        B[-s] = math.sqrt(max(b2, 0.0))
    params = _fields_for(J, axis, B)
    selectors = {"m_plus": sel[1][0], "n_plus": sel[1][1], "m_minus": sel[-1][0], "n_minus": sel[-1][1]}
    return _verified_loop(params, T, selectors)


def _verified_loop(params: PhysicalParams, T: float, selectors: dict) -> PulseSpec:
    U = propagator(params, T).matrix
    form = classify_form(U, COMPOSITE_TOL)
    d = derive(params)
    backsub = 0.0
    for s in (1, -1):
        m, n = selectors["m_plus" if s > 0 else "m_minus"], selectors["n_plus" if s > 0 else "n_minus"]
        lhs = d.B(-s) ** 2
        rhs = (d.Jh * n / (m - n)) ** 2 - d.Jpair(s) ** 2
        backsub = max(backsub, abs(lhs - rhs), abs(T - (m - n) * math.pi / (s * d.Jh)))
    expected = {s: (-1) ** selectors["m_plus" if s > 0 else "m_minus"] for s in (1, -1)}
    verification = {
        "achieved_form": form.to_dict(),
        "sector_signs": {"+": expected[1], "-": expected[-1]},
        "residual_identity": float(min(np.abs(U - np.eye(4)).max(), np.abs(U + np.eye(4)).max())),
        "backsubstitution": float(backsub),
    }
    target = "identity_loop" if expected[1] == expected[-1] else "diagonal"
    return PulseSpec(params.axis, T, params, selectors, target, verification)


def loop_one_pulse(J, axis: int, selectors: Mapping, assignment: Optional[str] = None) -> PulseSpec:
    """One-pulse loop from labelled selectors ``m_minus, n_minus, m_plus, n_plus``.

    Selector tables do not always say which sector sign the "+" and
    "-" labels refer to, so by default both readings are tried: ``direct``
    (label sign = sector sign) and ``swapped``.  The first that satisfies
    T > 0 and field positivity wins; ``assignment`` forces one.
    """
    try:
        labelled = {1: (int(selectors["m_plus"]), int(selectors["n_plus"])),
                    -1: (int(selectors["m_minus"]), int(selectors["n_minus"]))}
    except KeyError as exc:
        raise ValidationError(f"missing selector {exc}") from None
    options = ("direct", "swapped") if assignment is None else (assignment,)
    errors = []
    for opt in options:
        if opt == "direct":
            sel = labelled
        elif opt == "swapped":
            sel = {1: labelled[-1], -1: labelled[1]}
        else:
            raise ValidationError(f"unknown assignment {opt!r}")
        try:
            spec = _loop_from_sector_selectors(J, axis, sel)
        except InfeasibleSelectors as exc:
            errors.append(f"{opt}: {exc}")
            continue
        spec.selectors["assignment"] = opt
        return spec
    raise InfeasibleSelectors("; ".join(errors))


def search_loop_selectors(J, axis: int, n_max: int = NMAX_DEFAULT, limit: Optional[int] = None):
    """All feasible one-pulse loops with |m|, |n| <= n_max, shortest pulse first.

    With ``same_parity`` sectors both ends are +-I_4; mixed parity gives
    diag(+-1, -+1) sector patterns, which are kept and marked by ``target``.
    """
    found = {}
    rng = range(-n_max, n_max + 1)
    for mp, np_ in itertools.product(rng, rng):
        if mp == np_:
            continue
        diff = mp - np_
        for nm in rng:
            mm = nm - diff
            if abs(mm) > n_max:
                continue
            try:
                spec = _loop_from_sector_selectors(J, axis, {1: (mp, np_), -1: (mm, nm)})
            except InfeasibleSelectors:
                continue
            key = (round(spec.duration, 10), round(spec.params.B1, 10), round(spec.params.B2, 10))
            found.setdefault(key, spec)
    specs = sorted(found.values(), key=lambda s: (s.target != "identity_loop", s.duration))
    return specs[:limit] if limit else specs


# ---------------------------------------------------------------------------
# The xi equation


def solve_xi(A: float, B: float, branch: int) -> float:
    """Root (-AB + branch sqrt(A^2 + B^2 - 1)) / (B^2 - 1) of |xi|^2 + 1 = (A + B|xi|)^2.

    The value is returned with its sign; only non-negative roots are physical.
    """
    if branch not in (-1, 1):
        raise ValidationError(f"branch must be +1 or -1, got {branch!r}")
    if abs(B * B - 1) < 1e-14:
        raise SingularBranch("B^2 = 1 makes the xi equation linear")
    disc = A * A + B * B - 1
    if disc < 0:
        raise Infeasible(f"A^2 + B^2 = {A * A + B * B:.6g} < 1: no real root")
    return (-A * B + branch * math.sqrt(disc)) / (B * B - 1)


@dataclass(frozen=True)
class FeasibilityCell:
    A: float
    B: float
    branch: int
    xi: Optional[float]

    @property
    def feasible(self) -> bool:
        return self.xi is not None and self.xi >= 0


def feasibility_map(A_range: Sequence[float], B_range: Sequence[float], resolution: int,
                    branch: int = 1) -> list[FeasibilityCell]:
    """One branch of the xi equation over a resolution x resolution grid.

    Cells with no real root carry ``xi=None``; negative roots are kept but are
    not feasible.
    """
    if resolution < 1:
        raise ValidationError("resolution must be positive")
    cells = []
    for A in np.linspace(A_range[0], A_range[1], resolution):
        for B in np.linspace(B_range[0], B_range[1], resolution):
            try:
                xi = solve_xi(float(A), float(B), branch)
            except (Infeasible, SingularBranch):
                xi = None
            cells.append(FeasibilityCell(float(A), float(B), branch, xi))
    return cells


def feasibility_csv(cells: Iterable[FeasibilityCell]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["A", "B", "branch", "xi"])
    for c in cells:
        w.writerow([f"{c.A:.12g}", f"{c.B:.12g}", c.branch, "" if c.xi is None else f"{c.xi:.12g}"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Two-pulse exchange (diagonal + antidiagonal sectors)

# Antidiagonal block of the exchange forms once the diagonal sector is scaled to +I_2.
_EXCHANGE_BLOCK = {
    1: np.array([[0, 1], [-1, 0]], dtype=complex),
    2: np.array([[0, 1j], [1j, 0]], dtype=complex),
    3: np.array([[0, 1], [-1, 0]], dtype=complex),
}


def exchange_sign(U: np.ndarray, axis: int, j: int) -> Optional[int]:
    """(-1)^s with antidiagonal block = (-1)^s x canonical block, diagonal sector scaled to +I.

    Returns None when U is not of that form.
    """
    anti = SECTORS[axis][j - 1]
    diag = SECTORS[axis][2 - j]
    c = U[diag.rows[0], diag.rows[0]]
    if abs(c) < 0.5:
        return None
    block = U[np.ix_(anti.rows, anti.rows)] / c
    for s in (1, -1):
        if np.abs(block - s * _EXCHANGE_BLOCK[axis]).max() < 1e-6:
            return s
    return None


def _antidiag_geometry(J, Jp, axis: int, j: int):
    a_anti = SECTORS[axis][j - 1].alpha
    return {
        "alpha_anti": a_anti,
        "alpha_diag": -a_anti,
        "Ja": _pair(J, axis, a_anti),
        "Ja_p": _pair(Jp, axis, a_anti),
        "Jd": _pair(J, axis, -a_anti),
        "Jd_p": _pair(Jp, axis, -a_anti),
        "Jh": float(J[axis - 1]),
        "Jh_p": float(Jp[axis - 1]),
    }


def _two_pulse_params(J, Jp, axis, g, x, y, xp, yp):
    # x is the field driving the antidiagonal sector, B_{h,-alpha_anti}; y drives the diagonal one.
    a = g["alpha_anti"]
    p1 = _fields_for(J, axis, {-a: x, a: y})
    p2 = _fields_for(Jp, axis, {-a: xp, a: yp})
    return p1, p2


def exchange_solutions(J, axis: int, j: int, n_anti: int, n_anti_prime: int, m_diag: int,
                       n_diag: int, J_prime=None, tol: float = COMPOSITE_TOL) -> list[TwoPulseSpec]:
    """Every sign/branch choice of the two-pulse exchange prescription that validates.

    The prescription: the antidiagonal sector reaches Rabi phase (2n+1) pi/2 in
    each pulse with B B' = -J_{h}a J'_{h}a; the diagonal sector keeps
    B / J_{h}d fixed across pulses, accumulates n_diag pi of Rabi phase and
    K = m_diag + n_diag half-turns of J_h phase.  Eliminating the pulse times
    leaves the xi equation in xi = B / J_{h}a with

        A = (2 n_anti + 1) J_h / (2 a_d K |J_{h}a|),
        B = (2 n_anti' + 1) J'_h / (2 a_d K |J'_{h}a|).

    Each candidate is checked by composing the two propagators.
    """
    Jp = J if J_prime is None else J_prime
    if axis not in (1, 2, 3) or j not in (1, 2):
        raise ValidationError("axis must be 1..3 and j must be 1 or 2")
    if n_anti < 0 or n_anti_prime < 0:
        raise InfeasibleSelectors("n_anti and n_anti_prime must be >= 0 for positive pulse times")
    g = _antidiag_geometry(J, Jp, axis, j)
    K = m_diag + n_diag
    if K == 0:
        raise Infeasible("m_diag + n_diag = 0 leaves no J_h phase to balance")
    Ja, Jap, Jd, Jdp = g["Ja"], g["Ja_p"], g["Jd"], g["Jd_p"]
    if Ja == 0 or Jap == 0:
        raise Infeasible("the antidiagonal sector needs J_{h}a != 0 in both pulses")
    if Jd == 0:
        raise Infeasible("the diagonal sector needs J_{h}d != 0")
    ad = g["alpha_diag"]
    A = (2 * n_anti + 1) * g["Jh"] / (2 * ad * K * abs(Ja))
    B = (2 * n_anti_prime + 1) * g["Jh_p"] / (2 * ad * K * abs(Jap))
    if A * A + B * B < 1:
        raise Infeasible(f"A^2 + B^2 = {A * A + B * B:.6g} < 1 (A={A:.6g}, B={B:.6g})")
    if abs(B * B - 1) < 1e-14:
        raise SingularBranch("B^2 = 1")

    selectors = {"n_anti": n_anti, "n_anti_prime": n_anti_prime, "m_diag": m_diag, "n_diag": n_diag}
    candidates, reasons = [], []
    for branch in (-1, 1):
        xi = solve_xi(A, B, branch)
        if xi <= 0:
            reasons.append(f"branch {branch:+d}: xi = {xi:.6g} is not positive")
            continue
        mag_x = xi * abs(Ja)
        Ra = math.hypot(mag_x, Ja)
        t = (2 * n_anti + 1) * math.pi / (2 * Ra)
        Rap = abs(Jap) * Ra / mag_x
        tp = (2 * n_anti_prime + 1) * math.pi / (2 * Rap)
        denom = t + (Jdp / Jd) * tp
        Rd = n_diag * math.pi / denom if denom != 0 else float("inf")
        if not (Rd >= abs(Jd)) or not math.isfinite(Rd):
            reasons.append(f"branch {branch:+d}: diagonal Rabi frequency {Rd:.6g} < |J_(h)d| = {abs(Jd):.6g}")
            continue
        mag_y = math.sqrt(max(Rd * Rd - Jd * Jd, 0.0))
        for sx, sy in itertools.product((1, -1), (1, -1)):
            x, y = sx * mag_x, sy * mag_y
            xp, yp = -Ja * Jap / x, y * Jdp / Jd
            p1, p2 = _two_pulse_params(J, Jp, axis, g, x, y, xp, yp)
            U = compose(propagator(p2, tp), propagator(p1, t)).matrix
            form = classify_form(U, tol)
            sign = exchange_sign(U, axis, j)
            if form.kind != "diag_antidiag" or form.axis != axis or form.j != j or sign is None:
                reasons.append(f"branch {branch:+d}, signs ({sx:+d},{sy:+d}): achieved {form.kind}")
                continue
            phase_turns = ad * (g["Jh"] * t + g["Jh_p"] * tp) / math.pi
            backsub = {
                "xi_equation": abs(xi * xi + 1 - (A + B * xi) ** 2),
                "anti_rabi_first": abs(Ra * t - (2 * n_anti + 1) * math.pi / 2),
                "anti_rabi_second": abs(Rap * tp - (2 * n_anti_prime + 1) * math.pi / 2),
                "anti_field_product": abs(x * xp + Ja * Jap),
                "diag_field_ratio": abs(y * Jdp - yp * Jd),
                "diag_rabi": abs(Rd * t + math.copysign(1, Jd * Jdp) * abs(Jdp / Jd) * Rd * tp
                                 - n_diag * math.pi),
                "phase_integer": abs(abs(phase_turns) - abs(K)),
            }
            details = {
                "A": A, "B": B, "branch": branch, "xi": xi,
                "alpha_anti": g["alpha_anti"], "alpha_diag": ad,
                "field_anti": x, "field_diag": y, "field_anti_prime": xp, "field_diag_prime": yp,
                "Bplus": p1.B1 + p1.B2, "Bminus": p1.B1 - p1.B2,
                "Bplus_prime": p2.B1 + p2.B2, "Bminus_prime": p2.B1 - p2.B2,
                "phase_turns": phase_turns,
                "exchange_sign": sign, "s": 0 if sign > 0 else 1,
            }
            verification = {
                "achieved_form": form.to_dict(),
                "backsubstitution": {k: float(v) for k, v in backsub.items()},
                "max_backsubstitution": float(max(backsub.values())),
                "unitarity": UnitaryBell(U).unitarity_error(),
            }
            candidates.append(TwoPulseSpec(axis, j, (p1, t), (p2, tp), dict(selectors),
                                           "diag_antidiag", details, verification))
    if not candidates:
        if reasons and all("achieved" in r for r in reasons):
            raise PhaseUnsatisfiable("; ".join(reasons))
        raise Infeasible("; ".join(reasons) or "no admissible root")
    candidates.sort(key=lambda s: (round(s.t + s.t_prime, 9), s.t, -s.details["field_anti"],
                                   -s.details["field_diag"]))
    return candidates


def exchange_two_pulse(J, axis: int, j: int, n_anti: int, n_anti_prime: int, m_diag: int,
                       n_diag: int, J_prime=None, tol: float = COMPOSITE_TOL) -> TwoPulseSpec:
    """Shortest validated exchange; ties prefer the shorter first pulse and positive fields."""
    return exchange_solutions(J, axis, j, n_anti, n_anti_prime, m_diag, n_diag, J_prime, tol)[0]


# ---------------------------------------------------------------------------
# D and A gate families

_ANTI_COEFF = {1: (1j, 1j), 2: (-1, 1), 3: (1j, 1j)}


def diagonal_form(axis: int, phi: float, S: Sequence[int] = (1, 1)) -> np.ndarray:
    """D_h^phi: sector 1 at S_1 e^{i phi}, sector 2 at S_2 e^{-i phi}."""
    U = np.zeros((4, 4), dtype=complex)
    for sec, s, sigma in zip(SECTORS[axis], S, (1, -1)):
        for r in sec.rows:
            U[r, r] = s * np.exp(1j * sigma * phi)
    return U


def antidiagonal_form(axis: int, j: int, phi: float, varphi: float,
                      S: Sequence[int] = (1, 1)) -> np.ndarray:
    """A_{h,j}^{phi,varphi}: sector j antidiagonal, the other sector diagonal.

    ``S`` lists the signs of (antidiagonal sector, diagonal sector).
    """
    U = np.zeros((4, 4), dtype=complex)
    anti = SECTORS[axis][j - 1]
    diag = SECTORS[axis][2 - j]
    sig_a = 1 if j == 1 else -1
    ca, cb = _ANTI_COEFF[axis]
    k, l = anti.rows
    U[k, l] = ca * S[0] * np.exp(1j * sig_a * (phi + varphi))
    U[l, k] = cb * S[0] * np.exp(1j * sig_a * (phi - varphi))
    for r in diag.rows:
        U[r, r] = S[1] * np.exp(-1j * sig_a * phi)
    return U


def _first_row_sign(z: complex) -> int:
    if abs(z.real) > 1e-12:
        return 1 if z.real > 0 else -1
    return 1 if z.imag >= 0 else -1


def standard_signs(axis: int, j: int, phi: float = 0.0, varphi: float = math.pi / 2) -> tuple[int, int]:
    """Signs S making the first-row entry of each sector +1 (or +i when imaginary)."""
    U = antidiagonal_form(axis, j, phi, varphi, (1, 1))
    anti = SECTORS[axis][j - 1]
    diag = SECTORS[axis][2 - j]
    return (_first_row_sign(U[anti.rows[0], anti.rows[1]]), _first_row_sign(U[diag.rows[0], diag.rows[0]]))


def match_form_signs(U: np.ndarray, builder, tol: float = COMPOSITE_TOL):
    """Signs (S_1, S_2) for which ``builder(S)`` equals U up to a global phase, or None."""
    for S in itertools.product((1, -1), repeat=2):
        if equal_up_to_phase(builder(S), U, tol):
            return S
    return None


def general_diagonal(J, axis: int, T: float, n_plus: int, n_minus: int):
    """One pulse of length T ending in D_h^phi; returns (spec, predicted matrix).

    Each sector s needs B_{h,-s}^2 = (n_s pi / T)^2 - J_{h}s^2 >= 0 and ends at
    (-1)^{n_s} e^{i s J_h T}.
    """
    if not T > 0:
        raise ValidationError("T must be positive")
    n = {1: int(n_plus), -1: int(n_minus)}
    B = {}
    for s in (1, -1):
        b2 = (n[s] * math.pi / T) ** 2 - _pair(J, axis, s) ** 2
        if b2 < -1e-12:
            raise InfeasibleSelectors(f"B_(h,{-s:+d})^2 = {b2:.6g} < 0 for n_{s:+d} = {n[s]}")
        B[-s] = math.sqrt(max(b2, 0.0))
    params = _fields_for(J, axis, B)
    alpha1 = SECTORS[axis][0].alpha
    phi = alpha1 * float(J[axis - 1]) * T
    S = tuple((-1) ** n[sec.alpha] for sec in SECTORS[axis])
    predicted = diagonal_form(axis, phi, S)
    U = propagator(params, T).matrix
    verification = {
        "achieved_form": classify_form(U, COMPOSITE_TOL).to_dict(),
        "off_diagonal": float(np.abs(U - np.diag(np.diag(U))).max()),
        "residual_predicted": float(np.abs(U - predicted).max()),
    }
    spec = PulseSpec(axis, T, params, {"n_plus": n[1], "n_minus": n[-1]}, "diagonal", verification)
    return spec, predicted


def _antidiag_roots(Ja: float, Jap: float, t: float, tp: float, grid: int = 2000,
                    branches: int = 3) -> list[tuple[float, float]]:
    """Pairs (D, D') of Rabi phases solving the antidiagonal conditions for fixed t, t'.

    With j = J t / D the conditions read
        j tan D + j' tan D' = 0,
        (1 - j^2) sin^2 D + (1 - j'^2) sin^2 D' = 1.
    For each D the first fixes D' on every tan branch (tan x / x is increasing
    there); the second is scanned along D and refined by bisection.
    """
    dmin, dpmin = abs(Ja) * t, abs(Jap) * tp

    def dprime(D, k):
        kappa = -(Ja * t / D) * math.tan(D) / (Jap * tp)
        lo = max((k - 0.5) * math.pi, dpmin) + 1e-12
        hi = (k + 0.5) * math.pi - 1e-12
        if lo >= hi:
            return None
        f = lambda u: math.tan(u) / u - kappa
        flo, fhi = f(lo), f(hi)
        if flo * fhi > 0:
            return None
        return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    def resid(D, k):
        Dp = dprime(D, k)
        if Dp is None:
            return math.nan, None
        j, jp = Ja * t / D, Jap * tp / Dp
        return (1 - j * j) * math.sin(D) ** 2 + (1 - jp * jp) * math.sin(Dp) ** 2 - 1, Dp

    k_lo = max(0, int(math.floor(dpmin / math.pi + 0.5)))
    Ds = np.linspace(dmin + 1e-9, dmin + 2 * math.pi, grid)
    roots = []
    for k in range(k_lo, k_lo + branches):
        vals = [resid(D, k)[0] for D in Ds]
        for a, b, fa, fb in zip(Ds[:-1], Ds[1:], vals[:-1], vals[1:]):
            if not (math.isfinite(fa) and math.isfinite(fb)) or fa * fb > 0:
                continue
            # tan poles flip the sign of the residual too; skip intervals that jump.
            if abs(fa - fb) > 0.5:
                continue
            try:
                D = brentq(lambda u: resid(u, k)[0], a, b, xtol=1e-14)
            except ValueError:
                continue
            r, Dp = resid(D, k)
            if Dp is not None and abs(r) < 1e-9:
                roots.append((D, Dp))
    return roots


def general_antidiag_solutions(J, axis: int, j: int, t: float, t_prime: float, J_prime=None,
                               n_diag: Optional[int] = None, tol: float = COMPOSITE_TOL,
                               max_solutions: Optional[int] = None) -> list[TwoPulseSpec]:
    """Two pulses of fixed lengths t, t' ending in A_{h,j}^{phi,varphi}.

    phi = alpha_1 (J_h t + J'_h t'), alpha_1 being the sign label of sector 1,
    and varphi = sigma beta arctan(j tan D) from the first pulse (sigma = +1
    for j = 1, -1 for j = 2; beta is the sector's e-label sign).
    """
    Jp = J if J_prime is None else J_prime
    if not (t > 0 and t_prime > 0):
        raise ValidationError("pulse durations must be positive")
    g = _antidiag_geometry(J, Jp, axis, j)
    Ja, Jap, Jd, Jdp = g["Ja"], g["Ja_p"], g["Jd"], g["Jd_p"]
    if Ja == 0 or Jap == 0 or Jd == 0:
        raise NoRoot("the coupling pairs must be non-zero in both sectors")
    denom = t + (Jdp / Jd) * t_prime
    if n_diag is None:
        n_diag = 1
        while n_diag * math.pi / abs(denom) < abs(Jd):
            n_diag += 1
        n_diag = int(math.copysign(n_diag, denom))
    Rd = n_diag * math.pi / denom
    if Rd < abs(Jd):
        raise NoRoot(f"n_diag = {n_diag} gives diagonal Rabi frequency {Rd:.6g} < |J_(h)d|")
    mag_y = math.sqrt(Rd * Rd - Jd * Jd)

    roots = _antidiag_roots(Ja, Jap, t, t_prime)
    if not roots:
        raise NoRoot("no Rabi-phase pair satisfies the antidiagonal conditions in the search window")
    info = SECTORS[axis][j - 1]
    sigma = 1 if j == 1 else -1
    phi = SECTORS[axis][0].alpha * (g["Jh"] * t + g["Jh_p"] * t_prime)
    specs = []
    for D, Dp in roots:
        Ra, Rap = D / t, Dp / t_prime
        mag_x = math.sqrt(max(Ra * Ra - Ja * Ja, 0.0))
        mag_xp = math.sqrt(max(Rap * Rap - Jap * Jap, 0.0))
        sgn = math.copysign(1, math.sin(D) * math.sin(Dp) * math.cos(D) * math.cos(Dp))
        x, xp = mag_x, sgn * mag_xp
        y, yp = mag_y, mag_y * Jdp / Jd
        p1, p2 = _two_pulse_params(J, Jp, axis, g, x, y, xp, yp)
        U = compose(propagator(p2, t_prime), propagator(p1, t)).matrix
        form = classify_form(U, tol)
        if form.kind != "diag_antidiag" or form.j != j:
            continue
        varphi = sigma * info.beta * math.atan((Ja / Ra) * math.tan(D))
        S = match_form_signs(U, lambda s: antidiagonal_form(axis, j, phi, varphi, s), tol)
        j1, j2 = Ja / Ra, Jap / Rap
        roots_resid = {
            "tan_condition": abs(j1 * math.tan(D) + j2 * math.tan(Dp)),
            "amplitude_condition": abs((1 - j1 * j1) * math.sin(D) ** 2
                                       + (1 - j2 * j2) * math.sin(Dp) ** 2 - 1),
        }
        predicted = antidiagonal_form(axis, j, phi, varphi, S or (1, 1))
        details = {"phi": phi, "varphi": varphi, "S": list(S) if S else None, "n_diag": n_diag,
                   "rabi_phase": D, "rabi_phase_prime": Dp}
        verification = {
            "achieved_form": form.to_dict(),
            "root_residuals": {k: float(v) for k, v in roots_resid.items()},
            "residual_predicted": float(np.abs(align_phase(U, predicted) - predicted).max()),
        }
        specs.append(TwoPulseSpec(axis, j, (p1, t), (p2, t_prime), {"n_diag": n_diag},
                                  "diag_antidiag", details, verification))
        if max_solutions and len(specs) >= max_solutions:
            break
    if not specs:
        raise NoRoot("roots found but none composed to a diagonal-antidiagonal form")
    return specs


def general_antidiag(J, axis: int, j: int, t: float, t_prime: float, J_prime=None,
                     n_diag: Optional[int] = None, tol: float = COMPOSITE_TOL):
    """First solution of :func:`general_antidiag_solutions` with its predicted form."""
    spec = general_antidiag_solutions(J, axis, j, t, t_prime, J_prime, n_diag, tol, max_solutions=1)[0]
    d = spec.details
    return spec, antidiagonal_form(axis, j, d["phi"], d["varphi"], d["S"] or (1, 1))
