"""Acceptance criteria 1-9.

Each test prints one ``PASS``/``FAIL`` line; the lines are collected again in
the terminal summary (see conftest.py).  Run directly with
``python3 tests/test_acceptance.py`` for the lines alone.
"""
import math
import time

import numpy as np
import pytest

from bellising.entanglement import (
    amplitude_maximizing_field, bell_concurrence_closed, bell_sector_sign, concurrence,
    tuning_field_commensurate,
)
from bellising.errors import InfeasibleRadicand, IsingError
from bellising.evolution import (
    apply, compose_all, equal_up_to_phase, evolve_sequence, pattern_mask, propagator, sector,
    spectral_oracle,
)
from bellising.gates import teleport, verify_equivalences
from bellising.geometry import sample_trajectory
from bellising.model import DEGENERATE_R, PhysicalParams, derive
from bellising.states import bell_state
from bellising.synthesis import (
    antidiagonal_form, diagonal_form, exchange_two_pulse, feasibility_map, general_antidiag,
    loop_one_pulse, match_form_signs,
)

RESULTS = {}

EXCHANGE_J = (2, 0.4, 0.6)
EXCHANGE_MATRIX = np.array([[0, 1, 0, 0], [-1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
LOOP_J = {1: (10, 0.4, 0.5), 2: (0.5, 10, 0.4), 3: (0.4, 0.5, 10)}
LOOP_SELECTORS = {
    1: dict(m_minus=2, n_minus=1, m_plus=1, n_plus=2),
    2: dict(m_minus=4, n_minus=1, m_plus=2, n_plus=5),
    3: dict(m_minus=4, n_minus=1, m_plus=2, n_plus=5),
}


def report(key, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}"
    RESULTS[key] = line
    print(line)
    return ok


def _draws(rng, n):
    for _ in range(n):
        yield (PhysicalParams(rng.uniform(-10, 10, 3), *rng.uniform(-10, 10, 2), int(rng.integers(1, 4))),
               float(rng.uniform(0, 10)))


def _unit_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def test_criterion_1_oracle_equivalence():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    draws = list(_draws(rng, 1000))
    # edge draws: no field, field equal to the coupling pair, zero time
    for h in (1, 2, 3):
        draws += [(PhysicalParams((1.5, -2, 3), 0, 0, h), 2.0),
                  (PhysicalParams((2, 2, 2), 1, 1, h), 3.0),
                  (PhysicalParams((1, 2, 3), 4, -1, h), 0.0)]
    for p, t in draws:
        worst = max(worst, float(np.abs(propagator(p, t).matrix - spectral_oracle(p, t).matrix).max()))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 5
    report(1, ok, f"{len(draws)} draws, max |U - oracle| = {worst:.2e}, {elapsed:.2f}s")
    assert ok


def _exchange_check(spec):
    d = spec.details
    got = {"t": spec.t, "t'": spec.t_prime, "B1-": d["Bminus"], "B1+": d["Bplus"],
           "B'1-": d["Bminus_prime"], "B'1+": d["Bplus_prime"]}
    want = {"t": 1.77, "t'": 7.65, "B1-": 1.73, "B1+": 0.86, "B'1-": 1.73, "B'1+": -0.05}
    digits_ok = all(round(got[k], 2) == want[k] for k in want)
    residual_ok = equal_up_to_phase(spec.unitary().matrix, EXCHANGE_MATRIX, 1e-8)
    text = ", ".join(f"{k}={got[k]:.4f}" for k in want)
    return digits_ok and residual_ok, text


def test_criterion_2_reference_selectors():
    # reference selectors as given: n_a = 0, n'_a = 0, m_-a = 2, n_-a = -4
    start = time.perf_counter()
    try:
        spec = exchange_two_pulse(EXCHANGE_J, 1, 1, 0, 0, 2, -4)
    except IsingError as exc:
        ok, text = False, f"{type(exc).__name__}: {exc}"
    else:
        ok, text = _exchange_check(spec)
    ok = ok and time.perf_counter() - start < 1
    report("2 (reference selectors)", ok, text)
    assert ok


def test_criterion_2_corrected_selectors():
    start = time.perf_counter()
    spec = exchange_two_pulse(EXCHANGE_J, 1, 1, 0, 0, 0, 6)
    ok, text = _exchange_check(spec)
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1
    report("2 (m_-a=0, n_-a=6)", ok, f"{text}, {elapsed:.2f}s")
    assert ok


@pytest.mark.parametrize("h", [1, 2, 3])
def test_criterion_3_loops(h):
    start = time.perf_counter()
    spec = loop_one_pulse(LOOP_J[h], h, LOOP_SELECTORS[h])
    U = spec.unitary().matrix
    dist = min(np.abs(U - np.eye(4)).max(), np.abs(U + np.eye(4)).max())
    traj = sample_trajectory(spec.pulses, bell_state(-1, -1), 200, folded=False)
    elapsed = time.perf_counter() - start
    ok = dist < 1e-8 and traj.closes and elapsed < 1
    panel = "abc"[h - 1]
    report(f"3({panel})", ok, f"axis {h}, T={spec.duration:.6f}, "
           f"min ||U -+ I|| = {dist:.2e}, trajectory closes: {traj.closes}, {elapsed:.2f}s")
    assert ok


def test_criterion_4_gate_equivalences():
    lines = verify_equivalences(1e-10)
    worst = max(x["residual"] for x in lines)
    ok = len(lines) == 6 and all(x["pass"] for x in lines)
    report(4, ok, f"{sum(x['pass'] for x in lines)}/6 identities, max residual {worst:.2e}")
    assert ok


def test_criterion_5_teleportation():
    rng = np.random.default_rng(5)
    worst_f = worst_p = 0.0
    table_ok = True
    for _ in range(100):
        a, b = _unit_qubit(rng)
        for basis in ("computational", "bell"):
            outs = teleport(a, b, basis)
            table_ok &= len(outs) == 4
            for o in outs.values():
                table_ok &= o.matches_table
                worst_f = max(worst_f, 1 - o.fidelity)
                worst_p = max(worst_p, abs(o.probability - 0.25))
    ok = table_ok and worst_f < 1e-10 and worst_p < 1e-12
    report(5, ok, f"table match {table_ok}, max infidelity {worst_f:.2e}, max |p - 1/4| {worst_p:.2e}")
    assert ok


def test_criterion_6_concurrence_dynamics():
    rng = np.random.default_rng(6)
    worst = 0.0
    for p, t in _draws(rng, 10_000):
        mu, nu = (int(x) for x in rng.choice([-1, 1], 2))
        C = concurrence(apply(propagator(p, t), bell_state(mu, nu)))
        worst = max(worst, abs(C - bell_concurrence_closed(p, mu, nu, t)))
    # the other sector's field must not matter
    worst_perturb = 0.0
    for p, t in _draws(rng, 500):
        mu, nu = (int(x) for x in rng.choice([-1, 1], 2))
        f = bell_sector_sign(p.axis, mu, nu)
        dB = float(rng.uniform(-3, 3))
        # B_f moves with (dB, f dB): f=+1 shifts B+, f=-1 shifts B-
        q = p.with_fields(p.B1 + dB, p.B2 + f * dB)
        assert derive(q).B(-f) == pytest.approx(derive(p).B(-f), abs=1e-12)
        a = concurrence(apply(propagator(p, t), bell_state(mu, nu)))
        b = concurrence(apply(propagator(q, t), bell_state(mu, nu)))
        worst_perturb = max(worst_perturb, abs(a - b))
    ok = worst < 1e-9 and worst_perturb < 1e-9
    report(6, ok, f"10000 draws, max |closed - spin-flip| = {worst:.2e}; "
           f"complementary-field change {worst_perturb:.2e}")
    assert ok


def test_criterion_7_tuning_fields():
    rng = np.random.default_rng(7)
    worst_ratio = worst_min = 0.0
    tried = skipped = 0
    for p, _ in _draws(rng, 500):
        n_minus, n_plus = (int(x) for x in rng.integers(1, 6, 2))
        tried += 1
        try:
            field = tuning_field_commensurate(p, n_minus, n_plus)
        except InfeasibleRadicand:
            skipped += 1
            continue
        for k in range(len(field.offsets)):
            d = derive(field.apply(p, k))
            worst_ratio = max(worst_ratio, abs(n_plus * d.Rminus - n_minus * d.Rplus))
    for p, _ in _draws(rng, 500):
        field = amplitude_maximizing_field(p)
        q = field.apply(p)
        R = derive(q).Rplus
        if R < DEGENERATE_R:
            continue
        # Bell states whose concurrence follows R+: f = -1
        mu, nu = next((m, n) for m in (-1, 1) for n in (-1, 1) if bell_sector_sign(p.axis, m, n) == -1)
        for k in range(4):
            t = (k + 0.5) * math.pi / R
            worst_min = max(worst_min, concurrence(apply(propagator(q, t), bell_state(mu, nu))))
    ok = worst_ratio < 1e-10 and worst_min < 1e-8 and skipped < tried
    report(7, ok, f"max |n+ R'- - n- R'+| = {worst_ratio:.2e} ({tried - skipped}/{tried} radicands "
           f"admissible), max C at minima = {worst_min:.2e}")
    assert ok


def test_criterion_8_feasibility_map():
    cells = feasibility_map((-3, 3), (-3, 3), 121, 1) + feasibility_map((-3, 3), (-3, 3), 121, -1)
    worst = 0.0
    empty_ok = True
    for c in cells:
        expect_empty = c.A ** 2 + c.B ** 2 < 1 or abs(c.B ** 2 - 1) < 1e-14
        empty_ok &= (c.xi is None) == expect_empty
        if c.feasible:
            worst = max(worst, abs(c.xi ** 2 + 1 - (c.A + c.B * c.xi) ** 2))

    def fraction(pred):
        sel = [c for c in cells if c.A != 0 and c.B != 0 and pred(c.A * c.B)]
        return sum(c.feasible for c in sel) / len(sel)

    opposite, same = fraction(lambda x: x < 0), fraction(lambda x: x > 0)
    ok = worst < 1e-10 and empty_ok and opposite > same
    report(8, ok, f"identity residual {worst:.2e}, empty set exact: {empty_ok}, "
           f"feasible fraction AB<0 {opposite:.3f} vs AB>0 {same:.3f}")
    assert ok


def test_criterion_9_group_structure():
    rng = np.random.default_rng(9)
    worst_pattern = worst_det = worst_recip = 0.0
    for p, _ in _draws(rng, 300):
        ts = rng.uniform(0, 10, int(rng.integers(2, 6)))
        U = compose_all([propagator(p, float(t)) for t in ts])
        worst_pattern = max(worst_pattern, float(np.abs(U.matrix[~pattern_mask(p.axis)]).max()))
        worst_det = max(worst_det, abs(U.det() - 1))
        d1 = np.linalg.det(sector(U, 1, p.axis).matrix)
        d2 = np.linalg.det(sector(U, 2, p.axis).matrix)
        worst_recip = max(worst_recip, abs(d1 * d2 - 1))
    worst_law = 0.0
    for h in (1, 2, 3):
        for j in (1, 2):
            for _ in range(20):
                phi1, phi2, varphi = rng.uniform(-math.pi, math.pi, 3)
                S1, S2 = (tuple(int(x) for x in rng.choice([-1, 1], 2)) for _ in range(2))
                P = antidiagonal_form(h, j, phi2, varphi, S2) @ antidiagonal_form(h, j, phi1, varphi, S1)
                S = match_form_signs(P, lambda s: diagonal_form(h, phi1 + phi2, s), 1e-8)
                worst_law = max(worst_law, 0.0 if S is not None else math.inf)
            # realized pulses: a synthesized A squared is D with twice the phase
            J = {1: (2, 0.4, 0.6), 2: (0.4, 2, 0.6), 3: (0.4, 0.6, 2)}[h]
            spec, _ = general_antidiag(J, h, j, 1.3, 2.1)
            U = evolve_sequence(spec.pulses + spec.pulses).matrix
            phi = spec.details["phi"]
            S = match_form_signs(U, lambda s: diagonal_form(h, 2 * phi, s), 1e-8)
            worst_law = max(worst_law, 0.0 if S is not None else math.inf)
    ok = worst_pattern < 1e-8 and worst_det < 1e-8 and worst_recip < 1e-8 and worst_law == 0
    report(9, ok, f"pattern leak {worst_pattern:.2e}, |det - 1| {worst_det:.2e}, "
           f"|det1 det2 - 1| {worst_recip:.2e}, A.A = D law holds: {worst_law == 0}")
    assert ok


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if not name.startswith("test_criterion"):
            continue
        cases = [(h,) for h in (1, 2, 3)] if name.startswith("test_criterion_3") else [()]
        for args in cases:
            try:
                fn(*args)
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
