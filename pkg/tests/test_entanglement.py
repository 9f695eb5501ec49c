import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellising.entanglement import (
    amplitude_maximizing_field, bell_concurrence_closed, concurrence, concurrence_trace,
    selective_fields, tuning_field_commensurate,
)
from bellising.errors import InfeasibleRadicand, NotNormalized
from bellising.evolution import apply, propagator
from bellising.model import PhysicalParams, derive
from bellising.states import HADAMARD, TwoQubitState, bell_state, computational_state

from conftest import duration, params

signs = st.sampled_from([-1, 1])


def test_concurrence_extremes():
    assert concurrence(bell_state(-1, -1)) == pytest.approx(1)
    assert concurrence(computational_state(0, 0)) == 0


def test_concurrence_not_normalized():
    with pytest.raises(NotNormalized):
        concurrence(TwoQubitState(np.array([1, 1, 0, 0]), "computational"))


def _rot(rng):
    q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    return q


def test_concurrence_local_invariance(rng):
    for _ in range(100):
        v = rng.normal(size=4) + 1j * rng.normal(size=4)
        s = TwoQubitState(v / np.linalg.norm(v))
        L = np.kron(_rot(rng), _rot(rng))
        c = concurrence(s)
        assert 0 <= c <= 1
        assert concurrence(TwoQubitState(L @ s.amplitudes)) == pytest.approx(c, abs=1e-12)


def test_closed_form_starts_maximal():
    assert bell_concurrence_closed(PhysicalParams((1, 2, 3), 0.4, 0.1, 2), 1, -1, 0) == 1


@given(params(), duration, signs, signs)
def test_closed_form_matches_spin_flip(p, t, mu, nu):
    direct = concurrence(apply(propagator(p, t), bell_state(mu, nu)))
    assert bell_concurrence_closed(p, mu, nu, t) == pytest.approx(direct, abs=1e-9)


def test_closed_form_is_c_not_c_squared():
    # at 4 j^2 b^2 = 1 and a quarter period the printed expression vanishes;
    # halfway there C = sqrt(1 - sin^4) and C^2 = 1 - sin^4 differ
    p = PhysicalParams.from_fields((2, 0.4, 0.6), 0.2, 0.0, 1)  # |B+| = |J_{1}-|
    R = derive(p).Rplus
    t = math.pi / (4 * R)
    direct = concurrence(apply(propagator(p, t), bell_state(-1, 1)))
    assert direct == pytest.approx(math.sqrt(1 - math.sin(R * t) ** 4), abs=1e-12)
    assert bell_concurrence_closed(p, -1, 1, t) == pytest.approx(direct, abs=1e-12)
    assert bell_concurrence_closed(p, -1, 1, 2 * t) == pytest.approx(0, abs=1e-7)


@given(params(), duration, signs, signs)
def test_periodicity(p, t, mu, nu):
    f = {1: mu, 2: mu * nu, 3: nu}[p.axis]
    R = derive(p).R(-f)
    if R < 1e-6:
        return
    assert bell_concurrence_closed(p, mu, nu, t + math.pi / R) == pytest.approx(
        bell_concurrence_closed(p, mu, nu, t), abs=1e-10)


@given(params(), duration, signs, signs, st.floats(-5, 5))
def test_single_frequency_dependence(p, t, mu, nu, delta):
    # changing the field of the other sector leaves the trace alone
    f = {1: mu, 2: mu * nu, 3: nu}[p.axis]
    d = derive(p)
    Bp, Bm = d.Bplus, d.Bminus
    if -f > 0:
        q = PhysicalParams.from_fields(p.J, Bp, Bm + delta, p.axis)
    else:
        q = PhysicalParams.from_fields(p.J, Bp + delta, Bm, p.axis)
    assert concurrence(apply(propagator(q, t), bell_state(mu, nu))) == pytest.approx(
        concurrence(apply(propagator(p, t), bell_state(mu, nu))), abs=1e-10)


def test_trace_csv():
    tr = concurrence_trace(PhysicalParams((1, 2, 3), 0.5, 0.5, 3), -1, 1, [0, 0.5])
    lines = tr.to_csv().splitlines()
    assert lines[0] == "t,C,axis,mu,nu"
    assert lines[1] == "0,1,3,-1,1"
    assert np.allclose(tr.C, concurrence_trace(PhysicalParams((1, 2, 3), 0.5, 0.5, 3), -1, 1,
                                               [0, 0.5], closed=False).C)


@given(params(), st.integers(1, 6), st.integers(1, 6))
def test_commensurate(p, nm, np_):
    try:
        tf = tuning_field_commensurate(p, nm, np_)
    except InfeasibleRadicand:
        d = derive(p)
        assert (np_ / nm) ** 2 * d.Rminus ** 2 < d.Jdiff ** 2
        return
    assert len(tf.offsets) == 2
    for k in range(2):
        d = derive(tf.apply(p, k))
        assert np_ * d.Rminus == pytest.approx(nm * d.Rplus, abs=1e-10)


def test_commensurate_infeasible():
    p = PhysicalParams((0, 5, 0), 0, 0, 1)  # R- = 5, J_{1}- = 5
    with pytest.raises(InfeasibleRadicand):
        tuning_field_commensurate(p, 2, 1)


def test_amplitude_maximizing_zero_bplus():
    p = PhysicalParams((1, 0.3, 0.9), 0.4, -0.4, 2)  # J_{2}- = J1 - J3 = 0.1
    tf = amplitude_maximizing_field(p)
    assert sorted(tf.offsets) == pytest.approx([-0.05, 0.05])


@given(params())
def test_amplitude_maximizing(p):
    d0 = derive(p)
    if abs(d0.Jdiff) < 1e-3:
        return
    tf = amplitude_maximizing_field(p)
    q = tf.apply(p)
    d = derive(q)
    assert abs(d.Bplus) == pytest.approx(abs(d.Jdiff), abs=1e-12)
    assert 4 * d.jplus ** 2 * d.bplus ** 2 == pytest.approx(1, abs=1e-12)
    # a Bell state tied to R+ reaches C = 0 after a quarter period
    mu, nu = {1: (-1, 1), 2: (1, -1), 3: (1, -1)}[p.axis]
    t_star = math.pi / (2 * d.Rplus)
    ts = np.linspace(0, math.pi / d.Rplus, 2001)
    cmin = min(bell_concurrence_closed(q, mu, nu, t) for t in ts)
    assert min(cmin, bell_concurrence_closed(q, mu, nu, t_star)) < 1e-8


def test_selective_zero():
    tf = selective_fields(PhysicalParams((0, 0.5, -0.5), 0.3, 0.3, 1))
    assert tf.deltas[0] == pytest.approx((0, 0))


@given(params())
def test_selective(p):
    d0 = derive(p)
    tf = selective_fields(p)
    for k, (d1, d2) in enumerate(tf.deltas):
        assert (d1 - d2) in (pytest.approx(-d0.Bminus + abs(d0.Jsum), abs=1e-12),
                             pytest.approx(-d0.Bminus - abs(d0.Jsum), abs=1e-12))
        assert d1 == pytest.approx(-d2)
        assert abs(derive(tf.apply(p, k)).Bminus) == pytest.approx(abs(d0.Jsum), abs=1e-10)
    assert abs(tf.deltas[0][0]) <= abs(tf.deltas[1][0])
