import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bellising.errors import BasisMismatch, NotNormalized, ValidationError
from bellising.evolution import UnitaryBell
from bellising.gates import (
    TABLE, controlled, correction_rule, exchange_form, teleport, to_bell, to_computational,
    verify_equivalences,
)
from bellising.states import X, Y
from bellising.synthesis import diagonal_form

KET0 = np.array([1, 0])
KET1 = np.array([0, 1])
PLUS = np.array([1, 1]) / math.sqrt(2)
MINUS = np.array([1, -1]) / math.sqrt(2)


def _random_unitary(rng):
    q, r = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    return q * (np.diag(r) / abs(np.diag(r)))


def test_to_computational_identity():
    assert np.allclose(to_computational(UnitaryBell(np.eye(4))).matrix, np.eye(4))


def test_conjugation_involutive(rng):
    for _ in range(20):
        U = UnitaryBell(_random_unitary(rng))
        back = to_bell(to_computational(U))
        assert back.basis == "bell"
        assert np.abs(back.matrix - U.matrix).max() < 1e-12


def test_conjugation_basis_checks():
    with pytest.raises(BasisMismatch):
        to_computational(UnitaryBell(np.eye(4), "computational"))
    with pytest.raises(BasisMismatch):
        to_bell(UnitaryBell(np.eye(4)))


def test_axis3_exchange_pairs():
    # A_{3,1} swaps |00> and |11>; A_{3,2} swaps |01> and |10>
    a = np.abs(to_computational(UnitaryBell(exchange_form(3, 1))).matrix)
    assert np.allclose(a, [[0, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [1, 0, 0, 0]])
    b = np.abs(to_computational(UnitaryBell(exchange_form(3, 2))).matrix)
    assert np.allclose(b, [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


@pytest.mark.parametrize("j", [1, 2])
def test_axis1_exchange_is_dense(j):
    a = np.abs(to_computational(UnitaryBell(exchange_form(1, j))).matrix)
    assert np.allclose(a, 0.5)


@given(st.floats(-math.pi, math.pi))
def test_axis3_diagonal_symmetric_phases(phi):
    D = to_computational(UnitaryBell(diagonal_form(3, phi))).matrix
    assert np.abs(D - np.diag(np.diag(D))).max() < 1e-12
    d = np.diag(D)
    assert d[0] == pytest.approx(d[3]) and d[1] == pytest.approx(d[2])
    assert d[0] * d[1] == pytest.approx(1)


def test_equivalences_hold():
    report = verify_equivalences()
    assert len(report) == 6
    for line in report:
        assert line["pass"], line
        assert line["residual"] < 1e-10


def test_equivalences_negative_control():
    assert not any(line["pass"] for line in verify_equivalences(flip_signs=True))


def test_controlled_gates():
    iY = 1j * Y
    c1 = controlled(iY, 1).matrix
    assert np.allclose(c1[:2, :2], np.eye(2)) and np.allclose(c1[2:, 2:], iY)
    c2 = controlled(X, 2).matrix
    # control on the second label: |01> <-> |11>
    assert np.allclose(c2 @ np.eye(4)[1], np.eye(4)[3])
    cx = controlled(np.kron(X, X), "1^2").matrix
    assert np.allclose(cx @ np.eye(4)[0], np.eye(4)[0])
    assert np.allclose(cx @ np.eye(4)[1], np.eye(4)[2])
    with pytest.raises(ValidationError):
        controlled(X, 3)


def test_teleport_row_10():
    outs = teleport(1, 0, "computational")
    o = outs["10"]
    assert o.matches_table
    assert abs(np.vdot(PLUS, o.post_state)) == pytest.approx(1)
    assert o.correction == "H"


def test_teleport_bell_identity_row():
    o = teleport(0.6, 0.8, "bell")["--"]
    assert o.correction == "I"
    assert np.allclose(o.post_state * np.conj(o.post_state[0]) / abs(o.post_state[0]), [0.6, 0.8])


def test_teleport_random_inputs(rng):
    for _ in range(100):
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        a, b = v / np.linalg.norm(v)
        for basis in ("computational", "bell"):
            outs = teleport(a, b, basis)
            assert len(outs) == 4
            for o in outs.values():
                assert o.matches_table
                assert o.probability == pytest.approx(0.25, abs=1e-12)
                assert o.fidelity > 1 - 1e-10


def test_correction_rules_agree_with_table():
    for (basis, label), (_, word) in TABLE.items():
        assert correction_rule(basis, label) == word


def test_teleport_not_normalized():
    with pytest.raises(NotNormalized):
        teleport(1, 1)


def test_teleport_bad_basis():
    with pytest.raises(ValidationError):
        teleport(1, 0, "hadamard")
