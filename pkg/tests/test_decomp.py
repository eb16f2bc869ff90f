import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from gsconkit import errors
from gsconkit.decomp import (
    anticommute,
    decompose_pauli_rotation,
    decompose_small_unitary,
    depth4_solve,
    locality_level,
    pauli_expand,
    pulse_bound,
    split_pauli,
    support,
    trotter_first_order,
    weight,
)
from gsconkit.qcore import pauli_matrix, pauli_word_matrix, random_hermitian

X, Y, Z, I2 = (pauli_matrix(c) for c in "XYZI")


def kron(*ms):
    out = np.ones((1, 1))
    for m in ms:
        out = np.kron(out, m)
    return out


def _rotation(word, t):
    return expm(1j * t * pauli_word_matrix(word))


# ------------------------------------------------------------ pauli_expand

def test_expand_single_z():
    exp = pauli_expand(Z)
    assert [(t.coeff, t.word) for t in exp.terms] == [(1.0, "Z")]


def test_expand_two_terms():
    h = kron(X, X) + 0.5 * kron(Z, I2)
    got = sorted((t.word, t.coeff) for t in pauli_expand(h).terms)
    assert got == [("XX", 1.0), ("ZI", 0.5)]


def test_expand_random_three_qubit(rng):
    h = random_hermitian(8, rng)
    exp = pauli_expand(h)
    # oracle: direct trace inner products over all 64 words
    for word in map("".join, itertools.product("IXYZ", repeat=3)):
        want = np.trace(pauli_word_matrix(word) @ h).real / 8
        got = next((t.coeff for t in exp.terms if t.word == word), 0.0)
        assert got == pytest.approx(want, abs=1e-12)
    assert np.max(np.abs(exp.matrix() - h)) <= 1e-10
    spec = np.linalg.norm(h, 2)
    assert all(abs(t.coeff) <= spec + 1e-12 for t in exp.terms)
    assert exp.l1() <= 8 * spec


# ------------------------------------------------------------ split_pauli

def test_split_zzz():
    h1, h2, j = split_pauli("ZZZ")
    assert (h1, h2, j) == ("ZXI", "IYZ", 1)
    c = pauli_word_matrix(h1) @ pauli_word_matrix(h2) - pauli_word_matrix(h2) @ pauli_word_matrix(h1)
    assert np.allclose(c, 2j * kron(Z, Z, Z))


@pytest.mark.parametrize("word", ["XXX", "YXY", "ZYXZ", "XIIZ", "XIZY", "IXYZXI", "YYYYY"])
def test_split_commutator(word):
    h1, h2, j = split_pauli(word)
    assert word[j] != "I"
    assert anticommute(h1, h2)
    P1, P2 = pauli_word_matrix(h1), pauli_word_matrix(h2)
    assert np.allclose(P1 @ P2 - P2 @ P1, 2j * pauli_word_matrix(word))
    assert h1[j + 1:] == "I" * (len(word) - j - 1) and h2[:j] == "I" * j
    assert h1[:j] == word[:j] and h2[j + 1:] == word[j + 1:]


def test_split_x_pivot_uses_yz_pair():
    h1, h2, j = split_pauli("ZXZ")
    assert (h1[j], h2[j]) == ("Y", "Z")


def test_split_identity_midpoint():
    h1, h2, j = split_pauli("XIIZ")
    assert j == 0
    P1, P2 = pauli_word_matrix(h1), pauli_word_matrix(h2)
    assert np.allclose(P1 @ P2 - P2 @ P1, 2j * pauli_word_matrix("XIIZ"))


@pytest.mark.parametrize("word", ["ZZ", "XI", "IIZ", "III"])
def test_split_not_splittable(word):
    with pytest.raises(errors.NotSplittable):
        split_pauli(word)


@given(st.text(alphabet="IXYZ", min_size=3, max_size=9))
@settings(max_examples=200, deadline=None)
def test_split_halves_are_smaller(word):
    sup = support(word)
    if len(sup) < 3:
        return
    h1, h2, j = split_pauli(word)
    w = len(sup)
    assert weight(h1) <= (w + 1) // 2 + 1 and weight(h2) <= w // 2 + 1
    assert max(weight(h1), weight(h2)) < w


# ------------------------------------------------------------ depth4

def _d4_product(s):
    return expm(1j * s.t1 * X) @ expm(1j * s.t2 * Y) @ expm(1j * s.t2 * X) @ expm(1j * s.t1 * Y)


def test_depth4_xy():
    s = depth4_solve("X", "Y", 0.02)
    assert np.max(np.abs(_d4_product(s) - expm(0.02j * Z))) <= 1e-12
    assert s.pulse_sum() <= 0.2


def test_depth4_zero():
    s = depth4_solve("X", "Y", 0.0)
    assert (s.t1, s.t2) == (0.0, 0.0)


def test_depth4_negative():
    s = depth4_solve("X", "Y", -0.02)
    pos = depth4_solve("X", "Y", 0.02)
    assert s.inverted and (s.t1, s.t2) == (pos.t1, pos.t2)
    mats = {"X": X, "Y": Y}
    prod = np.eye(2)
    for w, p in s.factors():
        prod = expm(1j * p * mats[w]) @ prod
    assert np.max(np.abs(prod - expm(-0.02j * Z))) <= 1e-12


def test_depth4_errors():
    with pytest.raises(errors.PulseOutOfRange):
        depth4_solve("X", "Y", 1.6)
    with pytest.raises(errors.NoSolution):
        depth4_solve("XX", "YY", 0.1)


def _random_anticommuting_pair(rng):
    while True:
        w1 = "".join(rng.choice(list("IXYZ"), 2))
        w2 = "".join(rng.choice(list("IXYZ"), 2))
        if weight(w1) and weight(w2) and anticommute(w1, w2):
            return w1, w2


def test_depth4_random_pairs(rng):
    for _ in range(200):
        h1, h2 = _random_anticommuting_pair(rng)
        t = float(rng.uniform(0, math.pi / 2)) or 1e-3
        s = depth4_solve(h1, h2, t)
        P1, P2 = pauli_word_matrix(h1), pauli_word_matrix(h2)
        H = (P1 @ P2 - P2 @ P1) / 2j
        prod = expm(1j * s.t1 * P1) @ expm(1j * s.t2 * P2) @ expm(1j * s.t2 * P1) @ expm(1j * s.t1 * P2)
        assert np.max(np.abs(prod - expm(1j * t * H))) <= 1e-12
        assert s.pulse_sum() <= math.sqrt(2 * t) + 1e-15


# ------------------------------------------------------------ exact decomposition

def test_two_local_single_gate():
    seq = decompose_pauli_rotation("IXIZ", 0.1)
    assert len(seq) == 1 and seq.gates[0].qubits == (1, 3)
    assert seq.total_pulse == pytest.approx(0.1)


def test_zzz():
    seq = decompose_pauli_rotation("ZZZ", 1e-3)
    assert len(seq) <= 4
    assert seq.total_pulse <= 4 * math.sqrt(2e-3) + 1e-15
    assert np.max(np.abs(seq.unitary() - _rotation("ZZZ", 1e-3))) <= 1e-10


def test_width_five():
    t = 1e-6
    seq = decompose_pauli_rotation("XYZYX", t)
    assert len(seq) <= 16
    assert seq.total_pulse <= 16 * 2 ** 0.75 * t ** 0.25
    assert np.max(np.abs(seq.unitary() - _rotation("XYZYX", t))) <= 1e-10


def test_strict_precondition():
    with pytest.raises(errors.PulseOutOfRange):
        decompose_pauli_rotation("XYZX", 1e-2)
    seq = decompose_pauli_rotation("XYZX", 1e-2, strict=False)
    assert np.max(np.abs(seq.unitary() - _rotation("XYZX", 1e-2))) <= 1e-10


WORDS = [w for n in range(2, 6) for w in map("".join, itertools.product("XYZ", repeat=n))]


@pytest.mark.parametrize("t", [1e-6, 1e-4, 1e-2, -1e-4])
def test_exact_all_words(t):
    for word in WORDS[::7]:
        k = locality_level(len(word))
        if 8 * abs(t) ** (2.0 ** -k) > math.pi / 2:
            continue
        seq = decompose_pauli_rotation(word, t)
        assert np.max(np.abs(seq.unitary() - _rotation(word, t))) <= 1e-10
        assert len(seq) <= 4 ** k
        assert all(g.arity <= 2 for g in seq)
        assert all(abs(g.pulse[0]) <= pulse_bound(k, t) * (1 + 1e-12) for g in seq)


@given(st.text(alphabet="IXYZ", min_size=1, max_size=6), st.floats(-1e-3, 1e-3))
@settings(max_examples=80, deadline=None)
def test_exact_with_identities(word, t):
    seq = decompose_pauli_rotation(word, t, strict=False)
    assert np.max(np.abs(seq.unitary() - _rotation(word, t))) <= 1e-10
    assert seq.max_arity() <= 2


# ------------------------------------------------------------ product formulas

def test_trotter_single_term():
    r = trotter_first_order([0.3 * X], 3)
    assert r.error <= 1e-12


def test_trotter_commuting():
    r = trotter_first_order([0.3 * kron(Z, I2), 0.2 * kron(I2, Z)], 1)
    assert r.error <= 1e-12


def test_trotter_ratio():
    e1 = trotter_first_order([0.1 * X, 0.1 * Z], 1).error
    e4 = trotter_first_order([0.1 * X, 0.1 * Z], 4).error
    # oracle: direct exponentials
    direct = np.linalg.norm(expm(0.1j * (X + Z)) - expm(0.1j * X) @ expm(0.1j * Z), 2)
    assert e1 == pytest.approx(direct, rel=1e-9)
    assert 3 <= e1 / e4 <= 5


def test_trotter_doubling_halves(rng):
    h = [0.2 * kron(X, Y), 0.3 * kron(Z, I2), 0.1 * kron(I2, X)]
    errs = [trotter_first_order(h, s).error for s in (2, 4, 8, 16)]
    for a, b in zip(errs, errs[1:]):
        assert 0.7 * 2 <= a / b <= 1.3 * 2


def test_trotter_budget():
    with pytest.raises(errors.NormBudgetExceeded):
        trotter_first_order([0.6 * X, 0.6 * Z], 1)


def test_trotter_nonlocal_term():
    h = 0.1 * kron(X, X, X)
    r = trotter_first_order([h, 0.1 * kron(Z, I2, I2)], 2)
    assert r.sequence.max_arity() <= 2


def test_small_unitary_zero():
    r = decompose_small_unitary(np.zeros((4, 4)))
    assert len(r.sequence) == 0 and r.error == 0.0


def test_small_unitary_single_word():
    h = 1e-4 * kron(X, Z)
    r = decompose_small_unitary(h)
    assert len(r.sequence) == 1
    assert np.max(np.abs(r.sequence.unitary() - expm(1j * h))) <= 1e-12


def test_small_unitary_three_terms():
    h = 1e-4 * (kron(X, I2) + kron(I2, Z) + 0.5 * kron(X, Z))
    r = decompose_small_unitary(h)
    direct = np.linalg.norm(expm(1j * h) - r.sequence.unitary(), 2)
    assert r.error == pytest.approx(direct, rel=1e-6)
    assert r.c1 < 1.0  # calibrated constant is O(1)
    assert r.error <= r.c1 * 16 * r.eps ** 2 * (1 + 1e-9)


def test_small_unitary_norm_guard():
    with pytest.raises(errors.NormTooLarge):
        decompose_small_unitary(0.1 * kron(X, X))


def test_expand_decompose_trotter_chain(rng):
    # Pauli expansion -> per-term exact rotations -> one product step
    h = random_hermitian(8, rng)
    h *= 1e-7 / np.linalg.norm(h, 2)
    r = decompose_small_unitary(h)
    assert r.sequence.max_arity() <= 2
    assert r.error <= r.c1 * 64 * r.eps ** 2 * (1 + 1e-9)
    assert r.drift_sum <= r.c2 * 9 * 64 * r.eps ** (1 / 6) * (1 + 1e-9)
