import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from gsconkit import config, errors
from gsconkit.qcore import (
    DenseOperator,
    GateSequence,
    LocalGate,
    StateVector,
    apply_gate,
    commutator,
    eig_low,
    embed_local,
    euclid_diff,
    norms,
    pauli_matrix,
    random_hermitian,
    random_state,
    random_unitary,
    trace_distance,
)

X, Y, Z, I2 = (pauli_matrix(c) for c in "XYZI")
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def test_pauli_commutators():
    assert np.array_equal(commutator(X, Y), 2j * Z)
    assert np.array_equal(commutator(Y, Z), 2j * X)
    assert np.array_equal(commutator(Z, X), 2j * Y)
    assert np.array_equal(pauli_matrix("I"), np.eye(2))
    for p in (X, Y, Z):
        assert np.array_equal(p @ p, np.eye(2))


def test_bad_letter():
    with pytest.raises(errors.InvalidWord):
        pauli_matrix("Q")


def test_embed_x_on_msb():
    op = embed_local(LocalGate((0,), X), 2)
    out = op.entries @ StateVector.from_bits("00").amps
    assert np.allclose(out, StateVector.from_bits("10").amps)


def test_embed_identity():
    for n in (1, 3, 5):
        op = embed_local(LocalGate((n - 1,), I2), n)
        assert np.array_equal(op.entries, np.eye(1 << n))


def test_embed_cnot_all_basis_states():
    # oracle: explicit kron with qubit 0 most significant
    oracle = np.kron(CNOT, I2)
    op = embed_local(LocalGate((0, 1), CNOT), 3).entries
    assert np.allclose(op, oracle)
    for bits in itertools.product("01", repeat=3):
        b = "".join(bits)
        want = b[0] + str(int(b[1]) ^ int(b[0])) + b[2]
        got = op @ StateVector.from_bits(b).amps
        assert np.allclose(got, StateVector.from_bits(want).amps)
    assert np.allclose(op @ StateVector.from_bits("110").amps, StateVector.from_bits("100").amps)


def test_embed_reversed_qubits():
    op = embed_local(LocalGate((2, 0), CNOT), 3).entries
    # control qubit 2, target qubit 0
    for i in range(8):
        b = format(i, "03b")
        want = str(int(b[0]) ^ int(b[2])) + b[1:]
        assert np.allclose(op @ StateVector.from_bits(b).amps, StateVector.from_bits(want).amps)


def test_embed_errors():
    with pytest.raises(errors.IndexOutOfRange):
        embed_local(LocalGate((3,), X), 3)
    with pytest.raises(errors.IndexOutOfRange):
        LocalGate((1, 1), CNOT)
    with config.use(config.Config(dense_limit=4)):
        with pytest.raises(errors.DenseLimitExceeded):
            embed_local(LocalGate((0,), X), 5)


def test_embed_disjoint_commute(rng):
    for _ in range(20):
        a = LocalGate((0, 2), random_unitary(4, rng))
        b = LocalGate((1, 3), random_unitary(4, rng))
        A, B = embed_local(a, 4).entries, embed_local(b, 4).entries
        assert np.max(np.abs(A @ B - B @ A)) <= 1e-12


def test_apply_matches_embed(rng):
    psi = random_state(4, rng)
    g = LocalGate((3, 1), random_unitary(4, rng))
    assert np.allclose(apply_gate(psi.amps, g, 4), embed_local(g, 4).entries @ psi.amps, atol=1e-13)


def test_norms_z():
    nr = norms(Z)
    assert nr.spectral == pytest.approx(1.0)
    assert nr.frobenius == pytest.approx(math.sqrt(2))
    assert nr.trace == pytest.approx(2.0)


def test_trace_distance_orthogonal():
    a, b = StateVector.from_bits("0"), StateVector.from_bits("1")
    rho = np.outer(a.amps, a.amps.conj()) - np.outer(b.amps, b.amps.conj())
    assert norms(rho).trace == pytest.approx(2.0)
    assert trace_distance(a, b) == pytest.approx(2.0)


def test_trace_distance_formula(rng):
    for _ in range(10):
        a, b = random_state(2, rng), random_state(2, rng)
        rho = np.outer(a.amps, a.amps.conj()) - np.outer(b.amps, b.amps.conj())
        assert norms(rho).trace == pytest.approx(trace_distance(a, b), abs=1e-12)


def test_norm_inequalities_random(rng):
    for _ in range(50):
        m = random_hermitian(8, rng)
        s, f, _ = norms(m)
        w = np.linalg.eigvalsh(m)
        assert s == pytest.approx(np.max(np.abs(w)), rel=1e-12)
        assert s <= f + 1e-12 and f <= math.sqrt(8) * s + 1e-12
        v = rng.normal(size=8) + 1j * rng.normal(size=8)
        l1, l2 = np.sum(np.abs(v)), np.linalg.norm(v)
        assert l2 <= l1 + 1e-12 and l1 <= math.sqrt(8) * l2 + 1e-12


def test_norms_nonfinite():
    with pytest.raises(errors.NonFinite):
        norms(np.array([[np.nan, 0], [0, 1]]))


def test_euclid_diff_cases():
    zero, plus = StateVector.from_bits("0"), StateVector.from_amps([1, 1], normalize=True)
    assert euclid_diff(zero, zero) == 0.0
    assert euclid_diff(zero, StateVector.from_bits("1")) == pytest.approx(math.sqrt(2), abs=1e-12)
    direct = np.linalg.norm(np.array([1, 0]) - np.array([1, 1]) / math.sqrt(2))
    assert euclid_diff(zero, plus) == pytest.approx(direct, abs=1e-12)
    assert euclid_diff(zero, plus) == pytest.approx(math.sqrt(2 - math.sqrt(2)), abs=1e-12)
    with pytest.raises(errors.DimensionMismatch):
        euclid_diff(zero, StateVector.from_bits("00"))


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=60, deadline=None)
def test_euclid_identity(seed):
    rng = np.random.default_rng(seed)
    a, b = random_state(3, rng), random_state(3, rng)
    assert euclid_diff(a, b) == pytest.approx(math.sqrt(max(0.0, 2 - 2 * b.inner(a).real)), abs=1e-12)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 6))
@settings(max_examples=60, deadline=None)
def test_state_norm_invariant(seed, n):
    s = random_state(n, np.random.default_rng(seed))
    assert abs(np.sum(np.abs(s.amps) ** 2) - 1) <= 1e-12
    assert s.amps.size == 2 ** n


def test_state_rejects_bad_input():
    with pytest.raises(errors.InvalidState):
        StateVector(1, [1, 1])
    with pytest.raises(errors.InvalidState):
        StateVector(2, [1, 0])


def test_operator_hermitian_flag():
    with pytest.raises(errors.NotHermitian):
        DenseOperator.herm([[0, 1], [0, 0]])
    assert DenseOperator.herm(Z).n == 1


def test_eig_low_cases():
    lam, v = eig_low(DenseOperator.herm(np.eye(4)))
    assert lam == pytest.approx(1.0)
    lam, v = eig_low(DenseOperator.herm(np.diag([0, 0, 1, 1])))
    assert lam == pytest.approx(0.0)
    assert np.sum(np.abs(v.amps[2:]) ** 2) <= 1e-20
    # G(1,1) block: H^iX + H^I on (proof qubit) x span{|t-1>,|t>}
    from gsconkit.flux.analysis import residual_G
    assert residual_G(1, 1).lam_min == pytest.approx(2 - math.sqrt(2), abs=1e-12)
    with pytest.raises(errors.NotHermitian):
        eig_low(np.array([[0, 1], [0, 0]], dtype=complex))


@pytest.mark.parametrize("n", [3, 11])
def test_eig_low_residual(rng, n):
    m = random_hermitian(1 << n, rng)
    lam, v = eig_low(DenseOperator.herm(m))
    assert lam == pytest.approx(np.linalg.eigvalsh(m)[0], abs=1e-8)
    assert np.linalg.norm(m @ v.amps - lam * v.amps) <= 1e-9 * norms(m).spectral


def test_expm_minus_identity_bound(rng):
    for _ in range(100):
        d = int(rng.choice([2, 4, 8, 16]))
        h = random_hermitian(d, rng) * rng.uniform(0.01, 3)
        assert norms(expm(1j * h) - np.eye(d)).spectral <= norms(h).spectral + 1e-12


def test_approx_circuit_bound(rng):
    for _ in range(30):
        us = [random_unitary(4, rng) for _ in range(5)]
        vs = [u @ expm(1j * 0.05 * random_hermitian(4, rng)) for u in us]
        pu, pv = np.eye(4), np.eye(4)
        for u, v in zip(us, vs):
            pu, pv = u @ pu, v @ pv
        lhs = norms(pu - pv).spectral
        assert lhs <= sum(norms(u - v).spectral for u, v in zip(us, vs)) + 1e-12


def test_gate_pulse_annotation():
    g = LocalGate.rotation((0, 2), "XZ", 0.3)
    assert np.allclose(g.matrix, expm(0.3j * np.kron(X, Z)))
    with pytest.raises(errors.NotUnitary):
        LocalGate((0,), X, pulse=(0.3, "X"))
    with pytest.raises(errors.NotUnitary):
        LocalGate((0,), 2 * X)


def test_sequence_total_pulse_and_inverse(rng):
    gates = [LocalGate.rotation((i % 3,), "Y", 0.1 * (i - 2)) for i in range(5)]
    seq = GateSequence(3, gates)
    assert seq.total_pulse == pytest.approx(sum(abs(0.1 * (i - 2)) for i in range(5)), abs=1e-12)
    assert np.allclose(seq.inverse().unitary() @ seq.unitary(), np.eye(8))
    with pytest.raises(errors.IndexOutOfRange):
        GateSequence(2, [LocalGate((2,), X)])
