import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsconkit import errors, jsonio
from gsconkit import gscon as G
from gsconkit.flux import toy_circuit
from gsconkit.qcore import (
    DenseOperator, GateSequence, LocalGate, StateVector, embed_local, pauli_matrix, random_state, random_unitary,
)


def test_malformed_position():
    with pytest.raises(errors.MalformedInput, match="line 2, column"):
        jsonio.loads('{"a": 1,\n "b": }', "demo.json")


def test_missing_file():
    with pytest.raises(errors.MalformedInput):
        jsonio.load("/nonexistent/nothing.json")


def test_vector_forms():
    assert np.array_equal(jsonio.dec_vector([1, [0, 2]]), [1, 2j])
    with pytest.raises(errors.MalformedInput, match=r"amps\[1\]"):
        jsonio.dec_vector([1, "x"])


def test_matrix_forms():
    nested = [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]
    flat = [1, 0, 0, 1]
    assert np.array_equal(jsonio.dec_matrix(nested), np.eye(2))
    assert np.array_equal(jsonio.dec_matrix(flat), np.eye(2))
    with pytest.raises(errors.MalformedInput):
        jsonio.dec_matrix([1, 2, 3])


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_state_roundtrip(seed, n):
    psi = random_state(n, np.random.default_rng(seed))
    doc = json.loads(jsonio.dumps(jsonio.enc_state(psi)))
    assert np.array_equal(jsonio.dec_state(doc).amps, psi.amps)


def test_state_bits_and_norm():
    assert np.array_equal(jsonio.dec_state("10").amps, StateVector.from_bits("10").amps)
    with pytest.raises(errors.InvalidState):
        jsonio.dec_state({"amps": [1, 1]})
    assert jsonio.dec_state({"amps": [1, 1]}, normalize=True).amps[0] == pytest.approx(2 ** -0.5)


def test_hamiltonian_terms():
    doc = {"n": 2, "terms": [{"coeff": 0.5, "word": "ZI"}, {"coeff": 0.25, "word": "XX"}]}
    H = jsonio.dec_hamiltonian(doc)
    Z, X = pauli_matrix("Z"), pauli_matrix("X")
    assert np.allclose(H.entries, 0.5 * np.kron(Z, np.eye(2)) + 0.25 * np.kron(X, X))


def test_hamiltonian_projector_terms(rng):
    P = np.diag([0.0, 1.0])
    doc = {"n": 3, "terms": [{"weight": 2.0, "qubits": [2], "matrix": jsonio.enc_matrix(P)}]}
    H = jsonio.dec_hamiltonian(doc)
    assert np.allclose(H.entries, 2 * np.kron(np.eye(4), P))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_embed_matches_qcore(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    qs = tuple(int(q) for q in rng.choice(n, size=2, replace=False))
    U = random_unitary(4, rng)
    ref = embed_local(LocalGate(qs, U), n).entries
    assert np.allclose(jsonio._embed(U, qs, n, "t"), ref, atol=1e-14)


def test_hamiltonian_not_hermitian():
    with pytest.raises(errors.NotHermitian, match="hamiltonian"):
        jsonio.dec_hamiltonian({"matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]})


def test_sequence_roundtrip(rng):
    seq = GateSequence(3, (LocalGate.rotation((0, 2), "XZ", 0.3), LocalGate((1,), random_unitary(2, rng))))
    back = jsonio.dec_sequence(json.loads(jsonio.dumps(jsonio.enc_sequence(seq))))
    assert np.allclose(back.unitary(), seq.unitary())
    assert back.gates[0].pulse == (0.3, "XZ")


def test_sequence_pulse_only():
    doc = {"n": 1, "gates": [{"qubits": [0], "pulse": {"t": 0.5, "word": "X"}}]}
    seq = jsonio.dec_sequence(doc)
    assert np.allclose(seq.unitary(), np.cos(0.5) * np.eye(2) + 1j * np.sin(0.5) * pauli_matrix("X"))


def test_sequence_errors():
    with pytest.raises(errors.MalformedInput, match=r"gates\[0\]"):
        jsonio.dec_sequence({"n": 1, "gates": [{"qubits": [0]}]})
    with pytest.raises(errors.MalformedInput, match="convention"):
        jsonio.dec_sequence({"n": 1, "gates": [], "convention": "qubit0-lsb"})


def test_instance_roundtrip():
    H = DenseOperator(np.diag([0.0, 1.0, 1.0, 0.0]).astype(complex), hermitian=True)
    inst = G.GsconInstance(H, 2, 0.0, 0.5, 0.0, 0.5, 0.5, 2, 4, StateVector.from_bits("00"),
                           StateVector.from_bits("11"), ((0,), (1,)))
    back = jsonio.dec_instance(json.loads(jsonio.dumps(jsonio.enc_instance(inst))))
    assert np.array_equal(back.H.entries, H.entries)
    assert (back.k, back.l, back.m, back.bipartition) == (2, 2, 4, ((0,), (1,)))


def test_circuit_roundtrip():
    circ = toy_circuit()
    back = jsonio.dec_circuit(json.loads(jsonio.dumps(jsonio.enc_circuit(circ))))
    assert back.m == circ.m and back.proof_steps == circ.proof_steps
    assert back.acceptance("10") == pytest.approx(circ.acceptance("10"), abs=1e-15)


def test_circuit_bad_kind():
    with pytest.raises(errors.MalformedInput, match="kind"):
        jsonio.dec_circuit({"q": 1, "gates": [{"kind": "measure"}]})
