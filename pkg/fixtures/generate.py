"""Regenerate the JSON and CNF fixtures: ``python3 fixtures/generate.py``."""
import itertools
import os

import numpy as np

from gsconkit import gscon as G
from gsconkit import jsonio
from gsconkit.flux import toy_circuit
from gsconkit.qcore import DenseOperator, GateSequence, LocalGate, StateVector, pauli_matrix

HERE = os.path.dirname(os.path.abspath(__file__))


def write(name, doc):
    with open(os.path.join(HERE, name), "w", encoding="utf-8") as fh:
        fh.write(jsonio.dumps(doc) if not isinstance(doc, str) else doc)


def random_cnf(rng, nvars, nclauses):
    while True:
        clauses = []
        for _ in range(nclauses):
            vs = rng.choice(nvars, size=3, replace=False) + 1
            clauses.append(tuple(int(v) * int(rng.choice([-1, 1])) for v in vs))
        sols = [s for s in ("".join(b) for b in itertools.product("01", repeat=nvars)) if G.satisfies(clauses, s)]
        if len(sols) >= 2:
            return clauses, sols


def cnf_text(nvars, clauses, x, y):
    return f"c x {x}\nc y {y}\n" + G.to_dimacs(nvars, clauses)


def main():
    rng = np.random.default_rng(7)
    # hand-made: 011 reaches 101 through 111
    write("cnf/tiny.cnf", cnf_text(3, [(1, 2), (-1, 3)], "011", "101"))
    # x1 xor-like split: only 00 and 11 satisfy, so they are not connected by single flips
    write("cnf/split.cnf", cnf_text(2, [(1, -2), (-1, 2)], "00", "11"))
    for nvars, nclauses in ((6, 12), (8, 20), (10, 30), (12, 40)):
        clauses, sols = random_cnf(rng, nvars, nclauses)
        x = sols[0]
        # farthest solution in x's component, so every random fixture is connected
        far = max((s for s in sols[1:] if G.stconn_solve(G.StConnInstance(nvars, clauses, x, s)) is not None),
                  key=lambda s: sum(a != b for a, b in zip(x, s)), default=sols[-1])
        write(f"cnf/random{nvars}.cnf", cnf_text(nvars, clauses, x, far))

    # two-qubit Hamiltonian with spectrum {0.05, 0.45, 0.55, 0.95}
    write("hamiltonian_2q.json", {"n": 2, "terms": [
        {"coeff": 0.5, "word": "II"}, {"coeff": -0.25, "word": "ZZ"}, {"coeff": 0.2, "word": "XX"}]})
    write("psi_2q.json", jsonio.enc_state(StateVector.from_bits("00")))
    write("phi_2q.json", jsonio.enc_state(StateVector.from_bits("11")))
    s = 1 / np.sqrt(2)
    write("path_states.json", {"states": [jsonio.enc_state(StateVector.from_bits("00")),
                                          jsonio.enc_state(StateVector.from_amps([s, s, 0, 0])),
                                          jsonio.enc_state(StateVector.from_bits("11"))]})

    # l = 2 instance on three qubits, penalising odd parity
    Z = pauli_matrix("Z")
    zzz = np.kron(np.kron(Z, Z), Z)
    H = DenseOperator((np.eye(8) - zzz) / 2, hermitian=True)
    inst = G.GsconInstance(H, 3, 0.0, 0.5, 0.0, 0.5, 0.5, 2, 4, StateVector.from_bits("000"),
                           StateVector.from_bits("110"))
    write("instance_l2.json", jsonio.enc_instance(inst))
    X = pauli_matrix("X")
    write("sequence_2local.json", jsonio.enc_sequence(GateSequence(3, (LocalGate((0, 1), np.kron(X, X)),))))
    write("sequence_3local.json", jsonio.enc_sequence(
        GateSequence(3, (LocalGate((0, 1, 2), np.kron(np.kron(X, X), np.eye(2))),))))

    # GO-register reduction input: A on one qubit, witness prepares |1>
    write("lh_A.json", {"matrix": jsonio.enc_matrix(np.diag([0.75, 0.25]))})
    write("lh_witness.json", jsonio.enc_sequence(GateSequence(1, (LocalGate((0,), X),))))

    write("toy_circuit.json", jsonio.enc_circuit(toy_circuit()))
    write("malformed.json", '{"n": 2,\n "terms": [\n   {"coeff": 0.5 "word": "II"}\n ]\n}\n')


if __name__ == "__main__":
    main()
