"""JSON encodings.

Complex numbers are ``[re, im]`` pairs; matrices are row-major lists of
rows.  Every top-level document carries ``"convention": "qubit0-msb"``.
Decoding errors raise :class:`MalformedInput` naming the offending field,
or the line and column for unparsable text.
"""
from __future__ import annotations

import json
import math
from typing import Any

import numpy as np

from . import BIT_ORDER, errors
from .gscon import GsconInstance
from .qcore import DenseOperator, GateSequence, LocalGate, StateVector, pauli_word_matrix
from .flux.circuit import KINDS, Step, StreamingCircuit
from .flux.hamiltonian import EmbeddedHamiltonian, SideProjector


def loads(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise errors.MalformedInput(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise errors.MalformedInput(f"{path}: {exc.strerror}") from None
    return loads(text, path)


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------- primitives

def _num(x: complex) -> list:
    x = complex(x)
    return [float(x.real), float(x.imag)]


def enc_vector(v) -> list:
    return [_num(x) for x in np.ravel(v)]


def enc_matrix(m) -> list:
    return [[_num(x) for x in row] for row in np.asarray(m)]


def _field(doc, key, where):
    if not isinstance(doc, dict):
        raise errors.MalformedInput(f"{where}: expected an object")
    if key not in doc:
        raise errors.MalformedInput(f"{where}: missing field {key!r}")
    return doc[key]


def _scalar(x, where) -> complex:
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise errors.MalformedInput(f"{where}: expected a number or [re, im] pair, got {x!r}")


def dec_vector(doc, where="amps") -> np.ndarray:
    if not isinstance(doc, list):
        raise errors.MalformedInput(f"{where}: expected a list")
    return np.array([_scalar(x, f"{where}[{i}]") for i, x in enumerate(doc)], dtype=complex)


def dec_matrix(doc, where="matrix") -> np.ndarray:
    if not isinstance(doc, list) or not doc:
        raise errors.MalformedInput(f"{where}: expected a non-empty list of rows")
    if all(isinstance(r, list) and r and isinstance(r[0], list) for r in doc) or \
            all(isinstance(r, list) and len(r) != 2 for r in doc):
        rows = [dec_vector(r, f"{where}[{i}]") for i, r in enumerate(doc)]
        if len({r.size for r in rows}) != 1:
            raise errors.MalformedInput(f"{where}: rows have different lengths")
        return np.array(rows)
    # flat row-major list of entries
    flat = dec_vector(doc, where)
    d = math.isqrt(flat.size)
    if d * d != flat.size:
        raise errors.MalformedInput(f"{where}: {flat.size} entries is not a square matrix")
    return flat.reshape(d, d)


def _checked(fn, where):
    try:
        return fn()
    except errors.MalformedInput:
        raise
    except errors.GsconkitError as exc:
        raise type(exc)(f"{where}: {exc}") from None


# ---------------------------------------------------------------- core objects

def enc_state(s: StateVector) -> dict:
    return {"convention": BIT_ORDER, "n": s.n, "amps": enc_vector(s.amps)}


def dec_state(doc, where="state", normalize: bool = False) -> StateVector:
    if isinstance(doc, str):
        bits = doc.strip()
        if not bits or set(bits) - {"0", "1"}:
            raise errors.MalformedInput(f"{where}: bit string expected, got {doc!r}")
        return StateVector.from_bits(bits)
    amps = dec_vector(_field(doc, "amps", where), f"{where}.amps")
    return _checked(lambda: StateVector.from_amps(amps, normalize=normalize), where)


def enc_operator(op) -> dict:
    m = op.entries if isinstance(op, DenseOperator) else np.asarray(op)
    return {"convention": BIT_ORDER, "n": int(m.shape[0]).bit_length() - 1, "matrix": enc_matrix(m)}


def dec_hamiltonian(doc, where="hamiltonian") -> DenseOperator:
    """Dense ``matrix``, or ``terms`` of Pauli words (``coeff``, ``word``) or
    local projectors (``weight``, ``qubits``, ``matrix``) on ``n`` qubits."""
    if isinstance(doc, dict) and "matrix" in doc:
        m = dec_matrix(doc["matrix"], f"{where}.matrix")
        return _checked(lambda: DenseOperator(m, hermitian=True), where)
    terms = _field(doc, "terms", where)
    if not isinstance(terms, list) or not terms:
        raise errors.MalformedInput(f"{where}.terms: expected a non-empty list")
    n = doc.get("n")
    total = None
    for i, t in enumerate(terms):
        w = f"{where}.terms[{i}]"
        if isinstance(t, dict) and "word" in t:
            word = t["word"]
            if not isinstance(word, str):
                raise errors.MalformedInput(f"{w}.word: expected a string")
            m = _scalar(t.get("coeff", 1.0), f"{w}.coeff") * _checked(lambda: pauli_word_matrix(word), w)
        else:
            qs = _field(t, "qubits", w)
            if n is None:
                raise errors.MalformedInput(f"{where}: projector terms need a top-level 'n'")
            local = dec_matrix(_field(t, "matrix", w), f"{w}.matrix")
            g = _embed(local, qs, int(n), w)
            m = _scalar(t.get("weight", 1.0), f"{w}.weight") * g
        if total is not None and m.shape != total.shape:
            raise errors.MalformedInput(f"{w}: size {m.shape} differs from earlier terms")
        total = m if total is None else total + m
    return _checked(lambda: DenseOperator(total, hermitian=True), where)


def _embed(local: np.ndarray, qubits, n: int, where: str) -> np.ndarray:
    qs = [int(q) for q in qubits]
    k = len(qs)
    if local.shape != (1 << k, 1 << k) or len(set(qs)) != k or any(not 0 <= q < n for q in qs):
        raise errors.MalformedInput(f"{where}: matrix size or qubits {qs} do not fit {n} qubits")
    t = local.reshape((2,) * (2 * k))
    eye = np.eye(1 << n).reshape((2,) * (2 * n))
    # contract the local operator into the identity on the chosen qubits
    out = np.tensordot(t, eye, axes=(list(range(k, 2 * k)), qs))
    out = np.moveaxis(out, list(range(k)), qs)
    return out.reshape(1 << n, 1 << n)


def enc_sequence(seq: GateSequence) -> dict:
    gates = []
    for g in seq.gates:
        d = {"qubits": list(g.qubits), "matrix": enc_matrix(g.matrix)}
        if g.pulse is not None:
            d["pulse"] = {"t": g.pulse[0], "word": g.pulse[1]}
        gates.append(d)
    return {"convention": BIT_ORDER, "n": seq.n, "gates": gates}


def dec_sequence(doc, where="sequence") -> GateSequence:
    n = _field(doc, "n", where)
    if not isinstance(n, int) or n < 1:
        raise errors.MalformedInput(f"{where}.n: expected a positive integer")
    conv = doc.get("convention", BIT_ORDER)
    if conv != BIT_ORDER:
        raise errors.MalformedInput(f"{where}.convention: unsupported {conv!r}")
    raw = _field(doc, "gates", where)
    if not isinstance(raw, list):
        raise errors.MalformedInput(f"{where}.gates: expected a list")
    gates = []
    for i, g in enumerate(raw):
        w = f"{where}.gates[{i}]"
        qs = _field(g, "qubits", w)
        if not isinstance(qs, list) or not all(isinstance(q, int) for q in qs):
            raise errors.MalformedInput(f"{w}.qubits: expected a list of integers")
        pulse = g.get("pulse")
        if "matrix" in g:
            m = dec_matrix(g["matrix"], f"{w}.matrix")
            p = None if pulse is None else (float(_field(pulse, "t", f"{w}.pulse")), _field(pulse, "word", f"{w}.pulse"))
            gates.append(_checked(lambda: LocalGate(tuple(qs), m, p), w))
        elif pulse is not None:
            t, word = float(_field(pulse, "t", f"{w}.pulse")), _field(pulse, "word", f"{w}.pulse")
            gates.append(_checked(lambda: LocalGate.rotation(tuple(qs), word, t), w))
        else:
            raise errors.MalformedInput(f"{w}: needs 'matrix' or 'pulse'")
    return _checked(lambda: GateSequence(n, tuple(gates)), where)


# ---------------------------------------------------------------- instances

def enc_instance(inst: GsconInstance) -> dict:
    d = {
        "convention": BIT_ORDER,
        "hamiltonian": enc_operator(inst.H),
        "k": inst.k, "l": inst.l, "m": inst.m,
        "eta1": inst.eta1, "eta2": inst.eta2, "eta3": inst.eta3, "eta4": inst.eta4, "delta": inst.delta,
        "psi": enc_state(inst.psi), "phi": enc_state(inst.phi),
    }
    if inst.bipartition is not None:
        d["bipartition"] = [list(inst.bipartition[0]), list(inst.bipartition[1])]
    return d


def dec_instance(doc, where="instance") -> GsconInstance:
    H = dec_hamiltonian(_field(doc, "hamiltonian", where), f"{where}.hamiltonian")
    vals = {}
    for key in ("eta1", "eta2", "eta3", "eta4", "delta"):
        v = _field(doc, key, where)
        if not isinstance(v, (int, float)):
            raise errors.MalformedInput(f"{where}.{key}: expected a number")
        vals[key] = float(v)
    for key in ("k", "l"):
        v = _field(doc, key, where)
        if not isinstance(v, int):
            raise errors.MalformedInput(f"{where}.{key}: expected an integer")
        vals[key] = v
    m = doc.get("m")
    if m is not None and not isinstance(m, int):
        raise errors.MalformedInput(f"{where}.m: expected an integer or null")
    psi = dec_state(_field(doc, "psi", where), f"{where}.psi")
    phi = dec_state(_field(doc, "phi", where), f"{where}.phi")
    bip = doc.get("bipartition")
    return _checked(lambda: GsconInstance(H, vals["k"], vals["eta1"], vals["eta2"], vals["eta3"], vals["eta4"],
                                          vals["delta"], vals["l"], m, psi, phi,
                                          None if bip is None else tuple(bip)), where)


def enc_circuit(circ: StreamingCircuit) -> dict:
    gates = []
    for s in circ.steps:
        d = {"kind": s.kind}
        if s.qubits:
            d["qubits"] = list(s.qubits)
        if s.matrix is not None:
            d["matrix"] = enc_matrix(s.matrix)
        gates.append(d)
    return {"convention": BIT_ORDER, "q": circ.q, "gates": gates}


def dec_circuit(doc, where="circuit") -> StreamingCircuit:
    q = _field(doc, "q", where)
    if not isinstance(q, int):
        raise errors.MalformedInput(f"{where}.q: expected an integer")
    raw = _field(doc, "gates", where)
    if not isinstance(raw, list):
        raise errors.MalformedInput(f"{where}.gates: expected a list")
    steps = []
    for i, g in enumerate(raw):
        w = f"{where}.gates[{i}]"
        kind = _field(g, "kind", w)
        if kind not in KINDS:
            raise errors.MalformedInput(f"{w}.kind: {kind!r} is not one of {', '.join(KINDS)}")
        qs = tuple(g.get("qubits", ()))
        m = dec_matrix(g["matrix"], f"{w}.matrix") if "matrix" in g else None
        steps.append(Step(kind, qs, m))
    return _checked(lambda: StreamingCircuit(q, tuple(steps)), where)


def _enc_side(p: SideProjector | None):
    if p is None:
        return None
    d = {"kind": p.kind, "label": p.label}
    if p.kind == "hop":
        d["t"] = p.t
    return d


def enc_embedded(H: EmbeddedHamiltonian) -> dict:
    th = H.thresholds
    return {
        "convention": BIT_ORDER,
        "circuit": enc_circuit(H.circ),
        "side_qubits": H.side_qubits,
        "bipartition": [list(H.bipartition[0]), list(H.bipartition[1])],
        "weights": dict(H.weights),
        "thresholds": None if th is None else th._asdict(),
        "terms": [{"label": t.label, "weight": t.weight, "sym": t.sym,
                   "left": _enc_side(t.left), "right": _enc_side(t.right)} for t in H.terms],
    }
