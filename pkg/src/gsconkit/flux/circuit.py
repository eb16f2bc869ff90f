"""Streaming verifier circuits.

A side register holds the ancillas (qubits ``0 .. q-1``, qubit 0 is the
output wire), the proof qubit (index ``q``) and a binary clock of
``c = bit_length(m)`` qubits.  Side basis index is ``reg * 2**c + clock``.

Proof gates carry no matrix: the prover chooses between ``I`` and ``iX``.
The uncompute gate repeats the choice made by its compute gate, so an
honest run returns the proof qubit to ``-|0>`` or ``|0>``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .. import errors
from ..qcore import LocalGate, apply_gate, pauli_matrix

COMPUTE = "compute"
PROOF_COMPUTE = "proof-compute"
PROOF_COPY = "proof-copy"
PROOF_UNCOMPUTE = "proof-uncompute"
KINDS = (COMPUTE, PROOF_COMPUTE, PROOF_COPY, PROOF_UNCOMPUTE)

IX = 1j * pauli_matrix("X")
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

MAX_ENUM_BITS = 12


@dataclass(frozen=True, eq=False)
class Step:
    kind: str
    qubits: tuple = ()
    matrix: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class StreamingCircuit:
    q: int
    steps: tuple

    def __post_init__(self):
        if self.q < 1:
            raise errors.InvalidCircuit("need at least one ancilla qubit")
        steps = tuple(self.steps)
        object.__setattr__(self, "steps", steps)
        q = self.q
        for i, s in enumerate(steps, start=1):
            if s.kind not in KINDS:
                raise errors.InvalidCircuit(f"step {i}: unknown kind {s.kind!r}")
            if s.kind == COMPUTE:
                if not s.qubits or len(s.qubits) > 2 or any(not 0 <= x < q for x in s.qubits):
                    raise errors.InvalidCircuit(f"step {i}: compute gates act on 1 or 2 ancilla qubits, got {s.qubits}")
                try:
                    LocalGate(s.qubits, s.matrix)
                except errors.GsconkitError as exc:
                    raise errors.InvalidCircuit(f"step {i}: {exc}") from None
            elif s.kind == PROOF_COPY:
                if len(s.qubits) != 2 or s.qubits[0] != q or not 0 <= s.qubits[1] < q:
                    raise errors.InvalidCircuit(f"step {i}: copy must be a CNOT from qubit {q} onto an ancilla")
            elif s.qubits not in ((), (q,)):
                raise errors.InvalidCircuit(f"step {i}: proof gates act only on the proof qubit {q}")
        # compute / copy / uncompute must come as an unbroken triple
        kinds = [s.kind for s in steps]
        i = 0
        while i < len(kinds):
            if kinds[i] == PROOF_COMPUTE:
                if kinds[i + 1:i + 3] != [PROOF_COPY, PROOF_UNCOMPUTE]:
                    raise errors.InvalidCircuit(f"step {i + 1}: proof-compute not followed by copy and uncompute")
                i += 3
            elif kinds[i] == COMPUTE:
                i += 1
            else:
                raise errors.InvalidCircuit(f"step {i + 1}: {kinds[i]} outside a proof phase")

    @property
    def m(self) -> int:
        return len(self.steps)

    @property
    def proof_steps(self) -> tuple:
        """Clock values (1-based) of proof gates: the set P."""
        return tuple(t for t, s in enumerate(self.steps, start=1) if s.kind in (PROOF_COMPUTE, PROOF_UNCOMPUTE))

    @property
    def n_proof_bits(self) -> int:
        return sum(s.kind == PROOF_COMPUTE for s in self.steps)

    @property
    def clock_bits(self) -> int:
        return max(1, self.m.bit_length())

    @property
    def reg_qubits(self) -> int:
        return self.q + 1

    @property
    def side_qubits(self) -> int:
        return self.reg_qubits + self.clock_bits

    @property
    def side_dim(self) -> int:
        return 1 << self.side_qubits

    def bit_of(self, t: int) -> int:
        """Index of the proof bit consumed by proof step ``t``."""
        s = self.steps[t - 1]
        if s.kind not in (PROOF_COMPUTE, PROOF_UNCOMPUTE):
            raise errors.InputError(f"step {t} is not a proof gate")
        upto = t if s.kind == PROOF_COMPUTE else t - 2
        return sum(x.kind == PROOF_COMPUTE for x in self.steps[:upto]) - 1

    def gate(self, t: int, choice: np.ndarray | None = None) -> LocalGate:
        """Step ``t`` as a gate on the register; proof steps need ``choice``."""
        s = self.steps[t - 1]
        if s.kind == COMPUTE:
            return LocalGate(s.qubits, s.matrix)
        if s.kind == PROOF_COPY:
            return LocalGate(s.qubits, CNOT)
        if choice is None:
            raise errors.InputError(f"step {t} is a proof gate; a 2x2 choice is required")
        return LocalGate((self.q,), choice)

    def register_unitary(self, t: int, choice: np.ndarray | None = None) -> np.ndarray:
        n = self.reg_qubits
        return apply_gate(np.eye(1 << n, dtype=complex), self.gate(t, choice), n)

    def check_proof(self, y: str) -> str:
        if len(y) != self.n_proof_bits or set(y) - {"0", "1"}:
            raise errors.ProofLengthMismatch(f"proof must be {self.n_proof_bits} bits, got {y!r}")
        return y

    def choices(self, y: str) -> dict:
        """Proof step -> 2x2 gate for the streamed bits ``y``."""
        self.check_proof(y)
        eye = np.eye(2, dtype=complex)
        return {t: IX if y[self.bit_of(t)] == "1" else eye for t in self.proof_steps}

    def run(self, y: str, upto: int | None = None) -> np.ndarray:
        """Register state after ``upto`` steps (default all) from |0...0>."""
        ch = self.choices(y)
        n = self.reg_qubits
        amps = np.zeros(1 << n, dtype=complex)
        amps[0] = 1.0
        for t in range(1, (self.m if upto is None else upto) + 1):
            amps = apply_gate(amps, self.gate(t, ch.get(t)), n)
        return amps

    def acceptance(self, y: str) -> float:
        """Probability that the output wire (qubit 0) reads 1."""
        amps = self.run(y)
        half = amps.size // 2
        return float(np.sum(np.abs(amps[half:]) ** 2))

    def max_acceptance(self) -> tuple:
        """(best acceptance, best proof) by enumerating every proof."""
        k = self.n_proof_bits
        if k > MAX_ENUM_BITS:
            raise errors.InputError(f"{k} proof bits is too many to enumerate")
        best, arg = -1.0, ""
        for bits in itertools.product("01", repeat=k):
            y = "".join(bits)
            p = self.acceptance(y)
            if p > best + 1e-15:
                best, arg = p, y
        return best, arg


def _cry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    u = np.eye(4, dtype=complex)
    u[2:, 2:] = [[c, -s], [s, c]]
    return u


def toy_circuit(alpha: float = 0.9, rounds: int = 2) -> StreamingCircuit:
    """Two ancillas; the first streamed bit, copied to ancilla 1, controls a
    rotation of the output wire that accepts with probability ``alpha``.
    Later rounds stream bits that are copied but ignored.  ``m = 4 * rounds - 1``.
    """
    if not 0 <= alpha <= 1 or rounds < 1:
        raise errors.InputError("need 0 <= alpha <= 1 and at least one round")
    theta = 2 * math.asin(math.sqrt(alpha))
    steps = []
    for r in range(rounds):
        if r:
            steps.append(Step(COMPUTE, (1, 0), _cry(theta)) if r == 1 else Step(COMPUTE, (1,), np.eye(2)))
        steps += [Step(PROOF_COMPUTE), Step(PROOF_COPY, (2, 1)), Step(PROOF_UNCOMPUTE)]
    if rounds == 1:
        steps.append(Step(COMPUTE, (1, 0), _cry(theta)))
    return StreamingCircuit(2, tuple(steps))


def identity_chain(s: int, q: int = 1) -> StreamingCircuit:
    """``s`` identity compute steps and no proof."""
    return StreamingCircuit(q, tuple(Step(COMPUTE, (0,), np.eye(2)) for _ in range(s)))
