"""Dense linear algebra for small registers.

Bit ordering: qubit 0 is the most significant bit of a basis index, so on
three qubits ``|110>`` is index 6 and ``embed_local`` of a gate on qubits
``(0, 1)`` acts as ``G (x) I``.  Every module relies on this convention and
it is written into serialised files as ``"convention": "qubit0-msb"``.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np
import scipy.sparse.linalg as spla
from scipy.stats import unitary_group

from . import config, errors

PAULI_LETTERS = "IXYZ"

_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in _PAULI.values():
    _m.setflags(write=False)


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


def _qubits_of(dim: int) -> int:
    n = int(dim).bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise errors.DimensionMismatch(f"dimension {dim} is not a power of two")
    return n


def _check_dense(n: int) -> None:
    if n > config.current().dense_limit:
        raise errors.DenseLimitExceeded(f"{n} qubits exceeds dense limit {config.current().dense_limit}")


@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amps))
        object.__setattr__(self, "amps", amps)
        if amps.size != 1 << self.n:
            raise errors.InvalidState(f"expected {1 << self.n} amplitudes, got {amps.size}")
        if not np.all(np.isfinite(amps)):
            raise errors.NonFinite("state has non-finite amplitudes")
        err = abs(float(np.vdot(amps, amps).real) - 1.0)
        if err > config.current().tol.norm:
            raise errors.InvalidState(f"state norm deviates from 1 by {err:.3e}")

    @classmethod
    def from_amps(cls, amps, normalize: bool = False) -> "StateVector":
        a = np.asarray(amps, dtype=complex).ravel()
        if normalize:
            nrm = np.linalg.norm(a)
            if nrm == 0:
                raise errors.InvalidState("zero vector")
            a = a / nrm
        return cls(_qubits_of(a.size), a)

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        if not 0 <= index < 1 << n:
            raise errors.IndexOutOfRange(f"basis index {index} out of range for {n} qubits")
        a = np.zeros(1 << n, dtype=complex)
        a[index] = 1.0
        return cls(n, a)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        return cls.basis(len(bits), int(bits, 2) if bits else 0)

    @property
    def dim(self) -> int:
        return self.amps.size

    def inner(self, other: "StateVector") -> complex:
        """<self|other>."""
        _same_dim(self, other)
        return complex(np.vdot(self.amps, other.amps))

    def expectation(self, op) -> float:
        return expectation(op, self)


@dataclass(frozen=True, eq=False)
class DenseOperator:
    entries: np.ndarray
    hermitian: bool = False

    def __post_init__(self):
        m = _frozen(self.entries)
        object.__setattr__(self, "entries", m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise errors.DimensionMismatch(f"operator must be square, got shape {m.shape}")
        _check_dense(_qubits_of(m.shape[0]))
        if not np.all(np.isfinite(m)):
            raise errors.NonFinite("operator has non-finite entries")
        if self.hermitian:
            dev = float(np.max(np.abs(m - m.conj().T), initial=0.0))
            if dev > config.current().tol.hermitian:
                raise errors.NotHermitian(f"max |H - H^dagger| = {dev:.3e}")

    @classmethod
    def herm(cls, entries) -> "DenseOperator":
        return cls(entries, hermitian=True)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return _qubits_of(self.dim)


def _check_word(word: str) -> None:
    if not isinstance(word, str) or not word or any(c not in PAULI_LETTERS for c in word):
        raise errors.InvalidWord(f"bad Pauli word {word!r}")


@dataclass(frozen=True)
class PauliTerm:
    coeff: float
    word: str

    def __post_init__(self):
        _check_word(self.word)
        c = float(self.coeff)
        if not math.isfinite(c):
            raise errors.NonFinite("Pauli coefficient is not finite")
        object.__setattr__(self, "coeff", c)

    @property
    def n(self) -> int:
        return len(self.word)

    def matrix(self) -> np.ndarray:
        return self.coeff * pauli_word_matrix(self.word)


@dataclass(frozen=True, eq=False)
class LocalGate:
    """A gate on a few qubits.  ``pulse`` is ``(t, word)`` with ``word``
    written over the gate's own qubits, meaning ``matrix = exp(i t word)``."""

    qubits: tuple
    matrix: np.ndarray
    pulse: tuple | None = None

    def __post_init__(self):
        qs = tuple(int(q) for q in self.qubits)
        object.__setattr__(self, "qubits", qs)
        if not qs or len(set(qs)) != len(qs) or min(qs) < 0:
            raise errors.IndexOutOfRange(f"gate qubits must be distinct and nonnegative, got {qs}")
        m = _frozen(self.matrix)
        object.__setattr__(self, "matrix", m)
        d = 1 << len(qs)
        if m.shape != (d, d):
            raise errors.DimensionMismatch(f"gate on {len(qs)} qubits needs a {d}x{d} matrix, got {m.shape}")
        tol = config.current().tol
        dev = float(np.max(np.abs(m @ m.conj().T - np.eye(d))))
        if dev > tol.unitary:
            raise errors.NotUnitary(f"max |U U^dagger - I| = {dev:.3e}")
        if self.pulse is not None:
            t, word = float(self.pulse[0]), str(self.pulse[1])
            _check_word(word)
            if len(word) != len(qs):
                raise errors.InvalidWord(f"pulse word {word!r} does not match {len(qs)} gate qubits")
            dev = float(np.max(np.abs(m - pauli_rotation(word, t))))
            if dev > tol.pulse:
                raise errors.NotUnitary(f"gate matrix differs from exp(i t P) by {dev:.3e}")
            object.__setattr__(self, "pulse", (t, word))

    @classmethod
    def rotation(cls, qubits, word: str, t: float, check: bool = True) -> "LocalGate":
        if check:
            return cls(tuple(qubits), pauli_rotation(word, t), (t, word))
        # exp(i t P) is unitary and matches its pulse by construction
        g = object.__new__(cls)
        m = pauli_rotation(word, t)
        m.setflags(write=False)
        object.__setattr__(g, "qubits", tuple(qubits))
        object.__setattr__(g, "matrix", m)
        object.__setattr__(g, "pulse", (float(t), word))
        return g

    @property
    def arity(self) -> int:
        return len(self.qubits)

    def dagger(self) -> "LocalGate":
        pulse = None if self.pulse is None else (-self.pulse[0], self.pulse[1])
        return LocalGate(self.qubits, self.matrix.conj().T, pulse)


@dataclass(frozen=True, eq=False)
class GateSequence:
    n: int
    gates: tuple = ()
    total_pulse: float = field(init=False)

    def __post_init__(self):
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        for g in gates:
            if max(g.qubits) >= self.n:
                raise errors.IndexOutOfRange(f"gate on {g.qubits} outside {self.n}-qubit register")
        object.__setattr__(self, "total_pulse", sum(abs(g.pulse[0]) for g in gates if g.pulse is not None))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def then(self, other: "GateSequence") -> "GateSequence":
        if other.n != self.n:
            raise errors.DimensionMismatch("sequences act on different registers")
        return GateSequence(self.n, self.gates + other.gates)

    def inverse(self) -> "GateSequence":
        return GateSequence(self.n, tuple(g.dagger() for g in reversed(self.gates)))

    def max_arity(self) -> int:
        return max((g.arity for g in self.gates), default=0)

    def unitary(self) -> np.ndarray:
        """Dense product U_M ... U_1 (first gate applied first)."""
        _check_dense(self.n)
        u = np.eye(1 << self.n, dtype=complex)
        for g in self.gates:
            u = apply_gate(u, g, self.n)
        return u

    def apply(self, state: StateVector) -> StateVector:
        if state.n != self.n:
            raise errors.DimensionMismatch("state and sequence registers differ")
        a = state.amps
        for g in self.gates:
            a = apply_gate(a, g, self.n)
        return StateVector.from_amps(a, normalize=True)

    def trajectory(self, state: StateVector) -> Iterator[np.ndarray]:
        """Yield the amplitudes before the first gate and after every gate."""
        if state.n != self.n:
            raise errors.DimensionMismatch("state and sequence registers differ")
        a = state.amps
        yield a
        for g in self.gates:
            a = apply_gate(a, g, self.n)
            yield a


def pauli_matrix(letter: str) -> np.ndarray:
    if letter not in _PAULI:
        raise errors.InvalidWord(f"bad Pauli letter {letter!r}")
    return _PAULI[letter]


@functools.lru_cache(maxsize=4096)
def _word_matrix(word: str) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for c in word:
        m = np.kron(m, _PAULI[c])
    m.setflags(write=False)
    return m


def pauli_word_matrix(word: str) -> np.ndarray:
    _check_word(word)
    _check_dense(len(word))
    return _word_matrix(word)


def pauli_rotation(word: str, t: float) -> np.ndarray:
    """exp(i t P) = cos t I + i sin t P, exact since P^2 = I."""
    p = pauli_word_matrix(word)
    return math.cos(t) * np.eye(p.shape[0]) + 1j * math.sin(t) * p


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def apply_gate(amps: np.ndarray, gate: LocalGate, n: int) -> np.ndarray:
    """Apply ``gate`` to a state (1-d) or to every column of a 2-d array."""
    k = gate.arity
    lead = amps.shape[1:] if amps.ndim == 2 else ()
    t = amps.reshape((2,) * n + lead)
    t = np.moveaxis(t, gate.qubits, range(k))
    shape = t.shape
    t = (gate.matrix @ t.reshape(1 << k, -1)).reshape(shape)
    t = np.moveaxis(t, range(k), gate.qubits)
    return t.reshape(amps.shape)


def embed_local(gate: LocalGate, n: int) -> DenseOperator:
    if max(gate.qubits) >= n:
        raise errors.IndexOutOfRange(f"gate qubits {gate.qubits} outside {n}-qubit register")
    _check_dense(n)
    return DenseOperator(apply_gate(np.eye(1 << n, dtype=complex), gate, n))


def embed_word(word: str, qubits: Sequence[int], n: int) -> str:
    """Place a short Pauli word on ``qubits`` of an ``n``-qubit register."""
    out = ["I"] * n
    for q, c in zip(qubits, word):
        out[q] = c
    return "".join(out)


class Norms(NamedTuple):
    spectral: float
    frobenius: float
    trace: float


def _mat(op) -> np.ndarray:
    return op.entries if isinstance(op, DenseOperator) else np.asarray(op, dtype=complex)


def norms(op) -> Norms:
    m = _mat(op)
    if not np.all(np.isfinite(m)):
        raise errors.NonFinite("operator has non-finite entries")
    s = np.linalg.svd(m, compute_uv=False)
    return Norms(float(s.max(initial=0.0)), float(np.sqrt(np.sum(np.abs(m) ** 2))), float(s.sum()))


def spectral_norm(op) -> float:
    return float(np.linalg.norm(_mat(op), 2))


def _same_dim(a: StateVector, b: StateVector) -> None:
    if a.dim != b.dim:
        raise errors.DimensionMismatch(f"state dimensions {a.dim} and {b.dim} differ")


def euclid_diff(psi: StateVector, phi: StateVector) -> float:
    _same_dim(psi, phi)
    return float(np.linalg.norm(psi.amps - phi.amps))


def trace_distance(psi: StateVector, phi: StateVector) -> float:
    """Trace norm of |psi><psi| - |phi><phi|."""
    ov = abs(psi.inner(phi)) ** 2
    return 2.0 * math.sqrt(max(0.0, 1.0 - ov))


def expectation(op, state) -> float:
    a = state.amps if isinstance(state, StateVector) else np.asarray(state)
    return float(np.vdot(a, _mat(op) @ a).real)


def eig_low(op: DenseOperator) -> tuple[float, StateVector]:
    """Smallest eigenvalue and a unit eigenvector.

    Dense ``eigh`` up to ``2**dense_eig_limit``; Lanczos (ARPACK) above.
    """
    if not (isinstance(op, DenseOperator) and op.hermitian):
        op = DenseOperator.herm(_mat(op))
    m = op.entries
    cfg = config.current()
    if op.dim <= 1 << cfg.dense_eig_limit:
        w, v = np.linalg.eigh(m)
        lam, vec = float(w[0]), v[:, 0]
        scale = max(abs(float(w[0])), abs(float(w[-1])))
    else:
        try:
            w, v = spla.eigsh(m, k=1, which="SA", tol=cfg.tol.eig_residual * 1e-3, maxiter=50 * op.dim)
            top = spla.eigsh(m, k=1, which="LM", return_eigenvectors=False, maxiter=50 * op.dim)
        except spla.ArpackNoConvergence as exc:
            raise errors.NoConvergence(str(exc)) from exc
        lam, vec = float(w[0]), v[:, 0]
        scale = max(abs(lam), abs(float(top[0])))
    vec = vec / np.linalg.norm(vec)
    resid = float(np.linalg.norm(m @ vec - lam * vec))
    if resid > cfg.tol.eig_residual * max(scale, 1e-300) and resid > 1e-14:
        raise errors.NoConvergence(f"eigen-residual {resid:.3e}")
    return lam, StateVector.from_amps(vec)


def random_state(n: int, rng: np.random.Generator) -> StateVector:
    a = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector.from_amps(a, normalize=True)


def random_hermitian(dim: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)
