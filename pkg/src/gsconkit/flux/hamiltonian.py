"""Two-copy circuit Hamiltonian built from weighted projectors.

Every term is ``weight * (A_L (x) B_R)`` with ``A`` and ``B`` side
projectors (``None`` meaning identity), or the antisymmetric projector
``(I - SWAP) / 2`` across the cut.  Full basis index is ``iL * D + iR``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .. import errors
from ..qcore import StateVector, apply_gate
from .circuit import IX, StreamingCircuit

DEFAULT_WEIGHTS = {"in": 10.0, "prop": 10.0, "sym": 100.0}

IN, OUT, HOP = "in", "out", "hop"


@dataclass(frozen=True, eq=False)
class SideProjector:
    """Projector on one side register.

    ``in``: clock 0 with any nonzero ancilla or proof bit.
    ``out``: clock m with the output wire reading 0.
    ``hop``: ``H_t / 2`` for register unitary ``V`` between clocks t-1 and t.
    """

    kind: str
    circ: StreamingCircuit
    t: int = 0
    V: np.ndarray | None = field(default=None, repr=False)
    label: str = ""

    def _shape(self) -> tuple:
        return 1 << self.circ.reg_qubits, 1 << self.circ.clock_bits

    def apply(self, amps: np.ndarray) -> np.ndarray:
        """Projector applied to side vectors (last axis has length D)."""
        R, C = self._shape()
        lead = amps.shape[:-1]
        x = amps.reshape(lead + (R, C))
        out = np.zeros_like(x)
        if self.kind == IN:
            out[..., 1:, 0] = x[..., 1:, 0]
        elif self.kind == OUT:
            out[..., : R // 2, self.circ.m] = x[..., : R // 2, self.circ.m]
        else:
            t, V = self.t, self.V
            a, b = x[..., :, t - 1], x[..., :, t]
            out[..., :, t - 1] = 0.5 * (a - b @ V.conj())
            out[..., :, t] = 0.5 * (b - a @ V.T)
        return out.reshape(amps.shape)

    def expectation(self, amps: np.ndarray) -> float:
        return float(np.vdot(amps, self.apply(amps)).real)

    def row(self, j: int) -> dict:
        """Nonzero entries of row ``j`` as {column: value}."""
        R, C = self._shape()
        reg, clk = divmod(j, C)
        if self.kind == IN:
            return {j: 1.0} if clk == 0 and reg != 0 else {}
        if self.kind == OUT:
            return {j: 1.0} if clk == self.circ.m and reg < R // 2 else {}
        t, V = self.t, self.V
        if clk == t:
            other, vals = t - 1, -0.5 * V[reg, :]
        elif clk == t - 1:
            other, vals = t, -0.5 * V[:, reg].conj()
        else:
            return {}
        out = {j: 0.5}
        for r2 in np.flatnonzero(vals):
            out[int(r2) * C + other] = complex(vals[r2])
        return out

    def matrix(self) -> sp.csr_matrix:
        """Sparse matrix from Kronecker products, independent of ``row``."""
        R, C = self._shape()
        if self.kind == IN:
            reg = sp.eye(R, format="csr").tolil()
            reg[0, 0] = 0
            return sp.kron(reg, _ket(C, 0, 0), format="csr")
        if self.kind == OUT:
            reg = sp.diags([1.0] * (R // 2) + [0.0] * (R // 2))
            return sp.kron(reg, _ket(C, self.circ.m, self.circ.m), format="csr")
        t, V = self.t, sp.csr_matrix(self.V)
        eye = sp.eye(R)
        h = (sp.kron(eye, _ket(C, t, t) + _ket(C, t - 1, t - 1))
             - sp.kron(V, _ket(C, t, t - 1)) - sp.kron(V.conj().T, _ket(C, t - 1, t)))
        return (0.5 * h).tocsr()

    def dense(self) -> np.ndarray:
        return self.matrix().toarray()


def _ket(C: int, i: int, j: int) -> sp.csr_matrix:
    return sp.csr_matrix(([1.0], ([i], [j])), shape=(C, C))


class KitaevTerms(NamedTuple):
    """Single-copy pieces.  ``H_in`` and ``H_out`` are projectors, each
    ``H_t`` equals twice the projector stored in ``hops[t-1]``."""

    H_in: SideProjector
    H_out: SideProjector
    hops: tuple

    def H_t(self, t: int) -> np.ndarray:
        return 2 * self.hops[t - 1].dense()

    def H_prop(self) -> np.ndarray:
        return sum(2 * h.dense() for h in self.hops)


def hop(circ: StreamingCircuit, t: int, choice: np.ndarray | None = None, label: str = "") -> SideProjector:
    if not 1 <= t <= circ.m:
        raise errors.IndexOutOfRange(f"time step {t} not in 1..{circ.m}")
    return SideProjector(HOP, circ, t, circ.register_unitary(t, choice), label or f"H_{t}")


def build_kitaev_terms(circ: StreamingCircuit, y: str | None = None) -> KitaevTerms:
    """Clock terms; proof steps use the gates chosen by ``y`` (all ``I`` if omitted)."""
    if not isinstance(circ, StreamingCircuit):
        raise errors.InvalidCircuit("expected a StreamingCircuit")
    ch = circ.choices(y if y is not None else "0" * circ.n_proof_bits)
    hops = tuple(hop(circ, t, ch.get(t)) for t in range(1, circ.m + 1))
    return KitaevTerms(SideProjector(IN, circ, label="H_in"), SideProjector(OUT, circ, label="H_out"), hops)


@dataclass(frozen=True, eq=False)
class Term:
    weight: float
    left: SideProjector | None
    right: SideProjector | None
    label: str
    sym: bool = False

    def value(self, a: np.ndarray, b: np.ndarray) -> float:
        """<a (x) b| projector |a (x) b> for unit side vectors."""
        if self.sym:
            return 0.5 * (1.0 - abs(np.vdot(a, b)) ** 2)
        va = 1.0 if self.left is None else self.left.expectation(a)
        vb = 1.0 if self.right is None else self.right.expectation(b)
        return va * vb


class Thresholds(NamedTuple):
    alpha: float
    beta: float
    r: int
    M: int
    alpha_prime: float
    beta_prime: float


def thresholds(alpha: float, beta: float, m: int, r: int) -> Thresholds:
    if alpha - beta < 2.0 ** -r - 1e-15:
        raise errors.InvalidThresholds(f"alpha - beta = {alpha - beta:.4g} < 2^-{r}")
    M = (m + 1) * 2 ** r
    return Thresholds(alpha, beta, r, M, 2 * (1 - alpha) / (m + 1), 2 * (1 - beta) / (m + 1) - 1 / M)


@dataclass(frozen=True, eq=False)
class EmbeddedHamiltonian:
    circ: StreamingCircuit
    terms: tuple
    weights: dict
    thresholds: Thresholds | None = None

    @property
    def side_qubits(self) -> int:
        return self.circ.side_qubits

    @property
    def n(self) -> int:
        return 2 * self.side_qubits

    @property
    def side_dim(self) -> int:
        return self.circ.side_dim

    @property
    def dim(self) -> int:
        return self.side_dim ** 2

    @property
    def bipartition(self) -> tuple:
        s = self.side_qubits
        return tuple(range(s)), tuple(range(s, 2 * s))

    @property
    def total_weight(self) -> float:
        return float(sum(t.weight for t in self.terms))

    def select(self, *labels: str) -> "EmbeddedHamiltonian":
        """Sub-Hamiltonian of the terms whose label starts with one of ``labels``."""
        keep = tuple(t for t in self.terms if t.label.startswith(labels))
        return EmbeddedHamiltonian(self.circ, keep, self.weights, self.thresholds)

    def sparse(self) -> sp.csr_matrix:
        """Full matrix assembled term by term from Kronecker products."""
        D = self.side_dim
        eye = sp.eye(D, format="csr")
        total = sp.csr_matrix((D * D, D * D), dtype=complex)
        swap = None
        for term in self.terms:
            if term.sym:
                if swap is None:
                    idx = np.arange(D * D)
                    a, b = divmod(idx, D)
                    swap = sp.csr_matrix((np.ones(D * D), (idx, b * D + a)), shape=(D * D, D * D))
                total = total + term.weight * 0.5 * (sp.eye(D * D) - swap)
                continue
            A = eye if term.left is None else term.left.matrix()
            B = eye if term.right is None else term.right.matrix()
            total = total + term.weight * sp.kron(A, B)
        return total.tocsr()

    def side_matrices(self) -> list:
        """(weight, left dense or None, right dense or None, sym flag) per term."""
        out = []
        for t in self.terms:
            out.append((t.weight, None if t.left is None else t.left.dense(),
                        None if t.right is None else t.right.dense(), t.sym))
        return out


def build_flux_hamiltonian(circ: StreamingCircuit, weights: dict | None = None,
                           alpha: float | None = None, beta: float | None = None,
                           r: int = 1) -> EmbeddedHamiltonian:
    """Weighted sum of 2m + 5 projector terms.

    ``alpha`` defaults to the best acceptance over all proofs, ``beta`` to
    ``alpha - 2**-r`` (floored at 0 with ``r`` raised to fit).
    """
    w = dict(DEFAULT_WEIGHTS)
    if weights:
        unknown = set(weights) - set(w)
        if unknown:
            raise errors.InputError(f"unknown weight names {sorted(unknown)}")
        w.update({k: float(v) for k, v in weights.items()})
    for k, v in w.items():
        if not v > 0 or not math.isfinite(v):
            raise errors.WeightNonPositive(f"weight {k} = {v} must be positive")
    kt = build_kitaev_terms(circ)
    terms = [Term(w["in"], kt.H_in, None, "in:L"), Term(w["in"], None, kt.H_in, "in:R")]
    P = set(circ.proof_steps)
    eye = np.eye(2, dtype=complex)
    for t in range(1, circ.m + 1):
        if t in P:
            hI, hX = hop(circ, t, eye, f"H_{t}^I"), hop(circ, t, IX, f"H_{t}^iX")
            # (H^I)(x)(H^iX) with H = 2 * projector gives weight 4
            terms.append(Term(4 * w["prop"], hI, hX, f"prop:{t}:I|iX"))
            terms.append(Term(4 * w["prop"], hX, hI, f"prop:{t}:iX|I"))
        else:
            h = kt.hops[t - 1]
            terms.append(Term(2 * w["prop"], h, None, f"prop:{t}:L"))
            terms.append(Term(2 * w["prop"], None, h, f"prop:{t}:R"))
    terms += [Term(1.0, kt.H_out, None, "out:L"), Term(1.0, None, kt.H_out, "out:R")]
    terms.append(Term(w["sym"], None, None, "sym", sym=True))
    if alpha is None:
        alpha = circ.max_acceptance()[0]
    if beta is None:
        while alpha - 2.0 ** -r < 0:
            r += 1
        beta = alpha - 2.0 ** -r
    return EmbeddedHamiltonian(circ, tuple(terms), w, thresholds(alpha, beta, circ.m, r))


def row_oracle(H: EmbeddedHamiltonian, i: int) -> list:
    """Sorted nonzero (column, value) pairs of row ``i``, computed without the matrix."""
    D = H.side_dim
    if not 0 <= int(i) < D * D:
        raise errors.IndexOutOfRange(f"row {i} outside 0..{D * D - 1}")
    iL, iR = divmod(int(i), D)
    acc: dict = {}
    cache: dict = {}

    def side(p, j):
        if p is None:
            return {j: 1.0}
        key = (id(p), j)
        if key not in cache:
            cache[key] = p.row(j)
        return cache[key]

    for term in H.terms:
        if term.sym:
            acc[i] = acc.get(i, 0) + term.weight / 2
            sw = iR * D + iL
            acc[sw] = acc.get(sw, 0) - term.weight / 2
            continue
        left, right = side(term.left, iL), side(term.right, iR)
        if not left or not right:
            continue
        for cL, vL in left.items():
            for cR, vR in right.items():
                c = cL * D + cR
                acc[c] = acc.get(c, 0) + term.weight * vL * vR
    return sorted((c, complex(v)) for c, v in acc.items() if v != 0)


def row_nnz_bound(H: EmbeddedHamiltonian) -> int:
    """Nonzeros allowed per row: each side row touches its own clock value
    and at most 4 register states on each neighbouring clock value (gates
    are at most 2-local), squared across the cut, plus one swap partner."""
    per_side = 1 + 2 * 4
    return per_side ** 2 + 1


def history_state(circ: StreamingCircuit, y: str) -> StateVector:
    """Uniform superposition of the register trajectory entangled with the clock."""
    ch = circ.choices(y)
    n = circ.reg_qubits
    R, C = 1 << n, 1 << circ.clock_bits
    x = np.zeros((R, C), dtype=complex)
    amps = np.zeros(R, dtype=complex)
    amps[0] = 1.0
    x[:, 0] = amps
    for t in range(1, circ.m + 1):
        amps = apply_gate(amps, circ.gate(t, ch.get(t)), n)
        x[:, t] = amps
    return StateVector(circ.side_qubits, x.ravel() / math.sqrt(circ.m + 1))


def side_state(circ: StreamingCircuit, reg: np.ndarray, clock: int) -> StateVector:
    """``reg (x) |clock>`` on one side."""
    reg = np.asarray(reg, dtype=complex).ravel()
    if reg.size != 1 << circ.reg_qubits:
        raise errors.DimensionMismatch(f"register state needs {1 << circ.reg_qubits} amplitudes")
    ket = np.zeros(1 << circ.clock_bits, dtype=complex)
    ket[clock] = 1.0
    return StateVector.from_amps(np.kron(reg, ket), normalize=True)
