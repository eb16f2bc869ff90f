"""Ground-state connectivity instances, sequence checking, and classical reconfiguration.

Formulas use DIMACS literal conventions: variable ``v`` is ``v`` (true) or
``-v`` (false), numbered from 1.  Assignment strings list variable 1 first,
which is also qubit 0 (the most significant bit) in the quantum reductions.
"""
from __future__ import annotations

import collections
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import config, errors
from .decomp import pauli_expand, weight
from .qcore import DenseOperator, GateSequence, LocalGate, StateVector, _mat, pauli_matrix

WITNESS = "WITNESS"
NO_EVIDENCE = "NO-EVIDENCE"
PROMISE_GAP = "PROMISE-GAP"


@dataclass(frozen=True, eq=False)
class GsconInstance:
    H: DenseOperator
    k: int
    eta1: float
    eta2: float
    eta3: float
    eta4: float
    delta: float
    l: int
    m: int | None          # None: no length bound
    psi: StateVector
    phi: StateVector
    bipartition: tuple | None = None

    def __post_init__(self):
        if not (isinstance(self.H, DenseOperator) and self.H.hermitian):
            object.__setattr__(self, "H", DenseOperator.herm(_mat(self.H)))
        n = self.H.n
        if self.psi.n != n or self.phi.n != n:
            raise errors.DimensionMismatch("endpoint states do not match the Hamiltonian")
        slack = 1e-12
        if self.eta2 - self.eta1 < self.delta - slack or self.eta4 - self.eta3 < self.delta - slack:
            raise errors.InvalidInstance("threshold gaps are smaller than delta")
        tol = config.current().tol.energy
        for name, s in (("psi", self.psi), ("phi", self.phi)):
            e = s.expectation(self.H)
            if e > self.eta1 + tol:
                raise errors.InvalidInstance(f"<{name}|H|{name}> = {e:.6g} > eta1 = {self.eta1:.6g}")
        if self.l < 1 or (self.m is not None and self.m < 0):
            raise errors.InvalidInstance("gate locality must be >= 1 and length bound >= 0")
        if self.bipartition is not None:
            L, R = (tuple(sorted(int(q) for q in side)) for side in self.bipartition)
            if set(L) & set(R) or set(L) | set(R) != set(range(n)):
                raise errors.InvalidInstance("bipartition must split the qubits into two disjoint sides")
            object.__setattr__(self, "bipartition", (L, R))

    @property
    def n(self) -> int:
        return self.H.n


@dataclass(frozen=True)
class GsconReport:
    max_energy: float
    argmax: int
    final_distance: float
    verdict: str
    energies: tuple


def check_sequence_shape(inst: GsconInstance, seq: GateSequence) -> None:
    if seq.n != inst.n:
        raise errors.DimensionMismatch(f"sequence acts on {seq.n} qubits, instance has {inst.n}")
    for i, g in enumerate(seq.gates):
        if g.arity > inst.l:
            raise errors.LocalityViolation(f"gate {i} acts on {g.arity} qubits {g.qubits}; instance allows l={inst.l}")
    if inst.m is not None and len(seq) > inst.m:
        raise errors.LengthExceeded(f"sequence length {len(seq)} exceeds m={inst.m}")
    if inst.bipartition is not None:
        L, R = map(set, inst.bipartition)
        for i, g in enumerate(seq.gates):
            if not (set(g.qubits) <= L or set(g.qubits) <= R):
                raise errors.BipartitionViolation(f"gate {i} on {g.qubits} straddles the bipartition")


def verify_gscon_sequence(inst: GsconInstance, seq: GateSequence) -> GsconReport:
    """Energies of every intermediate state (step 0 is psi) and the final distance."""
    check_sequence_shape(inst, seq)
    h = inst.H.entries
    energies = [float(np.vdot(a, h @ a).real) for a in seq.trajectory(inst.psi)]
    final = None
    for final in seq.trajectory(inst.psi):
        pass
    dist = float(np.linalg.norm(final - inst.phi.amps))
    i = int(np.argmax(energies))
    top = energies[i]
    if top <= inst.eta1 and dist <= inst.eta3:
        verdict = WITNESS
    elif top >= inst.eta2 or dist >= inst.eta4:
        verdict = NO_EVIDENCE
    else:
        verdict = PROMISE_GAP
    return GsconReport(top, i, dist, verdict, tuple(energies))


# ---------------------------------------------------------------- formulas

def parse_dimacs(text: str) -> tuple:
    """(nvars, clauses) from DIMACS CNF text.  Errors carry line numbers."""
    nvars, clauses, pending = None, [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line[0] == "p":
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise errors.MalformedInput(f"line {lineno}: bad problem line {raw!r}")
            try:
                nvars = int(parts[2])
            except ValueError:
                raise errors.MalformedInput(f"line {lineno}: bad variable count {parts[2]!r}") from None
            continue
        for col, tok in enumerate(line.split(), start=1):
            try:
                lit = int(tok)
            except ValueError:
                raise errors.MalformedInput(f"line {lineno}, token {col}: not an integer: {tok!r}") from None
            if lit == 0:
                clauses.append(tuple(pending))
                pending = []
            else:
                if nvars is not None and abs(lit) > nvars:
                    raise errors.MalformedInput(f"line {lineno}, token {col}: variable {abs(lit)} > {nvars}")
                pending.append(lit)
    if pending:
        clauses.append(tuple(pending))
    if nvars is None:
        nvars = max((abs(l) for c in clauses for l in c), default=0)
    return nvars, clauses


def to_dimacs(nvars: int, clauses) -> str:
    lines = [f"p cnf {nvars} {len(clauses)}"]
    lines += [" ".join(map(str, c)) + " 0" for c in clauses]
    return "\n".join(lines) + "\n"


def violated_counts(nvars: int, clauses) -> np.ndarray:
    """Number of violated clauses for every assignment index (variable 1 = MSB)."""
    idx = np.arange(1 << nvars, dtype=np.int64)
    count = np.zeros(1 << nvars, dtype=np.int64)
    for c in clauses:
        viol = np.ones(1 << nvars, dtype=bool)
        for lit in c:
            bit = (idx >> (nvars - abs(lit))) & 1
            viol &= bit == (0 if lit > 0 else 1)
        count += viol
    return count


def satisfies(clauses, bits: str) -> bool:
    return all(any((bits[abs(l) - 1] == "1") == (l > 0) for l in c) for c in clauses)


@dataclass(frozen=True)
class StConnInstance:
    nvars: int
    clauses: tuple
    x: str
    y: str
    l: int = 1

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(int(v) for v in c) for c in self.clauses))
        for c in self.clauses:
            if not c or len(c) > 3 or any(v == 0 or abs(v) > self.nvars for v in c):
                raise errors.InvalidInstance(f"clause {c} is not a 3-CNF clause over {self.nvars} variables")
        for name, s in (("x", self.x), ("y", self.y)):
            if len(s) != self.nvars or set(s) - {"0", "1"}:
                raise errors.InvalidInstance(f"{name} must be a {self.nvars}-bit string")
            if not satisfies(self.clauses, s):
                raise errors.InvalidEndpoints(f"{name}={s} does not satisfy the formula")
        if self.l < 1:
            raise errors.InvalidInstance("step budget l must be >= 1")


def _flip_masks(n: int, l: int) -> list:
    masks = []
    for r in range(1, min(l, n) + 1):
        for combo in itertools.combinations(range(n), r):
            masks.append(sum(1 << (n - 1 - j) for j in combo))
    return masks


def stconn_solve(inst: StConnInstance):
    """Shortest solution path from x to y in steps of <= l flips, or None if unreachable.

    Breadth-first search over all 2^n assignments; neighbours are visited in
    order of flip size, then lexicographic position, so output is deterministic.
    """
    n = inst.nvars
    if n > config.current().stconn_max_vars:
        raise errors.InputError(f"{n} variables exceeds the exhaustive-search cap")
    ok = violated_counts(n, inst.clauses) == 0
    src, dst = int(inst.x, 2) if n else 0, int(inst.y, 2) if n else 0
    parent = np.full(1 << n, -1, dtype=np.int64)
    parent[src] = src
    masks = _flip_masks(n, inst.l)
    queue = collections.deque([src])
    while queue and parent[dst] < 0:
        u = queue.popleft()
        for mk in masks:
            v = u ^ mk
            if ok[v] and parent[v] < 0:
                parent[v] = u
                queue.append(v)
    if parent[dst] < 0:
        return None
    path = [dst]
    while path[-1] != src:
        path.append(int(parent[path[-1]]))
    return [format(v, f"0{n}b") if n else "" for v in reversed(path)]


def validate_stconn_path(inst: StConnInstance, path) -> None:
    """Independent re-check of a claimed solution path."""
    if not path or path[0] != inst.x or path[-1] != inst.y:
        raise errors.CheckFailed("path does not join x to y")
    for s in path:
        if not satisfies(inst.clauses, s):
            raise errors.CheckFailed(f"vertex {s} violates the formula")
    for a, b in zip(path, path[1:]):
        if sum(p != q for p, q in zip(a, b)) > inst.l:
            raise errors.CheckFailed(f"step {a} -> {b} exceeds Hamming budget {inst.l}")


def lift_stconn_locality(inst: StConnInstance, l2: int) -> StConnInstance:
    """Copy every variable l2 times, tied by equality clauses; step budget becomes l2."""
    if inst.l != 1:
        raise errors.InputError("lifting starts from a budget-1 instance")
    if l2 < 1:
        raise errors.InputError("target budget must be >= 1")

    def var(v, c):
        return (v - 1) * l2 + c + 1

    clauses = [tuple(int(math.copysign(var(abs(l), 0), l)) for l in c) for c in inst.clauses]
    for v in range(1, inst.nvars + 1):
        for c in range(1, l2):
            clauses.append((var(v, 0), -var(v, c)))
            clauses.append((-var(v, 0), var(v, c)))
    dup = lambda s: "".join(ch * l2 for ch in s)
    return StConnInstance(inst.nvars * l2, tuple(clauses), dup(inst.x), dup(inst.y), l2)


def flip_sequence(path) -> GateSequence:
    """X gates realising a path of bitstrings, one gate per flipped bit."""
    n = len(path[0])
    X = pauli_matrix("X")
    gates = [LocalGate((j,), X) for a, b in zip(path, path[1:]) for j in range(n) if a[j] != b[j]]
    return GateSequence(n, tuple(gates))


def reduce_stconn_to_gscon(inst: StConnInstance) -> GsconInstance:
    """H = sum over clauses of the projector onto the clause's violating assignment."""
    if inst.l != 1:
        raise errors.InputError("reduction expects a budget-1 instance")
    diag = violated_counts(inst.nvars, inst.clauses).astype(float)
    H = DenseOperator(np.diag(diag).astype(complex), hermitian=True)
    k = max((len(set(abs(l) for l in c)) for c in inst.clauses), default=1)
    return GsconInstance(H, k, 0.0, 1 / 8, 0.0, 1 / 2, 1 / 8, 1, None,
                         StateVector.from_bits(inst.x), StateVector.from_bits(inst.y))


# ---------------------------------------------------------------- GO-register reduction

def go_projector() -> np.ndarray:
    """I - |000><000| - |111><111| on three qubits."""
    p = np.eye(8, dtype=complex)
    p[0, 0] = p[7, 7] = 0.0
    return p


def reduce_lh_to_gscon(A, alpha: float, beta: float, witness: GateSequence) -> tuple:
    """(instance, honest sequence) for H = A (x) P on n + 3 qubits (GO qubits last).

    Honest run: prepare psi_A, flip GO qubits 0 and 1, flip GO qubit 2, undo
    the preparation.  Only the state between the two GO flips sees A.
    """
    a = _mat(A)
    n = a.shape[0].bit_length() - 1
    if witness.n != n:
        raise errors.DimensionMismatch("witness sequence does not act on A's register")
    H = DenseOperator(np.kron(a, go_projector()), hermitian=True)
    N = n + 3
    X = pauli_matrix("X")
    lift = lambda g: LocalGate(g.qubits, g.matrix, g.pulse)
    honest = (
        [lift(g) for g in witness.gates]
        + [LocalGate((n, n + 1), np.kron(X, X))]
        + [LocalGate((n + 2,), X)]
        + [lift(g) for g in witness.inverse().gates]
    )
    seq = GateSequence(N, tuple(honest))
    m = 2 * len(witness) + 2
    eta1, eta2 = float(alpha), float(beta) / (16 * m * m)
    kprime = max((weight(t.word) for t in pauli_expand(a).terms), default=0)
    psi = StateVector.basis(N, 0)
    phi = StateVector.basis(N, 7)
    inst = GsconInstance(H, kprime + 2, eta1, eta2, 0.0, 0.25, eta2 - eta1, 2, m, psi, phi)
    return inst, seq


def traversal_bound(m: int, eps: float) -> float:
    if not 0 <= eps < 0.5:
        raise errors.EpsilonOutOfRange(f"eps = {eps} not in [0, 1/2)")
    if m < 1:
        raise errors.InputError("m must be >= 1")
    return ((1 - 2 * eps) / (2 * m)) ** 2


@dataclass(frozen=True)
class TraversalCheck:
    held: bool
    max_value: float
    argmax: int
    bound: float
    eps: float
    values: tuple

    def __bool__(self):
        return self.held


def _basis_support(P: np.ndarray):
    d = np.diag(P)
    if np.max(np.abs(P - np.diag(d))) > 1e-12:
        return None
    if np.max(np.minimum(np.abs(d), np.abs(d - 1))) > 1e-12:
        return None
    return np.flatnonzero(np.abs(d - 1) < 1e-12)


def check_k_orthogonal(S, T, k: int, n: int) -> None:
    """Raise NotKOrthogonal unless no Pauli word of weight <= k connects S and T."""
    ps, pt = _mat(S), _mat(T)
    bs, bt = _basis_support(ps), _basis_support(pt)
    if bs is not None and bt is not None:
        # Pauli words map basis states to basis states: need Hamming distance > k
        tset = set(int(i) for i in bt)
        for s in bs:
            for mk in [0] + _flip_masks(n, k):
                if int(s) ^ mk in tset:
                    raise errors.NotKOrthogonal(f"basis states {int(s)} and {int(s) ^ mk} are {k}-close")
        return
    from .qcore import pauli_word_matrix
    for r in range(0, k + 1):
        for qs in itertools.combinations(range(n), r):
            for letters in itertools.product("XYZ", repeat=r):
                word = ["I"] * n
                for q, c in zip(qs, letters):
                    word[q] = c
                P = pauli_word_matrix("".join(word))
                if np.max(np.abs(pt @ P @ ps)) > 1e-12:
                    raise errors.NotKOrthogonal(f"{''.join(word)} connects the subspaces")


def check_traversal_lemma(S, T, seq: GateSequence, v: StateVector, w: StateVector,
                          eps: float | None = None, k: int | None = None) -> TraversalCheck:
    """Check that some intermediate state leaks at least ((1-2 eps)/(2m))^2 outside S + T."""
    n = seq.n
    ps, pt = _mat(S), _mat(T)
    check_k_orthogonal(ps, pt, k if k is not None else max(seq.max_arity(), 1), n)
    states = list(seq.trajectory(v))
    dist = float(np.linalg.norm(w.amps - states[-1]))
    if eps is None:
        eps = dist
    if dist > eps or eps >= 0.5:
        raise errors.EndpointTooFar(f"||w - U v|| = {dist:.4g} (eps = {eps:.4g}) must be < 1/2")
    leak = np.eye(ps.shape[0]) - ps - pt
    values = [float(np.vdot(a, leak @ a).real) for a in states]
    i = int(np.argmax(values))
    bound = traversal_bound(max(len(seq), 1), eps)
    return TraversalCheck(values[i] >= bound, values[i], i, bound, eps, tuple(values))


def go_subspaces(n: int) -> tuple:
    """Projectors I (x) |000><000| and I (x) |111><111| on n + 3 qubits."""
    s = np.zeros((8, 8))
    t = np.zeros((8, 8))
    s[0, 0] = t[7, 7] = 1
    eye = np.eye(1 << n)
    return np.kron(eye, s), np.kron(eye, t)


def ghz_rotation_family(steps: int) -> GateSequence:
    """2-local gates for exp(i (pi/2) XXX) in ``steps`` equal slices: |000> -> i|111>."""
    from .decomp import decompose_pauli_rotation
    piece = decompose_pauli_rotation("XXX", math.pi / (2 * steps), strict=False)
    return GateSequence(3, piece.gates * steps)
