"""Exact and approximate decompositions of Hermitian evolutions into 2-local gates.

The exact route writes ``exp(i t P)`` for a Pauli word ``P`` as a product of
four exponentials of two anti-commuting words of roughly half the weight,
and recurses until every factor acts on at most two qubits.  Approximate
routes (first-order product formula, small-unitary decomposition) sit on
top of it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg as sla

from . import config, errors
from .qcore import (
    PAULI_LETTERS,
    DenseOperator,
    GateSequence,
    LocalGate,
    PauliTerm,
    _check_word,
    _mat,
    pauli_matrix,
    pauli_word_matrix,
    spectral_norm,
)

# letter at the pivot -> (A, B) with [A, B] = 2i * letter
_PIVOT_PAIR = {"Z": ("X", "Y"), "X": ("Y", "Z"), "Y": ("Z", "X")}


@dataclass(frozen=True)
class PauliExpansion:
    terms: tuple
    n: int

    def matrix(self) -> np.ndarray:
        out = np.zeros((1 << self.n, 1 << self.n), dtype=complex)
        for term in self.terms:
            out += term.coeff * pauli_word_matrix(term.word)
        return out

    def l1(self) -> float:
        return sum(abs(t.coeff) for t in self.terms)


@dataclass(frozen=True)
class Depth4Split:
    """exp(i t H) with H = [h1, h2] / 2i.

    For ``t >= 0`` the matrix product is
    ``exp(i t1 h1) exp(i t2 h2) exp(i t2 h1) exp(i t1 h2)``.  For ``t < 0``
    (``inverted``) the pair solves ``-t`` and the product is the inverse,
    ``exp(-i t1 h2) exp(-i t2 h1) exp(-i t2 h2) exp(-i t1 h1)``.
    """

    h1: str
    h2: str
    t1: float
    t2: float
    pivot: int = -1
    t: float = 0.0
    inverted: bool = False

    def factors(self) -> list:
        """(word, pulse) pairs in application order (rightmost factor first)."""
        a, b = self.t1, self.t2
        if not self.inverted:
            return [(self.h2, a), (self.h1, b), (self.h2, b), (self.h1, a)]
        return [(self.h1, -a), (self.h2, -b), (self.h1, -b), (self.h2, -a)]

    def pulse_sum(self) -> float:
        return abs(self.t1) + abs(self.t2)


def weight(word: str) -> int:
    return sum(c != "I" for c in word)


def support(word: str) -> list:
    return [i for i, c in enumerate(word) if c != "I"]


def anticommute(w1: str, w2: str) -> bool:
    if len(w1) != len(w2):
        raise errors.DimensionMismatch("Pauli words of different length")
    clashes = sum(1 for a, b in zip(w1, w2) if a != "I" and b != "I" and a != b)
    return clashes % 2 == 1


def word_product(w1: str, w2: str) -> tuple:
    """Return (phase, word) with P1 P2 = phase * P."""
    table = {("X", "Y"): (1j, "Z"), ("Y", "Z"): (1j, "X"), ("Z", "X"): (1j, "Y"),
             ("Y", "X"): (-1j, "Z"), ("Z", "Y"): (-1j, "X"), ("X", "Z"): (-1j, "Y")}
    phase, out = 1 + 0j, []
    for a, b in zip(w1, w2):
        if a == "I":
            out.append(b)
        elif b == "I":
            out.append(a)
        elif a == b:
            out.append("I")
        else:
            p, c = table[(a, b)]
            phase *= p
            out.append(c)
    return phase, "".join(out)


def locality_level(w: int) -> int:
    """k with w in (2^(k-1)+1, 2^k+1]; 0 for w <= 2."""
    return 0 if w <= 2 else math.ceil(math.log2(w - 1))


def pulse_bound(r: int, t: float) -> float:
    """Per-gate pulse after r levels of splitting: 2^(1-2^-r) |t|^(2^-r)."""
    return 2.0 ** (1.0 - 2.0 ** (-r)) * abs(t) ** (2.0 ** (-r))


# ---------------------------------------------------------------- expansion

_BASIS = np.stack([pauli_matrix(c).T.reshape(4) for c in PAULI_LETTERS])  # row a: P_a[c, r] at r*2+c


def pauli_expand(H, cutoff: float = 1e-14) -> PauliExpansion:
    """Coefficients alpha_P = Tr(P H) / d over all Pauli words."""
    if not (isinstance(H, DenseOperator) and H.hermitian):
        H = DenseOperator.herm(_mat(H))
    n, d = H.n, H.dim
    t = H.entries.reshape((2,) * (2 * n))
    order = [ax for i in range(n) for ax in (i, n + i)]
    t = t.transpose(order).reshape((4,) * n) if n else t.reshape(())
    for ax in range(n):
        t = np.moveaxis(np.tensordot(_BASIS, t, axes=([1], [ax])), 0, ax)
    coeffs = np.asarray(t).reshape(-1) / d
    if np.max(np.abs(coeffs.imag), initial=0.0) > config.current().tol.hermitian:
        raise errors.NotHermitian("Pauli coefficients are not real")
    terms = []
    for idx in np.flatnonzero(np.abs(coeffs) > cutoff):
        word = "".join(PAULI_LETTERS[(idx >> (2 * (n - 1 - q))) & 3] for q in range(n)) if n else ""
        terms.append(PauliTerm(float(coeffs[idx].real), word))
    exp = PauliExpansion(tuple(terms), n)
    err = float(np.max(np.abs(exp.matrix() - H.entries), initial=0.0))
    if err > config.current().tol.reconstruct:
        raise errors.NoConvergence(f"Pauli reconstruction error {err:.3e}")
    return exp


# ---------------------------------------------------------------- splitting

def split_pauli(word: str) -> tuple:
    """Split P into anti-commuting (h1, h2) with [h1, h2] = 2i P.

    The pivot is the lower median of the non-identity positions, which for
    words without identities is the midpoint of the support.  ``h1`` keeps
    the letters left of the pivot, ``h2`` those to the right.
    """
    _check_word(word)
    sup = support(word)
    if len(sup) < 2 or (len(sup) <= 2 and sup[-1] - sup[0] < 2):
        raise errors.NotSplittable(f"{word!r} is already 2-local")
    j = sup[(len(sup) - 1) // 2]
    a, b = _PIVOT_PAIR[word[j]]
    h1 = word[:j] + a + "I" * (len(word) - j - 1)
    h2 = "I" * j + b + word[j + 1:]
    return h1, h2, j


# ---------------------------------------------------------------- depth 4

_X, _Y, _Z = pauli_matrix("X"), pauli_matrix("Y"), pauli_matrix("Z")
_I2 = np.eye(2)


def _rot(p, a):
    return math.cos(a) * _I2 + 1j * math.sin(a) * p


def _product(a: float, b: float) -> np.ndarray:
    return _rot(_X, a) @ _rot(_Y, b) @ _rot(_X, b) @ _rot(_Y, a)


def _product_error(a: float, b: float, t: float) -> float:
    """max entry of |product - exp(i t Z)| from the closed-form Pauli components.

    The product is c0 I + i(cx X + cx Y + cz Z) with
    c0 = (cos 2a + cos 2b - sin 2a sin 2b)/2, cx = (sin 2a + cos 2a sin 2b)/2,
    cz = (cos 2a - cos 2b - sin 2a sin 2b)/2.
    """
    ca, sa, cb, sb = math.cos(2 * a), math.sin(2 * a), math.cos(2 * b), math.sin(2 * b)
    c0 = (ca + cb - sa * sb) / 2
    cx = (sa + ca * sb) / 2
    cz = (ca - cb - sa * sb) / 2
    diag = abs(complex(c0 - math.cos(t), cz - math.sin(t)))
    return max(diag, math.sqrt(2) * abs(cx))


def _newton(t: float, start, iters: int = 60):
    target = _rot(_Z, t)
    x = np.array(start, dtype=float)
    for _ in range(iters):
        A, B, C, D = _rot(_X, x[0]), _rot(_Y, x[1]), _rot(_X, x[1]), _rot(_Y, x[0])
        u = A @ B @ C @ D
        r = u - target
        if np.max(np.abs(r)) < 1e-15:
            break
        d1 = 1j * _X @ u + A @ B @ C @ (1j * _Y) @ D
        d2 = A @ (1j * _Y) @ B @ C @ D + A @ B @ (1j * _X) @ C @ D
        J = np.column_stack([np.concatenate([d.real.ravel(), d.imag.ravel()]) for d in (d1, d2)])
        R = np.concatenate([r.real.ravel(), r.imag.ravel()])
        step = np.linalg.lstsq(J, -R, rcond=None)[0]
        x = x + step
        if not np.all(np.isfinite(x)):
            return None
    return x


def _closed_form(t: float) -> tuple:
    # Matching the identity and Pauli components of the 2x2 product gives
    # cos 2b = cos t - sin t and tan 2a = -sin 2b.
    b2 = math.acos(max(-1.0, min(1.0, math.cos(t) - math.sin(t))))
    a2 = -math.atan(math.sin(b2))
    return a2 / 2, b2 / 2


def _solve_2x2(t: float) -> tuple:
    """Solve the depth-4 identity on the 2x2 representation for 0 <= t <= pi/2.

    The closed form seeds a Newton polish; the documented fallback start
    (sqrt(t/2), sqrt(t/2)) and its sign variants are tried if that fails.
    """
    if t == 0.0:
        return 0.0, 0.0
    s = math.sqrt(t / 2)
    tol = config.current().tol.depth4
    best = None
    for start in (_closed_form(t), (s, s), (s, -s), (-s, s), (0.0, t)):
        err = _product_error(start[0], start[1], t)
        x = np.array(start) if err <= tol / 10 else _newton(t, start)
        if x is None:
            continue
        err = _product_error(x[0], x[1], t)
        ok_bound = abs(x[0]) + abs(x[1]) <= math.sqrt(2 * t) * (1 + 1e-12)
        if err <= tol and ok_bound:
            return float(x[0]), float(x[1])
        if best is None or err < best[0]:
            best = (err, x)
    raise errors.NoSolution(f"depth-4 solve failed for t={t} (best error {best[0] if best else float('nan'):.3e})")


def depth4_solve(h1: str, h2: str, t: float, pivot: int = -1) -> Depth4Split:
    """Solve exp(i t H) = exp(i t1 h1) exp(i t2 h2) exp(i t2 h1) exp(i t1 h2), H = [h1,h2]/2i.

    Two anti-commuting involutions generate a copy of the 2x2 matrix algebra
    (h1 -> X, h2 -> Y, H -> Z), so the identity is solved and checked there.
    """
    _check_word(h1)
    _check_word(h2)
    if not anticommute(h1, h2):
        raise errors.NoSolution(f"{h1!r} and {h2!r} commute")
    t = float(t)
    if abs(t) > math.pi / 2 + 1e-15:
        raise errors.PulseOutOfRange(f"|t| = {abs(t)} > pi/2")
    t1, t2 = _solve_2x2(abs(t))
    return Depth4Split(h1, h2, t1, t2, pivot=pivot, t=t, inverted=t < 0)


# ---------------------------------------------------------------- exact recursion

def _restrict(word: str, qubits) -> str:
    return "".join(word[q] for q in qubits)


def _decompose(word: str, t: float, out: list) -> None:
    sup = support(word)
    if len(sup) <= 2:
        qubits = tuple(sup) if sup else (0,)
        out.append(LocalGate.rotation(qubits, _restrict(word, qubits), t, check=False))
        return
    h1, h2, j = split_pauli(word)
    split = depth4_solve(h1, h2, t, pivot=j)
    for w, pulse in split.factors():
        _decompose(w, pulse, out)


def decompose_pauli_rotation(word: str, t: float, strict: bool = True, verify: bool = True) -> GateSequence:
    """Exact 2-local gate sequence for exp(i t P).

    ``strict`` enforces 8|t|^(1/2^k) <= pi/2 for the word's level k, which
    keeps every recursive pulse below pi/2 with room to spare.  Without it
    only the depth-4 range |t| <= pi/2 is required at each level.
    """
    _check_word(word)
    t = float(t)
    k = locality_level(weight(word))
    if strict and 8.0 * abs(t) ** (2.0 ** (-k)) > math.pi / 2:
        raise errors.PulseOutOfRange(f"8|t|^(1/2^{k}) > pi/2 for t={t}")
    gates: list = []
    _decompose(word, t, gates)
    seq = GateSequence(len(word), tuple(gates))
    if verify and len(word) <= min(config.current().dense_limit, 10):
        target = math.cos(t) * np.eye(1 << len(word)) + 1j * math.sin(t) * pauli_word_matrix(word)
        err = float(np.max(np.abs(seq.unitary() - target)))
        if err > config.current().tol.exact_product:
            raise errors.NoSolution(f"decomposition of {word} deviates by {err:.3e}")
    return seq


# ---------------------------------------------------------------- product formulas

@dataclass(frozen=True)
class TrotterResult:
    sequence: GateSequence
    error: float
    s: int
    norm_sum: float

    @property
    def constant(self) -> float:
        """error * s / t^2 with t the summed term norm."""
        return self.error * self.s / self.norm_sum ** 2 if self.norm_sum else 0.0


def _term_gates(H: np.ndarray, n: int, scale: float) -> list:
    """Gates for exp(i scale H) of one term (local support or single Pauli word)."""
    exp = pauli_expand(H)
    words = [tm for tm in exp.terms if weight(tm.word) > 0]
    phase = sum(tm.coeff for tm in exp.terms if weight(tm.word) == 0)
    sup = sorted({q for tm in words for q in support(tm.word)})
    gates = []
    if len(words) == 1:
        tm = words[0]
        gates.extend(decompose_pauli_rotation(tm.word, scale * tm.coeff, strict=False, verify=False).gates)
    elif len(sup) <= 2:
        local = np.zeros((1 << len(sup),) * 2, dtype=complex)
        for tm in words:
            local += tm.coeff * pauli_word_matrix(_restrict(tm.word, sup))
        gates.append(LocalGate(tuple(sup), sla.expm(1j * scale * local)))
    elif words:
        raise errors.InvalidTerm(f"term acts on qubits {sup} and is not a single Pauli word")
    if phase:
        gates.append(LocalGate.rotation((0,), "I", scale * phase))
    return gates


def trotter_first_order(terms: Sequence, s: int) -> TrotterResult:
    """(prod_j exp(i H_j / s))^s with the measured spectral-norm error."""
    if int(s) != s or s < 1:
        raise errors.InputError("s must be a positive integer")
    s = int(s)
    mats = [_mat(h) for h in terms]
    if not mats:
        raise errors.InputError("no terms")
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise errors.DimensionMismatch("terms have different dimensions")
    n = d.bit_length() - 1
    budget = sum(spectral_norm(m) for m in mats)
    if budget > 1 + 1e-12:
        raise errors.NormBudgetExceeded(f"sum of norms {budget:.6g} > 1")
    step = []
    for m in mats:
        step.extend(_term_gates(m, n, 1.0 / s))
    seq = GateSequence(n, tuple(step) * s)
    exact = sla.expm(1j * sum(mats))
    err = spectral_norm(exact - seq.unitary())
    return TrotterResult(seq, err, s, budget)


@dataclass(frozen=True)
class SmallUnitaryResult:
    sequence: GateSequence
    eps: float
    error: float       # ||exp(iH) - product||
    drift_sum: float   # sum_j ||I - U_j||
    c1: float          # error / (d^2 eps^2)
    c2: float          # drift_sum / (n^2 d^2 eps^(1/2n))


def small_unitary_bound(n: int) -> float:
    return (math.pi / 16) ** (2 * n)


def decompose_small_unitary(H, strict: bool = True, verify: bool = True) -> SmallUnitaryResult:
    """Gates approximating exp(iH) for small ||H||: expand in Pauli words,
    take one first-order step, decompose each word exactly."""
    m = _mat(H)
    d = m.shape[0]
    n = d.bit_length() - 1
    eps = spectral_norm(m)
    if strict and eps >= small_unitary_bound(n):
        raise errors.NormTooLarge(f"||H|| = {eps:.3e} >= (pi/16)^(2n) = {small_unitary_bound(n):.3e}")
    if eps == 0.0:
        return SmallUnitaryResult(GateSequence(n), 0.0, 0.0, 0.0, 0.0, 0.0)
    gates = []
    for tm in pauli_expand(m).terms:
        gates.extend(decompose_pauli_rotation(tm.word, tm.coeff, strict=False, verify=False).gates)
    seq = GateSequence(n, tuple(gates))
    drift = sum(float(np.linalg.norm(np.eye(g.matrix.shape[0]) - g.matrix, 2)) for g in gates)
    err = spectral_norm(sla.expm(1j * m) - seq.unitary()) if verify else float("nan")
    return SmallUnitaryResult(seq, eps, err, drift, err / (d * d * eps * eps),
                              drift / (n * n * d * d * eps ** (1.0 / (2 * n))))
