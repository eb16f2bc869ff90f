"""Residual operators of the FLUX gadget and checks built on them.

Two-step blocks are written over ``span(|t-1>, |t>)`` in clock-major
order: a 2x2 grid of register blocks with rows ``t-1`` then ``t``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .. import errors
from ..qcore import StateVector
from .circuit import IX, StreamingCircuit
from .hamiltonian import build_kitaev_terms, hop, side_state

KITAEV_C = 2.0
ZERO_TOL = 1e-10


def hop_block(U: np.ndarray) -> np.ndarray:
    """``H_t`` for unitary ``U`` restricted to the two clock values."""
    U = np.asarray(U, dtype=complex)
    eye = np.eye(U.shape[0])
    return np.block([[eye, -U.conj().T], [-U, eye]])


def _check_ab(a: float, b: float) -> None:
    if a < 0 or b < 0 or not (math.isfinite(a) and math.isfinite(b)):
        raise errors.NegativeCoefficient(f"need a, b >= 0, got ({a}, {b})")


class Residual(NamedTuple):
    G: np.ndarray
    lam_min: float
    predicted: float


def residual_G(a: float, b: float, t: int = 1) -> Residual:
    """``a H^{iX} + b H^I`` on the proof qubit over clocks ``t-1, t``.

    The block does not depend on ``t``; it is accepted for labelling only.
    """
    _check_ab(a, b)
    G = a * hop_block(IX) + b * hop_block(np.eye(2))
    lam = float(np.linalg.eigvalsh(G)[0])
    return Residual(G, lam, a + b - math.hypot(a, b))


def flux_unitary(a: float, b: float) -> np.ndarray:
    """``(a iX + b I) / sqrt(a^2 + b^2)``."""
    _check_ab(a, b)
    r = math.hypot(a, b)
    if r == 0:
        raise errors.ZeroCoefficients("U(a, b) is undefined at a = b = 0")
    return (a * IX + b * np.eye(2)) / r


@dataclass(frozen=True)
class FoolingWitness:
    gamma1: np.ndarray
    gamma2: np.ndarray
    eta: np.ndarray
    max_residual: float


def find_fooling_null(U, V, samples: int = 16, rng: np.random.Generator | None = None):
    """A common null vector of ``a H^V + b H^U`` for all a, b, or None.

    Exists exactly when ``V^dagger U`` has eigenvalue 1: then
    ``gamma2 = U gamma1`` makes both hopping blocks vanish.
    """
    U = np.asarray(U, dtype=complex)
    V = np.asarray(V, dtype=complex)
    vals, vecs = np.linalg.eig(V.conj().T @ U)
    hit = np.flatnonzero(np.abs(vals - 1) < 1e-9)
    if hit.size == 0:
        return None
    g1 = vecs[:, hit[0]]
    g1 = g1 / np.linalg.norm(g1)
    g2 = U @ g1
    assert np.allclose(V @ U.conj().T @ g2, g2, atol=1e-9)
    eta = np.concatenate([g1, g2]) / math.sqrt(2)
    rng = rng if rng is not None else np.random.default_rng(0)
    worst = 0.0
    for a, b in rng.uniform(0, 2, size=(samples, 2)):
        G = a * hop_block(V) + b * hop_block(U)
        worst = max(worst, float(np.linalg.norm(G @ eta)))
    if worst > 1e-9:
        return None
    return FoolingWitness(g1, g2, eta, worst)


@dataclass(frozen=True)
class ResidualProfile:
    steps: tuple
    a: tuple
    b: tuple

    def __post_init__(self):
        if not len(self.steps) == len(self.a) == len(self.b):
            raise errors.InputError("profile columns differ in length")
        for t, x, y in zip(self.steps, self.a, self.b):
            if x < -ZERO_TOL or y < -ZERO_TOL:
                raise errors.NegativeCoefficient(f"step {t}: ({x}, {y}) has a negative entry")

    def items(self):
        return zip(self.steps, self.a, self.b)


def residual_profile(psi, circ: StreamingCircuit, Delta: float = 1.0) -> ResidualProfile:
    """``a_t = Delta <H_t^I>``, ``b_t = Delta <H_t^iX>`` for every proof step."""
    amps = psi.amps if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)
    if amps.size != circ.side_dim:
        raise errors.DimensionMismatch(f"side state needs {circ.side_dim} amplitudes")
    eye = np.eye(2, dtype=complex)
    steps, a, b = [], [], []
    for t in circ.proof_steps:
        steps.append(t)
        a.append(Delta * 2 * hop(circ, t, eye).expectation(amps))
        b.append(Delta * 2 * hop(circ, t, IX).expectation(amps))
    return ResidualProfile(tuple(steps), tuple(a), tuple(b))


def prop_energy_symmetric(psi, circ: StreamingCircuit) -> float:
    """``<psi psi| H~_prop |psi psi>`` with unit weights."""
    amps = psi.amps if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)
    kt = build_kitaev_terms(circ)
    P = set(circ.proof_steps)
    prof = dict((t, (x, y)) for t, x, y in residual_profile(amps, circ).items())
    total = 0.0
    for t in range(1, circ.m + 1):
        if t in P:
            x, y = prof[t]
            total += 2 * x * y
        else:
            total += 2 * 2 * kt.hops[t - 1].expectation(amps)
    return total


def kitaev_gap_constant(smax: int = 64) -> tuple:
    """(min of s^2 * 2(1 - cos(pi/(s+1))) over 1..smax, argmin, nondecreasing?)."""
    s = np.arange(1, smax + 1)
    vals = s ** 2 * 2 * (1 - np.cos(np.pi / (s + 1)))
    i = int(np.argmin(vals))
    return float(vals[i]), int(s[i]), bool(np.all(np.diff(vals) >= -1e-12))


@dataclass(frozen=True)
class SupportCheck:
    profile: ResidualProfile
    delta: float
    energy: float
    min_sum: float
    held: bool


def full_support_profile(psi, circ: StreamingCircuit, Delta: float, c: float = KITAEV_C) -> SupportCheck:
    """Check ``a_t + b_t >= Delta / 36`` for every proof step of a symmetric low-energy state."""
    m = circ.m
    if Delta < 1 or Delta <= 8 * m ** 4 / c:
        raise errors.HypothesisViolated(f"Delta = {Delta} must be >= 1 and exceed 8 m^4 / c = {8 * m ** 4 / c:.6g}")
    energy = Delta * prop_energy_symmetric(psi, circ)
    if energy > 2 + 1e-12:
        raise errors.EnergyHypothesisViolated(f"<psi psi|Delta H_prop|psi psi> = {energy:.6g} > 2")
    prof = residual_profile(psi, circ, Delta)
    delta = Delta / 36
    sums = [x + y for x, y in zip(prof.a, prof.b)]
    low = min(sums) if sums else math.inf
    return SupportCheck(prof, delta, energy, low, low >= delta)


class ExtractCheck(NamedTuple):
    lam_min: float
    held: bool


def propagation_extract_check(a: float, b: float, delta_p: float) -> ExtractCheck:
    """Smallest eigenvalue of ``G(a, b) - delta' F`` with ``F`` the hopping block of ``U(a, b)``.

    Hypothesis: ``sqrt(a^2 + b^2) >= delta'``.
    """
    _check_ab(a, b)
    if delta_p < 0:
        raise errors.HypothesisViolated("delta' must be nonnegative")
    r = math.hypot(a, b)
    if r < delta_p - 1e-12:
        raise errors.HypothesisViolated(f"sqrt(a^2 + b^2) = {r:.6g} < delta' = {delta_p:.6g}")
    G = residual_G(a, b).G
    diff = G if delta_p == 0 else G - delta_p * hop_block(flux_unitary(a, b))
    lam = float(np.linalg.eigvalsh(diff)[0])
    return ExtractCheck(lam, lam >= -ZERO_TOL)


def round_proof_gates(profile: ResidualProfile) -> str:
    """Bit per proof step: 0 (gate I) where b > a, 1 (gate iX) where a > b."""
    out = []
    for t, a, b in profile.items():
        if abs(a - b) <= 1e-12 * max(1.0, a + b):
            raise errors.TieAtStep(t, f"a_t = b_t = {a:.6g} at proof step {t}")
        out.append("0" if b > a else "1")
    return "".join(out)


def cheating_state(circ: StreamingCircuit, phi_L, phi_R) -> tuple:
    """``(phi_L (x) |m>, phi_R (x) |0>)``: left sits at the last clock value, right at the first."""
    P = set(circ.proof_steps)
    if circ.m < 2 or 1 not in P or circ.m not in P:
        raise errors.InvalidPattern("needs m >= 2 with proof gates at steps 1 and m")
    return side_state(circ, phi_L, circ.m), side_state(circ, phi_R, 0)


# ---------------------------------------------------------------- conjugated chain

def _proof_unitary(circ: StreamingCircuit, t: int, a: float, b: float) -> np.ndarray:
    return circ.register_unitary(t, flux_unitary(a, b))


def residual_chain(circ: StreamingCircuit, profile: ResidualProfile) -> np.ndarray:
    """``sum_{t not in P} H_t + sum_{t in P} G(a_t, b_t)`` on register (x) clocks 0..m."""
    R, m = 1 << circ.reg_qubits, circ.m
    C = m + 1
    out = np.zeros((R * C, R * C), dtype=complex)
    prof = {t: (a, b) for t, a, b in profile.items()}
    eye = np.eye(2, dtype=complex)

    def add(block, t, scale=1.0):
        idx = np.concatenate([np.arange(R) * C + t - 1, np.arange(R) * C + t])
        out[np.ix_(idx, idx)] += scale * block

    for t in range(1, m + 1):
        if t in prof:
            a, b = prof[t]
            add(hop_block(circ.register_unitary(t, IX)), t, a)
            add(hop_block(circ.register_unitary(t, eye)), t, b)
        else:
            add(hop_block(circ.register_unitary(t)), t)
    return out


def change_of_basis(circ: StreamingCircuit, profile: ResidualProfile) -> np.ndarray:
    """``W = sum_t (V_1^dagger ... V_t^dagger) (x) |t><t|`` with ``V_t = U(a_t, b_t)`` on proof steps."""
    R, m = 1 << circ.reg_qubits, circ.m
    C = m + 1
    prof = {t: (a, b) for t, a, b in profile.items()}
    W = np.zeros((R * C, R * C), dtype=complex)
    acc = np.eye(R, dtype=complex)
    W[np.ix_(np.arange(R) * C, np.arange(R) * C)] = acc
    for t in range(1, m + 1):
        V = _proof_unitary(circ, t, *prof[t]) if t in prof else circ.register_unitary(t)
        acc = acc @ V.conj().T
        idx = np.arange(R) * C + t
        W[np.ix_(idx, idx)] = acc
    return W


def walk_matrix(circ: StreamingCircuit, profile: ResidualProfile) -> np.ndarray:
    """Tridiagonal clock matrix: weight ``-sqrt(a^2+b^2)`` on proof hops, ``-1`` elsewhere."""
    m = circ.m
    T = np.zeros((m + 1, m + 1))
    prof = {t: (a, b) for t, a, b in profile.items()}
    for t in range(1, m + 1):
        d, o = (prof[t][0] + prof[t][1], math.hypot(*prof[t])) if t in prof else (1.0, 1.0)
        T[t - 1, t - 1] += d
        T[t, t] += d
        T[t, t - 1] = T[t - 1, t] = -o
    return T


def conjugated_chain_error(circ: StreamingCircuit, profile: ResidualProfile) -> float:
    """``max |W chain W^dagger - I (x) T|``."""
    W = change_of_basis(circ, profile)
    lhs = W @ residual_chain(circ, profile) @ W.conj().T
    rhs = np.kron(np.eye(1 << circ.reg_qubits), walk_matrix(circ, profile))
    return float(np.max(np.abs(lhs - rhs)))


def honest_profile(circ: StreamingCircuit, y: str) -> ResidualProfile:
    """(0, 1) where the proof bit is 0 and (1, 0) where it is 1."""
    circ.check_proof(y)
    steps = circ.proof_steps
    bits = [y[circ.bit_of(t)] for t in steps]
    return ResidualProfile(steps, tuple(float(b == "1") for b in bits), tuple(float(b == "0") for b in bits))
