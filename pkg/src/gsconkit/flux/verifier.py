"""Product-state energies, separable optimisation and the two-copy verifier."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import optimize

from .. import config, errors
from ..qcore import StateVector, random_state
from .hamiltonian import EmbeddedHamiltonian


@dataclass(frozen=True, eq=False)
class SeparableOperator:
    """``sum_i w_i A_i (x) B_i`` (``None`` = identity) plus ``w_sym (I - SWAP)/2``.

    Works for any pair of equal side dimensions; ``EmbeddedHamiltonian``
    converts to this with dense side matrices.
    """

    side_dim: int
    terms: tuple          # (weight, A or None, B or None)
    sym_weight: float = 0.0

    @classmethod
    def from_embedded(cls, H: EmbeddedHamiltonian) -> "SeparableOperator":
        terms, sym = [], 0.0
        for w, A, B, is_sym in H.side_matrices():
            if is_sym:
                sym += w
            else:
                terms.append((w, A, B))
        return cls(H.side_dim, tuple(terms), sym)

    @property
    def total_weight(self) -> float:
        return float(sum(w for w, _, _ in self.terms) + self.sym_weight)

    def values(self, a: np.ndarray, b: np.ndarray) -> list:
        out = []
        for _, A, B in self.terms:
            va = 1.0 if A is None else float(np.vdot(a, A @ a).real)
            vb = 1.0 if B is None else float(np.vdot(b, B @ b).real)
            out.append(va * vb)
        if self.sym_weight:
            out.append(0.5 * (1 - abs(np.vdot(a, b)) ** 2))
        return out

    def weights(self) -> list:
        w = [w for w, _, _ in self.terms]
        return w + [self.sym_weight] if self.sym_weight else w

    def energy(self, a: np.ndarray, b: np.ndarray) -> float:
        return float(np.dot(self.weights(), self.values(a, b)))

    def effective(self, other: np.ndarray, side: str) -> np.ndarray:
        """Operator on one side after contracting the other side's state."""
        D = self.side_dim
        h = np.zeros((D, D), dtype=complex)
        eye = np.eye(D)
        for w, A, B in self.terms:
            mine, theirs = (A, B) if side == "L" else (B, A)
            s = 1.0 if theirs is None else float(np.vdot(other, theirs @ other).real)
            if s:
                h += w * s * (eye if mine is None else mine)
        if self.sym_weight:
            h += 0.5 * self.sym_weight * (eye - np.outer(other, other.conj()))
        return h


def _as_separable(H) -> SeparableOperator:
    if isinstance(H, SeparableOperator):
        return H
    if isinstance(H, EmbeddedHamiltonian):
        return SeparableOperator.from_embedded(H)
    raise errors.InputError(f"cannot treat {type(H).__name__} as a two-side Hamiltonian")


def _amps(psi, D: int) -> np.ndarray:
    a = psi.amps if isinstance(psi, StateVector) else np.asarray(psi, dtype=complex)
    if a.size != D:
        raise errors.DimensionMismatch(f"side state has {a.size} amplitudes, expected {D}")
    return a


def product_energy(H, psi1, psi2) -> float:
    """``<psi1 psi2| H |psi1 psi2>`` evaluated term by term."""
    if isinstance(H, EmbeddedHamiltonian):
        a, b = _amps(psi1, H.side_dim), _amps(psi2, H.side_dim)
        return float(sum(t.weight * t.value(a, b) for t in H.terms))
    S = _as_separable(H)
    return S.energy(_amps(psi1, S.side_dim), _amps(psi2, S.side_dim))


@dataclass(frozen=True)
class SeparableResult:
    energy: float
    psi1: StateVector
    psi2: StateVector
    trace: tuple          # best energy of each restart


def _ground(h: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(h)
    return vecs[:, 0]


def _refine(S: SeparableOperator, a: np.ndarray, b: np.ndarray) -> tuple:
    """Quasi-Newton polish of both sides at once over unnormalised vectors."""
    D = S.side_dim

    def unpack(x):
        z = x[: 2 * D] + 1j * x[2 * D:]
        return z[:D], z[D:]

    def fun(x):
        u, v = unpack(x)
        nu, nv = np.vdot(u, u).real, np.vdot(v, v).real
        hu = S.effective(v / math.sqrt(nv), "L")
        hv = S.effective(u / math.sqrt(nu), "R")
        f = np.vdot(u, hu @ u).real / nu
        gu = 2 * (hu @ u - f * u) / nu
        gv = 2 * (hv @ v - f * v) / nv
        g = np.concatenate([gu, gv])
        return f, np.concatenate([g.real, g.imag])

    z = np.concatenate([a, b])
    res = optimize.minimize(fun, np.concatenate([z.real, z.imag]), jac=True, method="L-BFGS-B",
                            options={"maxiter": 5000, "gtol": 1e-12, "ftol": 1e-15})
    u, v = unpack(res.x)
    return u / np.linalg.norm(u), v / np.linalg.norm(v)


def minimize_product_energy(H, restarts: int | None = None, seed: int | None = None,
                            max_iter: int = 2000, tol: float | None = None) -> SeparableResult:
    """Alternating minimisation over product states, best of seeded restarts.

    Each half-step replaces one side by the ground state of its effective
    operator, so the energy never increases.  A strong symmetry term makes
    the sweeps crawl, so a joint quasi-Newton step runs between two rounds
    of sweeps.  The result is an upper bound on the separable minimum.
    """
    S = _as_separable(H)
    D = S.side_dim
    if D > 1 << 10:
        raise errors.DenseLimitExceeded(f"side dimension {D} exceeds 2^10")
    cfg = config.current()
    restarts = cfg.restarts if restarts is None else restarts
    seed = cfg.seed if seed is None else seed
    tol = cfg.tol.convergence if tol is None else tol
    n = D.bit_length() - 1
    rng = np.random.default_rng(seed)

    def sweeps(a, b, limit):
        e_old = S.energy(a, b)
        for _ in range(limit):
            a = _ground(S.effective(b, "L"))
            b = _ground(S.effective(a, "R"))
            e = S.energy(a, b)
            if abs(e_old - e) <= tol:
                return a, b, e, True
            e_old = e
        return a, b, e_old, False

    best, trace = None, []
    for _ in range(max(1, restarts)):
        a = random_state(n, rng).amps
        b = random_state(n, rng).amps
        a, b, e, _ = sweeps(a, b, 50)
        a2, b2 = _refine(S, a, b)
        if S.energy(a2, b2) <= e:
            a, b = a2, b2
        a, b, e, done = sweeps(a, b, max_iter)
        if not done:
            raise errors.NoConvergence(f"alternating minimisation did not settle in {max_iter} sweeps")
        trace.append(e)
        if best is None or e < best[0]:
            best = (e, a, b)
    e, a, b = best
    return SeparableResult(float(e), StateVector.from_amps(a, normalize=True),
                           StateVector.from_amps(b, normalize=True), tuple(trace))


def grid_minimum(H, resolution: float = 1e-2) -> float:
    """Exhaustive Bloch-sphere grid search for one qubit per side.

    With only diagonal terms and no symmetry term the energy ignores the
    azimuth, so the grid runs over polar angles alone.
    """
    S = _as_separable(H)
    if S.side_dim != 2:
        raise errors.InputError("grid search needs one qubit per side")
    th = np.arange(0, math.pi + resolution / 2, resolution)
    diagonal = not S.sym_weight and all(
        M is None or np.allclose(M, np.diag(np.diag(M))) for _, A, B in S.terms for M in (A, B))
    if diagonal:
        st = np.stack([np.cos(th / 2), np.sin(th / 2)], axis=1).astype(complex)
        k = len(st)
        tot = np.zeros((k, k))
        for w, A, B in S.terms:
            va = np.ones(k) if A is None else np.einsum("ki,ij,kj->k", st.conj(), A, st).real
            vb = np.ones(k) if B is None else np.einsum("ki,ij,kj->k", st.conj(), B, st).real
            tot += w * np.outer(va, vb)
        return float(tot.min())
    # grid over the right side only; the best left state is an exact 2x2 ground state
    T, F = np.meshgrid(th, np.arange(0, 2 * math.pi, resolution), indexing="ij")
    st = np.stack([np.cos(T / 2).ravel(), (np.exp(1j * F) * np.sin(T / 2)).ravel()], axis=1)
    h = np.zeros((len(st), 2, 2), dtype=complex)
    eye = np.eye(2)
    for w, A, B in S.terms:
        s = np.ones(len(st)) if B is None else np.einsum("ki,ij,kj->k", st.conj(), B, st).real
        h += w * s[:, None, None] * (eye if A is None else A)
    if S.sym_weight:
        h += 0.5 * S.sym_weight * (eye - np.einsum("ki,kj->kij", st, st.conj()))
    return float(np.linalg.eigvalsh(h)[:, 0].min())


def qma2_acceptance(H, psi1, psi2) -> float:
    """``1 - E / W``: pick term i with probability w_i / W, reject on its projector."""
    S = _as_separable(H)
    W = S.total_weight
    if not W > 0:
        raise errors.ZeroWeight("total term weight must be positive")
    return 1.0 - product_energy(H, psi1, psi2) / W


def sampled_acceptance(H, psi1, psi2, samples: int = 100_000, rng: np.random.Generator | None = None) -> tuple:
    """(Monte-Carlo estimate, standard error) of the verifier's acceptance."""
    S = _as_separable(H)
    W = S.total_weight
    if not W > 0:
        raise errors.ZeroWeight("total term weight must be positive")
    a, b = _amps(psi1, S.side_dim), _amps(psi2, S.side_dim)
    rng = rng if rng is not None else np.random.default_rng(config.current().seed)
    p = np.array(S.weights()) / W
    rej = np.clip(np.array(S.values(a, b)), 0, 1)
    picks = rng.multinomial(samples, p)
    rejected = rng.binomial(picks, rej).sum()
    est = 1 - rejected / samples
    return float(est), math.sqrt(max(est * (1 - est), 1e-300) / samples)


def swap_test(psi1, psi2) -> float:
    a = psi1.amps if isinstance(psi1, StateVector) else np.asarray(psi1, dtype=complex)
    b = psi2.amps if isinstance(psi2, StateVector) else np.asarray(psi2, dtype=complex)
    if a.size != b.size:
        raise errors.DimensionMismatch(f"states have {a.size} and {b.size} amplitudes")
    return 0.5 * (1 + abs(np.vdot(a, b)) ** 2)


@dataclass(frozen=True)
class MipParams:
    proof_length: int
    qubits: float
    gap_log2: float       # log2 of the promise gap

    @property
    def gap(self) -> float:
        """Gap as a float (0.0 once it underflows)."""
        return 2.0 ** self.gap_log2 if self.gap_log2 > -1074 else 0.0


def mip_embedding_params(t: int, u: int, v: int, p: int, r: int, c, s) -> MipParams:
    """Proof length ``p t 2^(t r)``, qubits ``u + v + log2(t r log2(p t))``,
    gap ``[2^(t r log2(p t)) (c - s)]^-1``.  Integers stay exact."""
    for name, val in (("t", t), ("u", u), ("v", v), ("p", p), ("r", r)):
        if int(val) != val or val < 1:
            raise errors.InputError(f"{name} must be a positive integer, got {val}")
    c, s = (Fraction(repr(x)) if isinstance(x, float) else Fraction(x) for x in (c, s))
    if not c > s:
        raise errors.InvalidThresholds(f"completeness {c} must exceed soundness {s}")
    t, u, v, p, r = map(int, (t, u, v, p, r))
    length = p * t * (1 << (t * r))
    lg = t * r * math.log2(p * t)
    qubits = u + v + (math.log2(lg) if lg > 0 else -math.inf)
    return MipParams(length, qubits, -lg - math.log2(c - s))


def asymptotic_weights(m: int, r: int, k: int) -> dict:
    """Exact integer weights ``M^31``, ``72 M^31``, ``M^(66+2k)`` with ``M = (m+1) 2^r``."""
    M = (m + 1) << r
    return {"M": M, "in": M ** 31, "prop": 72 * M ** 31, "sym": M ** (66 + 2 * k)}
