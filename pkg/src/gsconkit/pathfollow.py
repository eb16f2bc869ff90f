"""Following Lipschitz paths of states with 2-local gates, and ground-space traversal.

A path is discretised into N steps.  Each step maps the current simulated
state onto the next path point with a two-dimensional rotation, which is
expanded in Pauli words and decomposed exactly into 2-local gates.  N starts
at ceil(K / eps) and doubles until simulation shows every intermediate
state within eps of the path.
"""
from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import config, errors
from .decomp import decompose_small_unitary, small_unitary_bound
from .qcore import DenseOperator, GateSequence, LocalGate, StateVector, _mat, apply_gate, eig_low

DEGENERATE_MARGIN = 0.1


@dataclass(frozen=True)
class Path:
    n: int
    eval: Callable[[float], np.ndarray]
    K: float
    name: str = "path"

    def __call__(self, t: float) -> np.ndarray:
        return self.eval(t)

    def check(self, rng: np.random.Generator, samples: int = 64) -> float:
        """Largest sampled ||f(a)-f(b)|| - K|a-b|; raises InvalidPath if above tolerance."""
        tol = config.current().tol
        worst = -math.inf
        for _ in range(samples):
            a, b = rng.uniform(0, 1, 2)
            fa, fb = self.eval(a), self.eval(b)
            for f in (fa, fb):
                if abs(np.linalg.norm(f) - 1) > 1e-10:
                    raise errors.InvalidPath("path leaves the unit sphere")
            worst = max(worst, np.linalg.norm(fa - fb) - self.K * abs(a - b))
        if worst > tol.lipschitz:
            raise errors.InvalidPath(f"Lipschitz violation {worst:.3e}")
        return worst


def great_circle(a: StateVector, b: StateVector) -> Path:
    """Shortest arc from a to b in the real geometry of C^d."""
    x, y = a.amps, b.amps
    c = float(np.vdot(x, y).real)
    theta = math.acos(max(-1.0, min(1.0, c)))
    if theta < 1e-15:
        return Path(a.n, lambda t: x.copy(), 0.0, "constant")
    if math.pi - theta < 1e-12:
        raise errors.DegeneratePair("antipodal endpoints have no unique great circle")
    e = y - c * x
    e = e / np.linalg.norm(e)
    return Path(a.n, lambda t: math.cos(t * theta) * x + math.sin(t * theta) * e, theta, "great-circle")


def piecewise(states) -> Path:
    """Great-circle legs through the listed states, equal parameter time each."""
    legs = [great_circle(a, b) for a, b in zip(states, states[1:])]
    if not legs:
        raise errors.InputError("need at least two states")
    m = len(legs)

    def f(t):
        i = min(int(t * m), m - 1)
        return legs[i](t * m - i)

    return Path(states[0].n, f, m * max(leg.K for leg in legs), "piecewise")


def toward_ground(psi: StateVector, mu: StateVector, reverse: bool = False) -> Path:
    """cos((1-t)th) mu + sin((1-t)th) nu from psi to mu (or mu to psi if reverse).

    The phase of ``mu`` is kept as given; any relative phase between psi and
    mu is carried as a global phase e^{i g s} along the path.
    """
    m, p = mu.amps, psi.amps
    c = complex(np.vdot(m, p))
    r = abs(c)
    g = math.atan2(c.imag, c.real) if r > 1e-15 else 0.0
    theta = math.acos(max(-1.0, min(1.0, r)))
    rest = p - c * m
    s = np.linalg.norm(rest)
    nu = rest * np.exp(-1j * g) / s if s > 1e-15 else np.zeros_like(m)
    K = math.hypot(theta, g)

    def f_forward(t):  # t=0 -> mu, t=1 -> psi
        return np.exp(1j * g * t) * (math.cos(t * theta) * m + math.sin(t * theta) * nu)

    if reverse:
        return Path(psi.n, f_forward, K, "from-ground")
    return Path(psi.n, lambda t: f_forward(1.0 - t), K, "to-ground")


# ---------------------------------------------------------------- rotations

def _rotation(x: np.ndarray, y: np.ndarray) -> tuple:
    """theta and generator H (dense) with exp(iH) x = y, H supported on span{x, y}."""
    c = complex(np.vdot(x, y))
    a, b = c.real, c.imag
    theta = math.acos(max(-1.0, min(1.0, a)))
    d = x.size
    if theta == 0.0:
        return 0.0, np.zeros((d, d), dtype=complex)
    if theta > math.pi - DEGENERATE_MARGIN:
        raise errors.DegeneratePair(f"theta = {theta:.4f} too close to pi")
    rest = y - c * x
    s = float(np.linalg.norm(rest))
    if s > 1e-14:
        e2 = rest / s
    else:
        # y is a phase multiple of x: any unit vector orthogonal to x works
        k = int(np.argmin(np.abs(x)))
        e2 = -np.conj(x[k]) * x
        e2[k] += 1.0
        e2 /= np.linalg.norm(e2)
        s = 0.0
    sin_t = math.sqrt(b * b + s * s)
    scale = theta / sin_t if sin_t > 0 else 1.0
    h2 = scale * np.array([[b, 1j * s], [-1j * s, -b]])  # theta/sin(theta) (b Z - s Y)
    E = np.column_stack([x, e2])
    return theta, E @ h2 @ E.conj().T


def rotation_between(psi: StateVector, phi: StateVector) -> tuple:
    """(theta, H) with theta = arccos Re<psi|phi>, exp(iH) psi = phi, ||H|| = theta."""
    if psi.dim != phi.dim:
        raise errors.DimensionMismatch("states have different dimensions")
    theta, h = _rotation(psi.amps, phi.amps)
    return theta, DenseOperator(h, hermitian=True)


@dataclass(frozen=True)
class MapReport:
    sequence: GateSequence
    theta: float
    endpoint_error: float
    drift: float
    c1: float
    c2: float


def map_close_vectors(psi: StateVector, phi: StateVector, eps: float, strict: bool = True) -> MapReport:
    """Gates taking psi to within O(d^2 eps^2) of phi, with small intermediate drift."""
    dist = float(np.linalg.norm(psi.amps - phi.amps))
    if dist > eps * (1 + 1e-12):
        raise errors.InputError(f"||psi - phi|| = {dist:.3e} exceeds eps = {eps:.3e}")
    n, d = psi.n, psi.dim
    if strict and eps >= small_unitary_bound(n):
        raise errors.NormTooLarge(f"eps = {eps:.3e} >= (pi/16)^(2n) = {small_unitary_bound(n):.3e}")
    theta, h = _rotation(psi.amps, phi.amps)
    res = decompose_small_unitary(h, strict=False, verify=False)
    drift = 0.0
    a = psi.amps
    for g in res.sequence:
        a = apply_gate(a, g, n)
        drift = max(drift, float(np.linalg.norm(a - psi.amps)))
    end = float(np.linalg.norm(a - phi.amps))
    e = max(eps, 1e-300)
    return MapReport(res.sequence, theta, end, drift, end / (d * d * e * e), drift / (n * n * d * d * e ** (1 / (2 * n))))


# ---------------------------------------------------------------- following

@dataclass(frozen=True)
class FollowReport:
    sequence: GateSequence
    M: int
    N: int
    pointwise_err: float
    argmax: int
    checkpoints: tuple        # (t, ||psi_t - f(t/M)||)
    energies: tuple = ()      # (t, <psi_t|H|psi_t>)
    final: np.ndarray = field(default=None, repr=False)

    @property
    def endpoint_err(self) -> float:
        return self.checkpoints[-1][1]

    def max_energy(self) -> float:
        return max((e for _, e in self.energies), default=float("nan"))


_PAD = None


def _pad_gate() -> LocalGate:
    global _PAD
    if _PAD is None:
        _PAD = LocalGate.rotation((0,), "I", 0.0)
    return _PAD


def _sample_every(M: int) -> int:
    cap = config.current().energy_sample_cap
    return 1 if M <= cap else math.ceil(M / cap)


def _run(path: Path, N: int, start: np.ndarray, H: np.ndarray | None):
    n = path.n
    segments = []
    cur = start
    for i in range(N):
        target = path((i + 1) / N)
        _, h = _rotation(cur / np.linalg.norm(cur), target)
        gates = decompose_small_unitary(h, strict=False, verify=False).sequence.gates
        for g in gates:
            cur = apply_gate(cur, g, n)
        cur = cur / np.linalg.norm(cur)
        segments.append(gates)
    G = max((len(s) for s in segments), default=0)
    M = N * G
    gates = []
    for s in segments:
        gates.extend(s)
        gates.extend([_pad_gate()] * (G - len(s)))
    seq = GateSequence(n, tuple(gates))

    every = _sample_every(M)
    a = start
    err0 = float(np.linalg.norm(a - path(0.0)))
    worst, arg = err0, 0
    checkpoints = [(0, err0)]
    energies = [(0, float(np.vdot(a, H @ a).real))] if H is not None else []
    for t, g in enumerate(seq.gates, start=1):
        a = apply_gate(a, g, n)
        err = float(np.linalg.norm(a - path(t / M)))
        keep = t % every == 0 or (G and t % G == 0) or t == M
        if err > worst:
            worst, arg = err, t
            keep = True
        if keep:
            checkpoints.append((t, err))
            if H is not None:
                energies.append((t, float(np.vdot(a, H @ a).real)))
    if M == 0:
        err1 = float(np.linalg.norm(a - path(1.0)))
        if err1 > worst:
            worst, arg = err1, 0
    return FollowReport(seq, M, N, worst, arg, tuple(checkpoints), tuple(energies), a)


def follow_path(path: Path, eps: float, start: StateVector | None = None, H=None,
                accept: Callable[[FollowReport], bool] | None = None,
                progress: bool = False) -> FollowReport:
    """Emit 2-local gates whose intermediate states stay within eps of the path.

    ``start`` defaults to f(0); a different start (e.g. the end state of a
    previous leg) should itself be within eps of f(0).  ``accept`` replaces
    the pointwise stopping rule of the subdivision loop.
    """
    if eps <= 0:
        raise errors.InputError("eps must be positive")
    a0 = path(0.0) if start is None else start.amps
    hm = None if H is None else _mat(H)
    cap = config.current().subdivision_cap
    N = max(1, math.ceil(path.K / eps))
    while N <= cap:
        rep = _run(path, N, a0, hm)
        if progress:
            print(f"[follow-path] N={N} M={rep.M} err={rep.pointwise_err:.3e}", file=sys.stderr)
        if (accept(rep) if accept else rep.pointwise_err <= eps):
            return rep
        N *= 2
    raise errors.SubdivisionLimit(f"no N <= {cap} met eps = {eps}")


# ---------------------------------------------------------------- traversal

@dataclass(frozen=True)
class TraversalReport:
    sequence: GateSequence
    legs: tuple
    eta: float
    delta: float
    ground_energy: float
    max_energy: float
    argmax: int
    final_distance: float
    energies: tuple

    @property
    def ok(self) -> bool:
        tol = config.current().tol.energy
        return self.max_energy <= self.eta + self.delta + tol and self.final_distance <= self.delta


def _check_range(h: np.ndarray) -> None:
    w = np.linalg.eigvalsh(h)
    tol = config.current().tol.psd
    if w[0] < -tol:
        raise errors.NegativeEigenvalue(f"lambda_min = {w[0]:.3e} < 0")
    if w[-1] > 1 + tol:
        raise errors.InputError(f"lambda_max = {w[-1]:.6g} > 1; rescale first")


def traverse_ground_space(H, psi: StateVector, phi: StateVector, delta: float,
                          eta: float | None = None, progress: bool = False) -> TraversalReport:
    """2-local gates taking psi to within delta of phi through energies <= eta + delta.

    Route: psi -> ground state mu -> phi along the two arcs that only trade
    amplitude with mu, so the path energy never exceeds the endpoint energies.
    """
    if not (isinstance(H, DenseOperator) and H.hermitian):
        H = DenseOperator.herm(_mat(H))
    h = H.entries
    _check_range(h)
    e_psi, e_phi = psi.expectation(h), phi.expectation(h)
    if eta is None:
        eta = max(e_psi, e_phi)
    tol = config.current().tol.energy
    if max(e_psi, e_phi) > eta + tol:
        raise errors.EnergyPreconditionViolated(f"endpoint energies {e_psi:.4g}, {e_phi:.4g} exceed eta = {eta:.4g}")
    if delta <= 0:
        raise errors.InputError("delta must be positive")
    lam, mu = eig_low(H)
    cap = eta + delta

    def leg_ok(rep):
        # pointwise eps = delta/2 is sufficient; accept earlier when the
        # measured energies and endpoint already meet the traversal targets
        if rep.pointwise_err <= delta / 2:
            return True
        return rep.max_energy() <= cap and rep.endpoint_err <= delta / 2

    leg1 = follow_path(toward_ground(psi, mu), delta / 2, H=h, accept=leg_ok, progress=progress)
    leg2 = follow_path(toward_ground(phi, mu, reverse=True), delta / 2,
                       start=StateVector.from_amps(leg1.final, normalize=True), H=h,
                       accept=leg_ok, progress=progress)
    seq = leg1.sequence.then(leg2.sequence)
    energies = list(leg1.energies) + [(t + leg1.M, e) for t, e in leg2.energies[1:]]
    top = max(energies, key=lambda p: p[1])
    final = float(np.linalg.norm(leg2.final - phi.amps))
    return TraversalReport(seq, (leg1, leg2), eta, delta, lam, top[1], top[0], final, tuple(energies))


def rescale_hamiltonian(H) -> tuple:
    """(H / s, s) with s = ||H|| if ||H|| > 1, else (H, 1)."""
    h = _mat(H)
    w = np.linalg.eigvalsh((h + h.conj().T) / 2)
    if w[0] < -config.current().tol.psd:
        raise errors.NegativeEigenvalue(f"lambda_min = {w[0]:.3e} < 0")
    s = float(w[-1]) if w[-1] > 1.0 else 1.0
    return DenseOperator(h / s, hermitian=True), s
