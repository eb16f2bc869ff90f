"""Built-in check suites behind ``gsconkit verify-all``.

Each suite returns ``(name, passed, value, bound, relation)`` tuples.  They
are small, seeded and deterministic so their reports can be diffed.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from . import config, errors
from . import flux as FX
from . import gscon as G
from . import pathfollow as PF
from .decomp import (
    decompose_pauli_rotation, decompose_small_unitary, depth4_solve, locality_level, pulse_bound,
    trotter_first_order, weight,
)
from .qcore import (
    DenseOperator, GateSequence, pauli_matrix, pauli_rotation, pauli_word_matrix, random_hermitian,
    random_state, spectral_norm,
)

SUITES = ("core", "decomp", "pathfollow", "gscon", "flux")


def _le(name, value, bound):
    return (name, value <= bound, float(value), float(bound), "<=")


def core() -> list:
    rng = np.random.default_rng(config.current().seed)
    out = []
    psi = random_state(3, rng)
    out.append(_le("random state norm deviation", abs(np.linalg.norm(psi.amps) - 1), 1e-12))
    a, b = pauli_matrix("X"), pauli_matrix("Y")
    out.append(_le("XY = iZ", float(np.max(np.abs(a @ b - 1j * pauli_matrix("Z")))), 0.0))
    h = random_hermitian(8, rng)
    w = np.linalg.eigvalsh(h)
    out.append(_le("spectral norm vs eigenvalues", abs(spectral_norm(h) - max(abs(w))), 1e-12))
    return out


def decomp() -> list:
    tol = config.current().tol
    out = []
    worst_err, worst_pulse, worst_count = 0.0, 0.0, 0
    for word in ("XX", "XYZ", "ZZZZ", "XYZXY"):
        k = locality_level(weight(word))
        for t in (1e-6, 1e-4, 1e-2):
            try:
                seq = decompose_pauli_rotation(word, t)
            except errors.PulseOutOfRange:
                continue
            err = float(np.max(np.abs(seq.unitary() - pauli_rotation(word, t))))
            worst_err = max(worst_err, err)
            worst_count = max(worst_count, len(seq) - 4 ** k)
            bound = pulse_bound(k, t)
            top = max(abs(g.pulse[0]) for g in seq.gates if g.pulse is not None)
            worst_pulse = max(worst_pulse, top / bound - 1)
    out.append(_le("exact rotation product error", worst_err, tol.exact_product))
    out.append(_le("gate count above 4^k", worst_count, 0))
    out.append(_le("pulse above T(k), relative", worst_pulse, 1e-12))
    t = 1e-3
    d = depth4_solve("XI", "ZZ", t)
    out.append(_le("depth-4 pulse sum vs sqrt(2t)", d.pulse_sum() / math.sqrt(2 * t), 1.0))
    H = [0.1 * pauli_matrix("X"), 0.1 * pauli_matrix("Z")]
    r = trotter_first_order(H, 1).error / trotter_first_order(H, 4).error
    out.append(("first-order error ratio s=1/s=4", 3 <= r <= 5, r, [3, 5], "in"))
    res = decompose_small_unitary(1e-6 * pauli_word_matrix("XZ"))
    out.append(_le("small unitary arity", res.sequence.max_arity(), 2))
    return out


def pathfollow() -> list:
    rng = np.random.default_rng(config.current().seed)
    out = []
    for n, eps in ((1, 0.05), (2, 0.05)):
        a, b = random_state(n, rng), random_state(n, rng)
        rep = PF.follow_path(PF.great_circle(a, b), eps)
        out.append(_le(f"great circle n={n} pointwise error", rep.pointwise_err, eps))
    h = random_hermitian(4, rng)
    w, v = np.linalg.eigh(h)
    h = (h - w[0] * np.eye(4)) / (w[-1] - w[0])
    H = DenseOperator(h, hermitian=True)
    psi, phi = random_state(2, rng), random_state(2, rng)
    tr = PF.traverse_ground_space(H, psi, phi, 0.05)
    out.append(_le("traversal max energy", tr.max_energy, tr.eta + tr.delta))
    out.append(_le("traversal final distance", tr.final_distance, tr.delta))
    return out


def gscon() -> list:
    out = []
    # (x1 or x2) and (not x1 or x3): 011 reaches 101 through 111
    inst = G.StConnInstance(3, ((1, 2), (-1, 3)), "011", "101", 1)
    path = G.stconn_solve(inst)
    out.append(("stconn path found", path is not None, None if path is None else len(path) - 1, None, "steps"))
    if path is not None:
        G.validate_stconn_path(inst, path)
        g = G.reduce_stconn_to_gscon(inst)
        rep = G.verify_gscon_sequence(g, G.flip_sequence(path))
        out.append(("flip sequence verdict", rep.verdict == G.WITNESS, rep.verdict, G.WITNESS, "=="))
    lifted = G.lift_stconn_locality(inst, 2)
    same = (G.stconn_solve(lifted) is not None) == (path is not None)
    out.append(("lift preserves connectivity", same, same, True, "=="))
    A = np.diag([0.25, 0.75])
    wit = GateSequence(1, ())
    g, seq = G.reduce_lh_to_gscon(A, 0.3, 0.7, wit)
    energies = [float(np.vdot(s, g.H.entries @ s).real) for s in seq.trajectory(g.psi)]
    expect = [0.0] * len(energies)
    expect[len(wit) + 1] = 0.25
    out.append(_le("GO honest energy trace deviation", max(abs(x - y) for x, y in zip(energies, expect)), 1e-9))
    return out


def flux() -> list:
    out = []
    grid = np.linspace(0, 2, 9)
    worst = max(abs(FX.residual_G(a, b).lam_min - (a + b - math.hypot(a, b)))
                for a, b in itertools.product(grid, grid) if a or b)
    out.append(_le("lambda_min(G) closed form", worst, 1e-10))
    e = FX.residual_G(1.0, 1.0).lam_min
    out.append(_le("complement minimum vs 2 - sqrt 2", abs(e - (2 - math.sqrt(2))), 1e-9))
    X = pauli_matrix("X")
    w = FX.find_fooling_null(X, np.eye(2))
    out.append(("fooling witness for (X, I)", w is not None and w.max_residual <= 1e-9,
                None if w is None else w.max_residual, 1e-9, "<="))
    out.append(("no fooling witness for (iX, I)", FX.find_fooling_null(1j * X, np.eye(2)) is None,
                None, None, "none"))
    circ = FX.toy_circuit()
    H = FX.build_flux_hamiltonian(circ)
    alpha, y = circ.max_acceptance()
    h = FX.history_state(circ, y)
    ap = H.thresholds.alpha_prime
    out.append(_le("honest energy vs alpha'", FX.product_energy(H, h, h), ap + 1e-9))
    for group in ("in", "prop", "sym"):
        out.append(_le(f"honest {group} energy", FX.product_energy(H.select(group), h, h), 1e-12))
    zero = np.eye(1 << circ.reg_qubits)[0]
    L, R = FX.cheating_state(circ, zero, zero)
    out.append(_le("cheating prop energy", FX.product_energy(H.select("prop"), L, R), 1e-12))
    es = FX.product_energy(H.select("sym"), L, R)
    out.append(_le("cheating sym energy vs w_sym/2", abs(es - H.weights["sym"] / 2), 1e-10))
    gap = FX.product_energy(H, L, R) - FX.product_energy(H, h, h)
    out.append(("cheating energy above honest", gap >= 10, gap, 10.0, ">="))
    acc = FX.qma2_acceptance(H, h, h)
    out.append(_le("acceptance identity", abs(acc - (1 - FX.product_energy(H, h, h) / H.total_weight)), 1e-12))
    S = H.sparse()
    rng = np.random.default_rng(config.current().seed)
    rows = rng.choice(H.dim, size=256, replace=False)
    bad, most = 0.0, 0
    for i in rows:
        ent = FX.row_oracle(H, int(i))
        most = max(most, len(ent))
        ref = S.getrow(int(i)).toarray().ravel()
        got = np.zeros_like(ref)
        for c, v in ent:
            got[c] = v
        bad = max(bad, float(np.max(np.abs(got - ref))))
    out.append(_le("row oracle vs matrix (256 rows)", bad, 1e-12))
    out.append(_le("row nonzeros", most, FX.row_nnz_bound(H)))
    err = FX.conjugated_chain_error(circ, FX.honest_profile(circ, y))
    out.append(_le("conjugated chain", err, 1e-10))
    return out


_RUNNERS = {"core": core, "decomp": decomp, "pathfollow": pathfollow, "gscon": gscon, "flux": flux}


def run(name: str) -> list:
    if name not in _RUNNERS:
        raise errors.InputError(f"unknown suite {name!r}; choose from {', '.join(SUITES)} or all")
    return _RUNNERS[name]()
