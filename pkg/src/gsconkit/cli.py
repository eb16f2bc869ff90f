"""Command-line entry point.

Every subcommand builds a report: the run configuration, the inputs, a list
of checks (name, measured value, bound, pass/fail) and a result block.  The
report goes to stdout as JSON or text; ``--out DIR`` also writes it there
together with any artefacts (gate sequences, CSV traces, instances).

Exit codes: 0 all checks passed, 1 a check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import os
import sys
from typing import Callable

import numpy as np

from . import BIT_ORDER, __version__, config, errors, jsonio
from . import gscon as G
from . import pathfollow as PF
from .decomp import decompose_pauli_rotation, decompose_small_unitary, locality_level, pulse_bound, weight
from .qcore import StateVector, eig_low, pauli_matrix, pauli_rotation
from . import flux as FX
from .flux import analysis as FA

COMMANDS = ("decompose", "follow-path", "traverse", "gscon-check", "stconn", "lift", "reduce",
            "embed", "opt-separable", "probe", "mip-params", "verify-all")


class Report:
    def __init__(self, command: str, cfg: config.Config, inputs: dict):
        self.command = command
        self.cfg = cfg
        self.inputs = inputs
        self.checks: list = []
        self.result: dict = {}
        self.artefacts: dict = {}   # file name -> text
        self.error: dict | None = None

    def check(self, name: str, passed: bool, value=None, bound=None, relation: str = "<=") -> bool:
        self.checks.append({"name": name, "passed": bool(passed), "value": _plain(value),
                            "bound": _plain(bound), "relation": relation})
        return bool(passed)

    @property
    def passed(self) -> bool:
        return self.error is None and all(c["passed"] for c in self.checks)

    def exit_code(self) -> int:
        if self.error is not None:
            return self.error["exit_code"]
        return 0 if self.passed else 1

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "version": f"gsconkit {__version__}",
            "convention": BIT_ORDER,
            "config": self.cfg.as_dict(),
            "inputs": _plain(self.inputs),
            "checks": self.checks,
            "result": _plain(self.result),
            "error": self.error,
            "passed": self.passed,
            "exit_code": self.exit_code(),
        }

    def text(self) -> str:
        lines = [f"gsconkit {__version__} {self.command}"]
        for c in self.checks:
            mark = "PASS" if c["passed"] else "FAIL"
            tail = "" if c["bound"] is None else f" {c['relation']} {_fmt(c['bound'])}"
            lines.append(f"  {mark} {c['name']}: {_fmt(c['value'])}{tail}")
        for k in sorted(self.result):
            lines.append(f"  {k} = {_fmt(self.result[k])}")
        if self.error:
            lines.append(f"  ERROR {self.error['type']}: {self.error['message']}")
        lines.append(f"  exit {self.exit_code()}")
        return "\n".join(lines) + "\n"


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, list) and len(v) > 8:
        return f"[{len(v)} items]"
    return str(v)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(x)) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


# ---------------------------------------------------------------- helpers

def _state(spec: str, where: str) -> StateVector:
    """A bit string or a path to a state JSON file."""
    if spec and set(spec) <= {"0", "1"}:
        return StateVector.from_bits(spec)
    return jsonio.dec_state(jsonio.load(spec), where)


def _hamiltonian(path: str):
    return jsonio.dec_hamiltonian(jsonio.load(path), path)


def _circuit(args):
    if getattr(args, "circuit", None):
        return jsonio.dec_circuit(jsonio.load(args.circuit), args.circuit)
    return FX.toy_circuit(args.alpha if getattr(args, "alpha", None) is not None else 0.9)


def _weights(items) -> dict | None:
    if not items:
        return None
    out = {}
    for item in items:
        k, sep, v = item.partition("=")
        if not sep:
            raise errors.InputError(f"weight override {item!r} must look like name=value")
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise errors.InputError(f"weight override {item!r}: bad number") from None
    return out


def _cnf(args):
    try:
        with open(args.cnf, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise errors.MalformedInput(f"{args.cnf}: {exc.strerror}") from None
    nvars, clauses = G.parse_dimacs(text)
    x, y = args.x, args.y
    # endpoints may be given as "c x <bits>" / "c y <bits>" comment lines
    for line in text.splitlines():
        parts = line.split()
        if len(parts) == 3 and parts[0] == "c" and parts[1] in ("x", "y"):
            if parts[1] == "x" and x is None:
                x = parts[2]
            if parts[1] == "y" and y is None:
                y = parts[2]
    if x is None or y is None:
        raise errors.InputError("endpoints x and y are required (flags or 'c x'/'c y' lines)")
    return G.StConnInstance(nvars, tuple(clauses), x, y, getattr(args, "l", 1) or 1)


_GATES = {"I": np.eye(2), "X": pauli_matrix("X"), "Y": pauli_matrix("Y"), "Z": pauli_matrix("Z"),
          "iX": 1j * pauli_matrix("X"), "H": np.array([[1, 1], [1, -1]]) / math.sqrt(2)}


def _gate2(name: str) -> np.ndarray:
    if name not in _GATES:
        raise errors.InputError(f"unknown gate {name!r}; choose from {', '.join(_GATES)}")
    return _GATES[name]


# ---------------------------------------------------------------- commands

def cmd_decompose(args, rep: Report) -> None:
    tol = rep.cfg.tol
    if args.word:
        if args.t is None:
            raise errors.InputError("--t is required with --word")
        seq = decompose_pauli_rotation(args.word, args.t, strict=not args.loose)
        k = locality_level(weight(args.word))
        err = float(np.max(np.abs(seq.unitary() - pauli_rotation(args.word, args.t))))
        pulses = [abs(g.pulse[0]) for g in seq.gates if g.pulse is not None]
        rep.check("product error", err <= tol.exact_product, err, tol.exact_product)
        rep.check("gate count", len(seq) <= 4 ** k, len(seq), 4 ** k)
        bound = pulse_bound(k, args.t)
        rep.check("max pulse", max(pulses, default=0.0) <= bound + 1e-15, max(pulses, default=0.0), bound)
        rep.result.update(gates=len(seq), level=k, total_pulse=seq.total_pulse, max_arity=seq.max_arity())
    elif args.hamiltonian:
        H = _hamiltonian(args.hamiltonian)
        res = decompose_small_unitary(H, strict=not args.loose)
        seq = res.sequence
        rep.check("max arity", seq.max_arity() <= 2, seq.max_arity(), 2)
        rep.result.update(gates=len(seq), eps=res.eps, error=res.error, drift_sum=res.drift_sum,
                          c1=res.c1, c2=res.c2, total_pulse=seq.total_pulse)
    else:
        raise errors.InputError("give --word and --t, or --hamiltonian")
    rep.artefacts["sequence.json"] = jsonio.dumps(jsonio.enc_sequence(seq))


def cmd_follow_path(args, rep: Report) -> None:
    states = jsonio.load(args.states)
    if isinstance(states, dict):
        states = states.get("states")
    if not isinstance(states, list) or len(states) < 2:
        raise errors.MalformedInput(f"{args.states}: expected a list of at least two states")
    sv = [jsonio.dec_state(s, f"{args.states}[{i}]") for i, s in enumerate(states)]
    H = _hamiltonian(args.hamiltonian) if args.hamiltonian else None
    h = None if H is None else H.entries
    if args.family == "great-circle":
        if len(sv) != 2:
            raise errors.InputError("great-circle takes exactly two states")
        reps = [PF.follow_path(PF.great_circle(*sv), args.eps, H=h, progress=args.progress)]
    elif args.family == "piecewise":
        reps = [PF.follow_path(PF.piecewise(sv), args.eps, H=h, progress=args.progress)]
    else:
        if H is None or len(sv) != 2:
            raise errors.InputError("two-leg-via-ground-state needs --hamiltonian and two states")
        _, mu = eig_low(H)
        r1 = PF.follow_path(PF.toward_ground(sv[0], mu), args.eps, H=h, progress=args.progress)
        r2 = PF.follow_path(PF.toward_ground(sv[1], mu, reverse=True), args.eps, H=h,
                            start=StateVector.from_amps(r1.final, normalize=True), progress=args.progress)
        reps = [r1, r2]
    seq = reps[0].sequence
    for r in reps[1:]:
        seq = seq.then(r.sequence)
    rows, offset = [], 0
    for r in reps:
        en = dict(r.energies)
        for t, e in r.checkpoints:
            if offset and t == 0:
                continue
            rows.append((t + offset, e, en.get(t, "")))
        offset += r.M
    worst = max(r.pointwise_err for r in reps)
    rep.check("pointwise error", worst <= args.eps, worst, args.eps)
    rep.result.update(M=sum(r.M for r in reps), N=[r.N for r in reps], gates=len(seq),
                      endpoint_error=reps[-1].endpoint_err, max_arity=seq.max_arity())
    if h is not None:
        rep.result["max_energy"] = max(r.max_energy() for r in reps)
    rep.artefacts["sequence.json"] = jsonio.dumps(jsonio.enc_sequence(seq))
    rep.artefacts["trace.csv"] = _csv(("step", "pointwise_err", "energy"), rows)


def cmd_traverse(args, rep: Report) -> None:
    H = _hamiltonian(args.hamiltonian)
    if args.rescale:
        H, s = PF.rescale_hamiltonian(H)
        rep.result["rescale"] = s
    psi, phi = _state(args.psi, "psi"), _state(args.phi, "phi")
    tr = PF.traverse_ground_space(H, psi, phi, args.delta, args.eta, progress=args.progress)
    cap = tr.eta + tr.delta
    rep.check("max energy", tr.max_energy <= cap + rep.cfg.tol.energy, tr.max_energy, cap)
    rep.check("final distance", tr.final_distance <= tr.delta, tr.final_distance, tr.delta)
    rep.check("max arity", tr.sequence.max_arity() <= 2, tr.sequence.max_arity(), 2)
    rep.result.update(eta=tr.eta, ground_energy=tr.ground_energy, argmax=tr.argmax, gates=len(tr.sequence))
    rep.artefacts["sequence.json"] = jsonio.dumps(jsonio.enc_sequence(tr.sequence))
    rep.artefacts["trace.csv"] = _csv(("step", "energy"), tr.energies)


def cmd_gscon_check(args, rep: Report) -> None:
    inst = jsonio.dec_instance(jsonio.load(args.instance), args.instance)
    seq = jsonio.dec_sequence(jsonio.load(args.sequence), args.sequence)
    r = G.verify_gscon_sequence(inst, seq)
    rep.check("max energy", r.max_energy <= inst.eta1, r.max_energy, inst.eta1)
    rep.check("final distance", r.final_distance <= inst.eta3, r.final_distance, inst.eta3)
    rep.result.update(verdict=r.verdict, argmax=r.argmax, length=len(seq))
    rep.artefacts["trace.csv"] = _csv(("step", "energy"), enumerate(r.energies))


def cmd_stconn(args, rep: Report) -> None:
    inst = _cnf(args)
    path = G.stconn_solve(inst)
    rep.result.update(nvars=inst.nvars, clauses=len(inst.clauses), connected=path is not None)
    if path is not None:
        try:
            G.validate_stconn_path(inst, path)
            ok = True
        except errors.CheckFailed:
            ok = False
        rep.check("path re-validated", ok, len(path) - 1, None, "steps")
        rep.result["path"] = path


def cmd_lift(args, rep: Report) -> None:
    inst = _cnf(args)
    lifted = G.lift_stconn_locality(inst, args.l2)
    rep.result.update(nvars=lifted.nvars, clauses=len(lifted.clauses), l=lifted.l)
    rep.artefacts["lifted.cnf"] = (f"c x {lifted.x}\nc y {lifted.y}\n" + G.to_dimacs(lifted.nvars, lifted.clauses))
    if lifted.nvars <= rep.cfg.stconn_max_vars:
        a, b = G.stconn_solve(inst) is not None, G.stconn_solve(lifted) is not None
        rep.check("connectivity preserved", a == b, b, a, "==")
        rep.result["connected"] = a


def cmd_reduce(args, rep: Report) -> None:
    if args.kind == "stconn":
        inst = _cnf(args)
        g = G.reduce_stconn_to_gscon(inst)
        path = G.stconn_solve(inst)
        rep.result["connected"] = path is not None
        if path is not None:
            seq = G.flip_sequence(path)
            r = G.verify_gscon_sequence(g, seq)
            rep.check("flip sequence is a witness", r.verdict == G.WITNESS, r.verdict, G.WITNESS, "==")
            rep.artefacts["sequence.json"] = jsonio.dumps(jsonio.enc_sequence(seq))
    else:
        if not (args.hamiltonian and args.witness and args.alpha is not None and args.beta is not None):
            raise errors.InputError("--kind lh needs --hamiltonian, --witness, --alpha, --beta")
        A = _hamiltonian(args.hamiltonian)
        wseq = jsonio.dec_sequence(jsonio.load(args.witness), args.witness)
        g, seq = G.reduce_lh_to_gscon(A, args.alpha, args.beta, wseq)
        psiA = wseq.apply(StateVector.basis(wseq.n, 0))
        eA = psiA.expectation(A)
        h = g.H.entries
        energies = [float(np.vdot(a, h @ a).real) for a in seq.trajectory(g.psi)]
        hit = len(wseq) + 1
        dev = max(abs(e - (eA if i == hit else 0.0)) for i, e in enumerate(energies))
        rep.check("honest energy trace", dev <= 1e-9, dev, 1e-9)
        rep.check("promise gap positive", g.eta2 > g.eta1, g.eta2, g.eta1, ">")
        rep.result.update(energies=energies, witness_energy=eA)
        rep.artefacts["sequence.json"] = jsonio.dumps(jsonio.enc_sequence(seq))
    rep.result.update(n=g.n, k=g.k, l=g.l, m=g.m, eta1=g.eta1, eta2=g.eta2, delta=g.delta)
    rep.artefacts["instance.json"] = jsonio.dumps(jsonio.enc_instance(g))


def _flux_structure(H, rep: Report, oracle_rows: int | None) -> None:
    m = H.circ.m
    rep.check("term count", len(H.terms) == 2 * m + 5, len(H.terms), 2 * m + 5, "==")
    worst = 0.0
    seen = set()
    for t in H.terms:
        for p in (t.left, t.right):
            if p is not None and id(p) not in seen:
                seen.add(id(p))
                d = p.dense()
                worst = max(worst, float(np.max(np.abs(d @ d - d))))
    rep.check("projectors idempotent", worst <= rep.cfg.tol.projector, worst, rep.cfg.tol.projector)
    S = H.sparse()
    rows = range(H.dim) if oracle_rows is None else np.random.default_rng(rep.cfg.seed).choice(
        H.dim, size=min(oracle_rows, H.dim), replace=False)
    bad, most = 0.0, 0
    for i in rows:
        i = int(i)
        entries = FX.row_oracle(H, i)
        most = max(most, len(entries))
        ref = S.getrow(i).toarray().ravel()
        got = np.zeros_like(ref)
        for c, v in entries:
            got[c] = v
        bad = max(bad, float(np.max(np.abs(got - ref))))
    rep.check("row oracle matches matrix", bad <= 1e-12, bad, 1e-12)
    rep.check("row nonzeros", most <= FX.row_nnz_bound(H), most, FX.row_nnz_bound(H))


def cmd_embed(args, rep: Report) -> None:
    circ = _circuit(args)
    H = FX.build_flux_hamiltonian(circ, _weights(args.weight))
    if args.oracle:
        _serve_rows(H)
        rep.result["served"] = True
        return
    _flux_structure(H, rep, None if H.dim <= 1 << 14 else 4096)
    alpha, y = circ.max_acceptance()
    h = FX.history_state(circ, y)
    e = FX.product_energy(H, h, h)
    rep.check("honest energy", e <= H.thresholds.alpha_prime + 1e-9, e, H.thresholds.alpha_prime)
    rep.result.update(m=circ.m, P=list(circ.proof_steps), side_qubits=H.side_qubits, alpha=alpha, proof=y,
                      thresholds=H.thresholds._asdict(), total_weight=H.total_weight)
    rep.artefacts["hamiltonian.json"] = jsonio.dumps(jsonio.enc_embedded(H))


def _serve_rows(H) -> None:
    """Line protocol: a row index per input line, a JSON list of [column, [re, im]] per output line."""
    import json
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        try:
            i = int(line)
            out = [[c, [v.real, v.imag]] for c, v in FX.row_oracle(H, i)]
            print(json.dumps(out), flush=True)
        except (ValueError, errors.GsconkitError) as exc:
            print(json.dumps({"error": str(exc)}), flush=True)


def cmd_opt_separable(args, rep: Report) -> None:
    circ = _circuit(args)
    H = FX.build_flux_hamiltonian(circ, _weights(args.weight))
    res = FX.minimize_product_energy(H, restarts=rep.cfg.restarts, seed=rep.cfg.seed)
    alpha, y = circ.max_acceptance()
    h = FX.history_state(circ, y)
    honest = FX.product_energy(H, h, h)
    rep.check("not above honest energy", res.energy <= honest + 1e-9, res.energy, honest)
    rep.result.update(energy=res.energy, restarts=list(res.trace), honest_energy=honest,
                      alpha_prime=H.thresholds.alpha_prime, beta_prime=H.thresholds.beta_prime,
                      acceptance=FX.qma2_acceptance(H, res.psi1, res.psi2))
    rep.artefacts["psi1.json"] = jsonio.dumps(jsonio.enc_state(res.psi1))
    rep.artefacts["psi2.json"] = jsonio.dumps(jsonio.enc_state(res.psi2))


def cmd_probe(args, rep: Report) -> None:
    if args.what == "residual":
        r = FX.residual_G(args.a, args.b)
        rep.check("lambda_min formula", abs(r.lam_min - r.predicted) <= 1e-10, r.lam_min, r.predicted, "~=")
        rep.result.update(lam_min=r.lam_min)
    elif args.what == "fooling":
        w = FX.find_fooling_null(_gate2(args.u), _gate2(args.v))
        rep.result["witness"] = None if w is None else {"gamma1": jsonio.enc_vector(w.gamma1),
                                                        "gamma2": jsonio.enc_vector(w.gamma2),
                                                        "max_residual": w.max_residual}
        if w is not None:
            rep.check("witness annihilated", w.max_residual <= 1e-9, w.max_residual, 1e-9)
    elif args.what == "cheating":
        circ = _circuit(args)
        H = FX.build_flux_hamiltonian(circ, _weights(args.weight))
        R = 1 << circ.reg_qubits
        zero = np.eye(R)[0]
        L, Rt = FX.cheating_state(circ, zero, zero)
        ep = FX.product_energy(H.select("prop"), L, Rt) / H.weights["prop"]
        es = FX.product_energy(H.select("sym"), L, Rt)
        rep.check("prop energy", ep <= 1e-12, ep, 1e-12)
        rep.check("sym energy", abs(es - H.weights["sym"] / 2) <= 1e-10, es, H.weights["sym"] / 2, "~=")
        rep.result.update(total=FX.product_energy(H, L, Rt))
    else:
        circ = _circuit(args)
        y = args.proof if args.proof is not None else circ.max_acceptance()[1]
        h = FX.history_state(circ, y)
        prof = FA.residual_profile(h, circ, args.delta)
        rep.result.update(steps=list(prof.steps), a=list(prof.a), b=list(prof.b),
                          rounded=FX.round_proof_gates(prof))
        err = FX.conjugated_chain_error(circ, FX.honest_profile(circ, y))
        rep.check("conjugated chain", err <= 1e-10, err, 1e-10)


def cmd_mip_params(args, rep: Report) -> None:
    p = FX.mip_embedding_params(args.t, args.u, args.v, args.p, args.r, args.c, args.s)
    rep.result.update(proof_length=str(p.proof_length) if p.proof_length >= 2 ** 53 else p.proof_length,
                      qubits=p.qubits, gap_log2=p.gap_log2)


def cmd_verify_all(args, rep: Report) -> None:
    from . import suites
    names = suites.SUITES if args.suite == "all" else (args.suite,)
    for name in names:
        for check in suites.run(name):
            rep.check(f"{name}: {check[0]}", *check[1:])


HANDLERS: dict[str, Callable] = {
    "decompose": cmd_decompose, "follow-path": cmd_follow_path, "traverse": cmd_traverse,
    "gscon-check": cmd_gscon_check, "stconn": cmd_stconn, "lift": cmd_lift, "reduce": cmd_reduce,
    "embed": cmd_embed, "opt-separable": cmd_opt_separable, "probe": cmd_probe,
    "mip-params": cmd_mip_params, "verify-all": cmd_verify_all,
}


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if message.startswith("argument command: invalid choice"):
            raise errors.UnknownCommand(message.partition(": ")[2])
        raise errors.MalformedInput(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--dense-limit", type=int)
    common.add_argument("--restarts", type=int)
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--progress", action="store_true", help="progress lines on stderr")

    p = _Parser(prog="gsconkit", description="Ground-state connectivity toolkit")
    p.add_argument("--version", action="version", version=f"gsconkit {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("decompose", parents=[common], help="exact or small-unitary gate decomposition")
    s.add_argument("--word")
    s.add_argument("--t", type=float)
    s.add_argument("--hamiltonian")
    s.add_argument("--loose", action="store_true", help="skip the pulse-range precondition")

    s = sub.add_parser("follow-path", parents=[common], help="gates tracking a path of states")
    s.add_argument("--family", choices=("great-circle", "two-leg-via-ground-state", "piecewise"),
                   default="great-circle")
    s.add_argument("--states", required=True)
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--hamiltonian")

    s = sub.add_parser("traverse", parents=[common], help="low-energy traversal between two states")
    s.add_argument("--hamiltonian", required=True)
    s.add_argument("--psi", required=True)
    s.add_argument("--phi", required=True)
    s.add_argument("--delta", type=float, required=True)
    s.add_argument("--eta", type=float)
    s.add_argument("--rescale", action="store_true")

    s = sub.add_parser("gscon-check", parents=[common], help="check a gate sequence against an instance")
    s.add_argument("--instance", required=True)
    s.add_argument("--sequence", required=True)

    for name, hlp in (("stconn", "solve classical reconfiguration"), ("lift", "raise the flip budget")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--cnf", required=True)
        s.add_argument("--x")
        s.add_argument("--y")
        if name == "stconn":
            s.add_argument("--l", type=int, default=1)
        else:
            s.add_argument("--l2", type=int, required=True)

    s = sub.add_parser("reduce", parents=[common], help="build GSCON instances")
    s.add_argument("--kind", choices=("stconn", "lh"), required=True)
    s.add_argument("--cnf")
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--hamiltonian")
    s.add_argument("--witness")
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)

    for name, hlp in (("embed", "two-copy Hamiltonian of a streaming circuit"),
                      ("opt-separable", "minimise over product states"),
                      ("probe", "residual operators, cheating states, fooling search")):
        s = sub.add_parser(name, parents=[common], help=hlp)
        s.add_argument("--circuit", help="StreamingCircuit JSON (default: built-in toy circuit)")
        s.add_argument("--alpha", type=float, help="acceptance of the built-in toy circuit")
        s.add_argument("--weight", action="append", default=[], metavar="NAME=VALUE")
        if name == "embed":
            s.add_argument("--oracle", action="store_true", help="serve rows from stdin")
        if name == "probe":
            s.add_argument("--what", choices=("residual", "fooling", "cheating", "profile"), required=True)
            s.add_argument("--a", type=float, default=1.0)
            s.add_argument("--b", type=float, default=1.0)
            s.add_argument("--u", default="X")
            s.add_argument("--v", default="I")
            s.add_argument("--proof")
            s.add_argument("--delta", type=float, default=1.0)

    s = sub.add_parser("mip-params", parents=[common], help="size of the embedded MIP verifier")
    for k in "tuvpr":
        s.add_argument(f"--{k}", type=int, required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--s", type=float, required=True)

    s = sub.add_parser("verify-all", parents=[common], help="run built-in check suites")
    s.add_argument("--suite", default="all")
    return p


def _config(args) -> config.Config:
    cfg = config.from_env(config.Config())
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    if args.dense_limit is not None:
        cfg = dataclasses.replace(cfg, dense_limit=args.dense_limit)
    if args.restarts is not None:
        cfg = dataclasses.replace(cfg, restarts=args.restarts)
    try:
        tol = config.parse_tol(args.tol)
    except ValueError as exc:
        raise errors.MalformedInput(str(exc)) from None
    return cfg.with_tol(**tol) if tol else cfg


_SKIP = {"command", "seed", "tol", "dense_limit", "restarts", "out", "format", "progress"}


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except errors.InputError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if args.command is None:
        print("error: a subcommand is required: " + ", ".join(COMMANDS), file=sys.stderr)
        return 2
    try:
        cfg = _config(args)
    except errors.GsconkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in _SKIP}
    rep = Report(args.command, cfg, inputs)
    with config.use(cfg):
        try:
            HANDLERS[args.command](args, rep)
        except errors.GsconkitError as exc:
            rep.error = {"type": type(exc).__name__, "message": str(exc), "exit_code": exc.exit_code}
    if args.command == "embed" and getattr(args, "oracle", False) and rep.error is None:
        return 0
    body = jsonio.dumps(rep.as_dict()) if args.format == "json" else rep.text()
    stdout.write(body)
    if rep.error:
        print(f"error: {rep.error['type']}: {rep.error['message']}", file=sys.stderr)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w", encoding="utf-8") as fh:
            fh.write(jsonio.dumps(rep.as_dict()))
        with open(os.path.join(args.out, "report.txt"), "w", encoding="utf-8") as fh:
            fh.write(rep.text())
        for name, text in rep.artefacts.items():
            with open(os.path.join(args.out, name), "w", encoding="utf-8") as fh:
                fh.write(text)
    return rep.exit_code()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
