"""``lipfree`` command line.

Exit codes: 0 on success or a CONSISTENT verdict, 2 on a REFUTED verdict,
1 on any error (including usage errors).
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import io
from .balls import (
    ball_extension_bridge,
    canonical_ball_systems,
    joint_intersection,
    pairwise_intersections,
    verify_empty,
    weak_intersection_sampler,
)
from .errors import LipfreeError
from .extension import (
    REFUTED,
    EvidenceConfig,
    l1predual_evidence,
    optimal_extension,
    witness_search,
)
from .freespace import kr_norm_dual, kr_norm_primal
from .instances import equilateral_map
from .lipschitz import difference_quotient_set, lip_norm, mcshane_extend
from .metric import metric_violations, shortest_path_closure
from .norms import linf_embedding
from .solver.convex import EmptyEvidence, Feasible
from .tolerances import Tolerances

EXIT_OK, EXIT_ERROR, EXIT_REFUTED = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    inputs: list
    seed: int
    trials: int
    tolerances: dict
    format: str
    options: dict = field(default_factory=dict)


@dataclass
class Report:
    config: dict
    result: dict
    verdict: str | None = None
    replay: str | None = None
    timing: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return io.to_jsonable(asdict(self))

    @classmethod
    def from_json(cls, obj: dict) -> "Report":
        return cls(**obj)

    def stable_json(self) -> str:
        """Everything except timing, for byte-level replay comparison."""
        d = self.to_json()
        d.pop("timing", None)
        return json.dumps(d, indent=2, sort_keys=True)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n\ninput schemas:\n{io.schema_help()}\n")
        sys.exit(EXIT_ERROR)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=1000)
    common.add_argument("--tol", type=float, default=None,
                        help="verdict tolerance on extension constants (default 1e-7)")
    common.add_argument("--format", choices=("json", "md"), default="json")
    common.add_argument("--out", default=None, help="write the report here instead of stdout")

    p = _Parser(prog="lipfree", description="Lipschitz extension and free-space computations on finite metric spaces.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="check a metric space file")
    s.add_argument("file")
    s.add_argument("--repair", choices=("shortest-path",), default=None)

    s = sub.add_parser("lipnorm", parents=[common], help="Lipschitz constant of a map")
    s.add_argument("file")
    s.add_argument("--quotients", action="store_true", help="include the difference-quotient set")

    s = sub.add_parser("mcshane", parents=[common], help="McShane extension of a real-valued map")
    s.add_argument("map")
    s.add_argument("superspace")
    s.add_argument("--variant", choices=("inf", "sup"), default="inf")

    s = sub.add_parser("krnorm", parents=[common], help="Kantorovich-Rubinstein norm of a free vector")
    s.add_argument("file")
    s.add_argument("--dual", action="store_true", help="also solve the dual LP and report the gap")
    s.add_argument("--witness", action="store_true", help="include the optimal 1-Lipschitz witness")

    s = sub.add_parser("extend", parents=[common], help="optimal Lipschitz extension of a map")
    s.add_argument("map")
    s.add_argument("superspace")

    s = sub.add_parser("witness", parents=[common], help="search for hard 4->5 point extension instances")
    s.add_argument("--target", required=True)
    s.add_argument("--n-points", type=int, default=4)
    s.add_argument("--m-points", type=int, default=5)
    s.add_argument("--mode", choices=("geometric", "metric"), default="geometric")
    s.add_argument("--refine-steps", type=int, default=200)
    s.add_argument("--canonical", action="store_true", help="seed with the equilateral configuration")

    b = sub.add_parser("balls", help="ball intersection tools")
    bsub = b.add_subparsers(dest="balls_command", required=True, parser_class=_Parser)
    s = bsub.add_parser("check", parents=[common])
    s.add_argument("file")
    s = bsub.add_parser("sample", parents=[common])
    s.add_argument("--norm", required=True)
    s.add_argument("--n-balls", type=int, default=4)
    s.add_argument("--canonical", action="store_true", help="seed with the equilateral+cap system")
    s = bsub.add_parser("bridge", parents=[common])
    s.add_argument("file")

    s = sub.add_parser("classify", parents=[common], help="combined evidence for or against the L1-predual property")
    s.add_argument("--target", required=True)
    s.add_argument("--n-points", type=int, default=4)
    s.add_argument("--m-points", type=int, default=5)
    s.add_argument("--n-balls", type=int, default=4)
    s.add_argument("--mode", choices=("geometric", "metric"), default="geometric")
    s.add_argument("--refine-steps", type=int, default=200)
    s.add_argument("--no-canonical", action="store_true", help="skip the seeded equilateral instances")

    s = sub.add_parser("embed", parents=[common], help="isometric l_inf embedding of a polyhedral norm")
    s.add_argument("norm")
    return p


def _load_norm(spec: str):
    if Path(spec).is_file():
        obj, base = io.load_json(spec)
        return io.norm_from_json(obj, base)
    return io.norm_from_json(spec)


def _tolerances(args) -> Tolerances:
    return Tolerances() if args.tol is None else Tolerances(extension_tol=args.tol)


def _replay(args, argv) -> str:
    return "lipfree " + " ".join(shlex.quote(a) for a in argv if a not in ("--out",) and a != args.out)


def _cmd_validate(args):
    obj, base = io.load_json(args.file)
    dist = np.asarray(obj["dist"], dtype=float)
    if args.repair == "shortest-path":
        dist = shortest_path_closure(dist)
    viol = metric_violations(dist)
    result = {"valid": not viol, "n": int(dist.shape[0]), "repaired": args.repair,
              "violations": [{"kind": v.kind, "indices": list(v.indices), "detail": v.detail} for v in viol]}
    if not viol:
        M = io.metric_from_json({**obj, "dist": dist.tolist()}, base)
        result["space"] = M.to_json()
    return result, None, (EXIT_OK if not viol else EXIT_ERROR)


def _cmd_lipnorm(args):
    obj, base = io.load_json(args.file)
    f = io.map_from_json(obj, base)
    out = {"lip_norm": lip_norm(f), "n": f.domain.n}
    if args.quotients and f.domain.n >= 2:
        out["quotients"] = difference_quotient_set(f)
    return out, None, EXIT_OK


def _cmd_mcshane(args):
    obj, base = io.load_json(args.map)
    f = io.map_from_json(obj, base)
    mobj, mbase = io.load_json(args.superspace)
    M = io.metric_from_json(mobj, mbase)
    idx = [M.index_of(lab) for lab in f.domain.labels]
    order = np.argsort(idx)
    if np.any(np.diff(np.array(idx)[order]) <= 0):
        raise LipfreeError("duplicate labels")
    if list(order) != list(range(len(idx))):
        raise LipfreeError("domain labels must appear in the superspace in the same order")
    F = mcshane_extend(f, M, idx, args.variant)
    return {"variant": args.variant, "lip_norm": lip_norm(F), "original_lip_norm": lip_norm(f),
            "labels": list(M.labels), "values": F.values}, None, EXIT_OK


def _cmd_krnorm(args, tols):
    obj, base = io.load_json(args.file)
    mu = io.free_vector_from_json(obj, base)
    out = {"primal": kr_norm_primal(mu)}
    if args.dual or args.witness:
        val, w = kr_norm_dual(mu)
        out["dual"] = val
        out["gap"] = abs(out["primal"] - val)
        out["dual_gap_tol"] = tols.dual_gap_tol
        out["gap_within_tol"] = out["gap"] <= tols.dual_gap_tol * max(1.0, abs(val))
        if args.witness:
            out["witness"] = dict(zip(mu.space.labels, w.values.tolist()))
    return out, None, EXIT_OK


def _cmd_extend(args):
    obj, base = io.load_json(args.map)
    f = io.map_from_json(obj, base)
    mobj, mbase = io.load_json(args.superspace)
    M = io.metric_from_json(mobj, mbase)
    idx = [M.index_of(lab) for lab in f.domain.labels]
    if idx != sorted(idx):
        raise LipfreeError("domain labels must appear in the superspace in the same order")
    res = optimal_extension(f, M, idx, seed=args.seed)
    return {"constant": res.constant, "lower_bound": res.lower_bound, "certified": res.certified,
            "method": res.method, "lip_norm": lip_norm(f), "labels": list(M.labels),
            "values": res.extension.values}, None, EXIT_OK


def _cmd_witness(args, tols):
    target = _load_norm(args.target)
    seeded = [equilateral_map(target, args.n_points)] if args.canonical and args.n_points in (3, 4) else []
    wr = witness_search(target, args.n_points, args.m_points, args.trials, args.seed, args.mode,
                        seeded, args.refine_steps)
    out = wr.to_json()
    out["exceeds_one"] = bool(wr.certified and wr.lower_bound > 1.0 + tols.extension_tol)
    return out, None, EXIT_OK


def _evidence_of(res):
    if isinstance(res, Feasible):
        return {"status": "feasible", "point": res.point, "max_violation": res.value}
    out = {"status": res.status, "value": res.value, "lower_bound": res.lower_bound}
    if isinstance(res, EmptyEvidence) and res.farkas is not None:
        out["farkas"] = res.farkas
    return out


def _cmd_balls(args, tols):
    if args.balls_command == "sample":
        norm = _load_norm(args.norm)
        seeded = canonical_ball_systems(norm) if args.canonical else []
        sr = weak_intersection_sampler(norm, args.n_balls, args.trials, args.seed, seeded)
        return sr.to_json(), None, EXIT_OK
    obj, base = io.load_json(args.file)
    S = io.balls_from_json(obj, base)
    if args.balls_command == "check":
        res = joint_intersection(S, feas_tol=tols.feas_tol, empty_tol=tols.empty_tol, seed=args.seed)
        out = {"pairwise": pairwise_intersections(S, tols.feas_tol), "joint": _evidence_of(res)}
        if isinstance(res, EmptyEvidence) and res.farkas is not None:
            out["joint"]["farkas_value"] = verify_empty(S, res)
        return out, None, EXIT_OK
    br = ball_extension_bridge(S, tol=tols.extension_tol)
    return {"point": br.point, "constant": br.constant, "z": br.z, "verified": br.verified,
            "max_violation": br.max_violation}, None, EXIT_OK


def _cmd_classify(args, tols):
    target = _load_norm(args.target)
    cfg = EvidenceConfig(trials=args.trials, seed=args.seed, tol=tols.extension_tol, n_points=args.n_points,
                         m_points=args.m_points, n_balls=args.n_balls, mode=args.mode,
                         refine_steps=args.refine_steps, canonical=not args.no_canonical)
    ev = l1predual_evidence(target, cfg)
    code = EXIT_REFUTED if ev.verdict == REFUTED else EXIT_OK
    return ev.to_json(), ev.verdict, code


def _cmd_embed(args):
    X = _load_norm(args.norm)
    E = linf_embedding(X)
    rng = np.random.default_rng(args.seed)
    xs = rng.standard_normal((1000, X.dim))
    err = float(np.max(np.abs(np.max(np.abs(xs @ E.T), axis=1) - X.evaluate_many(xs))))
    return {"matrix": E, "rows": int(E.shape[0]), "isometry_max_error": err}, None, EXIT_OK


def render_markdown(report: Report) -> str:
    cfg = report.config
    lines = [f"# lipfree {cfg['command']}", ""]
    lines.append("| setting | value |")
    lines.append("|---|---|")
    for k in ("seed", "trials"):
        lines.append(f"| {k} | {cfg[k]} |")
    for k, v in cfg["tolerances"].items():
        lines.append(f"| {k} | {v:g} |")
    for k, v in cfg.get("options", {}).items():
        lines.append(f"| {k} | {v} |")
    lines.append("")
    r = report.result
    if cfg["command"] == "classify":
        ext, balls = r["extension"], r["balls"]
        opts = cfg.get("options", {})
        n, m, k = opts.get("n_points", 4), opts.get("m_points", 5), opts.get("n_balls", 4)
        lines += [
            f"**Verdict: {report.verdict}**",
            "",
            f"| L1-predual | {n}-point to {m}-point extension: best constant | certified lower bound | "
            f"source | {k} pairwise-meeting balls: violations | indeterminate | checked |",
            "|---|---|---|---|---|---|---|",
            f"| {'no' if r['verdict'] == REFUTED else 'not refuted'} | {ext['constant']:.9f} | "
            f"{ext['lower_bound']:.9f} | {ext['source']} | {len(balls['violations'])} | "
            f"{balls['indeterminate']} | {balls['checked']} |",
            "",
        ]
        if r["refuted_by"]:
            lines.append("Refuted by: " + ", ".join(r["refuted_by"]))
            lines.append("")
    else:
        lines.append("```json")
        lines.append(io.dumps(r))
        lines.append("```")
        lines.append("")
    if report.replay:
        lines += ["Replay:", "", f"    {report.replay}", ""]
    return "\n".join(lines)


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    tols = _tolerances(args)
    command = args.command + (f" {args.balls_command}" if args.command == "balls" else "")
    options = {k: v for k, v in vars(args).items()
               if k not in ("command", "balls_command", "seed", "trials", "tol", "format", "out")}
    config = RunConfig(command, [v for k, v in options.items() if k in ("file", "map", "superspace")],
                       args.seed, args.trials, tols.as_dict(), args.format, options)
    t0 = time.perf_counter()
    try:
        handler = {
            "validate": lambda: _cmd_validate(args),
            "lipnorm": lambda: _cmd_lipnorm(args),
            "mcshane": lambda: _cmd_mcshane(args),
            "krnorm": lambda: _cmd_krnorm(args, tols),
            "extend": lambda: _cmd_extend(args),
            "witness": lambda: _cmd_witness(args, tols),
            "balls": lambda: _cmd_balls(args, tols),
            "classify": lambda: _cmd_classify(args, tols),
            "embed": lambda: _cmd_embed(args),
        }[args.command]
        result, verdict, code = handler()
    except (LipfreeError, OSError, ValueError, KeyError, TypeError) as exc:
        stderr.write(f"lipfree: error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    report = Report(asdict(config), io.to_jsonable(result), verdict, _replay(args, argv),
                    {"seconds": round(time.perf_counter() - t0, 3)})
    text = render_markdown(report) if args.format == "md" else json.dumps(report.to_json(), indent=2, sort_keys=True)
    io.write_text(text, args.out, stdout)
    if code == EXIT_ERROR and command == "validate":
        for v in result["violations"][:10]:
            stderr.write(f"lipfree: {v['kind']} at {tuple(v['indices'])}: {v['detail']}\n")
    return code


def main() -> None:
    sys.exit(dispatch())


if __name__ == "__main__":
    main()
