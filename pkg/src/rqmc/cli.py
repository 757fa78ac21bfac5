"""Command-line surface: point dumps, intervals, figure experiments, diagnostics.

Every run lands in a directory containing ``config.json`` (the resolved
configuration), ``data.csv`` (a ``#``-prefixed JSON provenance line, then a
header row, then rows), and ``manifest.json`` (SHA-256 of consumed input
files). Outputs are byte-reproducible from (command line, seed, inputs):
no timestamps, fixed float formatting, fixed row order.

CSV schemas by figure id:
  sign-curve    m,scheme,p_gt,p_eq,stderr,trials
  coverage      m,scheme,method,hits,trials,nominal
  lengths       m,scheme,method,p90_length
  robot-lengths method,trial,length,hit
  robot-errors  m,scheme,trial,rep,error
Diagnostic schemas are listed in the subcommand handlers.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys


from . import diagnose, experiments, integrands
from .estimate import (bootstrap_t_interval, nominal_coverage, quantile_interval,
                       replicate, student_quantile, t_interval)
from .kindex import LAMBDA, enumerate_QN
from .nets import (ENV_DIRECTION_FILE, crd, default_direction_path, load_joe_kuo,
                   net_to_json, points_real, randomize, rls, shift_only)
from .streams import substream


class UsageError(SystemExit):
    def __init__(self, message: str):
        print(f"error: {message}", file=sys.stderr)
        super().__init__(2)


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def _write_run(out_dir: str, config: dict, fieldnames: list[str],
               rows: list[tuple], inputs: dict[str, str]) -> str:
    os.makedirs(out_dir, exist_ok=True)
    cfg_text = json.dumps(config, sort_keys=True, indent=2) + "\n"
    with open(os.path.join(out_dir, "config.json"), "w", encoding="ascii") as fh:
        fh.write(cfg_text)
    with open(os.path.join(out_dir, "data.csv"), "w", encoding="ascii") as fh:
        fh.write("# " + json.dumps(config, sort_keys=True) + "\n")
        fh.write(",".join(fieldnames) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    manifest = {name: _sha256(p) for name, p in sorted(inputs.items())}
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="ascii") as fh:
        fh.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return os.path.join(out_dir, "data.csv")


def _resolve_scheme(name: str, s: int, m: int, dirs: str | None):
    """Scheme object plus the direction-file path actually consumed (or None)."""
    if name == "crd":
        return crd(), None
    path = dirs or default_direction_path()
    if not os.path.exists(path):
        raise UsageError(f"scheme {name!r} needs a direction file; {path} not found "
                         f"(use --dirs or ${ENV_DIRECTION_FILE})")
    gen = load_joe_kuo(path, s, m) if m > 0 else None
    if name == "rls":
        return (rls(gen) if gen else crd()), path
    if name == "shift":
        if gen is None:
            raise UsageError("shift scheme needs m >= 1")
        return shift_only(gen), path
    raise UsageError(f"unknown scheme {name!r}")


def _schemes_arg(name: str, s: int, m: int, dirs: str | None):
    names = ["rls", "crd"] if name == "both" else [name]
    out = []
    inputs = {}
    for nm in names:
        scheme, path = _resolve_scheme(nm, s, m, dirs)
        out.append(scheme)
        if path:
            inputs["directions"] = path
    return out, inputs


def _integrand_arg(args) -> "integrands.Integrand":
    try:
        return integrands.get(args.integrand, getattr(args, "dim", None))
    except integrands.UnknownIntegrand:
        raise UsageError(f"unknown integrand {args.integrand!r}; "
                         f"choose from {integrands.NAMES}") from None


def cmd_points(args) -> int:
    scheme, path = _resolve_scheme(args.scheme, args.s, args.m, args.dirs)
    rng = substream(args.seed, 0)
    net = randomize(scheme, args.s, args.m, args.E, rng,
                    zero_shift=args.no_shift,
                    seed_record={"master_seed": args.seed, "stream": 0})
    pts = points_real(net)
    fieldnames = [f"x{j}" for j in range(1, args.s + 1)]
    rows = [tuple(float(v) for v in row) for row in pts]
    config = {"command": "points", "scheme": args.scheme, "s": args.s,
              "m": args.m, "E": args.E, "seed": args.seed,
              "no_shift": args.no_shift,
              "directions": os.path.basename(path) if path else None}
    inputs = {"directions": path} if path else {}
    _write_run(args.out, config, fieldnames, rows, inputs)
    with open(os.path.join(args.out, "net.json"), "w", encoding="ascii") as fh:
        fh.write(net_to_json(net) + "\n")
    print(f"wrote {len(rows)} points to {args.out}")
    return 0


def cmd_interval(args) -> int:
    f = _integrand_arg(args)
    scheme, path = _resolve_scheme(args.scheme, f.s, args.m, args.dirs)
    if args.method == "quantile" and args.r < 2:
        raise UsageError("quantile interval needs r >= 2 (ell < u)")
    if not (1 <= args.ell < args.u <= args.r):
        raise UsageError(f"need 1 <= ell < u <= r, got ell={args.ell} u={args.u} r={args.r}")
    warn_precision(args.m, args.E, f.s)
    reps = replicate(scheme, f, args.m, args.E, args.r, args.seed)
    level = nominal_coverage(args.r, args.ell, args.u)
    if args.method == "quantile":
        iv = quantile_interval(reps, args.ell, args.u)
        extra = {}
    elif args.method == "t":
        iv = t_interval(reps, level)
        extra = {"t_multiplier": student_quantile(1 - (1 - level) / 2, args.r - 1)}
    elif args.method == "boot":
        iv = bootstrap_t_interval(reps, level, args.boot_samples,
                                  substream(args.seed, 10_000_000))
        extra = {"boot_samples": args.boot_samples}
    else:
        raise UsageError(f"unknown method {args.method!r}")
    report = {
        "command": "interval", "integrand": f.name, "scheme": args.scheme,
        "m": args.m, "E": args.E, "r": args.r, "ell": args.ell, "u": args.u,
        "method": args.method, "seed": args.seed,
        "replicates": list(reps.values),
        "interval": {"lo": iv.lo, "hi": iv.hi},
        "nominal": level,
        "reference_mu": f.reference_mu,
        "reference_provenance": f.provenance,
        "hit": bool(iv.covers(f.reference_mu)),
        **extra,
    }
    text = json.dumps(report, sort_keys=True, indent=2)
    print(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "report.json"), "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    return 0


def _parse_m_range(spec: str) -> list[int]:
    if ":" in spec:
        lo, hi = spec.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",")]


def cmd_experiment(args) -> int:
    f = _integrand_arg(args)
    m_list = _parse_m_range(args.m_range)
    warn_precision(max(m_list), args.E, f.s)
    config = {"command": "experiment", "fig": args.fig, "integrand": f.name,
              "scheme": args.scheme, "m_range": args.m_range, "E": args.E,
              "r": args.r, "ell": args.ell, "u": args.u, "trials": args.trials,
              "seed": args.seed, "boot_samples": args.boot_samples,
              "reference_mu": f.reference_mu}
    if args.fig == "sign-curve":
        scheme_names = ["rls", "crd"] if args.scheme == "both" else [args.scheme]
        rows = []
        inputs = {}
        for name in scheme_names:
            for m in m_list:
                scheme, path = _resolve_scheme(name, f.s, m, args.dirs)
                if path:
                    inputs["directions"] = path
                pts = diagnose.sign_quantile_curve(scheme, f, [m], args.E,
                                                   args.trials, args.seed)[0]
                rows.append((pts.m, pts.scheme_kind, pts.p_gt, pts.p_eq,
                             pts.stderr, pts.trials))
        fields = ["m", "scheme", "p_gt", "p_eq", "stderr", "trials"]
    elif args.fig == "coverage":
        rows = []
        inputs = {}
        methods = ("quantile", "t", "bootstrap_t")
        for m in m_list:
            schemes, ins = _schemes_arg(args.scheme, f.s, m, args.dirs)
            inputs.update(ins)
            for scheme in schemes:
                for row in experiments.coverage(f, scheme, m, args.E, args.r,
                                                args.ell, args.u, args.trials,
                                                args.seed, methods=methods,
                                                boot_b=args.boot_samples):
                    rows.append((row.m, row.scheme_kind, row.method, row.hits,
                                 row.trials, row.nominal))
        fields = ["m", "scheme", "method", "hits", "trials", "nominal"]
    elif args.fig == "lengths":
        rows = []
        inputs = {}
        for m in m_list:
            schemes, ins = _schemes_arg(args.scheme, f.s, m, args.dirs)
            inputs.update(ins)
            for scheme in schemes:
                for row in experiments.percentile_lengths(
                        f, scheme, [m], args.E, args.r, args.ell, args.u,
                        args.trials, args.seed, methods=("quantile", "t"),
                        boot_b=args.boot_samples):
                    rows.append((row.m, row.scheme_kind, row.method,
                                 row.p90_length))
        fields = ["m", "scheme", "method", "p90_length"]
    elif args.fig in ("robot-lengths", "robot-errors"):
        m = m_list[-1]
        schemes, inputs = _schemes_arg(args.scheme, f.s, m, args.dirs)
        lengths, errors = experiments.robot_trials(f, schemes[0], m, args.E,
                                                   args.r, args.ell, args.u,
                                                   args.trials, args.seed,
                                                   boot_b=args.boot_samples)
        if args.fig == "robot-lengths":
            rows = [(r.method, r.trial, r.length, r.hit) for r in lengths]
            fields = ["method", "trial", "length", "hit"]
        else:
            rows = [(r.m, r.scheme_kind, r.trial, r.rep, r.error) for r in errors]
            fields = ["m", "scheme", "trial", "rep", "error"]
    else:
        raise UsageError(f"unknown figure id {args.fig!r}")
    path = _write_run(args.out, config, fields, rows, inputs)
    print(f"wrote {path}")
    return 0


def cmd_diagnose(args) -> int:
    rng = substream(args.seed, 0)
    inputs = {}
    failed = False
    if args.check == "zprob":
        if args.scheme == "shift":
            raise UsageError("zprob applies to randomized matrices (rls or crd)")
        scheme, path = _resolve_scheme(args.scheme, args.s, args.m, args.dirs)
        if path:
            inputs["directions"] = path
        qs = enumerate_QN(args.s, min(args.m, 10))
        pick = substream(args.seed, 1)
        idxs = pick.choice(qs.cardinality, size=min(args.count, qs.cardinality),
                           replace=False)
        rows = []
        for i in sorted(int(v) for v in idxs):
            k = qs.members[i]
            p_hat, se = diagnose.empirical_Z_prob(scheme, k, args.m, args.E,
                                                  args.trials, rng)
            if scheme.kind == "rls":
                expect = float(diagnose.exact_Z_prob(scheme.gen, k))
            else:
                expect = 2.0 ** -args.m
            z = (p_hat - expect) / se if se > 0 else 0.0
            verdict = "pass" if abs(z) <= 4.0 else "fail"
            if verdict == "fail":
                failed = True
            rows.append((str(k.ks).replace(",", ";"), args.m, p_hat, se, expect,
                         z, verdict))
        fields = ["k", "m", "p_hat", "stderr", "expected", "z", "verdict"]
    elif args.check == "rankdef":
        path = args.dirs or default_direction_path()
        inputs["directions"] = path
        gen = load_joe_kuo(path, args.s, args.m)
        r_val = diagnose.rank_deficiency_r1(gen)
        rows = [(args.s, args.m, r_val)]
        fields = ["s", "m", "R_m1"]
        print(f"R_{{m,1}} = {r_val}")
    elif args.check == "marginal":
        scheme, path = _resolve_scheme(args.scheme, args.s, args.m, args.dirs)
        if path:
            inputs["directions"] = path
        rep = diagnose.marginal_order_check(scheme, args.s, args.m, args.E,
                                            args.trials, rng)
        failed = not rep.passed
        rows = [(row, rep.zmax_by_row[row],
                 int(any(fl[1] == row for fl in rep.flagged)))
                for row in rep.rows_checked]
        fields = ["row", "zmax", "flagged"]
    elif args.check == "xor-closure":
        p = diagnose.xor_closure_prob(args.s, args.N, args.trials, rng)
        rows = [(args.s, args.N, args.trials, p)]
        fields = ["s", "N", "trials", "p_hat"]
    elif args.check == "kappa":
        hist = diagnose.kappa_concentration(args.s, args.N, args.trials, rng)
        rows = [(size, cnt, size / hist.scale)
                for size, cnt in sorted(hist.counts.items())]
        fields = ["size", "count", "ratio"]
        print(f"scale sqrt(lambda*N/s) = {hist.scale} (lambda = {LAMBDA})")
        print(f"mass within 0.5 of 2: {hist.mass_within(0.5)}")
    else:
        raise UsageError(f"unknown check {args.check!r}")
    path_csv = _write_run(args.out, {"command": "diagnose", "check": args.check,
                                     "seed": args.seed,
                                     **{k: v for k, v in vars(args).items()
                                        if k in ("s", "m", "E", "N", "trials",
                                                 "scheme", "count")}},
                          fields, rows, inputs)
    print(f"wrote {path_csv}")
    if args.strict and failed:
        print("strict mode: statistical verdict failed", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rqmc",
                                 description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("points", help="dump the points of one randomized net")
    p.add_argument("--scheme", required=True, choices=["rls", "crd", "shift"])
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--E", type=int, default=64)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dirs", default=None, help="direction-number file")
    p.add_argument("--no-shift", action="store_true",
                   help="suppress the digital shift (debug)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_points)

    p = sub.add_parser("interval", help="replicates plus one confidence interval")
    p.add_argument("--integrand", required=True)
    p.add_argument("--dim", type=int, default=None,
                   help="dimension for expsum/prodinv")
    p.add_argument("--scheme", default="rls", choices=["rls", "crd", "shift"])
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--E", type=int, default=64)
    p.add_argument("--r", type=int, default=9)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--u", type=int, default=8)
    p.add_argument("--method", default="quantile", choices=["quantile", "t", "boot"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--boot-samples", type=int, default=1000)
    p.add_argument("--dirs", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_interval)

    p = sub.add_parser("experiment", help="figure-style experiment to CSV")
    p.add_argument("--fig", required=True,
                   choices=["sign-curve", "lengths", "coverage",
                            "robot-lengths", "robot-errors"])
    p.add_argument("--integrand", default="x33exp")
    p.add_argument("--dim", type=int, default=None)
    p.add_argument("--scheme", default="both",
                   choices=["rls", "crd", "shift", "both"])
    p.add_argument("--m-range", default="1:8",
                   help="inclusive range lo:hi or comma list")
    p.add_argument("--E", type=int, default=64)
    p.add_argument("--r", type=int, default=9)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--u", type=int, default=8)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--boot-samples", type=int, default=1000)
    p.add_argument("--dirs", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("diagnose", help="randomization-quality checks to CSV")
    p.add_argument("--check", required=True,
                   choices=["zprob", "rankdef", "marginal", "xor-closure", "kappa"])
    p.add_argument("--scheme", default="crd", choices=["rls", "crd", "shift"])
    p.add_argument("--s", type=int, default=1)
    p.add_argument("--m", type=int, default=6)
    p.add_argument("--E", type=int, default=32)
    p.add_argument("--N", type=int, default=10)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--count", type=int, default=5, help="indices tested by zprob")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--dirs", default=None)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diagnose)
    return ap


def warn_precision(m: int, e: int, s: int) -> None:
    """Flag precision settings below the lambda * m^2 / s recommendation."""
    floor = LAMBDA * m * m / s
    if e < floor:
        print(f"warning: E={e} is below the recommended precision "
              f"{floor:.1f} for m={m}, s={s}; truncation bias may show",
              file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
