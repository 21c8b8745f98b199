"""Command-line interface: ``rigidlab {spectrum,check,estimate,fuzz}``.

Exit codes: 0 success (all checks hold), 1 a check failed, 2 usage or
parse error. Machine-readable output is JSON with sorted keys; a one-line
human summary follows where noted.
"""
import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from rigidlab import __version__, bounds, linalg
from rigidlab._validation import InvalidInputError
from rigidlab.bounds import BoundReport
from rigidlab.graph import algebraic_connectivity, laplacian, read_graph, write_graph
from rigidlab.optimizer import OptimizerConfig, estimate_ad
from rigidlab.rigidity import (
    Framework,
    read_configuration,
    rigidity_eigenvalue,
    stiffness_matrix,
    write_configuration,
)
from rigidlab.sampling import random_framework, random_unit

CHECKS = ("lemma1", "lemma2", "jordan", "theorem", "witness")


class UsageError(Exception):
    pass


def _default_seed():
    raw = os.environ.get("RIGIDLAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"RIGIDLAB_SEED must be an integer, got {raw!r}") from None


def _manifest(command, inputs, **params):
    return {
        "command": command,
        "inputs": [str(p) for p in inputs],
        "params": params,
        "version": __version__,
    }


def _emit(payload, out):
    out.write(json.dumps(bounds._jsonable(payload), sort_keys=True, indent=2))
    out.write("\n")


def _load_framework(graph_file, config_file, d):
    g = read_graph(graph_file)
    config = read_configuration(config_file)
    if config.n != g.n:
        raise InvalidInputError(f"configuration has {config.n} rows, graph has {g.n} vertices")
    if d is not None and config.d != d:
        raise InvalidInputError(f"configuration has {config.d} columns, expected d={d}")
    return Framework(g, config)


def cmd_spectrum(args, out):
    fw = _load_framework(args.graph, args.config, args.d)
    a1 = algebraic_connectivity(fw.graph)[0] if fw.n >= 2 else None
    rig = rigidity_eigenvalue(fw) if fw.d * fw.n > fw.D else None
    payload = {
        "manifest": _manifest("spectrum", [args.graph, args.config], d=fw.d),
        "m": fw.m,
        "D": fw.D,
        "stiffness_spectrum": linalg.eigvalsh(stiffness_matrix(fw)),
        "rigidity_eigenvalue": rig,
        "laplacian_spectrum": linalg.eigvalsh(laplacian(fw.graph)),
        "algebraic_connectivity": a1,
    }
    _emit(payload, out)
    return 0


def run_checks(fw: Framework, which) -> list[BoundReport]:
    selected = CHECKS if which == "all" else (which,)
    reports = []
    for name in selected:
        if name == "lemma1":
            if fw.m > 1:
                reports.append(BoundReport.skipped(
                    "lemma1", f"points span dimension m={fw.m} > 1", d=fw.d, n=fw.n, m=fw.m, D=fw.D))
            else:
                reports.append(bounds.lemma1_check(fw))
        elif name == "lemma2":
            x = np.zeros(fw.d)
            x[0] = 1.0
            v = algebraic_connectivity(fw.graph)[1] if fw.n >= 2 else np.ones(fw.n)
            reports.append(bounds.lemma2_check(fw, x, v))
        elif name == "jordan":
            reports.extend(bounds.jordan_bound_check(fw))
        elif name == "theorem":
            reports.append(bounds.theorem_check(fw))
        elif name == "witness":
            reports.extend(bounds.witness_verify(fw))
    return reports


def _summary(reports):
    failed = sum(r.failed for r in reports)
    return len(reports), failed


def cmd_check(args, out):
    fw = _load_framework(args.graph, args.config, args.d)
    reports = run_checks(fw, args.which)
    checked, failed = _summary(reports)
    payload = {
        "manifest": _manifest("check", [args.graph, args.config], d=fw.d, which=args.which),
        "reports": [r.to_dict() for r in reports],
    }
    _emit(payload, out)
    out.write(f"checked={checked} failed={failed}\n")
    return 1 if failed else 0


def cmd_estimate(args, out):
    if args.d < 1:
        raise UsageError("d must be >= 1")
    seed = args.seed if args.seed is not None else _default_seed()
    cfg = OptimizerConfig(restarts=args.restarts, seed=seed, max_iters=args.max_iters)
    g = read_graph(args.graph)
    result = estimate_ad(g, args.d, cfg)
    payload = {
        "manifest": _manifest(
            "estimate", [args.graph], d=args.d, seed=seed,
            restarts=args.restarts, max_iters=args.max_iters,
        ),
        **result.to_dict(),
    }
    _emit(payload, out)
    out.write(
        f"a_d_lower={result.best_value:.12g} a_1={result.algebraic_connectivity:.12g} "
        f"margin={result.certificate:.12g}\n"
    )
    return 1 if result.violation else 0


def fuzz_sample(rng, max_n, max_d) -> tuple[Framework, dict]:
    """Draw one framework and run the four fuzzed checks on it."""
    fw = random_framework(rng, max_n=max_n, max_d=max_d)
    x = random_unit(rng, fw.d)
    v = rng.standard_normal(fw.n)
    results = {
        "theorem": [bounds.theorem_check(fw)],
        "jordan": bounds.jordan_bound_check(fw),
        "lemma2": [bounds.lemma2_check(fw, x, v)],
        "witness": bounds.witness_verify(fw),
    }
    return fw, results


def cmd_fuzz(args, out):
    if args.samples < 0 or args.max_n < 2 or args.max_d < 1:
        raise UsageError("need --samples >= 0, --max-n >= 2, --max-d >= 1")
    seed = args.seed if args.seed is not None else _default_seed()
    rng = np.random.default_rng(seed)
    checked = failed = 0
    failures = []
    out_dir = Path(args.out_dir)
    for i in range(args.samples):
        fw, results = fuzz_sample(rng, args.max_n, args.max_d)
        for name, reports in results.items():
            checked += 1
            bad = [r for r in reports if r.failed]
            lemma2_mismatch = name == "lemma2" and not reports[0].context["equality_consistent"]
            if bad or lemma2_mismatch:
                failed += 1
                out_dir.mkdir(parents=True, exist_ok=True)
                stem = out_dir / f"sample{i:05d}"
                write_graph(fw.graph, stem.with_suffix(".graph"))
                write_configuration(fw.config, stem.with_suffix(".csv"))
                failures.append({
                    "sample": i,
                    "check": name,
                    "graph_file": str(stem.with_suffix(".graph")),
                    "config_file": str(stem.with_suffix(".csv")),
                    "reports": [r.to_dict() for r in bad] or [reports[0].to_dict()],
                })
    payload = {
        "manifest": _manifest(
            "fuzz", [], samples=args.samples, max_n=args.max_n, max_d=args.max_d, seed=seed,
        ),
        "checked": checked,
        "failed": failed,
        "failures": failures,
    }
    _emit(payload, out)
    out.write(f"checked={checked} failed={failed}\n")
    return 1 if failed else 0


def build_parser():
    parser = argparse.ArgumentParser(prog="rigidlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="stiffness and Laplacian spectra of a framework")
    p.add_argument("graph")
    p.add_argument("config")
    p.add_argument("--d", type=int, default=None, help="expected dimension (default: CSV width)")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("check", help="evaluate the spectral bounds on a framework")
    p.add_argument("graph")
    p.add_argument("config")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--which", choices=CHECKS + ("all",), default="all")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("estimate", help="lower-bound a_d(G) by maximizing the rigidity eigenvalue")
    p.add_argument("graph")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-iters", type=int, default=500)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("fuzz", help="check every bound on random frameworks")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--max-n", type=int, default=10)
    p.add_argument("--max-d", type=int, default=4)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out-dir", default="fuzz_failures",
                   help="where counterexample graph/config files are written")
    p.set_defaults(func=cmd_fuzz)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except (UsageError, InvalidInputError, OSError) as exc:
        print(f"rigidlab {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
