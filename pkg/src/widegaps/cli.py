"""Command line: generate, check, cluster, transform, verify-axioms.

Exit codes: 0 success, 1 validation/config error, 2 property-suite
failure, 3 internal invariant breach.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .clusterers import discover_range
from .core import Clustering, Dataset, cost_report
from .errors import InvariantBreach, SizeMismatch, WideGapsError
from .generators import GeneratorConfig, generate_clusterable
from .separability import check, check_range
from .suites import run_suite
from .transforms import KINDS as TRANSFORM_KINDS
from .transforms import TransformSpec, apply_transform, verify_transform

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_SUITE_FAILED = 2
EXIT_INTERNAL = 3

SEED_ENV = "WIDE_GAPS_SEED"


# ---------------------------------------------------------------------------
# file formats


def _fmt(x) -> str:
    return format(float(x), ".17g")


def save_points(path, points) -> None:
    points = np.asarray(points, dtype=float)
    header = ",".join(f"x{j}" for j in range(points.shape[1]))
    lines = [header] + [",".join(_fmt(v) for v in row) for row in points]
    Path(path).write_text("\n".join(lines) + "\n")


def load_points(path) -> np.ndarray:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise WideGapsError(f"{path}: empty points file")
    header = lines[0].split(",")
    if not all(h.strip().startswith("x") for h in header):
        raise WideGapsError(f"{path}: expected header x0,x1,...")
    rows = [_parse_row(ln, path) for ln in lines[1:]]
    if any(len(r) != len(header) for r in rows):
        raise WideGapsError(f"{path}: ragged rows")
    return np.array(rows, dtype=float).reshape(len(rows), len(header))


def save_matrix(path, matrix) -> None:
    lines = [",".join(_fmt(v) for v in row) for row in np.asarray(matrix, dtype=float)]
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> np.ndarray:
    rows = [_parse_row(ln, path) for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise WideGapsError(f"{path}: expected a rectangular numeric CSV")
    return np.array(rows, dtype=float)


def save_labels(path, labels) -> None:
    Path(path).write_text("".join(f"{int(v)}\n" for v in labels))


def load_labels(path) -> np.ndarray:
    out = []
    for ln in Path(path).read_text().splitlines():
        if not ln.strip():
            continue
        try:
            out.append(int(ln.strip()))
        except ValueError:
            raise WideGapsError(f"{path}: label {ln.strip()!r} is not an integer") from None
    return np.array(out, dtype=np.int64)


def _parse_row(line, path):
    try:
        return [float(v) for v in line.split(",")]
    except ValueError:
        raise WideGapsError(f"{path}: non-numeric value in row {line!r}") from None


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, (np.floating,)):
        return _json_value(float(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, dict):
        return {k: _json_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_value(v) for v in x]
    return x


def dump_json(obj) -> str:
    return json.dumps(_json_value(obj), indent=2, sort_keys=True)


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def manifest(command: str, args: argparse.Namespace, inputs=()) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}
    return {
        "command": command,
        "config": _json_value(config),
        "input_hashes": {str(p): file_hash(p) for p in inputs if p},
        "tool_version": __version__,
    }


def _load_dataset(args) -> tuple[Dataset, list]:
    if bool(args.points) == bool(args.distances):
        raise WideGapsError("give exactly one of --points or --distances")
    if args.points:
        return Dataset.from_points(load_points(args.points)), [args.points]
    return Dataset.from_distances(load_matrix(args.distances)), [args.distances]


def _load_clustering(path, dataset: Dataset) -> Clustering:
    labels = load_labels(path)
    if labels.shape[0] != dataset.n:
        raise SizeMismatch(f"{path}: {labels.shape[0]} labels for {dataset.n} points")
    return Clustering(labels)


def _emit(report: dict, out) -> None:
    text = dump_json(report)
    if out:
        Path(out).write_text(text + "\n")
    print(text)


# ---------------------------------------------------------------------------
# commands


def cmd_generate(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    cfg = GeneratorConfig(
        k=args.k,
        sizes=sizes,
        dim=args.dim,
        intra_spread=args.intra_spread,
        gap_margin=args.gap_margin,
        kind=args.kind,
        rng_seed=args.seed,
    )
    dataset, clustering = generate_clusterable(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_points(out / "points.csv", dataset.embedding)
    save_labels(out / "labels.csv", clustering.labels)
    if args.emit_distances:
        save_matrix(out / "distances.csv", dataset.distances.square())
    (out / "manifest.json").write_text(dump_json(manifest("generate", args)) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    dataset, inputs = _load_dataset(args)
    clustering = _load_clustering(args.labels, dataset)
    costs = cost_report(dataset, clustering)
    if args.range_K is not None:
        rep = check_range(dataset, clustering, args.kind, args.range_K)
    else:
        rep = check(dataset, clustering, args.kind)
    report = {
        "q": costs.q,
        "sigma": costs.sigma,
        "beta": costs.beta,
        "threshold": rep.threshold,
        "min_inter": rep.min_inter,
        "separable": rep.separable,
    }
    if rep.witness_pair is not None:
        report["witness_pair"] = list(rep.witness_pair)
    if args.range_K is not None:
        report["level"] = rep.level
        report["search"] = rep.search
    _emit(report, args.out)
    return EXIT_OK


def cmd_cluster(args) -> int:
    dataset, inputs = _load_dataset(args)
    res = discover_range(dataset, args.kx, args.kind, args.seed, args.restarts)
    report = {
        "k": res.k,
        "q": res.q,
        "per_k_log": list(res.per_k_log),
        "manifest": manifest("cluster", args, inputs),
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        save_labels(out / "labels.csv", res.clustering.labels)
        (out / "report.json").write_text(dump_json(report) + "\n")
    print(dump_json(report))
    return EXIT_OK


def cmd_transform(args) -> int:
    dataset = Dataset.from_distances(load_matrix(args.distances))
    clustering = _load_clustering(args.labels, dataset) if args.labels else None
    spec = TransformSpec(
        args.kind,
        alpha=args.alpha,
        intra_factor=args.intra_factor,
        inter_growth=args.inter_growth,
        delta=args.delta,
        clustering=clustering,
    )
    after = apply_transform(dataset, spec, args.seed)
    ok, violations = verify_transform(dataset, after, spec)
    if not ok:
        raise InvariantBreach(f"transform failed self-verification: {violations[:5]}")
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_matrix(out, after.distances.square())
    report = {
        "verified": ok,
        "violations": 0,
        "output": str(out),
        "manifest": manifest("transform", args, [args.distances, args.labels]),
    }
    print(dump_json(report))
    return EXIT_OK


def cmd_verify_axioms(args) -> int:
    results = run_suite(args.suite, args.trials, args.seed)
    report = {
        "suite": args.suite,
        "properties": {r.name: r.as_dict() for r in results},
        "manifest": manifest("verify-axioms", args),
    }
    _emit(report, args.out)
    return EXIT_OK if all(r.ok for r in results) else EXIT_SUITE_FAILED


# ---------------------------------------------------------------------------
# parser


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return int(raw) if raw not in (None, "") else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="widegaps", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    seed = dict(type=int, default=_default_seed(), help=f"RNG seed (default ${SEED_ENV} or 0)")
    kind = dict(choices=("variational", "residual"), default="variational")

    g = sub.add_parser("generate", help="planted clusterable dataset")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--sizes", required=True, help="comma separated block sizes")
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--kind", **kind)
    g.add_argument("--gap-margin", type=float, default=2.0)
    g.add_argument("--intra-spread", type=float, default=1.0)
    g.add_argument("--seed", **seed)
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--emit-distances", action="store_true")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("check", help="separability report for a labelled dataset")
    c.add_argument("--points")
    c.add_argument("--distances")
    c.add_argument("--labels", required=True)
    c.add_argument("--kind", **kind)
    c.add_argument("--range-K", type=int, dest="range_K")
    c.add_argument("--out")
    c.set_defaults(func=cmd_check)

    cl = sub.add_parser("cluster", help="range clustering with automatic k")
    cl.add_argument("--points")
    cl.add_argument("--distances")
    cl.add_argument("--kx", type=int, required=True)
    cl.add_argument("--kind", **kind)
    cl.add_argument("--seed", **seed)
    cl.add_argument("--restarts", type=int, default=8)
    cl.add_argument("--out", help="output directory")
    cl.set_defaults(func=cmd_cluster)

    t = sub.add_parser("transform", help="apply and self-verify a distance transform")
    t.add_argument("--distances", required=True)
    t.add_argument("--labels")
    t.add_argument("--kind", required=True, choices=TRANSFORM_KINDS)
    t.add_argument("--alpha", type=float)
    t.add_argument("--delta", type=float)
    t.add_argument("--intra-factor", type=float)
    t.add_argument("--inter-growth", type=float)
    t.add_argument("--seed", **seed)
    t.add_argument("--out", required=True, help="output distances CSV")
    t.set_defaults(func=cmd_transform)

    v = sub.add_parser("verify-axioms", help="run an end-to-end property suite")
    v.add_argument("--suite", choices=("scale", "consistency", "richness", "all"), default="all")
    v.add_argument("--trials", type=int, default=20)
    v.add_argument("--seed", **seed)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify_axioms)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvariantBreach as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (WideGapsError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
