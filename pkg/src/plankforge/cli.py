"""Seeded, reproducible experiment runs with canonical reports.

Every subcommand reads its inputs, runs one operation, and emits a
report embedding the full config and the package version.  Identical
configs produce byte-identical reports.  Exit codes: 0 for a completed
run (including an honest "witness not found"), 1 for usage/input
errors, 2 for a violated invariant — a failed validation, an
inconsistent cross-check, or a probe that escapes the cylinder family.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from ._version import __version__
from .constructions import (
    ExponentPair,
    block_basis,
    block_partition,
    block_weights,
    parse_family,
    prefix_weights,
    scaled_basis_sequence,
)
from .cotype import cotype_ratio, necessary_condition_check
from .errors import (
    BoundViolationError,
    ConstructionImpossibleError,
    InsufficientDataError,
    InvalidInputError,
    NoCertificateError,
    PreconditionError,
    ResourceLimitError,
    SpaceMismatchError,
    SupportRangeError,
)
from .planks import coverage_mc, counterexample_demo, planks_from_sequence, witness_search
from .reports import emit_report
from .seeding import derive_seed
from .spaces import (
    Functional,
    Space,
    euclidean,
    read_vectors_csv,
    write_vectors_csv,
)
from .summability import ScalarSequence, WeightMatrix, transform_trend, validate_weights

_INPUT_ERRORS = (
    InvalidInputError,
    SpaceMismatchError,
    SupportRangeError,
    PreconditionError,
    InsufficientDataError,
    NoCertificateError,
    ConstructionImpossibleError,
    ResourceLimitError,
)

# vectors files above this horizon are skipped: a dense basis grows
# quadratically with the horizon and the weights file carries the run
_VECTOR_FILE_CAP = 2048


class _Parser(argparse.ArgumentParser):
    # usage problems must exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _parse_p(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity"):
        return math.inf
    try:
        return float(text)
    except ValueError as exc:
        raise InvalidInputError(f"bad exponent {text!r}") from exc


def _check_seed(seed: int) -> int:
    if not 0 <= seed < 1 << 64:
        raise InvalidInputError("seed must be an unsigned 64-bit integer")
    return seed


def _config_of(args) -> dict:
    cfg = {}
    for key, value in vars(args).items():
        if key == "func" or value is None:
            continue
        cfg[key] = value
    return cfg


def _finish(args, report_obj: dict) -> None:
    payload = {
        "config": _config_of(args),
        "version": __version__,
        "report": report_obj,
    }
    text = emit_report(payload, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text)


def _load_matrix(path: str) -> WeightMatrix:
    try:
        with open(path, encoding="utf-8") as fh:
            return WeightMatrix.from_text(fh.read())
    except OSError as exc:
        raise InvalidInputError(f"cannot read weights from {path}: {exc}") from exc


def _load_vectors(path: str, space: Space | None):
    try:
        return read_vectors_csv(path, space=space)
    except OSError as exc:
        raise InvalidInputError(f"cannot read vectors from {path}: {exc}") from exc


def _space_arg(args) -> Space | None:
    if getattr(args, "space", None) is None:
        return None
    return Space.from_descriptor(args.space)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_validate(args) -> int:
    matrix = _load_matrix(args.weights)
    rep = validate_weights(
        matrix,
        row_tol=args.row_tol,
        column_null_threshold=args.column_threshold,
    )
    _finish(args, rep.to_json_obj())
    return 0 if rep.passed else 2


def _cmd_construct(args) -> int:
    fam = parse_family(args.family)
    stem = args.out
    for suffix in (".json", ".csv"):
        if stem.endswith(suffix):
            stem = stem[: -len(suffix)]
    weights_path = stem + ".weights.txt"
    vectors_path: str | None = stem + ".vectors.csv"
    partition_obj = None
    if args.mode == "main":
        if args.n is None:
            raise InvalidInputError("construct --mode main needs --n")
        matrix = prefix_weights(fam, args.n)
        space = _space_arg(args) or euclidean(args.n)
        if args.n <= _VECTOR_FILE_CAP:
            xs = scaled_basis_sequence(space, fam, args.n)
            write_vectors_csv(vectors_path, xs)
        else:
            vectors_path = None
    else:
        pp = args.p_prime if args.p_prime is not None else 2.0
        part = block_partition(fam, pp, args.blocks, args.growth_target)
        matrix = block_weights(fam, part)
        partition_obj = part.to_json_obj()
        space = _space_arg(args)
        if space is not None and part.horizon <= _VECTOR_FILE_CAP:
            write_vectors_csv(vectors_path, block_basis(space, part))
        else:
            vectors_path = None
    try:
        with open(weights_path, "w", encoding="utf-8") as fh:
            fh.write(matrix.to_text())
    except OSError as exc:
        raise InvalidInputError(f"cannot write weights to {weights_path}: {exc}") from exc
    rep = validate_weights(matrix, row_tol=1e-12, column_null_threshold=0.5)
    _finish(
        args,
        {
            "family": fam.descriptor(),
            "mode": args.mode,
            "weights_path": weights_path,
            "vectors_path": vectors_path,
            "partition": partition_obj,
            "validation": rep.to_json_obj(),
        },
    )
    return 0 if rep.passed else 2


def _cmd_transform(args) -> int:
    matrix = _load_matrix(args.weights)
    if args.sequence is not None:
        try:
            values = np.loadtxt(args.sequence, delimiter=",", ndmin=1)
        except (OSError, ValueError) as exc:
            raise InvalidInputError(
                f"cannot read scalar sequence from {args.sequence}: {exc}"
            ) from exc
        seq = ScalarSequence(np.ravel(values))
    elif args.vectors is not None and args.functional is not None:
        space = _space_arg(args)
        xs = _load_vectors(args.vectors, space)
        fs = _load_vectors(args.functional, space or (xs[0].space if xs else None))
        if not fs:
            raise InvalidInputError("functional file holds no rows")
        f = Functional(fs[0].space, fs[0].coords)
        q = args.p_prime if args.p_prime is not None else 2.0
        from .spaces import pair

        seq = ScalarSequence(np.array([abs(pair(f, x)) ** q for x in xs]))
    else:
        raise InvalidInputError(
            "transform needs --sequence, or --vectors with --functional"
        )
    trend = transform_trend(matrix, seq, threshold=args.threshold)
    _finish(args, trend.to_json_obj())
    return 0


def _build_sequence(args):
    if getattr(args, "vectors", None) is not None:
        return _load_vectors(args.vectors, _space_arg(args))
    if args.family is not None and args.n is not None:
        fam = parse_family(args.family)
        space = _space_arg(args) or euclidean(args.n)
        return scaled_basis_sequence(space, fam, args.n)
    raise InvalidInputError("need --vectors, or --family with --n")


def _cmd_witness(args) -> int:
    xs = _build_sequence(args)
    rep = witness_search(
        xs,
        target_margin=args.target_margin,
        budget=args.budget,
        seed=_check_seed(args.seed),
        restarts=args.restarts,
    )
    # independent margin re-check: a success claim must survive re-evaluation
    recheck = min(
        float(abs(np.vdot(x.coords, rep.witness.coords))) - args.target_margin
        for x in xs
    )
    _finish(args, rep.to_json_obj())
    if rep.success and recheck <= 0.0:
        print("witness re-check failed", file=sys.stderr)
        return 2
    return 0


def _cmd_coverage(args) -> int:
    xs = _build_sequence(args) if (args.vectors or args.family) else []
    planks = planks_from_sequence(xs)
    rep = coverage_mc(planks, args.radius, args.samples, _check_seed(args.seed))
    _finish(args, rep.to_json_obj())
    return 0


def _cmd_counterexample(args) -> int:
    fam = parse_family(args.family)
    seed = _check_seed(args.seed)
    probe_seeds = [derive_seed(seed, i) for i in range(args.samples)]
    rep = counterexample_demo(fam, args.n, probe_seeds)
    _finish(args, rep.to_json_obj())
    bad = any(p["covering_count"] == 0 or p["separates"] for p in rep.probes)
    return 2 if bad else 0


def _cmd_cotype(args) -> int:
    space = _space_arg(args)
    xs = _load_vectors(args.vectors, space)
    if not xs:
        raise InvalidInputError("vectors file holds no rows")
    rep = cotype_ratio(
        xs[0].space,
        xs,
        _parse_p(args.p),
        sampling=args.sampling,
        n_samples=args.samples,
        seed=_check_seed(args.seed),
    )
    _finish(args, rep.to_json_obj())
    return 0


def _cmd_necessary(args) -> int:
    fam = parse_family(args.family)
    exponents = ExponentPair.from_p_prime(
        args.p_prime if args.p_prime is not None else 2.0
    )
    rep = necessary_condition_check(fam, exponents, args.n)
    _finish(args, rep.to_json_obj())
    return 2 if rep.consistent is False else 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_output_flags(sub, out_required: bool = False) -> None:
    sub.add_argument("--out", required=out_required, help="report path")
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="plankforge")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand", required=True)

    sp = subs.add_parser("validate", help="check a weight-matrix file")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--row-tol", type=float, default=1e-12)
    sp.add_argument("--column-threshold", type=float, default=0.5)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_validate)

    sp = subs.add_parser("construct", help="build a weight family and sequence")
    sp.add_argument("--family", required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--mode", choices=("main", "block"), default="main")
    sp.add_argument("--space")
    sp.add_argument("--p-prime", type=float)
    sp.add_argument("--blocks", type=int, default=5)
    sp.add_argument("--growth-target", type=float, default=1.0)
    _add_output_flags(sp, out_required=True)
    sp.set_defaults(func=_cmd_construct)

    sp = subs.add_parser("transform", help="row-average a scalar sequence")
    sp.add_argument("--weights", required=True)
    sp.add_argument("--sequence")
    sp.add_argument("--vectors")
    sp.add_argument("--functional")
    sp.add_argument("--space")
    sp.add_argument("--p-prime", type=float)
    sp.add_argument("--threshold", type=float, default=0.5)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_transform)

    sp = subs.add_parser("witness", help="search for a separating point")
    sp.add_argument("--vectors")
    sp.add_argument("--family")
    sp.add_argument("--n", type=int)
    sp.add_argument("--space")
    sp.add_argument("--target-margin", type=float, default=0.5)
    sp.add_argument("--budget", type=int, default=10_000)
    sp.add_argument("--restarts", type=int, default=32)
    sp.add_argument("--seed", type=int, default=0)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_witness)

    sp = subs.add_parser("coverage", help="Monte Carlo ball coverage")
    sp.add_argument("--vectors")
    sp.add_argument("--family")
    sp.add_argument("--n", type=int)
    sp.add_argument("--space")
    sp.add_argument("--radius", type=float, required=True)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_coverage)

    sp = subs.add_parser("counterexample", help="cylinder coverage demo")
    sp.add_argument("--family", default="power:1:0.5")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, default=10, help="number of probes")
    sp.add_argument("--seed", type=int, default=0)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_counterexample)

    sp = subs.add_parser("cotype", help="best sign-combination ratio")
    sp.add_argument("--vectors", required=True)
    sp.add_argument("--space")
    sp.add_argument("--p", required=True)
    sp.add_argument("--sampling", action="store_true")
    sp.add_argument("--samples", type=int, default=4096)
    sp.add_argument("--seed", type=int, default=0)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_cotype)

    sp = subs.add_parser("necessary", help="partial sums vs analytic verdict")
    sp.add_argument("--family", required=True)
    sp.add_argument("--p-prime", type=float)
    sp.add_argument("--n", type=int, required=True)
    _add_output_flags(sp)
    sp.set_defaults(func=_cmd_necessary)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BoundViolationError as exc:
        print(f"plankforge: invariant violated: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"plankforge: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"plankforge: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
