"""Command line front end.

Subcommands: learn a separating formula from a manifest of labelled
chains, check one LTL formula on one chain, and benchgen to emit the
bundled benchmark samples.  Exit codes: 0 success, 1 no formula exists
within the search bounds, 2 bad input or usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import benchgen
from .dtmc import Dtmc, DtmcError, Sample, parse_json_dtmc, parse_prism_explicit
from .engine import check_ltl
from .learner import LearnConfig, NoSolutionError, learn
from .ltl import LtlParseError, parse_ltl, print_pltl


def _load_chain(entry: dict, base: Path) -> Dtmc:
    fmt = entry.get("format", "json")
    if fmt == "json":
        return parse_json_dtmc((base / entry["path"]).read_text())
    if fmt == "prism-explicit":
        return parse_prism_explicit(
            (base / entry["tra"]).read_text(), (base / entry["lab"]).read_text()
        )
    raise DtmcError(f"unknown chain format {fmt!r}")


def _print_stats(s) -> None:
    print(
        f"stats: constructed={s.total('constructed')} "
        f"pruned_temporal={s.total('pruned_temporal')} "
        f"pruned_boolean={s.total('pruned_boolean')} "
        f"checked={s.total('checked')} discarded={s.total('discarded')} "
        f"pooled={s.total('pooled')} combos_tried={s.combos_tried} "
        f"engine_calls={s.engine_calls}",
        file=sys.stderr,
    )
    for n in s.sizes():
        print(
            f"stats[size {n}]: constructed={s.constructed.get(n, 0)} "
            f"pruned_temporal={s.pruned_temporal.get(n, 0)} "
            f"pruned_boolean={s.pruned_boolean.get(n, 0)} "
            f"checked={s.checked.get(n, 0)} "
            f"discarded={s.discarded.get(n, 0)} "
            f"pooled={s.pooled.get(n, 0)}",
            file=sys.stderr,
        )
    phases = " ".join(
        f"{name}={s.phase_seconds[name]:.3f}s" for name in sorted(s.phase_seconds)
    )
    if phases:
        print(f"stats[phase]: {phases}", file=sys.stderr)


def _cmd_learn(args) -> int:
    manifest_path = Path(args.sample)
    doc = json.loads(manifest_path.read_text())
    base = manifest_path.resolve().parent
    for side in ("positive", "negative"):
        if side not in doc:
            raise DtmcError(f"manifest lacks a {side!r} list")
    positive = [_load_chain(e, base) for e in doc["positive"]]
    negative = [_load_chain(e, base) for e in doc["negative"]]
    sample = Sample.build(positive, negative, doc.get("ap"))

    params = doc.get("params", {})

    def pick(flag, key, default):
        if flag is not None:
            return flag
        return params.get(key, default)

    max_size = pick(args.max_size, "max_size", None)
    if max_size is None:
        raise DtmcError("a size bound is required (--max-size or params.max_size)")
    config = LearnConfig(
        max_size=int(max_size),
        max_depth=int(pick(args.max_depth, "max_depth", 2)),
        delta=float(pick(args.delta, "delta", 0.05)),
        bool_limit=int(pick(args.bool_limit, "bool_limit", 10)),
        jobs=args.jobs,
        eager_return=args.eager_return,
        all_minimal=args.all_minimal,
    )
    try:
        result = learn(sample, config)
    except NoSolutionError as e:
        print(e, file=sys.stderr)
        return 1
    for f, margin in zip(result.formulas, result.margins):
        shown = "n/a" if margin is None else f"{margin:.6f}"
        print(f"{print_pltl(f)}  margin={shown}")
    if args.stats:
        _print_stats(result.stats)
    return 0


def _cmd_check(args) -> int:
    formula = parse_ltl(args.formula)
    model = Path(args.model)
    if model.suffix == ".tra" or args.lab is not None:
        lab = Path(args.lab) if args.lab is not None else model.with_suffix(".lab")
        m = parse_prism_explicit(model.read_text(), lab.read_text())
    else:
        m = parse_json_dtmc(model.read_text())
    vec = check_ltl(m, formula)
    for i, v in enumerate(vec.values):
        print(f"state {i}: {v:.9f}")
    print(f"v_I = {vec.init:.9f}")
    return 0


def _cmd_benchgen(args) -> int:
    builder, params = benchgen.KINDS[args.name]
    manifest = benchgen.write_sample(
        builder(seed=args.seed),
        Path(args.out),
        args.format,
        params,
        generator={"name": args.name, "seed": args.seed},
    )
    print(manifest)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pltl-learn",
        description="learn minimal probabilistic-threshold LTL formulas "
        "separating positive from negative Markov chains",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_learn = sub.add_parser("learn", help="learn a formula from a sample manifest")
    p_learn.add_argument("--sample", required=True, help="manifest.json describing the sample")
    p_learn.add_argument("-K", "--max-size", type=int, default=None, help="formula size bound")
    p_learn.add_argument("-D", "--max-depth", type=int, default=None, help="temporal depth bound")
    p_learn.add_argument("--delta", type=float, default=None, help="required atom margin")
    p_learn.add_argument("--bool-limit", type=int, default=None, help="combination shortlist length")
    p_learn.add_argument("--jobs", type=int, default=1, help="evaluation threads")
    p_learn.add_argument("--eager-return", action="store_true", help="stop at the first hit")
    p_learn.add_argument(
        "--all-minimal", action="store_true", help="report every consistent atom at the winning size"
    )
    p_learn.add_argument("--stats", action="store_true", help="print search statistics to stderr")
    p_learn.set_defaults(func=_cmd_learn)

    p_check = sub.add_parser("check", help="print per-state probabilities of a formula")
    p_check.add_argument("--model", required=True, help="chain file: .json, or .tra with a sibling .lab")
    p_check.add_argument("--formula", required=True, help="LTL formula, e.g. 'F(a & F(b))'")
    p_check.add_argument("--lab", help="PRISM .lab file when not named like the .tra")
    p_check.set_defaults(func=_cmd_check)

    p_gen = sub.add_parser("benchgen", help="write a bundled benchmark sample")
    p_gen.add_argument("--name", required=True, choices=sorted(benchgen.KINDS))
    p_gen.add_argument("--out", required=True, help="directory for chain files and manifest.json")
    p_gen.add_argument("--seed", type=int, default=0, help="parameter seed; 0 keeps the documented defaults")
    p_gen.add_argument("--format", choices=("json", "prism"), default="json")
    p_gen.set_defaults(func=_cmd_benchgen)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (LtlParseError, DtmcError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except KeyError as e:
        print(f"error: missing key {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
