"""Command-line interface.

Exit codes: 0 success, 1 data error (unreadable/malformed inputs, shape
mismatches), 2 usage error (bad flags). Output files are written via
temp-and-rename, so a failed run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

from .errors import (
    NotAFunctionError,
    PairingError,
    ParseError,
    ShapeError,
    StratificationError,
)
from .experiment import (
    _fill_from_cues,
    label_groups,
    run_fixed_split,
    run_sweep,
    write_report,
)
from .features import load_dataset, cues_from_dataset
from .grids import grid_to_text, load_grid
from .memory import (
    MemoryRegister,
    RegisterBank,
    bank_to_text,
    load_bank,
    recognize,
    retrieve,
    save_bank,
)
from .ops import entropy

_DATA_ERRORS = (ParseError, ShapeError, StratificationError, PairingError,
                NotAFunctionError, ValueError, OSError)


def _parse_pairs(text: str, parser: argparse.ArgumentParser):
    """--pairs "0:5,1:6" -> (("0","5"), ("1","6")). Colon-separated groups."""
    groups = []
    for chunk in text.split(","):
        members = tuple(m.strip() for m in chunk.split(":"))
        if not all(members) or not members:
            parser.error(f"malformed --pairs entry {chunk!r}")
        groups.append(members)
    return tuple(groups)


def _parse_levels_list(text: str, parser: argparse.ArgumentParser) -> list[int]:
    try:
        levels = [int(part) for part in text.split(",")]
    except ValueError:
        parser.error(f"--levels must be a comma-separated integer list, got {text!r}")
    if not levels or any(L < 1 for L in levels):
        parser.error(f"--levels entries must be >= 1, got {text!r}")
    return levels


def _max_workers_from_env() -> int | None:
    raw = os.environ.get("DTM_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
        if value < 1:
            raise ValueError
    except ValueError:
        print(f"gridmem: warning: ignoring invalid DTM_THREADS={raw!r}",
              file=sys.stderr)
        return None
    return value


def _write_csv(rows, header) -> None:
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def _cmd_fill(args, parser) -> int:
    if args.levels < 1:
        parser.error(f"--levels must be >= 1, got {args.levels}")
    pairing = _parse_pairs(args.pairs, parser) if args.pairs else None
    ds = load_dataset(args.features)
    spec = ds.quantization_spec(args.levels)
    cues = cues_from_dataset(ds, spec)
    groups = label_groups(ds.labels, pairing)
    bank = _fill_from_cues(ds.labels, cues, groups, spec)
    save_bank(bank, args.out)
    print(f"wrote {len(bank)} registers ({bank.n_cols}x{bank.m_rows}) to {args.out}")
    return 0


def _cmd_recognize(args, parser) -> int:
    bank = load_bank(args.memory)
    ds = load_dataset(args.features)
    if bank.n_cols != ds.n_features:
        raise ShapeError(
            f"memory has {bank.n_cols} columns but features have "
            f"{ds.n_features} values per record"
        )
    spec = ds.quantization_spec(bank.m_rows)
    cues = cues_from_dataset(ds, spec)
    rows = []
    for index, (record, cue) in enumerate(zip(ds, cues)):
        for reg in bank:
            accepted = recognize(reg, cue)
            rows.append([index, record.label, ",".join(sorted(reg.labels)),
                         "true" if accepted else "false"])
    _write_csv(rows, ["record_index", "label", "register_labels", "accepted"])
    return 0


def _cmd_retrieve(args, parser) -> int:
    bank = load_bank(args.memory)
    if len(bank) != 1:
        raise ValueError(
            f"retrieve needs a single-register memory file, found {len(bank)}"
        )
    reg = bank.registers[0]
    cue = load_grid(args.cue_grid)
    outcome = retrieve(reg, cue)
    new_bank = RegisterBank([MemoryRegister(outcome.new_content, reg.labels)])
    save_bank(new_bank, args.out)
    print(f"accepted={'true' if outcome.accepted else 'false'}")
    sys.stdout.write(grid_to_text(outcome.output))
    return 0


def _cmd_experiment(args, parser) -> int:
    levels = _parse_levels_list(args.levels, parser)
    if args.folds < 2:
        parser.error(f"--folds must be >= 2, got {args.folds}")
    pairing = _parse_pairs(args.pairs, parser) if args.pairs else None
    if args.fixed_split:
        train = load_dataset(args.fixed_split[0])
        test = load_dataset(args.fixed_split[1])
        report = run_fixed_split(train, test, levels, pairing)
    else:
        ds = load_dataset(args.features)
        report = run_sweep(ds, levels, k=args.folds, seed=args.seed,
                           pairing=pairing,
                           max_workers=_max_workers_from_env())
    write_report(report, args.out_dir)
    sys.stdout.write(report.aggregate_table())
    return 0


def _cmd_entropy(args, parser) -> int:
    bank = load_bank(args.memory)
    rows = [[",".join(sorted(reg.labels)), f"{entropy(reg.content):.6f}"]
            for reg in bank]
    _write_csv(rows, ["register_labels", "entropy_bits"])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridmem",
        description="Associative memory on binary grids: fill registers from "
                    "quantized features, recognize and retrieve cues, and run "
                    "recognition experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fill", help="fill memory registers from a feature file")
    p.add_argument("--features", required=True, help="input feature file")
    p.add_argument("--levels", required=True, type=int,
                   help="number of quantization levels (grid rows)")
    p.add_argument("--pairs", help='label grouping, e.g. "0:5,1:6,2:7,3:8,4:9"')
    p.add_argument("--out", required=True, help="output memory file")
    p.set_defaults(func=_cmd_fill)

    p = sub.add_parser("recognize",
                       help="test every record against every register")
    p.add_argument("--memory", required=True, help="memory file")
    p.add_argument("--features", required=True, help="feature file of cues")
    p.set_defaults(func=_cmd_recognize)

    p = sub.add_parser("retrieve",
                       help="retrieve a cue grid from a single-register memory")
    p.add_argument("--memory", required=True, help="single-register memory file")
    p.add_argument("--cue-grid", required=True, help="cue grid file")
    p.add_argument("--out", required=True, help="updated memory file")
    p.set_defaults(func=_cmd_retrieve)

    p = sub.add_parser("experiment", help="run a level sweep with k-fold "
                       "cross-validation or a fixed train/test split")
    p.add_argument("--features", help="feature file (k-fold mode)")
    p.add_argument("--levels", required=True,
                   help='comma-separated levels, e.g. "1,2,4,8"')
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pairs", help="label grouping (see fill)")
    p.add_argument("--fixed-split", nargs=2, metavar=("TRAIN", "TEST"),
                   help="use a fixed train/test split instead of folds")
    p.add_argument("--out-dir", required=True,
                   help="directory for rows.csv, aggregates.csv, confusion.csv")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("entropy", help="per-register entropy of a memory file")
    p.add_argument("--memory", required=True, help="memory file")
    p.set_defaults(func=_cmd_entropy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "experiment" and not args.fixed_split and not args.features:
        parser.print_usage(sys.stderr)
        print("gridmem experiment: error: --features is required unless "
              "--fixed-split is given", file=sys.stderr)
        return 2
    try:
        return args.func(args, parser)
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code or 0)
    except _DATA_ERRORS as exc:
        print(f"gridmem: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
