"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 internal
failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, DataError, ImbStackError, UndefinedMetricError

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _common(p, top=False):
    default = None if top else argparse.SUPPRESS
    p.add_argument("--seed", type=int, default=default, help="master seed")
    p.add_argument("--workers", type=int, default=default, help="worker processes")
    p.add_argument("--label-column", default=default)
    p.add_argument("--amount-column", default=default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="imbstack", description="Imbalanced-data stacking workbench.")
    _common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a synthetic imbalanced dataset")
    g.add_argument("--n", type=int, default=20_000)
    g.add_argument("--ir", type=float, default=0.01)
    g.add_argument("--dims", type=int, default=8)
    g.add_argument("--overlap", type=float, default=0.3)
    g.add_argument("--out", required=True)

    r = sub.add_parser("resample", help="resample a CSV dataset")
    r.add_argument("--method", required=True)
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--k", type=int, default=5)
    r.add_argument("--metric", default="euclidean")
    r.add_argument("--report", help="also write the resampling report JSON here")

    for name, text in (
        ("run", "level-0 grid, level-1 stacks and report"),
        ("level0", "level-0 grid only"),
        ("level1", "level-1 phase from a prior level0 output"),
        ("report", "report files from prior level0 and level1 outputs"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", help="flat TOML config, or a manifest.json to replay")
        p.add_argument("--out-dir", required=True)

    for p in sub.choices.values():
        _common(p)
    return parser


def _load_config(args):
    from .config import ExperimentConfig, from_mapping, load_config

    if args.config is None:
        cfg = ExperimentConfig()
    elif args.config.endswith(".json"):
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"manifest not found: {path}")
        try:
            doc = json.loads(path.read_text())["config"]
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{path}: not a run manifest ({exc})") from None
        cfg = from_mapping(doc)
    else:
        cfg = load_config(args.config)
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.workers is not None:
        overrides["workers"] = args.workers
    if args.label_column is not None:
        overrides["label_column"] = args.label_column
    if args.amount_column is not None:
        overrides["amount_column"] = args.amount_column
    return cfg.replace(**overrides) if overrides else cfg


def _cmd_generate(args):
    from .data import synthesize_dataset, write_csv

    data = synthesize_dataset(args.n, args.ir, args.dims, args.overlap, args.seed or 0)
    write_csv(data, args.out, args.label_column or "Class", args.amount_column or "Amount")
    print(f"wrote {len(data)} rows ({data.n_minority} minority) to {args.out}")


def _cmd_resample(args):
    from .data import load_csv, write_csv
    from .resampling import ResampleMethod, apply

    method = ResampleMethod(args.method, k_neighbors=args.k, metric=args.metric, seed=args.seed or 0)
    data = load_csv(args.inp, args.label_column or "Class", args.amount_column)
    out, report = apply(method, data)
    write_csv(out, args.out, args.label_column or "Class", args.amount_column or "Amount")
    if args.report:
        Path(args.report).write_text(report.to_json() + "\n")
    print(report.to_json())


def _cmd_phase(args):
    from . import harness
    from .report import emit_report, load_phase, save_phase

    cfg = _load_config(args)
    out = Path(args.out_dir)
    if args.command == "run":
        rep = harness.run_experiment(cfg)
        save_phase(rep.level0, out, "level0")
        save_phase(rep.level1, out, "level1")
        emit_report(rep, out)
    elif args.command == "level0":
        save_phase(harness.run_level0(cfg), out, "level0")
    elif args.command == "level1":
        level0 = _need_phase(load_phase, out, "level0")
        save_phase(harness.run_level1(cfg, level0.rows), out, "level1")
    else:
        level0 = _need_phase(load_phase, out, "level0")
        level1 = _need_phase(load_phase, out, "level1")
        emit_report(harness.build_report(cfg, level0, level1), out)
    print(f"wrote {args.command} output to {out}")


def _need_phase(load, out, name):
    if not (Path(out) / f"{name}.json").exists():
        raise DataError(f"{out}: no {name} output; run `imbstack {name}` first")
    return load(out, name)


_COMMANDS = {"generate": _cmd_generate, "resample": _cmd_resample}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _COMMANDS.get(args.command, _cmd_phase)(args)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, UndefinedMetricError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ImbStackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
