"""Command line entry point: ``qarch run|plot|export-circuit|baseline|presets``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import load_config, parse_config, preset_names
from .errors import ConfigurationError


def _run_one(config_text: str, out: str | None, resume: bool) -> str:
    from .runner import run_experiment

    config = parse_config(config_text)
    return str(run_experiment(config, out, resume=resume))


def cmd_run(args) -> int:
    from .config import format_config
    from .runner import default_run_dir

    config = load_config(args.config)
    if args.out_root:
        config = dataclasses.replace(config, out_dir=args.out_root)
    if args.episodes:
        config = dataclasses.replace(config, episodes=args.episodes)
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
        jobs = []
        for seed in seeds:
            cfg = dataclasses.replace(config, seed=seed)
            out = str(Path(args.out) / f"seed-{seed}") if args.out else str(default_run_dir(cfg))
            jobs.append((format_config(cfg), out, args.resume))
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for path in pool.map(_run_one, *zip(*jobs)):
                print(path)
        return 0
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    print(_run_one(format_config(config), args.out, args.resume))
    return 0


def cmd_plot(args) -> int:
    from .plots import emit_plots

    for path in emit_plots(args.run_dir, args.ma_train, args.ma_test):
        print(path)
    return 0


def cmd_export(args) -> int:
    from .runner import load_best_circuit, verify_best_circuit
    from .vqc import format_circuit

    run_dir = Path(args.run_dir)
    text = format_circuit(load_best_circuit(run_dir))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.verify:
        config = load_config(str(run_dir / "config.cfg"))
        logged, reloaded = verify_best_circuit(run_dir, config)
        print(f"# logged accuracy {logged!r}, reloaded accuracy {reloaded!r}", file=sys.stderr)
        if abs(logged - reloaded) > 1e-9:
            return 1
    return 0


def cmd_baseline(args) -> int:
    from .runner import run_baseline

    config = load_config(args.config)
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else None
    rows = run_baseline(config, seeds, args.report)
    for row in rows:
        print(f"logreg seed={row['seed']} accuracy={row['accuracy']:.4f} parameters={row['parameters']}")
    mean = sum(r["accuracy"] for r in rows) / len(rows)
    print(f"logreg mean accuracy {mean:.4f} over {len(rows)} seeds")
    return 0


def cmd_presets(args) -> int:
    for name in preset_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qarch", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment from a config file or preset name")
    p.add_argument("config")
    p.add_argument("--seed", type=int)
    p.add_argument("--seeds", help="comma-separated seeds, run as separate processes")
    p.add_argument("--jobs", type=int, default=None, help="worker processes for --seeds")
    p.add_argument("--out", help="run directory (parent directory with --seeds)")
    p.add_argument("--out-root", help="override the output root (default $QARCH_OUT or ./runs)")
    p.add_argument("--episodes", type=int, help="override the episode count")
    p.add_argument("--resume", action="store_true", help="continue from checkpoint.npz")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("plot", help="render SVG charts from a run directory")
    p.add_argument("run_dir")
    p.add_argument("--ma-train", type=int, default=40)
    p.add_argument("--ma-test", type=int, default=4)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("export-circuit", help="print the best circuit of a run")
    p.add_argument("run_dir")
    p.add_argument("-o", "--output")
    p.add_argument("--verify", action="store_true",
                   help="re-evaluate the exported circuit against the logged accuracy")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("baseline", help="logistic-regression baseline for a config's dataset")
    p.add_argument("config")
    p.add_argument("--seeds", help="comma-separated data seeds (default: config seeds)")
    p.add_argument("--report", help="report CSV to append to")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("presets", help="list bundled presets")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigurationError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"qarch: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
