"""Command-line front end: ``gpentropy <subcommand> ...``.

Exit codes: 0 success, 1 internal error, 2 usage or validation error,
3 resource-guard refusal. Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import KINDS, default_sweep_range, estimate_half_period, window_size_sweep, windowed_entropy
from .cornertree import BASIS_VERSION, select_basis
from .entropy import ctpe, gpe, pe, pe_avg
from .errors import GPEError, ResourceGuardError, ValidationError
from .experiments.config import Config, load_config, parse_int_list
from .experiments.harness import atomic_write, config_from_mapping, run_experiment
from .experiments.rng import ALGORITHM, Rng
from .experiments.signals import FAMILIES, SignalSpec, gen_signal
from .profile import FALLBACK_GUARD, METHODS, profile
from .series import rank_series, read_series_csv

log = logging.getLogger("gpentropy")

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _version_text() -> str:
    return f"gpentropy {__version__} (basis {BASIS_VERSION}; rng {ALGORITHM})"


def _order(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"order must be an integer, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gpentropy", description="Global permutation entropy of time series.")
    p.add_argument("--version", action="version", version=_version_text())
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("profile", help="order-k pattern counts of a series")
    sp.add_argument("input", help="CSV file with one value or 't,value' per line ('-' for stdin)")
    sp.add_argument("--order", "-k", type=_order, required=True)
    sp.add_argument("--method", choices=METHODS, default="auto")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--guard", type=int, default=FALLBACK_GUARD,
                    help="largest C(n,k) the enumerating methods accept")

    se = sub.add_parser("entropy", help="GPE, PE, averaged PE or corner-tree entropy")
    se.add_argument("input")
    se.add_argument("--kind", choices=KINDS, default="gpe")
    se.add_argument("--order", "-k", type=_order, required=True)
    dg = se.add_mutually_exclusive_group()
    dg.add_argument("--delay", type=int, help="delay for pe (default 1)")
    dg.add_argument("--delays", help="delay set for peavg, e.g. '1..10' or '1,2,5'")
    se.add_argument("--method", choices=METHODS, default="auto")
    se.add_argument("--guard", type=int, default=FALLBACK_GUARD)
    se.add_argument("--raw", action="store_true", help="report the value in nats")
    se.add_argument("--allow-expensive", action="store_true",
                    help="permit the slow basis selection for ctpe with k=6")

    for name, helptext in (
        ("sweep", "sliding-window entropy series from a config file"),
        ("windowsize", "window-size sweep and half-period estimate from a config file"),
        ("experiment", "run a seeded experiment from a config file"),
    ):
        sc = sub.add_parser(name, help=helptext)
        sc.add_argument("config", help="key = value config file")
        sc.add_argument("--seed", type=int)
        sc.add_argument("--threads", type=int, default=os.cpu_count() or 1)
        sc.add_argument("--output-dir", help="overrides the config's output_dir")
    return p


def _read(path: str) -> np.ndarray:
    if path == "-":
        return read_series_csv(sys.stdin)
    return read_series_csv(path)


def cmd_profile(args) -> int:
    x = _read(args.input)
    prof = profile(rank_series(x), args.order, args.method, args.guard)
    if args.format == "json":
        sys.stdout.write(prof.to_json() + "\n")
    else:
        lines = ["pattern,count"]
        lines += [f"{label},{count}" for label, count in prof.as_dict().items()]
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_entropy(args) -> int:
    x = _read(args.input)
    k, kind = args.order, args.kind
    norm = not args.raw
    if args.delay is not None and kind != "pe":
        raise ValidationError("--delay applies to --kind pe only")
    if args.delays is not None and kind != "peavg":
        raise ValidationError("--delays applies to --kind peavg only")
    if kind == "gpe":
        val = gpe(x, k, norm, args.method, args.guard)
    elif kind == "pe":
        val = pe(x, k, 1 if args.delay is None else args.delay, norm)
    elif kind == "peavg":
        if args.delays is None:
            raise ValidationError("--kind peavg needs --delays")
        val = pe_avg(x, k, parse_int_list(args.delays, "--delays"))
    else:
        val = ctpe(x, k, norm, allow_expensive=args.allow_expensive)
    rec = val.to_record()
    rec["value"] = val.normalized if norm else val.raw
    sys.stdout.write(json.dumps(rec, sort_keys=True) + "\n")
    return EXIT_OK


def _outdir(args, conf: Config) -> Path:
    base = Path(args.config).resolve().parent
    out = Path(args.output_dir) if args.output_dir else base / conf.str("output_dir", ".")
    return out


def _resolve(args, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else Path(args.config).resolve().parent / p


def _window_params(conf: Config) -> dict:
    params: dict = {}
    if "delay" in conf:
        params["delay"] = conf.int("delay")
    if "delays" in conf:
        params["delays"] = conf.ints("delays")
    if "method" in conf:
        params["method"] = conf.str("method")
    return params


def cmd_sweep(args) -> int:
    """Config keys: input, kind, order, window, [stride, delay, delays,
    method, output, output_dir]."""
    conf = load_config(args.config)
    x = read_series_csv(_resolve(args, conf.str("input")))
    kind, k, w = conf.str("kind", "gpe"), conf.int("order"), conf.int("window")
    params = _window_params(conf)
    series = windowed_entropy(x, kind, k, w, stride=conf.int("stride", 1), **params)
    out = _outdir(args, conf) / conf.str("output", f"{kind}_k{k}_w{w}.csv")
    _reject_unused(conf)
    atomic_write(out, series.to_csv())
    print(out)
    return EXIT_OK


def _realizations(args, conf: Config) -> list[np.ndarray]:
    if "inputs" in conf:
        return [read_series_csv(_resolve(args, p.strip()))
                for p in conf.str("inputs").split(",") if p.strip()]
    family = conf.str("family", "ramp_noise")
    if family not in FAMILIES:
        raise ValidationError(f"unknown family {family!r}")
    fields = {"period": conf.int("period", 60)}
    if "sigma2" in conf:
        fields["sigma2"] = conf.float("sigma2")
    if "eps" in conf:
        fields["eps"] = conf.float("eps")
    if "length" in conf:
        fields["length"] = conf.int("length")
    spec = SignalSpec(family, **fields)
    seed = args.seed if args.seed is not None else conf.int("seed", 0)
    return [gen_signal(spec, Rng(seed, i)) for i in range(conf.int("realizations", 100))]


def cmd_windowsize(args) -> int:
    """Config keys: inputs (comma list) or family/period/sigma2/realizations/seed;
    kind, order, [windows, output_dir]."""
    conf = load_config(args.config)
    series = _realizations(args, conf)
    kind, k = conf.str("kind", "gpe"), conf.int("order", 3)
    n = min(s.size for s in series)
    widths = conf.ints("windows", list(default_sweep_range(n, k)))
    params = _window_params(conf)
    outdir = _outdir(args, conf)
    _reject_unused(conf)
    curve = window_size_sweep(series, kind, k, widths, threads=args.threads, **params)
    est = estimate_half_period(curve)
    if not est.interior:
        log.warning("sweep minimum at the edge of the window range (w=%d)", est.window)
    summary = {"kind": kind, "order": k, "realizations": len(series),
               "argmin": est.window, "interior": est.interior,
               "recommended": list(est.recommended)}
    paths = [outdir / "windowsize_curve.csv", outdir / "windowsize_summary.json"]
    texts = [curve.to_csv(), json.dumps(summary, indent=2, sort_keys=True) + "\n"]
    for p, text in zip(paths, texts):
        atomic_write(p, text)
        print(p)
    return EXIT_OK


def cmd_experiment(args) -> int:
    conf = load_config(args.config)
    outdir = _outdir(args, conf)
    name, cfg = config_from_mapping(conf, seed=args.seed, threads=args.threads)
    report = run_experiment(name, cfg)
    for p in report.write(outdir):
        print(p)
    return EXIT_OK


def _reject_unused(conf: Config) -> None:
    extra = conf.unused()
    if extra:
        raise ValidationError(f"unknown config keys: {', '.join(extra)}")


COMMANDS = {
    "profile": cmd_profile,
    "entropy": cmd_entropy,
    "sweep": cmd_sweep,
    "windowsize": cmd_windowsize,
    "experiment": cmd_experiment,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"gpentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="gpentropy: %(message)s", stream=sys.stderr)
    warnings.simplefilter("default")
    try:
        # startup check: the stored bases must still have full rank
        for k in (2, 3, 4):
            select_basis(k)
        return COMMANDS[args.command](args)
    except ResourceGuardError as exc:
        print(f"gpentropy: refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except ValidationError as exc:
        print(f"gpentropy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GPEError as exc:
        print(f"gpentropy: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
