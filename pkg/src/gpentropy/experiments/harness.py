"""Seeded Monte-Carlo experiments comparing GPE and PE on synthetic signals.

Every run draws from its own stream ``Rng(seed, stream)``, runs are reduced
in run-index order, and floats are written with ``repr``; the same config
and seed therefore reproduce every output byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.stats import spearmanr

from .. import _kernels
from ..analysis import default_sweep_range, estimate_half_period, feasible_delays, window_size_sweep, windowed_entropy
from ..entropy import delayed_pattern_codes
from ..errors import InsufficientDataError, ValidationError
from ..profile import FALLBACK_GUARD, prefix_profiles
from ..series import rank_series
from .config import Config
from .roc import mean_ci, roc_auc
from .rng import ALGORITHM, Rng
from .signals import SignalSpec, burst_onset, gen_signal

__all__ = [
    "ExperimentReport",
    "ConvergenceConfig",
    "NoiseDetectionConfig",
    "RampConfig",
    "run_convergence",
    "run_noise_detection",
    "run_ramp",
    "config_from_mapping",
    "run_experiment",
    "atomic_write",
]

log = logging.getLogger(__name__)


def atomic_write(path: Path, data: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def table_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _fmt(v) for k, v in row.items()})
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


@dataclass
class ExperimentReport:
    name: str
    seed: int
    config: dict
    tables: dict[str, list[dict]]
    summary: dict

    def summary_json(self) -> str:
        payload = {
            "experiment": self.name,
            "seed": self.seed,
            "rng": ALGORITHM,
            "config": self.config,
            "summary": self.summary,
        }
        return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"

    def files(self) -> dict[str, str]:
        out = {f"{self.name}_{key}.csv": table_csv(rows) for key, rows in self.tables.items()}
        out[f"{self.name}_summary.json"] = self.summary_json()
        return out

    def write(self, outdir: str | Path) -> list[Path]:
        """Render every file in memory first, then write each atomically."""
        rendered = self.files()
        paths = []
        for name, text in rendered.items():
            p = Path(outdir) / name
            atomic_write(p, text)
            paths.append(p)
        return paths


def _map_runs(fn: Callable[[int], object], runs: int, threads: int) -> list:
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, range(runs)))
    return [fn(i) for i in range(runs)]


def _prefix_entropies(counts: np.ndarray, k: int) -> np.ndarray:
    return _kernels.entropy_rows(counts.astype(np.float64)) / math.log(math.factorial(k))


# -- convergence ------------------------------------------------------------


@dataclass
class ConvergenceConfig:
    runs: int = 100
    length: int = 50
    orders: tuple[int, ...] = (2, 3, 4, 5, 6)
    seed: int = 0
    family: str = "iid"
    noise_sd: float | None = None
    guard: int = FALLBACK_GUARD
    threads: int = 1


def run_convergence(cfg: ConvergenceConfig) -> ExperimentReport:
    """GPE(k) and PE(k;1) of growing prefixes of random series.

    Prefix profiles come from a single enumeration per series and order:
    each tuple is credited to every prefix containing its last index.
    """
    extra = {} if cfg.noise_sd is None else {"noise_sd": cfg.noise_sd}
    spec = SignalSpec(cfg.family, length=cfg.length, **extra)

    def one(run: int) -> dict:
        x = gen_signal(spec, Rng(cfg.seed, run))
        r = rank_series(x)
        out = {}
        for k in cfg.orders:
            if cfg.length < k:
                continue
            g = _prefix_entropies(prefix_profiles(r, k, cfg.guard)[k - 1:], k)
            codes = delayed_pattern_codes(r, k, 1)
            onehot = np.zeros((codes.size, math.factorial(k)), dtype=np.int64)
            onehot[np.arange(codes.size), codes] = 1
            p = _prefix_entropies(np.cumsum(onehot, axis=0), k)
            out[k] = (g, p)
        return out

    per_run = _map_runs(one, cfg.runs, cfg.threads)
    curves, realizations = [], []
    summary: dict = {"final_length": cfg.length, "orders": {}}
    for k in cfg.orders:
        if cfg.length < k:
            log.info("order %d skipped: series shorter than the order", k)
            continue
        ns = np.arange(k, cfg.length + 1)
        for method, slot in (("GPE", 0), ("PE", 1)):
            vals = np.stack([res[k][slot] for res in per_run])
            mean, std = vals.mean(axis=0), vals.std(axis=0, ddof=1) if cfg.runs > 1 else np.zeros(ns.size)
            for j, n in enumerate(ns):
                curves.append({"method": method, "order": k, "n": int(n),
                               "mean": mean[j], "std": std[j]})
            for run in range(cfg.runs):
                for j, n in enumerate(ns):
                    realizations.append({"run": run, "method": method, "order": k,
                                         "n": int(n), "value": vals[run, j]})
        g_final = float(np.mean([res[k][0][-1] for res in per_run]))
        p_final = float(np.mean([res[k][1][-1] for res in per_run]))
        summary["orders"][str(k)] = {"gpe_mean": g_final, "pe_mean": p_final,
                                     "gpe_minus_pe": g_final - p_final}
    return ExperimentReport("convergence", cfg.seed, _echo(cfg),
                            {"curves": curves, "realizations": realizations}, summary)


# -- noise detection --------------------------------------------------------


@dataclass
class NoiseDetectionConfig:
    period: int = 10
    eps: float = 0.25
    runs: int = 100
    orders: tuple[int, ...] = (2, 3, 4)
    windows: tuple[int, ...] | None = None
    seed: int = 0
    pe_average: bool = True
    threads: int = 1

    def window_list(self) -> list[int]:
        if self.windows:
            return list(self.windows)
        return list(range(8, (3 * self.period) // 2 + 2))


def noise_segments(period: int) -> tuple[range, range]:
    """1-based end times scored as quiet and as noisy.

    Both segments hold ``(3/2)P`` windows: the quiet one ends at the last
    less noisy time ``3P``, the noisy one starts right after it.
    """
    onset = burst_onset(period)
    seg = (3 * period) // 2
    return range(onset - seg + 1, onset + 1), range(onset + 1, onset + seg + 1)


def run_noise_detection(cfg: NoiseDetectionConfig) -> ExperimentReport:
    """AUC of entropy as a noise-burst detector, GPE against PE.

    For each window the best mean AUC is taken over orders for GPE and over
    orders, feasible delays and the delay average for PE. The summary
    compares the overall best configurations of the two methods on paired
    per-run AUC differences.
    """
    spec = SignalSpec("noise_burst", period=cfg.period, eps=cfg.eps)
    quiet_t, noisy_t = noise_segments(cfg.period)
    widths = cfg.window_list()
    if max(widths) > quiet_t.start:
        raise ValidationError(
            f"window {max(widths)} too wide: scoring starts at t={quiet_t.start}"
        )

    def scores(es) -> tuple[np.ndarray, np.ndarray]:
        off = es.t[0]
        q = es.values[np.asarray(quiet_t) - off]
        z = es.values[np.asarray(noisy_t) - off]
        return z, q

    def one(run: int) -> dict:
        x = gen_signal(spec, Rng(cfg.seed, run))
        out = {}
        for w in widths:
            for k in cfg.orders:
                if w < k:
                    log.info("skip w=%d k=%d: window shorter than order", w, k)
                    continue
                z, q = scores(windowed_entropy(x, "gpe", k, w))
                out[("GPE", w, k, "")] = roc_auc(z, q).auc
                delays = feasible_delays(w, k)
                for d in delays:
                    z, q = scores(windowed_entropy(x, "pe", k, w, delay=d))
                    out[("PE", w, k, str(d))] = roc_auc(z, q).auc
                if cfg.pe_average:
                    z, q = scores(windowed_entropy(x, "peavg", k, w, delays=delays))
                    out[("PE", w, k, "avg")] = roc_auc(z, q).auc
        return out

    per_run = _map_runs(one, cfg.runs, cfg.threads)
    keys = list(per_run[0])
    aucs = {key: np.array([res[key] for res in per_run]) for key in keys}
    configs = []
    for key in keys:
        m, lo, hi = mean_ci(aucs[key])
        method, w, k, d = key
        configs.append({"method": method, "window": w, "order": k, "delay": d,
                        "mean_auc": m, "ci_low": lo, "ci_high": hi})

    def best(method: str, w: int | None = None):
        cands = [c for c in configs if c["method"] == method and (w is None or c["window"] == w)]
        # ties resolved by first occurrence in (window, order, delay) order
        return max(cands, key=lambda c: c["mean_auc"]) if cands else None

    best_rows = []
    for w in widths:
        for method in ("GPE", "PE"):
            b = best(method, w)
            if b is not None:
                best_rows.append({"window": w, "method": method, "order": b["order"],
                                  "delay": b["delay"], "mean_auc": b["mean_auc"],
                                  "ci_low": b["ci_low"], "ci_high": b["ci_high"]})
    bg, bp = best("GPE"), best("PE")
    diff = aucs[("GPE", bg["window"], bg["order"], "")] - \
        aucs[("PE", bp["window"], bp["order"], bp["delay"])]
    dm, dlo, dhi = mean_ci(diff)
    summary = {
        "best_gpe": bg,
        "best_pe": bp,
        "difference": {"mean": dm, "ci_low": dlo, "ci_high": dhi,
                       "excludes_zero": bool(dlo > 0 or dhi < 0)},
        "quiet_t": [quiet_t.start, quiet_t.stop - 1],
        "noisy_t": [noisy_t.start, noisy_t.stop - 1],
    }
    return ExperimentReport("noise_detection", cfg.seed, _echo(cfg),
                            {"configs": configs, "best": best_rows}, summary)


# -- ramped noise -----------------------------------------------------------


@dataclass
class RampConfig:
    periods: tuple[int, ...] = (60, 120)
    sigma2s: tuple[float, ...] = (1.0, 4.0)
    runs: int = 100
    windows: tuple[int, ...] = (30, 45, 60, 150)
    gpe_orders: tuple[int, ...] = (3, 4)
    pe_orders: tuple[int, ...] = (3,)
    pe_delays: tuple[int, ...] = (1, 10, 20)
    pe_avg_delays: tuple[int, ...] = tuple(range(1, 11))
    sweep_order: int = 3
    sweep_windows: tuple[int, ...] | None = None
    trend_window: int = 30
    seed: int = 0
    threads: int = 1

    def sweep_range(self, period: int, n: int) -> list[int]:
        """Explicit widths, else the sample-size threshold up to one period."""
        if self.sweep_windows:
            return [w for w in self.sweep_windows if w <= n]
        full = default_sweep_range(n, self.sweep_order)
        return list(range(full.start, min(period, full.stop - 1) + 1))


def _rise_time(curve: np.ndarray, frac: float = 0.9) -> float:
    """Fraction of the curve's length at which it first reaches `frac` of its range."""
    lo, hi = float(curve.min()), float(curve.max())
    if hi <= lo:
        return 0.0
    idx = int(np.argmax(curve >= lo + frac * (hi - lo)))
    return idx / max(curve.size - 1, 1)


def run_ramp(cfg: RampConfig) -> ExperimentReport:
    """Average windowed entropies of a sine with linearly growing noise.

    Produces mean curves for every (period, variance, method, order, delay,
    window) combination plus, per (period, variance), the window-size sweep
    and its half-period estimate.
    """
    curves, sweeps, summary = [], [], {"conditions": []}
    for ci, (period, s2) in enumerate((p, s) for p in cfg.periods for s in cfg.sigma2s):
        spec = SignalSpec("ramp_noise", period=period, sigma2=s2)
        signals = _map_runs(lambda run: gen_signal(spec, Rng(cfg.seed, ci * 1_000_000 + run)),
                            cfg.runs, cfg.threads)
        n = spec.n
        cond: dict = {"period": period, "sigma2": s2, "length": n}
        means: dict[tuple, np.ndarray] = {}
        for w in cfg.windows:
            if w > n:
                log.info("window %d longer than series (%d); skipped", w, n)
                continue
            variants = [("GPE", k, "", {}) for k in cfg.gpe_orders]
            for k in cfg.pe_orders:
                variants += [("PE", k, str(d), {"delay": d}) for d in cfg.pe_delays]
                variants.append(("PEavg", k, f"{min(cfg.pe_avg_delays)}..{max(cfg.pe_avg_delays)}",
                                 {"delays": cfg.pe_avg_delays}))
            for method, k, dlabel, params in variants:
                kind = method.lower()
                try:
                    runs = _map_runs(
                        lambda i: windowed_entropy(signals[i], kind, k, w, **params).values,
                        cfg.runs, cfg.threads)
                except InsufficientDataError as exc:
                    log.info("skip %s k=%d delay=%s w=%d: %s", method, k, dlabel, w, exc)
                    continue
                mean = np.mean(runs, axis=0)
                means[(method, k, dlabel, w)] = mean
                for j, val in enumerate(mean):
                    curves.append({"period": period, "sigma2": s2, "method": method, "order": k,
                                   "delay": dlabel, "window": w, "t": w + j, "mean": val})
        sw = window_size_sweep(signals, "gpe", cfg.sweep_order,
                               cfg.sweep_range(period, n), threads=cfg.threads)
        est = estimate_half_period(sw)
        for w, v in zip(sw.windows, sw.mean_entropy):
            sweeps.append({"period": period, "sigma2": s2, "window": int(w), "mean_entropy": v})
        cond["half_period_estimate"] = {"window": est.window, "interior": est.interior,
                                        "recommended": list(est.recommended)}
        key = ("GPE", cfg.sweep_order, "", cfg.trend_window)
        if key in means:
            m = means[key]
            rho = spearmanr(np.arange(m.size), m).statistic
            # per-period means strip the oscillation the window picks up
            blocks = m[: m.size // period * period].reshape(-1, period).mean(axis=1)
            rho_b = spearmanr(np.arange(blocks.size), blocks).statistic if blocks.size > 1 else math.nan
            cond["trend"] = {"window": cfg.trend_window, "order": cfg.sweep_order,
                             "spearman": float(rho), "spearman_period_means": float(rho_b)}
        rises = {}
        for (method, k, dlabel, w), m in means.items():
            rises[f"{method}({k};{dlabel or '-'}) w={w}"] = _rise_time(m)
        cond["rise_time_90pct"] = rises
        summary["conditions"].append(cond)
    return ExperimentReport("ramp", cfg.seed, _echo(cfg), {"curves": curves, "sweep": sweeps},
                            summary)


# -- config plumbing ----------------------------------------------------------


def _echo(cfg) -> dict:
    d = asdict(cfg)
    d.pop("threads", None)
    return _jsonable(d)


EXPERIMENTS = {
    "convergence": (ConvergenceConfig, run_convergence),
    "noise_detection": (NoiseDetectionConfig, run_noise_detection),
    "ramp": (RampConfig, run_ramp),
}


def config_from_mapping(conf: Config, seed: int | None = None, threads: int = 1):
    """Build the typed config named by the ``experiment`` key."""
    name = conf.str("experiment")
    if name not in EXPERIMENTS:
        raise ValidationError(f"unknown experiment {name!r}; choose from {sorted(EXPERIMENTS)}")
    cls, _ = EXPERIMENTS[name]
    defaults = cls()
    kwargs: dict = {}
    for fname, fdef in asdict(defaults).items():
        if fname in ("threads",) or fname not in conf:
            continue
        if isinstance(fdef, bool):
            kwargs[fname] = conf.str(fname).lower() in ("1", "true", "yes", "on")
        elif isinstance(fdef, int) and not isinstance(fdef, bool):
            kwargs[fname] = conf.int(fname)
        elif isinstance(fdef, float):
            kwargs[fname] = conf.float(fname)
        elif isinstance(fdef, str):
            kwargs[fname] = conf.str(fname)
        elif fname in ("sigma2s",):
            kwargs[fname] = tuple(conf.floats(fname))
        elif fname == "noise_sd":
            kwargs[fname] = conf.float(fname)
        else:
            kwargs[fname] = tuple(conf.ints(fname))
    if seed is not None:
        kwargs["seed"] = seed
    kwargs["threads"] = threads
    conf.str("output_dir", ".")
    extra = conf.unused()
    if extra:
        raise ValidationError(f"unknown config keys for {name}: {', '.join(extra)}")
    return name, cls(**kwargs)


def run_experiment(name: str, cfg) -> ExperimentReport:
    return EXPERIMENTS[name][1](cfg)
