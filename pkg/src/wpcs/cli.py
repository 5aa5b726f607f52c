"""Command line front end: ``wpcs run``, ``wpcs sweep`` and ``wpcs compare``.

Scenario files are flat ``key = value`` text with ``#`` comments. Every CSV
starts with the resolved configuration echoed as ``# key = value`` lines, so
the file can be fed back through :func:`config_from_csv`.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import metrics
from .engine import CONFIG_KEYS, DEVICE_KEYS, ScenarioConfig, replication_seed, run_batch

SCHEMA_VERSION = 1
HEADER = ("schema_version,scenario_id,replication,seed,layout,beacon_mode,beacon_count,antenna,"
          "radio,policy,mean_harvested_w,mean_consumed_w,lifetime_s,sustainable,lifetime_gain,"
          "data_share")
METRICS = ("mean_harvested_w", "mean_consumed_w", "lifetime_s", "sustainable", "lifetime_gain",
           "data_share")
COMPARE_HEADER = ("schema_version,scenario_id_a,scenario_id_b,replication,seed,"
                  + ",".join(f"delta_{m}" for m in METRICS))
# axes a comparison may vary; everything else must match so seeds stay paired
COMPARE_AXES = frozenset({"layout", "beacon_mode", "beacon_count", "antenna", "radio", "policy"})
SVG_METRICS = {
    "mean_harvested_w": "Mean harvested power [W]",
    "lifetime_gain": "Lifetime gain",
    "data_share": "Data share",
}

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

_TYPES = {f.name: type(f.default) for f in fields(ScenarioConfig)}


class ConfigError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class SweepSpec:
    config_path: str
    key: str
    values: tuple
    out: str
    svg_dir: str | None = None

    def __post_init__(self):
        if self.key not in CONFIG_KEYS:
            raise ConfigError(f"unknown sweep key {self.key!r}")
        if not self.values:
            raise ConfigError("sweep needs at least one value")


# --- configuration --------------------------------------------------------

def parse_value(key: str, text: str):
    kind = _TYPES[key]
    text = text.strip()
    try:
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ValueError(f"cannot parse {text!r} as {kind.__name__} for {key}") from None
    if not text:
        raise ValueError(f"empty value for {key}")
    return text


def parse_config(text: str, base: ScenarioConfig | None = None) -> ScenarioConfig:
    """Parse ``key = value`` lines on top of ``base`` (defaults if omitted)."""
    config = base or ScenarioConfig()
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _TYPES:
            raise ConfigError(f"unknown key {key!r}", lineno)
        if key in seen:
            raise ConfigError(f"{key} already set on line {seen[key]}", lineno)
        seen[key] = lineno
        try:
            config = replace(config, **{key: parse_value(key, value)})
        except ValueError as exc:
            raise ConfigError(str(exc), lineno) from None
    return config


def load_config(path) -> ScenarioConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


def config_echo(config: ScenarioConfig) -> list[str]:
    d = config.as_dict()
    return [f"# {k} = {d[k]!r}" if isinstance(d[k], float) else f"# {k} = {d[k]}"
            for k in CONFIG_KEYS]


def config_from_csv(text: str) -> ScenarioConfig:
    """Rebuild the configuration echoed at the top of a results CSV."""
    lines = []
    for raw in text.splitlines():
        if not raw.startswith("# "):
            break
        lines.append(raw[2:])
    return parse_config("\n".join(lines))


def scenario_id(config: ScenarioConfig) -> str:
    """Stable id of everything but the seed, so re-seeding keeps the id."""
    d = config.as_dict()
    d.pop("master_seed")
    blob = "\n".join(f"{k}={d[k]!r}" for k in sorted(d))
    return hashlib.sha1(blob.encode()).hexdigest()[:12]


# --- formatting -----------------------------------------------------------

def fmt(x) -> str:
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".9g")


def csv_row(config: ScenarioConfig, replication, seed, summary: dict) -> str:
    c = config
    cells = [str(SCHEMA_VERSION), scenario_id(c), str(replication), str(seed), c.layout,
             c.beacon_mode, str(c.beacon_count), c.antenna, c.radio, c.policy]
    cells += [fmt(summary[m]) for m in METRICS]
    return ",".join(cells)


def _mean_summary(summaries) -> dict:
    return {m: metrics.mean_ci([s[m] for s in summaries])[0] for m in METRICS}


def _write(path, lines):
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- commands -------------------------------------------------------------

def run_config(config: ScenarioConfig, jobs: int = 1):
    tasks = [(config, r, [{}]) for r in range(config.replications)]
    return [recs[0] for recs in run_batch(tasks, jobs)]


def cmd_run(config_path, out_csv, seed=None, jobs=1) -> int:
    config = load_config(config_path)
    if seed is not None:
        config = replace(config, master_seed=seed)
    records = run_config(config, jobs)
    summaries = [metrics.record_summary(r) for r in records]
    lines = config_echo(config) + [HEADER]
    lines += [csv_row(config, r.replication, r.seed, s) for r, s in zip(records, summaries)]
    lines.append(csv_row(config, "summary", config.master_seed, _mean_summary(summaries)))
    _write(out_csv, lines)
    return EXIT_OK


def sweep_records(config: ScenarioConfig, key: str, values, jobs: int = 1):
    """Records per swept value; device-only keys share one harvest trace per replication."""
    reps = range(config.replications)
    if key in DEVICE_KEYS:
        tasks = [(config, r, [{key: v} for v in values]) for r in reps]
        out = run_batch(tasks, jobs)
        return [[out[r][k] for r in reps] for k in range(len(values))]
    configs = [replace(config, **{key: v}) for v in values]
    tasks = [(c, r, [{}]) for c in configs for r in reps]
    out = run_batch(tasks, jobs)
    n = config.replications
    return [[out[k * n + r][0] for r in reps] for k in range(len(values))]


def cmd_sweep(spec: SweepSpec, jobs: int = 1) -> int:
    base = load_config(spec.config_path)
    try:
        values = [parse_value(spec.key, str(v)) for v in spec.values]
        configs = [replace(base, **{spec.key: v}) for v in values]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    per_value = sweep_records(base, spec.key, values, jobs)
    sweep = metrics.build_sweep(spec.key, values, per_value)
    lines = config_echo(base) + [f"# sweep_key = {spec.key}", HEADER]
    for k, c in enumerate(configs):
        means = {m: sweep.mean[m][k] for m in METRICS}
        lines.append(csv_row(c, "mean", base.master_seed, means))
    _write(spec.out, lines)
    if spec.svg_dir is not None:
        os.makedirs(spec.svg_dir, exist_ok=True)
        for m, label in SVG_METRICS.items():
            svg = line_chart_svg([float(v) for v in values], sweep.mean[m], sweep.half_width[m],
                                 spec.key, label)
            Path(spec.svg_dir, f"{m}.svg").write_text(svg, encoding="utf-8")
    return EXIT_OK


def check_comparable(a: ScenarioConfig, b: ScenarioConfig):
    da, db = a.as_dict(), b.as_dict()
    bad = sorted(k for k in CONFIG_KEYS if da[k] != db[k] and k not in COMPARE_AXES)
    if bad:
        raise ConfigError(f"configs differ on undeclared axes: {', '.join(bad)}")


def cmd_compare(path_a, path_b, out_csv, jobs=1) -> int:
    a, b = load_config(path_a), load_config(path_b)
    check_comparable(a, b)
    rec_a = run_config(a, jobs)
    rec_b = run_config(b, jobs)
    ida, idb = scenario_id(a), scenario_id(b)
    lines = [f"# a.{line[2:]}" for line in config_echo(a)]
    lines += [f"# b.{line[2:]}" for line in config_echo(b)]
    lines.append(COMPARE_HEADER)
    deltas = []
    for ra, rb in zip(rec_a, rec_b):
        sa, sb = metrics.record_summary(ra), metrics.record_summary(rb)
        d = {m: sb[m] - sa[m] for m in METRICS}
        deltas.append(d)
        lines.append(",".join([str(SCHEMA_VERSION), ida, idb, str(ra.replication), str(ra.seed)]
                              + [fmt(d[m]) for m in METRICS]))
    mean = _mean_summary(deltas)
    lines.append(",".join([str(SCHEMA_VERSION), ida, idb, "summary", str(a.master_seed)]
                          + [fmt(mean[m]) for m in METRICS]))
    _write(out_csv, lines)
    return EXIT_OK


# --- svg ------------------------------------------------------------------

def line_chart_svg(x, y, half_width, xlabel: str, ylabel: str, width=480, height=320) -> str:
    """Polyline of ``y`` against ``x`` with vertical confidence whiskers."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    hw = np.nan_to_num(np.asarray(half_width, float))
    left, right, top, bottom = 70, 20, 20, 50
    lo = float(np.nanmin(y - hw)) if y.size else 0.0
    hi = float(np.nanmax(y + hw)) if y.size else 1.0
    if not hi > lo:
        lo, hi = lo - 0.5, hi + 0.5
    x0, x1 = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    if not x1 > x0:
        x0, x1 = x0 - 0.5, x1 + 0.5

    def px(v):
        return left + (v - x0) / (x1 - x0) * (width - left - right)

    def py(v):
        return height - bottom - (v - lo) / (hi - lo) * (height - top - bottom)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<line x1="{left}" y1="{height - bottom}" x2="{width - right}" '
           f'y2="{height - bottom}" stroke="black"/>',
           f'<line x1="{left}" y1="{top}" x2="{left}" y2="{height - bottom}" stroke="black"/>']
    for v in (lo, hi):
        out.append(f'<text x="{left - 5}" y="{py(v):.2f}" font-size="10" text-anchor="end">'
                   f'{fmt(v)}</text>')
    for v in x:
        out.append(f'<text x="{px(v):.2f}" y="{height - bottom + 15}" font-size="10" '
                   f'text-anchor="middle">{fmt(v)}</text>')
    out.append(f'<text x="{(left + width - right) / 2}" y="{height - 10}" font-size="12" '
               f'text-anchor="middle">{xlabel}</text>')
    out.append(f'<text x="15" y="{(top + height - bottom) / 2}" font-size="12" '
               f'text-anchor="middle" transform="rotate(-90 15 {(top + height - bottom) / 2})">'
               f'{ylabel}</text>')
    pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y) if not math.isnan(b))
    out.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>')
    for a, b, h in zip(x, y, hw):
        if math.isnan(b):
            continue
        out.append(f'<line x1="{px(a):.2f}" y1="{py(b - h):.2f}" x2="{px(a):.2f}" '
                   f'y2="{py(b + h):.2f}" stroke="steelblue"/>')
        out.append(f'<circle cx="{px(a):.2f}" cy="{py(b):.2f}" r="3" fill="steelblue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# --- entry point ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jobs(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("--jobs must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wpcs", description="Wirelessly powered crowd sensing simulator.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    default_jobs = os.cpu_count() or 1

    r = sub.add_parser("run", help="run all replications of one scenario")
    r.add_argument("config")
    r.add_argument("--out", required=True)
    r.add_argument("--seed", type=int)
    r.add_argument("--jobs", type=_jobs, default=default_jobs)

    s = sub.add_parser("sweep", help="sweep one configuration key")
    s.add_argument("config")
    s.add_argument("--key", required=True)
    s.add_argument("--values", required=True, help="comma-separated values")
    s.add_argument("--out", required=True)
    s.add_argument("--svg", metavar="DIR")
    s.add_argument("--jobs", type=_jobs, default=default_jobs)

    c = sub.add_parser("compare", help="paired-seed comparison of two scenarios")
    c.add_argument("config_a")
    c.add_argument("config_b")
    c.add_argument("--out", required=True)
    c.add_argument("--jobs", type=_jobs, default=default_jobs)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            if args.seed is not None and args.seed < 0:
                raise ConfigError("--seed must be >= 0")
            return cmd_run(args.config, args.out, args.seed, args.jobs)
        if args.command == "sweep":
            values = tuple(v.strip() for v in args.values.split(",") if v.strip())
            return cmd_sweep(SweepSpec(args.config, args.key, values, args.out, args.svg),
                             args.jobs)
        return cmd_compare(args.config_a, args.config_b, args.out, args.jobs)
    except ConfigError as exc:
        print(f"wpcs: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"wpcs: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # noqa: BLE001 - any failure mid-run is a runtime error
        print(f"wpcs: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
