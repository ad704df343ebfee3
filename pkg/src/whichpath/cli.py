"""
Command-line front end.

::

    whichpath report     CONFIG [--set section.key=value ...] [-o PATH] [--format csv|json]
    whichpath sweep      CONFIG ...
    whichpath audit      CONFIG ...
    whichpath regime-map CONFIG ...

Results go to ``output.path`` (or stdout when unset); diagnostics go to
stderr. The worker count comes from ``WHICHPATH_WORKERS`` (default 1) or
``--workers``.

Exit codes: 0 success, 2 configuration error, 3 numerical resolution
failure, 4 audit violation, 130 interrupted.
"""

import argparse
import contextlib
import csv
import json
import os
import sys
import warnings

from .audit import AuditViolation, random_audit
from .config import ConfigError, RunConfig
from .decoherence import decoherence_report
from .scenario import ScenarioError
from .sweep import SweepSpec, SweepSpecError, _json_value, format_value, iter_sweep, snr_contour
from .worldline import ResolutionError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RESOLUTION = 3
EXIT_AUDIT = 4
EXIT_INTERRUPTED = 130

WORKERS_ENV = "WHICHPATH_WORKERS"


def _config_line(cfg):
    return json.dumps(cfg.resolved(), sort_keys=True, separators=(",", ":"))


@contextlib.contextmanager
def _sink(cfg):
    path = cfg.section("output")["path"]
    if path is None:
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _format(cfg, default):
    return cfg.section("output")["format"] or default


def _workers(args):
    raw = args.workers if args.workers is not None else os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"worker count must be an integer, got {raw!r}", source=WORKERS_ENV) from None
    if n < 1:
        raise ConfigError("worker count must be at least 1", source=WORKERS_ENV)
    return n


# ---------------------------------------------------------------------------
# subcommands

def run_report(cfg, args=None):
    """Single scenario: history, radiation, decoherence, Bob, audit. Returns an exit code."""
    s = cfg.scenario()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = decoherence_report(s, **cfg.radiation_options())
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    with _sink(cfg) as out:
        if _format(cfg, "json") == "json":
            out.write(report.to_json(config=cfg.resolved()) + "\n")
        else:
            out.write(f"# config: {_config_line(cfg)}\n")
            out.write(report.to_csv())
    if not s.protocol_ok:
        print("note: protocol violated (T_A or T_B >= D); the regime is reported, not judged",
              file=sys.stderr)
    if not report.audit_pass:
        print(f"AUDIT VIOLATION: identity residual {report.identity_residual:.3e}, "
              f"margin {report.inequality_margin:.3e}", file=sys.stderr)
        return EXIT_AUDIT
    return EXIT_OK


def run_audit_cmd(cfg, args=None):
    """Randomized audit of the bound. Returns an exit code."""
    a = cfg.section("audit")
    workers = _workers(args) if args is not None else 1
    summary = random_audit(trials=a["trials"], seed=a["seed"], max_modes=a["max_modes"],
                           n_field=a["n_field"], n_probe=a["n_probe"], workers=workers)
    with _sink(cfg) as out:
        if _format(cfg, "json") == "json":
            payload = json.loads(summary.to_json())
            payload["passed"] = summary.passed
            payload["config"] = cfg.resolved()
            out.write(json.dumps(payload, indent=2) + "\n")
        else:
            fields = ["trials", "seed", "max_modes", "worst_identity_residual",
                      "worst_margin", "worst_order_residual", "violations", "passed"]
            values = {**json.loads(summary.to_json()), "passed": summary.passed}
            out.write(f"# config: {_config_line(cfg)}\n")
            out.write(",".join(fields) + "\n")
            out.write(",".join(format_value(values[f]) for f in fields) + "\n")
    print(f"trials {summary.trials}  worst inequality margin {summary.worst_margin:.3e}  "
          f"worst identity residual {summary.worst_identity_residual:.3e}  "
          f"violations {summary.violations}", file=sys.stderr)
    return EXIT_OK if summary.passed else EXIT_AUDIT


def _parse_outputs(text):
    if isinstance(text, str):
        return tuple(o.strip() for o in text.split(",") if o.strip())
    raise SweepSpecError("sweep.outputs must be a comma-separated list")


def _sweep_spec(cfg, outputs=None, default_axes=None):
    sw = cfg.section("sweep")
    axes = [sw[k] for k in ("axis1", "axis2") if sw[k] is not None]
    if not axes:
        if default_axes is None:
            raise ConfigError("sweep needs at least sweep.axis1 = 'name spacing min max count'",
                              source=cfg.source)
        axes = default_axes
    if any(not isinstance(a, str) for a in axes):
        raise ConfigError("sweep axes must read 'name spacing min max count'", source=cfg.source)
    outs = outputs if outputs is not None else _parse_outputs(sw["outputs"])
    return SweepSpec(cfg.scenario(), tuple(axes), outs, cfg.radiation_options())


def _stream_rows(spec, out, fmt, cfg, workers):
    """Write rows as they complete; on interrupt, close with a truncation marker."""
    columns = spec.columns
    total = len(spec.points())
    rows = []
    writer = csv.writer(out, lineterminator="\n")
    if fmt == "csv":
        out.write(f"# config: {_config_line(cfg)}\n")
        writer.writerow(columns)
    else:
        out.write(json.dumps({"config": cfg.resolved()}, sort_keys=True) + "\n")
    out.flush()
    try:
        for row in iter_sweep(spec, workers):
            rows.append(row)
            if fmt == "csv":
                writer.writerow([format_value(row.get(c)) for c in columns])
            else:
                out.write(json.dumps({c: _json_value(row.get(c)) for c in columns}) + "\n")
            out.flush()
    except KeyboardInterrupt:
        if fmt == "csv":
            out.write(f"# truncated: interrupted after {len(rows)} of {total} rows\n")
        else:
            out.write(json.dumps({"truncated": True, "rows_written": len(rows),
                                  "rows_expected": total}) + "\n")
        out.flush()
        raise
    return rows


def run_sweep_cmd(cfg, args=None):
    spec = _sweep_spec(cfg)
    workers = _workers(args) if args is not None else 1
    with _sink(cfg) as out:
        rows = _stream_rows(spec, out, _format(cfg, "csv"), cfg, workers)
    failed = sum(1 for r in rows if r["error"])
    if failed:
        print(f"{failed} of {len(rows)} grid points failed; see the error column", file=sys.stderr)
    return EXIT_OK


def default_regime_axes(s, count=41):
    """Axes bracketing the SNR = 1 boundary by a decade on each side."""
    power = 4 if s.is_gravitational else 3
    tb_lo, tb_hi = 0.01 * s.D, 0.99 * s.D
    m_lo = 0.1 * s.D ** power / tb_hi ** 2
    m_hi = 10.0 * s.D ** power / tb_lo ** 2
    return [f"moment log {m_lo!r} {m_hi!r} {count}", f"T_B log {tb_lo!r} {tb_hi!r} {count}"]


def run_regime_map(cfg, args=None):
    """Closed-form regime grid over two axes plus the SNR = 1 boundary."""
    s = cfg.scenario()
    spec = _sweep_spec(cfg, outputs=("snr", "regime"), default_axes=default_regime_axes(s))
    workers = _workers(args) if args is not None else 1
    fmt = _format(cfg, "csv")
    with _sink(cfg) as out:
        if fmt == "csv":
            _stream_rows(spec, out, "csv", cfg, workers)
        else:
            rows = list(iter_sweep(spec, workers))
            names = [a.name for a in spec.axes]
            boundary = []
            if len(names) == 2:
                boundary = [{names[1]: yv, names[0]: xv}
                            for yv, xv in snr_contour(rows, x=names[0], y=names[1])]
            payload = {"config": cfg.resolved(), "columns": spec.columns,
                       "rows": [{c: _json_value(r.get(c)) for c in spec.columns} for r in rows],
                       "boundary": boundary}
            out.write(json.dumps(payload, indent=1) + "\n")
    return EXIT_OK


COMMANDS = {
    "report": run_report,
    "sweep": run_sweep_cmd,
    "audit": run_audit_cmd,
    "regime-map": run_regime_map,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="whichpath",
        description="Which-path decoherence calculator for charged and massive superpositions.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "report": "single scenario: decoherence, entangling quanta, Bob's probe, audit",
        "sweep": "one- or two-axis parameter sweep (CSV or JSON lines)",
        "audit": "randomized check that Bob never beats the radiation",
        "regime-map": "closed-form regime classification over (moment, T_B)",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="path to the run configuration file")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="override a config value (repeatable)")
        p.add_argument("-o", "--output", help="output path (overrides output.path)")
        p.add_argument("--format", choices=("csv", "json"), help="overrides output.format")
        p.add_argument("--workers", help=f"worker processes (default ${WORKERS_ENV} or 1)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    overrides = list(args.overrides)
    if args.output is not None:
        overrides.append(f"output.path={args.output}")
    if args.format is not None:
        overrides.append(f"output.format={args.format}")
    try:
        cfg = RunConfig.from_file(args.config, overrides)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, ScenarioError, SweepSpecError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResolutionError as exc:
        print(f"resolution error: {exc}", file=sys.stderr)
        return EXIT_RESOLUTION
    except AuditViolation as exc:
        print(f"AUDIT VIOLATION: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_INTERRUPTED
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
