"""Command-line surface: parse | gen-sva | check | coverage | sweep | diff
| explore.

Exit codes: 0 success / all holds, 1 violations found, 2 usage or input
error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import analysis, core, modellib, propgen, report, traces
from .frontend import FrontendError

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_ERROR = 2


class CliError(Exception):
    pass


def _load_net(args):
    spec = modellib.load_model(args.model)
    cfg = modellib.load_config(args.config)
    if cfg.standard_name != spec.standard_name:
        raise CliError(
            f"config is for standard '{cfg.standard_name}', model is "
            f"'{spec.standard_name}'")
    return core.elaborate(spec, cfg)


def _load_traces(net, paths):
    out = []
    for path in paths:
        text = Path(path).read_text(encoding="utf-8")
        out.append(traces.load_trace(text, net))
    return out


def _write_reports(args, doc, text):
    if getattr(args, "json", None):
        Path(args.json).write_text(report.to_json(doc), encoding="utf-8")
    if getattr(args, "out_text", None):
        Path(args.out_text).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def cmd_parse(args):
    spec = modellib.load_model(args.model)
    from .frontend import render
    if args.render:
        sys.stdout.write(render(spec))
    else:
        print(f"standard {spec.standard_name}: "
              f"{len(spec.places)} places, "
              f"{len(spec.transitions)} transitions, "
              f"{len(spec.arcs)} arcs, "
              f"{len(spec.timing_params)} timing parameters")
    return EXIT_OK


def cmd_gen_sva(args):
    net = _load_net(args)
    props = propgen.derive(net)
    sigmap = (modellib.load_signal_map(args.signal_map)
              if args.signal_map else None)
    text = propgen.emit_sva(props, sigmap)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    generated, unique = propgen.count_summary(props)
    print(f"// {generated} generated / {unique} unique properties",
          file=sys.stderr)
    return EXIT_OK


def cmd_check(args):
    net = _load_net(args)
    props = propgen.derive(net)
    reports = [traces.check(props, t) for t in _load_traces(net, args.trace)]
    merged = (reports[0] if len(reports) == 1
              else traces.merge_reports(reports))
    _write_reports(args, report.verdict_report_doc(merged),
                   report.verdict_report_text(merged))
    return EXIT_VIOLATIONS if merged.violated() else EXIT_OK


def cmd_coverage(args):
    net = _load_net(args)
    props = propgen.derive(net)
    reports = [traces.check(props, t) for t in _load_traces(net, args.trace)]
    summary = traces.coverage(*reports)
    _write_reports(args, report.coverage_doc(summary),
                   report.coverage_text(summary))
    return EXIT_OK


def cmd_sweep(args):
    net = _load_net(args)
    props = propgen.derive(net)
    corpus = _load_traces(net, args.trace)
    result = analysis.slack_sweep(props, corpus, k_max=args.k_max,
                                  method=args.method)
    _write_reports(args, report.sweep_doc(result),
                   report.sweep_text(result))
    return EXIT_OK


def cmd_diff(args):
    base_spec = modellib.load_model(args.base)
    base_cfg = modellib.load_config(args.base_config)
    target_spec = modellib.load_model(args.target)
    target_cfg = modellib.load_config(args.target_config)
    base_props = propgen.derive(core.elaborate(base_spec, base_cfg))
    target_props = propgen.derive(core.elaborate(target_spec, target_cfg))
    drop = [k.strip() for k in (args.drop or "").split(",") if k.strip()]
    rename = {}
    if args.rename:
        rename = modellib._parse_kv(
            Path(args.rename).read_text(encoding="utf-8"), args.rename)
    diff = analysis.upgrade_diff(base_props, target_props,
                                 unsupported_features=drop, rename=rename)
    _write_reports(args, report.diff_doc(diff), report.diff_text(diff))
    return EXIT_OK


def cmd_explore(args):
    net = _load_net(args)
    summary = core.explore(net, horizon=args.horizon,
                           state_bound=args.state_bound)
    _write_reports(args, report.explore_doc(summary),
                   report.explore_text(summary))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dramcheck",
        description="DRAM protocol model compiler and trace checker")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_config(p):
        p.add_argument("--model", required=True,
                       help="bundled model name or .dramml path")
        p.add_argument("--config", required=True,
                       help="bundled preset name or .cfg path")

    def add_reports(p):
        p.add_argument("--json", help="write machine-readable JSON report")
        p.add_argument("--out-text", help="write the text report to a file")

    p = sub.add_parser("parse", help="parse and validate a model")
    p.add_argument("--model", required=True)
    p.add_argument("--render", action="store_true",
                   help="print the normalized model text")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("gen-sva", help="generate SystemVerilog assertions")
    add_model_config(p)
    p.add_argument("--out", help="output .sv path (default stdout)")
    p.add_argument("--signal-map",
                   help="key=value file binding clock/reset/command/"
                        "coord.<hier> signal names")
    p.set_defaults(func=cmd_gen_sva)

    p = sub.add_parser("check", help="check traces against all properties")
    add_model_config(p)
    p.add_argument("--trace", required=True, nargs="+")
    add_reports(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("coverage",
                       help="report unexercised command kinds of a corpus")
    add_model_config(p)
    p.add_argument("--trace", required=True, nargs="+")
    add_reports(p)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("sweep", help="timing slack sweep over a corpus")
    add_model_config(p)
    p.add_argument("--trace", required=True, nargs="+")
    p.add_argument("--k-max", type=int, default=30)
    p.add_argument("--method", choices=("analytic", "rerun"),
                   default="analytic")
    add_reports(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("diff", help="diff two property sets for an upgrade")
    p.add_argument("--base", required=True)
    p.add_argument("--base-config", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--target-config", required=True)
    p.add_argument("--drop", default="",
                   help="comma-separated unsupported command kinds")
    p.add_argument("--rename",
                   help="key=value file mapping target names to base names")
    add_reports(p)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("explore",
                       help="model-side reachability of every transition")
    add_model_config(p)
    p.add_argument("--horizon", type=int, default=10_000)
    p.add_argument("--state-bound", type=int, default=100_000)
    add_reports(p)
    p.set_defaults(func=cmd_explore)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (FrontendError, core.CoreError, traces.TraceError,
            modellib.ConfigError, CliError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
