#!/usr/bin/env python3
"""Compliance-check demo: random workloads against the DDR4 model.

Generates a mixed legal/illegal workload, checks every derived property,
and prints the verdict report plus the first witness of each violation.
"""

import argparse
import random

import dramcheck as dc
from dramcheck import gen, report


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--model", default="ddr4")
    ap.add_argument("--config", default="ddr4-16bank-example")
    ap.add_argument("--commands", type=int, default=400)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--legal-only", action="store_true")
    args = ap.parse_args()

    net = dc.elaborate(dc.load_model(args.model),
                       dc.load_config(args.config))
    props = dc.derive(net)
    rng = random.Random(args.seed)
    if args.legal_only:
        trace = gen.legal_trace(net, rng, args.commands)
    else:
        trace = gen.random_trace(net, rng, args.commands)

    rep = dc.check(props, trace)
    print(report.verdict_report_text(rep), end="")
    return 1 if rep.violated() else 0


if __name__ == "__main__":
    raise SystemExit(main())
