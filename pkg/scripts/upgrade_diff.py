#!/usr/bin/env python3
"""Upgrade-scoping demo: DDR4 controller moving to the DDR5 delta model.

Shows the full partition, then the view of a controller that does not
issue the new same-bank refresh or doubled-burst read commands.
"""

import dramcheck as dc
from dramcheck import report


def main():
    d4 = dc.derive(dc.elaborate(dc.load_model("ddr4"),
                                dc.load_config("ddr4-16bank-example")))
    d5 = dc.derive(dc.elaborate(dc.load_model("ddr5-delta"),
                                dc.load_config("ddr5-delta-example")))

    print("== full diff ==")
    print(report.diff_text(dc.upgrade_diff(d4, d5)), end="")

    print("\n== controller without REFsb/RD16 ==")
    scoped = dc.upgrade_diff(d4, d5, unsupported_features=["REFsb", "RD16"])
    print(report.diff_text(scoped), end="")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
