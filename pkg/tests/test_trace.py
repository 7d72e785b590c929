import random

import pytest

import dramcheck as dc
from dramcheck import gen
from dramcheck.core import Command
from dramcheck.traces import (ConfigMismatchError, Status, TraceError, check,
                              coverage, load_trace, merge_reports,
                              render_trace, trace_from_commands)


def cmd(cycle, kind, *coords):
    return Command(cycle=cycle, kind=kind, coords=tuple(coords))


class TestLoading:
    def test_basic_format(self, ddr4_net):
        text = ("# compliance capture\n"
                "format=1\n"
                "standard=DDR4\n"
                "bank=4\n"
                "0 ACT 0 1 2\n"
                "5 PREA 0   # trailing comment\n")
        trace = load_trace(text, ddr4_net)
        assert len(trace) == 2
        assert trace.commands[0] == cmd(0, "ACT", 0, 1, 2)
        assert trace.header["standard"] == "DDR4"

    def test_round_trip(self, ddr4_net):
        rng = random.Random(2)
        trace = gen.random_trace(ddr4_net, rng, 50)
        again = load_trace(render_trace(trace), ddr4_net)
        assert again.commands == trace.commands

    def test_duplicate_cycle_rejected(self, ddr4_net):
        with pytest.raises(TraceError, match="strictly increasing"):
            load_trace("3 PREA 0\n3 REFA 0\n", ddr4_net)

    def test_decreasing_cycle_rejected(self, ddr4_net):
        with pytest.raises(TraceError, match="line 2"):
            load_trace("9 PREA 0\n4 REFA 0\n", ddr4_net)

    def test_unknown_command_rejected(self, ddr4_net):
        with pytest.raises(TraceError, match="NOP"):
            load_trace("0 NOP\n", ddr4_net)

    def test_out_of_range_coordinate_rejected(self, ddr4_net):
        with pytest.raises(TraceError, match="out of range"):
            load_trace("0 ACT 0 7 0\n", ddr4_net)

    def test_wrong_arity_rejected(self, ddr4_net):
        with pytest.raises(TraceError, match="coordinate"):
            load_trace("0 ACT 0 1\n", ddr4_net)

    def test_standard_mismatch(self, ddr4_net):
        with pytest.raises(ConfigMismatchError, match="DDR9"):
            load_trace("standard=DDR9\n0 PREA 0\n", ddr4_net)

    def test_count_mismatch(self, ddr4_net):
        with pytest.raises(ConfigMismatchError, match="bank=8"):
            load_trace("bank=8\n0 PREA 0\n", ddr4_net)

    def test_malformed_record(self, ddr4_net):
        with pytest.raises(TraceError, match="malformed"):
            load_trace("zero ACT 0 0 0\n", ddr4_net)


class TestVerdicts:
    def test_three_way_verdict(self, ddr4_net, ddr4_props):
        trace = gen.paced_commands(ddr4_net, [
            (5, "ACT", (0, 0, 0)),
            (5 + ddr4_net.timing_values["tRCD"], "RD", (0, 0, 0))])
        rep = check(ddr4_props, trace)
        assert rep.verdicts["arc_ACTIVE_RD"].status is Status.HOLDS
        assert rep.verdicts["arc_ACTIVE_WR"].status is Status.NOT_ACTIVATED
        assert rep.verdicts["timing_ACT_RD"].status is Status.HOLDS

    def test_violation_witness_is_earliest(self, ddr4_net, ddr4_props):
        trace = gen.paced_commands(ddr4_net, [
            (0, "RD", (0, 0, 0)), (50, "RD", (0, 1, 1))])
        rep = check(ddr4_props, trace)
        v = rep.verdicts["arc_ACTIVE_RD"]
        assert v.status is Status.VIOLATED
        assert v.witness.cycle == 0
        assert "ACTIVE" in v.witness.constraint

    def test_timing_slack_reported(self, ddr4_net, ddr4_props):
        tRCD = ddr4_net.timing_values["tRCD"]
        trace = gen.paced_commands(ddr4_net, [
            (0, "ACT", (0, 0, 0)), (tRCD + 7, "RD", (0, 0, 0))])
        v = check(ddr4_props, trace).verdicts["timing_ACT_RD"]
        assert v.min_gap == tRCD + 7
        assert v.slack == 7

    def test_timing_boundary_gap_equal_holds(self, ddr4_net, ddr4_props):
        tRCD = ddr4_net.timing_values["tRCD"]
        trace = gen.paced_commands(ddr4_net, [
            (0, "ACT", (0, 0, 0)), (tRCD, "RD", (0, 0, 0))])
        v = check(ddr4_props, trace).verdicts["timing_ACT_RD"]
        assert v.status is Status.HOLDS and v.slack == 0

    def test_timing_gap_below_violates(self, ddr4_net, ddr4_props):
        tRCD = ddr4_net.timing_values["tRCD"]
        trace = gen.paced_commands(ddr4_net, [
            (0, "ACT", (0, 0, 0)), (tRCD - 1, "RD", (0, 0, 0))])
        v = check(ddr4_props, trace).verdicts["timing_ACT_RD"]
        assert v.status is Status.VIOLATED and v.slack == -1

    def test_window_verdict(self, ddr4_net, ddr4_props):
        tFAW = ddr4_net.timing_values["tFAW"]
        plan = [(i * 2, "ACT", (0, i, 0)) for i in range(4)]
        plan.append((9, "ACT", (0, 0, 1)))
        assert 9 < tFAW
        rep = check(ddr4_props, gen.paced_commands(ddr4_net, plan))
        assert rep.verdicts["window_FAW_ACT"].status is Status.VIOLATED

    def test_inhibitor_activation_counts_token_episodes(self, ddr4_net,
                                                        ddr4_props):
        tRAS = ddr4_net.timing_values["tRAS"]
        tRP = ddr4_net.timing_values["tRP"]
        plan = [(0, "ACT", (0, 0, 0)),
                (tRAS, "PRE", (0, 0, 0)),
                (tRAS + tRP, "ACT", (0, 0, 0))]
        rep = check(ddr4_props, gen.paced_commands(ddr4_net, plan))
        v = rep.verdicts["inhibitor_ACTIVE_ACT"]
        assert v.status is Status.HOLDS
        assert v.activation_count == 2  # two separate 0 -> 1 transitions

    def test_pairwise_slack_against_brute_force(self, ddr4_net, ddr4_props):
        rng = random.Random(5)
        trace = gen.random_trace(ddr4_net, rng, 400)
        rep = check(ddr4_props, trace)
        # brute force: all consecutive-pair gaps for ACT->RD on one bank
        tRCD = ddr4_net.timing_values["tRCD"]
        best = None
        last_act = {}
        for c in trace.commands:
            if c.kind == "ACT":
                last_act[c.coords] = c.cycle
            elif c.kind == "RD" and c.coords in last_act:
                gap = c.cycle - last_act[c.coords]
                best = gap if best is None else min(best, gap)
        v = rep.verdicts["timing_ACT_RD"]
        assert v.min_gap == best
        if best is not None:
            assert (v.status is Status.VIOLATED) == (best < tRCD)


class TestAggregation:
    def test_merge_promotes_and_sticks(self, ddr4_net, ddr4_props):
        tRCD = ddr4_net.timing_values["tRCD"]
        ok = gen.paced_commands(ddr4_net, [
            (0, "ACT", (0, 0, 0)), (tRCD, "RD", (0, 0, 0))])
        bad = gen.paced_commands(ddr4_net, [(0, "RD", (0, 0, 0))])
        empty = gen.paced_commands(ddr4_net, [(0, "PREA", (0,))])
        r_ok, r_bad, r_empty = (check(ddr4_props, t)
                                for t in (ok, bad, empty))
        merged = merge_reports([r_empty, r_ok, r_bad])
        arc = merged.verdicts["arc_ACTIVE_RD"]
        assert arc.status is Status.VIOLATED  # sticky across traces
        assert merged.verdicts["timing_ACT_RD"].status is Status.HOLDS
        assert merged.trace_length == 4

    def test_coverage_unexercised(self, ddr4_net, ddr4_props):
        trace = gen.paced_commands(ddr4_net, [(0, "ACT", (0, 0, 0))])
        summary = coverage(check(ddr4_props, trace))
        assert "SREFE" in summary.unexercised
        assert "ACT" not in summary.unexercised

    def test_coverage_all_exercised(self, ddr4_net, ddr4_props):
        rng = random.Random(9)
        reports = [check(ddr4_props, gen.random_trace(ddr4_net, rng, 400))
                   for _ in range(4)]
        summary = coverage(*reports)
        assert summary.unexercised == ()
