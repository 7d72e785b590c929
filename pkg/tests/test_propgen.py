import pathlib

import pytest

import dramcheck as dc
from dramcheck.core import Config, elaborate
from dramcheck.frontend import Scope
from dramcheck.propgen import SignalMap, count_summary, derive, emit_sva

from svastruct import check_structure

GOLDEN = pathlib.Path(__file__).parent / "golden"


def ddr4_props_for(bankgroups, banks):
    spec = dc.load_model("ddr4")
    base = dc.load_config("ddr4-16bank-example")
    cfg = Config(standard_name="DDR4",
                 instance_counts={"rank": 1, "bankgroup": bankgroups,
                                  "bank": banks},
                 timing_values=dict(base.timing_values))
    return derive(elaborate(spec, cfg))


class TestDerivation:
    def test_unique_ids_are_unique(self, ddr4_props):
        ids = [p.unique_id for p in ddr4_props.properties]
        assert len(ids) == len(set(ids))

    def test_collision_suffixes(self, ddr4_props):
        ids = {p.unique_id for p in ddr4_props.properties}
        assert "timing_RD_RD_same_bankgroup" in ids
        assert "timing_RD_RD_sibling_bankgroup" in ids
        assert "timing_RD_RD" not in ids

    def test_multiplicity_formulas(self, ddr4_props):
        net = ddr4_props.net
        by_id = {p.unique_id: p for p in ddr4_props.properties}
        n_banks = net.counts["bankgroup"] * net.counts["bank"]
        assert by_id["arc_ACTIVE_RD"].multiplicity == n_banks
        # sibling pairs: ordered pairs of distinct groups
        g = net.counts["bankgroup"]
        assert by_id["timing_RD_RD_sibling_bankgroup"].multiplicity == \
            g * (g - 1)
        assert by_id["timing_PREA_ACT"].multiplicity == net.counts["rank"]
        assert by_id["window_FAW_ACT"].multiplicity == net.counts["rank"]

    def test_generated_equals_multiplicity_sum(self, ddr4_props):
        generated, unique = count_summary(ddr4_props)
        assert generated == sum(p.multiplicity
                                for p in ddr4_props.properties)
        assert unique == len(ddr4_props.properties)

    def test_unique_invariant_generated_monotone(self):
        p16 = ddr4_props_for(4, 4)
        p8 = ddr4_props_for(2, 4)
        g16, u16 = count_summary(p16)
        g8, u8 = count_summary(p8)
        assert u16 == u8
        assert g8 < g16
        assert {p.unique_id for p in p16.properties} == \
            {p.unique_id for p in p8.properties}

    def test_reset_and_t2p_arcs_make_no_property(self, toy_net):
        props = derive(toy_net)
        kinds = sorted(p.kind for p in props.properties)
        assert kinds == ["ARC", "INHIBITOR", "TIMING"]

    def test_window_property_from_capacity_lifetime(self, ddr4_props):
        w = ddr4_props.by_id("window_FAW_ACT")
        assert w.window == (ddr4_props.net.timing_values["tFAW"], 4)
        assert w.command_kinds == ("ACT",)


class TestRendering:
    def test_toy_golden(self, toy_net):
        text = emit_sva(derive(toy_net))
        assert text == (GOLDEN / "toy.sv").read_text()

    def test_emit_deterministic(self, ddr4_props):
        assert emit_sva(ddr4_props) == emit_sva(ddr4_props)

    def test_ddr4_structure(self, ddr4_props):
        info = check_structure(emit_sva(ddr4_props))
        # every non-vacuous unique property is asserted exactly once
        vacuous = {p.unique_id for p in ddr4_props.properties
                   if p.kind == "TIMING" and p.timing_value == 1}
        assert len(info["properties"]) == \
            len(ddr4_props.properties) - len(vacuous)
        assert info["asserts"] == len(info["properties"])

    def test_self_loop_elided_in_place_logic(self, ddr4_props):
        text = emit_sva(ddr4_props)
        start = text.index("logic ACTIVE;")
        block = text[start:text.index("property", start)]
        # RD/WR are ACTIVE self loops: no update branch for them
        assert "(cmd == RD)" not in block
        assert "(cmd == WR)" not in block
        assert "(cmd == WRA)" in block  # auto-precharge branch stays

    def test_timing_window_shape(self, ddr4_props):
        text = ddr4_props.by_id("timing_ACT_ACT_same_bank").sva_text
        assert "not ##[1:(tRC - 1)]" in text
        assert "(cmd == ACT)" in text

    def test_sibling_property_uses_two_indices(self, ddr4_props):
        text = emit_sva(ddr4_props)
        assert "bankgroup_jd" in text
        assert "if (bankgroup_id != bankgroup_jd)" in text

    def test_vacuous_timing_value_one_commented(self, toy_net):
        cfg = Config(standard_name="TOY", instance_counts={"unit": 2},
                     timing_values={"tGAP": 1})
        props = derive(elaborate(toy_net.spec, cfg))
        text = props.by_id("timing_START_STOP").sva_text
        assert "vacuous" in text
        live = [l for l in text.splitlines()
                if l.strip() and not l.strip().startswith("//")]
        assert not live

    def test_signal_map_applied(self, ddr4_props):
        sigmap = SignalMap(clock="clk_i", reset="rst_ni", command="dram_cmd",
                           module_name="checker_bind",
                           coords={"bank": "bank_addr"})
        text = emit_sva(ddr4_props, sigmap)
        assert "module checker_bind (" in text
        assert "@(posedge clk_i)" in text
        assert "disable iff (rst_ni)" in text
        assert "(dram_cmd == ACT)" in text
        assert "(bank_addr == bank_id)" in text
        assert "(cmd_bank ==" not in text  # cmd_bankgroup is a different port
        check_structure(text)

    def test_window_sva_uses_history(self, ddr4_props):
        text = emit_sva(ddr4_props)
        assert "int FAW_hist [0:3];" in text
        assert "FAW_hist[3]" in text
        assert "int cycle_cnt;" in text

    def test_localparams_echo_config(self, ddr4_props):
        text = emit_sva(ddr4_props)
        for name, value in ddr4_props.net.timing_values.items():
            assert f"localparam int {name} = {value};" in text
