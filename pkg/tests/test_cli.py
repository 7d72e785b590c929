import json
import random

import pytest

import dramcheck as dc
from dramcheck import gen
from dramcheck.cli import main

from svastruct import check_structure


@pytest.fixture(scope="module")
def traces_on_disk(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("traces")
    net = dc.elaborate(dc.load_model("ddr4"),
                       dc.load_config("ddr4-16bank-example"))
    rng = random.Random(21)
    legal = tmp / "legal.trace"
    legal.write_text(dc.render_trace(gen.legal_trace(net, rng, 80)))
    bad = tmp / "bad.trace"
    bad.write_text(dc.render_trace(gen.paced_commands(
        net, [(0, "RD", (0, 0, 0))])))
    return {"legal": str(legal), "bad": str(bad), "dir": tmp}


def test_parse_ok(capsys):
    assert main(["parse", "--model", "ddr4"]) == 0
    out = capsys.readouterr().out
    assert "DDR4" in out and "arcs" in out


def test_parse_render_round_trips(capsys):
    assert main(["parse", "--model", "ddr4", "--render"]) == 0
    rendered = capsys.readouterr().out
    spec = dc.parse(rendered)
    assert spec.normalized() == dc.load_model("ddr4").normalized()


def test_parse_unknown_model_exit_2(capsys):
    assert main(["parse", "--model", "nope"]) == 2
    assert "unknown model" in capsys.readouterr().err


def test_usage_error_exit_2():
    assert main(["frobnicate"]) == 2
    assert main(["check", "--model", "ddr4"]) == 2


def test_gen_sva_to_file(tmp_path, capsys):
    out = tmp_path / "props.sv"
    assert main(["gen-sva", "--model", "ddr4",
                 "--config", "ddr4-16bank-example",
                 "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("// DDR4 protocol properties")
    check_structure(text)
    assert "unique properties" in capsys.readouterr().err


def test_gen_sva_with_signal_map(tmp_path, capsys):
    sigmap = tmp_path / "map.cfg"
    sigmap.write_text("clock=clk_i\ncommand=cmd_bus\ncoord.bank=ba\n")
    assert main(["gen-sva", "--model", "ddr4",
                 "--config", "ddr4-16bank-example",
                 "--signal-map", str(sigmap)]) == 0
    out = capsys.readouterr().out
    assert "@(posedge clk_i)" in out and "(ba == bank_id)" in out


def test_check_clean_trace_exit_0(traces_on_disk, capsys):
    rc = main(["check", "--model", "ddr4",
               "--config", "ddr4-16bank-example",
               "--trace", traces_on_disk["legal"]])
    assert rc == 0
    assert "violated=0" in capsys.readouterr().out


def test_check_violating_trace_exit_1(traces_on_disk, capsys):
    rc = main(["check", "--model", "ddr4",
               "--config", "ddr4-16bank-example",
               "--trace", traces_on_disk["bad"]])
    assert rc == 1
    assert "VIOLATED" in capsys.readouterr().out


def test_check_config_mismatch_exit_2(traces_on_disk, capsys):
    rc = main(["check", "--model", "ddr4",
               "--config", "ddr4-8bank-example",
               "--trace", traces_on_disk["legal"]])
    assert rc == 2
    assert "bankgroup" in capsys.readouterr().err


def test_check_json_stable_modulo_timestamp(traces_on_disk, tmp_path,
                                            capsys):
    docs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert main(["check", "--model", "ddr4",
                     "--config", "ddr4-16bank-example",
                     "--trace", traces_on_disk["legal"],
                     "--json", str(path)]) == 0
        docs.append(json.loads(path.read_text()))
    for doc in docs:
        assert doc.pop("generated_at")
    assert docs[0] == docs[1]
    capsys.readouterr()


def test_coverage_and_sweep_and_explore(traces_on_disk, capsys):
    assert main(["coverage", "--model", "ddr4",
                 "--config", "ddr4-16bank-example",
                 "--trace", traces_on_disk["legal"],
                 traces_on_disk["bad"]]) == 0
    assert "coverage" in capsys.readouterr().out
    assert main(["sweep", "--model", "ddr4",
                 "--config", "ddr4-16bank-example",
                 "--trace", traces_on_disk["legal"]]) == 0
    assert "k_max" in capsys.readouterr().out
    assert main(["explore", "--model", "ddr4",
                 "--config", "ddr4-16bank-example",
                 "--horizon", "10000"]) == 0
    out = capsys.readouterr().out
    assert "UNREACHABLE" not in out


def test_diff_cli(capsys):
    assert main(["diff", "--base", "ddr4",
                 "--base-config", "ddr4-16bank-example",
                 "--target", "ddr5-delta",
                 "--target-config", "ddr5-delta-example",
                 "--drop", "RD16,REFsb"]) == 0
    out = capsys.readouterr().out
    assert "timing changed: 1" in out
    assert "discarded" in out
