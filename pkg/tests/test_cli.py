import pytest

from detectability.cli import main
from detectability.core import parse_lsts, serialize_lsts
from detectability.fa_detect import parse_partition
from detectability.petri import parse_net
from helpers import FIXTURES, lsts, net

SMALL = """places: a1 a2
marking: a1=1
transition: x1 a
transition: x2 b
arc: a1 -> x1
arc: x1 -> a2
arc: a2 -> x2
arc: x2 -> a1
"""


def fx(name):
    return str(FIXTURES / name)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# -- check / construct -----------------------------------------------------------------

def test_fig3_is_weakly_detectable(capsys):
    code, out, _ = run(capsys, "check", fx("fig3.lsts"), "--property", "wd")
    assert code == 0 and "holds" in out and "time:" in out


def test_fig19_sd_fails_with_witness(capsys):
    code, out, _ = run(capsys, "check", fx("fig19.lsts"), "--property", "sd", "--witness",
                       "--no-timing")
    assert code == 1 and "fails" in out and "witness" in out and "time:" not in out


def test_fig10_wad_with_partition(capsys):
    code, _, _ = run(capsys, "check", fx("fig10.lsts"), "--property", "wad",
                     "--partition", fx("eq19.part"))
    assert code == 0


def test_reports_are_byte_deterministic(capsys):
    argv = ("check", fx("fig19.lsts"), "--property", "esd", "--witness", "--no-timing")
    assert run(capsys, *argv) == run(capsys, *argv)


def test_construct_cc_and_bifur(capsys, tmp_path):
    out = tmp_path / "cc.lsts"
    assert run(capsys, "construct", fx("fig19.lsts"), "--what", "cc", "-o", str(out))[0] == 0
    cc = parse_lsts(out.read_text())
    assert out.read_text().endswith("\n") and cc.states
    code, text, _ = run(capsys, "construct", fx("fig19.lsts"), "--what", "bifur")
    assert code == 0
    events = set(parse_lsts(text).labels.values())
    assert {"fair", "bifur"} <= events


def test_construct_obs_of_transition_free_model(capsys, tmp_path):
    p = tmp_path / "m.lsts"
    p.write_text("states: s\ninitial: s\nevent: e a\n")
    code, text, _ = run(capsys, "construct", str(p), "--what", "obs")
    assert code == 0 and not parse_lsts(text).transitions


def test_quotient_needs_a_partition(capsys):
    code, _, err = run(capsys, "construct", fx("fig10.lsts"), "--what", "quotient")
    assert code == 3 and "partition" in err


def test_detector_assumption_violation_exits_3(capsys, tmp_path):
    p = tmp_path / "m.lsts"
    p.write_text("states: s t\ninitial: s\nevent: e .\ntrans: s e t\n")
    code, _, err = run(capsys, "construct", str(p), "--what", "detector")
    assert code == 3 and "detector requires" in err


# -- input errors ------------------------------------------------------------------------

def test_missing_file_exits_3(capsys, tmp_path):
    code, _, err = run(capsys, "check", str(tmp_path / "none.lsts"), "--property", "sd")
    assert code == 3 and "cannot read" in err


def test_parse_error_reports_the_line(capsys, tmp_path):
    p = tmp_path / "bad.lsts"
    p.write_text("states: s\nbogus: x\n")
    code, _, err = run(capsys, "check", str(p), "--property", "sd")
    assert code == 3 and "line 2" in err


@pytest.mark.parametrize("argv", [
    ("check", "x.lsts"),
    ("check", "x.lsts", "--property", "nope"),
    ("petri", "x.net", "check", "--max-markings", "0"),
    ("frobnicate",),
])
def test_bad_arguments_exit_3(capsys, argv):
    assert run(capsys, *argv)[0] == 3


def test_help_exits_0(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "crosscheck" in out


# -- petri -------------------------------------------------------------------------------

def test_fig15_esd_fails_by_item_2(capsys):
    code, out, _ = run(capsys, "petri", fx("fig15.net"), "check", "--property", "esd",
                       "--max-markings", "100", "--witness")
    assert code == 1 and "item 2" in out


def test_fig17_not_prompt(capsys):
    code, out, _ = run(capsys, "petri", fx("fig17.net"), "check", "--property", "prompt",
                       "--max-depth", "20", "--witness")
    assert code == 1 and "t4" in out


def test_fig17_unfold_exhausts_the_budget(capsys):
    code, out, err = run(capsys, "petri", fx("fig17.net"), "unfold", "--max-markings", "50")
    assert code == 2 and not out and "frontier" in err


def test_fig17_esd_is_unknown(capsys):
    code, out, _ = run(capsys, "petri", fx("fig17.net"), "check", "--property", "esd",
                       "--max-markings", "200")
    assert code == 2 and "unknown" in out


def test_fig6_compose(capsys):
    code, out, _ = run(capsys, "petri", fx("fig6.net"), "compose")
    g = parse_net(out)
    assert code == 0 and len(g.places) == 2 * len(net("fig6").places)


def test_unfold_round_trips(capsys):
    code, out, _ = run(capsys, "petri", fx("fig1.net"), "unfold")
    assert code == 0 and serialize_lsts(parse_lsts(out)) == out


@pytest.mark.parametrize("kind", ["isd", "esd-item1", "esd-item2"])
def test_emit_yen(capsys, kind):
    code, out, _ = run(capsys, "petri", fx("fig6.net"), "emit-yen", "--property", kind)
    assert code == 0 and "formula:" in out and "run__gate__r1" in out


def test_emit_yen_rejects_other_properties(capsys):
    assert run(capsys, "petri", fx("fig6.net"), "emit-yen", "--property", "prompt")[0] == 3


def test_check_needs_a_property(capsys):
    assert run(capsys, "petri", fx("fig6.net"), "check")[0] == 3


def test_unfolded_properties(capsys):
    code, out, _ = run(capsys, "petri", fx("fig15.net"), "check", "--property", "wd")
    assert code == 1
    code, _, _ = run(capsys, "petri", fx("fig1.net"), "check", "--property", "isd")
    assert code == 0


def test_bifurcation(capsys):
    g = net("fig15")
    code, out, _ = run(capsys, "petri", fx("fig15.net"), "bifurcation",
                       "--sequence", " ".join(g.transitions[:1]))
    assert code in (0, 1) and out.startswith("bifurcation: ")
    assert run(capsys, "petri", fx("fig15.net"), "bifurcation", "--start", "nope")[0] == 3


# -- gen -------------------------------------------------------------------------------

def test_gen_coverability(capsys, tmp_path):
    target = tmp_path / "t.marking"
    target.write_text("marking: p1=1\n")
    code, out, _ = run(capsys, "gen", "coverability", fx("fig17.net"), str(target))
    assert code == 0
    assert len(parse_net(out).places) == len(net("fig17").places) + 3


def test_gen_coverability_bad_target(capsys, tmp_path):
    target = tmp_path / "t.marking"
    target.write_text("marking: nowhere=1\n")
    assert run(capsys, "gen", "coverability", fx("fig17.net"), str(target))[0] == 3
    assert run(capsys, "gen", "coverability", fx("fig17.net"))[0] == 3


def _pair(tmp_path):
    g1 = tmp_path / "g1.net"
    g2 = tmp_path / "g1ops.net"
    g1.write_text(SMALL)
    g2.write_text(SMALL.replace("a1", "b1").replace("a2", "b2").replace("x", "y"))
    return str(g1), str(g2)


def test_gen_langeq_four_cells(capsys, tmp_path):
    g1, g2 = _pair(tmp_path)
    out = tmp_path / "h.net"
    code, _, _ = run(capsys, "gen", "langeq", g1, g2, "--cells", "4", "-o", str(out))
    assert code == 0
    h = parse_net(out.read_text())
    assert len(h.places) == 4 + 5
    cells = parse_partition((tmp_path / "h.net.cells").read_text()).cells
    assert len(cells) == 4


def test_gen_langeq_descriptor_as_comments(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "langeq", *_pair(tmp_path))
    assert code == 0
    assert sum(line.startswith("# cell:") for line in out.splitlines()) == 2
    parse_net(out)


def test_identical_languages_are_not_wad(capsys, tmp_path):
    g1, g2 = _pair(tmp_path)
    h, d = tmp_path / "h.net", tmp_path / "h.cells"
    assert run(capsys, "gen", "langeq", g1, g2, "--cells", "2", "-o", str(h),
               "--descriptor", str(d))[0] == 0
    code, out, _ = run(capsys, "petri", str(h), "check", "--property", "wad",
                       "--descriptor", str(d))
    assert code == 1 and "fails" in out


def test_gen_langeq_rejects_shared_ids(capsys, tmp_path):
    g1, _ = _pair(tmp_path)
    code, _, err = run(capsys, "gen", "langeq", g1, g1)
    assert code == 3 and "disjoint" in err


# -- crosscheck ------------------------------------------------------------------------

def test_crosscheck_fig5(capsys):
    code, out, _ = run(capsys, "crosscheck", fx("fig5.lsts"))
    assert code == 0
    assert "sd: fails/fails" in out and "esd: holds/holds" in out


def test_crosscheck_single_state_loop(capsys, tmp_path):
    p = tmp_path / "loop.lsts"
    p.write_text("states: s\ninitial: s\nevent: e a\ntrans: s e s\n")
    code, out, _ = run(capsys, "crosscheck", str(p))
    assert code == 0 and out.count("holds/holds") == 6


def test_crosscheck_seed_range(capsys):
    code, out, _ = run(capsys, "crosscheck", "--seeds", "1..20", "--max-states", "5")
    assert code == 0 and "instances: 20  disagreements: 0" in out


def test_crosscheck_bad_seed_range(capsys):
    assert run(capsys, "crosscheck", "--seeds", "x..y")[0] == 3
    assert run(capsys, "crosscheck")[0] == 3


def test_fixture_helper_agrees_with_cli(capsys):
    code, out, _ = run(capsys, "construct", fx("fig19.lsts"), "--what", "obs")
    assert code == 0 and parse_lsts(out).states
    assert lsts("fig19").states
