import json
from fractions import Fraction

import pytest

from gdag_lab.catalog import bell_gdag, chain, instrumental_gdag, one_sided_bell_gdag
from gdag_lab.cli import run
from gdag_lab.graph import parse_gdag
from gdag_lab.models import ConditionalDistribution, Distribution

F = Fraction
H = F(1, 2)


@pytest.fixture
def bell_path(tmp_path):
    p = tmp_path / "bell.json"
    p.write_text(bell_gdag().to_json())
    return str(p)


def _dist_path(tmp_path, dist, name="dist.json"):
    p = tmp_path / name
    p.write_text(dist.to_json())
    return str(p)


def test_dsep_true_false(bell_path, capsys):
    assert run(["dsep", bell_path, "--x", "X", "--y", "Y"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert run(["dsep", bell_path, "--x", "A", "--y", "B", "--z", "X,Y"]) == 0
    assert capsys.readouterr().out.strip() == "false"


def test_dsep_witness(bell_path, capsys):
    assert run(["dsep", bell_path, "--x", "X", "--y", "Y", "--witness"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "true"
    w = json.loads(lines[1])
    assert set(w) == {"u", "v", "z", "w"}
    assert "X" in w["u"] and "Y" in w["v"]


def test_dsep_rejects_bad_sets(bell_path, capsys):
    assert run(["dsep", bell_path, "--x", "X", "--y", "X"]) == 2
    assert "error:" in capsys.readouterr().err
    assert run(["dsep", bell_path, "--x", "X", "--y", "NOPE"]) == 2


def test_ci_set(bell_path, capsys):
    assert run(["ci-set", bell_path]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert {"x": ["X"], "y": ["Y"], "z": []} in rows


def test_check_dist_pass_and_fail(tmp_path, capsys):
    gp = tmp_path / "chain.json"
    gp.write_text(chain().to_json())
    uniform = Distribution(
        (("X", 2), ("Z", 2), ("Y", 2)), (F(1, 8),) * 8
    )
    assert run(["check-dist", str(gp), _dist_path(tmp_path, uniform)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["satisfies_I"] is True

    # X = Y a shared coin while Z is independent: X indep Y given Z fails
    probs = [F(0)] * 8
    for z in range(2):
        probs[0 * 4 + z * 2 + 0] = F(1, 4)
        probs[1 * 4 + z * 2 + 1] = F(1, 4)
    bad = Distribution((("X", 2), ("Z", 2), ("Y", 2)), tuple(probs))
    assert run(["check-dist", str(gp), _dist_path(tmp_path, bad)]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["satisfies_I"] is False
    assert out["violated"]


def test_check_dist_conditional(tmp_path, capsys, bell_path):
    rows = []
    for y in range(2):
        for a in range(2):
            for b in range(2):
                rows.append(F(1) if (b == 0 and a == y) else F(0))
    fam = ConditionalDistribution((("A", 2), ("B", 2)), (("Y", 2),), tuple(rows))
    p = tmp_path / "fam.json"
    p.write_text(fam.to_json())
    assert run(["check-dist", bell_path, str(p)]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["instrumental_value"] == "2"


def test_ineq_triangle(tmp_path, capsys):
    ghz = Distribution(
        (("A", 2), ("B", 2), ("C", 2)), (H, 0, 0, 0, 0, 0, 0, H)
    )
    assert run(["ineq", "triangle", _dist_path(tmp_path, ghz)]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["monogamy_margin"] == pytest.approx(1.0)
    assert out["gpt_feasible"] is False

    prod = Distribution((("A", 2), ("B", 2), ("C", 2)), (F(1, 8),) * 8)
    assert run(["ineq", "triangle", _dist_path(tmp_path, prod)]) == 0


def test_ineq_instrumental(tmp_path, capsys):
    rows = []
    for y in range(2):
        for a in range(2):
            for b in range(2):
                rows.append(F(1) if (a, b) == (0, 0) else F(0))
    fam = ConditionalDistribution((("A", 2), ("B", 2)), (("Y", 2),), tuple(rows))
    p = tmp_path / "fam.json"
    p.write_text(fam.to_json())
    assert run(["ineq", "instrumental", str(p)]) == 0
    assert json.loads(capsys.readouterr().out)["value"] == "1"


def test_ineq_shape_error(tmp_path, capsys):
    prod = Distribution((("A", 2),), (H, H))
    assert run(["ineq", "instrumental", _dist_path(tmp_path, prod)]) == 2


def test_classify_certificate(tmp_path, capsys):
    gp = tmp_path / "osb.json"
    gp.write_text(one_sided_bell_gdag().to_json())
    assert run(["classify", str(gp)]) == 0
    out = json.loads(capsys.readouterr().out)
    final = parse_gdag(json.dumps(out["final"]))
    assert all(k == "observed" for k in (n["kind"] for n in out["final"]["nodes"]))
    assert set(final.names) == {"X", "A", "B"}
    assert all("op" in s for s in out["steps"])


def test_classify_unknown(bell_path, capsys):
    assert run(["classify", bell_path]) == 1
    assert capsys.readouterr().out.strip() == "unknown"


def test_reduce(tmp_path, capsys, bell_path):
    assert run(["reduce", bell_path]) == 0
    g = parse_gdag(capsys.readouterr().out)
    assert g == bell_gdag()  # bell is already fully reduced


def test_census(capsys):
    assert run(["census", "--n", "3"]) == 0
    assert capsys.readouterr().out.strip() == "3,40,40,0"


def test_census_guards(capsys):
    assert run(["census", "--n", "0"]) == 2
    assert run(["census", "--n", "6"]) == 2
    err = capsys.readouterr().err
    assert "--long-run" in err


def test_entropic_compare(tmp_path, capsys):
    gp = tmp_path / "osb.json"
    gp.write_text(one_sided_bell_gdag().to_json())
    assert run(["entropic", gp.as_posix(), "--compare"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"classical", "independence", "not_implied_by_independence"}
    assert out["classical"]["variables"] == ["X", "A", "B"]


def test_entropic_size_guard(tmp_path, capsys):
    from gdag_lab.graph import GDag, NodeKind

    g = GDag([(f"N{i}", NodeKind.OBSERVED) for i in range(7)])
    gp = tmp_path / "big.json"
    gp.write_text(g.to_json())
    assert run(["entropic", str(gp)]) == 2
    assert "long-run" in capsys.readouterr().err


def test_missing_file_and_bad_usage(capsys):
    assert run(["dsep", "/no/such/file", "--x", "A", "--y", "B"]) == 2
    assert run(["no-such-command"]) == 2
    assert run([]) == 2
