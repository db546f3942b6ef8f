from __future__ import annotations

import csv
import io
import json

import pytest

from sparsestab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_encode(capsys, tmp_path):
    code, out, _ = run(capsys, "encode", "--kind", "graph_copies", "--pattern", "K3", "--n", "4")
    assert code == 0 and out.splitlines()[0] == "3 6 4"
    prefix = str(tmp_path / "enc")
    assert run(capsys, "encode", "--kind", "schur", "--n", "5", "--out", prefix)[0] == 0
    side = json.loads((tmp_path / "enc.json").read_text())
    assert side["base"]["kind"] == "schur"


def test_encode_config_error(capsys):
    code, _, err = run(capsys, "encode", "--kind", "graph_copies", "--n", "4")
    assert code == 2 and "pattern" in err


def test_density(capsys):
    code, out, _ = run(capsys, "density", "--pattern", "fano")
    d = json.loads(out)
    assert code == 0 and d["ell_density"] == "3/2" and d["strictly_balanced"] and d["turan_density"] == "3/4"
    d = json.loads(run(capsys, "density", "--pattern", "K4")[1])
    assert d["two_density"] == "5/2" and d["chromatic_number"] == 4


def test_mu_and_boundedness_csv(capsys):
    code, out, _ = run(capsys, "mu", "--kind", "graph_copies", "--pattern", "K3", "--n", "5",
                       "--i", "1", "--q", "0.3,0.6")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and list(rows[0]) == ["n", "i", "q", "mu", "rhs_unit", "ratio"] and len(rows) == 2
    code, _, err = run(capsys, "mu", "--kind", "graph_copies", "--pattern", "K3", "--n", "5",
                       "--i", "1", "--q", "0.3", "--trials", "10")
    assert code == 2 and "--seed" in err
    code, out, _ = run(capsys, "mu", "--kind", "graph_copies", "--pattern", "K3", "--n", "5",
                       "--i", "1", "--q", "0.3", "--trials", "10", "--seed", "3")
    assert code == 0 and "se" in out.splitlines()[0]
    code, out, err = run(capsys, "boundedness", "--kind", "graph_copies", "--pattern", "K3", "--n", "5",
                         "--p", "0.2", "--i", "1", "--q", "0.2,0.5,1.0")
    assert code == 0 and "K_min" in err and len(out.splitlines()) == 4


def test_exposure(capsys):
    code, out, _ = run(capsys, "exposure", "solve", "--q", "0.19", "--R", "2", "--L", "1")
    assert code == 0 and json.loads(out)["schedule"]["qs"][0] == pytest.approx(0.1, abs=1e-12)
    code, out, _ = run(capsys, "exposure", "verify", "--q", "0.4", "--R", "3", "--L", "2")
    assert code == 0 and len(json.loads(out)["conditional"]) == 3
    assert run(capsys, "exposure", "solve", "--q", "1.5", "--R", "2", "--L", "1")[0] == 2


def test_extremal(capsys):
    code, out, _ = run(capsys, "extremal", "solve", "--kind", "graph_copies", "--pattern", "K3", "--n", "6")
    assert code == 0 and json.loads(out)["size"] == 9
    code, _, _ = run(capsys, "extremal", "solve", "--kind", "graph_copies", "--pattern", "K3", "--n", "9",
                     "--budget", "2")
    assert code == 3
    code, _, err = run(capsys, "extremal", "solve", "--kind", "schur", "--n", "8", "--p", "0.5")
    assert code == 2
    code, out, _ = run(capsys, "extremal", "solve", "--kind", "schur", "--n", "11", "--p", "0.9",
                       "--seed", "4", "--strict")
    d = json.loads(out)
    assert code == 0 and d["extremal_size"] <= 4 and d["witness"] is not None


def test_stability(capsys):
    code, out, _ = run(capsys, "stability", "distance", "--kind", "schur", "--n", "5",
                       "--family", "sumfree_max", "--members", "1,2,3")
    assert code == 0 and json.loads(out)["distance"] == 1
    code, out, _ = run(capsys, "stability", "distance", "--kind", "graph_copies", "--pattern", "K3",
                       "--n", "6", "--family", "partite", "--p", "0.8", "--seed", "2")
    assert code == 0 and json.loads(out)["distance"] == 0
    code, out, _ = run(capsys, "stability", "probe", "--kind", "schur", "--n", "5", "--family", "sumfree_max",
                       "--alpha", "0.4", "--eps", "0.05", "--delta", "0.5")
    assert code == 0 and json.loads(out)["violator"] is None
    code, _, _ = run(capsys, "stability", "probe", "--kind", "schur", "--n", "5", "--family", "sumfree_max",
                     "--mode", "anneal")
    assert code == 2


def test_constants(capsys, tmp_path):
    code, out, _ = run(capsys, "constants", "--k", "3", "--K", "1", "--alpha", "0.5", "--delta", "0.1",
                       "--beta-floor", "0.5", "--eps-stab", "0.1", "--bhat", "0.01")
    d = json.loads(out)
    assert code == 0 and d["steps"][0]["R_exact"] == 230401 and len(d["levels"]) == 4
    assert d["levels"][3]["xi"]["log10"]["sign"] == -1
    table = tmp_path / "t.json"
    table.write_text(json.dumps([[0, 0.01], [0.001, 0.02]]))
    code, out, _ = run(capsys, "constants", "--k", "2", "--K", "1", "--alpha", "0.5", "--delta", "0.1",
                       "--beta-floor", "0.5", "--eps-stab", "0.1", "--bhat-table", str(table))
    assert code == 0
    code, _, err = run(capsys, "constants", "--k", "2", "--K", "1", "--alpha", "0.5", "--delta", "0.1",
                       "--beta-floor", "0.5", "--eps-stab", "0.1")
    assert code == 2 and "bhat" in err


def test_experiment_and_plot(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({
        "encoding": {"kind": "graph_copies", "pattern": "K3"}, "n_list": [6, 8],
        "p_rule": {"c": 1.5}, "trials": 2, "seed": 9, "family": {"kind": "partite"},
    }))
    code, _, _ = run(capsys, "experiment", "run", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert code == 0
    assert len((tmp_path / "o" / "records.jsonl").read_text().splitlines()) == 4
    code, _, _ = run(capsys, "plot", "--csv", str(tmp_path / "o" / "summary.csv"), "--x", "p",
                     "--y", "mean_ratio", "--out", str(tmp_path / "p.svg"))
    assert code == 0 and (tmp_path / "p.svg").exists()
    code, _, _ = run(capsys, "plot", "--csv", str(tmp_path / "o" / "summary.csv"), "--x", "p",
                     "--y", "missing", "--out", str(tmp_path / "q.svg"))
    assert code == 2 and not (tmp_path / "q.svg").exists()
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"encoding": {"kind": "schur"}}))
    assert run(capsys, "experiment", "run", "--config", str(bad))[0] == 2


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["extremal", "solve", "--kind", "schur", "--n", "5", "--seed", "-3"])
    assert exc.value.code == 2
