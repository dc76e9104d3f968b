import csv
import io
import json
import subprocess
import sys

import pytest

from weakbs.cli import COLUMNS, RunConfig, main, render_csv


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_sweep_csv_and_sidecar(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code, _, _ = run(["sweep", "--eps", "0.5,0.4,0.3,0.25,0.2", "--resolution", "16", "--out", str(out)], capsys)
    assert code == 0
    table = rows(out.read_text())
    assert tuple(table[0]) == COLUMNS["sweep"]
    assert len(table) == 6
    eps_ln = [float(r[5]) for r in table[1:]]
    devs = [abs(x + 4) for x in eps_ln]
    assert all(b < a for a, b in zip(devs, devs[1:]))
    meta = json.loads((tmp_path / "sweep.csv.meta.json").read_text())
    assert meta["config"]["command"] == "sweep"
    assert meta["config"]["potential"] == {"name": "disk", "params": {"R": 1.0, "height": 1.0}}
    assert set(meta["versions"]) >= {"weakbs", "numpy", "scipy", "python"}
    assert "total_seconds" in meta["timings"]


def test_config_replay_is_byte_identical(tmp_path, capsys):
    first = tmp_path / "a.csv"
    assert run(["solve", "--eps", "0.4", "--resolution", "12", "--out", str(first)], capsys)[0] == 0
    second = tmp_path / "b.csv"
    assert run(["solve", "--config", str(first) + ".meta.json", "--out", str(second)], capsys)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_solve_negative_U_exits_2(capsys):
    code, out, err = run(["solve", "--potential", "disk", "--params", "height=-1", "--eps", "0.3",
                          "--resolution", "8"], capsys)
    assert code == 2
    assert "theorem hypothesis int V > 0 violated" in err
    assert rows(out)[1][-1] == "no_root"


def test_partial_sweep_exits_3(capsys):
    code, out, _ = run(["sweep", "--eps", "0.5,50", "--resolution", "8"], capsys)
    assert code == 3
    assert [r[-1] for r in rows(out)[1:]] == ["found", "precondition_failed"]


@pytest.mark.parametrize("argv,fragment", [
    (["solve", "--eps", "0.3", "--potential", "nope"], "potential.name"),
    (["solve", "--eps", "0.3", "--params", "delta=2", "--potential", "v_infinity", "--radius", "5"],
     "potential.params.delta"),
    (["solve", "--eps", "abc"], "eps"),
    (["solve"], "eps"),
    (["sweep", "--eps", "0.5", "--potential", "v_infinity"], "grid"),
    (["hs-norm", "--alpha", "-1"], "alpha"),
    (["lemma-check", "--which", "iv"], "which"),
    (["check-assumptions", "--conditions", "foo"], "conditions"),
    (["solve", "--eps", "0.3", "--params", "R"], "params"),
])
def test_config_errors_exit_1_with_path(argv, fragment, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1
    assert fragment in err


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as e:
        main(["sweep", "--no-such-flag"])
    assert e.value.code == 1


def test_check_assumptions(capsys):
    code, out, _ = run(["check-assumptions", "--potential", "gaussian"], capsys)
    assert code == 0
    assert all(r[-1] == "holds" for r in rows(out)[1:])
    code, out, _ = run(["check-assumptions", "--potential", "v_zero", "--conditions", "L1,simon_eta"], capsys)
    assert code == 2
    status = {(r[0], r[1]): r[-1] for r in rows(out)[1:]}
    assert status[("L1", "0.0")] == "holds" and status[("simon_eta", "0.1")] == "divergent"


def test_check_assumptions_v_infinity(capsys):
    code, out, _ = run(["check-assumptions", "--potential", "v_infinity", "--params", "delta=0.5",
                        "--conditions", "ln_s,simon_s", "--s", "0.5"], capsys)
    table = {r[0]: r for r in rows(out)[1:]}
    assert code == 2
    assert table["ln_s"][-1] == "holds" and table["simon_s"][-1] == "divergent"


def test_hs_norm_json(capsys):
    code, out, _ = run(["hs-norm", "--alpha", "0.1,1,10", "--resolution", "12", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["columns"] == list(COLUMNS["hs-norm"])
    hs = [r[1] for r in doc["rows"]]
    assert hs[0] > hs[1] > hs[2]
    assert doc["config"]["alpha"] == [0.1, 1.0, 10.0]


def test_lemma_check(capsys):
    code, out, _ = run(["lemma-check", "--which", "iii"], capsys)
    table = rows(out)
    assert code == 0 and tuple(table[0]) == COLUMNS["lemma-check"]
    assert float(table[1][2]) > 0 and float(table[1][3]) > 0
    code, out, _ = run(["lemma-check", "--curve", "--resolution", "10", "--s", "0"], capsys)
    assert code == 0 and tuple(rows(out)[0]) == COLUMNS["lemma-curve"] and len(rows(out)) == 5


def test_oracle_compare(capsys):
    code, out, _ = run(["oracle-compare", "--eps", "0.5", "--resolution", "16", "--fd-n", "80"], capsys)
    r = rows(out)[1]
    assert code == 0 and r[1] == "compared" and float(r[6]) < 0.05


def test_potential_file(tmp_path, capsys):
    f = tmp_path / "cone.json"
    f.write_text(json.dumps({"piecewise_radial": [[0, 2], [1, 0]]}))
    code, out, _ = run(["solve", "--potential", str(f), "--eps", "0.6", "--resolution", "12"], capsys)
    assert code == 0 and rows(out)[1][-1] == "found"


def test_render_csv_is_plain():
    assert render_csv(("a", "b"), [(1.5, True)]) == "a,b\n1.5,true\n"


def test_run_config_round_trip():
    cfg = RunConfig("sweep", eps=[0.5])
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "weakbs", "--version"], capture_output=True, text=True)
    assert p.returncode == 0 and "weakbs" in p.stdout
