import json
import shutil
import subprocess
import sys

import pytest

from causekit.cli import data_dir, main, run_cli

SIGMA = ["--narrative", "sigma"]


def test_check(capsys):
    assert main(["check", *SIGMA]) == 0
    out = capsys.readouterr().out
    assert "narrative sigma: 7 actions, executable" in out


def test_eval_true_and_false():
    assert run_cli(["eval", *SIGMA, "--formula", "Know(D1, TStrom(L1))"])[0] == 0
    code, doc = run_cli(["eval", *SIGMA, "--formula", "Vis(D1, L1)"])
    assert code == 1 and doc["verdict"] is False


def test_intends_and_pgoal():
    assert run_cli(["intends", *SIGMA, "--at", "3", "--agent", "D1", "--formula", "F Vis(D1, L1')"])[0] == 0
    assert run_cli(["intends", *SIGMA, "--at", "3", "--agent", "D1",
                    "--formula", "Vis(D1, L1) B Vis(D1, Ld)"])[0] == 1
    assert run_cli(["pgoal", "--agent", "D1", "--formula", "F At(D1, Ld) & Init", "--level", "0"])[0] == 0


def test_causes_json(capsys):
    assert main(["causes", *SIGMA, "--effect", "Vis(D1, L1')", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["causes"] == [{"action": "takeOff(D1, Ls)", "time": 0},
                             {"action": "flyTo(D1, Ls, L1')", "time": 5}]
    assert doc["engine"] == {"domain": "drone", "horizon": 9, "world": "W0"}
    assert doc["exit"] == 0 and "seconds" not in doc


def test_explains_with_rrint():
    code, doc = run_cli(["explains", *SIGMA, "--effect", "Vis(D1, L1')", "--rrint", "facts.rr"])
    assert code == 0
    got = {(e["action"], e["time"]) for e in doc["explanations"]}
    assert ("req(Dc, D1, F Vis(D1, L1'))", 2) in got
    [req] = [e for e in doc["explanations"] if e["time"] == 2]
    assert req["via"][0]["action"] == "flyTo(D1, Ls, L1')"


def test_paths():
    code, doc = run_cli(["paths", *SIGMA, "--at", "6"])
    assert code == 0 and doc["paths"]["count"] == 3 == len(doc["paths"]["list"])
    assert run_cli(["paths", *SIGMA, "--count", "--horizon", "7"])[1]["paths"]["count"] == 1


def test_query_file(tmp_path):
    q = tmp_path / "q.q"
    q.write_text("eval Know(D1, TStrom(L1))\nintends D1: F Vis(D1, L1')\ncauses Vis(D1, L1')\n")
    code, doc = run_cli(["query", str(q), *SIGMA, "--at", "6"])
    assert code == 0
    assert [r["kind"] for r in doc["results"]] == ["eval", "intends", "causes"]


def test_timing_flag():
    assert "seconds" in run_cli(["check", "--timing"])[1]


def test_narrative_that_is_not_executable(tmp_path):
    bad = tmp_path / "bad.nr"
    bad.write_text("land(D1, Ls)\ntakeOff(D1, Ls)\n")
    code, doc = run_cli(["check", "--narrative", str(bad)])
    assert code == 2
    assert doc["error"]["detail"] == {"step": 0}


def test_setting_errors_exit_2():
    code, doc = run_cli(["causes", *SIGMA, "--effect", "At(D1, Ls)"])
    assert code == 2 and doc["error"]["kind"] == "effect-at-root"
    assert run_cli(["causes", *SIGMA, "--effect", "Vis(D1, L1)"])[0] == 2


def test_invalid_theory_exit_2(tmp_path):
    text = (data_dir() / "drone.ck").read_text().replace("D2: {W0, W1} {W2}", "D2: {W0, W1}")
    dom = tmp_path / "broken.ck"
    dom.write_text(text)
    code, doc = run_cli(["check", "--domain", str(dom)])
    assert code == 2


def test_unreadable_inputs_exit_3(tmp_path):
    assert run_cli(["check", "--narrative", "nosuch"])[0] == 3
    code, doc = run_cli(["eval", "--formula", "Flying(D1) &"])
    assert code == 3 and doc["error"]["kind"] == "parse"
    assert doc["error"]["detail"]["col"] == 13
    assert run_cli([])[0] == 3
    assert run_cli(["eval"])[0] == 3
    dom = tmp_path / "x.ck"
    dom.write_text("domain x\nfluents { P(x: Nope) }\n")
    assert run_cli(["check", "--domain", str(dom)])[0] == 3


def test_errors_go_to_stderr(capsys):
    assert main(["eval", "--formula", "Flying("]) == 3
    captured = capsys.readouterr()
    assert captured.out == "" and "error [parse]" in captured.err


@pytest.mark.skipif(shutil.which("causekit") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["causekit", "check", "--json"], capture_output=True, text=True, timeout=60)
    assert r.returncode == 0 and json.loads(r.stdout)["verdict"] is True


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "causekit", "eval", "--formula", "Vis(D1, L1)"],
                       capture_output=True, text=True, timeout=60)
    assert r.returncode == 1 and "verdict: False" in r.stdout
