import json
import subprocess
import sys

import pytest

from ricciforge.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, read_config, thread_count


def run(args, capsys):
    code = main(args)
    return code, capsys.readouterr()


def test_ricci_output_is_byte_identical(capsys):
    args = ["verify", "ricci", "--k", "2", "--lambda", "auto", "--samples", "10000", "--seed", "7"]
    c1, o1 = run(args, capsys)
    c2, o2 = run(args, capsys)
    assert c1 == c2 == EXIT_OK
    assert o1.out == o2.out
    data = json.loads(o1.out)
    assert data[0]["parameters"]["lambda"] == 128.0 and data[0]["runtime_ms"] == 0


def test_chern_clifford(capsys):
    code, out = run(["verify", "chern", "--k", "1", "--clifford"], capsys)
    assert code == EXIT_OK
    import math
    assert abs(json.loads(out.out)[0]["value"] - 2 * math.pi) < 1e-6 * 2 * math.pi


def test_group_index_csv(capsys):
    code, out = run(["group", "index", "--k", "3", "--format", "csv"], capsys)
    assert code == EXIT_OK
    assert out.out.splitlines()[1].startswith("group.index,3,")


def test_group_index_value(capsys):
    code, out = run(["group", "index", "--k", "3"], capsys)
    assert json.loads(out.out)[0]["value"] == 3


@pytest.mark.parametrize("args", [["verify"], ["verify", "nope"], ["verify", "ricci"],
                                  ["verify", "ricci", "--k", "0"], ["sweep", "--k-range", "3..1"],
                                  ["verify", "ricci", "--k", "1", "--lambda", "banana"]])
def test_usage_errors(args, capsys):
    assert run(args, capsys)[0] == EXIT_USAGE


def test_domain_error_is_usage(capsys):
    assert run(["group", "index", "--k", "9"], capsys)[0] == EXIT_USAGE
    assert run(["verify", "chern", "--k", "1", "--radius", "0.9"], capsys)[0] == EXIT_USAGE


def test_claim_failure_exit(capsys):
    assert run(["verify", "framebundle", "--ric-lower", "0", "--rm", "1", "--drm", "1"], capsys)[0] == EXIT_FAIL


def test_config_merged_under_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nk = 2\nformat = csv\nseed=3\n")
    code, out = run(["group", "relations", "--config", str(cfg)], capsys)
    assert code == EXIT_OK and out.out.startswith("claim_id,")
    assert out.out.splitlines()[1].split(",")[1] == "2"
    code, out = run(["group", "relations", "--config", str(cfg), "--format", "json", "--k", "3"], capsys)
    assert json.loads(out.out)[0]["parameters"]["k"] == 3
    bad = tmp_path / "bad.cfg"
    bad.write_text("no equals sign\n")
    assert run(["verify", "green", "--config", str(bad)], capsys)[0] == EXIT_USAGE


def test_sweep_and_report(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("RICCIFORGE_THREADS", "2")
    out_dir = tmp_path / "sweep"
    code, out = run(["sweep", "--k-range", "1..2", "--samples", "1000", "--out", str(out_dir)], capsys)
    assert code == EXIT_OK
    saved = (out_dir / "reports.json").read_text()
    assert saved == out.out
    assert [r["parameters"]["k"] for r in json.loads(saved)] == [1, 1, 1, 2, 2, 2]
    code, out = run(["report", "--input", str(out_dir / "reports.json"), "--format", "csv"], capsys)
    assert code == EXIT_OK
    assert out.out == (out_dir / "reports.csv").read_text()


def test_out_file(tmp_path, capsys):
    target = tmp_path / "green.json"
    code, out = run(["verify", "green", "--out", str(target)], capsys)
    assert code == EXIT_OK and out.out == ""
    assert len(json.loads(target.read_text())) == 2


def test_thread_count(monkeypatch):
    monkeypatch.setenv("RICCIFORGE_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.delenv("RICCIFORGE_THREADS")
    assert thread_count({"threads": "2"}) == 2
    assert thread_count() >= 1
    assert read_config(None) == {}


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ricciforge", "verify", "green", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("claim_id,")
