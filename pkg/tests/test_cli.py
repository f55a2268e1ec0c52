import json
import subprocess
import sys

import pytest

from specsynth.cli import EXIT_OK, EXIT_PIPELINE, EXIT_USAGE, main

from conftest import FIXTURES, SWAP_CONTRACT

SWAP_ENTRY = (FIXTURES / "swap.mini").read_text().split("\n\n")[0] + "\n"
NOSWAP_ENTRY = (FIXTURES / "swap.mini").read_text().split("\n\n")[1]


@pytest.fixture
def files(tmp_path):
    (tmp_path / "swap.mini").write_text(SWAP_ENTRY)
    (tmp_path / "noswap.mini").write_text(NOSWAP_ENTRY)
    (tmp_path / "swap.contract").write_text(SWAP_CONTRACT + "\n")
    return tmp_path


def run_max_of(tmp_path, out, *extra):
    corpus = tmp_path / "max_of.mini"
    text = (FIXTURES / "micro.mini").read_text()
    entry = next(chunk for chunk in text.split("\n\n") if "fn max_of" in chunk)
    corpus.write_text(entry + "\n")
    return main(["run", str(corpus), "--generator", f"mock:{FIXTURES / 'max_of_script.txt'}",
                 "--fuzz-execs", "3000", "--seed", "7", "--out", str(out), *extra])


def test_ingest_prints_targets_and_writes_manifest(tmp_path, capsys):
    manifest = tmp_path / "m.json"
    assert main(["ingest", str(FIXTURES / "selector.mini"), "--manifest", str(manifest)]) == 0
    out = capsys.readouterr().out
    assert "fill: target FOSL" in out and "untested: excluded" in out
    assert json.loads(manifest.read_text())["excluded"] == ["untested"]


def test_run_then_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert run_max_of(tmp_path, out, "--prices", "0.5", "1.5") == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["schema"] == "specsynth.report/1"
    (record,) = doc["records"]
    assert [a["stage"] for a in record["attempts"]] == ["LEVEL_SHORTFALL", "FUZZ_VIOLATED",
                                                        "ACCEPTED"]
    assert doc["tables"]["cost"]["cost"] > 0
    assert "1 functions: 1 valid" in capsys.readouterr().out
    assert main(["report", str(out), "--format", "text"]) == EXIT_OK
    assert "Test Valid" in capsys.readouterr().out
    assert main(["report", str(out), "--format", "json"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["metrics"]["test_valid"] == 1


def test_run_is_byte_identical_across_repeats(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_max_of(tmp_path, a) == run_max_of(tmp_path, b) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert "durations" not in a.read_text()


def test_timings_are_opt_in(tmp_path):
    out = tmp_path / "t.json"
    assert run_max_of(tmp_path, out, "--timings") == EXIT_OK
    assert "durations" in out.read_text()


def test_unknown_report_format_is_a_usage_error(tmp_path):
    out = tmp_path / "r.json"
    run_max_of(tmp_path, out)
    with pytest.raises(SystemExit) as e:
        main(["report", str(out), "--format", "xml"])
    assert e.value.code == EXIT_USAGE


def test_check_accepts_swap_and_rejects_noswap(files, capsys):
    assert main(["check", str(files / "swap.mini"), str(files / "swap.contract"),
                 "--fuzz-execs", "3000"]) == EXIT_OK
    assert "fuzz stage: PASSED" in capsys.readouterr().out
    cx = files / "cx.json"
    assert main(["check", str(files / "noswap.mini"), str(files / "swap.contract"),
                 "--fuzz-execs", "3000", "--counterexample-out", str(cx)]) == EXIT_PIPELINE
    assert "fuzz stage: VIOLATED" in capsys.readouterr().out
    assert main(["replay", str(cx)]) == EXIT_OK
    assert "reproduced" in capsys.readouterr().out


def test_check_rejects_contracts_below_target(files, capsys):
    (files / "weak.contract").write_text("requires: true\nensures: true\n")
    assert main(["check", str(files / "swap.mini"), str(files / "weak.contract"),
                 "--fuzz-execs", "200"]) == EXIT_PIPELINE
    assert "below target" in capsys.readouterr().out


def test_replay_of_a_tampered_counterexample_fails(files):
    cx = files / "cx.json"
    main(["check", str(files / "noswap.mini"), str(files / "swap.contract"),
          "--fuzz-execs", "3000", "--counterexample-out", str(cx)])
    d = json.loads(cx.read_text())
    d["digest"] = "0" * 16
    cx.write_text(json.dumps(d))
    assert main(["replay", str(cx)]) == EXIT_PIPELINE


@pytest.mark.parametrize("argv", [
    ["ingest", "/nonexistent/corpus.mini"],
    ["run", str(FIXTURES / "swap.mini"), "--generator", "magic", "--out", "/tmp/x.json"],
    ["run", str(FIXTURES / "swap.mini"), "--generator", "remote", "--out", "/tmp/x.json"],
    ["run", str(FIXTURES / "swap.mini"), "--generator", "mock:/nonexistent",
     "--out", "/tmp/x.json"],
    ["run", str(FIXTURES / "swap.mini"), "--generator", "enum", "--max-attempts", "0",
     "--out", "/tmp/x.json"],
    ["report", "/nonexistent/report.json"],
    ["replay", "/nonexistent/cx.json"],
    ["check", str(FIXTURES / "swap.mini"), "/nonexistent.contract"],
])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "specsynth" in capsys.readouterr().err


def test_missing_subcommand_exits_2():
    with pytest.raises(SystemExit) as e:
        main([])
    assert e.value.code == EXIT_USAGE


def test_pipeline_errors_exit_1(tmp_path, files):
    bad = tmp_path / "bad.mini"
    bad.write_text("fn broken( {\n")
    assert main(["ingest", str(bad)]) == EXIT_PIPELINE
    (files / "bad.contract").write_text("requires: x |-> \n")
    assert main(["check", str(files / "swap.mini"), str(files / "bad.contract")]) == \
        EXIT_PIPELINE


def test_module_entry_point(tmp_path):
    p = subprocess.run([sys.executable, "-m", "specsynth", "ingest",
                        str(FIXTURES / "swap.mini")], capture_output=True, text=True)
    assert p.returncode == 0 and "swap: target PropSL" in p.stdout
