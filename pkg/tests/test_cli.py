import json

import pytest

from timeseg.cli import main

PERFECT = "<think>from 2.00 to 4.00</think><answer>2.00-4.00</answer>"


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(row) + "\n" for row in rows))
    return str(path)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_lines(out):
    return [json.loads(line) for line in out.strip().splitlines()]


class TestScore:
    def test_happy_path(self, tmp_path, capsys):
        path = write_jsonl(
            tmp_path / "in.jsonl",
            [
                {"id": "a", "gt": [[2, 4]], "raw_output": PERFECT},
                {"id": "b", "gt": [[0, 10]], "raw_output": "<think>5.00 15.00</think><answer>5.00-15.00</answer>"},
                {"id": "c", "gt": [[0, 1]], "raw_output": "garbage"},
            ],
        )
        code, out, _ = run_cli(capsys, "score", path, "--step", "100")
        assert code == 0
        lines = parse_lines(out)
        assert len(lines) == 4
        assert [line["id"] for line in lines[:3]] == ["a", "b", "c"]
        assert lines[0]["total"] == pytest.approx(3.0, abs=1e-9)
        assert lines[0]["phase"] == 1
        assert lines[2]["r_format"] == 0
        assert lines[2]["total"] == 0.0
        summary = lines[3]["summary"]
        assert summary["n_records"] == 3
        assert summary["n_errors"] == 0

    def test_malformed_output_is_not_a_record_error(self, tmp_path, capsys):
        path = write_jsonl(tmp_path / "in.jsonl", [{"id": "a", "gt": [[0, 1]], "raw_output": "oops"}])
        code, out, _ = run_cli(capsys, "score", path)
        assert code == 0
        assert parse_lines(out)[0]["r_format"] == 0

    def test_missing_field_is_record_error(self, tmp_path, capsys):
        path = write_jsonl(
            tmp_path / "in.jsonl",
            [{"id": "a", "raw_output": PERFECT}, {"id": "b", "gt": [[2, 4]], "raw_output": PERFECT}],
        )
        code, out, _ = run_cli(capsys, "score", path)
        assert code == 1
        lines = parse_lines(out)
        assert "error" in lines[0]
        assert lines[1]["id"] == "b"
        assert lines[2]["summary"]["n_errors"] == 1

    def test_unreadable_input(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "score", str(tmp_path / "missing.jsonl"))
        assert code == 2
        assert "cannot read" in err

    def test_step_selects_phase(self, tmp_path, capsys):
        path = write_jsonl(tmp_path / "in.jsonl", [{"id": "a", "gt": [[2, 4]], "raw_output": PERFECT}])
        _, out, _ = run_cli(capsys, "score", path, "--step", "401")
        assert parse_lines(out)[0]["phase"] == 2

    def test_flag_overrides_config_file(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"alpha": 1.0}))
        path = write_jsonl(tmp_path / "in.jsonl", [{"id": "a", "gt": [[2, 4]], "raw_output": PERFECT}])
        _, out, _ = run_cli(capsys, "score", path, "--config", str(cfg_path))
        assert parse_lines(out)[0]["total"] == pytest.approx(2.0, abs=1e-9)
        _, out, _ = run_cli(capsys, "score", path, "--config", str(cfg_path), "--alpha", "3")
        assert parse_lines(out)[0]["total"] == pytest.approx(4.0, abs=1e-9)

    def test_config_from_environment(self, tmp_path, capsys, monkeypatch):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"alpha": 0.0}))
        monkeypatch.setenv("TIMESEG_CONFIG", str(cfg_path))
        path = write_jsonl(tmp_path / "in.jsonl", [{"id": "a", "gt": [[2, 4]], "raw_output": PERFECT}])
        _, out, _ = run_cli(capsys, "score", path)
        assert parse_lines(out)[0]["total"] == pytest.approx(1.0, abs=1e-9)

    def test_global_strategy_emits_null_local(self, tmp_path, capsys):
        path = write_jsonl(tmp_path / "in.jsonl", [{"id": "a", "gt": [[2, 4]], "raw_output": PERFECT}])
        _, out, _ = run_cli(capsys, "score", path, "--strategy", "global")
        assert parse_lines(out)[0]["r_local"] is None


class TestEval:
    def test_single_kind(self, tmp_path, capsys):
        path = write_jsonl(tmp_path / "in.jsonl", [{"id": "a", "gt": [[0, 10]], "pred": [[0, 10]]}])
        code, out, _ = run_cli(capsys, "eval", path, "--kind", "single")
        assert code == 0
        assert json.loads(out.strip().splitlines()[-1])["miou"] == pytest.approx(1.0)

    def test_multi_kind_worked_example(self, tmp_path, capsys):
        path = write_jsonl(
            tmp_path / "in.jsonl",
            [{"id": "a", "gt": [[0, 10], [20, 30]], "pred": [[0, 8], [27, 35]]}],
        )
        code, out, _ = run_cli(capsys, "eval", path, "--kind", "multi")
        assert code == 0
        assert json.loads(out.strip().splitlines()[-1])["f1_mean"] == pytest.approx(0.625)

    def test_kind_shape_mismatch_warns(self, tmp_path, capsys):
        path = write_jsonl(
            tmp_path / "in.jsonl", [{"id": "a", "gt": [[0, 10], [20, 30]], "pred": [[0, 10]]}]
        )
        code, _, err = run_cli(capsys, "eval", path, "--kind", "single")
        assert code == 0
        assert "multi-segment gt" in err

    def test_empty_input_fails(self, tmp_path, capsys):
        path = tmp_path / "in.jsonl"
        path.write_text("")
        code, _, err = run_cli(capsys, "eval", str(path), "--kind", "single")
        assert code == 2
        assert "no records" in err

    def test_per_record_csv_out(self, tmp_path, capsys):
        path = write_jsonl(tmp_path / "in.jsonl", [{"id": "a", "gt": [[0, 10]], "pred": [[0, 10]]}])
        out_csv = tmp_path / "scores.csv"
        code, _, _ = run_cli(capsys, "eval", path, "--kind", "multi", "--out", str(out_csv))
        assert code == 0
        assert out_csv.read_text().splitlines()[0].startswith("id,iou")


class TestSimulate:
    def test_writes_csv_with_requested_steps(self, tmp_path, capsys):
        out_csv = tmp_path / "log.csv"
        code, _, _ = run_cli(
            capsys, "simulate", "--seed", "7", "--steps", "12", "--out", str(out_csv)
        )
        assert code == 0
        lines = out_csv.read_text().splitlines()
        assert len(lines) == 13
        assert lines[0] == "step,phase,mean_r_match,mean_r_timestamp,mean_r_format,mean_count_gap"

    def test_byte_identical_reruns(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run_cli(capsys, "simulate", "--seed", "3", "--steps", "10", "--out", str(a))
        run_cli(capsys, "simulate", "--seed", "3", "--steps", "10", "--out", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_invalid_config_key_lists_offenders(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"alpha": 2.0, "warp_speed": 9}))
        code, _, err = run_cli(capsys, "simulate", "--steps", "2", "--config", str(cfg_path))
        assert code == 2
        assert "warp_speed" in err

    def test_summary_line_printed(self, tmp_path, capsys):
        out_csv = tmp_path / "log.csv"
        _, out, _ = run_cli(capsys, "simulate", "--steps", "5", "--out", str(out_csv))
        assert json.loads(out.strip().splitlines()[-1])["summary"]["steps"] == 5


class TestParse:
    def test_well_formed(self, capsys):
        code, out, _ = run_cli(capsys, "parse", PERFECT)
        assert code == 0
        obj = json.loads(out)
        assert obj["well_formed"] is True
        assert obj["answer_segments"] == [[2.0, 4.0]]

    def test_empty_input(self, capsys):
        code, out, _ = run_cli(capsys, "parse", "")
        assert code == 0
        assert json.loads(out)["well_formed"] is False

    def test_think_only(self, capsys):
        code, out, _ = run_cli(capsys, "parse", "<think>only thoughts</think>")
        assert code == 0
        obj = json.loads(out)
        assert obj["answer"] is None
        assert obj["answer_segments"] is None


def test_version(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert capsys.readouterr().out.startswith("timeseg ")
