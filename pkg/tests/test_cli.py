import json

import pytest

from nlprover.cli import main

WORKED_THEORY = (
    "# worked example\n"
    "Everyone is not kind or not round or rough.\n"
    "Everyone is not rough.\n"
    "Everyone is round.\n"
)


@pytest.fixture
def theory_file(tmp_path):
    p = tmp_path / "theory.txt"
    p.write_text(WORKED_THEORY)
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_prove_worked_example(capsys, theory_file):
    code, out, _ = run(
        capsys, "prove", "--theory", theory_file, "--hypothesis", "Bob is not kind."
    )
    assert code == 0
    assert "label: True" in out
    assert out.count("STEP ") == 3
    assert "Bob is not round or rough." in out


def test_prove_single_fact(capsys, tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("Bob is kind.\n")
    code, out, _ = run(capsys, "prove", "--theory", str(p), "--hypothesis", "Bob is kind.")
    assert code == 0
    assert "label: True" in out
    assert out.count("STEP ") == 1


def test_prove_unknown_empty_proof(capsys, tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("Bob is kind.\n")
    code, out, _ = run(capsys, "prove", "--theory", str(p), "--hypothesis", "Bob is round.")
    assert code == 0
    assert "label: Unknown" in out
    assert "STEP" not in out


def test_prove_json_output(capsys, theory_file):
    code, out, _ = run(
        capsys, "prove", "--theory", theory_file, "--hypothesis", "Bob is not kind.", "--json"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["label"] == "True"
    assert len(payload["predicted_proof"]) == 3


def test_parse_error_exits_2(capsys, tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("Bob is zippy.\n")
    code, _, err = run(capsys, "prove", "--theory", str(p), "--hypothesis", "Bob is kind.")
    assert code == 2
    assert "zippy" in err


def test_bad_flag_exits_4(capsys, theory_file):
    with pytest.raises(SystemExit) as e:
        main(["prove", "--theory", theory_file, "--strategy", "nonsense"])
    assert e.value.code == 4


def test_bad_gen_config_exits_4(capsys, tmp_path):
    code, _, err = run(
        capsys, "gen", "--out", str(tmp_path / "x.jsonl"), "--count", "1", "--mix", "2,2,2"
    )
    assert code == 4
    assert "config error" in err


def test_sat_command(capsys, tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("Everyone is round.\nBob is not round.\n")
    code, out, _ = run(capsys, "sat", "--theory", str(p))
    assert code == 0
    assert "Unsatisfiable" in out
    p2 = tmp_path / "t2.txt"
    p2.write_text("Bob is kind.\n")
    code, out, _ = run(capsys, "sat", "--theory", str(p2))
    assert "Satisfiable" in out


def test_gen_is_byte_identical_across_runs(capsys, tmp_path):
    a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    for out_path in (a, b):
        code, _, _ = run(
            capsys, "gen", "--out", str(out_path), "--count", "12", "--seed", "5"
        )
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_gen_prove_eval_pipeline(capsys, tmp_path):
    gold = tmp_path / "gold.jsonl"
    code, _, _ = run(capsys, "gen", "--out", str(gold), "--count", "9", "--seed", "3")
    assert code == 0

    code, out, _ = run(capsys, "prove", "--instances", str(gold), "--jobs", "1", "--json")
    assert code == 0
    preds = tmp_path / "preds.jsonl"
    preds.write_text(out)

    code, out, _ = run(capsys, "eval", "--predictions", str(preds), "--gold", str(gold))
    assert code == 0
    assert "EA: 1.0000" in out
    assert "FA: 1.0000" in out

    code, out, _ = run(capsys, "check", "--proofs", str(preds), "--instances", str(gold))
    assert code == 0
    assert "valid: 9/9" in out


def test_eval_json(capsys, tmp_path):
    gold = tmp_path / "gold.jsonl"
    run(capsys, "gen", "--out", str(gold), "--count", "6", "--seed", "4")
    code, out, _ = run(capsys, "prove", "--instances", str(gold), "--jobs", "1", "--json")
    preds = tmp_path / "preds.jsonl"
    preds.write_text(out)
    code, out, _ = run(capsys, "eval", "--predictions", str(preds), "--gold", str(gold), "--json")
    payload = json.loads(out)
    assert payload == {"entailment_accuracy": 1.0, "full_accuracy": 1.0, "n": 6}


def test_gen_nlsat_and_training_records(capsys, tmp_path):
    out_path = tmp_path / "nlsat.jsonl"
    code, _, _ = run(
        capsys,
        "gen", "--nlsat", "--out", str(out_path), "--count", "8", "--seed", "2",
        "--attributes", "8", "--depth-min", "1", "--depth-max", "6",
    )
    assert code == 0
    lines = [json.loads(l) for l in out_path.read_text().splitlines()]
    assert len(lines) == 8
    assert {l["label"] for l in lines} == {"Satisfiable", "Unsatisfiable"}

    gold = tmp_path / "gold.jsonl"
    records = tmp_path / "records.jsonl"
    code, _, _ = run(
        capsys,
        "gen", "--out", str(gold), "--count", "6", "--seed", "1",
        "--training-records", str(records),
    )
    assert code == 0
    recs = [json.loads(l) for l in records.read_text().splitlines()]
    assert recs and all(r["kind"] in ("pre_s", "post_s", "kc") for r in recs)


def test_missing_prediction_is_input_error(capsys, tmp_path):
    gold = tmp_path / "gold.jsonl"
    run(capsys, "gen", "--out", str(gold), "--count", "3", "--seed", "9")
    preds = tmp_path / "preds.jsonl"
    preds.write_text("")
    code, _, err = run(capsys, "eval", "--predictions", str(preds), "--gold", str(gold))
    assert code == 2
    assert "no prediction" in err


def test_prove_on_rule_only_data_is_input_error(capsys, tmp_path):
    out_path = tmp_path / "nlsat.jsonl"
    run(
        capsys,
        "gen", "--nlsat", "--out", str(out_path), "--count", "2", "--seed", "3",
        "--attributes", "8", "--depth-min", "1", "--depth-max", "4",
    )
    code, _, err = run(capsys, "prove", "--instances", str(out_path), "--jobs", "2")
    assert code == 2
    assert "no hypothesis" in err


def test_prove_instances_parallel_matches_serial(capsys, tmp_path):
    gold = tmp_path / "gold.jsonl"
    run(capsys, "gen", "--out", str(gold), "--count", "6", "--seed", "8")
    outs = []
    for jobs in ("1", "3"):
        code, out, _ = run(capsys, "prove", "--instances", str(gold), "--jobs", jobs, "--json")
        assert code == 0
        outs.append(out)
    assert outs[0] == outs[1]
