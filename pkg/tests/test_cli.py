import json

import pytest

from unicorr.cli import EXIT_BUDGET, EXIT_INPUT, EXIT_OK, EXIT_REFUTED, EXIT_REJECTED, main

BIINT_EXAMPLE = r"dia(box(p)) \/ q <= dia(box(q)) /\ rtail(dia(r), p)"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify(capsys):
    code, out, _ = run(capsys, "--sig", "biint", "classify", BIINT_EXAMPLE)
    assert code == EXIT_OK and out.strip() == "sahlqvist, eps=(1,1,d)"
    code, out, _ = run(capsys, "classify", "box(dia(p)) <= dia(box(p))")
    assert code == EXIT_REJECTED and "witness" in out


def test_classify_explain_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "classify", "dia(p) <= box(p)", "--explain")
    data = json.loads(out)
    assert code == EXIT_OK and data["verdict"] == "analytic-sahlqvist" and len(data["trees"]) == 2


def test_parse_errors_exit_with_input_code(capsys):
    code, _, err = run(capsys, "classify", "dia(p <= ")
    assert code == EXIT_INPUT and "line 1, col 7" in err
    code, _, err = run(capsys, "--sig", "/nonexistent.sig", "classify", "p <= p")
    assert code == EXIT_INPUT


def test_alba_and_trace(capsys, tmp_path):
    trace = tmp_path / "trace.json"
    code, out, _ = run(capsys, "alba", "dia(box(p)) <= box(dia(p))", "--trace-out", str(trace),
                       "--verify", "small")
    assert code == EXIT_OK
    assert out.splitlines()[1] == "dia(box_b1(j1)) <= m1 => dia(j1) <= box(m1)"
    assert "0 disagreements" in out
    steps = json.loads(trace.read_text())
    assert steps and {"rule", "before", "after"} <= set(steps[0])


def test_alba_rejects_non_analytic(capsys):
    code, out, _ = run(capsys, "--sig", "biint", "alba", BIINT_EXAMPLE)
    assert code == EXIT_REJECTED and out.startswith("rejected")


def test_translate(capsys):
    code, out, _ = run(capsys, "translate", "dia(p) <= box(dia(T))")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "dia_ge(dia_o(box_le(p))) <= box_le(box_o(dia_ge(dia_o(T))))"
    code, _, _ = run(capsys, "translate", "dia(box(p)) <= box(dia(p))")
    assert code == EXIT_REJECTED


def test_subord_commands(capsys, tmp_path):
    f = tmp_path / "s.sub"
    f.write_text("atoms: 1\nrel: 0 0\nrel: 0 1\nrel: 1 1\n")
    assert run(capsys, "subord", "check", str(f))[0] == EXIT_OK
    code, out, _ = run(capsys, "subord", "convert", str(f))
    assert code == EXIT_OK and "round trip: True" in out
    assert run(capsys, "subord", "validity", str(f), "dia(p) <= p")[0] == EXIT_OK
    bad = tmp_path / "bad.sub"
    bad.write_text("atoms: 1\nrel: 0 1\n")
    assert run(capsys, "subord", "check", str(bad))[0] == EXIT_REFUTED
    assert run(capsys, "subord", "detect", "box(imp(p, dia(p)))")[0] == EXIT_OK
    assert run(capsys, "subord", "detect", "dia(imp(p, q))")[0] == EXIT_REJECTED


def test_oracle_report(capsys, tmp_path):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("dia(p) <= box(p)\n# comment\ndia(box(p)) <= box(dia(p))\n")
    out_dir = tmp_path / "report"
    code, out, _ = run(capsys, "--seed", "3", "oracle", str(corpus), "--pool", "small",
                       "--report-dir", str(out_dir))
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "inequality\talgebras\tvalid\tdisagreements"
    assert all(l.split("\t")[3] == "0" for l in lines[1:3])
    for name in ("oracle.csv", "oracle_grid.png", "validity_rates.png"):
        assert (out_dir / name).stat().st_size > 0


def test_oracle_budget(capsys, tmp_path):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("dia(p) <= box(p)\n")
    code, _, err = run(capsys, "oracle", str(corpus), "--pool", "ba:3", "--budget", "1")
    assert code == EXIT_BUDGET and "budget" in err


def test_seed_changes_the_pool(capsys, tmp_path):
    corpus = tmp_path / "corpus.txt"
    corpus.write_text("box(p) <= dia(p)\n")
    outs = {run(capsys, "--seed", str(s), "--format", "json", "oracle", str(corpus), "--pool", "small")[1]
            for s in (0, 1)}
    assert len(outs) == 2


@pytest.mark.parametrize("argv", [["classify"], ["bogus"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as e:
        main(argv)
    assert e.value.code == 2
