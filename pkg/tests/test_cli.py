"""Command-line interface: subcommands, document parsing, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

from amnm.cli import main

CHAIN3 = {"table": [[0, 0, 0], [0, 1, 1], [0, 1, 2]]}
FREE2 = {"table": [[0, 2, 2], [2, 1, 2], [2, 2, 2]]}


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_doc(tmp_path, doc, name="doc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


# ---------------------------------------------------------------------------
# validate / invariants / filters.
# ---------------------------------------------------------------------------


def test_validate_accepts_a_chain(tmp_path, capsys):
    code, out, _ = run(capsys, "validate", write_doc(tmp_path, CHAIN3))
    assert code == 0
    assert "valid" in out


def test_validate_reports_structural_errors(tmp_path, capsys):
    bad = {"table": [[1, 0], [0, 1]]}
    code, _, err = run(capsys, "validate", write_doc(tmp_path, bad))
    assert code == 2
    assert "structural error" in err


def test_malformed_json_is_an_input_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "validate", str(path))
    assert code == 3


def test_missing_file_is_an_input_error(capsys):
    code, _, err = run(capsys, "validate", "/nonexistent/nowhere.json")
    assert code == 3


def test_invariants_json_reports_breadth_width_height(tmp_path, capsys):
    code, out, _ = run(capsys, "invariants", "--json", write_doc(tmp_path, FREE2))
    assert code == 0
    doc = json.loads(out)
    assert doc["n"] == 3
    assert doc["breadth"] == 2
    assert doc["width"] == 2
    assert doc["height"] == 2
    assert doc["filters"] == 3


def test_filters_lists_principal_up_sets(tmp_path, capsys):
    code, out, _ = run(capsys, "filters", "--json", write_doc(tmp_path, CHAIN3))
    assert code == 0
    doc = json.loads(out)
    assert [f["members"] for f in doc["filters"]] == [[0, 1, 2], [1, 2], [2]]


# ---------------------------------------------------------------------------
# defect / correct.
# ---------------------------------------------------------------------------


def test_defect_exact_rational_output(tmp_path, capsys):
    doc = dict(CHAIN3, weights=["2", "4", "8"], map={"codomain": "scalar", "values": [1, 0, 1]})
    code, out, _ = run(capsys, "defect", "--json", write_doc(tmp_path, doc))
    assert code == 0
    parsed = json.loads(out)
    # worst pair (0, 1): |1*0 - psi(0)| / (2*4) = 1/8
    assert parsed["defect"] == 0.125
    assert parsed["defect_sq"] == "1/64"
    assert parsed["exact"] is True
    assert parsed["witness"] == [0, 1]


def test_defect_reads_from_stdin(capsys, monkeypatch):
    doc = dict(CHAIN3, map={"codomain": "scalar", "values": [0, 1, 1]})
    import io

    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(doc)))
    code, out, _ = run(capsys, "defect", "-")
    assert code == 0
    assert "0" in out


def test_correct_scalar_emits_certificate(tmp_path, capsys):
    doc = dict(CHAIN3, map={"codomain": "scalar", "values": [[0.02, 0.01], 0.97, 1.01]})
    code, out, _ = run(capsys, "correct", "--target", "scalar", "--json", write_doc(tmp_path, doc))
    assert code == 0
    cert = json.loads(out)
    assert cert["target"] == "scalar"
    assert cert["corrected"]["values"] == [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0]]
    assert cert["achieved_distance"] <= 1.4 * cert["input_defect"] + 1e-9


def test_correct_scalar_rejects_big_defect(tmp_path, capsys):
    doc = dict(FREE2, map={"codomain": "scalar", "values": [1, 1, 0]})
    code, _, err = run(capsys, "correct", "--target", "scalar", write_doc(tmp_path, doc))
    assert code == 4
    assert "precondition" in err


def test_correct_weighted_requires_weights_and_epsilon(tmp_path, capsys):
    doc = dict(CHAIN3, map={"codomain": "scalar", "values": [1, 1, 1]})
    code, _, err = run(
        capsys, "correct", "--target", "weighted", "--epsilon", "0.5", write_doc(tmp_path, doc)
    )
    assert code == 3  # weights missing


def test_correct_weighted_round_trip(tmp_path, capsys):
    doc = dict(
        CHAIN3,
        weights=["2", "4", "8"],
        map={"codomain": "scalar", "values": [0.99, 1.02, 0.98]},
    )
    code, out, _ = run(
        capsys,
        "correct",
        "--target",
        "weighted",
        "--epsilon",
        "0.9",
        "--round",
        "--json",
        write_doc(tmp_path, doc),
    )
    assert code == 0
    cert = json.loads(out)
    assert cert["target"] == "weighted-scalar"
    assert cert["achieved_distance"] <= 0.9


def test_correct_unweighted_target_rejects_weights_field(tmp_path, capsys):
    doc = dict(
        CHAIN3, weights=["2", "4", "8"], map={"codomain": "scalar", "values": [1, 1, 1]}
    )
    code, _, err = run(capsys, "correct", "--target", "scalar", write_doc(tmp_path, doc))
    assert code == 3


def test_correct_t2(tmp_path, capsys):
    doc = dict(
        CHAIN3,
        map={"codomain": "t2", "values": [[0.01, 0.005], [1.02, -0.01], [0.98, 0.0]]},
    )
    code, out, _ = run(capsys, "correct", "--target", "t2", "--json", write_doc(tmp_path, doc))
    assert code == 0
    cert = json.loads(out)
    assert cert["achieved_distance"] <= (25.0 / 11.0) * cert["input_defect"] + 1e-9


def test_correct_m2(tmp_path, capsys):
    doc = dict(
        CHAIN3,
        map={
            "codomain": "m2",
            "values": [
                [[0.001, 0.0], [0.0, 0.001]],
                [[1.0, 0.002], [0.0, 0.0]],
                [[0.999, 0.0], [0.001, 0.0]],
            ],
        },
    )
    code, out, _ = run(capsys, "correct", "--target", "m2", "--json", write_doc(tmp_path, doc))
    assert code == 0
    cert = json.loads(out)
    assert cert["achieved_distance"] <= cert["claimed_bound"] + 1e-12


# ---------------------------------------------------------------------------
# counterexample / oracle.
# ---------------------------------------------------------------------------


def test_counterexample_psi_blocks(capsys):
    code, out, _ = run(
        capsys, "counterexample", "--family", "psi-blocks", "--sizes", "2,3", "--json"
    )
    assert code == 0
    doc = json.loads(out)
    assert [r["defect"]["defect"] for r in doc["reports"]] == ["1/4", "1/8"]


def test_counterexample_t2_chain_range(capsys):
    code, out, _ = run(
        capsys,
        "counterexample",
        "--family",
        "t2-chain",
        "--length",
        "10",
        "--m-range",
        "0:3",
        "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert [r["defect"]["defect"] for r in doc["reports"]] == ["1/2", "1/4", "1/8"]


def test_counterexample_m2_chain_with_corroboration(capsys):
    code, out, _ = run(
        capsys,
        "counterexample",
        "--family",
        "m2-chain",
        "--length",
        "12",
        "--delta",
        "0.05",
        "--corroborate",
        "--json",
    )
    assert code == 0
    doc = json.loads(out)
    rep = doc["reports"][0]
    assert rep["defect"]["defect"] == "3/128"
    assert rep["distance_lower_bound"] == 0.5
    assert doc["corroborations"][0]["value"] >= 0.49


def test_counterexample_nonuniform_needs_a_spiked_weight(capsys, tmp_path):
    # a geometric document has no eligible index -> exit 5
    weights = [str(2 ** (k + 1)) for k in range(12)]
    table = [[min(i, j) for j in range(12)] for i in range(12)]
    doc = {"table": table, "weights": weights}
    code, _, err = run(
        capsys,
        "counterexample",
        "--family",
        "m2-chain-nonuniform",
        "--delta",
        "0.05",
        write_doc(tmp_path, doc),
    )
    assert code == 5


def test_counterexample_nonuniform_default_weight(capsys):
    code, out, _ = run(
        capsys,
        "counterexample",
        "--family",
        "m2-chain-nonuniform",
        "--length",
        "9",
        "--delta",
        "0.05",
        "--json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["reports"][0]["details"]["lemma_scenario"] == "double"


def test_oracle_output_is_deterministic(tmp_path, capsys):
    doc = dict(
        CHAIN3,
        map={
            "codomain": "m2",
            "values": [
                [[0.0, 0.0], [0.0, 0.0]],
                [[0.99, 0.01], [0.0, 0.0]],
                [[1.0, 0.0], [0.0, 1.0]],
            ],
        },
    )
    path = write_doc(tmp_path, doc)
    code1, out1, _ = run(capsys, "oracle", "--json", "--seed", "5", path)
    code2, out2, _ = run(capsys, "oracle", "--json", "--seed", "5", path)
    assert code1 == code2 == 0
    assert out1 == out2


def test_oracle_scalar_exhaustive(tmp_path, capsys):
    doc = dict(CHAIN3, map={"codomain": "scalar", "values": [0.1, 0.9, 1.1]})
    code, out, _ = run(capsys, "oracle", "--json", write_doc(tmp_path, doc))
    assert code == 0
    parsed = json.loads(out)
    assert parsed["method"] == "exhaustive"


# ---------------------------------------------------------------------------
# suite and the installed entry point.
# ---------------------------------------------------------------------------


def test_suite_fast_runs_green(capsys):
    code, out, _ = run(capsys, "suite", "--fast", "--seed", "3")
    assert code == 0
    assert "all sections passed" in out


def test_console_entry_point_matches_module_main(tmp_path):
    doc = write_doc(tmp_path, CHAIN3)
    proc = subprocess.run(
        ["amnm", "invariants", "--json", doc], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["breadth"] == 1


def test_bad_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 3
