from pathlib import Path

import pytest

from uavids import report
from uavids.errors import BaselinesParseError

GOLDEN = Path(__file__).parent / "golden"


def rep(p, r, f, a):
    return {"precision": p, "recall": r, "f1": f, "accuracy": a}


REPORTS = {
    "binary": {
        "DT": rep(0.9421, 0.9420, 0.9421, 0.9420),
        "RF": rep(0.95, 0.95, 0.95, 0.95),
        "KNN": rep(0.90, 0.91, 0.905, 0.91),
        "MLP": {"error": "TrainingError: diverged"},
        "SVM": rep(0.60, 0.60, 0.45, 0.60),
    },
    "multiclass": {
        "DT": rep(0.80, 0.81, 0.80, 0.82),
        "RF": rep(0.84, 0.84, 0.8409, 0.85),
        "KNN": rep(0.70, 0.70, 0.70, 0.71),
        "MLP": rep(0.84, 0.84, 0.8409, 0.86),
        "SVM": rep(0.30, 0.35, 0.31, 0.50),
    },
}


def test_model_table_matches_golden():
    assert report.render_model_table(REPORTS, 8) == (GOLDEN / "model_table_n8.md").read_text()


def test_best_model_ties_go_to_first_row():
    assert report.best_model(REPORTS["multiclass"]) == "RF"
    assert report.best_model(REPORTS["binary"]) == "RF"
    assert report.best_model({"MLP": {"error": "x"}}) is None


def test_pct():
    assert report.pct(0.9421) == "94.21"
    assert report.pct(1.0) == "100.00"
    assert report.pct(0.0) == "0.00"


def write(tmp_path, text):
    p = tmp_path / "b.csv"
    p.write_text(text)
    return p


HEADER = "method,task,n,precision,recall,f1,accuracy\n"


def test_comparison_table(tmp_path):
    rows = report.read_baselines(write(tmp_path, HEADER + "Base-A,binary,4,78.81,84.49,81.46,84.49\n"))
    out = report.render_comparison(4, {"binary": ("DT", REPORTS["binary"]["DT"])}, rows)
    lines = out.splitlines()
    assert lines[2].startswith("| Method | Binary Precision")
    assert lines[4] == "| Base-A | 78.81 | 84.49 | 81.46 | 84.49 | n/a | n/a | n/a | n/a |"
    assert lines[5] == "| Proposed autoencoder (DT) | 94.21 | 94.20 | 94.21 | 94.20 | n/a | n/a | n/a | n/a |"
    # other N values are left out
    assert "Base-A" not in report.render_comparison(8, {}, rows)


def test_missing_baselines_warns(tmp_path):
    with pytest.warns(UserWarning, match="not found"):
        assert report.read_baselines(tmp_path / "nope.csv") == []


@pytest.mark.parametrize(
    "body,line",
    [
        ("X,binary,4,1,2,3\n", 2),
        ("X,binary,4,1,2,3,4\nY,ternary,4,1,2,3,4\n", 3),
        ("X,binary,four,1,2,3,4\n", 2),
        ("X,binary,4,1,2,abc,4\n", 2),
    ],
)
def test_baselines_parse_errors_name_the_line(tmp_path, body, line):
    with pytest.raises(BaselinesParseError) as err:
        report.read_baselines(write(tmp_path, HEADER + body))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_baselines_bad_header(tmp_path):
    with pytest.raises(BaselinesParseError):
        report.read_baselines(write(tmp_path, "a,b,c\n"))


def test_shipped_baselines_parse():
    rows = report.read_baselines(Path(__file__).parents[1] / "configs" / "shap_baselines.csv")
    assert {r["n"] for r in rows} == {4, 8}
    assert any(r["method"] == "FNN-SHAP" and r["task"] == "multiclass" and r["f1"] == 78.81 for r in rows)
