"""Markdown tables and the baselines file.

Model tables list DT, RF, KNN, MLP, SVM against Precision / Recall /
F1-score / Accuracy per task, values in percent with two decimals; the best
row of each task (highest F1, first row on ties) is shown in bold.
"""

from __future__ import annotations

import csv
import math
import warnings
from pathlib import Path

from .errors import BaselinesParseError

MODEL_ORDER = ("DT", "RF", "KNN", "MLP", "SVM")
TASKS = ("binary", "multiclass")
TASK_TITLES = {"binary": "Binary", "multiclass": "Multi-class"}
METRICS = ("precision", "recall", "f1", "accuracy")
METRIC_TITLES = {"precision": "Precision", "recall": "Recall", "f1": "F1-score", "accuracy": "Accuracy"}
BASELINE_COLUMNS = ("method", "task", "n", "precision", "recall", "f1", "accuracy")


def pct(x: float) -> str:
    return f"{100.0 * x:.2f}"


def best_model(reports: dict, metric: str = "f1"):
    """Model name with the highest ``metric``; earlier rows win ties."""
    best, best_val = None, -math.inf
    for name in MODEL_ORDER:
        rep = reports.get(name)
        if rep is None or "error" in rep:
            continue
        if rep[metric] > best_val:
            best, best_val = name, rep[metric]
    return best


def _header(tasks) -> list:
    cols = ["Model"]
    for task in tasks:
        cols += [f"{TASK_TITLES[task]} {METRIC_TITLES[m]}" for m in METRICS]
    return [
        "| " + " | ".join(cols) + " |",
        "|" + "|".join([":--"] + ["--:"] * (len(cols) - 1)) + "|",
    ]


def render_model_table(reports_by_task: dict, n: int, metric: str = "f1") -> str:
    """``reports_by_task[task][model]`` is a report dict, an ``{"error": ...}``
    dict, or absent."""
    tasks = [t for t in TASKS if t in reports_by_task]
    best = {t: best_model(reports_by_task[t], metric) for t in tasks}
    models = [m for m in MODEL_ORDER if any(m in reports_by_task[t] for t in tasks)]
    lines = [f"### Autoencoder with N={n} extracted features", ""] + _header(tasks)
    for model in models:
        cells = [model]
        for task in tasks:
            rep = reports_by_task[task].get(model)
            if rep is None:
                cells += ["n/a"] * 4
            elif "error" in rep:
                cells += ["error"] * 4
            else:
                vals = [pct(rep[m]) for m in METRICS]
                if best[task] == model:
                    vals = [f"**{v}**" for v in vals]
                cells += vals
        lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def render_comparison(n: int, proposed: dict, baselines: list) -> str:
    """``proposed[task]`` = ``(model_name, report_dict)``; ``baselines`` are
    rows from :func:`read_baselines` (values already in percent)."""
    tasks = list(TASKS)
    lines = [f"### Comparison with N={n} extracted features", ""]
    lines += _header(tasks)
    lines[2] = lines[2].replace("| Model |", "| Method |", 1)
    methods = []
    for row in baselines:
        if row["n"] == n and row["method"] not in methods:
            methods.append(row["method"])
    for method in methods:
        cells = [method]
        for task in tasks:
            match = [r for r in baselines if r["method"] == method and r["task"] == task and r["n"] == n]
            cells += [f"{match[0][m]:.2f}" for m in METRICS] if match else ["n/a"] * 4
        lines.append("| " + " | ".join(cells) + " |")
    used = "/".join(proposed[t][0] for t in tasks if t in proposed and proposed[t][0])
    cells = [f"Proposed autoencoder ({used})" if used else "Proposed autoencoder"]
    for task in tasks:
        if task in proposed and proposed[task][1] is not None:
            cells += [pct(proposed[task][1][m]) for m in METRICS]
        else:
            cells += ["n/a"] * 4
    lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"


def read_baselines(path) -> list:
    """Parse the baselines CSV; a missing file yields ``[]`` and a warning.

    Columns: method, task, n, precision, recall, f1, accuracy. Metric values
    are percentages as printed in published tables.
    """
    if path is None or not Path(path).is_file():
        warnings.warn(f"baselines file not found ({path}); comparison shows proposed rows only", stacklevel=2)
        return []
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return []
        header = [h.strip().lower() for h in header]
        if tuple(header) != BASELINE_COLUMNS:
            raise BaselinesParseError(1, f"expected header {','.join(BASELINE_COLUMNS)}")
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(BASELINE_COLUMNS):
                raise BaselinesParseError(line, f"expected {len(BASELINE_COLUMNS)} fields, got {len(row)}")
            method, task, n, *vals = (c.strip() for c in row)
            if task not in TASKS:
                raise BaselinesParseError(line, f"task must be binary or multiclass, got {task!r}")
            try:
                n = int(n)
                nums = [float(v) for v in vals]
            except ValueError as exc:
                raise BaselinesParseError(line, str(exc)) from None
            if not method:
                raise BaselinesParseError(line, "empty method name")
            rows.append({"method": method, "task": task, "n": n, **dict(zip(METRICS, nums))})
    return rows
