"""Report files and phase persistence.

``results.csv`` is a pure function of the experiment (no wall times), so a
replay with the same config reproduces it byte for byte. Timings live in
``ranking.csv`` and ``manifest.json``.
"""
from __future__ import annotations

import csv
import json
import platform
import re
from dataclasses import asdict
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from .harness import PhaseResult, Report, Audit
from .metrics import ConfusionMatrix, MetricsRow, pr_curve, roc_auc, write_curve
from .results import ResultRow

RESULT_COLUMNS = ("test_run", "classifier", "tp", "fp", "fn", "tn", "accuracy", "f1", "auc", "cost", "seed")
RANKING_COLUMNS = (
    "rank", "f1_rank", "phase", "test_run", "classifier", "stack_id", "tp", "fp", "fn", "tn",
    "accuracy", "precision", "recall", "fpr", "f1", "auc", "cost", "wall_time", "seed", "diagnostic",
)


def _fmt(v):
    if v is None:
        return "NA"
    if isinstance(v, float):
        return repr(float(v))
    return str(v)


def _cells(row: ResultRow):
    cm = row.cm.as_tuple() if row.cm is not None else (None,) * 4
    return dict(zip(("tp", "fp", "fn", "tn"), cm))


def result_record(row: ResultRow) -> dict:
    rec = {"test_run": row.test_run, "classifier": row.classifier, **_cells(row)}
    for k in ("accuracy", "f1", "auc", "cost"):
        rec[k] = row.metric(k)
    rec["seed"] = row.seed
    return rec


def write_results_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS)
        for r in rows:
            rec = result_record(r)
            w.writerow([_fmt(rec[c]) for c in RESULT_COLUMNS])
    return path


def read_results_csv(path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_ranking_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RANKING_COLUMNS)
        for i, r in enumerate(rows, 1):
            rec = {
                "rank": i, "f1_rank": r.f1_rank, "phase": r.phase, "test_run": r.test_run,
                "classifier": r.classifier, "stack_id": r.stack_id, **_cells(r),
                "wall_time": round(r.wall_time, 6), "seed": r.seed, "diagnostic": r.diagnostic,
            }
            for k in ("accuracy", "precision", "recall", "fpr", "f1", "auc", "cost"):
                rec[k] = r.metric(k)
            w.writerow([_fmt(rec[c]) for c in RANKING_COLUMNS])
    return path


# ------------------------------------------------------------------ summary


def _num(v, digits):
    return "NA" if v is None else f"{v:.{digits}f}"


def render_row(row: ResultRow) -> str:
    """One table line: counts, 4-decimal accuracy and F1, 2-decimal AUC."""
    c = _cells(row)
    counts = " ".join(f"{_fmt(c[k]):>7}" for k in ("tp", "fp", "fn", "tn"))
    return (
        f"{row.test_run:<16} {row.classifier:<13} {counts} "
        f"{_num(row.metric('accuracy'), 4):>8} {_num(row.metric('f1'), 4):>8} {_num(row.metric('auc'), 2):>5}"
    )


_HEADER = (
    f"{'Test Run':<16} {'Classifier':<13} {'TP':>7} {'FP':>7} {'FN':>7} {'TN':>7} "
    f"{'Accuracy':>8} {'F1':>8} {'AUC':>5}"
)


def summary_text(report: Report) -> str:
    lines = []

    def table(title, rows):
        lines.extend(["", title, _HEADER, "-" * len(_HEADER)])
        lines.extend(render_row(r) for r in rows)

    lines.append("Stacks")
    for s in report.level1.notes.get("stacks", []):
        lines.append(f"  #{s['stack_id']} ({s['metric']}, {s['role']}): {' / '.join(s['members'])}")
    lines.append("")
    lines.append("Meta learner beats both constituents (AUC)")
    for imp in report.improvements:
        cons = ", ".join(_num(a, 4) for a in imp.constituent_aucs)
        lines.append(
            f"  #{imp.stack_id}: {'yes' if imp.improved else 'no '}  best meta "
            f"{imp.best_meta or 'NA'} {_num(imp.best_meta_auc, 4)} vs constituents {cons}"
        )
    n_improved = sum(i.improved for i in report.improvements)
    lines.append(f"  improved {n_improved} of {len(report.improvements)} stacks")

    f1_order = sorted(report.rows, key=lambda r: r.f1_rank)
    table("Level-0 by F1", [r for r in f1_order if r.phase == "level0"])
    table("Level-1 by F1", [r for r in f1_order if r.phase != "level0"])
    table("Combined by AUC", report.rows)
    na = [r for r in report.rows if r.is_na]
    if na:
        lines.append("")
        lines.append("Failed cells")
        lines.extend(f"  {r.name}: {r.diagnostic}" for r in na)
    return "\n".join(lines).lstrip("\n") + "\n"


# ------------------------------------------------------------------- curves


def _slug(text):
    return re.sub(r"[^A-Za-z0-9.+-]+", "_", text)


def write_curves(phase: PhaseResult, out_dir) -> list:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    y = phase.eval_labels
    for (run, name), scores in sorted(phase.scores.items()):
        stem = _slug(f"{run}_{name}")
        if 0 < y.sum() < len(y):
            written.append(write_curve(roc_auc(scores, y)[0], out_dir / f"roc_{stem}.csv", simplify=True))
        if y.sum() > 0:
            written.append(write_curve(pr_curve(scores, y), out_dir / f"pr_{stem}.csv", simplify=True))
    return written


# ----------------------------------------------------------------- manifest


def _versions():
    out = {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__}
    try:
        out["imbstack"] = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        out["imbstack"] = "unknown"
    return out


def manifest(report: Report) -> dict:
    audits = report.level0.audits + report.level1.audits
    return {
        "config": report.config.to_dict(),
        "seed": report.config.seed,
        "versions": _versions(),
        "counts": {
            "level0": len(report.level0.rows),
            "level1": len(report.level1.rows),
            "combined": len(report.rows),
            "na": sum(r.is_na for r in report.rows),
        },
        "phases": {"level0": report.level0.notes, "level1": report.level1.notes},
        "wall_times": {r.name: r.wall_time for r in report.rows},
        "seeds": {r.name: r.seed for r in report.rows},
        "improvements": [asdict(i) for i in report.improvements],
        "leakage_audit": {
            "fits": len(audits),
            "max_overlap": max((a.overlap for a in audits), default=0),
        },
    }


def emit_report(report: Report, out_dir) -> dict:
    """Write every report file under ``out_dir``; returns name -> path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "results": write_results_csv(report.rows, out / "results.csv"),
        "ranking": write_ranking_csv(report.rows, out / "ranking.csv"),
    }
    summary = out / "summary.txt"
    summary.write_text(summary_text(report))
    files["summary"] = summary
    curves = write_curves(report.level0, out / "curves") + write_curves(report.level1, out / "curves")
    man = manifest(report)
    man["files"] = sorted(str(p.relative_to(out)) for p in list(files.values()) + curves)
    path = out / "manifest.json"
    path.write_text(json.dumps(man, indent=2, sort_keys=True, default=str) + "\n")
    files["manifest"] = path
    return files


# ---------------------------------------------------------- phase save/load


def _row_to_dict(r: ResultRow) -> dict:
    d = asdict(r)
    d["cm"] = None if r.cm is None else list(r.cm.as_tuple())
    d["metrics"] = None if r.metrics is None else asdict(r.metrics)
    return d


def _row_from_dict(d: dict) -> ResultRow:
    d = dict(d)
    d["cm"] = None if d["cm"] is None else ConfusionMatrix(*d["cm"])
    d["metrics"] = None if d["metrics"] is None else MetricsRow(**d["metrics"])
    return ResultRow(**d)


def save_phase(phase: PhaseResult, out_dir, name: str):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = {
        "rows": [_row_to_dict(r) for r in phase.rows],
        "audits": [asdict(a) for a in phase.audits],
        "notes": phase.notes,
        "score_keys": [list(k) for k in phase.scores],
    }
    (out / f"{name}.json").write_text(json.dumps(doc, sort_keys=True, default=str))
    arrays = {f"s{i}": v for i, v in enumerate(phase.scores.values())}
    arrays["eval_labels"] = phase.eval_labels
    arrays["eval_ids"] = phase.eval_ids
    if phase.eval_amounts is not None:
        arrays["eval_amounts"] = phase.eval_amounts
    np.savez(out / f"{name}_scores.npz", **arrays)


def load_phase(out_dir, name: str) -> PhaseResult:
    out = Path(out_dir)
    doc = json.loads((out / f"{name}.json").read_text())
    with np.load(out / f"{name}_scores.npz") as z:
        scores = {tuple(k): z[f"s{i}"] for i, k in enumerate(doc["score_keys"])}
        labels = z["eval_labels"]
        ids = z["eval_ids"]
        amounts = z["eval_amounts"] if "eval_amounts" in z.files else None
    rows = [_row_from_dict(d) for d in doc["rows"]]
    audits = [Audit(**a) for a in doc["audits"]]
    return PhaseResult(rows, scores, labels, amounts, ids, audits, doc["notes"])
