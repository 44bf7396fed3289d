"""Span-level scoring under exact boundary+label matching."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from .dataset import LabeledSentence, Span
from .labels import label_order

# Below this many gold spans a score says little; reports carry a marker.
UNRELIABLE_SUPPORT = 20


@dataclass
class LabelMetrics:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @property
    def precision_fraction(self) -> float:
        denom = self.tp + self.fp
        return self.tp / denom if denom else 0.0

    @property
    def recall_fraction(self) -> float:
        denom = self.tp + self.fn
        return self.tp / denom if denom else 0.0

    @property
    def f1_fraction(self) -> float:
        p, r = self.precision_fraction, self.recall_fraction
        return 2 * p * r / (p + r) if p + r else 0.0

    @property
    def precision(self) -> float:
        return 100.0 * self.precision_fraction

    @property
    def recall(self) -> float:
        return 100.0 * self.recall_fraction

    @property
    def f1(self) -> float:
        return 100.0 * self.f1_fraction

    @property
    def no_support(self) -> bool:
        return self.support == 0

    @property
    def unreliable(self) -> bool:
        return self.support < UNRELIABLE_SUPPORT


@dataclass
class EvalReport:
    architecture: str
    part: str
    per_label: dict[str, LabelMetrics] = field(default_factory=dict)
    deltas: dict[str, float] | None = None

    def labels(self) -> list[str]:
        return sorted(self.per_label, key=lambda l: (label_order(l), l))

    def micro(self) -> LabelMetrics:
        total = LabelMetrics()
        for metrics in self.per_label.values():
            total.tp += metrics.tp
            total.fp += metrics.fp
            total.fn += metrics.fn
        return total


def score(
    gold: list[LabeledSentence],
    pred: list[list[Span]],
    architecture: str = "",
    part: str = "main",
    relaxed: bool = False,
) -> EvalReport:
    """Per-label precision/recall/F1 with exact (start, end, label) matching.

    pred[i] holds the predicted spans for gold[i]; the two lists must align.
    relaxed=True credits same-label boundary overlaps instead; it exists for
    error analysis only and is never used by the scored reports.
    """
    if len(gold) != len(pred):
        raise ValueError(
            f"gold and predictions are misaligned: {len(gold)} vs {len(pred)} sentences"
        )
    per_label: dict[str, LabelMetrics] = {}

    def metrics_for(label: str) -> LabelMetrics:
        return per_label.setdefault(label, LabelMetrics())

    for example, spans in zip(gold, pred):
        if relaxed:
            _tally_relaxed(example.spans, spans, metrics_for)
            continue
        gold_counts = Counter(Span(*s) for s in example.spans)
        pred_counts = Counter(Span(*s) for s in spans)
        for span, count in pred_counts.items():
            matched = min(count, gold_counts.get(span, 0))
            metrics_for(span.label).tp += matched
            metrics_for(span.label).fp += count - matched
        for span, count in gold_counts.items():
            matched = min(count, pred_counts.get(span, 0))
            metrics_for(span.label).fn += count - matched
    return EvalReport(architecture=architecture, part=part, per_label=per_label)


def _tally_relaxed(gold_spans, pred_spans, metrics_for) -> None:
    # Greedy left-to-right matching; each gold span credits one prediction.
    taken = [False] * len(gold_spans)
    for span in sorted(Span(*s) for s in pred_spans):
        hit = False
        for i, g in enumerate(gold_spans):
            if taken[i] or g.label != span.label:
                continue
            if span.start < g.end and g.start < span.end:
                taken[i] = True
                hit = True
                break
        if hit:
            metrics_for(span.label).tp += 1
        else:
            metrics_for(span.label).fp += 1
    for i, g in enumerate(gold_spans):
        if not taken[i]:
            metrics_for(g.label).fn += 1


def micro_f1(gold: list[LabeledSentence], pred: list[list[Span]]) -> float:
    """Corpus-level micro F1 fraction, used for early stopping."""
    return score(gold, pred).micro().f1_fraction


def compare_to_baseline(report: EvalReport, baseline: EvalReport) -> EvalReport:
    """Attach per-label F1 deltas (percentage points) against a baseline."""
    if report.part != baseline.part:
        raise ValueError(
            f"cannot compare parts {report.part!r} and {baseline.part!r}"
        )
    deltas = {}
    for label in set(report.per_label) | set(baseline.per_label):
        ours = report.per_label.get(label, LabelMetrics()).f1
        theirs = baseline.per_label.get(label, LabelMetrics()).f1
        deltas[label] = ours - theirs
    return EvalReport(
        architecture=report.architecture,
        part=report.part,
        per_label=report.per_label,
        deltas=deltas,
    )


def report_rows(report: EvalReport) -> list[dict]:
    rows = []
    for label in report.labels():
        m = report.per_label[label]
        rows.append(
            {
                "architecture": report.architecture,
                "part": report.part,
                "label": label,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "support": m.support,
                "delta_f1_vs_baseline": (
                    report.deltas.get(label) if report.deltas is not None else None
                ),
            }
        )
    return rows


def render(reports: list[EvalReport], out_dir: str | Path | None = None) -> tuple[pd.DataFrame, str]:
    """Emit the report CSV plus a plain-text grid of labels x architectures."""
    rows = [row for report in reports for row in report_rows(report)]
    frame = pd.DataFrame(
        rows,
        columns=[
            "architecture",
            "part",
            "label",
            "precision",
            "recall",
            "f1",
            "support",
            "delta_f1_vs_baseline",
        ],
    )
    grid = _text_grid(reports)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        frame.to_csv(out / "report.csv", index=False)
        (out / "report.txt").write_text(grid, encoding="utf-8")
    return frame, grid


def _text_grid(reports: list[EvalReport]) -> str:
    if not reports:
        return ""
    architectures = []
    for report in reports:
        if report.architecture not in architectures:
            architectures.append(report.architecture)
    labels: list[str] = []
    for report in reports:
        for label in report.labels():
            if label not in labels:
                labels.append(label)
    by_arch = {report.architecture: report for report in reports}
    label_width = max(len(l) for l in labels) + 2
    cell = "{:>7.2f}{:>7.2f}{:>7.2f}"
    header = " " * label_width + "".join(f"{arch:^21}" for arch in architectures)
    sub = " " * label_width + "".join(f"{'P':>7}{'R':>7}{'F1':>7}" for _ in architectures)
    lines = [header, sub]
    flagged = False
    for label in labels:
        row = []
        mark = " "
        for arch in architectures:
            metrics = by_arch[arch].per_label.get(label)
            if metrics is None:
                row.append(f"{'-':>7}{'-':>7}{'-':>7}")
            else:
                row.append(cell.format(metrics.precision, metrics.recall, metrics.f1))
                if metrics.unreliable:
                    mark = "*"
        if mark == "*":
            flagged = True
        lines.append(f"{label:<{label_width - 2}}{mark} " + "".join(row))
    if flagged:
        lines.append("* fewer than 20 gold spans in the test data; unreliable")
    return "\n".join(lines) + "\n"
