"""Report rendering: human-readable tables and stable-key JSON.

Identical inputs produce identical bytes except for the single
`generated_at` header field.  Set NO_COLOR (or pipe the output) to
suppress ANSI color.
"""

from __future__ import annotations

import json
import os
import sys
from datetime import datetime, timezone

from .traces import Status, VerdictReport, FeatureCoverageSummary
from .analysis import SlackSweepResult, UpgradeDiff
from .core import ReachabilitySummary

FORMAT_VERSION = 1


def _use_color(stream):
    if os.environ.get("NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


_COLORS = {Status.HOLDS: "\x1b[32m", Status.VIOLATED: "\x1b[31m",
           Status.NOT_ACTIVATED: "\x1b[33m"}


def _paint(text, status, color):
    if not color:
        return text
    return f"{_COLORS[status]}{text}\x1b[0m"


def _header(kind, extra=None):
    doc = {"format": FORMAT_VERSION, "report": kind,
           "generated_at": datetime.now(timezone.utc).isoformat()}
    if extra:
        doc.update(extra)
    return doc


def to_json(doc):
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# check / coverage


def verdict_report_doc(report: VerdictReport):
    doc = _header("check", {"model": report.model_name,
                            "trace_length": report.trace_length,
                            "counts": report.counts()})
    props = []
    for uid, v in report.verdicts.items():
        entry = {"id": uid, "kind": v.kind, "status": v.status.value,
                 "activations": v.activation_count}
        if v.timing_value is not None:
            entry["timing"] = v.timing_value
            entry["min_gap"] = v.min_gap
            entry["slack"] = v.slack
        if v.witness is not None:
            entry["witness"] = {"cycle": v.witness.cycle,
                                "command": v.witness.command,
                                "constraint": v.witness.constraint}
        props.append(entry)
    doc["properties"] = props
    return doc


def verdict_report_text(report: VerdictReport, stream=None):
    color = _use_color(stream or sys.stdout)
    counts = report.counts()
    lines = [f"model {report.model_name}: {len(report.verdicts)} unique "
             f"properties over {report.trace_length} commands",
             f"  holds={counts['HOLDS']} violated={counts['VIOLATED']} "
             f"not-activated={counts['NOT_ACTIVATED']}", ""]
    width = max((len(uid) for uid in report.verdicts), default=10)
    for uid, v in report.verdicts.items():
        status = _paint(f"{v.status.value:<13}", v.status, color)
        extra = ""
        if v.slack is not None:
            extra = f" min_gap={v.min_gap} slack={v.slack}"
        if v.witness is not None:
            extra += f" witness@{v.witness.cycle}: {v.witness.constraint}"
        lines.append(f"  {uid:<{width}} {status} act={v.activation_count}"
                     f"{extra}")
    return "\n".join(lines) + "\n"


def coverage_doc(summary: FeatureCoverageSummary):
    doc = _header("coverage")
    doc["unexercised_commands"] = list(summary.unexercised)
    doc["issued_by_command"] = summary.issued_by_kind
    doc["inactive_properties_by_command"] = {
        k: list(v) for k, v in summary.inactive_properties_by_kind.items()}
    doc["note"] = ("corpus-relative evidence only: a feature unexercised "
                   "by this corpus is not proven unsupported")
    return doc


def coverage_text(summary: FeatureCoverageSummary):
    lines = ["feature coverage (corpus-relative, not a proof):"]
    if summary.unexercised:
        lines.append("  unexercised command kinds: "
                     + ", ".join(summary.unexercised))
    else:
        lines.append("  every command kind exercised")
    for kind, total in summary.issued_by_kind.items():
        lines.append(f"  {kind:<8} issued={total}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sweep


def sweep_doc(result: SlackSweepResult):
    doc = _header("sweep", {"k_max": result.k_max})
    doc["note"] = ("observed lower bounds only; the corpus cannot prove "
                   "that minimum-distance issuing is ever achieved")
    doc["entries"] = [
        {"id": e.unique_id, "timing": e.base_timing,
         "max_surviving_increment": e.max_surviving_increment,
         "activations": e.activation_count,
         "min_gap": e.min_observed_gap,
         "candidate_overestimation": e.candidate_overestimation,
         "utilization": str(e.utilization) if e.utilization else None,
         "note": e.note}
        for e in result.entries]
    doc["excluded_not_activated"] = list(result.excluded_not_activated)
    doc["unconstrained"] = list(result.unconstrained)
    return doc


def sweep_text(result: SlackSweepResult):
    lines = ["timing slack sweep (observed lower bounds only; the corpus "
             "cannot prove that minimum-distance issuing is ever achieved)",
             f"  k_max={result.k_max}  "
             f"survivors@1={len(result.survivors_at(1))}  "
             f"candidates={len(result.candidates())}"]
    for e in result.entries:
        flag = " CANDIDATE" if e.candidate_overestimation else ""
        lines.append(
            f"  {e.unique_id:<40} t={e.base_timing:<4} "
            f"min_gap={e.min_observed_gap:<5} k={e.max_surviving_increment}"
            f"{flag}")
        if e.note:
            lines.append(f"      {e.note}")
    if result.unconstrained:
        lines.append("  unconstrained by corpus: "
                     + ", ".join(result.unconstrained))
    if result.excluded_not_activated:
        lines.append("  excluded (not activated): "
                     + ", ".join(result.excluded_not_activated))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# diff


def diff_doc(diff: UpgradeDiff):
    doc = _header("diff")

    def entries(items):
        return [{"key": list(map(str, e.key)), "base": e.base_id,
                 "target": e.target_id, "base_timing": e.base_timing,
                 "target_timing": e.target_timing} for e in items]

    doc["matched_unchanged"] = entries(diff.unchanged)
    doc["matched_timing_changed"] = entries(diff.timing_changed)
    doc["added_in_target"] = entries(diff.added_in_target)
    doc["removed_from_target"] = entries(diff.removed_from_target)
    doc["discarded_by_feature_filter"] = entries(diff.discarded)
    return doc


def diff_text(diff: UpgradeDiff):
    lines = ["property-set diff:"]
    sections = [
        ("unchanged", diff.unchanged),
        ("timing changed", diff.timing_changed),
        ("added in target", diff.added_in_target),
        ("removed from target", diff.removed_from_target),
        ("discarded (unsupported features)", diff.discarded),
    ]
    for label, items in sections:
        lines.append(f"  {label}: {len(items)}")
        for e in items:
            name = e.target_id or e.base_id
            detail = ""
            if label == "timing changed":
                detail = f"  {e.base_timing} -> {e.target_timing}"
            lines.append(f"    {name}{detail}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# explore


def explore_doc(summary: ReachabilitySummary):
    doc = _header("explore", {"horizon": summary.horizon,
                              "complete": summary.complete,
                              "explored_states": summary.explored_states})
    doc["reachable"] = {k: bool(v)
                        for k, v in sorted(summary.reachable.items())}
    doc["witnesses"] = {
        k: [str(c) for c in w]
        for k, w in sorted(summary.witnesses.items())}
    return doc


def explore_text(summary: ReachabilitySummary):
    lines = [f"reachability within {summary.horizon} cycles "
             f"({summary.explored_states} states"
             + (", bound exceeded, partial" if not summary.complete else "")
             + "):"]
    for kind in sorted(summary.reachable):
        ok = summary.reachable[kind]
        lines.append(f"  {kind:<8} {'reachable' if ok else 'UNREACHABLE'}")
    return "\n".join(lines) + "\n"
