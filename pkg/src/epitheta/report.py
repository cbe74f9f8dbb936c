"""Report records and canonical serialization.

Reports are deterministic for a fixed configuration and seed: keys are
sorted, no floats appear, and wall-clock data stays out of the payload
(it goes to the log stream instead).
"""

from __future__ import annotations

import json
import os
from typing import Optional


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def render_markdown(report: dict) -> str:
    lines = ["# epitheta report", ""]
    lines.append(f"- command: `{report.get('command')}`")
    lines.append(f"- seed: {report.get('seed')}")
    lines.append(f"- backend: {report.get('backend')}")
    lines.append(f"- verdict: **{report.get('verdict')}**")
    lines.append("")
    for section in report.get("sections", []):
        lines.append(f"## {section['name']}")
        lines.append("")
        checks = section.get("checks", [])
        if checks:
            lines.append("| check | anchor | status |")
            lines.append("|---|---|---|")
            for c in checks:
                lines.append(
                    f"| {c['name']} | {c['anchor']} | {c['status']} |"
                )
            lines.append("")
        for key, val in sorted(section.items()):
            if key in ("name", "checks"):
                continue
            lines.append(f"- {key}: `{canonical_json(val)}`")
        lines.append("")
    return "\n".join(lines)


def emit(report: dict, out: Optional[str], fmt: str) -> str:
    """Serialize the report; write it when a path is given.  The output
    directory can be overridden through EPITHETA_OUTDIR."""
    text = canonical_json(report) if fmt == "json" else render_markdown(report)
    if out:
        outdir = os.environ.get("EPITHETA_OUTDIR")
        if outdir:
            out = os.path.join(outdir, os.path.basename(out))
        os.makedirs(os.path.dirname(out) or ".", exist_ok=True)
        with open(out, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    return text


def summarize_checks(checks) -> str:
    bad = [c for c in checks if c.get("status") == "fail"]
    return "fail" if bad else "pass"
