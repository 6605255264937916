"""Deterministic reports: one structure, text and JSON renderings.

Both renderings carry the same numeric values.  Probabilities are printed
with 12 decimal digits in text; values below 1e-14 are reported as 0 in
both formats to keep reports stable against float noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .decoherence import DecoherenceReport

PRINT_FLOOR = 1e-14

# Gram matrices are embedded in reports only up to this many histories.
GRAM_REPORT_CAP = 64


def clean_probability(p: float) -> float:
    p = min(max(float(p), 0.0), 1.0)
    return 0.0 if p < PRINT_FLOOR else p


def fmt_probability(p: float) -> str:
    return f"{clean_probability(p):.12f}"


def fmt_value(v: float) -> str:
    return f"{float(v):.12g}"


@dataclass
class Report:
    """Echo of the command plus verdicts, scalars, and probability tables."""

    command: str
    tolerances: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    scalars: dict = field(default_factory=dict)
    tables: list = field(default_factory=list)  # (title, [(label, prob), ...])
    gram: dict | None = None
    notes: list = field(default_factory=list)
    error: str | None = None
    exit_status: int = 0
    # When set, rendered verbatim instead of the report (scenario dumps).
    raw_output: str | None = None

    def add_table(self, title: str, rows) -> None:
        self.tables.append((title, [(str(k), float(v)) for k, v in rows]))

    def attach_decoherence(self, rep: DecoherenceReport, prefix: str = "") -> None:
        tag = f"{prefix}." if prefix else ""
        self.verdicts[f"{tag}decoherent"] = bool(rep.decoherent)
        self.scalars[f"{tag}max_offdiag_normalized"] = float(rep.max_offdiag_normalized)
        self.tolerances.setdefault("tol_dec", float(rep.tol_used))
        self.add_table(
            f"{prefix} probabilities".strip(),
            zip(rep.labels, (clean_probability(p) for p in rep.probabilities)),
        )
        if len(rep.histories) <= GRAM_REPORT_CAP:
            self.gram = {
                "labels": list(rep.labels),
                "matrix": [
                    [[_round_zero(z.real), _round_zero(z.imag)] for z in row]
                    for row in np.asarray(rep.gram)
                ],
            }
        else:
            self.notes.append(
                f"gram matrix omitted ({len(rep.histories)} histories > {GRAM_REPORT_CAP})"
            )

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "tolerances": self.tolerances,
            "verdicts": self.verdicts,
            "scalars": {k: float(v) for k, v in self.scalars.items()},
            "tables": [
                {"title": t, "rows": [[k, clean_probability(v)] for k, v in rows]}
                for t, rows in self.tables
            ],
            "gram": self.gram,
            "notes": self.notes,
            "error": self.error,
            "exit_status": self.exit_status,
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        for k in sorted(self.tolerances):
            lines.append(f"tolerance {k} = {fmt_value(self.tolerances[k])}")
        for k in sorted(self.verdicts):
            lines.append(f"verdict {k}: {self.verdicts[k]}")
        for k in sorted(self.scalars):
            lines.append(f"{k} = {fmt_value(self.scalars[k])}")
        for title, rows in self.tables:
            lines.append(f"{title}:")
            width = max((len(k) for k, _ in rows), default=0)
            for k, v in rows:
                lines.append(f"  {k.ljust(width)}  {fmt_probability(v)}")
        if self.gram is not None:
            lines.append(f"gram ({len(self.gram['labels'])} histories):")
            for label, row in zip(self.gram["labels"], self.gram["matrix"]):
                cells = " ".join(f"{re:+.6e}{im:+.6e}j" for re, im in row)
                lines.append(f"  {label}: {cells}")
        for n in self.notes:
            lines.append(f"note: {n}")
        if self.error:
            lines.append(f"error: {self.error}")
        lines.append(f"exit: {self.exit_status}")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        return self.to_json() + "\n" if fmt == "json" else self.to_text()


def _round_zero(x: float) -> float:
    x = float(x)
    return 0.0 if abs(x) < PRINT_FLOOR else x
