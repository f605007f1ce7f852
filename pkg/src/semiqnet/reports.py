"""Deterministic experiment reports.

One experiment renders to one structured text document with the sections
``meta``, ``keys``, ``detection``, and ``confidentiality``: section headers
in brackets, ``key = value`` lines in meta, and space-separated
``key=value`` tokens per row elsewhere.  Identical configuration and seed
produce byte-identical documents; wall-clock metadata lives in a separate
sidecar block so it never perturbs the payload.  Tradeoff curves render to
flat CSV.
"""

from __future__ import annotations

import csv
import io
from typing import Iterable, Mapping, Sequence


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    if value is None:
        return "-"
    return str(value)


def render_row(fields: Mapping[str, object]) -> str:
    return " ".join(f"{k}={format_value(v)}" for k, v in fields.items())


def render_report(
    meta: Mapping[str, object],
    keys: Sequence[Mapping[str, object]],
    detection: Sequence[Mapping[str, object]],
    confidentiality: Sequence[Mapping[str, object]],
    extra_sections: Mapping[str, Sequence[str]] | None = None,
) -> str:
    lines = ["[meta]"]
    lines.extend(f"{k} = {format_value(v)}" for k, v in meta.items())
    for name, rows in (
        ("keys", keys),
        ("detection", detection),
        ("confidentiality", confidentiality),
    ):
        lines.append("")
        lines.append(f"[{name}]")
        lines.extend(render_row(row) for row in rows)
    if extra_sections:
        for name, raw_lines in extra_sections.items():
            lines.append("")
            lines.append(f"[{name}]")
            lines.extend(raw_lines)
    return "\n".join(lines) + "\n"


CURVE_COLUMNS = ("parameter", "detection_exact", "detection_sampled", "se", "eve_accuracy")


def curve_csv(points: Iterable) -> str:
    """CSV for tradeoff-curve points (see analysis.CurvePoint)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for p in points:
        writer.writerow(
            [
                format_value(p.parameter),
                format_value(p.detection_exact),
                format_value(p.detection_sampled) if p.detection_sampled is not None else "",
                format_value(p.stderr) if p.stderr is not None else "",
                format_value(p.eve_accuracy),
            ]
        )
    return buf.getvalue()


def amplitude_listing(state, owners: Sequence[str]) -> list[str]:
    """Index tuple -> complex value rows for a synthesized resource state."""
    lines = [f"subsystems: {','.join(owners)}  dims: {format_value(list(state.dims))}"]
    for flat, amp in enumerate(state.amps):
        if abs(amp) <= 1e-12:
            continue
        digits = state.digits_of(flat)
        lines.append(
            f"|{','.join(str(d) for d in digits)}>  "
            f"{format_value(float(amp.real))}{'+' if amp.imag >= 0 else '-'}{format_value(abs(float(amp.imag)))}j"
        )
    return lines
