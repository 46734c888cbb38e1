"""File formats: record JSON, census/trace/trajectory CSV and SVG panels.

Every float is written with 17 significant digits so that output is
byte-identical across runs and loads back to the same doubles.
"""
from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError
from .model import (PAIR_NAMES, DistanceVector, DziobekScalars, PlanarConfiguration, ResidualReport,
                    SolutionRecord)

FORMAT_NAME = "fourvortex.records"
FORMAT_VERSION = 1


def fmt(v) -> str:
    """A float as decimal text with 17 significant digits."""
    v = float(v) + 0.0  # drops the sign of -0.0, which JSON would read back as an integer
    if not math.isfinite(v):
        raise DomainError(f"cannot serialize non-finite value {v}")
    return format(v, ".17g")


# JSON -------------------------------------------------------------------------

def _dump(obj, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_dump(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(_dump(v) for v in seq) + "]"
        return "[\n" + ",\n".join(inner + _dump(v, indent + 1) for v in seq) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def record_to_dict(rec: SolutionRecord) -> dict:
    pos = rec.positions
    return {
        "m": rec.m,
        "strengths": list(rec.strengths),
        "family": rec.family,
        "shape": rec.shape,
        "symmetry": rec.symmetry,
        "label_multiplicity": rec.label_multiplicity,
        "distances": rec.distances.as_dict(),
        "positions": {
            "positions": pos.positions.tolist(),
            "center": None if pos.center is None else pos.center.tolist(),
            "angular_velocity": pos.angular_velocity,
        },
        "scalars": {
            "lambda_prime": rec.scalars.lambda_prime,
            "sigma": rec.scalars.sigma,
            "areas": list(rec.scalars.areas),
        },
        "residuals": {g: list(getattr(rec.residuals, g)) for g in ResidualReport.GROUPS},
        "flags": list(rec.flags),
        "audit": list(rec.audit),
    }


def record_from_dict(d: dict) -> SolutionRecord:
    try:
        p = d["positions"]
        sc = d["scalars"]
        return SolutionRecord(
            m=None if d["m"] is None else float(d["m"]),
            distances=DistanceVector(tuple(float(d["distances"][k]) for k in PAIR_NAMES)),
            positions=PlanarConfiguration(np.array(p["positions"], dtype=float), p["center"],
                                          None if p["angular_velocity"] is None else float(p["angular_velocity"])),
            scalars=DziobekScalars(sc["lambda_prime"], sc["sigma"], tuple(float(v) for v in sc["areas"])),
            shape=d["shape"], symmetry=d["symmetry"],
            residuals=ResidualReport(**{g: tuple(d["residuals"].get(g, ())) for g in ResidualReport.GROUPS}),
            label_multiplicity=int(d["label_multiplicity"]),
            strengths=tuple(float(g) for g in d["strengths"]),
            family=d.get("family", ""), flags=tuple(d.get("flags", ())), audit=tuple(d.get("audit", ())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed record: {exc}") from exc


def records_to_json(records: Sequence[SolutionRecord], meta: dict | None = None) -> str:
    doc = {"format": FORMAT_NAME, "version": FORMAT_VERSION}
    doc.update(meta or {})
    doc["records"] = [record_to_dict(r) for r in records]
    return _dump(doc) + "\n"


def records_from_json(text: str) -> list[SolutionRecord]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and doc.get("format") == FORMAT_NAME:
        items = doc.get("records", [])
    elif isinstance(doc, list):
        items = doc
    else:
        raise DomainError("JSON document holds no records")
    return [record_from_dict(d) for d in items]


# CSV --------------------------------------------------------------------------

def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def census_csv(rows, class_keys: Sequence[str] | None = None) -> str:
    """One line per m; class columns are the sorted union of table and observed keys."""
    from .census import TABLE
    keys = set(class_keys or ())
    for t in TABLE.values():
        keys |= set(t)
    for r in rows:
        keys |= set(r.counts)
    keys = sorted(keys)
    header = ["m", *keys, "total", "expected_total", "match", "flags"]
    out = []
    for r in rows:
        exp = "" if r.expected is None else sum(r.expected.values())
        out.append([float(r.m), *(r.counts.get(k, 0) for k in keys), r.total, exp,
                    "true" if r.match else "false", ";".join(r.flags)])
    return _csv(header, out)


def trace_csv(m_grid, columns: dict[str, np.ndarray]) -> str:
    names = list(columns)
    rows = []
    for k, m in enumerate(m_grid):
        rows.append([float(m), *(float(columns[n][k]) if np.isfinite(columns[n][k]) else "" for n in names)])
    return _csv(["m", *names], rows)


def trajectory_csv(traj) -> str:
    n = traj.states.shape[1]
    header = ["t", *(f"x{i + 1}{ax}" for i in range(n) for ax in "xy"), "H", "I", "Mx", "My"]
    inv = traj.invariant_series
    rows = []
    for k, t in enumerate(traj.times):
        rows.append([float(t), *map(float, traj.states[k].ravel()), float(inv["H"][k]), float(inv["I"][k]),
                     float(inv["M"][k][0]), float(inv["M"][k][1])])
    return _csv(header, rows)


# SVG --------------------------------------------------------------------------

RED, GREEN = "#d62728", "#2ca02c"
PANEL = 220
RADIUS = 80.0


def normalized(positions: np.ndarray) -> np.ndarray:
    """Centroid at the origin and the farthest vortex at unit distance."""
    x = np.asarray(positions, dtype=float)
    x = x - x.mean(axis=0)
    r = float(np.max(np.linalg.norm(x, axis=1)))
    return x / r if r > 0 else x


def _label(rec: SolutionRecord) -> str:
    lp = rec.lambda_prime
    sign = "0" if lp == 0 else ("?" if lp is None else ("+" if lp > 0 else "-"))
    m = "" if rec.m is None else f"m={rec.m:.6g} "
    return f"{m}lambda' {sign} {rec.shape_kind}/{rec.symmetry}"


def render_svg(records: Sequence[SolutionRecord], columns: int = 4) -> str:
    """A grid of panels; strength 1 vortices red, the others green."""
    if not records:
        raise DomainError("nothing to render")
    cols = min(columns, len(records))
    rows = -(-len(records) // cols)
    w, h = cols * PANEL, rows * PANEL
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
             f'<rect width="{w}" height="{h}" fill="white"/>']
    for k, rec in enumerate(records):
        ox, oy = (k % cols) * PANEL + PANEL / 2, (k // cols) * PANEL + PANEL / 2 - 8
        parts.append(f'<circle cx="{ox:.3f}" cy="{oy:.3f}" r="{RADIUS:.3f}" fill="none" '
                     f'stroke="#bbbbbb" stroke-dasharray="3,3"/>')
        pts = normalized(rec.positions.positions)
        for i, (p, g) in enumerate(zip(pts, rec.strengths)):
            cx, cy = ox + RADIUS * p[0], oy - RADIUS * p[1]
            color = RED if g == 1.0 else GREEN
            parts.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="7.000" fill="{color}"/>')
            parts.append(f'<text x="{cx + 9:.3f}" y="{cy - 9:.3f}" font-size="11" '
                         f'font-family="sans-serif">{i + 1}</text>')
        parts.append(f'<text x="{ox:.3f}" y="{oy + RADIUS + 26:.3f}" font-size="11" text-anchor="middle" '
                     f'font-family="sans-serif">{_label(rec)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
