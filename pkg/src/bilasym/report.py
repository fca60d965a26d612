"""Tabular report layouts and CSV/JSON emission."""

from __future__ import annotations

import csv
import io
import json
import math

from .stats import UitResult, stars


def format_p(p: float) -> str:
    """Short p-value with its significance stars, e.g. ``0.0004(***)``."""
    if p is None or not p == p:
        return "nan"
    text = f"{p:.2e}" if 0 < p < 1e-4 else f"{p:.2g}"
    mark = stars(p)
    return f"{text}({mark})" if mark else text


def _num(x, digits=2):
    if x is None:
        return ""
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}f}"


def summary_layout(rows: list[dict], labels: tuple[str, str]) -> tuple[list[str], list[list[str]]]:
    """One line per (frame, score, method) with group 2 listed before group 1."""
    g1, g2 = labels
    header = ["frame", "score", "method", f"{g2}_mean", f"{g2}_sd", f"{g1}_mean", f"{g1}_sd", "statistic", "p_value"]
    body = []
    for r in rows:
        body.append(
            [
                r["frame"],
                r["score"],
                r["method"],
                _num(r["mean2"]),
                _num(r["sd2"]),
                _num(r["mean1"]),
                _num(r["sd1"]),
                _num(r["statistic"]),
                format_p(r["p_value"]),
            ]
        )
    return header, body


def pvalue_layout(rows: list[dict]) -> tuple[list[str], list[list[str]]]:
    """Scores down the side, frames across the top, p-values with stars in the cells."""
    frames: list[str] = []
    scores: list[tuple[str, str]] = []
    cell: dict[tuple[str, str, str], float] = {}
    for r in rows:
        if r["frame"] not in frames:
            frames.append(r["frame"])
        key = (r["score"], r["method"])
        if key not in scores:
            scores.append(key)
        cell[(r["score"], r["method"], r["frame"])] = r["p_value"]
    header = ["score", "method"] + [f or "frame" for f in frames]
    body = [
        [s, m] + [format_p(cell[(s, m, f)]) if (s, m, f) in cell else "" for f in frames] for s, m in scores
    ]
    return header, body


def uit_rows(res: UitResult, index_map) -> list[dict]:
    rows = []
    for j, lab in enumerate(index_map):
        rows.append(
            {
                "j": j + 1,
                "feature": lab.describe(),
                "mean_difference": float(res.mean_difference[j]),
                "v": float(res.v[j]),
                "lower_bound": float(res.lower_bounds[j]),
                "selected": j in res.selected,
            }
        )
    return rows


def uit_summary(res: UitResult, index_map) -> dict:
    return {
        "V": res.V,
        "V_crit": res.V_crit,
        "alpha": res.alpha,
        "B": res.B,
        "seed": res.seed,
        "resampling": res.scheme,
        "p_value": res.p_value,
        "selected": [index_map[j].describe() for j in res.selected],
        "selected_landmarks": sorted({i + 1 for j in res.selected for i in index_map[j].landmarks}),
    }


def to_csv(header: list[str], body: list[list], comments: list[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in body:
        w.writerow([_cell(x) for x in row])
    return buf.getvalue()


def _cell(x):
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else x


def dicts_to_csv(rows: list[dict], comments: list[str] = ()) -> str:
    if not rows:
        return ""
    header = list(rows[0])
    return to_csv(header, [[r[k] for k in header] for r in rows], comments)


def to_json(obj) -> str:
    return json.dumps(obj, indent=1, default=_json_default) + "\n"


def _json_default(x):
    if hasattr(x, "tolist"):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")
