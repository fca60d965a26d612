"""Command-line interface.

    bilasym simulate --output raw.json --pairs 11 --solos 2 --layout smile --shift 16=0.2
    bilasym register --input raw.json --output reg.json --mode basis
    bilasym features --input reg.json --output features.csv
    bilasym score    --input reg.json --score l1 --score l2 --weights adaptive --output scores.csv
    bilasym test     --input reg.json --score star-l1 --method pooled-t --sided one
    bilasym select   --input reg.json --boot-reps 10000 --alpha 0.05 --seed 1
    bilasym plot     --input scores.csv --output scores.svg
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import SMILE_SCHEME, feature_labels, sequential_scheme
from .io import LandmarkFile, Subject, dumps, read_csv_configs, read_landmarks
from .pipeline import (
    SCORE_NAMES,
    load_weights,
    make_spec,
    register_file,
    score_rows,
    two_group_dataset,
    feature_table,
)
from .plot import dot_plot_ascii, dot_plot_svg
from .report import (
    dicts_to_csv,
    pvalue_layout,
    summary_layout,
    to_csv,
    to_json,
    uit_rows,
    uit_summary,
)
from .stats import bootstrap_critical, run_comparison
from .synth import SynthSpec, generate_dataset

log = logging.getLogger("bilasym")

METHODS = {"pooled-t": "pooled-t", "welch-t": "welch-t", "mann-whitney": "mann-whitney"}
SIDED = {"one": "greater", "two": "two-sided"}


def _emit(text: str, output: str | None) -> None:
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _load(path: str, scheme: str | None = None) -> LandmarkFile:
    if path.lower().endswith(".csv"):
        if not scheme:
            raise ValueError("CSV input needs --scheme-file with the pairing scheme")
        return read_csv_configs(path, scheme)
    return read_landmarks(path)


def _weights_arg(value: str):
    if value in ("equal", "adaptive"):
        return value
    return load_weights(value)


def cmd_simulate(args) -> None:
    if args.layout == "smile":
        if (args.pairs, args.solos) != (11, 2):
            raise ValueError("the smile layout has 11 pairs and 2 solos")
        scheme = SMILE_SCHEME
    else:
        scheme = sequential_scheme(args.pairs, args.solos)
    labels = feature_labels(scheme, args.dim)
    offsets = np.zeros(len(labels))
    for item in args.shift or []:
        key, _, val = item.partition("=")
        if not val:
            raise ValueError(f"--shift expects FEATURE=VALUE, got {item!r}")
        j = int(key) - 1
        if not 0 <= j < len(labels):
            raise ValueError(f"--shift feature {key} outside 1..{len(labels)}")
        offsets[j] = float(val)
    spec = SynthSpec(
        scheme=scheme,
        M=args.dim,
        noise_sigma=args.sigma,
        asymmetry_offsets=offsets,
        n1=args.n1,
        n2=args.n2,
        nuisance_motion=args.nuisance,
        seed=args.seed,
    )
    data = generate_dataset(spec)
    lf = LandmarkFile(
        dimension=args.dim,
        scheme=scheme,
        registration="basis" if data.registered else "raw",
        subjects=[Subject(i, g, X) for i, g, X in zip(data.ids, data.groups, data.configs)],
        frame=args.frame,
        groups=list(spec.group_labels),
        meta={"simulated": {"seed": args.seed, "sigma": args.sigma, "offsets": offsets.tolist()}},
    )
    _emit(dumps(lf), args.output)


def cmd_register(args) -> None:
    lf = _load(args.input, args.scheme_file)
    hint = None
    if args.hint:
        hint_lf = read_landmarks(args.hint)
        hint = hint_lf.mean_shape if hint_lf.mean_shape is not None else hint_lf.subjects[0].coords
    up = [int(i) - 1 for i in args.up.split(",")] if args.up else None
    out = register_file(lf, args.mode, hint=hint, up_landmarks=up)
    _emit(dumps(out), args.output)


def cmd_features(args) -> None:
    lf = _load(args.input, args.scheme_file)
    values, labels = feature_table(lf, args.kind)
    if args.format == "json":
        doc = {
            "kind": args.kind,
            "features": [lab.describe() for lab in labels],
            "subjects": [{"id": s.id, "group": s.group, "values": v} for s, v in zip(lf.subjects, values)],
        }
        _emit(to_json(doc), args.output)
        return
    header = ["id", "group"] + [lab.short() for lab in labels]
    body = [[s.id, s.group] + [float(x) for x in v] for s, v in zip(lf.subjects, values)]
    _emit(to_csv(header, body), args.output)


def _specs(args, lf):
    weights = _weights_arg(args.weights)
    return [make_spec(name, lf, weights) for name in (args.score or ["l1"])]


def cmd_score(args) -> None:
    lf = _load(args.input, args.scheme_file)
    specs = _specs(args, lf)
    rows = score_rows(lf, specs)
    if args.weights_output:
        wrows = []
        for spec in specs:
            if spec.weights is None:
                continue
            n_lm = lf.scheme.n_pairs + lf.scheme.n_solos
            labels = feature_labels(lf.scheme, lf.dimension, "axis" if len(spec.weights) == n_lm and spec.family == "star" else "basis")
            wrows += [{"score": spec.name, "feature": lab.describe(), "weight": float(w)} for lab, w in zip(labels, spec.weights.weights)]
        Path(args.weights_output).write_text(dicts_to_csv(wrows), encoding="utf-8")
    if args.format == "json":
        doc = {"scores": rows}
        doc["weights"] = {s.name: s.weights.weights for s in specs if s.weights is not None}
        _emit(to_json(doc), args.output)
    else:
        _emit(dicts_to_csv(rows), args.output)


def cmd_test(args) -> None:
    rows = []
    labels = None
    for path in args.input:
        lf = _load(path, args.scheme_file)
        dataset, order = two_group_dataset(lf)
        labels = labels or tuple(order)
        frame = lf.frame or Path(path).stem
        specs = _specs(args, lf)
        rows += run_comparison(dataset, specs, [METHODS[m] for m in (args.method or ["pooled-t"])], SIDED[args.sided], frame)
    if args.format == "json":
        _emit(to_json({"groups": {"group1": labels[0], "group2": labels[1]}, "rows": rows}), args.output)
        return
    if args.layout == "pvalues":
        header, body = pvalue_layout(rows)
    elif args.layout == "summary":
        header, body = summary_layout(rows, labels)
    else:
        _emit(dicts_to_csv(rows), args.output)
        return
    _emit(to_csv(header, body), args.output)


def cmd_select(args) -> None:
    lf = _load(args.input, args.scheme_file)
    dataset, order = two_group_dataset(lf)
    res = bootstrap_critical(dataset, B=args.boot_reps, alpha=args.alpha, seed=args.seed,
                             scheme=args.resample, workers=args.workers)
    summary = uit_summary(res, dataset.index_map)
    summary["groups"] = {"group1": order[0], "group2": order[1]}
    rows = uit_rows(res, dataset.index_map)
    if args.format == "json":
        _emit(to_json({"summary": summary, "features": rows}), args.output)
    else:
        comments = [f"V={res.V!r} V_crit={res.V_crit!r} alpha={res.alpha} B={res.B} seed={res.seed} "
                    f"resampling={res.scheme} p_value={res.p_value!r}",
                    "selected: " + ("; ".join(summary["selected"]) or "none")]
        _emit(dicts_to_csv(rows, comments), args.output)


def _read_score_table(path: str) -> list[dict]:
    text = Path(path).read_text(encoding="utf-8")
    if path.lower().endswith(".json"):
        return json.loads(text)["scores"]
    return list(csv.DictReader(line for line in text.splitlines() if not line.startswith("#")))


def cmd_plot(args) -> None:
    rows = _read_score_table(args.input)
    if not rows:
        raise ValueError("score table is empty")
    if args.groups:
        groups = args.groups.split(",")
    else:
        by_index = {int(r["group_index"]): r["group"] for r in rows if r.get("group_index")}
        groups = [by_index[k] for k in sorted(by_index)] or sorted({r["group"] for r in rows})
    if len(groups) != 2:
        raise ValueError(f"dot plots need exactly two groups, found {groups}")
    panels, seen = [], []
    for r in rows:
        key = (r.get("frame", ""), r["score"])
        if key not in seen:
            seen.append(key)
    for frame, score in seen:
        sel = [r for r in rows if r.get("frame", "") == frame and r["score"] == score]
        panels.append(
            {
                "title": f"{score} ({frame})" if frame else score,
                "labels": tuple(groups),
                "u1": [float(r["value"]) for r in sel if r["group"] == groups[0]],
                "u2": [float(r["value"]) for r in sel if r["group"] == groups[1]],
            }
        )
    text = dot_plot_svg(panels) if args.format == "svg" else dot_plot_ascii(panels)
    _emit(text, args.output)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bilasym", description="Bilateral asymmetry analysis of landmark shapes.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--error-json", action="store_true", help="report errors as JSON on stderr")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--input", "-i", required=True)
        sp.add_argument("--output", "-o", default="-")
        sp.add_argument("--scheme-file", help="JSON pairing scheme for CSV input")
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    def scoring(sp):
        sp.add_argument("--score", action="append", choices=SCORE_NAMES)
        sp.add_argument("--weights", default="equal", help="equal, adaptive, or a weight file")

    sp = sub.add_parser("simulate", help="write a synthetic landmark file")
    sp.add_argument("--output", "-o", default="-")
    sp.add_argument("--pairs", type=int, default=11)
    sp.add_argument("--solos", type=int, default=2)
    sp.add_argument("--dim", type=int, default=3)
    sp.add_argument("--n1", type=int, default=12)
    sp.add_argument("--n2", type=int, default=13)
    sp.add_argument("--sigma", type=float, default=0.05)
    sp.add_argument("--shift", action="append", help="FEATURE=VALUE offset for group 2 (1-based feature index)")
    sp.add_argument("--nuisance", action="store_true", help="apply a random rigid motion to each subject")
    sp.add_argument("--layout", choices=("sequential", "smile"), default="sequential")
    sp.add_argument("--frame")
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("register", help="estimate the midplane and register configurations")
    common(sp, fmt=False)
    sp.add_argument("--mode", choices=("axis", "basis"), default="basis")
    sp.add_argument("--hint", help="landmark file whose mean shape (or first subject) fixes the in-plane axes")
    sp.add_argument("--up", help="comma-separated 1-based landmarks that point up (coordinate 2)")
    sp.set_defaults(func=cmd_register)

    sp = sub.add_parser("features", help="per-subject elementary features")
    common(sp)
    sp.add_argument("--kind", choices=("absolute", "signed", "landmark"), default="absolute")
    sp.set_defaults(func=cmd_features)

    sp = sub.add_parser("score", help="composite asymmetry scores")
    common(sp)
    scoring(sp)
    sp.add_argument("--weights-output", help="also write the weights used as CSV")
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("test", help="two-group tests on composite scores")
    sp.add_argument("--input", "-i", required=True, action="append", help="registered file; repeat for frames")
    sp.add_argument("--output", "-o", default="-")
    sp.add_argument("--scheme-file")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    scoring(sp)
    sp.add_argument("--method", action="append", choices=tuple(METHODS))
    sp.add_argument("--sided", choices=tuple(SIDED), default="one")
    sp.add_argument("--layout", choices=("summary", "pvalues", "rows"), default="summary")
    sp.set_defaults(func=cmd_test)

    sp = sub.add_parser("select", help="max-t bootstrap test and feature selection")
    common(sp)
    sp.add_argument("--boot-reps", type=int, default=10000)
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--resample", choices=("pooled", "permutation"), default="pooled")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("plot", help="dot plot of a score table")
    sp.add_argument("--input", "-i", required=True)
    sp.add_argument("--output", "-o", default="-")
    sp.add_argument("--format", choices=("svg", "ascii"), default="svg")
    sp.add_argument("--groups", help="group1,group2 labels (group 2 is drawn on top)")
    sp.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, ArithmeticError, RuntimeError, OSError, KeyError) as e:
        if args.error_json:
            sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e)}) + "\n")
        else:
            sys.stderr.write(f"bilasym {args.command}: error: {e}\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
