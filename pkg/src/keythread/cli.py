"""Command line interface.

Subcommands: select, thread, synth, compare, score-dump. Data goes to stdout
(or --out); diagnostics go to stderr. Exit codes: 0 success, 2 usage error,
3 data/file error, 4 solver guard refusal.

The KFC_THREADS environment variable caps worker threads for batch
evaluation: unset = 1, 0 = one per CPU. Worker count never changes output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import store
from .errors import DataError, FrameCountExceedsCap, GuardError
from .greedy import GreedyConfig
from .harness import PlantedSegment, SyntheticSpec, compare_solvers, synth_instance
from .interleave import Layout, Scope, ThreadBudget, render_plan, thread
from .scoring import MAX_DENSE_FRAMES, Variant, build_score_matrix
from .harness import run_solver

_VARIANTS = {"upper": Variant.ASYMMETRIC_UPPER, "symmetric": Variant.SYMMETRIC}
_SCOPES = {"between": Scope.BETWEEN_KEYFRAMES, "full": Scope.FULL_VIDEO}
_LAYOUTS = {
    "interleaved": Layout.INTERLEAVED,
    "nar-first": Layout.NARRATIVES_FIRST,
    "kf-first": Layout.KEYFRAMES_FIRST,
}


def worker_count() -> int:
    raw = os.environ.get("KFC_THREADS", "").strip()
    if not raw:
        return 1
    try:
        v = int(raw)
    except ValueError:
        print(f"warning: ignoring non-integer KFC_THREADS={raw!r}", file=sys.stderr)
        return 1
    if v == 0:
        return os.cpu_count() or 1
    return max(1, v)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load_pair(args):
    e = store.load_embeddings(args.embeddings)
    if e.n_frames > MAX_DENSE_FRAMES:
        raise FrameCountExceedsCap(
            f"{e.n_frames} frames exceeds the dense-matrix cap of "
            f"{MAX_DENSE_FRAMES}; stride the video down first"
        )
    q = store.load_query(args.query)
    return store.normalize_rows(e), store.normalize_query(q)


def cmd_select(args) -> int:
    e, q = _load_pair(args)
    warm = None
    if args.warm_start:
        raw = json.loads(Path(args.warm_start).read_text(encoding="utf-8"))
        warm = raw["indices"] if isinstance(raw, dict) else raw
    cfg = GreedyConfig(
        rank_ratio=args.rank_ratio,
        target_resolution=args.grid,
        refine_window_k=args.refine_k,
        enable_lowrank=not args.no_lowrank,
        enable_downsample=not args.no_downsample,
        enable_refine=not args.no_refine,
        enable_init=not args.no_init,
    )
    node_limit = args.node_limit if args.node_limit > 0 else None
    result = run_solver(
        args.solver, e, q, args.alpha, args.k,
        greedy_cfg=cfg, node_limit=node_limit, warm_start=warm,
    )
    _emit(json.dumps(result.to_dict(), indent=2) + "\n", args.out)
    return 0


def cmd_thread(args) -> int:
    raw = json.loads(Path(args.selection).read_text(encoding="utf-8"))
    keyframes = raw["indices"] if isinstance(raw, dict) else raw
    captions = store.load_captions(args.captions)
    scope = _SCOPES[args.scope]
    if scope is Scope.FULL_VIDEO and args.n_frames is None:
        raise DataError("--n-frames is required with --scope full")
    plan = thread(
        keyframes,
        captions,
        budget=ThreadBudget(total_narratives=args.budget, delta=args.delta),
        scope=scope,
        layout=_LAYOUTS[args.layout],
        n_frames=args.n_frames,
    )
    if args.render is not None:
        _emit(render_plan(plan, args.render), args.out)
    else:
        _emit(json.dumps(plan.to_dict(), indent=2) + "\n", args.out)
    return 0


def _parse_plant(text: str) -> list[PlantedSegment]:
    segments = []
    if not text:
        return segments
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise ValueError(f"bad segment {part!r}, expected start:len:boost")
        segments.append(
            PlantedSegment(start=int(bits[0]), length=int(bits[1]),
                           relevance_boost=float(bits[2]))
        )
    return segments


def cmd_synth(args) -> int:
    try:
        segments = _parse_plant(args.plant)
    except ValueError as e:
        raise DataError(str(e)) from e
    spec = SyntheticSpec(
        n_frames=args.n, dim=args.dim, smoothness_rho=args.rho,
        planted=segments, seed=args.seed,
    )
    e, q, planted = synth_instance(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    store.write_embeddings(e, out / "embeddings.kfce")
    store.write_query(q, out / "query.kfce")
    manifest = {
        "n_frames": spec.n_frames,
        "dim": spec.dim,
        "smoothness_rho": spec.smoothness_rho,
        "seed": spec.seed,
        "segments": [
            {"start": s.start, "length": s.length, "relevance_boost": s.relevance_boost}
            for s in spec.planted
        ],
        "planted": sorted(planted),
    }
    (out / "planted.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    if args.captions:
        caps = store.CaptionSet(
            {t: f"synthetic caption for frame {t}" for t in range(spec.n_frames)}
        )
        store.write_captions(caps, out / "captions.jsonl")
    print(f"wrote {out}/embeddings.kfce query.kfce planted.json"
          + (" captions.jsonl" if args.captions else ""), file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    batch = []
    for inst in raw["instances"]:
        batch.append(
            SyntheticSpec(
                n_frames=inst["n_frames"],
                dim=inst["dim"],
                smoothness_rho=inst.get("smoothness_rho", 0.0),
                planted=[
                    PlantedSegment(p["start"], p["length"], p["relevance_boost"])
                    for p in inst.get("planted", [])
                ],
                seed=inst.get("seed", 0),
            )
        )
    solvers = [sname.strip() for sname in args.solvers.split(",") if sname.strip()]
    node_limit = args.node_limit if args.node_limit > 0 else None
    table = compare_solvers(
        batch, solvers, args.k, alpha=args.alpha,
        compute_optimum=args.optimum, node_limit=node_limit,
        workers=worker_count(),
    )
    _emit(table.to_csv(), args.out)
    if args.json:
        Path(args.json).write_text(
            json.dumps(table.to_json(), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def cmd_score_dump(args) -> int:
    e, q = _load_pair(args)
    s = build_score_matrix(e, q, args.alpha, _VARIANTS[args.variant])
    lines = [f"# variant={s.variant.value} alpha={s.alpha!r} n={s.n}"]
    for row in s.values:
        lines.append(",".join(repr(float(v)) for v in row))
    _emit("".join(line + "\n" for line in lines), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="keythread",
        description="Query-aware keyframe selection and narrative threading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("select", help="select k keyframes from embeddings")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--solver", default="greedy",
                   choices=["greedy", "brute", "bnb", "uniform", "topk", "dpp"])
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--rank-ratio", type=float, default=0.25)
    p.add_argument("--grid", type=int, default=128)
    p.add_argument("--refine-k", type=int, default=2)
    p.add_argument("--node-limit", type=int, default=40000,
                   help="branch-and-bound node budget; <= 0 means unlimited")
    p.add_argument("--warm-start", help="JSON file with starting indices for bnb")
    p.add_argument("--no-lowrank", action="store_true")
    p.add_argument("--no-downsample", action="store_true")
    p.add_argument("--no-refine", action="store_true")
    p.add_argument("--no-init", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("thread", help="interleave keyframes with captions")
    p.add_argument("--selection", required=True,
                   help="selection JSON (result file or bare index list)")
    p.add_argument("--captions", required=True)
    p.add_argument("--budget", type=int, default=210)
    p.add_argument("--delta", type=int, default=None,
                   help="force the narrative stride instead of solving for it")
    p.add_argument("--scope", default="between", choices=sorted(_SCOPES))
    p.add_argument("--layout", default="interleaved", choices=sorted(_LAYOUTS))
    p.add_argument("--n-frames", type=int, default=None,
                   help="total frame count; required with --scope full")
    p.add_argument("--render", default=None,
                   help="emit rendered text using this frame template, e.g. '<frame:{t}>'")
    p.add_argument("--out")
    p.set_defaults(func=cmd_thread)

    p = sub.add_parser("synth", help="generate a seeded synthetic instance")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--plant", default="",
                   help="planted segments start:len:boost[,start:len:boost...]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--captions", action="store_true",
                   help="also write placeholder captions.jsonl")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("compare", help="compare solvers over a synthetic batch")
    p.add_argument("--spec", required=True, help="batch JSON with an instances list")
    p.add_argument("--solvers", default="greedy,uniform,topk")
    p.add_argument("--k", type=int, default=8)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--optimum", action="store_true",
                   help="also brute-force the optimum for optimality ratios")
    p.add_argument("--node-limit", type=int, default=40000)
    p.add_argument("--json", help="also write the JSON table (includes timing)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("score-dump", help="dump the score matrix as CSV")
    p.add_argument("--embeddings", required=True)
    p.add_argument("--query", required=True)
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--variant", default="upper", choices=sorted(_VARIANTS))
    p.add_argument("--out")
    p.set_defaults(func=cmd_score_dump)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GuardError as e:
        print(f"error: {e}", file=sys.stderr)
        return 4
    except (DataError, OSError, json.JSONDecodeError, KeyError) as e:
        print(f"error: {e!r}" if isinstance(e, KeyError) else f"error: {e}",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
