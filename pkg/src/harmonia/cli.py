"""Command-line interface.

Exit codes: 0 success, 1 verification found violations, 2 invalid input,
3 grid schedule exhausted its retries, 4 tower schedule (--paper-faithful) over its digit budget.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import graph as G
from .grid import (
    BaseCollision,
    DigitBudgetExceeded,
    GrowthSchedule,
    TowerSchedule,
    RetriesExhausted,
    build_grid_labeling,
    check_edge_estimates,
    grid_key,
    grid_violations,
    heatmap_csv,
    parse_grid_key,
)
from .labeling import (
    CROSS_CENTER,
    DuplicateLabel,
    LabelingError,
    NonPositive,
    PartialLabeling,
    check_harmonic,
    coverage,
    covers_interval,
    cross_collision_witness,
    cross_labeling,
    cross_neighbors,
    dumps_labeling,
    full_interior,
    parse_records,
)
from .slab import (
    DEFAULT_LADDER_PARAMS,
    NotInjective,
    ladder_growth_demo,
    ladder_injective,
    line_density,
    spectral_pairing,
    trace_csv,
    transfer,
    verdict,
)
from .trees import InvalidTreeSpec, TreeSpec, grow_tree, tree_violations

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_RETRIES, EXIT_BUDGET = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _emit(args, summary: dict, lines: list[str]) -> None:
    # stdout carries the labeling when no --out is given; summaries then go to stderr
    stream = sys.stderr if getattr(args, "labels_to_stdout", False) else sys.stdout
    if args.json:
        print(json.dumps(summary, indent=2), file=stream)
    else:
        for line in lines:
            print(line, file=stream)


def _write(path: str | None, text: str, args) -> None:
    if path is None or path == "-":
        args.labels_to_stdout = True
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_json_file(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _slab_key(v):
    return [v[0], v[1]]


def _parse_pair(v):
    if not isinstance(v, list) or len(v) != 2 or not all(isinstance(c, int) for c in v):
        raise ValueError(f"vertex must be an integer pair, got {v!r}")
    return tuple(v)


def _parse_cross(v):
    if not isinstance(v, list) or len(v) != 2 or not isinstance(v[1], int):
        raise ValueError(f"cross vertex must be [arm, k], got {v!r}")
    if tuple(v) != CROSS_CENTER and (v[0] not in ("a", "b", "c", "d") or v[1] < 1):
        raise ValueError(f"bad cross vertex {v!r}")
    return tuple(v)


def _parse_int(v):
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValueError(f"line vertex must be an integer, got {v!r}")
    return v


def _cov_lines(rep) -> list[str]:
    gaps = ", ".join(map(str, rep.gaps[:10])) + (" ..." if len(rep.gaps) > 10 else "")
    return [
        f"coverage of [{-rep.bound}, {rep.bound}]: {rep.attained}/{2 * rep.bound + 1} "
        f"(density {rep.density:.4f})" + (f"; gaps: {gaps}" if rep.gaps else "")
    ]


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_label_tree(args) -> int:
    try:
        if args.tree_spec:
            spec = TreeSpec.from_json(Path(args.tree_spec).read_text())
        elif args.degree is not None:
            spec = TreeSpec.regular(args.degree)
        else:
            raise InvalidTreeSpec("give --degree or --tree-spec")
    except (InvalidTreeSpec, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    state = grow_tree(spec, args.steps)
    bad = tree_violations(state)
    N = state.fill_count // 2
    rep = coverage(state.labeling, N)
    _write(args.out, dumps_labeling(state.labeling, G.address_key), args)
    summary = {
        "vertices": len(state.labeling),
        "steps": state.steps,
        "fill_assignments": state.fill_count,
        "harmonic_violations": len(bad),
        "injective": state.labeling.is_consistent(),
        "coverage": rep.to_dict(),
    }
    _emit(args, summary, [
        f"labeled {len(state.labeling)} vertices in {state.steps} steps "
        f"({state.fill_count} fill values); harmonic violations: {len(bad)}",
        *_cov_lines(rep),
    ])
    return EXIT_OK if not bad else EXIT_VIOLATION


def cmd_label_grid(args) -> int:
    try:
        if args.paper_faithful:
            schedule = TowerSchedule(int(float(args.digit_budget)))
        else:
            base = tuple(args.base) if args.base else GrowthSchedule().base
            schedule = GrowthSchedule(base, args.factor, args.max_retries)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        state = build_grid_labeling(schedule, args.steps)
    except BaseCollision as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RetriesExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RETRIES
    except DigitBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    bad = grid_violations(state)
    rep = coverage(state.labeling, state.n + 1)
    # the spanning rows run over x in [-n, n+1], so that is the window guaranteed
    guaranteed = covers_interval(state.labeling, -state.n, state.n + 1)
    estimates = check_edge_estimates(state)
    _write(args.out, dumps_labeling(state.labeling, grid_key), args)
    if args.heatmap:
        Path(args.heatmap).write_text(heatmap_csv(state))
    summary = {
        "level": state.n,
        "points": len(state.labeling),
        "harmonic_violations": len(bad),
        "injective": state.labeling.is_consistent(),
        "retries": state.retries,
        "ring_dominance": all(d.holds for d in state.dominance),
        "edge_estimates": {"checked": len(estimates), "hold": sum(e.holds for e in estimates)},
        "coverage": rep.to_dict(),
        "covers": {"lo": -state.n, "hi": state.n + 1, "ok": guaranteed},
    }
    _emit(args, summary, [
        f"built S_{state.n}: {len(state.labeling)} points, retries {state.retries}, "
        f"harmonic violations {len(bad)}, ring dominance "
        f"{'ok' if summary['ring_dominance'] else 'FAILED'}",
        f"[{-state.n}, {state.n + 1}] in image: {'yes' if guaranteed else 'NO'}",
        f"edge estimates holding at level {state.n}: {sum(e.holds for e in estimates)}/{len(estimates)}",
        *_cov_lines(rep),
    ])
    return EXIT_OK if not bad else EXIT_VIOLATION


def cmd_analyze_slab(args) -> int:
    try:
        g = G.FiniteGraph.from_json(Path(args.graph).read_text())
    except (G.GraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    seed = None
    if args.seed:
        try:
            data = _read_json_file(args.seed)
            upper, lower = data["upper"], data["lower"]
            if len(upper) != g.n or len(lower) != g.n:
                raise UsageError(f"seed slices must have length {g.n}")
            seed = [int(x) for x in upper], [int(x) for x in lower]
        except (UsageError, KeyError, TypeError, ValueError) as exc:
            print(f"error: bad seed file: {exc}", file=sys.stderr)
            return EXIT_INVALID
    v = verdict(g, args.window)
    report = {"verdict": "exists" if v.exists else "not-exists", "reason": v.reason}
    if v.labeling is not None:
        report["labeling"] = json.loads(dumps_labeling(v.labeling, _slab_key))
    lines = [f"verdict: {report['verdict']} ({v.reason})"]
    if g.n:
        spec = spectral_pairing(g, None if seed is None else seed[0] + seed[1])
        report["spectrum"] = spec.to_dict()
        lams = ", ".join(f"{x:.10g}" for x in spec.eigenvalues)
        lines.append(f"transfer-matrix eigenvalues: {lams}")
        lines.append(f"Jordan blocks at 1: {len(spec.jordan)} (identity exact: "
                     f"{all(b.identity_holds for b in spec.jordan)})")
    if seed is not None:
        t = transfer(g)
        dens = [line_density(t, seed[0], seed[1], j, args.window).to_dict() for j in range(g.n)]
        report["density"] = dens
        for j, d in enumerate(dens):
            lines.append(f"line {j}: density estimate {d['ratio']:.4g} over |k| <= {args.window}")
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    if args.json:
        sys.stdout.write(text)
    else:
        print("\n".join(lines))
    return EXIT_OK


GEOMETRIES = ("grid", "tree", "slab", "line", "cross")


def _geometry(args):
    if args.geometry == "grid":
        return parse_grid_key, G.grid_neighbors
    if args.geometry == "line":
        return _parse_int, G.line_neighbors
    if args.geometry == "cross":
        return _parse_cross, cross_neighbors
    if args.geometry == "tree":
        if args.tree_spec:
            spec = TreeSpec.from_json(Path(args.tree_spec).read_text())
        elif args.degree is not None:
            spec = TreeSpec.regular(args.degree)
        else:
            raise UsageError("tree geometry needs --degree or --tree-spec")

        def decode(v):
            if not isinstance(v, str):
                raise ValueError(f"tree vertex must be an address string, got {v!r}")
            addr = G.parse_address(v)
            if not G.valid_address(addr, spec.degree):
                raise ValueError(f"address {v} is not in the tree")
            return addr

        return decode, spec.neighbors
    if args.geometry == "slab":
        if not args.graph:
            raise UsageError("slab geometry needs --graph")
        g = G.FiniteGraph.from_json(Path(args.graph).read_text())

        def decode_slab(v):
            a, z = _parse_pair(v)
            if not 0 <= a < g.n:
                raise ValueError(f"vertex {v} outside G")
            return (a, z)

        return decode_slab, G.slab_neighbors(g)
    raise UsageError(f"unknown geometry {args.geometry}")


def cmd_verify(args) -> int:
    try:
        decode, nbrs = _geometry(args)
        pairs = parse_records(Path(args.labels).read_text(), decode)
    except (UsageError, LabelingError, InvalidTreeSpec, G.GraphError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    lab = PartialLabeling()
    collisions, duplicates = [], []
    for v, x in pairs:
        if v in lab:
            duplicates.append(v)
            continue
        try:
            lab.insert(v, x)
        except DuplicateLabel as exc:
            collisions.append((exc.existing, exc.vertex, exc.label))
    bad = check_harmonic(lab, full_interior(lab, nbrs), nbrs)
    M = args.window if args.window is not None else 0
    rep = coverage(lab, M)
    summary = {
        "vertices": len(pairs),
        "harmonic_violations": [{"v": str(b.vertex), "deg_times_value": str(b.scaled_value),
                                 "neighbor_sum": str(b.neighbor_sum)} for b in bad],
        "collisions": [{"first": str(a), "second": str(b), "label": str(x)} for a, b, x in collisions],
        "repeated_vertices": [str(v) for v in duplicates],
        "coverage": rep.to_dict(),
    }
    ok = not bad and not collisions and not duplicates
    lines = [f"checked {len(pairs)} labels: {len(bad)} harmonic violation(s), "
             f"{len(collisions)} collision(s), {len(duplicates)} repeated vertex record(s)"]
    lines += [f"  not harmonic at {b.vertex}: deg*phi = {b.scaled_value}, neighbor sum = {b.neighbor_sum}"
              for b in bad[:20]]
    lines += [f"  label {x} on both {a} and {b}" for a, b, x in collisions[:20]]
    lines += _cov_lines(rep)
    args.labels_to_stdout = False
    _emit(args, summary, lines)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_demo_cross(args) -> int:
    try:
        w = cross_collision_witness(args.a, args.b, args.c)
    except NonPositive as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        cross_labeling(args.a, args.b, args.c, max(args.a, args.b))
        first = None
    except DuplicateLabel as exc:
        first = {"label": str(exc.label), "first": list(exc.existing), "second": list(exc.vertex)}
    summary = {
        "a": args.a, "b": args.b, "c": args.c, "d": -args.a - args.b - args.c,
        "witness": {"position_on_a": w.position_on_a, "position_on_b": w.position_on_b,
                    "value": str(w.value)},
        "first_collision": first,
    }
    lines = [f"arm a at distance {w.position_on_a} and arm b at distance {w.position_on_b} "
             f"both carry {w.value}"]
    if first:
        lines.append(f"first repeat while inserting: {first['label']} on {first['first']} "
                     f"and {first['second']}")
    args.labels_to_stdout = False
    _emit(args, summary, lines)
    return EXIT_OK


def cmd_demo_ladder(args) -> int:
    args.labels_to_stdout = False
    if args.mode == "growth":
        try:
            trace = ladder_growth_demo(args.seed, args.steps)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID
        if args.trace:
            Path(args.trace).write_text(trace_csv(trace))
        summary = {"steps": len(trace) - 1, "final_max": str(trace[-1].running_max),
                   "sides": "".join(s.side for s in trace[1:])}
        _emit(args, summary, [
            f"running max grew by >= 3 on each of {len(trace) - 2} slices; "
            f"final max {trace[-1].running_max}",
            f"max side per slice: {summary['sides']}",
        ])
        return EXIT_OK
    params = tuple(args.params) if args.params else DEFAULT_LADDER_PARAMS
    try:
        lab = ladder_injective(params, args.window)
    except NotInjective as exc:
        print(f"not injective: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.out:
        Path(args.out).write_text(dumps_labeling(lab, _slab_key))
    rows = [(k, lab[(0, k)], lab[(1, k)]) for k in range(-args.window, args.window + 1)]
    if args.trace:
        Path(args.trace).write_text(trace_csv(rows))
    summary = {"params": list(params), "window": args.window, "vertices": len(lab), "injective": True}
    _emit(args, summary, [f"params {params}: harmonic and injective on {len(lab)} ladder vertices"])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="harmonia", description="Harmonic labelings of graphs.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable summary on stdout")

    sp = sub.add_parser("label-tree", help="label a tree with all degrees >= 3")
    sp.add_argument("--degree", type=int)
    sp.add_argument("--tree-spec", help="JSON {default, by_depth, overrides}")
    sp.add_argument("--steps", type=int, default=100)
    sp.add_argument("--out", "-o", help="labeling JSON path (default: stdout)")
    common(sp)
    sp.set_defaults(func=cmd_label_tree)

    sp = sub.add_parser("label-grid", help="label the diamond S_n of Z^2")
    sp.add_argument("--steps", type=int, default=20)
    sp.add_argument("--base", type=int, nargs=4, metavar="V")
    sp.add_argument("--factor", type=int, default=GrowthSchedule().factor)
    sp.add_argument("--max-retries", type=int, default=GrowthSchedule().max_retries)
    sp.add_argument("--paper-faithful", action="store_true",
                    help="tower values (10!, (10!)!, ...) under a digit budget")
    sp.add_argument("--digit-budget", default="1e6")
    sp.add_argument("--out", "-o")
    sp.add_argument("--heatmap", help="CSV of sign*log10(1+|label|) over S_n")
    common(sp)
    sp.set_defaults(func=cmd_label_grid)

    sp = sub.add_parser("analyze-slab", help="verdict and spectrum for G x Z")
    sp.add_argument("--graph", required=True, help='JSON {"n": int, "edges": [[i, j], ...]}')
    sp.add_argument("--window", type=int, default=5)
    sp.add_argument("--seed", help='JSON {"upper": [...], "lower": [...]} (slices 1 and 0)')
    sp.add_argument("--out", "-o", help="report JSON path")
    common(sp)
    sp.set_defaults(func=cmd_analyze_slab)

    sp = sub.add_parser("verify", help="check harmonicity, injectivity and coverage")
    sp.add_argument("--labels", required=True)
    sp.add_argument("--geometry", choices=GEOMETRIES, default="grid")
    sp.add_argument("--degree", type=int)
    sp.add_argument("--tree-spec")
    sp.add_argument("--graph")
    sp.add_argument("--window", type=int, help="coverage window M")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("demo-cross", help="collision witness on the infinite cross")
    sp.add_argument("--a", type=int, default=2)
    sp.add_argument("--b", type=int, default=3)
    sp.add_argument("--c", type=int, default=5)
    common(sp)
    sp.set_defaults(func=cmd_demo_cross)

    sp = sub.add_parser("demo-ladder", help="ladder Z x K2: growth of maxima or an injective function")
    sp.add_argument("--mode", choices=("growth", "injective"), default="growth")
    sp.add_argument("--seed", type=int, nargs=4, default=[0, 5, 1, 2], metavar=("A0", "A1", "B0", "B1"))
    sp.add_argument("--steps", type=int, default=50)
    sp.add_argument("--params", type=int, nargs=4, metavar=("ALPHA", "BETA", "C", "D"))
    sp.add_argument("--window", type=int, default=30)
    sp.add_argument("--out", "-o")
    sp.add_argument("--trace", help="CSV of k, a_k, b_k")
    common(sp)
    sp.set_defaults(func=cmd_demo_ladder)
    return p


def _validate(args) -> None:
    for name in ("steps", "window"):
        val = getattr(args, name, None)
        if val is not None and val < 0:
            raise UsageError(f"--{name} must be non-negative")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.labels_to_stdout = False
    try:
        _validate(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
