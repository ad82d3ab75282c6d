"""Command-line front end.

Exit status: 0 on success, 1 on usage or configuration errors, 2 when a
checked identity or axiom fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from . import analysis, construct, enumerate as enum
from .cache import CountCache
from .errors import AssemblyError, PolygrowthError, PropertyViolation
from .graphs import DEFAULT_BUDGET, GraphModel, ball_size, format_vertex, get_graph
from .height import (
    HeightFunction,
    compute_stiff_paths,
    get_height,
    get_rho,
    verify_ghf,
    verify_square_ghf,
)
from .series import CountSeries

EXIT_OK, EXIT_USAGE, EXIT_PROPERTY = 0, 1, 2
OUTPUTS = ("json", "csv", "text")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    graph: GraphModel
    height: HeightFunction | None
    n_max: int | None
    budget: int
    workers: int
    cache: CountCache | None
    output: str

    @classmethod
    def from_args(cls, args, needs_height: bool = False) -> RunConfig:
        if args.budget <= 0:
            raise UsageError("--budget must be positive")
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        g = get_graph(args.graph)
        label = getattr(args, "height", None)
        h = None
        if needs_height or (label not in (None, "none")):
            if label == "none":
                raise UsageError("this command needs a height function")
            h = get_height(g, label)
        cache = None if args.no_cache else CountCache(args.cache_dir)
        return cls(g, h, getattr(args, "n", None), args.budget, args.workers, cache, args.output)


@dataclass
class Report:
    payload: dict
    text: str
    rows: list[list] | None = None
    failed: bool = False
    series: CountSeries | None = None


# --------------------------------------------------------------------------
# series with cache


def _cached(cfg: RunConfig, quantity: str, ns, compute, height: str | None = None) -> CountSeries:
    if cfg.cache is not None:
        hit = cfg.cache.series(cfg.graph, quantity, ns, height)
        if hit is not None:
            return hit
    series = compute()
    if cfg.cache is not None:
        cfg.cache.store(cfg.graph, series)
    return CountSeries(quantity, cfg.graph.name, {n: series[n] for n in ns}, height)


def _series(cfg: RunConfig, kind: str, n: int) -> CountSeries:
    g, w, b = cfg.graph, cfg.workers, cfg.budget
    if kind == "saw":
        return _cached(cfg, "saw", range(n + 1), lambda: enum.count_saws(g, n, w, budget=b))
    if kind == "neighbor":
        return _cached(cfg, "saw_to_neighbor", range(n + 1), lambda: enum.count_saws_to_neighbor(g, n, w, b))
    if kind == "polygon":
        return _cached(cfg, "polygon", range(3, n + 1), lambda: enum.count_polygons(g, n, w, b))
    if kind == "bridge":
        h = cfg.height
        return _cached(cfg, "bridge", range(n + 1), lambda: enum.count_bridges(g, h, n, w, b), h.label)
    if kind == "ball":
        return _cached(cfg, "ball", range(n + 1), lambda: ball_size(g, n, b))
    raise UsageError(f"unknown count {kind!r}")


def _series_report(series: CountSeries) -> Report:
    lines = [f"{series.quantity} on {series.graph}" + (f" (h={series.height_label})" if series.height_label else "")]
    lines += [f"  n={n:<3d} {c}" for n, c in sorted(series.counts.items())]
    rows = [[n, str(c)] for n, c in sorted(series.counts.items())]
    return Report(series.to_json(), "\n".join(lines), rows, series=series)


# --------------------------------------------------------------------------
# commands


def cmd_count(args) -> Report:
    cfg = RunConfig.from_args(args, needs_height=args.what == "bridge")
    minimum = {"polygon": 3, "neighbor": 1}.get(args.what, 0)
    if args.n < minimum:
        raise UsageError(f"count {args.what} needs --n >= {minimum}")
    return _series_report(_series(cfg, args.what, args.n))


def cmd_verify(args) -> Report:
    cfg = RunConfig.from_args(args, needs_height=True)
    g, h = cfg.graph, cfg.height
    if args.what == "ghf":
        rep = verify_ghf(g, h, args.radius, cfg.budget)
        doc = rep.to_json()
        doc.update(graph=g.name, height=h.label)
        status = "passed" if rep.passed else "FAILED"
        lines = [f"ghf {h.label} on {g.name} (radius {args.radius}): {status}"]
        lines += [f"  {ax}: {'ok' if ok else 'FAIL'}" for ax, ok in rep.axioms.items()]
        for f in rep.failures[:10]:
            lines.append(f"  witness {f['axiom']}: {', '.join(f['witness'])} {f.get('detail', '')}".rstrip())
        return Report(doc, "\n".join(lines), failed=not rep.passed)
    rho = get_rho(g, args.rho)
    cert = verify_square_ghf(g, h, rho, args.radius, args.k_max, cfg.budget)
    doc = cert.to_json()
    doc.update(graph=g.name, height=h.label)
    status = "passed" if cert.passed else "FAILED"
    lines = [f"square ghf ({h.label}, {rho.name}) on {g.name}: {status}", f"  delta = {cert.delta}"]
    lines += [f"  {ax}: {'ok' if ok else 'FAIL'}" for ax, ok in cert.axioms.items()]
    if cert.fixed_set:
        lines.append("  finite rho-invariant set: " + ", ".join(format_vertex(v) for v in cert.fixed_set))
    return Report(doc, "\n".join(lines), failed=not cert.passed)


def cmd_estimate(args) -> Report:
    kind = {"mu": "saw", "beta": "bridge", "pi": "polygon"}[args.what]
    cfg = RunConfig.from_args(args, needs_height=kind == "bridge")
    if kind == "bridge":
        fwd = _series(cfg, "bridge", args.n)
        cfg_rev = RunConfig(cfg.graph, cfg.height.negated(), cfg.n_max, cfg.budget, cfg.workers, cfg.cache, cfg.output)
        rev = _series(cfg_rev, "bridge", args.n)
        ests = [analysis.estimate_growth(s, args.method) for s in (fwd, rev)]
        est = max(ests, key=lambda e: e.final)
        doc = est.to_json()
        doc["directions"] = {fwd.height_label: ests[0].final, rev.height_label: ests[1].final}
    else:
        series = _series(cfg, kind, args.n)
        step = 2 if kind == "polygon" and cfg.graph.bipartite else 1
        est = analysis.estimate_growth(series, args.method, step)
        doc = est.to_json()
    doc["graph"] = cfg.graph.name
    lines = [f"{est.quantity} estimate on {cfg.graph.name} ({est.method}): {est.final:.6f}"
             + ("  [zero growth]" if est.zero_growth else "")]
    lines += [f"  n={n:<3d} {v:.6f}" for n, v in est.per_n.items()]
    rows = [[n, f"{v:.12g}"] for n, v in est.per_n.items()]
    return Report(doc, "\n".join(lines), rows)


def cmd_check(args) -> Report:
    if args.what == "identity":
        cfg = RunConfig.from_args(args)
        g, n = cfg.graph, args.n
        if n < 3:
            raise UsageError("check identity needs --n >= 3")
        c = _series(cfg, "saw", n)
        nb = _series(cfg, "neighbor", n - 1)
        p = enum.polygons_from_neighbor_counts([nb[i] for i in range(n)], n)
        direct = enum.count_polygons_direct(g, n, cfg.budget) if args.direct else None
        rows, failed = [], False
        for m in range(3, n + 1):
            ok = 2 * p[m] == nb[m - 1] <= c[m] and (direct is None or direct[m] == p[m])
            failed |= not ok
            rows.append([m, str(2 * p[m]), str(nb[m - 1]), str(c[m]), ok])
        doc = {"graph": g.name, "n_max": n, "holds": not failed,
               "rows": [dict(zip(("n", "2p_n", "c_n-1_nbr", "c_n", "ok"), r)) for r in rows]}
        if direct is not None:
            doc["direct_polygons"] = {str(m): str(x) for m, x in direct.items()}
        text = "\n".join([f"2p_n = c_(n-1)(root nbrs) <= c_n on {g.name}: {'holds' if not failed else 'VIOLATED'}"]
                         + [f"  n={r[0]:<3d} {r[1]} = {r[2]} <= {r[3]}  {'ok' if r[4] else 'FAIL'}" for r in rows])
        return Report(doc, text, rows, failed)
    if args.what == "ordering":
        cfg = RunConfig.from_args(args, needs_height=True)
        rep = analysis.ordering_check(cfg.graph, cfg.height, args.n, cfg.workers, cfg.budget)
        doc = rep.to_json()
        cur = rep.curves
        lines = [f"pi <= mu = beta curves on {cfg.graph.name} (beta via {rep.beta_direction})"]
        lines += [f"  n={n:<3d} pi={cur['pi'].get(n, 0.0):.4f} mu={cur['mu'][n]:.4f} beta={cur['beta'][n]:.4f}"
                  for n in sorted(cur["mu"])]
        rows = [[n, cur["pi"].get(n, ""), cur["mu"][n], cur["beta"][n]] for n in sorted(cur["mu"])]
        return Report(doc, "\n".join(lines), rows)
    cfg = RunConfig.from_args(args)
    rep = analysis.subexponential_diagnostic(cfg.graph, args.n, args.threshold, cfg.budget)
    lines = [f"ball growth on {cfg.graph.name}: {rep.verdict} (terminal slope {rep.terminal_slope:.4f})"]
    lines += [f"  n={n:<3d} Gamma={rep.ball[n]} (1/n)log={rep.log_rate[n]:.4f}" for n in sorted(rep.log_rate)]
    rows = [[n, str(rep.ball[n]), rep.log_rate[n], rep.slopes[n]] for n in sorted(rep.log_rate)]
    return Report(rep.to_json(), "\n".join(lines), rows)


def _tube(cfg: RunConfig, n: int):
    stiff = compute_stiff_paths(cfg.graph, cfg.height)
    return construct.build_tube(cfg.graph, cfg.height, stiff, n)


def cmd_construct(args) -> Report:
    cfg = RunConfig.from_args(args, needs_height=True)
    tube = _tube(cfg, args.n)
    if args.what == "tube":
        doc = {
            "graph": cfg.graph.name, "height": cfg.height.label, "n": tube.n, "ell": tube.ell, "r": tube.r,
            "p_n": format_vertex(tube.p_n), "p_prime": format_vertex(tube.p_prime),
            "base_bridge": [format_vertex(v) for v in tube.base_bridge.vertices],
            "census": {format_vertex(v): str(c) for v, c in tube.census.items()},
            "b_n": str(tube.b_n), "ball_n": str(tube.ball_n),
            "region": sorted(format_vertex(v) for v in tube.region),
        }
        text = (f"tube on {cfg.graph.name}: P_n={doc['p_n']} P'_n={doc['p_prime']} ell={tube.ell}\n"
                f"  l_n = {' '.join(doc['base_bridge'])}\n  |D_n| = {len(tube.region)}")
        return Report(doc, text)
    rho = get_rho(cfg.graph, args.rho)
    N = args.N
    k = args.k if args.k is not None else construct.find_disjoint_k(tube, rho, N, args.k_max)
    if args.what == "polygon":
        longs = list(construct.long_bridges(tube, N))
        out = longs[args.out_index % len(longs)]
        back = longs[args.back_index % len(longs)]
        asm = construct.assemble_polygon(tube, rho, k, N, out, back)
        doc = asm.to_json(coordinates=args.coordinates)
        text = (f"polygon of length {asm.length} on {cfg.graph.name} (n={tube.n}, N={N}, k={k}, t={asm.t})\n"
                + "\n".join(f"  {name}: {' '.join(seg)}" for name, seg in doc["segments"].items())
                + "\n" + "\n".join(f"  {name}: {'ok' if ok else 'FAIL'}" for name, ok in asm.verdicts.items()))
        return Report(doc, text)
    rows_ = construct.arithmetic_subsequence(tube, rho, k, N, min(N, args.materialize))
    doc = {"graph": cfg.graph.name, "n": tube.n, "ell": tube.ell, "k": k,
           "rows": [r.to_json() for r in rows_]}
    text = "\n".join([f"arithmetic subsequence on {cfg.graph.name} (n={tube.n}, k={k})"]
                     + [f"  N={r.N} m_N={r.length} count={r.assembled_count} bound={r.lower_bound}"
                        f" materialized={r.materialized}" for r in rows_])
    rows = [[r.N, r.length, str(r.assembled_count), str(r.lower_bound), r.materialized] for r in rows_]
    return Report(doc, text, rows)


def cmd_ball(args) -> Report:
    cfg = RunConfig.from_args(args)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    if args.what == "histogram":
        hist = enum.endpoint_distance_histogram(cfg.graph, args.n, cfg.workers, cfg.budget)
        doc = {"graph": cfg.graph.name, "n": args.n, "histogram": {str(d): str(x) for d, x in hist.items()},
               "total": str(sum(hist.values()))}
        text = "\n".join([f"endpoint distances of {args.n}-step SAWs on {cfg.graph.name}"]
                         + [f"  d={d:<3d} {x}" for d, x in hist.items()])
        return Report(doc, text, [[d, str(x)] for d, x in hist.items()])
    rep = analysis.ballisticity(cfg.graph, args.n, args.c, cfg.workers, cfg.budget)
    text = f"P(d(root, endpoint) <= {rep.c}*{rep.n}) on {cfg.graph.name} = {rep.probability} ~ {float(rep.probability):.6f}"
    return Report(rep.to_json(), text, [[d, str(x)] for d, x in rep.histogram.items()])


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, height: bool = False, n: bool = True):
    p.add_argument("--graph", required=True, help="catalog name or lattice JSON file")
    if height:
        p.add_argument("--height", default=None, help="height label (default: the graph's first)")
    if n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="vertex budget for balls")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--cache-dir", default=None)
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--output", choices=OUTPUTS, default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polygrowth", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", help="exact counts")
    p.add_argument("what", choices=("saw", "polygon", "bridge", "ball", "neighbor"))
    _common(p, height=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", help="height function validators")
    p.add_argument("what", choices=("ghf", "square-ghf"))
    _common(p, height=True, n=False)
    p.add_argument("--rho", default=None)
    p.add_argument("--radius", type=int, default=4)
    p.add_argument("--k-max", type=int, default=6)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", help="growth-constant estimates")
    p.add_argument("what", choices=("mu", "beta", "pi"))
    _common(p, height=True)
    p.add_argument("--method", choices=analysis.METHODS, default="ratio")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("check", help="exact identities and diagnostics")
    p.add_argument("what", choices=("identity", "ordering", "subexp"))
    _common(p, height=True)
    p.add_argument("--direct", action="store_true", help="also count cycles directly")
    p.add_argument("--threshold", type=float, default=0.05)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("construct", help="tube and polygon construction")
    p.add_argument("what", choices=("tube", "polygon", "sequence"))
    _common(p, height=True)
    p.add_argument("--rho", default=None)
    p.add_argument("--N", type=int, default=1)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--k-max", type=int, default=64)
    p.add_argument("--out-index", type=int, default=0)
    p.add_argument("--back-index", type=int, default=0)
    p.add_argument("--materialize", type=int, default=construct.DEFAULT_N_CAP)
    p.add_argument("--coordinates", action="store_true", help="include plot coordinates")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("ball", help="endpoint distances")
    p.add_argument("what", choices=("histogram", "prob"))
    _common(p)
    p.add_argument("--c", default="0.5", help="speed threshold (decimal or fraction)")
    p.set_defaults(func=cmd_ball)
    return parser


def _render(report: Report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report.payload, indent=2, sort_keys=True)
    if fmt == "text":
        return report.text
    if report.rows is None:
        raise UsageError("csv output is not available for this report")
    if report.series is not None:
        return analysis.series_csv(report.series).rstrip("\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in report.rows:
        w.writerow(row)
    return buf.getvalue().rstrip("\n")


def _emit_error(exc: Exception, code: int, fmt: str, out, err) -> int:
    doc = {"error": str(exc), "type": type(exc).__name__, "exit_code": code}
    if fmt == "json":
        print(json.dumps(doc, sort_keys=True), file=out)
    else:
        print(f"error: {exc}", file=err)
    return code


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    argv = sys.argv[1:] if argv is None else argv
    fmt = "text"
    if "--output" in argv:
        i = argv.index("--output")
        fmt = argv[i + 1] if i + 1 < len(argv) and argv[i + 1] in OUTPUTS else "text"
    try:
        args = build_parser().parse_args(argv)
        report = args.func(args)
        print(_render(report, args.output), file=out)
        return EXIT_PROPERTY if report.failed else EXIT_OK
    except (PropertyViolation, AssemblyError) as exc:
        return _emit_error(exc, EXIT_PROPERTY, fmt, out, err)
    except (UsageError, PolygrowthError, ValueError) as exc:
        return _emit_error(exc, EXIT_USAGE, fmt, out, err)


if __name__ == "__main__":
    raise SystemExit(main())
