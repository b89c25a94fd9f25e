"""Command-line driver.

    branchsurf build --radius 3 --phi-star 3pi/4 --out run3
    branchsurf energy-scan --r-list 2,3,4,5,6 --out scan.csv
    branchsurf frontier --radius 8 --phi0 pi/2 --delta 0.08 --out frontier
    branchsurf bobbin --kappa 3
    branchsurf amsler --phi0 pi/100 --z-max 10
    branchsurf verify --radius 2

Exit codes: 0 success, 1 an invariant failed, 2 bad configuration, 3 I/O error.
"""
import argparse
import csv
import json
import math
import os
import re
import sys

import numpy as np

from . import analysis, embed, netgen, reference
from .quadgraph import branch_vertices, rhombus_side_error, validate_complex

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

_ANGLE = re.compile(r"^\s*([+-]?)\s*(\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+(?:[eE][+-]?\d+)?))?\s*$")


def parse_angle(text):
    """Radians from '2.356', 'pi', '3pi/4', '3*pi/4' or '-pi/2'."""
    text = str(text).strip()
    m = _ANGLE.match(text)
    if m:
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        den = float(m.group(3)) if m.group(3) else 1.0
        if den == 0:
            raise argparse.ArgumentTypeError(f"zero denominator in angle {text!r}")
        return sign * coef * math.pi / den
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r}") from None


def parse_list(text):
    try:
        return [float(x) for x in str(text).replace(" ", "").split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma separated list of numbers: {text!r}") from None


def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path, data):
    with open(path, "w", newline="\n") as fh:
        json.dump(_jsonable(data), fh, indent=2, sort_keys=True)
        fh.write("\n")


def config_echo(args):
    """Parameters that determine the result; paths and thread count are left out."""
    skip = {"func", "out", "report", "threads"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _m(args):
    if args.sectors % 2 or args.sectors < 4:
        raise netgen.ConfigError("--sectors must be an even number >= 4")
    return args.sectors // 2


def _greedy(args):
    return netgen.run_greedy(args.radius, phi_star=args.phi_star, delta=args.delta, m=_m(args),
                             phi0=args.phi0, max_generations=args.max_generations, threads=args.threads)


def branch_tree(cx):
    return [{
        "id": b.bid, "generation": b.generation, "parent_sector": b.parent_sector,
        "parent_branch": b.parent_branch, "cut_index": list(b.jk), "location": [b.location.real, b.location.imag],
        "phi_parent": b.phi_parent, "phi_daughter": b.phi_daughter, "phi_n": b.phi_n, "s_n": b.s_n,
        "alpha_sq": b.alpha_sq, "node_kind": b.node_kind, "daughter_sectors": list(b.daughters),
    } for b in cx.branches]


def vertex_scalars(cx):
    """Rows (obj index, phi, kappa_max, sector, generation) in OBJ vertex order."""
    idx = cx.index()
    rows = []
    for v, (sid, j, k) in enumerate(idx.owner.tolist()):
        sec = cx.sectors[sid]
        phi = float(sec.phi[j, k])
        a = abs(phi) / 2
        kmax = max(math.tan(a), 1.0 / math.tan(a)) if 0 < abs(phi) < math.pi else float("nan")
        rows.append((v + 1, phi, kmax, sid, sec.generation))
    return rows


def cmd_build(args):
    cx = _greedy(args)
    checks = validate_complex(cx)
    surface = embed.integrate_lelieuvre(embed.build_spherical_net(cx))
    emb = embed.validate_embedding(surface)
    rep = analysis.energy_report(cx).to_dict()
    rep["bobbin_bound"] = reference.bobbin_energy_bound(args.radius)
    rep["complex_checks"] = {k: v for k, v in checks.items() if k != "bad_degree_vertices"}
    rep["embedding_checks"] = {k: v for k, v in emb.items() if k != "worst_planarity_edge"}
    rep["config"] = config_echo(args)
    os.makedirs(args.out, exist_ok=True)
    embed.export_obj(surface, os.path.join(args.out, "surface.obj"))
    write_csv(os.path.join(args.out, "scalars.csv"), ["vertex", "phi", "kappa_max", "sector", "generation"],
              vertex_scalars(cx))
    write_json(os.path.join(args.out, "report.json"), rep)
    write_json(os.path.join(args.out, "branches.json"), {"config": config_echo(args), "branches": branch_tree(cx)})
    print(f"status {cx.status}: {len(cx.branches)} branch points, cut depth {cx.cut_depth}, "
          f"E_inf {rep['e_inf']:.6g}, {rep['n_vertices']} vertices")
    if not (checks["ok"] and emb["ok"]):
        names = ("seams_identical", "interior_degrees", "even_degrees", "checkerboard", "rhombi", "branch_tree",
                 "sector_count")
        print("invariant failure: " + ", ".join(k for k in names if not checks.get(k, False))
              + ("" if emb["ok"] else " embedding"), file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


SCAN_COLUMNS = ["R", "e_inf_branched", "e_willmore", "e_inf_bobbin_bound", "e_inf_periodic_amsler",
                "cut_depth", "n_branches", "n_vertices", "wall_ms"]


def cmd_energy_scan(args):
    rows = []
    for r in args.r_list:
        try:
            row = analysis.energy_scan_row(r, args.phi_star, args.delta, m=_m(args), phi0=args.phi0,
                                           threads=args.threads)
            rows.append([row[c] for c in SCAN_COLUMNS])
            print(f"R={r:g}: branched {row['e_inf_branched']:.6g}, periodic Amsler {row['e_inf_periodic_amsler']:.6g}"
                  f" (m0={row['m0']}), depth {row['cut_depth']}")
        except (ValueError, RuntimeError) as exc:
            print(f"R={r:g}: failed ({exc})", file=sys.stderr)
            rows.append([r] + ["nan"] * (len(SCAN_COLUMNS) - 1))
    write_csv(args.out, SCAN_COLUMNS, rows)
    good = [row for row in rows if row[1] != "nan"]
    if len(good) >= 3:
        rr = np.array([row[0] for row in good])
        le = np.log([row[1] for row in good])
        print(f"log E_inf fit residual: against sqrt(R) {analysis.fit_residual(np.sqrt(rr), le):.4g}, "
              f"against R {analysis.fit_residual(rr, le):.4g}")
    return EXIT_OK


def frontier_summary(records, phi_star):
    a_star = reference.alpha_star()
    above = both = 0
    ad = ad_ok = 0
    for r in records:
        alpha = math.sqrt(r.alpha_sq)
        f1, f2 = reference.recursion_curves(alpha)
        if r.phi_ratio >= 0.95 * max(1.0 / 3.0, float(f2)):
            above += 1
        if r.node_kind == "amsler_diagonal":
            ad += 1
            if r.phi_ratio >= 0.95 * float(f1):
                ad_ok += 1
        both += 1
    return {
        "n_records": both, "alpha_star": a_star, "f2_coefficient": 1.0 / a_star ** 2,
        "fraction_above_quadratic": above / both if both else float("nan"),
        "n_amsler_diagonal": ad, "fraction_amsler_above_f1": ad_ok / ad if ad else float("nan"),
        "phi_star": phi_star,
    }


def cmd_frontier(args):
    cx = _greedy(args)
    recs = analysis.frontier_records(cx)
    if len(recs) < 10:
        print(f"warning TOO_FEW_BRANCHES: only {len(recs)} branch points", file=sys.stderr)
    os.makedirs(args.out, exist_ok=True)
    write_csv(os.path.join(args.out, "frontier.csv"),
              ["generation", "node_kind", "phi_n", "phi_ratio", "alpha_sq", "s_n", "branch_radius"],
              [(r.generation, r.node_kind, r.phi_n, r.phi_ratio, r.alpha_sq, r.s_n, r.branch_radius) for r in recs])
    alpha = np.linspace(0.0, 1.5, 151)
    f1, f2 = reference.recursion_curves(alpha)
    write_csv(os.path.join(args.out, "curves.csv"), ["alpha", "alpha_sq", "f1", "f2"],
              zip(alpha, alpha ** 2, f1, f2))
    summary = frontier_summary(recs, args.phi_star)
    summary["config"] = config_echo(args)
    summary["status"] = cx.status
    write_json(os.path.join(args.out, "summary.json"), summary)
    print(f"{summary['n_records']} records; {summary['fraction_above_quadratic']:.3f} above 0.95 max(1/3, (a/a*)^2); "
          f"{summary['fraction_amsler_above_f1']:.3f} of {summary['n_amsler_diagonal']} Amsler-diagonal above 0.95 f1")
    return EXIT_OK


def cmd_bobbin(args):
    b = reference.bobbin_profile(args.kappa, args.xi_max, args.step)
    write_csv(args.out, ["xi", "s", "rho", "z_height", "phi"], zip(b.xi, b.s, b.rho, b.height, b.phi))
    print(f"|s|max {b.max_abs_s():.10f}  arcsinh(kappa) {math.asinh(args.kappa):.10f}")
    return EXIT_OK


def cmd_amsler(args):
    p = reference.painleve_iii(args.phi0, args.z_max, args.step)
    write_csv(args.out, ["z", "phi", "dphi"], zip(p.z, p.phi, p.dphi))
    zs = reference.z_star(p)
    print("z* not reached" if zs is None else f"z* = {zs:.6f}")
    return EXIT_OK


def verify_suite(radius, delta, phi_star=3 * math.pi / 4, seed=0, threads=1):
    """Named invariant checks on a greedy build; returns a list of (name, passed, detail)."""
    out = []
    cx = netgen.run_greedy(radius, phi_star=phi_star, delta=delta, threads=threads)
    v = validate_complex(cx)
    for k in ("seams_identical", "interior_degrees", "even_degrees", "checkerboard", "branch_tree", "sector_count"):
        out.append((k, bool(v[k]), ""))
    sides = rhombus_side_error(cx)
    out.append(("rhombus_sides", sides < 1e-9, f"max |side - delta| {sides:.3g}"))
    surface = embed.integrate_lelieuvre(embed.build_spherical_net(cx))
    emb = embed.validate_embedding(surface)
    for k in ("edge_length_err", "chebyshev_err", "planarity_err", "closure_max"):
        out.append((k, emb[k] < 1e-9, f"{emb[k]:.3g}"))
    out.append(("angle_agreement", emb["angle_err"] < 5 * delta, f"{emb['angle_err']:.3g}"))
    idx = cx.index()
    deg = idx.degrees()
    worst = 0.0
    for vtx in branch_vertices(cx):
        want = 2 * math.pi * (1 - deg[vtx] // 2)
        worst = max(worst, abs(embed.gauss_angle_sum(surface, vtx) - want))
    out.append(("gauss_angle_sum", worst < 1e-6, f"{worst:.3g}"))
    rng = np.random.default_rng(seed)
    loops = analysis.random_rectangles(cx, 20, rng) + analysis.random_branch_loops(cx, 5, rng)
    ratio = 0.0
    for loop in loops:
        res = analysis.hazzidakis_check(cx, loop)
        ratio = max(ratio, res / (10 * delta * delta * analysis.loop_perimeter(loop)))
    out.append(("hazzidakis", ratio <= 1.0, f"worst residual/tolerance {ratio:.3g} over {len(loops)} loops"))
    e_inf, _ = analysis.energy_max(cx)
    out.append(("e_inf_at_least_one", e_inf >= 1.0, f"{e_inf:.6g}"))
    slack = 2 * delta
    a = analysis.defined_angles(cx)
    out.append(("angles_below_cap", float(a.max()) <= phi_star + slack, f"max |phi| {a.max():.6g}"))
    return out


def cmd_verify(args):
    results = verify_suite(args.radius, args.delta, args.phi_star, threads=args.threads)
    failed = None
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip())
        if not ok and failed is None:
            failed = name
    if args.report:
        write_json(args.report, {"config": config_echo(args),
                                 "checks": [{"name": n, "passed": ok, "detail": d} for n, ok, d in results]})
    if failed:
        print(f"first failing invariant: {failed}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def _net_args(p, radius=3.0, delta=0.05, phi0=None):
    p.add_argument("--radius", type=float, default=radius)
    p.add_argument("--phi0", type=parse_angle, default=phi0,
                   help="opening of the first initial sector (default: 2m equal sectors)")
    p.add_argument("--phi-star", type=parse_angle, default=3 * math.pi / 4)
    p.add_argument("--delta", type=float, default=delta)
    p.add_argument("--sectors", type=int, default=4, help="number of initial sectors 2m")
    p.add_argument("--max-generations", type=int, default=64)
    _threads(p)


def _threads(p):
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                   help="worker threads for sector fills; results do not depend on it")


def build_parser():
    ap = argparse.ArgumentParser(prog="branchsurf", description="Branched pseudospherical surfaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="greedy net, 3D surface, energies")
    _net_args(p)
    p.add_argument("--out", default="build_out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("energy-scan", help="E_inf against radius for branched, periodic Amsler and bobbin")
    _net_args(p)
    p.add_argument("--r-list", type=parse_list, default=[2, 3, 4, 5, 6])
    p.add_argument("--out", default="energy_scan.csv")
    p.set_defaults(func=cmd_energy_scan)

    p = sub.add_parser("frontier", help="branch ratio records and the recursion curves")
    _net_args(p, radius=8.0, delta=0.08)
    p.add_argument("--out", default="frontier_out")
    p.set_defaults(func=cmd_frontier)

    p = sub.add_parser("bobbin", help="Minding bobbin profile")
    p.add_argument("--kappa", type=float, default=3.0)
    p.add_argument("--xi-max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out", default="bobbin.csv")
    p.set_defaults(func=cmd_bobbin)

    p = sub.add_parser("amsler", help="radial Amsler angle from the Painleve III equation")
    p.add_argument("--phi0", type=parse_angle, default=math.pi / 100)
    p.add_argument("--z-max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--out", default="painleve.csv")
    p.set_defaults(func=cmd_amsler)

    p = sub.add_parser("verify", help="run the invariant suite; exit 1 on the first failure")
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--phi-star", type=parse_angle, default=3 * math.pi / 4)
    p.add_argument("--report", default=None)
    _threads(p)
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (netgen.ConfigError, ValueError) as exc:
        print(f"bad configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
