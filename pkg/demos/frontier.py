"""Branch-angle ratios at every cut of a radius-8 net, compared with the recursion curves."""
import math

from branchsurf import analysis, netgen, reference

cx = netgen.run_greedy(8.0, phi_star=3 * math.pi / 4, delta=0.08, phi0=math.pi / 2)
recs = analysis.frontier_records(cx)
a_star = reference.alpha_star()
print(f"{len(recs)} branch points; alpha* = {a_star:.4f}, so f2 = {1 / a_star ** 2:.4f} alpha^2")

worst = min(recs, key=lambda r: r.phi_ratio / max(1 / 3, r.alpha_sq / a_star ** 2))
print(f"tightest record: alpha^2 {worst.alpha_sq:.3f}, ratio {worst.phi_ratio:.4f}, generation {worst.generation}")

diag = [r for r in recs if r.node_kind == "amsler_diagonal"]
low = min(r.phi_ratio - reference.bessel_i0(2 * r.alpha_sq) / 3 for r in diag)
# negative means a record sits below f1 itself; the check allows 5% slack
print(f"{len(diag)} Amsler-diagonal records; smallest ratio - f1: {low:.4f}")
above = sum(r.phi_ratio >= 0.95 * reference.bessel_i0(2 * r.alpha_sq) / 3 for r in diag)
print(f"{above}/{len(diag)} above 0.95 f1")
