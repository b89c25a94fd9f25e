"""Grow a branched net over a disk of radius 3, lift it to 3D and check it.

Run:  python3 demos/build_and_embed.py [out.obj]
"""
import math
import sys

from branchsurf import analysis, embed, netgen
from branchsurf.quadgraph import branch_vertices, validate_complex

cx = netgen.run_greedy(3.0, phi_star=3 * math.pi / 4, delta=0.05, phi0=math.pi / 2)
print(f"{len(cx.sectors)} sectors, {len(cx.branches)} branch points, cut depth {cx.cut_depth}")

for b in cx.branches[:6]:
    print(f"  gen {b.generation}  at |z|={abs(b.location):.3f}  phi {b.phi_parent:.3f} -> 3 x {b.phi_daughter:.3f}"
          f"  ({b.node_kind})")

checks = validate_complex(cx)
print("combinatorics ok:", checks["ok"], " max rhombus side error:", f"{checks['rhombus_side_err']:.1e}")

surface = embed.integrate_lelieuvre(embed.build_spherical_net(cx))
rep = embed.validate_embedding(surface)
print("embedding ok:", rep["ok"], " closure", f"{rep['closure_max']:.1e}", " angle gap", f"{rep['angle_err']:.2e}")

# a branch vertex has six edges and its Gauss image wraps twice
v = branch_vertices(cx)[0]
print("Gauss-map turn at a branch vertex / pi:", round(embed.gauss_angle_sum(surface, v) / math.pi, 12))

e_inf, _ = analysis.energy_max(cx)
print(f"E_inf {e_inf:.4f}, Willmore {analysis.energy_willmore(cx):.3f}, area {analysis.total_area(cx):.3f}")

if len(sys.argv) > 1:
    embed.export_obj(surface, sys.argv[1])
    print("wrote", sys.argv[1])
