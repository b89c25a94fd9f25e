"""The two smooth references: the Amsler angle along its diagonal and Minding's bobbin."""
import math

from branchsurf import reference

for k in (2, 3, 4):
    phi0 = 10.0 ** -k
    p = reference.painleve_iii(phi0, 16.0)
    zs = reference.z_star(p)
    print(f"phi0 = 1e-{k}: z* = {zs:.4f}  three-regime estimate {reference.asymptotic_crossing(phi0):.4f}"
          f"  z* + log phi0 = {zs + math.log(phi0):.3f}")

b = reference.bobbin_profile(3.0, 12.0)
print(f"bobbin kappa=3: |s|max {b.max_abs_s():.10f} vs arcsinh 3 = {math.asinh(3.0):.10f}")
for r in (1, 3, 6, 8):
    print(f"  R={r}: best bobbin E_inf {reference.bobbin_energy_bound(r):.4f}")
