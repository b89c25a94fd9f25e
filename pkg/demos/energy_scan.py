"""E_inf of the greedy branched net against the periodic Amsler net and the bobbin bound.

The periodic net needs exponentially many sectors as R grows, so its
thinnest angle, and with it E_inf, blows up.  The branched net only pays
cot(phi/2) at its narrowest daughter sector.  For R <= 3 that daughter is
thinner than the periodic sectors and the periodic net still wins.
"""
import math

import numpy as np

from branchsurf import analysis

rows = [analysis.energy_scan_row(r, 3 * math.pi / 4, 0.05, phi0=math.pi / 2) for r in (2, 3, 4, 5)]
print(" R   branched  periodic(m0)   bobbin   depth")
for r in rows:
    print(f"{r['R']:2.0f}  {r['e_inf_branched']:8.3f}  {r['e_inf_periodic_amsler']:8.3f} ({r['m0']:3d})"
          f"  {r['e_inf_bobbin_bound']:8.2f}  {r['cut_depth']:4d}")

R = np.array([r["R"] for r in rows], float)
le = np.log([r["e_inf_branched"] for r in rows])
print("fit residual of log E_inf: vs sqrt(R)", round(analysis.fit_residual(np.sqrt(R), le), 4),
      " vs R", round(analysis.fit_residual(R, le), 4))
