# Exact cluster-expansion identities on a small discrete torus.
#
# With an alias-free grid the plane waves are exactly orthonormal, so the
# expansion of the Jastrow normalization and two-point density in g = f^2 - 1
# can be compared with brute-force sums over all particle positions.

import math

import numpy as np

from fermigas.fermi_surface import MomentumSet
from fermigas.ggr import (GProfile, direct_oracle, expansion_report, normalization_series, rho_jas_series,
                          small_diagram_catalog)
from fermigas.slater import DiscreteTorus, OneBodyKernel

torus = DiscreteTorus(1, 1.0, 16)
gp = GProfile(torus, g=lambda r: -0.9 * np.exp(-(np.asarray(r) / 0.12) ** 2))
K = OneBodyKernel(MomentumSet.from_points([[-1], [0], [1]], L=1.0))

print("C_N/N!  series:", normalization_series(K, gp), " brute force:", direct_oracle(K, gp)["norm"])
ext = np.array([[0.1], [0.35]])
print("rho2_Jas series:", rho_jas_series(K, gp, ext)["rho_jas"],
      " brute force:", direct_oracle(K, gp, 2, ext)["rho_jas"])

print("\nlinked series for log(C_N/N!) with g scaled by 0.1")
K4 = OneBodyKernel(MomentumSet.from_points([[-1], [0], [1], [2]], L=1.0))
weak = gp.scaled(0.1)
exact = math.log(direct_oracle(K4, weak)["norm"])
for row in expansion_report(K4, weak, P=4):
    print(f"  p={row['p']}  diagrams={row['n_diagrams']:4d}  error={abs(row['partial_sum'] - exact):.2e}")

print("\nsmall diagrams at grid-node externals")
for cid in ("A", "B1", "B2", "C"):
    out = small_diagram_catalog(cid, K4, gp, torus.nodes[[2, 9]])
    print(f"  {cid:3s} closed form {out['value']:+.12f}  generic {out['generic']:+.12f}")
