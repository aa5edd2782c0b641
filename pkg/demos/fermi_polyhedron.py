# Fermi polyhedron versus Fermi ball.
#
# The polyhedron has rational corners, exact volume 4 pi/3 and a Lebesgue
# constant growing like s (log R)^3 instead of R.  This script builds one,
# fills it with lattice momenta and compares both regions.

import math

from fermigas.fermi_surface import PolyhedronSpec, build_polyhedron, enumerate_momenta, kinetic_sums
from fermigas.lebesgue import scaling_study

P = build_polyhedron(PolyhedronSpec(d=3, s=48, Q=10 ** 6))
print("corners:", len(P.p), " faces:", len(P.faces), " primes:", P.primes)
print("volume - 4 pi/3 =", float(P.volume) - 4 * math.pi / 3)
print("sigma =", P.sigma_string(30))

for R in (8, 16):
    ball = enumerate_momenta("ball", R, d=3)
    poly = enumerate_momenta(P, R)
    print(f"R={R}: N_ball={ball.N}, N_poly={poly.N}, kinetic deviation ball {kinetic_sums(ball).dev2:+.2e}, "
          f"poly {kinetic_sums(poly).dev2:+.2e}")

print("\nLebesgue constants")
b = scaling_study("ball", [4, 8, 16])["rows"]
p = scaling_study(P, [4, 8, 16])["rows"]
for rb, rp in zip(b, p):
    print(f"  R={rb['R']:3d}  ball {rb['value']:8.3f}   polyhedron {rp['value']:8.3f}")
