# Scattering lengths of a few short-range potentials.
#
# The p-wave problem is solved at zero energy; outside the potential the
# solution is 1 - a^3/r^3, and a0 comes from the fourth moment of the energy
# density.  For a hard core both lengths equal the core radius.

import math

import numpy as np

from fermigas.scattering import (JastrowProfile, RadialPotential, calibrate_soft_core, derived_lengths,
                                 moment_integral, solve_p_wave)

hard = solve_p_wave(RadialPotential.hardcore(1.0), r_max=10.0)
print("hard core: a =", hard.a, " a0 =", derived_lengths(hard).a0, " Reff =", derived_lengths(hard).Reff)

r = np.linspace(1, 10, 7)
print("f0 - (1 - 1/r^3):", hard.f(r) - (1 - r ** -3))

# a soft core twice as wide as the target scattering length
V0 = calibrate_soft_core(1.0, 2.0)
soft = solve_p_wave(RadialPotential.softcore(2.0, V0), r_max=40.0)
dl = derived_lengths(soft)
print(f"soft core of radius 2: V0 = {V0:.8f}, a = {soft.a:.12f}, a0 = {dl.a0:.6f}, Reff = {dl.Reff:.6f}")

# wider cores need weaker barriers for the same a
for rf in (2, 4, 8):
    print("  radius factor", rf, "V0 =", calibrate_soft_core(1.0, rf))

# moments of the truncated pair factor that enter the energy
prof = JastrowProfile(hard, 100.0)
print("n=2 moment / 12 pi =", moment_integral(prof, 2) / (12 * math.pi))
print("n=4 moment / 36 pi =", moment_integral(prof, 4) / (36 * math.pi), "(finite cutoff: 1 - a/b = 0.99)")
