"""Word enumeration brackets, the sandwich bound and orbit checks."""
import numpy as np

from conejsr import jsr_bracket, slice_jsr_lower, subhomogeneous_sandwich
from conejsr.families import harmonic_family, linear_pair, random_ann_family
from conejsr.bounds import trajectory_divergence_check

b = jsr_bracket(linear_pair(), 8)
for k, lk, uk, word in b.rows:
    print(f"k={k}  L_k={lk:.6f}  U_k={uk:.6f}  best word={[i + 1 for i in word]}")

F = random_ann_family(np.random.default_rng(7), n=3, m=2, activation="tanh")
sw = subhomogeneous_sandwich(F, 4)
print("rho(F_inf) lower:", sw.lower, " rho(F_0) upper:", sw.upper)
for c in (1e-3, 1.0, 1e3):
    print(f"slice c={c:g}: lower estimate {slice_jsr_lower(F, c, 2)[0]:.6f}")

# Homogeneous, order preserving, rho = 1, yet interior orbits are unbounded.
H = harmonic_family()
x = np.array([1.0, 2.0])
rep = trajectory_divergence_check(H, x, radius=0.1, horizon=100, switching=[0] * 100)
y = x
for _ in range(100):
    y = H.maps[0](y)
print("harmonic map: f^100(x) =", y, " Thompson violations:", len(rep.violations))
