"""Building maps, checking properties and taking asymptotic limits."""
import numpy as np

from conejsr import Compose, ann, asymptotic_infinity, asymptotic_zero, check_properties

A = np.array([[0.2, 0.1], [0.1, 0.3]])
B = np.array([[0.4, 0.2], [0.1, 0.5]])
f = ann(A, B, activation="tanh")
g = ann(B, A, activation="sigmoid")

rep = check_properties(f, samples=500, seed=1)
print("tanh layer: homogeneous =", f.is_homogeneous(), " property violations =", len(rep.violations))

# f(cx)/c tends to (A+B)x as c -> 0 and to Ax as c -> inf.
x = np.array([1.0, 2.0])
print("f_0(x) =", asymptotic_zero(f, dim=2)(x), "  (A+B)x =", (A + B) @ x)
print("f_inf(x) =", asymptotic_infinity(f, dim=2)(x), "  Ax =", A @ x)

h = Compose(f, g)
lhs = asymptotic_infinity(h, dim=2)(x)
rhs = asymptotic_infinity(f, dim=2)(asymptotic_infinity(g, dim=2)(x))
print("(f o g)_inf(x) =", lhs, "  f_inf(g_inf(x)) =", rhs)
