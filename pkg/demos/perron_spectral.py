"""Power iteration, Collatz-Wielandt brackets and the eigencurve of x/(1+x)."""
import numpy as np

from conejsr import Linear, collatz_wielandt_bracket, eigencurve, power_iterate
from conejsr.families import power_mean_pair, saturating_map

A = np.array([[0.0, 2.0, 0.0], [0.0, 0.0, 1.0], [3.0, 0.0, 0.5]])
ep = power_iterate(Linear(A))
print("rho(A) =", ep.value, " numpy:", max(abs(np.linalg.eigvals(A))))
print("CW bracket:", ep.bracket, " iterations:", ep.iterations)

F = power_mean_pair()
ep = power_iterate(F.word_map((0, 1)), dim=2)
print("rho(f1 o f2) =", ep.value, " eigenvector:", ep.vector)
print("bracket at ones:", collatz_wielandt_bracket(F.word_map((0, 1)), np.ones(2)))

grid = np.logspace(-2, 2, 5)
pairs, rep = eigencurve(saturating_map(), grid, dim=1)
for c, r, res, ok in rep.rows():
    print(f"c={c:8.3f}  rho_c={r:.10f}  1/(1+c)={1 / (1 + c):.10f}  monotone={ok}")
print("rho_0 estimate:", rep.rho_zero_est, " rho_inf estimate:", rep.rho_inf_est)
