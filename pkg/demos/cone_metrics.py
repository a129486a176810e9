"""Dominance ratios and the Thompson/Hilbert metrics on the orthant."""
import numpy as np

from conejsr import dominance_lower, dominance_upper, hilbert_distance, thompson_distance

x = np.array([1.0, 4.0])
y = np.array([2.0, 1.0])
print("M(x/y) =", dominance_upper(x, y), " m(x/y) =", dominance_lower(x, y))
print("d_T(x, y) =", thompson_distance(x, y))
print("d_H(x, y) =", hilbert_distance(x, y), "  d_H(3x, y/5) =", hilbert_distance(3 * x, y / 5))

# Boundary points: equal supports give finite distances, different supports do not.
e1 = np.array([1.0, 0.0])
print("d_T(e1, 2 e1) =", thompson_distance(e1, 2 * e1), "  d_T(e1, x) =", thompson_distance(e1, x))
