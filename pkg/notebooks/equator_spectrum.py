"""Walk-through: negative directions of the energy Hessian at the equator map.

The count drops from two to one as d passes 7. Below 4 + 2 sqrt(2) the
linearization oscillates and the count keeps growing as the grid reaches
closer to the origin.

    python notebooks/equator_spectrum.py
"""
import numpy as np

from shrinkers import diagnostics as D

for d in np.arange(6.5, 8.01, 0.1):
    r = D.morse_index(float(d))
    print(f"d={d:.2f}  disc={r.discriminant:+.3f}  negative={r.negative_count}  "
          f"lowest={np.round(r.smallest, 4)}")

for d in (5, 6):
    print(f"d={d} refinement (nodes, y_min, count):", D.morse_refinement(d))
