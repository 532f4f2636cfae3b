#!/usr/bin/env python3
"""Finite-difference exterior calculus on a small 4D grid.

Shows the wedge normalization, the exactly vanishing discrete d^2, and the
second-order decay of the graded Leibniz defect of the forms bracket.
"""

import numpy as np

from pcgrav import fields as F
from pcgrav.geometry import minkowski_tetrad
from pcgrav.grid import Grid4

grid = Grid4(2.0, 9)
print(f"grid: [-2, 2]^4, N = {grid.points}, h = {grid.spacing}")

e = minkowski_tetrad(grid)
ee = F.wedge(e, e)
print("\n(e ^ e) on matching pairs :", ee.component((0, 1), (0, 1))[0, 0, 0, 0])
print("Tr(e^e^e^e) / volume form :",
      F.trace4(F.wedge(ee, ee)).data[0, 0, 0, 0, 0, 0])
print("box integral of the constant 1:",
      F.integrate(F.FormField(grid, 4, 0, np.ones((1, 1) + grid.shape))),
      "(= (2L)^4)")

rng = np.random.default_rng(1)
a = F.FormField(grid, 1, 2, rng.normal(size=(4, 6) + grid.shape))
print("\nmax |d(d a)| on a random rough field:",
      f"{F.ext_d(F.ext_d(a)).max_abs():.3e}",
      "(axis stencils commute exactly)")

print("\ngraded Leibniz defect of d against the so(3,1) forms bracket:")
for n in (9, 13, 17):
    g = Grid4(1.0, n)
    k = np.pi / 2


    def smooth(seed):
        r = np.random.default_rng(seed)
        data = np.zeros((4, 6) + g.shape)
        for s in range(4):
            for i in range(6):
                amp = r.normal(size=4)
                data[s, i] = sum(amp[m] * np.sin(
                    k * np.broadcast_to(g.coordinate(m), g.shape) + 0.2 * m)
                    for m in range(4))
        return F.FormField(g, 1, 2, data)

    a, b = smooth(2), smooth(3)
    # d[a,b] = [da,b] + (-1)^|a| [a,db] with |a| = 1
    defect = (F.ext_d(F.form_dgla_bracket(a, b))
              - F.form_dgla_bracket(F.ext_d(a), b)
              + F.form_dgla_bracket(a, F.ext_d(b)))
    print(f"  N = {n:2d}  h = {g.spacing:.4f}  defect = {defect.max_abs():.3e}")
print("(defect halves twice per halving of h: the bracket and d assemble "
      "a differential graded Lie algebra up to discretization)")
