"""Curvature of rotationally symmetric graph hypersurfaces.

A graph y_{n+1} = h(y_1^2 + ... + y_n^2) in R^{n+1} carries an induced
metric f(r) dr^2 + r^2 dTheta^2 with f = 1 + 4 r^2 h'(r^2)^2.  Its Ricci
tensor comes out of two independent routes implemented here: the direct
coordinate formula and the principal-curvature frame algebra.  The script
tabulates both for the unit sphere and a paraboloid, and shows why the
tangential coefficient must carry (n-2)/f rather than (n+2)/f: the latter
fails flat space.

Run:  python3 demos/03_hypersurface_curvature.py
"""

import numpy as np

from riccisym import GraphEmbedding, parse
from riccisym.hypersurface import (
    curvature_table,
    frame_diagonal,
    induced_metric,
    principal_curvatures,
    ricci_graph,
)

SPHERE = GraphEmbedding(3, parse("sqrt(1 - t)"), 0.9)
PARAB = GraphEmbedding(3, parse("t"), 2.0)
FLAT = GraphEmbedding(3, parse("1"), 2.0)

print("== unit sphere graph, n = 3 (Einstein: Ric = 2 g, scalar = 6) ==")
print("   r      f        Ric_rr/g_rr   Ric_tt/g_tt   h1       h2      scalar")
for r in (0.2, 0.5, 0.8):
    f, g_rr, g_tt = induced_metric(SPHERE, r)
    ric_rr, ric_tt = ricci_graph(SPHERE, r)
    h1, h2 = principal_curvatures(SPHERE, r)
    print(
        f"{r:5.2f}  {f:7.4f}   {ric_rr / g_rr:10.6f}   {ric_tt / g_tt:10.6f}"
        f"  {h1:+.4f}  {h2:+.4f}   {3 * ric_rr / g_rr:.6f}"
    )
print("umbilic: both principal curvatures equal -1 (radius 1, downward normal)")
print()

print("== paraboloid h(u) = u, n = 3 ==")
table = curvature_table(PARAB, np.array([0.0, 0.5, 1.0, 1.5]))
print("   r      f        Ric_rr     Ric_tt_unit  h1        h2       scalar")
for row in table:
    r, f, ric_rr, ric_tt, h1, h2, scal = row
    print(f"{r:5.2f}  {f:7.3f}   {ric_rr:+.6f}  {ric_tt:+.6f}   {h1:+.5f}  {h2:+.5f}  {scal:+.6f}")
print()

print("== two routes to the frame Ricci at r = 1 on the paraboloid ==")
f, g_rr, g_tt = induced_metric(PARAB, 1.0)
ric_rr, ric_tt = ricci_graph(PARAB, 1.0)
print("coordinate route:", (ric_rr / g_rr, ric_tt / g_tt, ric_tt / g_tt))
print("frame route:     ", frame_diagonal(PARAB, 1.0), "(radial, tangential)")
print()

print("== why the tangential coefficient is (n-2)/f ==")
good = ricci_graph(FLAT, 0.8)
bad = ricci_graph(FLAT, 0.8, legacy_coefficient=True)
print(f"flat slice, corrected coefficient: Ric = {good}  (must vanish)")
print(f"flat slice, (n+2) variant:         Ric = {bad}  (forces -4 for every n)")
