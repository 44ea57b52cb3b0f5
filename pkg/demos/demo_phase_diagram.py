"""Tour of the multifractal phase diagram for a chosen kappa.

Prints the named special points, classifies a grid of (p, q) pairs into
the four spectrum regions, demonstrates continuity of the spectrum across
each separatrix, and shows the m-fold region sequences along q = 0.
"""

import numpy as np

from slelab import (
    classify,
    classify_mfold,
    curve_eval,
    lower_boundary_q,
    special_points,
)

kappa = 6.0
pts = special_points(kappa)
print(f"kappa = {kappa}")
for name in ("P0", "P1", "Q0", "Q1", "T0", "T1", "T2"):
    p, q = getattr(pts, name)
    print(f"  {name} = ({p:.6f}, {q:.6f})")
print(f"  p* = {pts.p_star:.6f}, p0 = {pts.p0:.6f}, "
      f"p0' = {pts.p0prime:.6f}, p0'' = {pts.p0dblprime:.6f}")

print()
print("region grid over [-4, 4] x [-4, 4] (digits are region numbers):")
digit = {"I": "1", "II": "2", "III": "3", "IV": "4"}
for q in np.linspace(4, -4, 9):
    row = "".join(digit[classify(p, q, kappa).region] for p in np.linspace(-4, 4, 33))
    print(f"  q={q:+.1f}  {row}")

print()
print("spectrum continuity across the lower boundary at p = 1:")
qb = lower_boundary_q(1.0, kappa)
for dq in (-1e-6, 0.0, 1e-6):
    res = classify(1.0, qb + dq, kappa)
    tag = f" boundary of {res.regions}" if res.boundary else ""
    print(f"  q = qb{dq:+.0e}: region {res.region}, beta = {res.beta:.8f}{tag}")

print()
print("m-fold region sequences along q = 0:")
for kap, m, lo, hi in ((30.0, 10, -20.0, 12.0), (2.0, -30, -4.0, 8.0)):
    seen = []
    for p in np.linspace(lo, hi, 400):
        r = classify_mfold(p, 0.0, kap, m).region
        if not seen or seen[-1] != r:
            seen.append(r)
    print(f"  kappa={kap:g}, m={m}: {' -> '.join(seen)}")

print()
print("green parabola sampled around its q = 0 crossing:")
for g in np.linspace(0.9, 1.3, 5):
    p, q = curve_eval("greenParabola", kappa, g)
    print(f"  gamma'={g:.2f}: (p, q) = ({p:+.4f}, {q:+.4f})")
