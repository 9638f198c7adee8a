#!/usr/bin/env python3
"""Sample functions, the three norm families, and weights.

Walks through the basic vocabulary: finitely supported functions on the
lattice, counting l^p / Orlicz / discrete Morrey norms, weights with their
admissibility constants, and the weighted norm that pairs them.
"""

import math

from wcodyn import (
    AffineLatticeMap,
    ConstantWeight,
    EllPNorm,
    MorreyNorm,
    OrliczNorm,
    PowerYoung,
    RadialPowerWeight,
    Region,
    SampleFunction,
    inf_weight_on,
    norm,
    validate_weight,
    weighted_norm,
)

print("== sample functions ==")
f = SampleFunction({(0,): 1.0, (1,): -2.0, (4,): 0.5})
print(f"f = {f}")
print(f"support: {sorted(f.support)}, sup |f| = {f.sup_abs()}")

print("\n== three norm families ==")
block = SampleFunction.indicator([(i,) for i in range(5)])
print(f"l^1 of a 5-site indicator:    {norm(EllPNorm(1), block)}   (counting measure)")
print(f"l^2 of the same indicator:    {norm(EllPNorm(2), block):.6f}")

# the Luxemburg gauge for the square Young function reproduces l^2
lux = norm(OrliczNorm(PowerYoung(2.0), tol=1e-10), SampleFunction.indicator([(0,), (1,)]))
print(f"Orlicz gauge, square Young:   {lux:.10f}   (sqrt(2) = {math.sqrt(2):.10f})")

# the Morrey norm scans cubes; a single site always contributes exactly 1
morrey = MorreyNorm(p=2, q=1, max_radius=10)
print(f"Morrey of a single site:      {norm(morrey, SampleFunction.indicator([(0,)]))}")
print(f"Morrey of the 5-site block:   {norm(morrey, block):.6f}   (best cube wins)")

print("\n== weights ==")
eta = RadialPowerWeight(p=1)  # 1 inside the unit ball, 1/|x| outside
for x in (0, 1, 2, 10):
    print(f"eta({x:3d}) = {eta.value_at((x,)):.4f}")

shift = AffineLatticeMap.translation((-1,))
region = Region.box([[-5, 5]])
k_alpha = validate_weight(eta, shift, region)
print(f"admissibility constant of eta along the unit shift on [-5,5]: {k_alpha}")
print(f"  (largest jump eta(x-1)/eta(x) or eta(x+1)/eta(x); attained near the unit ball)")
print(f"infimum of eta over [-2,2]: {inf_weight_on(eta, Region.box([[-2, 2]]))}")

print("\n== weighted norms ==")
bump = SampleFunction.indicator([(2,)])
print(f"||chi_2||_l1            = {norm(EllPNorm(1), bump)}")
print(f"||chi_2||_l1, eta       = {weighted_norm(EllPNorm(1), eta, bump)}   (= eta(2))")
two_sites = SampleFunction.indicator([(0,), (10,)])
print(f"||chi_0 + chi_10||_eta  = {weighted_norm(EllPNorm(1), eta, two_sites)}   (= 1 + 1/10)")
print(f"flat weight recovers the plain norm: "
      f"{weighted_norm(EllPNorm(1), ConstantWeight(1.0), two_sites)}")
