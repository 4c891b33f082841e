"""Penalty parameters on two quadrilaterals sharing a face.

K1 = (0, 1-delta) x (0, 1) and K2 = (1-delta, 1) x (0, 1) with unit
diffusion.  As delta -> 0 the classical penalty blows up like 1/delta while
the robust one stays bounded by 8 p (p+1); under one-sided degree growth the
robust penalty tends to 32.
"""

import math

from ripdg import FaceCoefficientData, FaceSideData, flux_inverse_constant
from ripdg import ipdg_penalty, ripdg_weights_and_penalty


def face_data(delta, p_left, p_right):
    def side(p, area):
        return FaceSideData(
            m=4,
            c_inv=flux_inverse_constant(p, 1.0, area),
            a_norm_sup=1.0,
            a_inv_sqrt_sup=1.0,
            sqrt_a_norm_sup=1.0,
        )

    return FaceCoefficientData(plus=side(p_left, 1.0 - delta), minus=side(p_right, delta))


print("mesh-size contrast, p = 2 on both sides")
print(f"{'delta':>10} {'classical':>12} {'robust':>10} {'w_left':>8}")
for delta in (0.25, 0.1, 0.01, 1e-4, 1e-8):
    data = face_data(delta, 2, 2)
    fw = ripdg_weights_and_penalty(data)
    print(f"{delta:10.0e} {ipdg_penalty(data):12.4g} {fw.sigma:10.4f} {fw.w_plus:8.4f}")
print(f"robust limit 8 p (p+1) = {8 * 2 * 3}")

print()
print("degree contrast, delta = 1/2, degrees (1, p)")
print(f"{'p':>5} {'classical':>12} {'robust':>10}")
for p in (2, 5, 20, 200):
    data = face_data(0.5, 1, p)
    print(f"{p:5d} {ipdg_penalty(data):12.4g} {ripdg_weights_and_penalty(data).sigma:10.4f}")
print("robust limit as p -> infinity:", 16.0 / (2.0**-0.5) ** 2)
