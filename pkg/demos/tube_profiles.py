"""Radial profiles of first-order tubes in anisotropic flat worlds.

A symmetric flat world collapses every first-order tube to a straight line.
Switching on a cubic anisotropy inflates the tube into a genuine surface of
revolution: two concentric sheets that pinch together at the two skeleton
points, with a waist whose radii have closed forms.  Strong anisotropy blows
a hole through the middle of the tube.

Run:  python3 demos/tube_profiles.py
"""

import numpy as np

from tgeom import (
    WorldSpec,
    case1_radii,
    case1_waist,
    case2_asymptotic_radius,
    make_world,
    sample_axisymmetric_tube,
)

MINK = [1, -1, -1, -1]
Y = np.array([1.0, 0, 0, 0])


def cubic_anisotropy_world(strength):
    return make_world(WorldSpec.from_dict({
        "kind": "case1", "dim": 4, "metric": MINK,
        "b": [1, 0, 0, 0], "alpha": strength,
    }))


def main():
    print("=== waist radii vs anisotropy strength ===")
    print(f"{'g':>6} {'inner':>12} {'outer':>12}")
    for g in (0.01, 0.05, 0.1, 0.3, 0.5, 0.57, 0.6):
        waist = case1_waist(g)
        if waist is None:
            print(f"{g:6.2f} {'-- profile empty at the center --':>25}")
        else:
            print(f"{g:6.2f} {waist[0]:12.6f} {waist[1]:12.6f}")
    print("(small g: inner ~ 0.75 g, outer ~ 1/g; above 1/sqrt(3) ~ 0.577 "
          "the center is empty)\n")

    g = 0.1
    w = cubic_anisotropy_world(g)
    print(f"=== numeric sampler vs closed form, g = {g} ===")
    taus = np.linspace(-0.5, 1.5, 9)
    print(f"{'tau':>6} {'sampled radii':>28} {'closed form':>28}")
    for tau, radii in sample_axisymmetric_tube(w, Y, "n", taus):
        want = case1_radii(tau, g)
        print(f"{tau:6.2f} {str([round(r, 6) for r in radii]):>28} "
              f"{str([round(r, 6) for r in want]):>28}")
    print("(the profile is symmetric under tau -> 1 - tau and pinches to "
          "r = 0 only at the skeleton points)\n")

    print("=== outer sheet opens at the light-cone slope sqrt(3) ===")
    for tau in (10.0, 100.0, 1000.0):
        r = case1_radii(tau, 0.3)[-1]
        print(f"tau = {tau:7.1f}: outer r/tau = {r / tau:.6f}")
    print(f"limit: {np.sqrt(3):.6f}\n")

    print("=== screened anisotropy: finite radius at late times ===")
    w2 = make_world(WorldSpec.from_dict({
        "kind": "case2", "dim": 4, "metric": MINK,
        "b": [1, 0, 0, 0], "alpha": 0.2, "beta": 1.0,
    }))
    for tau in (10.0, 100.0, 1000.0):
        [(_, radii)] = sample_axisymmetric_tube(w2, Y, "n", [tau])
        print(f"tau = {tau:7.1f}: radius = {radii[-1]:.6f}")
    print(f"limit: {case2_asymptotic_radius(0.2, 1.0, 1.0):.6f}")


if __name__ == "__main__":
    main()
