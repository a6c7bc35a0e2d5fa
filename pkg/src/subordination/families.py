"""Named families of (phi_c, phi_j, psi, V) used by the sweeps.

``equivalence_family`` mixes finite, infinite and boundary cases of the
criterion in both envelope modes; every spec carries its expected criterion
verdict so the sweeps can be checked without recomputing the algebra.
"""
from __future__ import annotations

import math

from .scales import ScaleSpec, VolumeProfile
from .subordinate import FamilyMember

P = ScaleSpec.power
W = ScaleSpec.piecewise

GASKET_D = math.log(3) / math.log(2)
GASKET_WALK = math.log(5) / math.log(2)
CARPET_D = math.log(8) / math.log(3)
# walk dimension of the planar Sierpinski carpet (numerical estimate)
CARPET_WALK = 2.097


def gasket_dimensions(n):
    """(d, beta) of the n-dimensional Sierpinski gasket."""
    return math.log(n + 1) / math.log(2), math.log(n + 3) / math.log(2)


def equivalence_family():
    """20 specs; returns a list of (FamilyMember, expected criterion verdict line)."""
    v1 = VolumeProfile(1.0)
    gasket = VolumeProfile(GASKET_D)
    carpet = VolumeProfile(CARPET_D, d_large=2.0)
    pj, dj = "pure_jump", "diffusion_plus_jump"
    return [
        (FamilyMember("pj-a", pj, P(1.5), P(0.5), v1), "finite"),
        (FamilyMember("pj-near", pj, P(1.0), P(0.9), v1), "finite"),
        (FamilyMember("pj-mixed-psi", pj, P(1.8), W(0.6, 2.5), v1), "finite"),
        (FamilyMember("pj-boundary", pj, P(1.0), P(1.0), v1), "infinite (boundary)"),
        (FamilyMember("pj-inf", pj, P(1.0), P(1.5), v1), "infinite"),
        (FamilyMember("pj-gasket", pj, P(0.5), P(0.25), gasket), "finite"),
        (FamilyMember("pj-pw-boundary", pj, P(1.5), W(1.5, 0.5), v1), "infinite (boundary)"),
        (FamilyMember("pj-pw-phi", pj, W(1.2, 0.8), P(0.6), VolumeProfile(2.0)), "finite"),
        (FamilyMember("pj-pw-inf", pj, P(2.0), W(3.0, 1.0), v1), "infinite"),
        (FamilyMember("pj-small", pj, P(1.0), P(0.2), v1), "finite"),
        (FamilyMember("dj-brownian-stable", dj, P(1.0), P(1.5), v1, P(2.0)), "finite"),
        (FamilyMember("dj-b", dj, P(1.5), P(0.8), v1, P(2.0)), "finite"),
        (FamilyMember("dj-gasket", dj, P(1.0), P(0.9), gasket, P(GASKET_WALK)), "finite"),
        (FamilyMember("dj-carpet", dj, P(1.0), P(1.0), carpet, W(CARPET_WALK, 2.0)), "finite"),
        (FamilyMember("dj-boundary", dj, P(1.0), P(2.0), v1, P(2.0)), "infinite (boundary)"),
        (FamilyMember("dj-inf", dj, P(1.0), P(3.0), v1, P(2.0)), "infinite"),
        (FamilyMember("dj-gasket-boundary", dj, P(1.5), P(GASKET_WALK), gasket, P(GASKET_WALK)),
         "infinite (boundary)"),
        (FamilyMember("dj-near", dj, P(0.5), W(1.9, 0.3), v1, P(2.0)), "finite"),
        (FamilyMember("dj-mixed-psi", dj, P(1.0), W(1.0, 4.0), v1, P(3.0)), "finite"),
        (FamilyMember("dj-pw-inf", dj, P(1.0), W(2.5, 0.5), v1, P(2.0)), "infinite"),
    ]
