"""Orbit counting and bisector analysis for discrete subgroups of SO(3,1).

Subpackage map:

* ``liecore``   -- PSL(2,C) / SO°(3,1) elements, the explicit isomorphism,
  norms, KAK decomposition, Haar conventions, Poisson kernel.
* ``harmonics`` -- spherical harmonics on K/M, Wigner-type harmonics on K,
  and the paired bisector harmonics.
* ``lineops``   -- line model of the complementary series: exact K-type
  vectors, the Lie-algebra operators, intertwining constants, matrix
  coefficients.
* ``orbit``     -- exact integer orbit enumeration (circle counts, vector
  orbits, group balls) and power-law exponent fitting.
* ``psmeasure`` -- empirical boundary measures, harmonic moments, bisector
  sums with leading-term predictions, packing-constant estimation.
* ``geometry``  -- curvature-center augmentation, boundary plane charts,
  circle fitting, SVG rendering.
* ``cli``       -- the ``apollonia`` command-line frontend.
"""

from . import liecore  # noqa: F401

__all__ = ["liecore"]
__version__ = "0.1.0"
