"""Constrained Willmore torus laboratory.

Subpackages build, from the bottom up: Weierstrass elliptic functions,
constrained elastic curve data on S^2, closed profile curves and their
families, Hopf lifts with Willmore quadrature, the (1,2)-equivariant
associated families, and the second-variation stability scan at
homogeneous tori.
"""

__version__ = "0.1.0"
