"""Numerical verification lab for weighted integral inequalities and potential theory.

Subpackages cover deterministic quadrature over balls and spheres, test-function
families, Bessel series and Neumann eigenvalues of the unit ball, inequality
checks with error budgets, BMO/doubling/reverse-Holder estimation, desk-scale
holomorphic and pluriharmonic extension in two complex variables, and Liouville
divergence criteria on radial model manifolds.
"""

__version__ = "0.1.0"
