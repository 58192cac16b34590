"""Wedge-of-point-scatterers acoustic diffraction solver.

Submodules
----------
specfun        Hankel functions H0^(1), H1^(1) and numeric constants.
linalg         Dense complex LU / eigenvalues / spectral radius / Jacobi SVD.
kernel         The discrete Wiener-Hopf kernel K(z): direct, tail-corrected
               and zeta-accelerated evaluations.
factorization  K = K+ K- by rational (AAA) and Cauchy-integral routes;
               Taylor coefficients of 1/K+.
arrays         Infinite / semi-infinite array coefficients, isolated guess.
wedge          Coupling matrices, iterative scheme, spectral radii, resonance.
field_oracle   Field synthesis on grids and the dense direct solver.
cli            File-driven command line entry point.
"""

__version__ = "0.1.0"
