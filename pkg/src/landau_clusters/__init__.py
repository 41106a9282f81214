"""Eigenvalue clusters of the perturbed Landau Hamiltonian, computed at desk scale.

Modules: ``potentials`` (test potentials with exact oracles), ``specfun`` and
``quadrature`` (Laguerre/Hermite/Airy/Bessel, Gauss rules), ``radon`` (circle
averages and I(r)), ``weyl`` (Weyl quantization in the Hermite basis),
``reduced`` (the reduced operator T_n), ``cluster`` (the full 2D check),
``inverse`` (ring-profile recovery and Sobolev norms) and ``cli``.
"""

__version__ = "0.1.0"

from .errors import BoundaryMassWarning, ConvergenceError, ResourceCapError
from .potentials import GaussianSpec, Potential, make_constant, make_gaussian, make_mixture
from .specfun import SemiclassicalPoint

__all__ = [
    "BoundaryMassWarning", "ConvergenceError", "ResourceCapError",
    "GaussianSpec", "Potential", "make_constant", "make_gaussian", "make_mixture",
    "SemiclassicalPoint", "__version__",
]
