"""Scattering and dispersive decay for a discrete Dirac operator on the integer lattice."""
from .potential import InvalidPotentialError, Potential, truncated_matrix
from .spectral_map import Band, DomainError

__all__ = ["Band", "DomainError", "InvalidPotentialError", "Potential", "truncated_matrix"]
__version__ = "0.1.0"
