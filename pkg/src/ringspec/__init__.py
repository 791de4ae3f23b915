"""Eigenvalues and eigenfunctions of annular Dirichlet drums (quantum rings).

Four engines are provided:

* :mod:`ringspec.exact` -- circular annulus via cross-product Bessel zeros,
* :mod:`ringspec.ccm` -- conformal collocation on a mixed-boundary sinc grid,
* :mod:`ringspec.analytic` -- resummed first-order formula and Weyl's law,
* :mod:`ringspec.variational` -- inverse-operator variational ground states,

plus :mod:`ringspec.spectral_geometry` for recovering area, perimeter and
the topological constant from a finite list of eigenvalues.
"""

from .conformal import PowerSeriesMap, annulus_map, robnik_map
from .errors import (
    AccuracyError,
    DegeneracyError,
    DomainError,
    RingSpecError,
    StateError,
)
from .spectrum import LabeledLevel, Spectrum

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "DegeneracyError",
    "DomainError",
    "LabeledLevel",
    "PowerSeriesMap",
    "RingSpecError",
    "Spectrum",
    "StateError",
    "annulus_map",
    "robnik_map",
]
