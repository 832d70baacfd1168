"""The exclusive-or problem studied three ways: Frank-copula probability
surfaces, tiny feedforward networks, and error-surface projections."""

from . import (copula, datasets, kernels, linalg, network, problogic,
               surface, trainer)
from .errors import XorlabError

__version__ = "0.1.0"

__all__ = ["copula", "datasets", "kernels", "linalg", "network",
           "problogic", "surface", "trainer", "XorlabError", "__version__"]
