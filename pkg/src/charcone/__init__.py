"""Klein-Gordon solutions in Minkowski and light-cone coordinates.

Mass-shell densities, squeezing maps between momentum parametrisations,
Cauchy and characteristic initial data, and numerical certificates.
"""

from .kinematics import ModelParams

__version__ = "0.1.0"

__all__ = ["ModelParams", "__version__"]
