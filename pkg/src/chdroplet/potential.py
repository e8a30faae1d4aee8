"""Double-well potential F(m) = (m^2 - 1)^2 / 4 and its derivatives.

The two minima m = +-1 are the pure phases; every module in the package
uses this fixed potential.
"""

import numpy as np

# 1 / F''(-1): quadratic cost of supersaturating the -1 phase.
COMPRESSIBILITY = 0.5

# Closed form of the planar surface tension integral(sqrt(2 F), -1..1).
SURFACE_TENSION = 2.0 ** 1.5 / 3.0


def F(m):
    """Bulk free energy density."""
    return 0.25 * (np.asarray(m) ** 2 - 1.0) ** 2


def dF(m):
    """F'(m) = m^3 - m."""
    m = np.asarray(m)
    return m ** 3 - m


def d2F(m):
    """F''(m) = 3 m^2 - 1."""
    return 3.0 * np.asarray(m) ** 2 - 1.0
