"""Backend adapter so closed-form expressions run under numpy or mpmath.

The exact-solution formulas are written once against this small namespace.
The numpy backend vectorizes; the mpmath backend gives the extended-precision
scalars used by the finite-difference verification sweeps, where double
precision would drown the 1e-8 residual tolerances in rounding noise.
"""

from __future__ import annotations

import numpy as np
import mpmath as mp


class NumpyLib:
    exp = staticmethod(np.exp)
    log = staticmethod(np.log)
    sqrt = staticmethod(np.sqrt)
    cbrt = staticmethod(np.cbrt)
    sin = staticmethod(np.sin)
    cos = staticmethod(np.cos)
    cosh = staticmethod(np.cosh)
    arccos = staticmethod(np.arccos)
    arccosh = staticmethod(np.arccosh)
    arctan = staticmethod(np.arctan)
    pi = np.pi

    @staticmethod
    def to_float(x):
        return x


class MPLib:
    exp = staticmethod(mp.exp)
    log = staticmethod(mp.log)
    sqrt = staticmethod(mp.sqrt)
    cbrt = staticmethod(mp.cbrt)
    sin = staticmethod(mp.sin)
    cos = staticmethod(mp.cos)
    cosh = staticmethod(mp.cosh)
    arccos = staticmethod(mp.acos)
    arccosh = staticmethod(mp.acosh)
    arctan = staticmethod(mp.atan)

    @property
    def pi(self):
        return +mp.pi

    @staticmethod
    def to_float(x):
        return float(x)


NP = NumpyLib()
MP = MPLib()
