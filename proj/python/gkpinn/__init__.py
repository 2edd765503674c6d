"""Singularly perturbed convection-diffusion solvers.

Compiled core: baseline PINN and the boundary-layer-augmented GKPINN
architecture, benchmark problems, fitted-mesh finite-difference references,
and the experiment runner.
"""

from ._gkpinn import *  # noqa: F401,F403
from ._gkpinn import __doc__ as _core_doc  # noqa: F401
