"""quatmax: biquaternionic Maxwell equations for inhomogeneous media.

Modules
-------
biquat     complex quaternion algebra
fields     closed-form scalar/biquaternion fields with exact derivative oracles
calculus   the operator D = sum_k i_k d_k and its identities
grid       uniform grids, CSV export, finite-difference D
media      permittivity/permeability profiles and derived quantities
maxwellq   classical and quaternionic Maxwell residuals, residual sweeps
darboux    static solutions, Riccati equation, fundamental solution
convergence observed order of accuracy under grid refinement
verify     invariant suites behind ``quatmax verify``
cli        the ``quatmax`` command line tool
"""
from . import biquat, calculus, convergence, darboux, fields, grid, maxwellq, media, verify  # noqa: F401
from .biquat import I1, I2, I3, ONE, Biquaternion  # noqa: F401
from .fields import QuatField, ScalarField  # noqa: F401

__version__ = "0.1.0"
