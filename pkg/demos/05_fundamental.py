"""The fundamental solution away from the origin, sampled on a grid."""
import tempfile
from pathlib import Path

import numpy as np

from quatmax import darboux as Dx
from quatmax import fields as F
from quatmax import maxwellq as Q
from quatmax.grid import Ball, GridSpec, sample

c = 1.0
g = Dx.GeneratingFunction.from_phi(F.exp(1j * c * F.coordinate(3)))

# closed form and transform of e^{icr}/(4 pi r) are the same field
x = np.array([[1.0, 0.0, 0.0], [0.3, -1.2, 0.4]])
via = Dx.darboux_transform(g, Dx.SchrodingerSolution(Dx.fundamental_psi(c), F.constant(-c * c)))
print("closed form at (1,0,0):", Dx.fundamental_solution(g, c, x)[0])
print("route difference:", (via.value(x) - Dx.fundamental_solution(g, c, x)).norm_inf())

# grid on [-2, 2]^3 with the origin cut out
spec = GridSpec.cube(-2, 2, 33, Ball((0, 0, 0), 0.1))
rep = Q.sweep(lambda p: {"dirac": Dx.dirac_residual(via, g.alpha, p).coeffs}, spec,
              profile="planewave-phi:c=0,0,1", omega=0.0)
print(rep.to_json())

# the sampled field goes to CSV; nodes inside the ball are flagged invalid
out = Path(tempfile.mkdtemp()) / "fundamental.csv"
sample(via, spec).to_csv(out)
print(out, sum(1 for _ in open(out)) - 1, "rows")
