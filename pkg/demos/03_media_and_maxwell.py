"""Classical and quaternionic Maxwell residuals in an inhomogeneous medium."""
import numpy as np

from quatmax import fields as F
from quatmax import maxwellq as Q
from quatmax import media as M
from quatmax.fields import QuatField

# eps = exp(x1 + 2 x2), mu = exp(x3)
prof = M.parse_profile("product-exp:a=1,2,0,b=0,0,1")
t = M.transform(prof, omega=1.5)
x = np.random.default_rng(1).uniform(-1, 1, size=(4, 3))
print(prof.label())
print("eps_vec (constant):", t.eps_vec.value(x)[0])
print("mu_vec  (constant):", t.mu_vec.value(x)[0])

# arbitrary smooth fields and sources: not a solution, residuals are nonzero
x1, x2, x3 = (F.coordinate(k) for k in (1, 2, 3))
E = QuatField.vector(F.sin(x2), x1 * x3, F.exp(1j * x1))
H = QuatField.vector(F.cos(x3), 0, x2)
src = M.SourceData(rho=x1 * x2, j=QuatField.vector(0, 1, 0), omega=1.5)

classical = Q.classical_residuals(E, H, prof, src, x)
direct = Q.quaternionic_residuals(*M.scale_fields(E, H, t), t, src, x)
mapped = Q.equivalence_map(classical, t, x)
print("|s1| =", np.abs(classical.s1).round(3))
print("R1 direct vs mapped:", (direct.R1 - mapped.R1).norm_inf())
print("R2 direct vs mapped:", (direct.R2 - mapped.R2).norm_inf())

# the same relation run in reverse recovers the classical residuals
back = Q.inverse_equivalence_map(direct, t, x)
print("s4 recovered:", np.abs(back.s4 - classical.s4).max())

# a plane wave in vacuum solves both systems
vac = M.make_profile("vacuum")
w = F.exp(-1j * x1)
E0, H0 = QuatField.vector(0, 0, w), QuatField.vector(0, -w, 0)
t0 = M.transform(vac, 1.0)
r = Q.quaternionic_residuals(*M.scale_fields(E0, H0, t0), t0, M.SourceData(omega=1.0), x)
print("plane wave residuals:", r.R1.norm_inf().max(), r.R2.norm_inf().max())
