"""New static solutions from Schrodinger solutions."""
import numpy as np

from quatmax import darboux as Dx
from quatmax import fields as F
from quatmax import maxwellq as Q
from quatmax import media as M
from quatmax.fields import QuatField

x1, x2, x3 = (F.coordinate(k) for k in (1, 2, 3))
x = np.random.default_rng(2).uniform(-1, 1, size=(5, 3))

# phi = e^{i x3} has Lap(phi)/phi = -1, and so does psi = e^{i x1}
g = Dx.GeneratingFunction.from_phi(F.exp(1j * x3), F.constant(-1))
psi = Dx.SchrodingerSolution(F.exp(1j * x1), F.constant(-1))
f = Dx.darboux_transform(g, psi)
print("f at the origin:", f.value(np.zeros(3)))
print("(D + M^alpha) f:", Dx.dirac_residual(f, g.alpha, x).norm_inf())

# alpha solves the Riccati equation, which factorizes -Lap + v
print("riccati residual:", Dx.riccati_residual(g.alpha, g.v, x).norm_inf())
u = F.exp(x2) * F.cos(x1)
print("factorization residual:", Dx.factorization_residual(u, g.alpha, g.v, x).norm_inf())

# the transform turns into static Maxwell fields: here eps = e^{2 i x3}
prof = M.make_profile("planewave-phi", c=(0, 0, 1))
E = Dx.static_maxwell_solution(prof, psi)
cl = Q.classical_residuals(E, QuatField.vector(), prof, M.SourceData(omega=0.0), x)
print("div(eps E):", np.abs(cl.s1).max(), " rot E:", np.abs(cl.s2).max())
