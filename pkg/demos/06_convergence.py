"""Central differences converge at second order."""
from quatmax import darboux as Dx
from quatmax import fields as F
from quatmax.convergence import D_error_on_grid, grid_residual, run_study
from quatmax.fields import QuatField
from quatmax.grid import GridSpec

x1 = F.coordinate(1)
spec = GridSpec.cube(-1, 1, 11)

for label, f in [("sin(x1)", QuatField(F.sin(x1))), ("x1 + x2 i1", QuatField(x1, F.coordinate(2)))]:
    res = run_study(D_error_on_grid(f), spec, levels=3)
    print(label, res.status, ["%.3e" % e for e in res.errors], ["%.3f" % p for p in res.orders])

# residual of a transform output with D replaced by differences
g = Dx.GeneratingFunction.from_phi(F.exp(1j * F.coordinate(3)))
f = Dx.darboux_transform(g, Dx.SchrodingerSolution(F.exp(1j * x1), F.constant(-1)))
res = run_study(grid_residual(lambda s: Dx.dirac_residual_grid(f, g.alpha, s)), spec, levels=3)
print("darboux", res.status, ["%.3e" % e for e in res.errors], ["%.3f" % p for p in res.orders])
print("err <= %.2f h^2" % res.constant())
