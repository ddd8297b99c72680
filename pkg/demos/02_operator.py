"""The operator D = i1 d1 + i2 d2 + i3 d3 on closed-form fields."""
import numpy as np

from quatmax import fields as F
from quatmax.calculus import apply_D, gauge_identity_residual, leibniz_residual
from quatmax.fields import QuatField

x1, x2, x3 = (F.coordinate(k) for k in (1, 2, 3))
x = np.array([[0.3, -0.2, 0.5], [0.1, 0.4, -0.7]])

# scalar input: D returns the gradient
print("D x1      =", apply_D(QuatField(x1), x)[0])
# vector input: minus the divergence plus the rotation
print("D (x2 i1) =", apply_D(QuatField.vector(x2), x)[0])
print("D (x i)   =", apply_D(QuatField.vector(x1, x2, x3), x)[0])

# fields carry exact gradients and Hessians
u = F.exp(x1) * F.sin(x2 + 1j * x3)
print("laplacian of e^x1 sin(x2 + i x3):", u.laplacian(x))

# D applied twice to a scalar is minus its Laplacian
du = QuatField.vector(*(F.partial(u, k) for k in (1, 2, 3)))
print("D D u + Lap u =", (apply_D(du, x) + u.laplacian(x)).norm_inf())

# product rule and the gauge identity used to move a coefficient through D
phi = F.exp(1j * x3)
f = QuatField(1, x2, 0, x1 * x3)
print("leibniz residual:", leibniz_residual(phi, f, x).norm_inf())
print("gauge residual:  ", gauge_identity_residual(phi, f, x).norm_inf())
