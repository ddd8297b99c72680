"""Complex quaternion arithmetic."""
import numpy as np

from quatmax.biquat import I1, I2, I3, ONE, Biquaternion, dot_via_anticommutator, left_mul, right_mul

# the units multiply like Hamilton's quaternions
print("i1 i2 =", I1 * I2)
print("i2 i1 =", I2 * I1)

# (2 + 3 i1)(2 - 3 i1) is the norm form 4 + 9
print("(2+3i1)(2-3i1) =", Biquaternion(2, 3) * Biquaternion(2, -3))

# with complex coefficients there are nonzero elements squaring to zero
z = I1 + 1j * I2
print("z =", z, " z*z =", z * z)

# left and right multiplication are different operators
print("right_mul(i2)(i1) =", right_mul(I2)(I1), " left_mul(i2)(i1) =", left_mul(I2)(I1))

# everything is batched: a Biquaternion can hold an array of values
rng = np.random.default_rng(0)
p = Biquaternion.from_array(rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4)))
q = Biquaternion.from_array(rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4)))
print("batch shape", p.shape, " |pq - qp| =", (p * q - q * p).norm_inf().round(3))

# for vectors, -(pq + qp)/2 is the bilinear scalar product
u, v = rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=3)
print("anticommutator:", dot_via_anticommutator(u, v), " direct:", u @ v)
print("identity acts trivially:", ONE * I3 == I3)
