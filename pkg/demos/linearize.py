"""Geometric linearization of a perturbed elbolic pair.

The radial and rotational generators are perturbed by a random polynomial
change of coordinates; normalization recovers the linear pair and the
matrix of first integrals relating the two.
"""

import random
from fractions import Fraction

from isl.normalform import geometric_linearize
from isl.series import CoordinateChange, PolyVectorField, compose, invert_jet, variables
from isl.sysmodel import IntegrableSystem, verify

N = 5
rng = random.Random(1)
x1, x2 = variables(2, N)
R = PolyVectorField([x1, x2])
J = PolyVectorField([-x2, x1])

phi = CoordinateChange([x1 + x2 * x2 * Fraction(rng.randint(-3, 3), 2),
                        x2 + x1 * x1 * x2 * rng.randint(-2, 2)])
S = IntegrableSystem([compose(X, invert_jet(phi), phi) for X in (R, J)], order=N)
print("perturbed R:", S.fields[0].render())
print("verify:", verify(S).ok)

res = geometric_linearize(S, N)
print("normalized fields:")
for X in res.fields:
    print("  ", X.render())
print("new coordinates in terms of old:")
for line in res.inverse_change.render(["x1", "x2"], ["u1", "u2"]):
    print("  ", line)
print("f(0) =", [[str(q.constant_term()) for q in row] for row in res.f])
