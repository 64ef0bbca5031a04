"""Turning a parameter into a variable.

The family (1 + theta) x d/dx becomes a type (1,1) system on (x, theta)
with theta as a first integral.  Its linear part at the origin has one more
hyperbolic direction than the theta = 0 member, and that direction is null.
"""

from isl.classify import cartan_type, linear_parts_of
from isl.dsl import parse_system
from isl.sysmodel import SystemFamily, suspend_family, verify

S = parse_system("vars x theta\nfield X = (1 + theta)*x*d(x)\ntruncation 4")
family = SystemFamily.from_system(S, 1)
T = suspend_family(family)
print(f"suspended system of type ({T.p},{T.q}); verify: {verify(T).ok}")

member = family.member([0])
for label, system in (("theta = 0 member", member), ("suspension", T)):
    F, _ = linear_parts_of(system)
    ct = cartan_type(F)
    print(f"{label}: (h, e) = ({ct.h}, {ct.e}), null directions {ct.null}")
