"""A linear Hamiltonian system that is integrable but degenerate.

Both generators commute and preserve the two quadratic integrals, yet the
second generator is nilpotent, so the classification stops with a witness.
"""

from isl.classify import is_nondegenerate
from isl.dsl import parse_system
from isl.sysmodel import verify

SOURCE = """
vars x1 x2 y1 y2
field Y1 = x1*d(x1) - y1*d(y1) - x2*d(x2) + y2*d(y2)
field Y2 = y2*d(x1) + y1*d(x2)
integral G1 = x1*y1 - x2*y2
integral G2 = y1*y2
"""

S = parse_system(SOURCE)
rep = verify(S)
print(f"type ({S.p},{S.q}) on {S.m} variables")
for key in ("commutation", "integrals", "independence_fields", "independence_integrals"):
    print(f"  {key:24s} {getattr(rep, key + '_ok')}")

verdict = is_nondegenerate(S)
print(verdict.summary())
for name, mu in zip(S.field_names, verdict.minimal_polynomials):
    print(f"  minimal polynomial of {name}: {mu.render('t')}")
