"""Monomial first integrals of the (1,3) diagonal field.

Y = x1 d/dx1 + x2 d/dx2 - x3 d/dx3 - x4 d/dx4 has a three dimensional
resonance space, but its monoid of nonnegative solutions needs four
generators.
"""

from isl.resonance import monoid_hilbert_basis, resonant_monomials_up_to_degree
from isl.series import render_monomial

C = [[1, 1, -1, -1]]
names = ["x1", "x2", "x3", "x4"]

L = monoid_hilbert_basis(C)
print("resonance space dimension:", L.dimension)
print("Hilbert basis:", ", ".join(render_monomial(e, names) for e in L.hilbert_basis))
print("monoid dimension:", L.monoid_dimension)

# every resonant monomial of degree 4 is a product of two generators
quartic = [e for e in resonant_monomials_up_to_degree(C, 4) if sum(e) == 4]
print(f"{len(quartic)} resonant quartic monomials, e.g.",
      ", ".join(render_monomial(e, names) for e in quartic[:4]))
