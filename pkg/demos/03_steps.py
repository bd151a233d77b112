"""Fourier expansions, exchanges and conjugations on small AFs."""

from fractions import Fraction

from orbitree import lie
from orbitree.af import AF, Group, XVariety
from orbitree.partitions import jordan_type
from orbitree.steps import e_step, eu_step, exchange_isomorphism, path, invert_path, path_output, Step

Q = Fraction

# expanding the empty AF over the root group U_(1,2)
const, fam = e_step(AF.empty(2), lie.unit(1, 2))
print("constant term:", const.rep)
print("family:", fam.marker.value, fam.rep, "witness", fam.witness["kind"])

# an exchange in GL_3: trade U_(2,3) for U_(1,2)
f = AF.on_roots(3, [(2, 3), (1, 3)], {(1, 3): Q(1)})
x, y = Group.roots(3, [(1, 2)]), Group.roots(3, [(2, 3)])
z = eu_step(f, x, y)
print("exchanged:", z)

p = path(f, [Step("eu", x=x, y=y)])
print("inverse path returns", path_output(invert_path(p)) == f)

# the exchange moves points of X_f to X_z without changing their orbit
sl = XVariety(f, lower=True)
for coords in ([1, 0], [2, -1], [0, 3]):
    j = sl.point([Q(c) for c in coords] + [Q(0)] * (sl.dim - 2))
    j2 = exchange_isomorphism(f, x, y, j)
    print(jordan_type(j), "->", jordan_type(j2), XVariety(z).contains(j2))
