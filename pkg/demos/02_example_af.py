"""The N=6 AF with two minimal orbits, built by hand and by the family builder."""

from fractions import Fraction

from orbitree.af import AF, XVariety, rg
from orbitree.canonical import omega_report, xi_st
from orbitree.families import build_fnkl
from orbitree.io import tree_to_dot
from orbitree.render import render, to_ascii

Q = Fraction

pairs = [
    ({(1, 2): Q(1), (4, 5): Q(1)}, Q(1)),
    ({(2, 3): Q(1), (5, 6): Q(1)}, Q(1)),
    ({(1, 3): Q(1), (4, 6): Q(1)}, Q(0)),
]
for i in range(1, 4):
    for j in range(1, 4):
        pairs.append(({(i, 3 + j): Q(1)}, Q(int(i == j))))
f = AF.from_pairs(6, pairs)
f.check()
print(f)
print("dim X_F =", XVariety(f).dim, " roots in rg(F):", rg(f).dim)

# same AF from the three-parameter family
print("equal to fnkl(3,2,2):", f == build_fnkl(3, 2, 2).af)

print(to_ascii(render(f)))

rep = omega_report(f)
print("omega", rep.omega, "mult", rep.mult)

tree = xi_st(f)
print("tree size", tree.size(), "depth", tree.depth())
with open("example_tree.dot", "w") as fh:
    fh.write(tree_to_dot(tree))
