"""Partitions, dominance order and orbit dimensions."""

from fractions import Fraction

from orbitree.linalg import zeros
from orbitree.partitions import (
    compare,
    jordan_type,
    minimal_elements,
    orbit_dim,
    partitions,
    richardson,
    transpose,
)

# dominance is only a partial order: these two are incomparable
print(compare([4, 1, 1], [3, 3]))
print(transpose([3, 1]), orbit_dim([4, 1, 1]))

# Jordan type from the rank sequence of a nilpotent matrix
m = zeros(4, 4)
m[1][0] = m[2][1] = Fraction(1)
print("jordan", jordan_type(m))

# Richardson orbit of a parabolic with Levi blocks (2, 2)
print("richardson", richardson((2, 2)))

# all partitions of 6 with their orbit dimension
for a in partitions(6):
    print(a, orbit_dim(a))

print(minimal_elements([(4, 1, 1), (3, 3), (4, 2)]))
