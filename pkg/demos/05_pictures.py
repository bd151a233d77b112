"""Grid pictures in ASCII and SVG."""

from orbitree.af import AF, Group
from orbitree.families import build_fak, whittaker
from orbitree.render import annotate, render, to_ascii, to_svg

print(to_ascii(render(whittaker(4))))
print(to_ascii(render(AF.trivial(Group.radical([1, 2, 1])))))

g = render(build_fak([2, 1], 2).af)
print(to_ascii(g))

# highlight an exchange pair in the SVG version
annotate(g, "exchange_x", [(1, 2)])
annotate(g, "exchange_y", [(2, 4)])
with open("fak_21_2.svg", "w") as fh:
    fh.write(to_svg(g))
