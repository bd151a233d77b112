"""Closed forms against the engine on the three family types."""

from orbitree.families import (
    build_fnkl,
    certify,
    embedding_verify,
    thd1_closed,
    verify_theorem,
)

for n, k, l in [(2, 3, 2), (3, 2, 2), (3, 3, 2)]:
    rep = verify_theorem("thD1", certified=True, n=n, k=k, l=l)
    print("thD1", (n, k, l), rep.computed, rep.passed, f"{rep.runtime_ms} ms")

print("thD2", verify_theorem("thD2", n=3, k=2).computed)
print("thD3a", verify_theorem("thD3a", a=[2, 1], k=2).computed)

for a, k in [([2], 2), ([3], 2), ([1, 1], 2)]:
    rep = embedding_verify(a, k)
    print("embedding", a, k, rep.computed, "mult", rep.notes["mult"])

spec = build_fnkl(3, 2, 2)
p = certify(spec)
print("certified path with", len(p.stages), "stages ends at the family AF:", p.end == spec.af)
print("closed form (4,4,3):", thd1_closed(4, 4, 3))
