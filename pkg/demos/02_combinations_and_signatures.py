"""Token combinations and their order-invariant signatures.

A title of l tokens contributes every 2..K subset of its tokens, which is
what lets non-adjacent identifying tokens ("geforce" and "4gb" with "gtx1050"
in between) land in the same group. Signatures hash the sorted member IDs, so
two vendors writing the same combination in different orders collide on
purpose.
"""

from titlematch import (
    UnitLexicon,
    analyze_title,
    count_combinations,
    generate_combinations,
    signature,
)

units = UnitLexicon.default()
title = analyze_title("nVidia GeForce GTX1050 4GB", units)

print(f"title tokens: {title.surfaces}")
for K in (2, 3, 4):
    print(f"K={K}: {count_combinations(title.length, K)} combinations")

print("\nall 2..3-combinations (lexicographic over title positions):")
for combo in generate_combinations(title, 3):
    print(f"  {' + '.join(combo.surfaces)}")

print("\nsignatures ignore token order:")
a = signature([17, 5, 901])
b = signature([901, 17, 5])
print(f"  ids [17, 5, 901]  -> key '{a.canonical_key}' sig {a.value:#018x}")
print(f"  ids [901, 17, 5]  -> key '{b.canonical_key}' sig {b.value:#018x}")
assert a == b
