"""Weight regions and the local signature matrix.

The triple (a, b, c) determines how hard approximate counting is; the
boundaries are triangle-style inequalities.  This script prints the
4x4 signature matrix for a sample triple (rows indexed by the first
two inputs, columns by the reversed last two, which is what makes the
matrices compose by matrix product when chained), then sweeps c and
shows which regions the triple (1, 1, c) passes through.
"""

from icehouse import Weights, classify_region, signature_from_weights

w = Weights(2, 3, 5)
print("signature matrix for (a, b, c) = (2, 3, 5):")
print(signature_from_weights(w).matrix())
print()

print(f"{'c':>5s} {'F_le2':>6s} {'F_le':>6s} {'F_eq':>6s} {'F_gt':>6s}")
for c in [0.5, 1.0, 1.4, 1.5, 2.0, 2.5]:
    r = classify_region(Weights(1, 1, c))
    print(
        f"{c:5.2f} {str(r.in_F_le2):>6s} {str(r.in_F_le):>6s} "
        f"{str(r.in_F_eq):>6s} {str(r.in_F_gt):>6s}"
    )

print()
print("boundary triples are evaluated literally, with no tolerance")
print("except on the c = a + b line:")
r = classify_region(Weights(3, 4, 5))
print("  (3, 4, 5): 25 = 9 + 16 holds exactly in floats  ->", r)
r = classify_region(Weights(1, 1, 2 ** 0.5))
print("  (1, 1, sqrt 2): (sqrt 2)^2 rounds above 2       ->", r)
