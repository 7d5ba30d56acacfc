"""Sets of lattice elements as pseudo-antichains.

Builds a few sets over the grid {0..3}^2, combines them and prints both the
compact representation and the enumerated elements.
"""
from pamdp import ProductNatLattice, PseudoAntichain

lat = ProductNatLattice(2, 3)


def show(label, A):
    print(f"{label:<10} {A.format():<40} {sorted(A.enumerate())}")


# everything below (3, 2) except what lies below (2, 1) or (0, 2)
A = PseudoAntichain.from_pairs(lat, [((3, 2), [(2, 1), (0, 2)])])
B = PseudoAntichain.closed(lat, [(2, 2)])
show("A", A)
show("B", B)
show("A | B", A | B)
show("A & B", A & B)
show("A - B", A - B)
show("B - A", B - A)

print("A & B <= B:", (A & B) <= B)
print("(A - B) | (A & B) == A:", ((A - B) | (A & B)).equals(A))
