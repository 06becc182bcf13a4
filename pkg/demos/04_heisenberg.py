"""The Heisenberg group H3(Z/k), its abelian subgroups and its action on Nil^3_k."""

from ricciforge.heisenberg import (abelian_subgroups, commutator, generators, min_abelian_index, nil_act,
                                   nil_equal, random_nil_points)

for k in range(2, 7):
    print(f"k={k}: |G| = {k**3}, abelian subgroups = {len(abelian_subgroups(k))}, "
          f"minimal abelian index = {min_abelian_index(k)}")

k = 5
X, Y, Z = generators(k)
p = random_nil_points(1, k, seed=1)[0]
print("[X, Y] acts like Z on Nil^3_5:", nil_equal(nil_act(commutator(X, Y), p), nil_act(Z, p)))
