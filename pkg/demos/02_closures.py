"""Walkthrough: place relations and additive-closure membership.

Membership of a marking pair in the closure of a relation is a perfect
matching question between the tokens of the two markings. The
theta-extended closure additionally lets tokens be matched away, so the
two markings may differ in size.

Run with:  PYTHONPATH=src python demos/02_closures.py
"""
from pneq import (
    Marking,
    PlaceRelation,
    THETA,
    additive_member,
    d_additive_member,
    related_markings,
)

rel = PlaceRelation.of({("s1", "s3"), ("s1", "s4"), ("s2", "s4")})
m1 = Marking(["s1", "s2"])
m2 = Marking(["s4", "s3"])

# Greedily matching s1 to s4 would strand s2; the matcher finds the
# permutation that works.
w = additive_member(rel, m1, m2)
print("member:", w is not None)
print("association:", list(w.pairs))

# All markings reachable from m1 through the relation, tokenwise:
print("images of s1+s2:", sorted(map(str, related_markings(rel, m1, "left"))))

# Sizes must agree for the plain closure...
print("s1 vs 2*s4:", additive_member(rel, Marking(["s1"]), Marking({"s4": 2})))

# ...but not for the theta-extended one.
drel = PlaceRelation.of({("s1", "s4"), (THETA, "s5"), ("s2", "s6"), ("s3", THETA)})
w2 = d_additive_member(drel, Marking(["s1"]), Marking(["s4", "s5"]))
print("theta-extended member:", list(w2.pairs))
w3 = d_additive_member(drel, Marking(["s2", "s3"]), Marking(["s6"]))
print("matched away:", list(w3.pairs))
