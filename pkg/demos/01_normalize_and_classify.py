"""Normalization and classification, step by step.

A handful of nested EL++ axioms are rewritten into the nine normal forms
(watch the fresh `_N#` names appear), then the saturation reasoner derives
every entailed atomic subsumption.
"""

import elkbc

INPUT = """\
# proteins with two provably incompatible functions cannot exist
sub(and(one(GO1), one(GO2)), bot)
sub(and(some(has_function, one(GO1)), some(has_function, one(GO2))), bot)
# one protein per function
instance(some(has_function, one(GO1)), P)
instance(some(has_function, one(GO2)), Q)
# a nested superclass, to show fresh names on the right-hand side
sub(Enzyme, some(catalyzes, and(Reaction, some(produces, Product))))
"""

axioms = elkbc.parse_input(INPUT)
print(f"parsed {len(axioms)} input axioms")

theory, fresh = elkbc.normalize(axioms)
print("\nnormalized theory:")
print(elkbc.serialize_theory(theory))
print("fresh names introduced:")
for name, stands_for in fresh:
    print(f"  {name} = {stands_for}")

index, hierarchy, links = elkbc.classify(theory)
names = theory.signature.concepts
print("\nentailed superclasses (beyond self and owl:Thing):")
for cid in range(theory.n_concepts):
    extra = index.sup[cid] - {cid, elkbc.TOP_ID}
    if extra and cid != elkbc.BOT_ID:
        supers = ", ".join(sorted(names.name_of(x) for x in extra))
        print(f"  {names.name_of(cid)} => {supers}")
