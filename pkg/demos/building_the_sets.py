"""Walk the kernel from its axioms up to Set(P[P[Nat]]).

Every Theorem below is produced by a kernel operation and carries a
replayable trace; nothing in this script is trusted.
"""

from ogkernel import Kernel, render
from ogkernel.kernel import axioms_used, leaf_kinds, verify_trace
from ogkernel.stdlib import build_naturals, build_powerset_domain, build_two

kernel = Kernel()

print("== the two-object set comes straight from an axiom ==")
two = build_two(kernel)
print(f"  {two.set_!r}")
print(f"  equality table rows: {len(two.eq.rows)} (one per pair of objects)")

print("\n== the naturals: declaration, numeral equality, and one hypothesis ==")
nat = build_naturals(kernel)
for thm in nat.theorems:
    print(f"  |- {render(thm.judgment)}")
print(f"  trace leaves of Set(Nat): {sorted(leaf_kinds(nat.set_))}")

print("\n== the powerset tower ==")
pnat = build_powerset_domain(kernel, nat)
ppnat = build_powerset_domain(kernel, pnat)
for result in (pnat, ppnat):
    uses = ", ".join(sorted(a.value for a in axioms_used(result.set_).elements()))
    print(f"  |- {render(result.set_.judgment)}   (axioms: {uses})")

print("\n== every theorem replays through the rule checker ==")
for result in (two, nat, pnat, ppnat):
    for thm in result.theorems:
        report = verify_trace(thm)
        assert report.passed
print("  all traces verified")

print("\n== equality only exists inside one set ==")
from ogkernel.kernel import CrossDomainEqualityError
from ogkernel.semantics import default_model
from ogkernel.terms import NAT, TWO, ObjLit

query = kernel.eq_within_domain(nat.domain, ObjLit("3", NAT), ObjLit("3", NAT))
print(f"  eq(3, 3) evaluates to {query.evaluate(default_model(5))!r}")
try:
    kernel.eq_within_domain(nat.domain, ObjLit("yes", TWO), ObjLit("0", NAT))
except CrossDomainEqualityError as refusal:
    print(f"  mixed query refused: {refusal}")

print("\n== H2 at work: a concrete surjection admits a section ==")
from ogkernel.semantics import Carrier, Model
from ogkernel.stdlib import choice_instance
from ogkernel.terms import Ident, Named, Table

kernel.gen_intro(Ident("G"))
g = Named(Ident("G"))
model = Model.make({"G": Carrier("G", ("a", "b", "c"))}, nat_bound=1)
surj = Table(
    g,
    TWO,
    tuple(
        (ObjLit(t, g), ObjLit(v, TWO))
        for t, v in (("a", "yes"), ("b", "yes"), ("c", "no"))
    ),
)
section = choice_instance(kernel, surj, g, TWO, model)
print(f"  |- {render(section.judgment)}")
